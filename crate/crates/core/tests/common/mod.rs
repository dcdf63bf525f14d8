//! Seeded random models and states shared by the integration tests.
#![allow(dead_code)]

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::fock::{ModeLayout, ModeSubset, OccupationVector, StateVector};
use bogofisher::oracle::GeneratorSpec;
use bogofisher::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

fn unit_phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random Hermitian `h`, symmetric `g` and unit phases.
pub fn random_generator(rng: &mut ChaCha8Rng, modes: usize) -> GeneratorSpec {
    let mut h = DMatrix::zeros(modes, modes);
    let mut g = DMatrix::zeros(modes, modes);
    for i in 0..modes {
        h[(i, i)] = C64::new(complex(rng, 0.6).re, 0.0);
        g[(i, i)] = complex(rng, 0.6);
        for j in i + 1..modes {
            let x = complex(rng, 0.6);
            h[(i, j)] = x;
            h[(j, i)] = x.conj();
            let y = complex(rng, 0.6);
            g[(i, j)] = y;
            g[(j, i)] = y;
        }
    }
    let phases = (0..modes).map(|_| unit_phase(rng)).collect();
    GeneratorSpec::new(h, g, phases).unwrap()
}

/// A validated model built directly: `α⁽¹⁾_mn = G_m X_mn` with `X` anti-Hermitian and
/// `β⁽¹⁾_mn = G_m S_mn` with `S` symmetric.
pub fn random_model(rng: &mut ChaCha8Rng, modes: usize) -> BogoliubovFirstOrder {
    let g: Vec<C64> = (0..modes).map(|_| unit_phase(rng)).collect();
    let mut x = DMatrix::zeros(modes, modes);
    let mut s = DMatrix::zeros(modes, modes);
    for i in 0..modes {
        x[(i, i)] = C64::new(0.0, complex(rng, 1.0).im);
        s[(i, i)] = complex(rng, 1.0);
        for j in i + 1..modes {
            let a = complex(rng, 1.0);
            x[(i, j)] = a;
            x[(j, i)] = -a.conj();
            let b = complex(rng, 1.0);
            s[(i, j)] = b;
            s[(j, i)] = b;
        }
    }
    let alpha1 = DMatrix::from_fn(modes, modes, |m, n| g[m] * x[(m, n)]);
    let beta1 = DMatrix::from_fn(modes, modes, |m, n| g[m] * s[(m, n)]);
    BogoliubovFirstOrder::new(g, alpha1, beta1).unwrap().validated().unwrap()
}

/// Normalized random superposition of `terms` Fock vectors with occupations up to `max_occ`.
pub fn random_state(rng: &mut ChaCha8Rng, layout: ModeLayout, max_occ: u32, terms: usize) -> StateVector {
    let entries = (0..terms)
        .map(|_| {
            let occ = (0..layout.modes()).map(|_| rng.random_range(0..=max_occ)).collect::<Vec<_>>();
            (OccupationVector::new(occ), complex(rng, 1.0))
        })
        .collect::<Vec<_>>();
    StateVector::from_terms(layout, entries).unwrap().normalized().unwrap()
}

/// Random nonempty proper subset of the modes.
pub fn random_keep(rng: &mut ChaCha8Rng, modes: usize) -> ModeSubset {
    loop {
        let picked: Vec<usize> = (0..modes).filter(|_| rng.random_bool(0.5)).collect();
        if !picked.is_empty() && picked.len() < modes {
            return ModeSubset::new(&picked, modes).unwrap();
        }
    }
}

/// `|ψ⟩_keep |r⟩_rest` with `|r⟩` a single Fock vector (vacuum when `vacuum_rest`).
///
/// With `even_only` every term of `|ψ⟩` has an even total excitation number, so no two terms
/// differ by a single excitation.
pub fn random_factorized_state(
    rng: &mut ChaCha8Rng,
    layout: ModeLayout,
    keep: &ModeSubset,
    max_occ: u32,
    terms: usize,
    even_only: bool,
    vacuum_rest: bool,
) -> StateVector {
    let modes = layout.modes();
    let rest: Vec<u32> = (0..modes).map(|_| if vacuum_rest { 0 } else { rng.random_range(0..=max_occ) }).collect();
    let mut entries = Vec::with_capacity(terms);
    while entries.len() < terms {
        let mut counts = rest.clone();
        for &m in keep.indices() {
            counts[m] = rng.random_range(0..=max_occ);
        }
        let total: u32 = keep.indices().iter().map(|&m| counts[m]).sum();
        if even_only && total % 2 == 1 {
            continue;
        }
        entries.push((OccupationVector::new(counts), complex(rng, 1.0)));
    }
    StateVector::from_terms(layout, entries).unwrap().normalized().unwrap()
}
