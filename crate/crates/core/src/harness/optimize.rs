//! Fixed-energy search for the probe state with the largest (reduced) QFI on a declared
//! Fock support.

use log::debug;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::pool::worker_pool;
use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, ModeSubset, OccupationVector, StateVector};
use crate::perturb::{build_generator, transform_with, FirstOrderPair};
use crate::qfi::tracing_loss_of_pair;
use crate::C64;

/// Largest accepted `|⟨N⟩ − target|` and `|‖ψ‖² − 1|` of a result.
pub const CONSTRAINT_TOLERANCE: f64 = 1e-8;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 0.1;
const CONVERGED_SPREAD: f64 = 1e-13;
const WEIGHT_FLOOR: f64 = 1e-16;
const LOG_EVERY: usize = 100;

#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { seed: 0, max_iter: 2000, restarts: 8 }
    }
}

/// Best objective of one restart at one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub restart: usize,
    pub iteration: usize,
    pub objective: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    /// Amplitudes over the support, global phase fixed so the largest one is real positive.
    pub amplitudes: Vec<(OccupationVector, C64)>,
    pub state: StateVector,
    /// The maximized objective `qfi_pure − tracing_loss`.
    pub qfi: f64,
    pub qfi_pure: f64,
    pub tracing_loss: Option<f64>,
    pub avg_n: f64,
    /// `|⟨N⟩ − target|`.
    pub constraint_residual: f64,
    pub norm_residual: f64,
    pub winning_restart: usize,
    pub log: Vec<IterationRecord>,
}

/// The objective on one support, with the first-order pairs of the basis states cached.
struct Problem<'a> {
    support: Vec<OccupationVector>,
    energies: Vec<f64>,
    target: f64,
    pairs: Vec<FirstOrderPair>,
    s11: DMatrix<C64>,
    s01: DMatrix<C64>,
    keep: Option<&'a ModeSubset>,
    layout: ModeLayout,
}

impl<'a> Problem<'a> {
    fn new(
        spec: &BogoliubovFirstOrder,
        support: &[OccupationVector],
        target: f64,
        keep: Option<&'a ModeSubset>,
    ) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidArgument("support is empty".into()));
        }
        let mut support = support.to_vec();
        support.sort();
        support.dedup();
        if let Some(bad) = support.iter().find(|o| o.len() != spec.modes()) {
            return Err(Error::LayoutMismatch(format!("support vector {bad} does not have {} modes", spec.modes())));
        }
        let energies: Vec<f64> = support.iter().map(|o| o.total() as f64).collect();
        let (lo, hi) = bounds(&energies);
        if !(target.is_finite() && lo - CONSTRAINT_TOLERANCE <= target && target <= hi + CONSTRAINT_TOLERANCE) {
            return Err(Error::Infeasible(format!("target <N> = {target} lies outside the support range [{lo}, {hi}]")));
        }
        let cutoff = support.iter().map(|o| o.max_count()).max().unwrap_or(0) + 2;
        let layout = ModeLayout::new(spec.modes(), cutoff)?;
        let k = build_generator(spec)?;
        let pairs = support
            .iter()
            .map(|o| transform_with(&k, spec, &StateVector::fock(layout, o.counts())?))
            .collect::<Result<Vec<_>>>()?;
        let d = support.len();
        let mut s11 = DMatrix::zeros(d, d);
        let mut s01 = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                s11[(a, b)] = pairs[a].psi1.inner(&pairs[b].psi1)?;
                s01[(a, b)] = pairs[a].psi0.inner(&pairs[b].psi1)?;
            }
        }
        let problem = Self { support, energies, target, pairs, s11, s01, keep, layout };
        if keep.is_some() {
            // Rejects supports whose complement is not one common Fock vector.
            let uniform = DVector::from_element(d, C64::new(1.0 / (d as f64).sqrt(), 0.0));
            problem.loss(&uniform)?;
        }
        Ok(problem)
    }

    fn dim(&self) -> usize {
        self.support.len()
    }

    fn coords_to_amps(&self, x: &[f64]) -> DVector<C64> {
        DVector::from_iterator(self.dim(), (0..self.dim()).map(|a| C64::new(x[2 * a], x[2 * a + 1])))
    }

    fn amps_to_coords(c: &DVector<C64>) -> Vec<f64> {
        c.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Moves weight by exponential tilting `p_a ∝ w_a e^{λ N_a}` so the state is normalized
    /// with `⟨N⟩ = target`, keeping the phases.
    fn project(&self, c: &DVector<C64>) -> Result<DVector<C64>> {
        let weights: Vec<f64> = c.iter().map(|z| z.norm_sqr()).collect();
        let top = weights.iter().cloned().fold(0.0, f64::max);
        let weights: Vec<f64> = if top > 0.0 {
            weights.iter().map(|w| w.max(WEIGHT_FLOOR * top)).collect()
        } else {
            vec![1.0; weights.len()]
        };
        let probs = tilt(&weights, &self.energies, self.target)?;
        Ok(DVector::from_iterator(
            self.dim(),
            c.iter().zip(probs).map(|(z, p)| {
                let phase = if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) };
                phase * p.sqrt()
            }),
        ))
    }

    fn qfi_pure(&self, c: &DVector<C64>) -> f64 {
        let ca = c.adjoint();
        let norm1 = (&ca * &self.s11 * c)[(0, 0)].re;
        let overlap = (&ca * &self.s01 * c)[(0, 0)];
        (4.0 * (norm1 - overlap.norm_sqr())).max(0.0)
    }

    fn combine(&self, c: &DVector<C64>) -> Result<FirstOrderPair> {
        let mut psi0 = StateVector::zero(self.layout);
        let mut psi1 = StateVector::zero(self.layout);
        for (pair, &ca) in self.pairs.iter().zip(c.iter()) {
            psi0 = psi0.add_scaled(&pair.psi0, ca)?;
            psi1 = psi1.add_scaled(&pair.psi1, ca)?;
        }
        Ok(FirstOrderPair { psi0, psi1 })
    }

    fn loss(&self, c: &DVector<C64>) -> Result<Option<f64>> {
        match self.keep {
            Some(keep) => Ok(Some(tracing_loss_of_pair(&self.combine(c)?, keep)?)),
            None => Ok(None),
        }
    }

    /// `qfi_pure − tracing_loss` of the projected point.
    fn objective(&self, x: &[f64]) -> Result<f64> {
        let c = self.project(&self.coords_to_amps(x))?;
        Ok(self.qfi_pure(&c) - self.loss(&c)?.unwrap_or(0.0))
    }
}

fn bounds(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Probabilities `p_a ∝ w_a e^{λ E_a}` with `Σ p_a E_a = target`, found by bisection on `λ`.
fn tilt(weights: &[f64], energies: &[f64], target: f64) -> Result<Vec<f64>> {
    let (lo, hi) = bounds(energies);
    let normalize = |p: Vec<f64>| {
        let s: f64 = p.iter().sum();
        p.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    if hi - lo < CONSTRAINT_TOLERANCE || (target - lo).abs() < 1e-14 || (target - hi).abs() < 1e-14 {
        if hi - lo >= CONSTRAINT_TOLERANCE || (target - lo).abs() < CONSTRAINT_TOLERANCE {
            let edge = if (target - lo).abs() <= (target - hi).abs() { lo } else { hi };
            let p = weights.iter().zip(energies).map(|(&w, &e)| if e == edge { w } else { 0.0 }).collect();
            return Ok(normalize(p));
        }
        return Err(Error::Infeasible(format!("every support vector has N = {lo}, target is {target}")));
    }
    let distribution = |lambda: f64| {
        let shift = energies.iter().map(|e| lambda * e).fold(f64::NEG_INFINITY, f64::max);
        normalize(weights.iter().zip(energies).map(|(&w, &e)| w * (lambda * e - shift).exp()).collect())
    };
    let mean = |p: &[f64]| p.iter().zip(energies).map(|(p, e)| p * e).sum::<f64>();
    let (mut a, mut b) = (-1.0, 1.0);
    while mean(&distribution(a)) > target {
        a *= 2.0;
        if a < -1e6 {
            return Err(Error::Infeasible(format!("cannot lower <N> to {target}")));
        }
    }
    while mean(&distribution(b)) < target {
        b *= 2.0;
        if b > 1e6 {
            return Err(Error::Infeasible(format!("cannot raise <N> to {target}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mean(&distribution(mid)) < target {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    Ok(distribution(0.5 * (a + b)))
}

/// Outcome of one Nelder–Mead run: best point, its objective and the sparse log.
struct Run {
    x: Vec<f64>,
    value: f64,
    log: Vec<IterationRecord>,
}

/// Maximizes `f` from `x0` with the standard reflection, expansion, contraction and shrink
/// steps.
fn nelder_mead<F>(f: F, x0: Vec<f64>, max_iter: usize, restart: usize) -> Result<Run>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let dim = x0.len();
    let cost = |x: &[f64]| f(x).map(|v| -v);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.clone(), cost(&x0)?));
    for i in 0..dim {
        let mut x = x0.clone();
        x[i] += INITIAL_STEP;
        let v = cost(&x)?;
        simplex.push((x, v));
    }
    let mut log = Vec::new();
    let towards = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };
    for iteration in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if iteration % LOG_EVERY == 0 {
            log.push(IterationRecord { restart, iteration, objective: -simplex[0].1 });
        }
        let spread = simplex[dim].1 - simplex[0].1;
        if spread <= CONVERGED_SPREAD * (1.0 + simplex[0].1.abs()) {
            debug!("restart {restart} converged after {iteration} iterations");
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = towards(&centroid, &worst.0, -REFLECT);
        let fr = cost(&reflected)?;
        if fr < simplex[0].1 {
            let expanded = towards(&centroid, &worst.0, -EXPAND);
            let fe = cost(&expanded)?;
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst.1 {
            let x = towards(&centroid, &reflected, CONTRACT);
            let v = cost(&x)?;
            (x, v)
        } else {
            let x = towards(&centroid, &worst.0, CONTRACT);
            let v = cost(&x)?;
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = towards(&best, &vertex.0, SHRINK);
            let v = cost(&x)?;
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    log.push(IterationRecord { restart, iteration: max_iter.min(log.len() * LOG_EVERY), objective: -v });
    Ok(Run { x, value: -v, log })
}

/// Rotates the global phase so the largest amplitude, earliest on ties, is real positive.
fn canonical_phase(c: &DVector<C64>) -> DVector<C64> {
    let mut lead = 0;
    for (i, z) in c.iter().enumerate() {
        if z.norm() > c[lead].norm() * (1.0 + 1e-12) {
            lead = i;
        }
    }
    let z = c[lead];
    if z.norm() == 0.0 {
        return c.clone();
    }
    c * (z.conj() / z.norm())
}

fn lexicographic(a: &DVector<C64>, b: &DVector<C64>) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Maximizes `qfi_pure − tracing_loss` over normalized states on `support` with
/// `⟨N⟩ = target_n`.
///
/// Restart 0 starts from uniform amplitudes, the others from seeded random points. Restarts
/// run in parallel and the winner is the best objective, then the lexicographically largest
/// amplitudes.
pub fn optimize_state(
    spec: &BogoliubovFirstOrder,
    support: &[OccupationVector],
    target_n: f64,
    keep: Option<&ModeSubset>,
    options: &OptimizeOptions,
) -> Result<OptimizationResult> {
    if options.restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is required".into()));
    }
    let problem = Problem::new(spec, support, target_n, keep)?;
    let d = problem.dim();
    let starts: Vec<Vec<f64>> = (0..options.restarts)
        .map(|r| {
            if r == 0 {
                vec![1.0 / (d as f64).sqrt(); d].into_iter().flat_map(|a| [a, 0.0]).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_add(r as u64));
                (0..2 * d).map(|_| rng.random_range(-1.0..1.0)).collect()
            }
        })
        .collect();
    let pool = worker_pool()?;
    let runs = pool.install(|| {
        starts
            .into_par_iter()
            .enumerate()
            .map(|(r, x0)| {
                let x0 = Problem::amps_to_coords(&problem.project(&problem.coords_to_amps(&x0))?);
                nelder_mead(|x| problem.objective(x), x0, options.max_iter, r)
            })
            .collect::<Result<Vec<Run>>>()
    })?;
    let mut candidates = Vec::with_capacity(runs.len());
    let mut log = Vec::new();
    for (r, run) in runs.into_iter().enumerate() {
        let amps = canonical_phase(&problem.project(&problem.coords_to_amps(&run.x))?);
        candidates.push((r, run.value, amps));
        log.extend(run.log);
    }
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| lexicographic(&b.2, &a.2)));
    let (winning_restart, _, amps) = candidates.swap_remove(0);
    let state = StateVector::from_terms(problem.layout, problem.support.iter().cloned().zip(amps.iter().copied()))?;
    let qfi_pure = problem.qfi_pure(&amps);
    let tracing_loss = problem.loss(&amps)?;
    let avg_n = problem.energies.iter().zip(amps.iter()).map(|(e, z)| e * z.norm_sqr()).sum::<f64>();
    let norm_residual = (state.norm_sqr() - 1.0).abs();
    let constraint_residual = (avg_n - target_n).abs();
    if constraint_residual >= CONSTRAINT_TOLERANCE || norm_residual >= CONSTRAINT_TOLERANCE {
        return Err(Error::Infeasible(format!(
            "projection left <N> residual {constraint_residual:e} and norm residual {norm_residual:e}"
        )));
    }
    Ok(OptimizationResult {
        amplitudes: problem.support.iter().cloned().zip(amps.iter().copied()).collect(),
        state,
        qfi: qfi_pure - tracing_loss.unwrap_or(0.0),
        qfi_pure,
        tracing_loss,
        avg_n,
        constraint_residual,
        norm_residual,
        winning_restart,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfi::qfi_two_mode_closed;

    fn occ(v: &[u32]) -> OccupationVector {
        OccupationVector::new(v.to_vec())
    }

    #[test]
    fn tilt_hits_target() {
        let p = tilt(&[1.0, 1.0, 1.0], &[0.0, 2.0, 4.0], 3.1).unwrap();
        let mean: f64 = p.iter().zip([0.0, 2.0, 4.0]).map(|(p, e)| p * e).sum();
        assert!((mean - 3.1).abs() < 1e-12);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tilt_at_edge_keeps_only_edge_states() {
        let p = tilt(&[0.5, 0.5], &[2.0, 4.0], 2.0).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn infeasible_targets() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        let support = [occ(&[1, 1]), occ(&[2, 2])];
        let err = optimize_state(&spec, &support, 7.0, None, &OptimizeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let err = optimize_state(&spec, &[occ(&[1, 1])], 3.0, None, &OptimizeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn single_point_support_returns_the_fock_state() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        let opts = OptimizeOptions { restarts: 2, max_iter: 200, ..Default::default() };
        let res = optimize_state(&spec, &[occ(&[3, 3])], 6.0, None, &opts).unwrap();
        let want = qfi_two_mode_closed(&spec, 3, 0, 3, 1).unwrap().qfi;
        assert!((res.qfi - want).abs() < 1e-9);
        assert!((res.amplitudes[0].1 - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
