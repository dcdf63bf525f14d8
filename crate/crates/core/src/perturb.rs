//! Zeroth- and first-order transformed states for Fock superpositions.
//!
//! The evolution is written as `U(θ) = (1 + θK) U⁽⁰⁾ + O(θ²)` where `U⁽⁰⁾` is the free
//! evolution and `K` is an anti-Hermitian quadratic form in the mode operators:
//!
//! ```text
//! K = Σ_mn A_mn a†_m a_n + Σ_pq P_pq a†_p a†_q + Σ_pq Q_pq a_p a_q
//! A_mn = G_n α⁽¹⁾*_mn,   P_pq = −½ G*_q β⁽¹⁾*_pq,   Q_pq = ½ G_q β⁽¹⁾_pq
//! ```
//!
//! so that `|ψ̃⁽⁰⁾⟩ = U⁽⁰⁾|ψ⟩` and `|ψ̃⁽¹⁾⟩ = K|ψ̃⁽⁰⁾⟩`. With this sign the vacuum maps to
//! `|ψ̃⁽¹⁾⟩ = −½ Σ G*_q β⁽¹⁾*_pq a†_p a†_q |0⟩`, and the squeezer takes `|n⟩` to
//! `+½√(n(n−1))|n−2⟩ − ½√((n+1)(n+2))|n+2⟩`.

use nalgebra::DMatrix;

use crate::bogoliubov::{validate, BogoliubovFirstOrder};
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, StateVector};
use crate::C64;

/// Largest accepted `K†+K` residual.
pub const ANTI_HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Largest accepted truncation leakage of `|ψ̃⁽¹⁾⟩`.
pub const LEAKAGE_BUDGET: f64 = 1e-10;

/// Validity ratio threshold below which the expansion is trusted.
pub const VALIDITY_THRESHOLD: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorK {
    number: DMatrix<C64>,
    create_pairs: DMatrix<C64>,
    annihilate_pairs: DMatrix<C64>,
}

impl GeneratorK {
    /// Raw coefficient blocks; no anti-Hermiticity check.
    pub fn from_blocks(
        number: DMatrix<C64>,
        create_pairs: DMatrix<C64>,
        annihilate_pairs: DMatrix<C64>,
    ) -> Result<Self> {
        let m = number.nrows();
        for mat in [&number, &create_pairs, &annihilate_pairs] {
            if mat.nrows() != m || mat.ncols() != m {
                return Err(Error::InvalidArgument("generator blocks must be square and equal".into()));
            }
        }
        Ok(Self { number, create_pairs, annihilate_pairs })
    }

    pub fn modes(&self) -> usize {
        self.number.nrows()
    }

    /// Coefficients of `a†_m a_n`.
    pub fn number(&self) -> &DMatrix<C64> {
        &self.number
    }

    /// Coefficients of `a†_p a†_q`.
    pub fn create_pairs(&self) -> &DMatrix<C64> {
        &self.create_pairs
    }

    /// Coefficients of `a_p a_q`.
    pub fn annihilate_pairs(&self) -> &DMatrix<C64> {
        &self.annihilate_pairs
    }

    pub fn is_zero(&self) -> bool {
        let zero = |m: &DMatrix<C64>| m.iter().all(|c| c.re == 0.0 && c.im == 0.0);
        zero(&self.number) && zero(&self.create_pairs) && zero(&self.annihilate_pairs)
    }

    /// Largest coefficient of `K + K†`.
    ///
    /// Only the symmetric parts of the pair blocks enter the operator, so those are compared.
    pub fn anti_hermiticity_residual(&self) -> f64 {
        let m = self.modes();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let num = self.number[(i, j)] + self.number[(j, i)].conj();
                let sym_create = 0.5 * (self.create_pairs[(i, j)] + self.create_pairs[(j, i)]);
                let sym_annihilate = 0.5 * (self.annihilate_pairs[(i, j)] + self.annihilate_pairs[(j, i)]);
                let pair = sym_annihilate + sym_create.conj();
                worst = worst.max(num.norm()).max(pair.norm());
            }
        }
        worst
    }

    /// `K|ψ⟩`. Terms pushed past the cutoff are dropped and counted as leakage.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let m = self.modes();
        if psi.layout().modes() != m {
            return Err(Error::LayoutMismatch(format!(
                "generator has {m} modes, state has {}",
                psi.layout().modes()
            )));
        }
        let mut out = StateVector::zero(*psi.layout());
        let lowered: Vec<StateVector> = (0..m).map(|n| psi.annihilate(n)).collect();
        let raised: Vec<StateVector> = (0..m).map(|q| psi.create(q)).collect();
        for n in 0..m {
            for mm in 0..m {
                let c = self.number[(mm, n)];
                if c != C64::default() {
                    out = out.add_scaled(&lowered[n].create(mm), c)?;
                }
                let q = self.annihilate_pairs[(mm, n)];
                if q != C64::default() {
                    out = out.add_scaled(&lowered[n].annihilate(mm), q)?;
                }
                let p = self.create_pairs[(mm, n)];
                if p != C64::default() {
                    out = out.add_scaled(&raised[n].create(mm), p)?;
                }
            }
        }
        Ok(out)
    }

    /// Dense matrix of `K` compressed onto the truncated basis.
    pub fn to_dense(&self, layout: &ModeLayout) -> Result<DMatrix<C64>> {
        let dim = layout.dense_dim()?;
        let mut mat = DMatrix::zeros(dim, dim);
        for (j, occ) in layout.basis().enumerate() {
            let col = self.apply(&StateVector::fock(*layout, occ.counts())?)?;
            for (o, c) in col.terms() {
                mat[(layout.index_of(o), j)] = *c;
            }
        }
        Ok(mat)
    }

    /// Largest entry of `|K + K†|` for the dense truncated matrix.
    pub fn dense_anti_hermiticity_residual(&self, layout: &ModeLayout) -> Result<f64> {
        let k = self.to_dense(layout)?;
        let sum = &k + k.adjoint();
        Ok(sum.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }
}

/// The first-order generator of a validated model.
pub fn build_generator(spec: &BogoliubovFirstOrder) -> Result<GeneratorK> {
    let report = validate(spec);
    if !report.passed() {
        return Err(Error::Validation(Box::new(report)));
    }
    let m = spec.modes();
    let g = spec.g();
    let (alpha, beta) = (spec.alpha1(), spec.beta1());
    let number = DMatrix::from_fn(m, m, |i, j| g[j] * alpha[(i, j)].conj());
    let create_pairs = DMatrix::from_fn(m, m, |p, q| -0.5 * g[q].conj() * beta[(p, q)].conj());
    let annihilate_pairs = DMatrix::from_fn(m, m, |p, q| 0.5 * g[q] * beta[(p, q)]);
    let k = GeneratorK { number, create_pairs, annihilate_pairs };
    let residual = k.anti_hermiticity_residual();
    if residual > ANTI_HERMITICITY_TOLERANCE {
        return Err(Error::AntiHermiticity { residual });
    }
    Ok(k)
}

/// `|ψ̃⁽⁰⁾⟩` and `|ψ̃⁽¹⁾⟩` for one input state.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderPair {
    pub psi0: StateVector,
    pub psi1: StateVector,
}

impl FirstOrderPair {
    /// `⟨ψ̃⁽⁰⁾|ψ̃⁽¹⁾⟩`, purely imaginary for an anti-Hermitian generator.
    pub fn overlap(&self) -> C64 {
        self.psi0.inner(&self.psi1).expect("pair shares one layout")
    }
}

/// Applies the free evolution `U⁽⁰⁾`: each term gains `Π_n (G*_n)^{occ_n}`.
pub fn free_evolution(spec: &BogoliubovFirstOrder, input: &StateVector) -> Result<StateVector> {
    if input.layout().modes() != spec.modes() {
        return Err(Error::LayoutMismatch(format!(
            "model has {} modes, state has {}",
            spec.modes(),
            input.layout().modes()
        )));
    }
    let g = spec.g();
    Ok(input.map_terms(|occ| {
        occ.counts()
            .iter()
            .zip(g)
            .fold(C64::new(1.0, 0.0), |acc, (&n, gn)| acc * gn.conj().powu(n))
    }))
}

/// Zeroth- and first-order output states for a normalized input.
///
/// Requires a cutoff at least two above the largest occupation in the input.
pub fn transform_first_order(spec: &BogoliubovFirstOrder, input: &StateVector) -> Result<FirstOrderPair> {
    let k = build_generator(spec)?;
    transform_with(&k, spec, input)
}

/// As [`transform_first_order`] with a prebuilt generator.
pub fn transform_with(k: &GeneratorK, spec: &BogoliubovFirstOrder, input: &StateVector) -> Result<FirstOrderPair> {
    input.require_normalized()?;
    let cutoff = input.layout().cutoff();
    let needed = input.max_occupation() + 2;
    if needed > cutoff {
        return Err(Error::Headroom { needed, cutoff });
    }
    let psi0 = free_evolution(spec, input)?;
    let psi1 = k.apply(&psi0)?;
    if psi1.leakage() > LEAKAGE_BUDGET {
        return Err(Error::Leakage { leakage: psi1.leakage(), budget: LEAKAGE_BUDGET });
    }
    Ok(FirstOrderPair { psi0, psi1 })
}

/// `θ²·I/4` and whether it lies below [`VALIDITY_THRESHOLD`].
pub fn validity_check(theta: f64, qfi: f64) -> (f64, bool) {
    let ratio = theta * theta * qfi / 4.0;
    (ratio, ratio < VALIDITY_THRESHOLD)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::OccupationVector;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn squeezer_vacuum() {
        let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1).unwrap();
        let l = ModeLayout::new(1, 6).unwrap();
        let pair = transform_first_order(&spec, &StateVector::vacuum(l)).unwrap();
        assert_eq!(pair.psi0, StateVector::vacuum(l));
        assert_eq!(pair.psi1.len(), 1);
        let amp = pair.psi1.amplitude(&OccupationVector::new(vec![2]));
        assert!((amp - c(-std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn squeezer_fock_state_has_two_terms() {
        let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1).unwrap();
        let l = ModeLayout::new(1, 12).unwrap();
        for n in 2..=10u32 {
            let pair = transform_first_order(&spec, &StateVector::fock(l, &[n]).unwrap()).unwrap();
            assert_eq!(pair.psi1.len(), 2);
            let nf = n as f64;
            let down = pair.psi1.amplitude(&OccupationVector::new(vec![n - 2]));
            let up = pair.psi1.amplitude(&OccupationVector::new(vec![n + 2]));
            assert!((down - c(0.5 * (nf * (nf - 1.0)).sqrt())).norm() < 1e-12);
            assert!((up - c(-0.5 * ((nf + 1.0) * (nf + 2.0)).sqrt())).norm() < 1e-12);
        }
    }

    #[test]
    fn two_mode_squeezer_one_one() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        let l = ModeLayout::new(2, 4).unwrap();
        let pair = transform_first_order(&spec, &StateVector::fock(l, &[1, 1]).unwrap()).unwrap();
        assert_eq!(pair.psi1.len(), 2);
        assert!((pair.psi1.amplitude(&OccupationVector::new(vec![0, 0])) - c(1.0)).norm() < 1e-15);
        assert!((pair.psi1.amplitude(&OccupationVector::new(vec![2, 2])) - c(-2.0)).norm() < 1e-15);
    }

    #[test]
    fn beam_splitter_moves_one_excitation() {
        let spec = BogoliubovFirstOrder::beam_splitter(0, 1, 2).unwrap();
        let l = ModeLayout::new(2, 3).unwrap();
        let pair = transform_first_order(&spec, &StateVector::fock(l, &[1, 0]).unwrap()).unwrap();
        assert_eq!(pair.psi1.len(), 1);
        assert!((pair.psi1.amplitude(&OccupationVector::new(vec![0, 1])).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn null_model_gives_zero_generator() {
        let spec = BogoliubovFirstOrder::null(2);
        let k = build_generator(&spec).unwrap();
        assert!(k.is_zero());
        let l = ModeLayout::new(2, 4).unwrap();
        let pair = transform_first_order(&spec, &StateVector::fock(l, &[2, 1]).unwrap()).unwrap();
        assert!(pair.psi1.is_empty());
    }

    #[test]
    fn headroom_is_enforced() {
        let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1).unwrap();
        let l = ModeLayout::new(1, 4).unwrap();
        let err = transform_first_order(&spec, &StateVector::fock(l, &[3]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Headroom { needed: 5, cutoff: 4 }));
    }

    #[test]
    fn dense_generator_is_anti_hermitian() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        let k = build_generator(&spec).unwrap();
        let l = ModeLayout::new(2, 5).unwrap();
        assert!(k.dense_anti_hermiticity_residual(&l).unwrap() < 1e-14);
    }

    #[test]
    fn hermitian_blocks_are_flagged() {
        let one = DMatrix::from_element(1, 1, c(1.0));
        let k = GeneratorK::from_blocks(one.clone(), DMatrix::zeros(1, 1), DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(k.anti_hermiticity_residual(), 2.0);
    }

    #[test]
    fn validity_examples() {
        let (r, ok) = validity_check(1e-3, 6.0);
        assert!((r - 1.5e-6).abs() < 1e-18 && ok);
        let (r, ok) = validity_check(0.5, 100.0);
        assert!((r - 6.25).abs() < 1e-12 && !ok);
        assert_eq!(validity_check(0.0, 42.0), (0.0, true));
    }
}
