//! Perturbative quantum Fisher information: pure states, tracing loss, reduced states and
//! the closed forms for Fock inputs.

use std::collections::BTreeMap;

use log::warn;

use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeSubset, OccupationVector, StateVector};
use crate::perturb::{transform_first_order, validity_check, FirstOrderPair};
use crate::C64;

/// Parameter value used for the validity ratio when none is given.
pub const DEFAULT_THETA: f64 = 1e-3;

/// Imaginary parts up to this size are treated as roundoff.
pub const REALITY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QfiTerm {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QfiReport {
    pub qfi: f64,
    pub breakdown: Vec<QfiTerm>,
    pub tracing_loss: Option<f64>,
    pub theta: f64,
    pub validity_ratio: f64,
    pub valid: bool,
}

impl QfiReport {
    fn from_terms(breakdown: Vec<QfiTerm>, tracing_loss: Option<f64>) -> Self {
        let qfi = breakdown.iter().fold(0.0, |acc, t| acc + t.value);
        let mut report = Self {
            qfi,
            breakdown,
            tracing_loss,
            theta: DEFAULT_THETA,
            validity_ratio: 0.0,
            valid: true,
        };
        report.set_theta(DEFAULT_THETA);
        report
    }

    /// Recomputes the validity ratio for another parameter value.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.set_theta(theta);
        self
    }

    fn set_theta(&mut self, theta: f64) {
        let (ratio, ok) = validity_check(theta, self.qfi);
        self.theta = theta;
        self.validity_ratio = ratio;
        self.valid = ok;
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.breakdown.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Lower bound `1/√(ν I)` on the standard deviation after `repetitions` runs.
    pub fn cramer_rao(&self, repetitions: u64) -> f64 {
        1.0 / (repetitions as f64 * self.qfi).sqrt()
    }
}

/// Breakdown label of the vacuum contribution `I(|0⟩)`.
pub const VACUUM_TERM: &str = "vacuum";

/// `4(⟨ψ̃⁽¹⁾|ψ̃⁽¹⁾⟩ − |⟨ψ̃⁽⁰⁾|ψ̃⁽¹⁾⟩|²)`.
pub fn qfi_pure(pair: &FirstOrderPair) -> f64 {
    let overlap = pair.overlap();
    (4.0 * (pair.psi1.norm_sqr() - overlap.norm_sqr())).max(0.0)
}

/// [`qfi_pure`] as a report with a single `pure` term.
pub fn pure_report(pair: &FirstOrderPair) -> QfiReport {
    QfiReport::from_terms(vec![QfiTerm { name: "pure", value: qfi_pure(pair) }], None)
}

/// First-order reduced-state correction `Tr_¬k(|ψ̃⁽¹⁾⟩⟨ψ̃⁽⁰⁾| + |ψ̃⁽⁰⁾⟩⟨ψ̃⁽¹⁾|)`.
pub fn first_order_density(pair: &FirstOrderPair, keep: &ModeSubset) -> Result<DensityOperator> {
    let sum = pair.psi0.add_scaled(&pair.psi1, C64::new(1.0, 0.0))?;
    let both = sum.partial_trace(keep)?;
    let zeroth = pair.psi0.partial_trace(keep)?;
    let first = pair.psi1.partial_trace(keep)?;
    DensityOperator::combine(&[(1.0, &both), (-1.0, &zeroth), (-1.0, &first)])
}

/// `Δ_tr = 4 Σ_{i≠0} |⟨ψ̃⁽⁰⁾|_k ⟨i|_¬k ψ̃⁽¹⁾⟩|²`.
///
/// The input must factor as `|ψ⟩_k|r⟩_¬k` with `|r⟩` a single Fock vector; the sum then runs
/// over `i ≠ r`. For `r = 0` this is the vacuum-complement case.
pub fn tracing_loss(spec: &BogoliubovFirstOrder, input: &StateVector, keep: &ModeSubset) -> Result<f64> {
    complement_reference(input, keep)?;
    let pair = transform_first_order(spec, input)?;
    tracing_loss_of_pair(&pair, keep)
}

/// Tracing loss from an already transformed pair.
pub fn tracing_loss_of_pair(pair: &FirstOrderPair, keep: &ModeSubset) -> Result<f64> {
    let reference = complement_reference(&pair.psi0, keep)?;
    if keep.is_all() {
        return Ok(0.0);
    }
    let comp = keep.complement();
    let mut proj: BTreeMap<OccupationVector, C64> = BTreeMap::new();
    for (occ, c) in pair.psi1.terms() {
        let outside = occ.select(&comp);
        if outside == reference {
            continue;
        }
        let mut full = occ.clone();
        for (&m, &r) in comp.iter().zip(reference.counts()) {
            full.counts_mut()[m] = r;
        }
        let bra = pair.psi0.amplitude(&full);
        if bra != C64::default() {
            *proj.entry(outside).or_default() += bra.conj() * c;
        }
    }
    Ok(4.0 * proj.values().fold(0.0, |acc, c| acc + c.norm_sqr()))
}

/// `I(ρ̃_k) = I(|ψ̃⟩) − Δ_tr` with both parts in the breakdown.
pub fn qfi_reduced(spec: &BogoliubovFirstOrder, input: &StateVector, keep: &ModeSubset) -> Result<QfiReport> {
    complement_reference(input, keep)?;
    let pair = transform_first_order(spec, input)?;
    reduced_report(&pair, keep)
}

/// [`qfi_reduced`] from an already transformed pair.
pub fn reduced_report(pair: &FirstOrderPair, keep: &ModeSubset) -> Result<QfiReport> {
    let pure = qfi_pure(pair);
    let loss = tracing_loss_of_pair(pair, keep)?;
    let reduced = pure - loss;
    if reduced < -1e-10 * pure.max(1.0) {
        return Err(Error::NegativeFisher { value: reduced });
    }
    Ok(QfiReport::from_terms(
        vec![QfiTerm { name: "pure", value: pure }, QfiTerm { name: "tracing_loss", value: -loss }],
        Some(loss),
    ))
}

/// `2 Σ_{p,q∉k} |β⁽¹⁾_pq|²`, the tracing loss of the vacuum and a lower bound for all inputs.
pub fn vacuum_loss_bound(spec: &BogoliubovFirstOrder, keep: &ModeSubset) -> f64 {
    let comp = keep.complement();
    let beta = spec.beta1();
    let mut sum = 0.0;
    for &p in &comp {
        for &q in &comp {
            sum += beta[(p, q)].norm_sqr();
        }
    }
    2.0 * sum
}

/// Closed form for `|n_k⟩` with all other modes empty.
pub fn qfi_fock_closed(spec: &BogoliubovFirstOrder, n: u32, k: usize) -> Result<QfiReport> {
    if k >= spec.modes() {
        return Err(Error::InvalidMode { mode: k, modes: spec.modes() });
    }
    let nf = n as f64;
    let beta = spec.beta1();
    Ok(QfiReport::from_terms(
        vec![
            QfiTerm { name: "diagonal_squeezing", value: 2.0 * nf * (nf + 1.0) * beta[(k, k)].norm_sqr() },
            QfiTerm { name: "single_mode_exchange", value: 4.0 * nf * off_column_weight(spec, k) },
            QfiTerm { name: VACUUM_TERM, value: spec.vacuum_qfi() },
        ],
        None,
    ))
}

/// Closed form for `|n_k⟩|m_k'⟩` with all other modes empty.
pub fn qfi_two_mode_closed(
    spec: &BogoliubovFirstOrder,
    n: u32,
    k: usize,
    m: u32,
    kprime: usize,
) -> Result<QfiReport> {
    for mode in [k, kprime] {
        if mode >= spec.modes() {
            return Err(Error::InvalidMode { mode, modes: spec.modes() });
        }
    }
    if k == kprime {
        return Err(Error::InvalidArgument("two-mode closed form needs k != k'".into()));
    }
    let (nf, mf) = (n as f64, m as f64);
    let (alpha, beta) = (spec.alpha1(), spec.beta1());
    let cross = alpha[(k, kprime)].norm_sqr() + beta[(k, kprime)].norm_sqr();
    Ok(QfiReport::from_terms(
        vec![
            QfiTerm { name: "diagonal_squeezing_k", value: 2.0 * nf * (nf + 1.0) * beta[(k, k)].norm_sqr() },
            QfiTerm {
                name: "diagonal_squeezing_kprime",
                value: 2.0 * mf * (mf + 1.0) * beta[(kprime, kprime)].norm_sqr(),
            },
            QfiTerm { name: "cross_8mn", value: 8.0 * mf * nf * cross },
            QfiTerm { name: "single_mode_exchange_k", value: 4.0 * nf * off_column_weight(spec, k) },
            QfiTerm { name: "single_mode_exchange_kprime", value: 4.0 * mf * off_column_weight(spec, kprime) },
            QfiTerm { name: VACUUM_TERM, value: spec.vacuum_qfi() },
        ],
        None,
    ))
}

/// `Σ_{p≠k} (|α⁽¹⁾_pk|² + |β⁽¹⁾_pk|²)`.
fn off_column_weight(spec: &BogoliubovFirstOrder, k: usize) -> f64 {
    let (alpha, beta) = (spec.alpha1(), spec.beta1());
    (0..spec.modes())
        .filter(|&p| p != k)
        .fold(0.0, |acc, p| acc + alpha[(p, k)].norm_sqr() + beta[(p, k)].norm_sqr())
}

/// `−4⟨ψ̃⁽⁰⁾|ρ̃⁽²⁾|ψ̃⁽⁰⁾⟩` for the second-order correction of a reduced state.
pub fn qfi_mixed_matrix_element(rho2: &DensityOperator, psi0_k: &StateVector) -> Result<f64> {
    let scale = rho2.matrix().iter().map(|c| c.norm()).fold(1.0, f64::max);
    let residual = rho2.hermiticity_residual();
    if residual > REALITY_TOLERANCE * scale {
        return Err(Error::NonHermitian { residual });
    }
    let value = -4.0 * rho2.expectation(psi0_k)?;
    enforce_real(value)
}

/// Drops a roundoff imaginary part, rejecting anything larger than [`REALITY_TOLERANCE`].
pub fn enforce_real(value: C64) -> Result<f64> {
    let imag = value.im.abs();
    if imag > REALITY_TOLERANCE {
        return Err(Error::ComplexValue { imag: value.im });
    }
    if imag > 0.0 {
        warn!("dropping imaginary part {:e}", value.im);
    }
    Ok(value.re)
}

/// The common Fock vector of the traced-out modes, or an error if the input does not
/// factor that way.
fn complement_reference(input: &StateVector, keep: &ModeSubset) -> Result<OccupationVector> {
    if keep.mode_count() != input.layout().modes() {
        return Err(Error::LayoutMismatch("mode subset built for another layout".into()));
    }
    let comp = keep.complement();
    let mut terms = input.terms().map(|(occ, _)| occ.select(&comp));
    let reference = terms.next().unwrap_or_else(|| OccupationVector::new(vec![0; comp.len()]));
    if terms.any(|o| o != reference) {
        return Err(Error::SupportOutsideKeep);
    }
    Ok(reference)
}
