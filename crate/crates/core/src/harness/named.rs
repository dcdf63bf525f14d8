//! The probe states discussed for two-mode models, evaluated side by side.

use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, ModeSubset, OccupationVector, StateVector};
use crate::perturb::transform_first_order;
use crate::qfi::{qfi_pure, tracing_loss_of_pair};
use crate::C64;

/// Cutoff used for occupation `n`: the largest named occupation is `n + 2`.
pub fn named_cutoff(n: u32) -> u32 {
    n + 4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NamedState {
    /// `|n,n⟩`.
    Product,
    /// `(|n,n⟩ + |n,n−2⟩ + |n,n+2⟩)/√3`.
    Superposition,
    /// `(|n+1,n−1⟩ + |n−1,n+1⟩)/√2`.
    Entangled,
    /// `(|n,n⟩ + i|n+1,n+1⟩)/√2`; with a real relative phase the overlap vanishes for
    /// models with real `β⁽¹⁾`.
    Penalty,
}

impl NamedState {
    pub const ALL: [NamedState; 4] = [Self::Product, Self::Superposition, Self::Entangled, Self::Penalty];

    pub fn name(self) -> &'static str {
        match self {
            Self::Product => "product",
            Self::Superposition => "superposition",
            Self::Entangled => "entangled",
            Self::Penalty => "penalty",
        }
    }

    /// `(occupation of k, occupation of k', phase)` for each term before normalization.
    pub fn components(self, n: u32) -> Vec<(u32, u32, C64)> {
        let one = C64::new(1.0, 0.0);
        match self {
            Self::Product => vec![(n, n, one)],
            Self::Superposition => vec![(n, n, one), (n, n - 2, one), (n, n + 2, one)],
            Self::Entangled => vec![(n + 1, n - 1, one), (n - 1, n + 1, one)],
            Self::Penalty => vec![(n, n, one), (n + 1, n + 1, C64::new(0.0, 1.0))],
        }
    }

    /// The normalized state on `layout` with the pair placed on modes `k` and `k'`.
    pub fn build(self, layout: ModeLayout, n: u32, k: usize, kprime: usize) -> Result<StateVector> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("named states need n >= 2, got {n}")));
        }
        layout.check_mode(k)?;
        layout.check_mode(kprime)?;
        if k == kprime {
            return Err(Error::InvalidArgument("named states need two distinct modes".into()));
        }
        let parts = self.components(n);
        let scale = 1.0 / (parts.len() as f64).sqrt();
        let terms = parts.into_iter().map(|(a, b, phase)| {
            let mut counts = vec![0; layout.modes()];
            counts[k] = a;
            counts[kprime] = b;
            (OccupationVector::new(counts), phase * scale)
        });
        StateVector::from_terms(layout, terms)?.normalized()
    }
}

#[derive(Clone, Debug)]
pub struct NamedReport {
    pub state: NamedState,
    pub n: u32,
    pub qfi: f64,
    /// `|⟨ψ̃⁽⁰⁾|ψ̃⁽¹⁾⟩|²`.
    pub penalty: f64,
    /// Absent without `keep`, or when the complement of `keep` is not a single Fock vector.
    pub tracing_loss: Option<f64>,
    pub avg_n: f64,
    pub cutoff: u32,
}

/// Evaluates every [`NamedState`] at occupation `n` on modes `k`, `k'`.
pub fn eval_named_states(
    spec: &BogoliubovFirstOrder,
    n: u32,
    k: usize,
    kprime: usize,
    keep: Option<&ModeSubset>,
) -> Result<Vec<NamedReport>> {
    let cutoff = named_cutoff(n);
    let layout = ModeLayout::new(spec.modes(), cutoff)?;
    NamedState::ALL
        .iter()
        .map(|&state| {
            let input = state.build(layout, n, k, kprime)?;
            let pair = transform_first_order(spec, &input)?;
            let tracing_loss = match keep {
                Some(keep) => match tracing_loss_of_pair(&pair, keep) {
                    Ok(loss) => Some(loss),
                    Err(Error::SupportOutsideKeep) => None,
                    Err(e) => return Err(e),
                },
                None => None,
            };
            Ok(NamedReport {
                state,
                n,
                qfi: qfi_pure(&pair),
                penalty: pair.overlap().norm_sqr(),
                tracing_loss,
                avg_n: input.average_particle_number()?,
                cutoff,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(reports: &[NamedReport], s: NamedState) -> &NamedReport {
        reports.iter().find(|r| r.state == s).unwrap()
    }

    #[test]
    fn product_matches_closed_form() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        for n in 2..=5u32 {
            let reports = eval_named_states(&spec, n, 0, 1, None).unwrap();
            let want = 8.0 * (n * (n + 1)) as f64 + 4.0;
            assert!((report(&reports, NamedState::Product).qfi - want).abs() < 1e-9);
        }
    }

    #[test]
    fn penalty_state_has_nonzero_overlap() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        let reports = eval_named_states(&spec, 3, 0, 1, None).unwrap();
        let p = report(&reports, NamedState::Penalty).penalty;
        assert!(p > 1e-3, "{p}");
        assert!(report(&reports, NamedState::Product).penalty < 1e-20);
    }

    #[test]
    fn rejects_small_n() {
        let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2).unwrap();
        assert!(matches!(eval_named_states(&spec, 1, 0, 1, None), Err(Error::InvalidArgument(_))));
    }
}
