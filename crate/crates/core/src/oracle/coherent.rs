use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::unitary::check_boundary;
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, OccupationVector, StateVector};
use crate::C64;

/// `exp(α a†_mode − α* a_mode)|0⟩` on the truncated layout, other modes empty.
///
/// The displacement is exponentiated through the eigendecomposition of the Hermitian
/// operator `i(α a† − α* a)` restricted to the single mode.
pub fn coherent_state(layout: ModeLayout, mode: usize, alpha: C64) -> Result<StateVector> {
    layout.check_mode(mode)?;
    let d = layout.local_dim();
    let i = C64::new(0.0, 1.0);
    let mut b = DMatrix::<C64>::zeros(d, d);
    for n in 0..d - 1 {
        let s = ((n + 1) as f64).sqrt();
        b[(n + 1, n)] = i * alpha * s;
        b[(n, n + 1)] = -i * alpha.conj() * s;
    }
    let eig = SymmetricEigen::try_new(b, f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidArgument("displacement eigendecomposition did not converge".into()))?;
    let v = &eig.eigenvectors;
    let mut c: DVector<C64> = v.row(0).adjoint();
    for (j, cj) in c.iter_mut().enumerate() {
        *cj *= C64::new(0.0, -eig.eigenvalues[j]).exp();
    }
    let local = v * c;
    let single = ModeLayout::new(1, layout.cutoff())?;
    check_boundary(&single, &local)?;
    let terms = local.iter().enumerate().map(|(n, &amp)| {
        let mut counts = vec![0u32; layout.modes()];
        counts[mode] = n as u32;
        (OccupationVector::new(counts), amp)
    });
    StateVector::from_terms(layout, terms)?.normalized()
}
