use nalgebra::{DMatrix, DVector};

use super::generator::{GeneratorSpec, HamiltonianEigen};
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, StateVector};
use crate::C64;

/// Largest weight a probed state may carry in the boundary shell.
pub const BOUNDARY_BUDGET: f64 = 1e-10;

/// Dense `U(θ) = exp(−iθĤ) U⁽⁰⁾` on a truncated layout.
#[derive(Clone, Debug)]
pub struct ExactUnitary {
    layout: ModeLayout,
    theta: f64,
    matrix: DMatrix<C64>,
    unitarity_residual: f64,
    shell_coupling: f64,
}

impl ExactUnitary {
    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Largest entry of `|U†U − 1|`.
    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    /// `|θ|` times the largest column norm of `Ĥ` on the boundary shell; zero when the
    /// generator never reaches the cutoff.
    pub fn shell_coupling(&self) -> f64 {
        self.shell_coupling
    }

    /// `U|ψ⟩`, rejecting outputs with weight in the boundary shell above [`BOUNDARY_BUDGET`].
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.layout() != &self.layout {
            return Err(Error::LayoutMismatch("state and unitary layouts differ".into()));
        }
        let out = StateVector::from_dense(self.layout, &(&self.matrix * psi.to_dense()?))?;
        check_boundary(&self.layout, &out.to_dense()?)?;
        Ok(out)
    }
}

/// Builds `U(θ)` through the Hermitian eigendecomposition of the truncated Hamiltonian.
pub fn exact_unitary(gen: &GeneratorSpec, theta: f64, layout: ModeLayout) -> Result<ExactUnitary> {
    let eig = HamiltonianEigen::new(gen, layout)?;
    let propagator = eig.propagator(theta);
    let dim = propagator.nrows();
    let phases: Vec<C64> = layout
        .basis()
        .map(|occ| {
            occ.counts()
                .iter()
                .zip(gen.phases())
                .fold(C64::new(1.0, 0.0), |acc, (&n, g)| acc * g.conj().powu(n))
        })
        .collect();
    let mut matrix = propagator;
    for (j, mut col) in matrix.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    let gram = matrix.ad_mul(&matrix) - DMatrix::<C64>::identity(dim, dim);
    let unitarity_residual = gram.iter().map(|c| c.norm()).fold(0.0, f64::max);

    let h = gen.to_dense(&layout)?;
    let shell_coupling = layout
        .basis()
        .enumerate()
        .filter(|(_, occ)| in_shell(&layout, occ.counts()))
        .map(|(j, _)| h.column(j).norm())
        .fold(0.0, f64::max)
        * theta.abs();

    Ok(ExactUnitary { layout, theta, matrix, unitarity_residual, shell_coupling })
}

fn in_shell(layout: &ModeLayout, counts: &[u32]) -> bool {
    counts.iter().any(|&n| n + 1 >= layout.cutoff())
}

/// Squared weight of a dense state on basis vectors with some occupation `≥ cutoff − 1`.
pub fn boundary_weight(layout: &ModeLayout, dense: &DVector<C64>) -> f64 {
    layout
        .basis()
        .zip(dense.iter())
        .filter(|(occ, _)| in_shell(layout, occ.counts()))
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

pub(crate) fn check_boundary(layout: &ModeLayout, dense: &DVector<C64>) -> Result<()> {
    let leakage = boundary_weight(layout, dense);
    if leakage > BOUNDARY_BUDGET {
        return Err(Error::Leakage { leakage, budget: BOUNDARY_BUDGET });
    }
    Ok(())
}
