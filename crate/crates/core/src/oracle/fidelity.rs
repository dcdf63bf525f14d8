use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::generator::{GeneratorSpec, HamiltonianEigen};
use super::unitary::check_boundary;
use crate::error::{Error, Result};
use crate::fock::{DensityOperator, ModeLayout, ModeSubset, StateVector};
use crate::C64;

/// Default step for pure-state fidelities and first derivatives.
pub const PURE_STEP: f64 = 1e-4;

/// Default step for reduced-state fidelities and second derivatives.
pub const MIXED_STEP: f64 = 1e-3;

/// Eigenvalues of density operators below this are treated as zero; anything more negative
/// is an error.
pub const POSITIVITY_CLAMP: f64 = 1e-12;

/// A Richardson-extrapolated value with the size of the last correction as its error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    fn richardson(coarse: f64, fine: f64) -> Self {
        let value = (4.0 * fine - coarse) / 3.0;
        Self { value, error: (value - fine).abs() }
    }
}

/// Central-difference corrections of `|ψ(θ)⟩` and of the reduced state `ρ_k(θ)` at `θ = 0`,
/// with `ρ_k(θ) = ρ⁽⁰⁾ + θρ⁽¹⁾ + θ²ρ⁽²⁾ + …`.
#[derive(Clone, Debug)]
pub struct DerivativeStates {
    pub psi1: StateVector,
    pub rho1: DensityOperator,
    pub rho2: DensityOperator,
}

/// Brute-force ground truth for one generator on one truncated layout.
///
/// Holds the eigendecomposition of the truncated Hamiltonian so that repeated evaluations
/// only cost matrix-vector products.
#[derive(Clone, Debug)]
pub struct Oracle {
    eigen: HamiltonianEigen,
}

impl Oracle {
    pub fn new(gen: &GeneratorSpec, layout: ModeLayout) -> Result<Self> {
        if gen.modes() != layout.modes() {
            return Err(Error::LayoutMismatch("generator and layout mode counts differ".into()));
        }
        Ok(Self { eigen: HamiltonianEigen::new(gen, layout)? })
    }

    pub fn layout(&self) -> &ModeLayout {
        self.eigen.layout()
    }

    pub fn generator(&self) -> &GeneratorSpec {
        self.eigen.generator()
    }

    fn prepare(&self, input: &StateVector) -> Result<DVector<C64>> {
        if input.layout() != self.layout() {
            return Err(Error::LayoutMismatch("state and oracle layouts differ".into()));
        }
        input.require_normalized()?;
        let dense = self.generator().free_evolution(input).to_dense()?;
        check_boundary(self.layout(), &dense)?;
        Ok(dense)
    }

    fn evolve_checked(&self, psi0: &DVector<C64>, theta: f64) -> Result<DVector<C64>> {
        let out = self.eigen.evolve_dense(psi0, theta);
        check_boundary(self.layout(), &out)?;
        Ok(out)
    }

    /// `U(θ)|ψ⟩`.
    pub fn evolve(&self, input: &StateVector, theta: f64) -> Result<StateVector> {
        let psi0 = self.prepare(input)?;
        StateVector::from_dense(*self.layout(), &self.evolve_checked(&psi0, theta)?)
    }

    /// `8(1 − |⟨ψ(0)|ψ(dθ)⟩|)/dθ²`, Richardson-combined over `dθ` and `dθ/2`.
    ///
    /// The overlap defect is evaluated in the eigenbasis as
    /// `1 − |z|² = Σ_ij w_i w_j 2 sin²(dθ(λ_i − λ_j)/2)`, which avoids cancellation.
    pub fn qfi_pure(&self, input: &StateVector, dtheta: f64) -> Result<Estimate> {
        let psi0 = self.prepare(input)?;
        self.evolve_checked(&psi0, dtheta)?;
        self.evolve_checked(&psi0, -dtheta)?;
        let coords = self.eigen.to_eigenbasis(&psi0);
        let total: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        let support: Vec<(f64, f64)> = coords
            .iter()
            .zip(self.eigen.eigenvalues().iter())
            .map(|(c, &l)| (c.norm_sqr() / total, l))
            .filter(|(w, _)| *w > 0.0)
            .collect();
        let at = |h: f64| {
            let mut defect = 0.0;
            for &(wi, li) in &support {
                for &(wj, lj) in &support {
                    let s = (0.5 * h * (li - lj)).sin();
                    defect += wi * wj * 2.0 * s * s;
                }
            }
            let z = (1.0 - defect).max(0.0).sqrt();
            8.0 * (defect / (1.0 + z)) / (h * h)
        };
        Ok(Estimate::richardson(at(dtheta), at(dtheta / 2.0)))
    }

    /// Uhlmann-fidelity QFI of the reduced state on `keep`, Richardson-combined over
    /// `dθ` and `dθ/2`.
    ///
    /// When `ρ_k(0)` is pure the fidelity is `⟨φ|ρ_k(dθ)|φ⟩` and its defect is taken as the
    /// weight of `ρ_k(dθ)` orthogonal to `|φ⟩`, which keeps full relative precision.
    pub fn qfi_mixed(&self, input: &StateVector, keep: &ModeSubset, dtheta: f64) -> Result<Estimate> {
        let psi0 = self.prepare(input)?;
        let rho0 = self.reduced(&psi0, keep)?;
        let eig = hermitian_eigen(rho0.matrix())?;
        let (top, top_value) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (j, &l)| if l > best.1 { (j, l) } else { best });
        let pure = top_value > 1.0 - POSITIVITY_CLAMP;
        let phi = eig.eigenvectors.column(top).into_owned();
        let sqrt0 = if pure { None } else { Some(sqrt_from_eigen(&eig)?) };
        let at = |h: f64| -> Result<f64> {
            let amps = self.amplitude_matrix(&self.evolve_checked(&psi0, h)?, keep)?;
            let defect = match &sqrt0 {
                None => {
                    let projected = &amps - &phi * phi.ad_mul(&amps);
                    let weight = projected.norm_squared() / amps.norm_squared();
                    weight / (1.0 + (1.0 - weight).max(0.0).sqrt())
                }
                Some(root) => {
                    let inner = root * (&amps * amps.adjoint()) * root;
                    1.0 - trace_sqrt(&inner)?
                }
            };
            Ok(8.0 * defect / (h * h))
        };
        Ok(Estimate::richardson(at(dtheta)?, at(dtheta / 2.0)?))
    }

    /// Central differences with step `dθ`. [`PURE_STEP`] suits `ψ̃⁽¹⁾` and `ρ̃⁽¹⁾`;
    /// the second difference for `ρ̃⁽²⁾` needs the larger [`MIXED_STEP`] to stay clear of
    /// roundoff.
    pub fn derivative_states(&self, input: &StateVector, keep: &ModeSubset, dtheta: f64) -> Result<DerivativeStates> {
        let psi0 = self.prepare(input)?;
        let (psi1, rho1, rho2) = self.differences(&psi0, keep, dtheta)?;
        self.package(psi1, rho1, rho2, keep)
    }

    /// [`Oracle::derivative_states`] Richardson-combined over `dθ` and `dθ/2`.
    pub fn derivative_states_richardson(
        &self,
        input: &StateVector,
        keep: &ModeSubset,
        dtheta: f64,
    ) -> Result<DerivativeStates> {
        let psi0 = self.prepare(input)?;
        let (p_h, r1_h, r2_h) = self.differences(&psi0, keep, dtheta)?;
        let (p_h2, r1_h2, r2_h2) = self.differences(&psi0, keep, dtheta / 2.0)?;
        let four = C64::new(4.0 / 3.0, 0.0);
        let third = C64::new(1.0 / 3.0, 0.0);
        self.package(
            p_h2 * four - p_h * third,
            r1_h2 * four - r1_h * third,
            r2_h2 * four - r2_h * third,
            keep,
        )
    }

    #[allow(clippy::type_complexity)]
    fn differences(
        &self,
        psi0: &DVector<C64>,
        keep: &ModeSubset,
        h: f64,
    ) -> Result<(DVector<C64>, DMatrix<C64>, DMatrix<C64>)> {
        let plus = self.evolve_checked(psi0, h)?;
        let minus = self.evolve_checked(psi0, -h)?;
        let psi1 = (&plus - &minus) * C64::new(1.0 / (2.0 * h), 0.0);
        let r0 = self.reduced(psi0, keep)?.into_matrix();
        let rp = self.reduced(&plus, keep)?.into_matrix();
        let rm = self.reduced(&minus, keep)?.into_matrix();
        let rho1 = (&rp - &rm) * C64::new(1.0 / (2.0 * h), 0.0);
        let rho2 = (rp - r0 * C64::new(2.0, 0.0) + rm) * C64::new(1.0 / (2.0 * h * h), 0.0);
        Ok((psi1, rho1, rho2))
    }

    fn package(
        &self,
        psi1: DVector<C64>,
        rho1: DMatrix<C64>,
        rho2: DMatrix<C64>,
        keep: &ModeSubset,
    ) -> Result<DerivativeStates> {
        let reduced = keep.layout(self.layout().cutoff());
        Ok(DerivativeStates {
            psi1: StateVector::from_dense(*self.layout(), &psi1)?,
            rho1: DensityOperator::from_matrix(reduced, keep.indices().to_vec(), rho1)?,
            rho2: DensityOperator::from_matrix(reduced, keep.indices().to_vec(), rho2)?,
        })
    }

    fn reduced(&self, dense: &DVector<C64>, keep: &ModeSubset) -> Result<DensityOperator> {
        let reduced = keep.layout(self.layout().cutoff());
        let m = self.amplitude_matrix(dense, keep)?;
        DensityOperator::from_matrix(reduced, keep.indices().to_vec(), &m * m.adjoint())
    }

    /// Amplitudes rearranged as a (kept × traced) matrix `M`, so that `ρ_k = M M†`.
    fn amplitude_matrix(&self, dense: &DVector<C64>, keep: &ModeSubset) -> Result<DMatrix<C64>> {
        let layout = self.layout();
        let reduced = keep.layout(layout.cutoff());
        let dim = reduced.dense_dim()?;
        let comp = keep.complement();
        let outer_dim = layout.local_dim().pow(comp.len() as u32);
        let outer = (!comp.is_empty()).then(|| ModeLayout::new(comp.len(), layout.cutoff())).transpose()?;
        let mut m = DMatrix::<C64>::zeros(dim, outer_dim);
        for (i, occ) in layout.basis().enumerate() {
            let c = dense[i];
            if c == C64::default() {
                continue;
            }
            let row = reduced.index_of(&occ.select(keep.indices()));
            let col = outer.as_ref().map_or(0, |l| l.index_of(&occ.select(&comp)));
            m[(row, col)] = c;
        }
        Ok(m)
    }
}

fn hermitian_eigen(mat: &DMatrix<C64>) -> Result<SymmetricEigen<C64, nalgebra::Dyn>> {
    let sym = (mat + mat.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| Error::InvalidArgument("density eigendecomposition did not converge".into()))
}

fn clamp(eigenvalue: f64) -> Result<f64> {
    if eigenvalue < -POSITIVITY_CLAMP {
        return Err(Error::NotPositive { eigenvalue });
    }
    Ok(eigenvalue.max(0.0))
}

fn sqrt_from_eigen(eig: &SymmetricEigen<C64, nalgebra::Dyn>) -> Result<DMatrix<C64>> {
    let mut scaled = eig.eigenvectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= C64::new(clamp(eig.eigenvalues[j])?.sqrt(), 0.0);
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

fn trace_sqrt(mat: &DMatrix<C64>) -> Result<f64> {
    let eig = hermitian_eigen(mat)?;
    eig.eigenvalues.iter().map(|&l| clamp(l).map(f64::sqrt)).sum()
}

/// Pure-state fidelity QFI at `θ = 0` with error estimate.
pub fn qfi_fidelity_pure(gen: &GeneratorSpec, input: &StateVector, dtheta: f64) -> Result<Estimate> {
    Oracle::new(gen, *input.layout())?.qfi_pure(input, dtheta)
}

/// Reduced-state Uhlmann-fidelity QFI at `θ = 0` with error estimate.
pub fn qfi_fidelity_mixed(
    gen: &GeneratorSpec,
    input: &StateVector,
    keep: &ModeSubset,
    dtheta: f64,
) -> Result<Estimate> {
    Oracle::new(gen, *input.layout())?.qfi_mixed(input, keep, dtheta)
}

/// Central-difference `ψ̃⁽¹⁾`, `ρ̃⁽¹⁾`, `ρ̃⁽²⁾` at `θ = 0`.
pub fn derivative_states(
    gen: &GeneratorSpec,
    input: &StateVector,
    keep: &ModeSubset,
    dtheta: f64,
) -> Result<DerivativeStates> {
    Oracle::new(gen, *input.layout())?.derivative_states(input, keep, dtheta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_generator_gives_zero() {
        let l = ModeLayout::new(2, 3).unwrap();
        let input = StateVector::fock(l, &[1, 0]).unwrap();
        let gen = GeneratorSpec::zero(2);
        assert_eq!(qfi_fidelity_pure(&gen, &input, PURE_STEP).unwrap().value, 0.0);
        let d = derivative_states(&gen, &input, &ModeSubset::new(&[0], 2).unwrap(), PURE_STEP).unwrap();
        assert!(d.psi1.is_empty());
        assert_eq!(d.rho1.matrix().norm(), 0.0);
        assert_eq!(d.rho2.matrix().norm(), 0.0);
    }

    #[test]
    fn squeezed_vacuum() {
        let gen = GeneratorSpec::single_mode_squeezer(0, 1).unwrap();
        let l = ModeLayout::new(1, 12).unwrap();
        let est = qfi_fidelity_pure(&gen, &StateVector::vacuum(l), PURE_STEP).unwrap();
        assert!((est.value - 2.0).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn two_mode_squeezer_one_one() {
        let gen = GeneratorSpec::two_mode_squeezer(0, 1, 2).unwrap();
        let l = ModeLayout::new(2, 7).unwrap();
        let est = qfi_fidelity_pure(&gen, &StateVector::fock(l, &[1, 1]).unwrap(), PURE_STEP).unwrap();
        assert!((est.value - 20.0).abs() < 1e-5, "{est:?}");
    }

    #[test]
    fn mixed_with_everything_kept_matches_pure() {
        let gen = GeneratorSpec::beam_splitter(0, 1, 2).unwrap();
        let l = ModeLayout::new(2, 6).unwrap();
        let input = StateVector::fock(l, &[1, 2]).unwrap();
        let pure = qfi_fidelity_pure(&gen, &input, PURE_STEP).unwrap();
        let mixed = qfi_fidelity_mixed(&gen, &input, &ModeSubset::all(2), MIXED_STEP).unwrap();
        assert!((pure.value - mixed.value).abs() < 1e-8, "{pure:?} {mixed:?}");
    }

    #[test]
    fn squeezed_vacuum_derivative() {
        let gen = GeneratorSpec::single_mode_squeezer(0, 1).unwrap();
        let l = ModeLayout::new(1, 10).unwrap();
        let all = ModeSubset::all(1);
        let d = derivative_states(&gen, &StateVector::vacuum(l), &all, PURE_STEP).unwrap();
        let two = crate::fock::OccupationVector::new(vec![2]);
        assert!((d.psi1.amplitude(&two) - C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-7);
        assert!(d.rho1.trace().norm() < 1e-8);
        let d = derivative_states(&gen, &StateVector::vacuum(l), &all, MIXED_STEP).unwrap();
        assert!(d.rho2.trace().norm() < 1e-8);
    }
}
