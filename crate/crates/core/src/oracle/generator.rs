use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::{Error, Result};
use crate::fock::{ModeLayout, StateVector};
use crate::C64;

const SHAPE_TOLERANCE: f64 = 1e-12;

/// Quadratic Hamiltonian `Ĥ = Σ h_mn a†_m a_n + ½ Σ (g_pq a†_p a†_q + g*_pq a_p a_q)` together
/// with the free-evolution phases `G_n`.
///
/// The full evolution is `U(θ) = exp(−iθĤ) U⁽⁰⁾` with `U⁽⁰⁾|occ⟩ = Π_n (G*_n)^{occ_n} |occ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    h: DMatrix<C64>,
    g: DMatrix<C64>,
    phases: Vec<C64>,
}

impl GeneratorSpec {
    pub fn new(h: DMatrix<C64>, g: DMatrix<C64>, phases: Vec<C64>) -> Result<Self> {
        let m = phases.len();
        if m == 0 || h.shape() != (m, m) || g.shape() != (m, m) {
            return Err(Error::InvalidArgument("generator blocks must be square with one row per mode".into()));
        }
        let herm = (&h - h.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > SHAPE_TOLERANCE {
            return Err(Error::NonHermitian { residual: herm });
        }
        let sym = (&g - g.transpose()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if sym > SHAPE_TOLERANCE {
            return Err(Error::InvalidArgument(format!("pair block is not symmetric (residual {sym:e})")));
        }
        if let Some(p) = phases.iter().find(|p| (p.norm() - 1.0).abs() > SHAPE_TOLERANCE) {
            return Err(Error::InvalidArgument(format!("phase {p} is not unit modulus")));
        }
        Ok(Self { h, g, phases })
    }

    pub fn zero(modes: usize) -> Self {
        Self {
            h: DMatrix::zeros(modes, modes),
            g: DMatrix::zeros(modes, modes),
            phases: vec![C64::new(1.0, 0.0); modes],
        }
    }

    /// `i(a_k² − a†_k²)/2`.
    pub fn single_mode_squeezer(k: usize, modes: usize) -> Result<Self> {
        check_mode(k, modes)?;
        let mut gen = Self::zero(modes);
        gen.g[(k, k)] = C64::new(0.0, -1.0);
        Ok(gen)
    }

    /// `i(a_k a_k' − a†_k a†_k')`.
    pub fn two_mode_squeezer(k: usize, kprime: usize, modes: usize) -> Result<Self> {
        check_pair(k, kprime, modes)?;
        let mut gen = Self::zero(modes);
        gen.g[(k, kprime)] = C64::new(0.0, -1.0);
        gen.g[(kprime, k)] = C64::new(0.0, -1.0);
        Ok(gen)
    }

    /// `i(a†_k a_k' − a_k a†_k')`.
    pub fn beam_splitter(k: usize, kprime: usize, modes: usize) -> Result<Self> {
        check_pair(k, kprime, modes)?;
        let mut gen = Self::zero(modes);
        gen.h[(k, kprime)] = C64::new(0.0, 1.0);
        gen.h[(kprime, k)] = C64::new(0.0, -1.0);
        Ok(gen)
    }

    /// The Hamiltonian whose first-order coefficients are those of `spec`:
    /// `h_mn = i α⁽¹⁾*_mn G_n`, `g_mn = −i β⁽¹⁾*_mn G*_n`.
    pub fn from_first_order(spec: &BogoliubovFirstOrder) -> Result<Self> {
        let m = spec.modes();
        let (alpha, beta, phases) = (spec.alpha1(), spec.beta1(), spec.g());
        let i = C64::new(0.0, 1.0);
        let h = DMatrix::from_fn(m, m, |r, c| i * alpha[(r, c)].conj() * phases[c]);
        let g = DMatrix::from_fn(m, m, |r, c| -i * beta[(r, c)].conj() * phases[c].conj());
        Self::new(h, g, phases.to_vec())
    }

    pub fn modes(&self) -> usize {
        self.phases.len()
    }

    pub fn h(&self) -> &DMatrix<C64> {
        &self.h
    }

    pub fn g(&self) -> &DMatrix<C64> {
        &self.g
    }

    pub fn phases(&self) -> &[C64] {
        &self.phases
    }

    /// `Ĥ|ψ⟩` on the truncated space.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        let m = self.modes();
        if psi.layout().modes() != m {
            return Err(Error::LayoutMismatch("generator and state mode counts differ".into()));
        }
        let mut out = StateVector::zero(*psi.layout());
        for q in 0..m {
            let lowered = psi.annihilate(q);
            let raised = psi.create(q);
            for p in 0..m {
                let h = self.h[(p, q)];
                if h != C64::default() {
                    out = out.add_scaled(&lowered.create(p), h)?;
                }
                let g = self.g[(p, q)];
                if g != C64::default() {
                    out = out.add_scaled(&raised.create(p), 0.5 * g)?;
                    out = out.add_scaled(&lowered.annihilate(p), 0.5 * g.conj())?;
                }
            }
        }
        Ok(out)
    }

    /// Dense truncated Hamiltonian `PĤP`.
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

    /// Multiplies each basis term by `Π_n (G*_n)^{occ_n}`.
    pub fn free_evolution(&self, psi: &StateVector) -> StateVector {
        psi.map_terms(|occ| {
            occ.counts()
                .iter()
                .zip(&self.phases)
                .fold(C64::new(1.0, 0.0), |acc, (&n, g)| acc * g.conj().powu(n))
        })
    }
}

fn check_mode(k: usize, modes: usize) -> Result<()> {
    if k < modes {
        Ok(())
    } else {
        Err(Error::InvalidMode { mode: k, modes })
    }
}

fn check_pair(k: usize, kprime: usize, modes: usize) -> Result<()> {
    check_mode(k, modes)?;
    check_mode(kprime, modes)?;
    if k == kprime {
        return Err(Error::InvalidArgument("mode pair needs k != k'".into()));
    }
    Ok(())
}

/// Eigendecomposition `Ĥ = V Λ V†` of the truncated Hamiltonian.
#[derive(Clone, Debug)]
pub struct HamiltonianEigen {
    layout: ModeLayout,
    generator: GeneratorSpec,
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HamiltonianEigen {
    pub fn new(generator: &GeneratorSpec, layout: ModeLayout) -> Result<Self> {
        let dense = generator.to_dense(&layout)?;
        let eig = SymmetricEigen::try_new(dense, f64::EPSILON, 0)
            .ok_or_else(|| Error::InvalidArgument("Hamiltonian eigendecomposition did not converge".into()))?;
        Ok(Self {
            layout,
            generator: generator.clone(),
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// `exp(−iθĤ)` as a dense matrix.
    pub fn propagator(&self, theta: f64) -> DMatrix<C64> {
        let v = &self.eigenvectors;
        let phases = self.eigenvalues.map(|l| C64::new(0.0, -theta * l).exp());
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        scaled * v.adjoint()
    }

    /// Coordinates `V†|ψ⟩` in the eigenbasis.
    pub fn to_eigenbasis(&self, dense: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.ad_mul(dense)
    }

    /// `exp(−iθĤ)|ψ⟩` for a dense vector, without forming the propagator.
    pub fn evolve_dense(&self, dense: &DVector<C64>, theta: f64) -> DVector<C64> {
        let mut c = self.to_eigenbasis(dense);
        for (j, cj) in c.iter_mut().enumerate() {
            *cj *= C64::new(0.0, -theta * self.eigenvalues[j]).exp();
        }
        &self.eigenvectors * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_hamiltonians_are_valid() {
        assert!(GeneratorSpec::single_mode_squeezer(0, 1).is_ok());
        assert!(GeneratorSpec::two_mode_squeezer(0, 1, 2).is_ok());
        assert!(GeneratorSpec::beam_splitter(0, 1, 2).is_ok());
        assert!(GeneratorSpec::beam_splitter(1, 1, 2).is_err());
    }

    #[test]
    fn rejects_non_hermitian_block() {
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 1)] = C64::new(1.0, 0.0);
        let err = GeneratorSpec::new(h, DMatrix::zeros(2, 2), vec![C64::new(1.0, 0.0); 2]).unwrap_err();
        assert!(matches!(err, Error::NonHermitian { .. }));
    }

    #[test]
    fn dense_hamiltonian_is_hermitian() {
        let gen = GeneratorSpec::two_mode_squeezer(0, 1, 2).unwrap();
        let l = ModeLayout::new(2, 4).unwrap();
        let h = gen.to_dense(&l).unwrap();
        assert!((&h - h.adjoint()).norm() < 1e-14);
    }
}
