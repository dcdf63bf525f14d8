use nalgebra::DMatrix;

use super::generator::GeneratorSpec;
use crate::bogoliubov::BogoliubovFirstOrder;
use crate::error::Result;
use crate::C64;

/// Step used for the first-order central differences.
pub const COEFFICIENT_STEP: f64 = 1e-3;

/// Bogoliubov matrices `α(θ)`, `β(θ)` of `U(θ) = exp(−iθĤ)U⁽⁰⁾`, with no Fock truncation.
///
/// The Heisenberg equations `dv/dθ = M v` for `v = (a; a†)` have
/// `M = [[−ih, −ig], [ig*, ih*]]`. With `C = exp(θM)` the transformed operators are
/// `ã = C₁₁ diag(G*) a + C₁₂ diag(G) a†`, so `α = conj(C₁₁) diag(G)` and
/// `β = −conj(C₁₂) diag(G*)`.
pub fn extract_bogoliubov(gen: &GeneratorSpec, theta: f64) -> (DMatrix<C64>, DMatrix<C64>) {
    let m = gen.modes();
    let i = C64::new(0.0, 1.0);
    let mut big = DMatrix::zeros(2 * m, 2 * m);
    for r in 0..m {
        for c in 0..m {
            big[(r, c)] = -i * gen.h()[(r, c)];
            big[(r, m + c)] = -i * gen.g()[(r, c)];
            big[(m + r, c)] = i * gen.g()[(r, c)].conj();
            big[(m + r, m + c)] = i * gen.h()[(r, c)].conj();
        }
    }
    let coeff = (big * C64::new(theta, 0.0)).exp();
    let phases = gen.phases();
    let alpha = DMatrix::from_fn(m, m, |r, c| coeff[(r, c)].conj() * phases[c]);
    let beta = DMatrix::from_fn(m, m, |r, c| -coeff[(r, m + c)].conj() * phases[c].conj());
    (alpha, beta)
}

/// `α⁽¹⁾`, `β⁽¹⁾` by Richardson-extrapolated central differences of [`extract_bogoliubov`].
pub fn first_order_from_generator(gen: &GeneratorSpec) -> Result<BogoliubovFirstOrder> {
    let diff = |h: f64| {
        let (ap, bp) = extract_bogoliubov(gen, h);
        let (am, bm) = extract_bogoliubov(gen, -h);
        let s = C64::new(1.0 / (2.0 * h), 0.0);
        ((ap - am) * s, (bp - bm) * s)
    };
    let (a_h, b_h) = diff(COEFFICIENT_STEP);
    let (a_h2, b_h2) = diff(COEFFICIENT_STEP / 2.0);
    let third = C64::new(1.0 / 3.0, 0.0);
    let alpha1 = (a_h2 * C64::new(4.0, 0.0) - a_h) * third;
    let beta1 = (b_h2 * C64::new(4.0, 0.0) - b_h) * third;
    BogoliubovFirstOrder::new(gen.phases().to_vec(), alpha1, beta1)
}

/// Largest entry of `|α*αᵀ − β*βᵀ − 1|` and `|α*β† − β*α†|`.
pub fn symplectic_residual(alpha: &DMatrix<C64>, beta: &DMatrix<C64>) -> f64 {
    let m = alpha.nrows();
    let ac = alpha.map(|c| c.conj());
    let bc = beta.map(|c| c.conj());
    let first = &ac * alpha.transpose() - &bc * beta.transpose() - DMatrix::<C64>::identity(m, m);
    let second = &ac * beta.adjoint() - &bc * alpha.adjoint();
    first.iter().chain(second.iter()).map(|c| c.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squeezer_coefficients_are_hyperbolic() {
        let gen = GeneratorSpec::single_mode_squeezer(0, 1).unwrap();
        for theta in [0.1, 0.5, 1.3] {
            let (a, b) = extract_bogoliubov(&gen, theta);
            assert!((a[(0, 0)] - C64::new(theta.cosh(), 0.0)).norm() < 1e-12);
            assert!((b[(0, 0)] - C64::new(theta.sinh(), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_mode_squeezer_coefficients() {
        let gen = GeneratorSpec::two_mode_squeezer(0, 1, 2).unwrap();
        let theta = 0.4;
        let (a, b) = extract_bogoliubov(&gen, theta);
        for k in 0..2 {
            assert!((a[(k, k)] - C64::new(theta.cosh(), 0.0)).norm() < 1e-12);
            assert!(a[(k, 1 - k)].norm() < 1e-12);
            assert!((b[(k, 1 - k)] - C64::new(theta.sinh(), 0.0)).norm() < 1e-12);
            assert!(b[(k, k)].norm() < 1e-12);
        }
    }

    #[test]
    fn beam_splitter_first_order() {
        let gen = GeneratorSpec::beam_splitter(0, 1, 2).unwrap();
        let spec = first_order_from_generator(&gen).unwrap();
        assert!((spec.alpha1()[(0, 1)] - C64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((spec.alpha1()[(1, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-10);
        assert!(spec.beta1().norm() < 1e-12);
    }

    #[test]
    fn coefficients_are_symplectic() {
        let gen = GeneratorSpec::two_mode_squeezer(0, 1, 3).unwrap();
        for theta in [-0.7, 0.2, 1.1] {
            let (a, b) = extract_bogoliubov(&gen, theta);
            assert!(symplectic_residual(&a, &b) < 1e-12);
        }
    }
}
