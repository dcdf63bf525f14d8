//! A randomly drawn quadratic generator: its Bogoliubov coefficients from the symplectic
//! exponential, the perturbative state against the exact propagator, and the QFI both ways.
//!
//! Run with `cargo run --release --example oracle_compare`.

use bogofisher::fock::{ModeLayout, ModeSubset, StateVector};
use bogofisher::oracle::{
    derivative_states, exact_unitary, extract_bogoliubov, first_order_from_generator, qfi_fidelity_pure,
    symplectic_residual, GeneratorSpec, PURE_STEP,
};
use bogofisher::perturb::transform_first_order;
use bogofisher::qfi::qfi_pure;
use bogofisher::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> bogofisher::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let modes = 2;
    let mut c = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let a = DMatrix::from_fn(modes, modes, |_, _| c());
    let b = DMatrix::from_fn(modes, modes, |_, _| c());
    let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let g = (&b + b.transpose()) * C64::new(0.5, 0.0);
    let phases = vec![C64::from_polar(1.0, 0.3), C64::from_polar(1.0, -1.1)];
    let gen = GeneratorSpec::new(h, g, phases)?;

    let (alpha, beta) = extract_bogoliubov(&gen, 0.1);
    println!("symplectic residual at theta = 0.1: {:.2e}", symplectic_residual(&alpha, &beta));

    let spec = first_order_from_generator(&gen)?;
    let layout = ModeLayout::new(modes, 9)?;
    let input = StateVector::from_terms(
        layout,
        [
            (vec![1, 0].into(), C64::new(0.6, 0.0)),
            (vec![2, 1].into(), C64::new(0.0, 0.8)),
        ],
    )?;
    let pair = transform_first_order(&spec, &input)?;
    let numeric = derivative_states(&gen, &input, &ModeSubset::all(modes), PURE_STEP)?;
    let diff = pair.psi1.add_scaled(&numeric.psi1, C64::new(-1.0, 0.0))?;
    println!("|psi1 - finite difference|          {:.2e}", diff.norm_sqr().sqrt());

    let u = exact_unitary(&gen, 0.05, layout)?;
    println!("truncated propagator unitarity      {:.2e}", u.unitarity_residual());

    let oracle = qfi_fidelity_pure(&gen, &input, PURE_STEP)?;
    println!("perturbative QFI                    {:.9}", qfi_pure(&pair));
    println!("oracle QFI                          {:.9} (+/- {:.1e})", oracle.value, oracle.error);
    Ok(())
}
