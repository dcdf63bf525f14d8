//! Reduced-state QFI from a single matrix element of the second-order density correction,
//! compared with the tracing-loss formula and the Uhlmann fidelity.
//!
//! Run with `cargo run --example mixed_matrix_element`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::fock::{ModeLayout, ModeSubset, StateVector};
use bogofisher::oracle::{derivative_states, qfi_fidelity_mixed, GeneratorSpec, Oracle, MIXED_STEP};
use bogofisher::perturb::transform_first_order;
use bogofisher::qfi::{qfi_mixed_matrix_element, qfi_reduced};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2)?;
    let gen = GeneratorSpec::from_first_order(&spec)?;
    let keep = ModeSubset::new(&[0], 2)?;
    let layout = ModeLayout::new(2, 8)?;
    let input = StateVector::fock(layout, &[1, 1])?;

    let reduced = qfi_reduced(&spec, &input, &keep)?;
    let psi0_k = transform_first_order(&spec, &input)?.psi0.restrict(&keep)?;
    let rho2 = derivative_states(&gen, &input, &keep, MIXED_STEP)?.rho2;
    let element = qfi_mixed_matrix_element(&rho2, &psi0_k)?;
    let rho2_extrapolated = Oracle::new(&gen, layout)?.derivative_states_richardson(&input, &keep, MIXED_STEP)?.rho2;
    let extrapolated = qfi_mixed_matrix_element(&rho2_extrapolated, &psi0_k)?;
    let uhlmann = qfi_fidelity_mixed(&gen, &input, &keep, MIXED_STEP)?;

    println!("input |1,1>, keep mode 0, two-mode squeezer");
    println!("  I_pure - tracing loss     {:.9}", reduced.qfi);
    println!("  -4 <psi0|rho2|psi0>       {element:.9}");
    println!("  same, Richardson-combined {extrapolated:.9}");
    println!("  Uhlmann fidelity          {:.9} (+/- {:.1e})", uhlmann.value, uhlmann.error);
    Ok(())
}
