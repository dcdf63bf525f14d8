//! QFI of the vacuum under a single-mode squeezer, from the perturbative pair and from the
//! brute-force fidelity oracle.
//!
//! Run with `cargo run --example squeezed_vacuum`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::fock::{ModeLayout, StateVector};
use bogofisher::oracle::{qfi_fidelity_pure, GeneratorSpec, PURE_STEP};
use bogofisher::perturb::transform_first_order;
use bogofisher::qfi::{pure_report, DEFAULT_THETA};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1)?;
    let vacuum = StateVector::vacuum(ModeLayout::new(1, 6)?);

    let pair = transform_first_order(&spec, &vacuum)?;
    println!("psi0 = {:?}", pair.psi0.terms().collect::<Vec<_>>());
    println!("psi1 = {:?}", pair.psi1.terms().collect::<Vec<_>>());

    let report = pure_report(&pair).with_theta(DEFAULT_THETA);
    let oracle = qfi_fidelity_pure(&GeneratorSpec::from_first_order(&spec)?, &vacuum, PURE_STEP)?;
    println!("perturbative QFI   {:.12}", report.qfi);
    println!("vacuum term        {:.12}", spec.vacuum_qfi());
    println!("oracle QFI         {:.12} (+/- {:.1e})", oracle.value, oracle.error);
    println!("theta^2 I / 4      {:.3e} at theta = {}", report.validity_ratio, report.theta);
    println!("Cramer-Rao bound   {:.4e} after 10^6 repetitions", report.cramer_rao(1_000_000));
    Ok(())
}
