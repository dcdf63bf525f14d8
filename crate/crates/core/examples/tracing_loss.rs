//! Tracing loss of the vacuum under two independent squeezers when the second mode is
//! discarded, against its lower bound and the Uhlmann-fidelity QFI.
//!
//! Run with `cargo run --release --example tracing_loss`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::fock::{ModeLayout, ModeSubset, StateVector};
use bogofisher::oracle::{qfi_fidelity_mixed, GeneratorSpec, MIXED_STEP};
use bogofisher::qfi::{qfi_reduced, tracing_loss, vacuum_loss_bound};

fn main() -> bogofisher::Result<()> {
    let keep = ModeSubset::new(&[0], 2)?;
    let vacuum = StateVector::vacuum(ModeLayout::new(2, 8)?);
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "s", "loss", "2s^2", "reduced", "Uhlmann");
    for s in [0.25, 0.5, 1.0] {
        let spec = BogoliubovFirstOrder::independent_squeezers(&[1.0, s])?;
        let loss = tracing_loss(&spec, &vacuum, &keep)?;
        let reduced = qfi_reduced(&spec, &vacuum, &keep)?;
        let uhlmann = qfi_fidelity_mixed(&GeneratorSpec::from_first_order(&spec)?, &vacuum, &keep, MIXED_STEP)?;
        println!(
            "{s:>5} {loss:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            vacuum_loss_bound(&spec, &keep),
            reduced.qfi,
            uhlmann.value
        );
    }
    Ok(())
}
