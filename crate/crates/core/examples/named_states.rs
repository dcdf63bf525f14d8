//! The product, superposition, entangled and penalty probe states under a two-mode squeezer.
//!
//! Run with `cargo run --example named_states`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::harness::{eval_named_states, fit_power_law, NamedState};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2)?;
    println!("{:>2} {:<14} {:>8} {:>10} {:>12}", "n", "state", "<N>", "QFI", "|<0|1>|^2");
    let mut entangled = Vec::new();
    for n in 2..=6 {
        for r in eval_named_states(&spec, n, 0, 1, None)? {
            println!("{n:>2} {:<14} {:>8.3} {:>10.4} {:>12.4e}", r.state.name(), r.avg_n, r.qfi, r.penalty);
            if r.state == NamedState::Entangled {
                entangled.push((r.avg_n, r.qfi - spec.vacuum_qfi()));
            }
        }
    }
    println!("entangled-state exponent over n = 2..6, vacuum term removed: {:.4}", fit_power_law(&entangled)?.exponent);
    Ok(())
}
