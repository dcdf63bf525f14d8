//! Coherent probes under a single-mode squeezer scale linearly in the mean photon number,
//! Fock probes quadratically.
//!
//! Run with `cargo run --release --example coherent_contrast`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::harness::{fit_coherent_scaling, fit_scaling, scan_coherent, scan_fock, ScanOptions};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1)?;
    let opts = ScanOptions::default();
    let alpha_sqrs: Vec<f64> = (1..=8).map(f64::from).collect();
    let coherent = scan_coherent(&spec, 0, &alpha_sqrs, &opts)?;
    println!("{:>6} {:>8} {:>12} {:>12}", "|a|^2", "cutoff", "oracle QFI", "4|a|^2 + 2");
    for r in &coherent {
        println!("{:>6} {:>8} {:>12.6} {:>12.6}", r.alpha_sqr, r.cutoff, r.qfi_oracle, 4.0 * r.alpha_sqr + 2.0);
    }
    let ns: Vec<u32> = (0..=8).collect();
    let fock = scan_fock(&spec, 0, &ns, &opts)?;
    println!("coherent exponent {:.4}", fit_coherent_scaling(&coherent, true)?.exponent);
    println!("Fock exponent     {:.4}", fit_scaling(&fock, true, true)?.exponent);
    Ok(())
}
