//! Two-mode squeezer on |n,n>: the closed-form breakdown and the product-state QFI
//! 8n(n+1) + I(|0>).
//!
//! Run with `cargo run --example two_mode_squeezer`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::harness::{scan_diagonal, ScanOptions};
use bogofisher::qfi::{qfi_two_mode_closed, VACUUM_TERM};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::two_mode_squeezer(0, 1, 2)?;
    let report = qfi_two_mode_closed(&spec, 3, 0, 3, 1)?;
    println!("breakdown for |3,3>:");
    for term in &report.breakdown {
        println!("  {:<28} {:>10.4}", term.name, term.value);
    }
    println!("  {:<28} {:>10.4}", "total", report.qfi);

    let ns: Vec<u32> = (0..=4).collect();
    let rows = scan_diagonal(&spec, 0, 1, &ns, &ScanOptions::default())?;
    let vacuum = report.term(VACUUM_TERM).unwrap_or_default();
    println!();
    println!("{:>3} {:>10} {:>10} {:>10} {:>10}", "n", "QFI", "oracle", "QFI - I0", "8n(n+1)");
    for r in &rows {
        let n = r.n as f64;
        println!(
            "{:>3} {:>10.4} {:>10.4} {:>10.4} {:>10}",
            r.n,
            r.qfi_perturb,
            r.qfi_oracle.unwrap_or(f64::NAN),
            r.qfi_perturb - vacuum,
            8.0 * n * (n + 1.0)
        );
    }
    Ok(())
}
