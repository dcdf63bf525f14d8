//! Fock-state scan under a single-mode squeezer on all three QFI paths, the scaling fit and
//! the CSV table.
//!
//! Run with `cargo run --release --example fock_scan`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::harness::{check_rows, fit_scaling, scan_fock, write_csv, ScanOptions};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::single_mode_squeezer(0, 1)?;
    let ns: Vec<u32> = (0..=8).collect();
    let rows = scan_fock(&spec, 0, &ns, &ScanOptions::default())?;
    check_rows(&rows)?;

    println!("{:>3} {:>12} {:>12} {:>12} {:>10}", "n", "closed", "perturb", "oracle", "2(n²+n+1)");
    for r in &rows {
        let n = r.n as f64;
        println!(
            "{:>3} {:>12.6} {:>12.6} {:>12.6} {:>10}",
            r.n,
            r.qfi_closed,
            r.qfi_perturb,
            r.qfi_oracle.unwrap_or(f64::NAN),
            2.0 * (n * n + n + 1.0)
        );
    }
    let subtracted = fit_scaling(&rows, true, false)?;
    let raw = fit_scaling(&rows, false, false)?;
    println!("exponent with vacuum term removed  {:.4}", subtracted.exponent);
    println!("exponent with vacuum term kept     {:.4}", raw.exponent);

    println!();
    write_csv(&rows, std::io::stdout().lock())
}
