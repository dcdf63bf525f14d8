//! Beam splitter on |n,m>: the cross term 8nm dominates, giving 8nm + 4n + 4m.
//!
//! Run with `cargo run --release --example beam_splitter`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::harness::{check_rows, scan_two_mode, ScanOptions};

fn main() -> bogofisher::Result<()> {
    let spec = BogoliubovFirstOrder::beam_splitter(0, 1, 2)?;
    let points: Vec<(u32, u32)> = (0..=4).flat_map(|n| (0..=4).map(move |m| (n, m))).collect();
    let rows = scan_two_mode(&spec, 0, 1, &points, &ScanOptions::default())?;
    check_rows(&rows)?;

    print!("n\\m");
    for m in 0..=4 {
        print!("{m:>9}");
    }
    for n in 0..=4u32 {
        print!("\n{n:>3}");
        for r in rows.iter().filter(|r| r.n == n) {
            print!("{:>9.3}", r.qfi_oracle.unwrap_or(r.qfi_perturb));
        }
    }
    println!();
    let worst = rows
        .iter()
        .map(|r| {
            let (n, m) = (r.n as f64, r.m.unwrap_or(0) as f64);
            (r.qfi_perturb - (8.0 * n * m + 4.0 * n + 4.0 * m)).abs()
        })
        .fold(0.0, f64::max);
    println!("largest deviation from 8nm + 4n + 4m: {worst:.2e}");
    Ok(())
}
