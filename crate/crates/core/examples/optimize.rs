//! Fixed-energy search over a three-state support, compared with the uniform superposition.
//!
//! Run with `cargo run --release --example optimize`.

use bogofisher::bogoliubov::BogoliubovFirstOrder;
use bogofisher::fock::{ModeLayout, OccupationVector};
use bogofisher::harness::{named_cutoff, optimize_state, NamedState, OptimizeOptions};
use bogofisher::perturb::transform_first_order;
use bogofisher::qfi::qfi_pure;
use bogofisher::C64;
use nalgebra::DMatrix;

fn main() -> bogofisher::Result<()> {
    // Beam splitter plus two-mode squeezing, no single-mode squeezing.
    let one = C64::new(1.0, 0.0);
    let alpha1 = DMatrix::from_row_slice(2, 2, &[C64::default(), one, -one, C64::default()]);
    let beta1 = DMatrix::from_element(2, 2, one * 0.5).map_with_location(|i, j, b| if i == j { C64::default() } else { b });
    let spec = BogoliubovFirstOrder::new(vec![one; 2], alpha1, beta1)?.validated()?;

    let n = 4;
    let support: Vec<OccupationVector> = [[n, n], [n, n - 2], [n, n + 2]].iter().map(|o| o.to_vec().into()).collect();
    let uniform = NamedState::Superposition.build(ModeLayout::new(2, named_cutoff(n))?, n, 0, 1)?;
    let uniform_qfi = qfi_pure(&transform_first_order(&spec, &uniform)?);
    let result = optimize_state(&spec, &support, 2.0 * n as f64, None, &OptimizeOptions::default())?;

    println!("uniform superposition QFI  {uniform_qfi:.6}");
    println!("optimized QFI              {:.6} (restart {})", result.qfi, result.winning_restart);
    for (occ, c) in &result.amplitudes {
        println!("  {occ}  {:+.6} {:+.6}i", c.re, c.im);
    }
    println!("<N> residual {:.1e}, norm residual {:.1e}", result.constraint_residual, result.norm_residual);
    Ok(())
}
