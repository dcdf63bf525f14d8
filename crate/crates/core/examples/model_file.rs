//! Model documents: a built-in, an explicit document with nontrivial phases, and a document
//! that fails validation.
//!
//! Run with `cargo run --example model_file`.

use bogofisher::bogoliubov::{load_model, validate};

fn main() -> bogofisher::Result<()> {
    let builtin = load_model(r#"{"builtin": "two_mode_squeezer", "k": 0, "kprime": 1, "modes": 2}"#)?;
    println!("builtin round trip: {}", builtin.to_json());

    // G_1 = -1 flips the sign relation between the two beta entries.
    let explicit = load_model(
        r#"{"modes": 2, "G": [[1, 0], [-1, 0]], "beta1": [[0, 1, 1, 0], [1, 0, -1, 0]], "alpha1": [[0, 0, 0, 1]]}"#,
    )?;
    println!("explicit model passes: {}, vacuum QFI {}", validate(&explicit).passed(), explicit.vacuum_qfi());

    match load_model(r#"{"modes": 2, "beta1": [[0, 1, 1, 0]]}"#) {
        Ok(_) => println!("unexpectedly valid"),
        Err(e) => println!("rejected ({}): {e}", e.kind()),
    }
    Ok(())
}
