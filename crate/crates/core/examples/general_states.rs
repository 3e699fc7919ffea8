//! The generalized pre/post-selection pair on three input bits: every
//! balanced function gets a non-zero imaginary modular value.
//!
//! `cargo run --example general_states -- 3`

use modval::djstates::{balanced_rows, predicted_p, CanonicalStatePair};
use modval::modular::postselection_probability;
use modval::oracle::{enumerate, OracleClass};

fn main() -> modval::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let pair = CanonicalStatePair::general(n)?;
    let p = postselection_probability(pair.psi_i(), pair.psi_f())?;
    println!("n = {n}: p = {p:.6}, closed form {}", predicted_p(n as u32 + 1));
    let rows = balanced_rows(&pair, &enumerate(n, OracleClass::Balanced)?)?;
    let weakest = rows
        .iter()
        .min_by(|a, b| a.im().abs().total_cmp(&b.im().abs()))
        .expect("at least one balanced function");
    println!("{} balanced functions, smallest |Im O_m| = {:.4} at {}", rows.len(), weakest.im().abs(), weakest.f);
    for row in rows.iter().take(8) {
        println!("  {}  {:+.4} {:+.4}i", row.f, row.re(), row.im());
    }
    Ok(())
}
