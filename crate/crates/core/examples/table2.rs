//! Modular values of the six balanced two-bit functions under the
//! three-qubit pre/post-selection pair.

use modval::djstates::{table2, CanonicalStatePair};
use modval::modular::postselection_probability;

fn main() -> modval::Result<()> {
    let pair = CanonicalStatePair::three_qubit_exact();
    println!(
        "post-selection probability: {:.6} (41/88 = {:.6})",
        postselection_probability(pair.psi_i(), pair.psi_f())?,
        41.0 / 88.0
    );
    println!("{:>6}  {:>10}  {:>10}  {:>9}", "f", "Re O_m", "Im O_m", "x41");
    for row in table2(&pair)? {
        println!(
            "{:>6}  {:>+10.6}  {:>+10.6}  {:+.0}{:+.0}i",
            row.f.to_string(),
            row.re(),
            row.im(),
            row.re() * 41.0,
            row.im() * 41.0
        );
    }
    Ok(())
}
