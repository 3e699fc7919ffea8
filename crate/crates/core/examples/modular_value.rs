//! Full report for one function under a custom meter.
//!
//! `cargo run --example modular_value -- 0110`

use modval::djstates::CanonicalStatePair;
use modval::modular::{report, MeterConfig};
use modval::oracle::{oracle_unitary, BooleanFunction};
use modval::BlochVector;

fn main() -> modval::Result<()> {
    let f: BooleanFunction = std::env::args().nth(1).unwrap_or_else(|| "0011".into()).parse()?;
    let pair = CanonicalStatePair::three_qubit_exact();
    let u = oracle_unitary(&f);

    let ibm = report(pair.psi_i(), pair.psi_f(), &u, &MeterConfig::ibm())?;
    println!("f = {f} ({})", f.classify());
    println!("{}", serde_json::to_string_pretty(&ibm)?);

    // Tilting m out of the z axis mixes the real part into the spin.
    let m = BlochVector::normalize(0.0, 1.0, 1.0)?;
    let tilted = MeterConfig::new(m, BlochVector::PLUS_X, BlochVector::PLUS_Y)?;
    let r = report(pair.psi_i(), pair.psi_f(), &u, &tilted)?;
    println!("tilted meter: spin {:+.6}, visibility {:.6}", r.expected_spin, r.visibility);
    Ok(())
}
