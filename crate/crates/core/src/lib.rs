//! Dense statevector simulation of modular-value measurements applied to the
//! Deutsch-Jozsa problem.
//!
//! A system register is pre-selected in `psi_i`, coupled to a meter qubit
//! through `Pi_r (x) I + Pi_{-r} (x) U_f`, post-selected on `psi_f`, and the
//! meter is read along `q`. The meter statistics depend on the complex
//! modular value `O = <psi_f|U_f|psi_i> / <psi_f|psi_i>`, which is real
//! (`+-1`) for constant functions and acquires an imaginary part for
//! balanced ones under suitable states.
//!
//! Modules:
//! - [`qcore`]: statevectors, operators, Bloch-sphere projectors.
//! - [`oracle`]: truth tables, classification, XOR-target oracles.
//! - [`modular`]: modular values, joint probabilities, visibilities.
//! - [`djstates`]: the canonical pre/post-selected states.
//! - [`search`]: random state-space search and Pareto frontier.
//! - [`shots`]: shot sampling with optional noise, and the textbook circuit.
//! - [`cli`]: the `modval` command-line interface.
//!
//! ```
//! use modval::djstates::CanonicalStatePair;
//! use modval::modular::modular_value;
//! use modval::oracle::oracle_unitary;
//!
//! let pair = CanonicalStatePair::three_qubit_exact();
//! let f = "0011".parse().unwrap();
//! let o = modular_value(pair.psi_i(), pair.psi_f(), &oracle_unitary(&f)).unwrap();
//! assert!((o.re - 9.0 / 41.0).abs() < 1e-12);
//! assert!((o.im - 40.0 / 41.0).abs() < 1e-12);
//! ```

pub mod cli;
pub mod djstates;
pub mod error;
pub mod modular;
pub mod oracle;
pub mod output;
pub mod qcore;
pub mod rng;
pub mod search;
pub mod shots;

pub use error::{Error, Result};
pub use qcore::{BlochVector, Complex, DenseOperator, Kron, Statevector};
