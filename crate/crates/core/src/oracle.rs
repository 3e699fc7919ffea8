//! Boolean functions promised to be constant or balanced, and their XOR-target oracles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::DenseOperator;

/// Largest input width [`enumerate`] accepts.
pub const MAX_ENUMERATION_BITS: usize = 4;

/// Truth table `f: {0,1}^k -> {0,1}`; `table[x] = f(x)` with `x` read MSB-first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BooleanFunction {
    table: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleClass {
    Constant,
    Balanced,
    Neither,
}

impl BooleanFunction {
    pub fn new(table: Vec<u8>) -> Result<Self> {
        if table.len() < 2 || !table.len().is_power_of_two() {
            return Err(Error::InvalidTruthTable(format!(
                "length {} is not 2^k with k >= 1",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidTruthTable(format!("entry {bad} is not a bit")));
        }
        Ok(Self { table })
    }

    pub fn constant(input_bits: usize, value: bool) -> Self {
        Self {
            table: vec![value as u8; 1 << input_bits],
        }
    }

    pub fn input_bits(&self) -> usize {
        self.table.len().trailing_zeros() as usize
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    pub fn eval(&self, x: usize) -> u8 {
        self.table[x]
    }

    pub fn complement(&self) -> Self {
        Self {
            table: self.table.iter().map(|b| 1 - b).collect(),
        }
    }

    pub fn classify(&self) -> OracleClass {
        classify(self)
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let table = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidTruthTable(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(table)
    }
}

impl TryFrom<String> for BooleanFunction {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BooleanFunction> for String {
    fn from(f: BooleanFunction) -> String {
        f.to_string()
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.table {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Display for OracleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OracleClass::Constant => "constant",
            OracleClass::Balanced => "balanced",
            OracleClass::Neither => "neither",
        };
        f.write_str(s)
    }
}

pub fn classify(f: &BooleanFunction) -> OracleClass {
    let ones = f.table.iter().filter(|&&b| b == 1).count();
    let len = f.table.len();
    if ones == 0 || ones == len {
        OracleClass::Constant
    } else if 2 * ones == len {
        OracleClass::Balanced
    } else {
        OracleClass::Neither
    }
}

/// All functions of the given class, in lexicographic order of their truth tables.
pub fn enumerate(input_bits: usize, class: OracleClass) -> Result<Vec<BooleanFunction>> {
    if input_bits > MAX_ENUMERATION_BITS {
        return Err(Error::EnumerationGuard {
            max: MAX_ENUMERATION_BITS,
            got: input_bits,
        });
    }
    if input_bits == 0 {
        return Err(Error::TooFewInputBits {
            min: 1,
            got: input_bits,
        });
    }
    let len = 1usize << input_bits;
    let out = (0u64..1u64 << len)
        .map(|code| BooleanFunction {
            table: (0..len).map(|i| ((code >> (len - 1 - i)) & 1) as u8).collect(),
        })
        .filter(|f| classify(f) == class)
        .collect();
    Ok(out)
}

/// The two-input-bit functions in the row order of the classic table:
/// six balanced functions followed by the two constants.
pub fn table1_functions() -> Vec<BooleanFunction> {
    ["0011", "0101", "0110", "1100", "1010", "1001", "0000", "1111"]
        .iter()
        .map(|s| s.parse().expect("valid literal"))
        .collect()
}

pub fn table1_balanced() -> Vec<BooleanFunction> {
    table1_functions().into_iter().take(6).collect()
}

/// `U_f |x, y> = |x, y xor f(x)>` on `input_bits + 1` qubits, target last.
pub fn oracle_unitary(f: &BooleanFunction) -> DenseOperator {
    let dim = 2 * f.table.len();
    DenseOperator::permutation(dim, |j| {
        let (x, y) = (j >> 1, j & 1);
        (x << 1) | (y ^ f.table[x] as usize)
    })
}
