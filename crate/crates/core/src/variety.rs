//! Subvariety identifiers and the matching dual-side classes.

use crate::error::{Error, Result};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// `B0` (Boolean algebras), `B1` (Stone algebras), `Bn(n)` for `n >= 2`, and
/// `Omega` (all p-lattices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variety {
    B0,
    B1,
    Bn(usize),
    Omega,
}

impl Variety {
    /// `B_n` with `n` normalised: 0 and 1 map to the dedicated variants.
    pub fn bn(n: usize) -> Variety {
        match n {
            0 => Variety::B0,
            1 => Variety::B1,
            n => Variety::Bn(n),
        }
    }

    /// The bound on `|min(x)|` for dual posets, `None` for `Omega`.
    pub fn level(&self) -> Option<usize> {
        match *self {
            Variety::B0 => Some(0),
            Variety::B1 => Some(1),
            Variety::Bn(n) => Some(n),
            Variety::Omega => None,
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variety::B0 => write!(f, "b0"),
            Variety::B1 => write!(f, "b1"),
            Variety::Bn(n) => write!(f, "b{n}"),
            Variety::Omega => write!(f, "omega"),
        }
    }
}

impl FromStr for Variety {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variety> {
        let t = s.trim().to_ascii_lowercase();
        if t == "omega" || t == "bomega" || t == "bw" {
            return Ok(Variety::Omega);
        }
        if let Some(num) = t.strip_prefix('b') {
            if let Ok(n) = num.parse::<usize>() {
                return Ok(Variety::bn(n));
            }
        }
        Err(Error::Parse(format!("unknown variety `{s}`; expected b0, b1, b<n> or omega")))
    }
}

impl Serialize for Variety {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
