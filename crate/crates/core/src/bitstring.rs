use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Computational-basis label.
///
/// Written most-significant qubit first: in `"100"` qubit 2 is set and
/// qubits 1 and 0 are clear. Internally the label is the amplitude index,
/// where qubit `q` is bit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    index: usize,
    len: usize,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        Bitstring { index: 0, len }
    }

    pub fn from_index(index: usize, len: usize) -> Result<Self> {
        if len < usize::BITS as usize && index >> len != 0 {
            return Err(Error::MalformedBitstring(format!(
                "index {index} wider than {len} bits"
            )));
        }
        Ok(Bitstring { index, len })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.index == 0
    }

    pub fn bit(&self, qubit: usize) -> bool {
        (self.index >> qubit) & 1 == 1
    }

    /// Qubits whose bit is 1, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&q| self.bit(q))
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() >= usize::BITS as usize {
            return Err(Error::MalformedBitstring(s.to_string()));
        }
        let mut index = 0usize;
        for ch in s.chars() {
            index <<= 1;
            match ch {
                '0' => {}
                '1' => index |= 1,
                _ => return Err(Error::MalformedBitstring(s.to_string())),
            }
        }
        Ok(Bitstring {
            index,
            len: s.len(),
        })
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in (0..self.len).rev() {
            f.write_str(if self.bit(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
