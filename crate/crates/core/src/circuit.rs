use crate::error::{Error, Result};
use crate::gate::Gate;

/// Ordered instruction list over a fixed number of qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    num_qubits: usize,
    instructions: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn instructions(&self) -> &[Gate] {
        &self.instructions
    }

    pub fn into_instructions(self) -> Vec<Gate> {
        self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of instructions, not counting global-phase bookkeeping.
    pub fn gate_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|g| !g.is_global_phase())
            .count()
    }

    /// Appends a validated instruction.
    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.num_qubits)?;
        self.instructions.push(gate);
        Ok(self)
    }

    /// Appends every instruction of `other`, which must have the same width.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                found: other.num_qubits,
            });
        }
        self.instructions.extend(other.instructions.iter().cloned());
        Ok(self)
    }

    /// Appends `other` with its qubit `i` placed on `map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, map: &[usize]) -> Result<&mut Self> {
        if map.len() != other.num_qubits {
            return Err(Error::WidthMismatch {
                expected: other.num_qubits,
                found: map.len(),
            });
        }
        for gate in &other.instructions {
            self.push(gate.remapped(map))?;
        }
        Ok(self)
    }

    /// Adjoint circuit: reversed order, each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            instructions: self.instructions.iter().rev().map(Gate::inverse).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.instructions
            .iter()
            .try_for_each(|g| g.validate(self.num_qubits))
    }
}

impl Extend<Gate> for Circuit {
    /// Unchecked extension; callers are expected to `validate` afterwards.
    fn extend<I: IntoIterator<Item = Gate>>(&mut self, iter: I) {
        self.instructions.extend(iter);
    }
}
