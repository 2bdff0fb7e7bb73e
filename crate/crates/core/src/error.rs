use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("qubit index {0} repeated within one instruction")]
    DuplicateQubit(usize),

    #[error("gate {gate} expects {expected} qubit(s), got {found}")]
    Arity {
        gate: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix payload is not unitary (max deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("width mismatch: expected {expected} qubits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("{width} qubits exceeds the dense simulation cap of {cap}")]
    WidthAboveCap { width: usize, cap: usize },

    #[error("target state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("malformed bitstring {0:?}")]
    MalformedBitstring(String),

    #[error(
        "reference amplitude {which} = <{bitstring}|{state}> has magnitude {magnitude:.3e}; \
         supply a projection bitstring with a nonzero amplitude (--projection)"
    )]
    DegenerateReference {
        which: &'static str,
        state: &'static str,
        bitstring: String,
        magnitude: f64,
    },

    #[error("circuit is not in the {{cz, rz, sx, x}} basis: found {0}")]
    NotTranspiled(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
