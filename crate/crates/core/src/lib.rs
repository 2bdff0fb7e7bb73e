//! Simulation, synthesis and resource accounting for circuits that estimate
//! the complex overlap `<B|A>` between two prepared `n`-qubit states.
//!
//! Five estimators are provided: the swap and vacuum tests (magnitude only),
//! the Hadamard test, and the one-control and zero-control tests, which
//! recover the phase of the overlap from ancilla statistics combined with
//! classically known reference amplitudes `a0 = <0...0|A>`, `b0 = <0...0|B>`.
//!
//! Qubit `q` is bit `q` of an amplitude index; bitstrings are written
//! most-significant qubit first.

pub mod bitstring;
pub mod circuit;
pub mod error;
pub mod gate;
pub mod protocols;
pub mod resources;
pub mod statevector;
pub mod synthesis;
pub mod text;

mod numfmt;

pub use bitstring::Bitstring;
pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::{Gate, GateKind, Matrix, Polarity};
pub use numfmt::round_significant;
pub use protocols::{
    estimate_overlap, EstimateOptions, EvalMode, OverlapEstimate, Part, ProtocolKind,
    ReferenceCoefficient, ReferenceMode,
};
pub use resources::{
    compare_protocols, crossover_scan, report, ComparisonRow, ResourceReport, ScanResult,
};
pub use statevector::{circuit_unitary, inner_product, StateVector};
pub use synthesis::{prepare_separable, prepare_state, SeparablePrepSpec, SynthesizedPrep};
