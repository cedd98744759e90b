use thiserror::Error;

/// Errors raised across formulation, synthesis and simulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("integer overflow while {0}")]
    Overflow(&'static str),

    #[error("assignment has {got} bits but the polynomial has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },

    #[error("variable v{var} out of range for a polynomial over {num_vars} variables")]
    VariableOutOfRange { var: u32, num_vars: usize },

    #[error("variable v{0} appears twice in one term")]
    DuplicateVariable(u32),

    #[error(
        "exhaustive enumeration over {num_vars} variables exceeds the cap of {cap}; \
         supply analytic bounds instead"
    )]
    EnumerationCap { num_vars: usize, cap: usize },

    #[error("index code {kind} needs at least {min} indices, got {got}")]
    TooFewIndices { kind: &'static str, min: usize, got: usize },

    #[error("index {index} is outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("expected {expected} variables for the indicator, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("value register of {m} qubits cannot hold values in [{min}, {max}] (needs {needed})")]
    RegisterTooSmall { m: usize, needed: usize, min: i64, max: i64 },

    #[error("simulation of {qubits} qubits exceeds the cap of {cap}")]
    SimulationCap { qubits: usize, cap: usize },

    #[error("state has {state} qubits but the circuit acts on {circuit}")]
    DimensionMismatch { state: usize, circuit: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0} has no closed-form gate count")]
    NoClosedForm(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
