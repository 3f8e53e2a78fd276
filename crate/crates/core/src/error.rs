use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite complex value ({re}, {im})")]
    NonFinite { re: f64, im: f64 },

    #[error("complex division by zero")]
    DivisionByZero,

    #[error("level {level} out of range: {reason}")]
    LevelOutOfRange { level: usize, reason: &'static str },

    #[error("operand level mismatch: {left:?} vs {right:?}")]
    LevelMismatch {
        left: Option<usize>,
        right: Option<usize>,
    },

    #[error("invalid qubit count {0}")]
    InvalidQubitCount(usize),

    #[error("qubit {qubit} out of range for a {n}-qubit circuit")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("qubit {0} used more than once in a gate")]
    OverlappingQubits(usize),

    #[error("dense extraction limited to {limit} qubits, got {n}")]
    DenseLimit { n: usize, limit: usize },

    #[error("reference count underflow on node {0}")]
    RefUnderflow(u32),

    #[error("circuit has no gates")]
    EmptyCircuit,

    #[error("repetition count must be at least 1")]
    ZeroRepetitions,

    #[error("marked bitstring {marked:?} does not describe {d} data qubits")]
    InvalidMarked { marked: String, d: usize },

    #[error("gate cannot be expressed in the QASM subset: {0}")]
    Unsupported(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("deadline exceeded")]
    Timeout,

    #[error("unique table exceeded node limit of {0}")]
    NodeLimit(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
