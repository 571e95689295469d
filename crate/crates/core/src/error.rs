use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin system has no spins")]
    EmptySystem,
    #[error("{0} spins requested; dense simulation supports at most {1}")]
    TooManySpins(usize, usize),
    #[error("duplicate spin label `{0}`")]
    DuplicateLabel(String),
    #[error("no spectrometer frequency for channel `{0}`")]
    MissingChannel(String),
    #[error("couplings {a}-{b} are asymmetric ({j_ab} Hz vs {j_ba} Hz)")]
    AsymmetricCoupling { a: String, b: String, j_ab: f64, j_ba: f64 },
    #[error("spin `{0}` cannot couple to itself")]
    SelfCoupling(String),
    #[error("unknown spin `{0}`")]
    UnknownSpin(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("polarization weight of spin `{0}` must be positive")]
    NonPositiveWeight(String),
    #[error("invalid molecule description: {0}")]
    Config(String),
    #[error("matrix dimension {found} does not match system dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid basis state: {0}")]
    InvalidBasisState(String),
    #[error("levels {0} and {1} do not form a zero-, single- or double-quantum transition")]
    NotATransition(usize, usize),
    #[error("transitions are identical")]
    IdenticalTransitions,
    #[error("{0}-quantum transition cannot be pulsed directly")]
    NotSingleQuantum(&'static str),
    #[error("{0} is single-quantum; pulse it directly")]
    AlreadySingleQuantum(String),
    #[error("no intermediate level connects {0}")]
    NoIntermediateLevel(String),
    #[error("flip angle {0} rad outside [0, 2π]")]
    AngleOutOfRange(f64),
    #[error("soft pulse: {0}")]
    SoftPulse(String),
    #[error("time step {dt:.3e} s too large: ‖H‖·dt = {product:.3} rad exceeds 0.1")]
    StepTooLarge { dt: f64, product: f64 },
    #[error("phase cycle needs at least one phase")]
    EmptyPhaseList,
    #[error("sequence has no transition-selective pulse to phase cycle")]
    NothingToCycle,
    #[error("{scheme} requires a {required}-spin system, got {found}")]
    WrongSpinCount {
        scheme: &'static str,
        required: usize,
        found: usize,
    },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("phase mismatch: {0}")]
    PhaseMismatch(String),
    #[error("oracle table is neither constant nor balanced")]
    NotConstantOrBalanced,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
