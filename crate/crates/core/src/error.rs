use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p^{exp} for p = {p} does not fit the working integer type")]
    PrecisionOverflow { p: u64, exp: u32 },
    #[error("monomial basis does not close: {0}")]
    NotFinite(String),
    #[error("ring is not admissible: {0}")]
    NotAdmissible(String),
    #[error("structure constants fail {0}")]
    BadStructure(String),
    #[error("element is not in the ideal")]
    NotInIdeal,
    #[error("divided power gamma_{n} unsupported for {kind}")]
    UnsupportedPD { kind: &'static str, n: u64 },
    #[error("invalid divided power structure: {0}")]
    BadPD(String),
    #[error("ring specification error: {0}")]
    Spec(String),
    #[error("map is not a ring homomorphism: {0}")]
    NotAHom(String),
    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducible(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("Witt vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("Witt vectors live over different rings")]
    RingMismatch,
    #[error("working precision p^{have} too low, need p^{need}")]
    PrecisionTooLow { have: u32, need: u32 },
    #[error("coordinate {0} is not in the divided power ideal")]
    NotInIdeal(usize),
    #[error("Log inverse does not terminate within length {0}")]
    NonNilpotentTail(usize),
    #[error("universal polynomials are only cached up to length {0}")]
    LengthTooLarge(usize),
    #[error("first coordinate is nonzero, vector is not in the image of v")]
    NotInImageOfV,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZinkError {
    #[error("Witt vector is not in the Zink ring: nilpotent part is nonzero at coordinate {0}")]
    NotInZink(usize),
    #[error("element is not in the augmentation ideal (w0 != 0)")]
    NotInIdeal,
    #[error("divided powers unsupported: {0}")]
    UnsupportedPD(String),
    #[error("the v-stabilised ring is only defined for p = 2")]
    NotPrimeTwo,
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("frame axiom violated: {axiom} (witness: {witness})")]
    FrameAxiomViolation { axiom: String, witness: String },
    #[error("element is outside the frame ideal")]
    NotInIdeal,
    #[error(transparent)]
    Zink(#[from] ZinkError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("matrix is not invertible over the frame ring")]
    NotInvertible,
    #[error("theta is a zero divisor at working precision")]
    ThetaNotRegular,
    #[error("no normal decomposition: {0}")]
    NoNormalDecomposition(String),
    #[error("base ring is not a perfect field")]
    NotPerfectBase,
    #[error("crystalline lift iteration exceeded its certified bound of {0} steps")]
    NonConvergent(usize),
    #[error("submodule is not a direct summand lifting the Hodge filtration")]
    NotASummand,
    #[error("divided powers are not nilpotent")]
    NotNilpotentPD,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Zink(#[from] ZinkError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BkError {
    #[error("exact division by p^{0} failed; sigma is not a Frobenius lift")]
    DivisionFailure(u32),
    #[error("kappa image leaves the Zink ring at coordinate {0}")]
    NotInZink(usize),
    #[error("not a Breuil window: {0}")]
    NotAWindow(String),
    #[error("invalid setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Zink(#[from] ZinkError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BtError {
    #[error("invariant factors did not stabilise up to truncation {cap}: last {last:?}")]
    NoStabilization { cap: usize, last: Vec<u32> },
    #[error("display is not nilpotent")]
    NotNilpotent,
    #[error("test algebra rejected: {0}")]
    BadTestAlgebra(String),
    #[error("display source: {0}")]
    Source(String),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error(transparent)]
    Zink(#[from] ZinkError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
