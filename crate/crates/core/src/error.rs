use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid generator name {0:?}")]
    InvalidName(String),
    #[error("invalid namespace prefix {0:?}")]
    InvalidPrefix(String),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    PolyParse { text: String, reason: String },
    #[error("unknown generator {0}")]
    UnknownGenerator(String),
    #[error("generator {0} declared twice")]
    DuplicateGenerator(String),
    #[error("height of {0} must be strictly positive")]
    NonPositiveHeight(String),
    #[error("rotation number {0} is not of the form (2k+1)/4")]
    NotQuarterOdd(String),
    #[error("shrinking needs a height on every generator (missing on {0})")]
    MissingHeights(String),
    #[error("shrink factor {0} is outside (0, 1]")]
    BadShrinkFactor(String),
    #[error("abbreviation {0} collides with a generator or another abbreviation")]
    AbbreviationCollision(String),
    #[error("abbreviation {0} is defined in terms of itself")]
    CyclicAbbreviation(String),
    #[error("abbreviation {0} does not expand to a homogeneous polynomial")]
    InhomogeneousAbbreviation(String),
    #[error("expansion too large to evaluate exactly: {0}")]
    Intractable(String),
    #[error("torus knot parameter n = {0} is even (the closure would be a link)")]
    EvenParameter(u32),
    #[error("torus knot parameter n = {0} is too small (need n >= 3)")]
    TooSmall(u32),
    #[error("path matrix needs n >= 1")]
    EmptyBraid,
    #[error("closure crossing {0} has degree {1}, expected 1")]
    NotDegreeOne(String, i64),
    #[error("closure crossing {closure} appears in the differential of {by}")]
    ClosureReferenced { closure: String, by: String },
    #[error("tangle prefix {0:?} used twice")]
    PrefixCollision(String),
    #[error("generator name {0} produced by two different tangles")]
    NameCollision(String),
    #[error("connected sum of an empty list of tangles")]
    EmptyList,
    #[error("the general Reidemeister II holonomy is not supported: survivor {0} has nonzero differential after the move and no height exemption")]
    RIIGeneralHolonomyUnsupported(String),
    #[error("Reidemeister II^-1 on ({x}, {y}): the differential of {x} does not contain {y}")]
    MalformedDifferential { x: String, y: String },
    #[error("event {index} is inconsistent with the current diagram: {reason}")]
    StaleEvent { index: usize, reason: String },
    #[error("script does not return to the initial generator set: {0}")]
    NotAnEndomorphism(String),
    #[error("move changes {0}, which occurs inside an abbreviated block")]
    AbbreviatedGeneratorMoved(String),
    #[error("fly word mentions the elephant crossing {0}")]
    FlyCollision(String),
    #[error("marker {0} must be a degree-0 generator")]
    NotDegreeZeroMarker(String),
    #[error("witness {0} must be a degree-0 generator")]
    NotDegreeZeroWitness(String),
    #[error("monodromy is not degree-preserving: {0}")]
    NotDegreePreserving(String),
    #[error("summand n = {0} is not an even-class (n,2) torus knot (need n odd, n >= 3, n mod 3 != 2)")]
    BadSummand(u32),
    #[error("loop power {0} is outside {{1, 2, 3}}")]
    BadPower(u32),
    #[error("schema error: {0}")]
    Schema(String),
}
