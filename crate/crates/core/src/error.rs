use thiserror::Error;

use crate::symexpr::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("operands live on different charts: {0}")]
    ChartMismatch(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("no value bound for variable '{0}'")]
    MissingBinding(String),
    #[error("division by zero: variable '{0}' vanishes in a denominator")]
    DivisionByZero(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("form is not closed: component {component} of its exterior derivative is {value}")]
    NotClosed { component: String, value: String },
    #[error("rank of the 2-form is not constant: {0}")]
    NonConstantRank(String),
    #[error("no global kernel: {0}; use pointwise evaluation instead")]
    NonConstantKernel(String),
    #[error("'{0}' is not a presymplectic Hamiltonian function")]
    NotHamiltonian(String),
    #[error("generator '{0}' is not locally Hamiltonian")]
    NotLocallyHamiltonian(String),
    #[error("constraint '{0}' cannot be solved for a single variable")]
    UnsolvableConstraint(String),
    #[error("bifurcation: {0}")]
    Bifurcation(String),
    #[error("stabilization did not terminate within {0} generations")]
    GenerationCap(usize),
    #[error("system is not compatible: {0}")]
    Incompatible(String),
    #[error("mu has {got} entries, the action has {expected} generators")]
    MuArity { expected: usize, got: usize },
    #[error("not a weakly regular value: {0}")]
    NotWeaklyRegular(String),
    #[error("base point is not on the level set: {0}")]
    OffLevel(String),
    #[error("rank drop at the base point: {0}")]
    RankDrop(String),
    #[error("tangency not certified: {0}")]
    TangencyNotCertified(String),
    #[error("kernel is not spanned by coordinate fields: {0}")]
    NonCoordinateKernel(String),
    #[error("time variable '{0}' already exists in the chart")]
    TimeVariableExists(String),
    #[error("no rational point found on the constraint set: {0}")]
    NoSample(String),
    #[error("structure constants do not match the brackets: {0}")]
    StructureConstants(String),
    #[error("one-form is not a primitive of the 2-form: {0}")]
    NotPrimitive(String),
    #[error("model error: {0}")]
    Model(String),
}
