use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("determinant is {0}, expected 1")]
    Determinant(String),
    #[error("invalid modulus {0}")]
    Modulus(u64),
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("subgroup closure exceeded {0} elements")]
    ClosureCap(usize),
    #[error("orbit exceeded {0} states")]
    OrbitCap(usize),
    #[error("coset enumeration exceeded {0} cosets")]
    CosetCap(usize),
    #[error("malformed permutation: {0}")]
    BadPermutation(String),
    #[error("permutations do not act transitively; orbits: {0:?}")]
    NotTransitive(Vec<Vec<usize>>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("subgroup has infinite index; missing transitions: {0:?}")]
    IncompleteAutomaton(Vec<(usize, char)>),
    #[error("word {0} is not in the subgroup")]
    NotMember(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}
