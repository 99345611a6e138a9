//! Arithmetic dynamics of integer polynomial maps.
//!
//! Orbits of integer polynomials, classification of the orbit of 0,
//! pairwise coprime sequences extracted from wandering orbits, strong
//! divisibility checks, and the doubly exponential growth law.

pub mod arith;
pub mod classifier;
pub mod coprime;
pub mod divisibility;
pub mod factorint;
pub mod growth;
pub mod orbit;
pub mod polynomial;
pub mod serde_str;

pub use classifier::{classify_zero_orbit, Family, ZeroOrbitClass};
pub use orbit::Orbit;
pub use polynomial::IntPoly;

/// Any error produced by the library, for callers that mix modules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] polynomial::PolyError),
    #[error(transparent)]
    Orbit(#[from] orbit::OrbitError),
    #[error(transparent)]
    Classify(#[from] classifier::ClassifyError),
    #[error(transparent)]
    Coprime(#[from] coprime::CoprimeError),
    #[error(transparent)]
    Div(#[from] divisibility::DivError),
    #[error(transparent)]
    Growth(#[from] growth::GrowthError),
}

impl Error {
    /// Short machine-readable tag naming the module that failed.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Poly(_) => "polynomial",
            Error::Orbit(_) => "orbit",
            Error::Classify(_) => "classifier",
            Error::Coprime(_) => "coprime",
            Error::Div(_) => "divisibility",
            Error::Growth(_) => "growth",
        }
    }
}
