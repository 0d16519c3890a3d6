//! Heegaard splittings: which genera an invariant surface can have, gluing
//! maps as products of Dehn twists acting on first homology, the homology of
//! the glued manifold, and the extension of a sphere flow into the ball.

mod ball;
mod feasibility;
mod homology;
mod twist;

use thiserror::Error;

pub use ball::{
    extend_to_ball, handle_equilibria, sample_interior, sphere_zeros_numeric, BallExtensionField, BoundaryCheck,
    ExtensionReport, Profile, SampleOptions, SphereField,
};
pub use feasibility::{corollary_check, feasible_genera, witness, IndexSet, MAX_EQUILIBRIA};
pub use homology::{h1_from_gluing, presentation_block, smith_diagonal, AbelianGroup};
pub use twist::{compose_word, parse_word, symplectic_form, twist_matrix, CurveId, GluingMatrix, Letter};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeegaardError {
    #[error("{count} equilibria exceed the limit of {max}")]
    TooManyEquilibria { count: usize, max: usize },
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("curve {curve} does not exist in genus {genus}")]
    InvalidCurve { curve: String, genus: u32 },
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("genus must be positive")]
    ZeroGenus,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("integer overflow while composing twists")]
    Overflow,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("sphere field charts disagree: {0}")]
    InconsistentCharts(String),
    #[error("point lies outside the closed unit ball")]
    OutsideBall,
}
