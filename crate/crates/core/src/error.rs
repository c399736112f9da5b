use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate point set: affine rank {rank} below dimension {dim}")]
    Degenerate { rank: usize, dim: usize },

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("singular linear map (determinant {0:e})")]
    SingularMap(f64),

    #[error("support function vanishes on the sphere (min {min:e}, max {max:e}); polar volume diverges")]
    Divergent { min: f64, max: f64 },

    #[error("set is not convex")]
    NotConvex,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("facet normal stays orthogonal to the direction after {attempts} perturbations")]
    OrthogonalFacet { attempts: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
