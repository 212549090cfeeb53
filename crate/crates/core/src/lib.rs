//! Upper bounds on the Banach-Mazur distance `d(p) = d_BM(ℓ_p^n, ℓ_∞^n)`.
//!
//! - [`exponent`]: exponents `p ∈ [1, ∞]` and `ℓ_p` / dual norms.
//! - [`gauge`]: the sandwich radii `γ₁`, `γ₂` of `A(B_∞)` and the objective
//!   `g_p(A) = γ₁/γ₂`, whose minimum over `GL_n` is the distance.
//! - [`optimizer`]: Nelder-Mead and particle-swarm search for good witnesses.
//! - [`bounds`]: exact distances, the closed-form bound near `p = 1`,
//!   multiplicative chaining and the best-of combination.
//! - [`certify`]: outward-rounded interval evaluation of `g_p` over exact
//!   matrices, so that reported witnesses are mathematically certified.
//! - [`matrix_io`]: the plain-text matrix format shared by the CLI.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod exponent;
pub mod gauge;
pub mod matrix_io;
pub mod optimizer;

pub use bounds::{best_upper_bound, borsuk_bound, BoundResult, Method};
pub use error::{Error, Result};
pub use exponent::{dual_norm, p_norm, Exponent};
pub use gauge::{objective, GaugePair, SquareMatrix};
pub use matrix_io::MatrixText;
pub use optimizer::{estimate_distance, OptimizerConfig, SearchResult};
