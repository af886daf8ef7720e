//! Constructive nearest-normal approximation of complex square matrices.
//!
//! Given `A`, the pipeline builds a normal matrix `A'` with spectrum on a
//! scaled integer lattice — equivalently, an exactly commuting Hermitian pair
//! from a given Hermitian pair — and reports the achieved distance together
//! with the measured constants of every stage.
//!
//! Module map:
//! - [`linalg`]: dense complex substrate — norms, Hermitian/normal
//!   eigendecompositions, functional calculus, polar machinery, and the
//!   doubled-space utilities around the block projection `P`.
//! - [`smooth`]: the C^∞ step and everything built from it — partition
//!   bumps, cutoff pairs, disc cutoff, grid snap, radial clamp, and the
//!   star-shaped contour with its circle map and guarded projection.
//! - [`extension`]: pinching and the block extension producing a normal
//!   doubled operator near `A ⊕ N`.
//! - [`holecutter`]: spectrum surgery — disc cuts, the contour point cut,
//!   and many-holes-at-once removal with non-accumulating commutator growth.
//! - [`lattice`]: the two-round flattening of a doubled spectrum onto the
//!   Gaussian integers.
//! - [`pipeline`]: end-to-end assembly, the distance lower bound, and the
//!   Hermitian-pair form.
//! - [`oracle`]: reproducible random ensembles, a triangular baseline, and a
//!   brute-force nearest-normal search for tiny matrices.

pub mod error;
pub mod extension;
pub mod holecutter;
pub mod lattice;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod smooth;

pub use error::{Error, Result};
pub use linalg::{C64, ComplexMatrix, DoubledMatrix, NormalDecomposition};
