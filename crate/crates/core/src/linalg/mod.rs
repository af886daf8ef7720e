//! Dense complex linear algebra substrate: norms, decompositions, functional
//! calculus, polar machinery, and doubled-space utilities.

mod decomp;
mod doubled;
mod matrix;
mod polar;

pub use decomp::{eig_hermitian, eig_normal, eig_normal_default, NormalDecomposition, NORMALITY_TOL};
pub use doubled::{
    commutator_with_p, corner_embed, path_margin_check, DoubledMatrix, PathMarginReport,
    PathSample, PATH_SAMPLES,
};
pub use matrix::{C64, ComplexMatrix};
pub use polar::{near_unitary_eps, perturb_off_point, polar_parts, polar_retract};
