//! End-to-end theorem checks: the eigenvalue chord inequality with its
//! intermediate chain, log-concavity of the first eigenfunction, the V=0
//! homogeneity corollary, and the deformation discontinuity scan.

mod bm;
mod homog;
mod jump;
mod logconc;

pub use bm::{verify_bm, BMReport, BmRow, VerifyParams};
pub use homog::{homogeneity_check, HomogeneityCheck};
pub use jump::{counterexample_scan, JumpReport};
pub use logconc::{verify_logconcavity, LogConcavityReport};
