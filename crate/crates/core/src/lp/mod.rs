//! Littlewood–Paley blocks, Besov norms and paraproducts.

pub mod cutoff;
pub mod family;
pub mod norms;
pub mod paraproduct;

pub use family::{build_dyadic_family, DyadicBlockDecomposition, DyadicFamily};
pub use norms::{besov_norm, besov_tilde, block_norms, lp_norm, norm_report, BesovIndex, NormReport};
pub use paraproduct::{bony_decomposition, decompose_product_block, paraproduct_t, remainder_r, BonyDecomposition, ProductBlock};
