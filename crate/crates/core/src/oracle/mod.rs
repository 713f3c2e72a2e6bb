//! Ground truth for tiny parameters: explicit coverings, exact covering numbers,
//! and direct checks of the matrix identities behind the spectral bounds.

pub mod covering;
pub mod graph;
pub mod matrix;
pub mod search;
pub mod suite;

pub use covering::{gram_check, is_covering, random_covering, s_incidence, subsets, Covering, Witness};
pub use graph::{caro_tuza_check, caro_tuza_weight, max_n_independent, CaroTuzaReport, Multigraph};
pub use matrix::{pd_check, IntMatrix};
pub use search::{exact_cover_number, optimal_covering, Optimum, DEFAULT_BUDGET};
pub use suite::{decomposition_check, run_identity_suite, v0_check, DecompositionReport, SuiteReport};
