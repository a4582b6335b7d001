//! Exact-arithmetic library for characteristic polynomials of operators
//! assembled from rank-1 building blocks, with combinatorial expansions
//! over partial injections, mixed forests and nodal polyhedra.

pub mod bundle;
pub mod doomb;
pub mod exact;
pub mod instance;
pub mod lemmas;
pub mod level2;
pub mod ncpoly;
pub mod rank1;

pub use doomb::{charpoly_combinatorial, mu_combinatorial, Doomb};
pub use exact::{char_poly, det, Matrix, Polynomial, Rat};
pub use ncpoly::{NcPoly, Word};
pub use rank1::{assemble, RankOneSystem};
