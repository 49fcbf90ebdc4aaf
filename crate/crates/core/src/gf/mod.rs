//! Arithmetic over finite fields: polynomials over F_p, factorization, and
//! extension fields with the ambient quadratic character.

pub mod factor;
pub mod field;
pub mod poly;

pub use factor::{degree_pattern, factor, is_irreducible, reduce_and_factor, FactorList};
pub use field::{FieldCtx, FieldCtxExt, FieldElem, SqrtResult};
pub use poly::{legendre, FpPoly};
