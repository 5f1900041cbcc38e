//! Block-diagonal complex matrix algebras `M_{n_1}(ℂ) ⊕ ... ⊕ M_{n_k}(ℂ)`.

mod element;
pub mod linalg;
pub mod random;
mod shape;

pub use element::{BlockSvd, Element, RankOneSpec};
pub use linalg::{perp_unit, CMat, CVec, C64};
pub use shape::Shape;
