//! Exact ramification invariants of two-dimensional local fields
//! `K = F_q((t))((pi))` of characteristic `p`.
//!
//! The crate covers:
//!
//! * exact truncated arithmetic in `K` and its pi-root extensions, with the
//!   rank-2 valuation ([`element`], [`series`], [`field`], [`parse`]);
//! * the ordered index sets `A` and `A2` ([`index`]);
//! * piecewise-affine Hasse–Herbrand functions and filtered finite abelian
//!   groups ([`herbrand`], [`group`]);
//! * ramification breaks of degree-`p` Artin–Schreier extensions, with an
//!   independent resultant-norm oracle ([`artin_schreier`], [`norm_oracle`]);
//! * the norm-index calculus on `K_2` filtration indices ([`norm_filtration`]);
//! * data-parallel batch drivers ([`batch`]).

pub mod artin_schreier;
pub mod batch;
pub mod element;
pub mod error;
pub mod field;
pub mod group;
pub mod herbrand;
pub mod index;
pub mod norm_filtration;
pub mod norm_oracle;
pub mod parse;
pub mod rational;
pub mod series;

pub use artin_schreier::{
    analyze, break_a, break_a2, classify_extension, reduce_representative, AnalysisConfig,
    ASNormalForm, ExtensionKind, ExtensionReport,
};
pub use element::{Caps, TwoDimElement, ValuePair};
pub use error::{Error, Result};
pub use field::{Fq, PrimeField};
pub use herbrand::{HerbrandFn, Mode};
pub use index::{Pair, RamIndex, RamIndex2};
pub use rational::Q;
pub use series::{InnerSeries, PthRoot};
