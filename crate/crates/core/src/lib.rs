//! Conjectural rank parities of the quartic twists `y^2 = x^3 + d x` and the
//! sextic twists `y^2 = x^3 + d` over the rationals.
//!
//! Parities come from closed-form sums of tabulated local invariants at the
//! bad places plus a quadratic character over the ramified support of `d`.
//! The quartic family can be cross-checked against an independent descent
//! through the 2-isogenies of `y^2 = x^3 + d x` (see [`descent`]).
//!
//! ```
//! use twistparity::{classify_quartic, classify_sextic, Rational};
//!
//! let nine: Rational = "9".parse().unwrap();
//! assert!(classify_quartic(&nine).unwrap().is_odd());
//! assert!(!classify_sextic(&Rational::from(-1)).unwrap().is_odd());
//! ```

pub mod arith;
pub mod characters;
pub mod classes;
pub mod descent;
pub mod engine;
mod error;
pub mod record;
pub mod tables;

pub use arith::{factorize, ord_p, power_free_representative, unit_part, Factorization, Rational};
pub use classes::{equivalent, place_class_key, Family, Place, PlaceClassKey, Sign};
pub use engine::{
    classify, classify_cubic, classify_quadratic, classify_quartic, classify_sextic, ParityBreakdown,
};
pub use error::{Error, Result};
pub use tables::{load_table, LocalInvariantTable};
