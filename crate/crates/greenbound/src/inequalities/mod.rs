//! Exponent admissibility, test-function families and the ratio harness
//! for the Sobolev, Poincaré and ∂̄ inequalities.

pub mod admissibility;
pub mod families;
pub mod ratio;

pub use admissibility::{admissible, theorem_ids, theorem_info, Admissibility, Exponent, ExponentTriple, Setting, TheoremInfo, TheoremKind, THEOREMS};
pub use families::{generate_family, harmonic_residual, Family, FamilyKind, FamilySpec};
pub use ratio::{
    certificate_targets, certified_vs_empirical, certify, dbar_vs_del_comparison, ratio_suite, ConsistencyRecord, DelDbarReport, DelDbarRow,
    InequalityReport, RatioRow, DELTA_NOTE,
};
