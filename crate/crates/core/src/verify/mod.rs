//! Checkers that turn exact data into [`VerificationReport`]s.
//!
//! Every checked item records both sides of its inequality, the relation and
//! the arithmetic mode that decided it. Exact items are decided on rationals,
//! surds and symbolic `π`; Monte Carlo items compare 99% confidence bounds.

mod analysis;
mod boxes;
mod oracle;
pub mod random;
mod report;
mod sharpness;

use num_rational::BigRational;
use serde_json::Value;

pub use analysis::{
    check_annular_bound, check_annular_bound_random, check_annular_bound_schedule,
    check_pinned_density_theorem, check_subadditivity_monotonicity, check_translation_invariance,
    TranslationConfig,
};
pub use boxes::{check_counterexample, check_density_lower_bound, grid_pins};
pub use oracle::{check_mc_crosscheck, check_pinned_sampling, required_hits, CrossCheckConfig};
pub use report::{
    verdict_of, Relation, ReportItem, Status, Verdict, VerificationReport, REPORT_SCHEMA_VERSION,
};
pub use sharpness::{check_sharpness, sharpness_constant, sharpness_threshold};

use crate::geometry::Point;
use crate::measure::RadiusSchedule;

/// Independent sub-seed for the `k`-th piece of a seeded run (SplitMix64 step).
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn schedule_value(s: &RadiusSchedule) -> Value {
    Value::Array(
        s.radii()
            .iter()
            .map(|r| Value::String(r.to_string()))
            .collect(),
    )
}

fn point_value(p: &Point) -> Value {
    Value::String(p.to_string())
}

fn rat_value(q: &BigRational) -> Value {
    Value::String(q.to_string())
}
