//! Primitives, point-to-primitive distance ranges and the interval-set algebra
//! in which pinned distance sets live.
//!
//! Every primitive is connected, so the distances it attains from a pin form a
//! single closed interval. A pinned distance set of a finite family is therefore
//! an exact finite union of intervals whose endpoints are quadratic surds.

mod interval;
mod primitive;

use num_rational::BigRational;
use num_traits::Zero;

pub use interval::{Interval, IntervalSet, ROUNDED_REL_BUDGET};
pub use primitive::{Point, Primitive};

use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::measure::SetFamily;

/// Distances from `pin` to the closed box `[lo, hi]`.
pub fn box_distance_range(pin: &Point, lo: &Point, hi: &Point) -> Result<Interval> {
    pin.check_dim(lo.dim())?;
    let mut min_sq = BigRational::zero();
    let mut max_sq = BigRational::zero();
    for ((p, a), b) in pin.coords().iter().zip(lo.coords()).zip(hi.coords()) {
        let below = a - p;
        let above = p - b;
        let gap = if below > BigRational::zero() {
            below.clone()
        } else if above > BigRational::zero() {
            above.clone()
        } else {
            BigRational::zero()
        };
        min_sq += &gap * &gap;
        let far = std::cmp::max(below.clone() * &below, above.clone() * &above);
        max_sq += far;
    }
    Interval::from_squares(&min_sq, &max_sq)
}

/// Distances from `pin` to the origin-centred annulus `inner ≤ |y| ≤ outer`.
pub fn annulus_distance_range(
    pin: &Point,
    inner: &BigRational,
    outer: &BigRational,
) -> Result<Interval> {
    if pin.dim() < 2 {
        return Err(Error::DimensionTooSmall {
            found: pin.dim(),
            min: 2,
        });
    }
    let rho = ExactReal::sqrt(&pin.norm_sq());
    let a = ExactReal::from_rational(inner.clone());
    let b = ExactReal::from_rational(outer.clone());
    let lo = ExactReal::max_exact(
        ExactReal::max_exact(ExactReal::zero(), &a - &rho),
        &rho - &b,
    );
    Interval::new(lo, &rho + &b)
}

/// Distances from `pin` to the closed ball `B(center, radius)`.
pub fn ball_distance_range(pin: &Point, center: &Point, radius: &BigRational) -> Result<Interval> {
    pin.check_dim(center.dim())?;
    let rho = ExactReal::sqrt(&pin.dist_sq(center));
    let r = ExactReal::from_rational(radius.clone());
    let lo = ExactReal::max_exact(ExactReal::zero(), &rho - &r);
    Interval::new(lo, &rho + &r)
}

pub fn distance_range(pin: &Point, primitive: &Primitive) -> Result<Interval> {
    match primitive {
        Primitive::AxisBox { lo, hi } => box_distance_range(pin, lo, hi),
        Primitive::Annulus { inner, outer } => annulus_distance_range(pin, inner, outer),
        Primitive::Ball { center, radius } => ball_distance_range(pin, center, radius),
    }
}

/// `D_pin(A) = { |pin − y| : y ∈ A }` as a normalized interval union.
pub fn pinned_distance_set(pin: &Point, family: &SetFamily) -> Result<IntervalSet> {
    pin.check_dim(family.dim())?;
    let ranges = family
        .primitives()
        .iter()
        .map(|p| distance_range(pin, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalSet::normalize(ranges))
}
