use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{ratio_to_f64, ExactReal};

/// Relative error budget of the floating-point copy of an exact endpoint.
pub const ROUNDED_REL_BUDGET: f64 = 1.0 / 35_184_372_088_832.0; // 2^-45

/// Compares `x` with `r` on their rounded copies when those are clearly apart,
/// exactly otherwise.
fn cmp_rounded(x_f: f64, x: &ExactReal, r_f: f64, r: &ExactReal) -> Ordering {
    let slack = 4.0 * ROUNDED_REL_BUDGET * x_f.abs().max(r_f.abs()) + f64::MIN_POSITIVE;
    if x_f < r_f - slack {
        Ordering::Less
    } else if x_f > r_f + slack {
        Ordering::Greater
    } else {
        x.cmp_exact(r)
    }
}

/// Closed interval `[lo, hi] ⊂ [0, ∞)` with exact endpoints and their rounded copies.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: ExactReal,
    hi: ExactReal,
    lo_f: f64,
    hi_f: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }
}

impl Eq for Interval {}

impl Interval {
    pub fn new(lo: ExactReal, hi: ExactReal) -> Result<Self> {
        if lo.sign() == Some(Ordering::Less) {
            return Err(Error::InvalidInterval(format!("negative endpoint {lo}")));
        }
        if lo.cmp_exact(&hi) == Ordering::Greater {
            return Err(Error::InvalidInterval(format!("{lo} > {hi}")));
        }
        Ok(Interval::make(lo, hi))
    }

    fn make(lo: ExactReal, hi: ExactReal) -> Self {
        let lo_f = lo.to_f64();
        let hi_f = hi.to_f64();
        Interval { lo, hi, lo_f, hi_f }
    }

    pub fn from_rationals(lo: BigRational, hi: BigRational) -> Result<Self> {
        Interval::new(lo.into(), hi.into())
    }

    /// `[√lo_sq, √hi_sq]`.
    pub fn from_squares(lo_sq: &BigRational, hi_sq: &BigRational) -> Result<Self> {
        if lo_sq.is_negative() || lo_sq > hi_sq {
            return Err(Error::InvalidInterval(format!(
                "squared endpoints {lo_sq}, {hi_sq}"
            )));
        }
        Ok(Interval::make(
            ExactReal::sqrt(lo_sq),
            ExactReal::sqrt(hi_sq),
        ))
    }

    pub fn lo(&self) -> f64 {
        self.lo_f
    }

    pub fn hi(&self) -> f64 {
        self.hi_f
    }

    pub fn lo_exact(&self) -> &ExactReal {
        &self.lo
    }

    pub fn hi_exact(&self) -> &ExactReal {
        &self.hi
    }

    /// Exact square of the lower endpoint when it is rational.
    pub fn lo_sq(&self) -> Option<BigRational> {
        self.lo.square().as_rational()
    }

    pub fn hi_sq(&self) -> Option<BigRational> {
        self.hi.square().as_rational()
    }

    pub fn length(&self) -> ExactReal {
        &self.hi - &self.lo
    }

    /// `self ⊆ [lo, hi]`, decided exactly.
    pub fn is_within(&self, lo: &ExactReal, hi: &ExactReal) -> bool {
        self.lo.cmp_exact(lo) != Ordering::Less && self.hi.cmp_exact(hi) != Ordering::Greater
    }

    pub fn contains_f64(&self, x: f64, rel_tol: f64) -> bool {
        let lo = self.lo();
        let hi = self.hi();
        x >= lo - rel_tol * lo.abs() && x <= hi + rel_tol * hi.abs()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Normalized finite union of disjoint closed intervals in `[0, ∞)`.
///
/// Intervals are sorted and strictly separated; touching intervals are merged.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    pub fn normalize(raw: impl IntoIterator<Item = Interval>) -> Self {
        let mut items: Vec<Interval> = raw.into_iter().collect();
        items.sort_by(|a, b| a.lo.cmp_exact(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(items.len());
        for next in items {
            if let Some(last) = out.last_mut() {
                if next.lo.cmp_exact(&last.hi) != Ordering::Greater {
                    if next.hi.cmp_exact(&last.hi) == Ordering::Greater {
                        last.hi = next.hi;
                        last.hi_f = next.hi_f;
                    }
                    continue;
                }
            }
            out.push(next);
        }
        IntervalSet { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::normalize(self.intervals.iter().chain(&other.intervals).cloned())
    }

    /// `|S ∩ [0, r]|` in floating point.
    pub fn measure_up_to(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::NegativeRadius);
        }
        Ok(self
            .intervals
            .iter()
            .map(|iv| {
                let lo = iv.lo();
                if lo >= r {
                    0.0
                } else {
                    iv.hi().min(r) - lo
                }
            })
            .sum())
    }

    /// `|S ∩ [0, r]|` exactly.
    pub fn measure_up_to_exact(&self, r: &BigRational) -> Result<ExactReal> {
        if r.is_negative() {
            return Err(Error::NegativeRadius);
        }
        let r_f = ratio_to_f64(r);
        let r = ExactReal::from_rational(r.clone());
        let mut rational = BigRational::zero();
        let mut total = ExactReal::zero();
        for iv in &self.intervals {
            if cmp_rounded(iv.lo_f, &iv.lo, r_f, &r) != Ordering::Less {
                break;
            }
            let top = if cmp_rounded(iv.hi_f, &iv.hi, r_f, &r) == Ordering::Greater {
                &r
            } else {
                &iv.hi
            };
            match (top.as_rational(), iv.lo.as_rational()) {
                (Some(t), Some(l)) => rational += t - l,
                _ => total = &total + &(top - &iv.lo),
            }
        }
        Ok(&total + &ExactReal::from_rational(rational))
    }

    /// Total length of the set.
    pub fn total_measure_exact(&self) -> ExactReal {
        self.intervals
            .iter()
            .fold(ExactReal::zero(), |acc, iv| &acc + &iv.length())
    }

    /// Distances between consecutive intervals, `lo[k+1] − hi[k]`.
    pub fn gaps(&self) -> Vec<f64> {
        self.intervals
            .windows(2)
            .map(|w| w[1].lo() - w[0].hi())
            .collect()
    }

    pub fn gaps_exact(&self) -> Vec<ExactReal> {
        self.intervals
            .windows(2)
            .map(|w| &w[1].lo - &w[0].hi)
            .collect()
    }

    /// Index of the interval containing `x` up to a relative slack on the endpoints.
    pub fn locate_f64(&self, x: f64, rel_tol: f64) -> Option<usize> {
        let idx = self
            .intervals
            .partition_point(|iv| iv.hi() * (1.0 + rel_tol) < x);
        (idx < self.intervals.len() && self.intervals[idx].contains_f64(x, rel_tol)).then_some(idx)
    }

    /// Index of the interval that contains `sub` exactly.
    pub fn locate_interval(&self, sub: &Interval) -> Option<usize> {
        self.intervals
            .iter()
            .position(|iv| sub.is_within(&iv.lo, &iv.hi))
    }

    pub fn is_normalized(&self) -> bool {
        self.intervals
            .windows(2)
            .all(|w| w[0].hi.cmp_exact(&w[1].lo) == Ordering::Less)
            && self
                .intervals
                .first()
                .is_none_or(|iv| iv.lo.sign() != Some(Ordering::Less))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{iv}")?;
        }
        write!(f, "}}")
    }
}
