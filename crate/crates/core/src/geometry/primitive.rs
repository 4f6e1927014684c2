use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::ratio_to_f64;

/// A point of `R^d` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point(Vec<BigRational>);

impl Point {
    pub fn new(coords: Vec<BigRational>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![BigRational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn norm_sq(&self) -> BigRational {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn dist_sq(&self, other: &Point) -> BigRational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let t = a - b;
                &t * &t
            })
            .sum()
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(ratio_to_f64).collect()
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// One connected measurable piece of a set family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Primitive {
    /// Closed axis-aligned box `Π [lo_j, hi_j]`.
    AxisBox { lo: Point, hi: Point },
    /// Closed origin-centred annulus `{ inner ≤ |y| ≤ outer }`.
    Annulus {
        inner: BigRational,
        outer: BigRational,
    },
    /// Closed ball.
    Ball { center: Point, radius: BigRational },
}

impl Primitive {
    pub fn axis_box(lo: Point, hi: Point) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                found: hi.dim(),
            });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| a >= b) {
            return Err(Error::InvalidPrimitive(format!(
                "box corners {lo} and {hi} are not strictly ordered on every axis"
            )));
        }
        Ok(Primitive::AxisBox { lo, hi })
    }

    pub fn annulus(inner: BigRational, outer: BigRational) -> Result<Self> {
        if inner.is_negative() || inner >= outer {
            return Err(Error::InvalidPrimitive(format!(
                "annulus radii must satisfy 0 <= {inner} < {outer}"
            )));
        }
        Ok(Primitive::Annulus { inner, outer })
    }

    pub fn ball(center: Point, radius: BigRational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidPrimitive(format!(
                "ball radius {radius} must be positive"
            )));
        }
        Ok(Primitive::Ball { center, radius })
    }

    /// Ambient dimension, if the primitive fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Primitive::AxisBox { lo, .. } => Some(lo.dim()),
            Primitive::Annulus { .. } => None,
            Primitive::Ball { center, .. } => Some(center.dim()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Primitive::AxisBox { .. } => "box",
            Primitive::Annulus { .. } => "annulus",
            Primitive::Ball { .. } => "ball",
        }
    }

    /// Exact closed-set membership.
    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Primitive::AxisBox { lo, hi } => p
                .coords()
                .iter()
                .zip(lo.coords().iter().zip(hi.coords()))
                .all(|(x, (a, b))| a <= x && x <= b),
            Primitive::Annulus { inner, outer } => {
                let r2 = p.norm_sq();
                inner * inner <= r2 && r2 <= outer * outer
            }
            Primitive::Ball { center, radius } => p.dist_sq(center) <= radius * radius,
        }
    }

    /// Translate by `v`. Annuli stay origin-centred, so only the zero shift is allowed.
    pub fn translate(&self, v: &Point) -> Result<Primitive> {
        match self {
            Primitive::AxisBox { lo, hi } => {
                lo.check_dim(v.dim())?;
                Ok(Primitive::AxisBox {
                    lo: lo.add(v),
                    hi: hi.add(v),
                })
            }
            Primitive::Annulus { .. } => {
                if v.is_origin() {
                    Ok(self.clone())
                } else {
                    Err(Error::TranslationUnsupported)
                }
            }
            Primitive::Ball { center, radius } => {
                center.check_dim(v.dim())?;
                Ok(Primitive::Ball {
                    center: center.add(v),
                    radius: radius.clone(),
                })
            }
        }
    }

    /// Multiply every coordinate and radius by `factor > 0`.
    pub fn dilate(&self, factor: &BigRational) -> Primitive {
        let scale = |p: &Point| Point::new(p.coords().iter().map(|c| c * factor).collect());
        match self {
            Primitive::AxisBox { lo, hi } => Primitive::AxisBox {
                lo: scale(lo),
                hi: scale(hi),
            },
            Primitive::Annulus { inner, outer } => Primitive::Annulus {
                inner: inner * factor,
                outer: outer * factor,
            },
            Primitive::Ball { center, radius } => Primitive::Ball {
                center: scale(center),
                radius: radius * factor,
            },
        }
    }

    /// Exact disjointness test, available for box/box and annulus/annulus pairs.
    /// Closed primitives that only touch on a null set count as disjoint.
    pub fn disjoint_from(&self, other: &Primitive) -> Option<bool> {
        match (self, other) {
            (Primitive::AxisBox { lo: l1, hi: h1 }, Primitive::AxisBox { lo: l2, hi: h2 }) => {
                let separated = (0..l1.dim())
                    .any(|j| h1.coords()[j] <= l2.coords()[j] || h2.coords()[j] <= l1.coords()[j]);
                Some(separated)
            }
            (
                Primitive::Annulus {
                    inner: a1,
                    outer: b1,
                },
                Primitive::Annulus {
                    inner: a2,
                    outer: b2,
                },
            ) => Some(b1 <= a2 || b2 <= a1),
            _ => None,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::AxisBox { lo, hi } => write!(f, "box[{lo} .. {hi}]"),
            Primitive::Annulus { inner, outer } => write!(f, "annulus[{inner}, {outer}]"),
            Primitive::Ball { center, radius } => write!(f, "ball({center}, {radius})"),
        }
    }
}
