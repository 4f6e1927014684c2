//! Seeded generators of small random families for property runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::index::sample;
use rand::Rng;

use crate::exact::int;
use crate::geometry::{Point, Primitive};
use crate::measure::SetFamily;

fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Sorted distinct integers from `1..=range`.
fn sorted_endpoints<R: Rng>(rng: &mut R, range: usize, count: usize) -> Vec<i64> {
    let mut v: Vec<i64> = sample(rng, range, count)
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    v.sort_unstable();
    v
}

/// Up to `max_count` disjoint origin annuli with rational radii in `(0, 1000]`.
pub fn disjoint_annuli<R: Rng>(rng: &mut R, d: usize, max_count: usize) -> SetFamily {
    let count = rng.random_range(1..=max_count.max(1));
    let den = rng.random_range(1..=8i64);
    let ends = sorted_endpoints(rng, 1000 * den as usize, 2 * count);
    let prims = ends
        .chunks(2)
        .map(|c| Primitive::annulus(frac(c[0], den), frac(c[1], den)).expect("ordered endpoints"))
        .collect();
    SetFamily::new(d, prims, "random annuli").expect("sorted endpoints are disjoint")
}

/// Up to `max_count` disjoint boxes strung along the first axis.
pub fn disjoint_boxes<R: Rng>(rng: &mut R, d: usize, max_count: usize) -> SetFamily {
    let count = rng.random_range(1..=max_count.max(1));
    let ends = sorted_endpoints(rng, 200, 2 * count);
    let prims = ends
        .chunks(2)
        .map(|c| {
            let mut lo = vec![int(0); d];
            let mut hi = Vec::with_capacity(d);
            lo[0] = frac(c[0] - 100, 4);
            hi.push(frac(c[1] - 100, 4));
            for l in lo.iter_mut().skip(1) {
                let a = rng.random_range(-60..60i64);
                let w = rng.random_range(1..=60i64);
                *l = frac(a, 4);
                hi.push(frac(a + w, 4));
            }
            Primitive::axis_box(Point::new(lo), Point::new(hi)).expect("positive sides")
        })
        .collect();
    SetFamily::new(d, prims, "random boxes").expect("first-axis projections are disjoint")
}

/// A single ball with a random centre.
pub fn single_ball<R: Rng>(rng: &mut R, d: usize) -> SetFamily {
    let center = Point::new(
        (0..d)
            .map(|_| frac(rng.random_range(-40..=40i64), 4))
            .collect(),
    );
    let radius = frac(rng.random_range(1..=40i64), 4);
    let ball = Primitive::ball(center, radius).expect("positive radius");
    SetFamily::new(d, vec![ball], "random ball").expect("single primitive")
}

/// `count` distinct positive rational radii in `(0, max]`, sorted.
pub fn radii<R: Rng>(rng: &mut R, max: &BigRational, count: usize) -> Vec<BigRational> {
    let den = 64i64;
    let top = (max * int(den)).ceil().to_integer();
    let top: usize = top.try_into().unwrap_or(usize::MAX / 2).max(count);
    sorted_endpoints(rng, top, count)
        .into_iter()
        .map(|k| frac(k, den))
        .collect()
}

/// Largest radius reached by any primitive, as a rational upper bound.
pub fn outer_extent(family: &SetFamily) -> BigRational {
    family
        .primitives()
        .iter()
        .map(|p| match p {
            Primitive::Annulus { outer, .. } => outer.clone(),
            Primitive::AxisBox { lo, hi } => {
                let sq: BigRational = lo
                    .coords()
                    .iter()
                    .zip(hi.coords())
                    .map(|(a, b)| {
                        let m = if a.abs() > b.abs() { a.abs() } else { b.abs() };
                        &m * &m
                    })
                    .sum();
                BigRational::from_integer(sq.ceil().to_integer().sqrt()) + int(1)
            }
            Primitive::Ball { center, radius } => {
                let c = BigRational::from_integer(center.norm_sq().ceil().to_integer().sqrt());
                c + int(1) + radius
            }
        })
        .fold(int(1), |a, b| if b > a { b } else { a })
}
