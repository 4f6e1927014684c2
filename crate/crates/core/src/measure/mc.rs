//! Monte Carlo oracle for volumes and pinned distances.
//!
//! Work is split into fixed-size chunks; chunk `k` draws from the ChaCha8
//! stream `k` of the seeded generator. Results depend on
//! `(seed, samples, chunk_size)` only, never on the number of rayon workers.

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::ratio_to_f64;
use crate::geometry::{Point, Primitive};
use crate::measure::{unit_ball_volume, SetFamily};

pub const DEFAULT_CHUNK: u64 = 4096;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `hits` successes out of `n` trials.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Floating-point mirror of a primitive for fast membership tests.
#[derive(Clone, Debug)]
enum FastPrimitive {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Annulus { inner: f64, outer: f64 },
    Ball { center: Vec<f64>, radius: f64 },
}

impl FastPrimitive {
    fn new(p: &Primitive) -> Self {
        match p {
            Primitive::AxisBox { lo, hi } => FastPrimitive::Box {
                lo: lo.to_f64(),
                hi: hi.to_f64(),
            },
            Primitive::Annulus { inner, outer } => FastPrimitive::Annulus {
                inner: ratio_to_f64(inner),
                outer: ratio_to_f64(outer),
            },
            Primitive::Ball { center, radius } => FastPrimitive::Ball {
                center: center.to_f64(),
                radius: ratio_to_f64(radius),
            },
        }
    }

    fn contains(&self, y: &[f64]) -> bool {
        match self {
            FastPrimitive::Box { lo, hi } => y
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (a, b))| a <= x && x <= b),
            FastPrimitive::Annulus { inner, outer } => {
                let r = norm(y);
                *inner <= r && r <= *outer
            }
            FastPrimitive::Ball { center, radius } => dist(y, center) <= *radius,
        }
    }

    /// Natural log of the volume in `R^d`.
    fn ln_volume(&self, d: usize, ln_omega: f64) -> f64 {
        match self {
            FastPrimitive::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| (b - a).ln()).sum(),
            FastPrimitive::Annulus { inner, outer } => {
                let q = (inner / outer).powi(d as i32);
                ln_omega + d as f64 * outer.ln() + (-q).ln_1p()
            }
            FastPrimitive::Ball { radius, .. } => ln_omega + d as f64 * radius.ln(),
        }
    }

    fn sample<R: Rng>(&self, d: usize, rng: &mut R, out: &mut [f64]) {
        match self {
            FastPrimitive::Box { lo, hi } => {
                for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
                    *o = a + (b - a) * rng.random::<f64>();
                }
            }
            FastPrimitive::Annulus { inner, outer } => {
                let r = shell_radius(*inner, *outer, d, rng);
                unit_direction(rng, out);
                out.iter_mut().for_each(|x| *x *= r);
            }
            FastPrimitive::Ball { center, radius } => {
                let r = shell_radius(0.0, *radius, d, rng);
                unit_direction(rng, out);
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + *o * r;
                }
            }
        }
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Gaussian-normalization direction on the unit sphere.
fn unit_direction<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n = norm(out);
        if n > 0.0 {
            out.iter_mut().for_each(|x| *x /= n);
            return;
        }
    }
}

/// Radius with density `∝ r^{d-1}` on `[inner, outer]`, scaled to avoid overflow.
fn shell_radius<R: Rng>(inner: f64, outer: f64, d: usize, rng: &mut R) -> f64 {
    let q = (inner / outer).powi(d as i32);
    let u: f64 = rng.random();
    outer * (q + u * (1.0 - q)).powf(1.0 / d as f64)
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_sizes(samples: u64, chunk: u64) -> Vec<(u64, u64)> {
    let chunk = chunk.max(1);
    (0..samples.div_ceil(chunk))
        .map(|k| (k, chunk.min(samples - k * chunk)))
        .collect()
}

/// Estimate of `|A ∩ B(center, R)|` with a 99% Wilson interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub volume: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub hits: u64,
    pub samples: u64,
    pub ball_volume: f64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl McEstimate {
    pub fn hit_fraction(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    pub fn contains(&self, v: f64) -> bool {
        self.ci_low <= v && v <= self.ci_high
    }

    pub fn intersects(&self, low: f64, high: f64) -> bool {
        self.ci_low <= high && low <= self.ci_high
    }
}

/// `|A ∩ B(0, R)|` by uniform sampling in the ball.
pub fn mc_volume(family: &SetFamily, r: &BigRational, samples: u64, seed: u64) -> McEstimate {
    mc_volume_centered(
        family,
        &Point::origin(family.dim()),
        r,
        samples,
        seed,
        DEFAULT_CHUNK,
    )
}

pub fn mc_volume_centered(
    family: &SetFamily,
    center: &Point,
    r: &BigRational,
    samples: u64,
    seed: u64,
    chunk: u64,
) -> McEstimate {
    let d = family.dim();
    let prims: Vec<FastPrimitive> = family.primitives().iter().map(FastPrimitive::new).collect();
    let c = center.to_f64();
    let radius = ratio_to_f64(r);
    let hits: u64 = chunk_sizes(samples, chunk)
        .into_par_iter()
        .map(|(k, n)| {
            let mut rng = chunk_rng(seed, k);
            let mut y = vec![0.0; d];
            let mut count = 0u64;
            for _ in 0..n {
                let rad = shell_radius(0.0, radius, d, &mut rng);
                unit_direction(&mut rng, &mut y);
                for (yi, ci) in y.iter_mut().zip(&c) {
                    *yi = ci + *yi * rad;
                }
                if prims.iter().any(|p| p.contains(&y)) {
                    count += 1;
                }
            }
            count
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let ball_volume = unit_ball_volume(d).unwrap_or(f64::NAN) * radius.powi(d as i32);
    let (lo, hi) = wilson_interval(hits, samples, Z_99);
    McEstimate {
        volume: ball_volume * hits as f64 / samples.max(1) as f64,
        ci_low: ball_volume * lo,
        ci_high: ball_volume * hi,
        hits,
        samples,
        ball_volume,
        seed,
        chunk_size: chunk,
    }
}

/// Estimate of `|A ∩ B(x,R)| − |A ∩ B(0,R)|`, sampled in the shell
/// `R − |x| ≤ |y| ≤ R + |x|` that contains the symmetric difference of the balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McDifference {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub gained: u64,
    pub lost: u64,
    pub samples: u64,
    pub shell_volume: f64,
    pub seed: u64,
}

impl McDifference {
    /// Largest absolute difference compatible with the interval.
    pub fn abs_upper(&self) -> f64 {
        self.ci_low.abs().max(self.ci_high.abs())
    }

    /// Smallest absolute difference compatible with the interval.
    pub fn abs_lower(&self) -> f64 {
        if self.ci_low <= 0.0 && self.ci_high >= 0.0 {
            0.0
        } else {
            self.ci_low.abs().min(self.ci_high.abs())
        }
    }
}

pub fn mc_shift_difference(
    family: &SetFamily,
    x: &Point,
    r: &BigRational,
    samples: u64,
    seed: u64,
) -> McDifference {
    let d = family.dim();
    let prims: Vec<FastPrimitive> = family.primitives().iter().map(FastPrimitive::new).collect();
    let xf = x.to_f64();
    let shift = norm(&xf);
    let radius = ratio_to_f64(r);
    let outer = (radius + shift) * (1.0 + 1e-12);
    let inner = ((radius - shift) * (1.0 - 1e-12)).max(0.0);
    let counts: Vec<(u64, u64)> = chunk_sizes(samples, DEFAULT_CHUNK)
        .into_par_iter()
        .map(|(k, n)| {
            let mut rng = chunk_rng(seed, k);
            let mut y = vec![0.0; d];
            let (mut gained, mut lost) = (0u64, 0u64);
            for _ in 0..n {
                let rad = shell_radius(inner, outer, d, &mut rng);
                unit_direction(&mut rng, &mut y);
                y.iter_mut().for_each(|v| *v *= rad);
                if !prims.iter().any(|p| p.contains(&y)) {
                    continue;
                }
                let in_shifted = dist(&y, &xf) <= radius;
                let in_origin = norm(&y) <= radius;
                if in_shifted && !in_origin {
                    gained += 1;
                } else if in_origin && !in_shifted {
                    lost += 1;
                }
            }
            (gained, lost)
        })
        .collect();
    let gained: u64 = counts.iter().map(|c| c.0).sum();
    let lost: u64 = counts.iter().map(|c| c.1).sum();
    let omega = unit_ball_volume(d).unwrap_or(f64::NAN);
    let q = (inner / outer).powi(d as i32);
    let shell_volume = omega * outer.powi(d as i32) * (1.0 - q);
    let n = samples.max(1) as f64;
    let (g_lo, g_hi) = wilson_interval(gained, samples, Z_99);
    let (l_lo, l_hi) = wilson_interval(lost, samples, Z_99);
    McDifference {
        estimate: shell_volume * (gained as f64 - lost as f64) / n,
        ci_low: shell_volume * (g_lo - l_hi),
        ci_high: shell_volume * (g_hi - l_lo),
        gained,
        lost,
        samples,
        shell_volume,
        seed,
    }
}

/// Distances `|pin − y|` for `y` drawn uniformly from `A` (primitives weighted by volume).
pub fn mc_pinned_distances(pin: &Point, family: &SetFamily, samples: u64, seed: u64) -> Vec<f64> {
    if family.is_empty() {
        return Vec::new();
    }
    let d = family.dim();
    let prims: Vec<FastPrimitive> = family.primitives().iter().map(FastPrimitive::new).collect();
    let cumulative = volume_cdf(&prims, d);
    let p = pin.to_f64();
    chunk_sizes(samples, DEFAULT_CHUNK)
        .into_par_iter()
        .map(|(k, n)| {
            let mut rng = chunk_rng(seed, k);
            let mut y = vec![0.0; d];
            let mut out = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let u: f64 = rng.random();
                let idx = cumulative.partition_point(|&c| c < u).min(prims.len() - 1);
                prims[idx].sample(d, &mut rng, &mut y);
                out.push(dist(&p, &y));
            }
            out
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Volume shares of the primitives of a family, computed in log space.
pub fn volume_shares(family: &SetFamily) -> Vec<f64> {
    let prims: Vec<FastPrimitive> = family.primitives().iter().map(FastPrimitive::new).collect();
    shares(&prims, family.dim())
}

fn shares(prims: &[FastPrimitive], d: usize) -> Vec<f64> {
    let ln_omega = unit_ball_volume(d).unwrap_or(1.0).ln();
    let logs: Vec<f64> = prims.iter().map(|p| p.ln_volume(d, ln_omega)).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn volume_cdf(prims: &[FastPrimitive], d: usize) -> Vec<f64> {
    let mut acc = 0.0;
    shares(prims, d)
        .into_iter()
        .map(|s| {
            acc += s;
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    #[test]
    fn wilson_bounds_are_ordered() {
        let (lo, hi) = wilson_interval(0, 100, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.1);
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!(lo < 0.5 && 0.5 < hi);
    }

    #[test]
    fn ball_is_fully_hit() {
        let fam = SetFamily::new(
            2,
            vec![Primitive::ball(Point::origin(2), int(3)).unwrap()],
            "b",
        )
        .unwrap();
        let est = mc_volume(&fam, &int(3), 10_000, 1);
        assert_eq!(est.hits, 10_000);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let fam =
            SetFamily::new(2, vec![Primitive::annulus(int(1), int(2)).unwrap()], "a").unwrap();
        let a = mc_volume(&fam, &int(2), 50_000, 9);
        let b = mc_volume(&fam, &int(2), 50_000, 9);
        assert_eq!(a, b);
        let c = mc_volume(&fam, &int(2), 50_000, 10);
        assert_ne!(a.hits, c.hits);
    }

    #[test]
    fn shell_sampler_stays_in_shell() {
        let mut rng = chunk_rng(3, 0);
        for _ in 0..1000 {
            let r = shell_radius(1e60, 1.01e60, 3, &mut rng);
            assert!((1e60..=1.01e60).contains(&r));
        }
    }

    #[test]
    fn pinned_samples_respect_primitives() {
        let fam =
            SetFamily::new(2, vec![Primitive::annulus(rat(1, 2), int(1)).unwrap()], "a").unwrap();
        let d = mc_pinned_distances(&Point::origin(2), &fam, 5000, 4);
        assert_eq!(d.len(), 5000);
        assert!(d.iter().all(|&x| (0.5 - 1e-12..=1.0 + 1e-12).contains(&x)));
        assert!(mc_pinned_distances(&Point::origin(2), &SetFamily::empty(2), 10, 1).is_empty());
    }
}
