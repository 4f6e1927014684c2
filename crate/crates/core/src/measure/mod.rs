//! Volumes, ball-intersection measures and density profiles.
//!
//! Volumes are kept as [`ExactReal`] values, so the `π` factor of a ball volume
//! stays symbolic and cancels wherever two round quantities are compared. Box
//! pieces that straddle a sphere are bracketed; tight values for those come
//! from the Monte Carlo oracle in [`mc`].

mod family;
pub mod mc;

use std::cmp::Ordering;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use family::SetFamily;

use crate::error::{Error, Result};
use crate::exact::{int, rat_pow, ExactReal};
use crate::geometry::{IntervalSet, Point, Primitive};

/// `ω_d`, the volume of the unit ball, as `q · π^⌊d/2⌋`.
pub fn unit_ball_volume_exact(d: usize) -> Result<ExactReal> {
    if d < 1 {
        return Err(Error::DimensionTooSmall { found: d, min: 1 });
    }
    let k = d / 2;
    let mut q = BigRational::one();
    if d.is_multiple_of(2) {
        // π^k / k!
        for j in 1..=k {
            q /= int(j as i64);
        }
    } else {
        // 2^(k+1) π^k / d!!
        q = BigRational::from_integer(BigInt::one() << (k + 1));
        let mut j = d as i64;
        while j > 1 {
            q /= int(j);
            j -= 2;
        }
    }
    Ok(ExactReal::pi_multiple(q, k as u32))
}

pub fn unit_ball_volume(d: usize) -> Result<f64> {
    Ok(unit_ball_volume_exact(d)?.to_f64())
}

/// `|S^{d-1}| = d · ω_d`.
pub fn sphere_area_exact(d: usize) -> Result<ExactReal> {
    Ok(unit_ball_volume_exact(d)?.scale(&int(d as i64)))
}

pub fn sphere_area(d: usize) -> Result<f64> {
    Ok(sphere_area_exact(d)?.to_f64())
}

fn box_volume(lo: &Point, hi: &Point) -> BigRational {
    lo.coords()
        .iter()
        .zip(hi.coords())
        .map(|(a, b)| b - a)
        .product()
}

/// Volume of a primitive living in `R^d`.
pub fn primitive_volume_exact(p: &Primitive, d: usize) -> Result<ExactReal> {
    let omega = unit_ball_volume_exact(d)?;
    Ok(match p {
        Primitive::AxisBox { lo, hi } => ExactReal::from_rational(box_volume(lo, hi)),
        Primitive::Annulus { inner, outer } => {
            omega.scale(&(rat_pow(outer, d as u32) - rat_pow(inner, d as u32)))
        }
        Primitive::Ball { radius, .. } => omega.scale(&rat_pow(radius, d as u32)),
    })
}

pub fn primitive_volume(p: &Primitive, d: usize) -> Result<f64> {
    Ok(primitive_volume_exact(p, d)?.to_f64())
}

/// Certified enclosure of `|P ∩ B(0, R)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeBracket {
    pub low: ExactReal,
    pub high: ExactReal,
    pub exact: bool,
}

impl VolumeBracket {
    fn exact(v: ExactReal) -> Self {
        VolumeBracket {
            low: v.clone(),
            high: v,
            exact: true,
        }
    }

    fn zero() -> Self {
        VolumeBracket::exact(ExactReal::zero())
    }
}

fn clamp_to(q: &BigRational, r: &BigRational) -> BigRational {
    if q > r {
        r.clone()
    } else {
        q.clone()
    }
}

/// Volume of `box ∩ [-s, s]^d`.
fn box_cube_overlap(lo: &Point, hi: &Point, s: &BigRational) -> BigRational {
    let mut vol = BigRational::one();
    for (a, b) in lo.coords().iter().zip(hi.coords()) {
        let top = clamp_to(b, s);
        let neg = -s;
        let bottom = if a < &neg { neg } else { a.clone() };
        if top <= bottom {
            return BigRational::zero();
        }
        vol *= top - bottom;
    }
    vol
}

/// `|P ∩ B(0, R)|` for a primitive in `R^d`.
///
/// Annuli and origin-centred balls are exact. Boxes are exact when they lie
/// entirely inside or outside the ball (decided on squared distances);
/// otherwise the result brackets the true value between the part inside the
/// inscribed cube and the part inside the circumscribed cube.
pub fn ball_intersection_volume(p: &Primitive, r: &BigRational, d: usize) -> Result<VolumeBracket> {
    if !r.is_positive() {
        return Err(Error::NegativeRadius);
    }
    let omega = unit_ball_volume_exact(d)?;
    let r_sq = r * r;
    Ok(match p {
        Primitive::Annulus { inner, outer } => {
            let b = clamp_to(outer, r);
            let a = clamp_to(inner, r);
            VolumeBracket::exact(omega.scale(&(rat_pow(&b, d as u32) - rat_pow(&a, d as u32))))
        }
        Primitive::AxisBox { lo, hi } => {
            let range = crate::geometry::box_distance_range(&Point::origin(d), lo, hi)?;
            let near = range.lo_sq().expect("box distances have rational squares");
            let far = range.hi_sq().expect("box distances have rational squares");
            if near >= r_sq {
                VolumeBracket::zero()
            } else if far <= r_sq {
                VolumeBracket::exact(ExactReal::from_rational(box_volume(lo, hi)))
            } else {
                // Inscribed cube half-side: a rational lower bound of R/√d.
                let inv_sqrt_d = ExactReal::sqrt(&BigRational::new(BigInt::one(), BigInt::from(d)));
                let half = inv_sqrt_d.enclose(48).lo * r;
                let low = box_cube_overlap(lo, hi, &half);
                let high = box_cube_overlap(lo, hi, r);
                VolumeBracket {
                    low: ExactReal::from_rational(low),
                    high: ExactReal::from_rational(high),
                    exact: false,
                }
            }
        }
        Primitive::Ball { center, radius } => {
            let rho_sq = center.norm_sq();
            if rho_sq.is_zero() {
                VolumeBracket::exact(omega.scale(&rat_pow(&clamp_to(radius, r), d as u32)))
            } else if r >= radius && rho_sq <= (r - radius) * (r - radius) {
                VolumeBracket::exact(omega.scale(&rat_pow(radius, d as u32)))
            } else if rho_sq >= (r + radius) * (r + radius) {
                VolumeBracket::zero()
            } else {
                // B(0, min(R, r − |c|)) sits inside both balls when |c| < r.
                let rho_hi = ExactReal::sqrt(&rho_sq).enclose(48).hi;
                let inner = radius - rho_hi;
                let low = if inner.is_positive() {
                    omega.scale(&rat_pow(&clamp_to(&inner, r), d as u32))
                } else {
                    ExactReal::zero()
                };
                VolumeBracket {
                    low,
                    high: omega.scale(&rat_pow(&clamp_to(radius, r), d as u32)),
                    exact: false,
                }
            }
        }
    })
}

/// How a number in a report or profile was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Bracketed,
    MonteCarlo,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Bracketed => "bracketed",
            Mode::MonteCarlo => "monte_carlo",
        }
    }

    /// The weaker of two modes.
    pub fn join(self, other: Mode) -> Mode {
        use Mode::*;
        match (self, other) {
            (MonteCarlo, _) | (_, MonteCarlo) => MonteCarlo,
            (Bracketed, _) | (_, Bracketed) => Bracketed,
            _ => Exact,
        }
    }
}

/// Strictly increasing sequence of positive radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiusSchedule {
    radii: Vec<BigRational>,
}

impl RadiusSchedule {
    pub fn new(radii: Vec<BigRational>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidSchedule("empty schedule".into()));
        }
        if !radii[0].is_positive() {
            return Err(Error::InvalidSchedule(format!(
                "radius {} is not positive",
                radii[0]
            )));
        }
        if let Some(w) = radii.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule(format!(
                "radii {} and {} are not strictly increasing",
                w[0], w[1]
            )));
        }
        Ok(RadiusSchedule { radii })
    }

    /// `r0 · g^i` for `i = 0..n`.
    pub fn geometric(r0: BigRational, g: BigRational, n: usize) -> Result<Self> {
        if g <= BigRational::one() {
            return Err(Error::InvalidSchedule(format!("ratio {g} must exceed 1")));
        }
        let mut radii = Vec::with_capacity(n);
        let mut r = r0;
        for _ in 0..n {
            radii.push(r.clone());
            r *= &g;
        }
        RadiusSchedule::new(radii)
    }

    pub fn radii(&self) -> &[BigRational] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn scale(&self, factor: &BigRational) -> RadiusSchedule {
        RadiusSchedule {
            radii: self.radii.iter().map(|r| r * factor).collect(),
        }
    }
}

/// Enclosure of `|A ∩ B(0,R)|` and of the density ratio at one radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityEstimate {
    pub radius: BigRational,
    pub measure_low: ExactReal,
    pub measure_high: ExactReal,
    pub ratio_low: ExactReal,
    pub ratio_high: ExactReal,
    pub mode: Mode,
}

impl DensityEstimate {
    fn new(
        radius: BigRational,
        low: ExactReal,
        high: ExactReal,
        denom: &BigRational,
        mode: Mode,
    ) -> Self {
        let inv = BigRational::one() / denom;
        DensityEstimate {
            ratio_low: low.scale(&inv),
            ratio_high: high.scale(&inv),
            measure_low: low,
            measure_high: high,
            radius,
            mode,
        }
    }

    pub fn radius_f64(&self) -> f64 {
        crate::exact::ratio_to_f64(&self.radius)
    }
}

/// Sum of per-primitive brackets of `|A ∩ B(0,R)|`.
pub fn family_ball_measure(family: &SetFamily, r: &BigRational) -> Result<VolumeBracket> {
    if !r.is_positive() {
        return Err(Error::NegativeRadius);
    }
    let d = family.dim() as u32;
    // Annuli are summed as one rational multiple of ω_d.
    let mut round = BigRational::zero();
    let mut low = ExactReal::zero();
    let mut high = ExactReal::zero();
    let mut exact = true;
    for p in family.primitives() {
        if let Primitive::Annulus { inner, outer } = p {
            if inner < r {
                round += rat_pow(&clamp_to(outer, r), d) - rat_pow(inner, d);
            }
            continue;
        }
        let b = ball_intersection_volume(p, r, family.dim())?;
        low = &low + &b.low;
        high = &high + &b.high;
        exact &= b.exact;
    }
    if !round.is_zero() {
        let annuli = unit_ball_volume_exact(family.dim())?.scale(&round);
        low = &low + &annuli;
        high = &high + &annuli;
    }
    Ok(VolumeBracket { low, high, exact })
}

/// `|A ∩ B(0,R)| / R^d` along a schedule.
pub fn density_profile(
    family: &SetFamily,
    schedule: &RadiusSchedule,
) -> Result<Vec<DensityEstimate>> {
    schedule
        .radii()
        .iter()
        .map(|r| {
            let b = family_ball_measure(family, r)?;
            let mode = if b.exact {
                Mode::Exact
            } else {
                Mode::Bracketed
            };
            let denom = rat_pow(r, family.dim() as u32);
            Ok(DensityEstimate::new(r.clone(), b.low, b.high, &denom, mode))
        })
        .collect()
}

/// `|D ∩ [0,R]| / R` along a schedule.
pub fn pinned_density_profile(
    set: &IntervalSet,
    schedule: &RadiusSchedule,
) -> Result<Vec<DensityEstimate>> {
    schedule
        .radii()
        .iter()
        .map(|r| {
            let m = set.measure_up_to_exact(r)?;
            Ok(DensityEstimate::new(
                r.clone(),
                m.clone(),
                m,
                r,
                Mode::Exact,
            ))
        })
        .collect()
}

/// Largest certified lower ratio over a profile; lower-bounds the limsup along
/// the schedule, not the limsup itself.
pub fn max_ratio_low(profile: &[DensityEstimate]) -> Option<&DensityEstimate> {
    profile
        .iter()
        .fold(None, |best: Option<&DensityEstimate>, e| match best {
            Some(b) if b.ratio_low.cmp_exact(&e.ratio_low) != Ordering::Less => Some(b),
            _ => Some(e),
        })
}

pub fn max_ratio_high(profile: &[DensityEstimate]) -> Option<&DensityEstimate> {
    profile
        .iter()
        .fold(None, |best: Option<&DensityEstimate>, e| match best {
            Some(b) if b.ratio_high.cmp_exact(&e.ratio_high) != Ordering::Less => Some(b),
            _ => Some(e),
        })
}

#[derive(Serialize)]
struct CsvRow {
    radius: f64,
    measure_low: f64,
    measure_high: f64,
    ratio_low: f64,
    ratio_high: f64,
    mode: &'static str,
    schema_version: u32,
}

pub const PROFILE_SCHEMA_VERSION: u32 = 1;

/// Writes `radius,measure_low,measure_high,ratio_low,ratio_high,mode,schema_version`.
pub fn write_profile_csv<W: Write>(profile: &[DensityEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in profile {
        w.serialize(CsvRow {
            radius: e.radius_f64(),
            measure_low: e.measure_low.to_f64(),
            measure_high: e.measure_high.to_f64(),
            ratio_low: e.ratio_low.to_f64(),
            ratio_high: e.ratio_high.to_f64(),
            mode: e.mode.as_str(),
            schema_version: PROFILE_SCHEMA_VERSION,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[derive(Serialize)]
struct PinnedCsvRow<'a> {
    pin: &'a str,
    radius: f64,
    measure: f64,
    ratio: f64,
    mode: &'static str,
    schema_version: u32,
}

/// Writes `pin,radius,measure,ratio,mode,schema_version` for several pinned
/// profiles; pinned profiles are exact, so one column per quantity suffices.
pub fn write_pinned_profiles_csv<W: Write>(
    profiles: &[(Point, Vec<DensityEstimate>)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (pin, profile) in profiles {
        let label = pin.to_string();
        for e in profile {
            w.serialize(PinnedCsvRow {
                pin: &label,
                radius: e.radius_f64(),
                measure: e.measure_low.to_f64(),
                ratio: e.ratio_low.to_f64(),
                mode: e.mode.as_str(),
                schema_version: PROFILE_SCHEMA_VERSION,
            })
            .map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use std::f64::consts::PI;

    fn pt(c: &[i64]) -> Point {
        Point::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn sphere_constants() {
        assert!((unit_ball_volume(2).unwrap() - PI).abs() < 1e-14);
        assert!((sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((unit_ball_volume(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!(unit_ball_volume(0).is_err());
        for d in 2..=6 {
            let lhs = sphere_area_exact(d).unwrap();
            let rhs = unit_ball_volume_exact(d).unwrap().scale(&int(d as i64));
            assert_eq!(lhs, rhs);
        }
        // ω_5 = 8π²/15, ω_6 = π³/6
        assert!((unit_ball_volume(5).unwrap() - 8.0 * PI * PI / 15.0).abs() < 1e-13);
        assert!((unit_ball_volume(6).unwrap() - PI.powi(3) / 6.0).abs() < 1e-13);
    }

    #[test]
    fn primitive_volumes() {
        let b = Primitive::axis_box(pt(&[0, 0, 0]), pt(&[3, 3, 3])).unwrap();
        assert_eq!(
            primitive_volume_exact(&b, 3).unwrap().as_rational(),
            Some(int(27))
        );
        let a = Primitive::annulus(int(100), int(101)).unwrap();
        let expect = PI * 100.0 * 100.0 * (1.01f64 * 1.01 - 1.0);
        assert!((primitive_volume(&a, 2).unwrap() / expect - 1.0).abs() < 1e-12);
        let ball = Primitive::ball(pt(&[0, 0, 0]), int(1)).unwrap();
        assert!((primitive_volume(&ball, 3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn annulus_intersection_is_clamped() {
        let a = Primitive::annulus(int(1), int(2)).unwrap();
        let v = ball_intersection_volume(&a, &rat(3, 2), 2).unwrap();
        assert!(v.exact);
        assert_eq!(v.low, ExactReal::pi_multiple(rat(5, 4), 1));
    }

    #[test]
    fn straddling_box_is_bracketed() {
        let b = Primitive::axis_box(pt(&[0, 0]), pt(&[2, 2])).unwrap();
        let v = ball_intersection_volume(&b, &int(2), 2).unwrap();
        assert!(!v.exact);
        assert!(v.low.cmp_exact(&v.high) == Ordering::Less);
        // true value: quarter disc π ≈ 3.14159
        assert!(v.low.to_f64() <= PI && PI <= v.high.to_f64());
        let inside = ball_intersection_volume(&b, &int(3), 2).unwrap();
        assert!(inside.exact && inside.low.as_rational() == Some(int(4)));
        let far = Primitive::axis_box(pt(&[5, 5]), pt(&[6, 6])).unwrap();
        assert!(ball_intersection_volume(&far, &int(7), 2)
            .unwrap()
            .low
            .is_zero());
    }

    #[test]
    fn off_centre_ball_cases() {
        let b = Primitive::ball(pt(&[3, 0]), int(1)).unwrap();
        let inside = ball_intersection_volume(&b, &int(4), 2).unwrap();
        assert!(inside.exact);
        assert_eq!(inside.low, ExactReal::pi_multiple(int(1), 1));
        assert!(ball_intersection_volume(&b, &int(2), 2)
            .unwrap()
            .low
            .is_zero());
        let partial = ball_intersection_volume(&b, &int(3), 2).unwrap();
        assert!(!partial.exact);
    }

    #[test]
    fn schedules() {
        let g = RadiusSchedule::geometric(int(1), int(2), 5).unwrap();
        assert_eq!(g.radii(), &[int(1), int(2), int(4), int(8), int(16)]);
        assert!(RadiusSchedule::new(vec![]).is_err());
        assert!(RadiusSchedule::new(vec![int(2), int(2)]).is_err());
        assert!(RadiusSchedule::new(vec![int(0), int(2)]).is_err());
    }

    #[test]
    fn empty_family_profile_is_zero() {
        let s = RadiusSchedule::geometric(int(1), int(2), 4).unwrap();
        let p = density_profile(&SetFamily::empty(2), &s).unwrap();
        assert!(p
            .iter()
            .all(|e| e.ratio_high.is_zero() && e.mode == Mode::Exact));
        let q = pinned_density_profile(&IntervalSet::empty(), &s).unwrap();
        assert!(q.iter().all(|e| e.ratio_low.is_zero()));
    }

    #[test]
    fn full_interval_has_ratio_one() {
        let set =
            IntervalSet::normalize([
                crate::geometry::Interval::from_rationals(int(0), int(7)).unwrap()
            ]);
        let s = RadiusSchedule::new(vec![int(7)]).unwrap();
        let p = pinned_density_profile(&set, &s).unwrap();
        assert_eq!(p[0].ratio_low.as_rational(), Some(int(1)));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let s = RadiusSchedule::new(vec![int(2), int(4)]).unwrap();
        let fam =
            SetFamily::new(2, vec![Primitive::annulus(int(1), int(3)).unwrap()], "t").unwrap();
        let prof = density_profile(&fam, &s).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&prof, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("radius,measure_low,measure_high,ratio_low,ratio_high,mode,schema_version")
        );
        assert_eq!(lines.count(), 2);
    }
}
