use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::random;
use super::{derive_seed, point_value, schedule_value};
use super::{Relation, ReportItem, Status, VerificationReport};
use crate::error::{Error, Result};
use crate::exact::{int, rat, rat_pow, ratio_to_f64, ExactReal};
use crate::geometry::{distance_range, pinned_distance_set, Point};
use crate::measure::mc::mc_shift_difference;
use crate::measure::{
    density_profile, family_ball_measure, max_ratio_high, max_ratio_low, pinned_density_profile,
    sphere_area_exact, Mode, RadiusSchedule, SetFamily,
};

fn inv_pow(r: &BigRational, d: usize) -> BigRational {
    BigRational::one() / rat_pow(r, d as u32)
}

/// `|A ∩ B(0,R)| ≤ |S^{d−1}| · |D_0(A) ∩ [0,R]| · R^{d−1}` at one radius.
pub fn check_annular_bound(family: &SetFamily, r: &BigRational) -> Result<VerificationReport> {
    let schedule = RadiusSchedule::new(vec![r.clone()])?;
    check_annular_bound_schedule(family, &schedule)
}

pub fn check_annular_bound_schedule(
    family: &SetFamily,
    schedule: &RadiusSchedule,
) -> Result<VerificationReport> {
    let d = family.dim();
    let area = sphere_area_exact(d)?;
    let d0 = pinned_distance_set(&Point::origin(d), family)?;
    let mut report = VerificationReport::new("annular-bound");
    report
        .param("d", d)
        .param("primitives", family.len())
        .param("schedule", schedule_value(schedule));
    for r in schedule.radii() {
        let lhs = family_ball_measure(family, r)?;
        let rhs = area.scale(&rat_pow(r, d as u32 - 1)) * d0.measure_up_to_exact(r)?;
        report.push(ReportItem::bracketed(
            format!("|A ∩ B(0,R)| <= |S^(d-1)| |D_0(A) ∩ [0,R]| R^(d-1) at R = {r}"),
            &lhs.low,
            &lhs.high,
            Relation::Le,
            &rhs,
        ));
    }
    Ok(report.finish())
}

/// The annular bound on `families` random disjoint-annuli families (up to 50
/// annuli each, dimension cycling through 2, 3, 4) at `radii` random radii each.
pub fn check_annular_bound_random(
    families: usize,
    radii: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("annular-bound");
    report
        .param("families", families)
        .param("radii_per_family", radii)
        .param("max_annuli", 50);
    report.seed = Some(seed);
    for k in 0..families {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
        let d = 2 + k % 3;
        let family = random::disjoint_annuli(&mut rng, d, 50);
        let top = random::outer_extent(&family) * rat(6, 5);
        let schedule = RadiusSchedule::new(random::radii(&mut rng, &top, radii))?;
        let sub = check_annular_bound_schedule(&family, &schedule)?;
        report.absorb(
            &format!("family {k} (d={d}, {} annuli): ", family.len()),
            sub,
        );
    }
    Ok(report.finish())
}

/// `max ratio(D_pin(A)) ≥ max ratio(A − pin) / (2|S^{d−1}|) − 1e-12` over a schedule.
///
/// Families with annuli cannot be translated exactly; for a non-zero pin the
/// ambient side then uses `A` itself, which has the same upper density.
pub fn check_pinned_density_theorem(
    family: &SetFamily,
    pin: &Point,
    schedule: &RadiusSchedule,
) -> Result<VerificationReport> {
    let d = family.dim();
    pin.check_dim(d)?;
    let (ambient, pathway) = match family.translate(&Point::origin(d).sub(pin)) {
        Ok(t) => (t, "translated family"),
        Err(Error::TranslationUnsupported) => (family.clone(), "translation invariance"),
        Err(e) => return Err(e),
    };
    let area = sphere_area_exact(d)?;
    let ambient_profile = density_profile(&ambient, schedule)?;
    let pinned = pinned_distance_set(pin, family)?;
    let pinned_profile = pinned_density_profile(&pinned, schedule)?;

    let mut report = VerificationReport::new("theorem");
    report
        .param("d", d)
        .param("pin", point_value(pin))
        .param("pathway", pathway)
        .param("schedule", schedule_value(schedule))
        .param("sphere_area", area.to_f64());
    for (a, p) in ambient_profile.iter().zip(&pinned_profile) {
        report.push(ReportItem::info(
            format!("R = {}: ratio(A - pin) low vs pinned ratio", a.radius),
            a.ratio_low.to_f64(),
            p.ratio_high.to_f64(),
            a.mode,
        ));
    }
    let best_a = max_ratio_low(&ambient_profile).expect("non-empty schedule");
    let best_d = max_ratio_high(&pinned_profile).expect("non-empty schedule");
    // bestD ≥ bestA/(2|S|) − tol  ⇔  2|S|(bestD + tol) ≥ bestA
    let tol = ExactReal::from_rational(rat(1, 1_000_000_000_000));
    let two_area = area.scale(&int(2));
    let lhs = &two_area * &(&best_d.ratio_high + &tol);
    let mut item = ReportItem::exact(
        "max pinned ratio >= max ambient ratio / (2|S^(d-1)|) - 1e-12",
        &lhs,
        Relation::Ge,
        &best_a.ratio_low,
    );
    item.lhs = best_d.ratio_high.to_f64();
    item.rhs = best_a.ratio_low.to_f64() / two_area.to_f64();
    item.mode = best_a.mode.join(best_d.mode);
    report.push(item);
    Ok(report.finish())
}

#[derive(Clone, Debug)]
pub struct TranslationConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for TranslationConfig {
    fn default() -> Self {
        TranslationConfig {
            samples: 1_000_000,
            seed: 0,
        }
    }
}

fn pow_exact(x: &ExactReal, n: usize) -> ExactReal {
    (0..n).fold(ExactReal::from_int(1), |acc, _| &acc * x)
}

/// `|ratio(A − x, R) − ratio(A, R)| ≤ ((R+|x|)^d − R^d)/R^d` along a schedule.
///
/// A primitive inside `B(0, R−|x|)` or outside `B(0, R+|x|)` lies in both balls
/// or in neither, so it contributes exactly zero. The remaining primitives are
/// handled by sampling the shell between those radii.
pub fn check_translation_invariance(
    family: &SetFamily,
    x: &Point,
    schedule: &RadiusSchedule,
    config: &TranslationConfig,
) -> Result<VerificationReport> {
    let d = family.dim();
    x.check_dim(d)?;
    let norm = ExactReal::sqrt(&x.norm_sq());
    let mut report = VerificationReport::new("translation");
    report
        .param("d", d)
        .param("x", point_value(x))
        .param("norm_x", norm.to_f64())
        .param("samples", config.samples)
        .param("schedule", schedule_value(schedule));
    report.seed = Some(config.seed);

    let ranges = family
        .primitives()
        .iter()
        .map(|p| distance_range(&Point::origin(d), p))
        .collect::<Result<Vec<_>>>()?;
    let mut previous: Option<ExactReal> = None;
    for (k, r) in schedule.radii().iter().enumerate() {
        let r_exact = ExactReal::from_rational(r.clone());
        let scale = inv_pow(r, d);
        let bound = (pow_exact(&(&r_exact + &norm), d)
            - ExactReal::from_rational(rat_pow(r, d as u32)))
        .scale(&scale);
        let inner = &r_exact - &norm;
        let outer = &r_exact + &norm;
        let straddling: Vec<usize> = if x.is_origin() {
            Vec::new()
        } else {
            ranges
                .iter()
                .enumerate()
                .filter(|(_, iv)| {
                    let inside = iv.hi_exact().try_cmp(&inner) == Some(Ordering::Less)
                        || iv.hi_exact().try_cmp(&inner) == Some(Ordering::Equal);
                    let outside = iv.lo_exact().try_cmp(&outer) == Some(Ordering::Greater)
                        || iv.lo_exact().try_cmp(&outer) == Some(Ordering::Equal);
                    !(inside || outside)
                })
                .map(|(i, _)| i)
                .collect()
        };
        let desc = format!("|ratio(A - x, R) - ratio(A, R)| <= ((R+|x|)^d - R^d)/R^d at R = {r}");
        if straddling.is_empty() {
            report.push(ReportItem::exact(
                desc,
                &ExactReal::zero(),
                Relation::Le,
                &bound,
            ));
        } else {
            let sub = family.select(&straddling);
            let seed = derive_seed(config.seed, k as u64);
            let diff = mc_shift_difference(&sub, x, r, config.samples, seed);
            let s = ratio_to_f64(&scale);
            let (upper, lower) = (diff.abs_upper() * s, diff.abs_lower() * s);
            let b = bound.to_f64();
            let status = if upper <= b {
                Status::Holds
            } else if lower > b {
                Status::Violated
            } else {
                Status::Undecided
            };
            report.push(ReportItem::new(
                desc,
                upper,
                Relation::Le,
                b,
                Mode::MonteCarlo,
                status,
            ));
            report.push(ReportItem::info(
                format!(
                    "R = {r}: difference estimate over {} straddling primitives",
                    straddling.len()
                ),
                diff.estimate * s,
                lower,
                Mode::MonteCarlo,
            ));
        }
        if let Some(prev) = &previous {
            report.push(ReportItem::exact(
                format!("shell bound decreases at R = {r}"),
                &bound,
                Relation::Lt,
                prev,
            ));
        }
        previous = Some(bound);
    }
    if let Some(last) = previous {
        report.param("last_bound", last.to_f64());
    }
    Ok(report.finish())
}

/// Exact additivity of ratios over a disjoint union, and the sub-additivity and
/// monotonicity it implies, at every schedule radius.
pub fn check_subadditivity_monotonicity(
    a: &SetFamily,
    b: &SetFamily,
    schedule: &RadiusSchedule,
) -> Result<VerificationReport> {
    let union = a.union(b)?;
    let d = a.dim();
    let mut report = VerificationReport::new("submon");
    report
        .param("d", d)
        .param("primitives_a", a.len())
        .param("primitives_b", b.len())
        .param("schedule", schedule_value(schedule));
    for r in schedule.radii() {
        let s = inv_pow(r, d);
        let ma = family_ball_measure(a, r)?;
        let mb = family_ball_measure(b, r)?;
        let mu = family_ball_measure(&union, r)?;
        let sum_low = (&ma.low + &mb.low).scale(&s);
        let sum_high = (&ma.high + &mb.high).scale(&s);
        let (u_low, u_high) = (mu.low.scale(&s), mu.high.scale(&s));
        let mode = if mu.exact {
            Mode::Exact
        } else {
            Mode::Bracketed
        };

        let mut add = ReportItem::exact(
            format!("ratio(A ∪ B) == ratio(A) + ratio(B) at R = {r}"),
            &u_low,
            Relation::Eq,
            &sum_low,
        );
        if !mu.exact && u_high.try_cmp(&sum_high) != Some(Ordering::Equal) {
            add.status = Status::Violated;
        }
        add.mode = mode;
        let additive = add.status == Status::Holds;
        report.push(add);

        let derived = |desc: String, lhs: f64, rhs: f64, nonneg: &ExactReal| {
            let ok = additive && nonneg.sign() != Some(Ordering::Less);
            let status = if ok { Status::Holds } else { Status::Undecided };
            ReportItem::new(desc, lhs, Relation::Le, rhs, mode, status)
        };
        report.push(derived(
            format!("ratio(A ∪ B) <= ratio(A) + ratio(B) at R = {r}"),
            u_high.to_f64(),
            sum_high.to_f64(),
            &ExactReal::zero(),
        ));
        report.push(derived(
            format!("ratio(A) <= ratio(A ∪ B) at R = {r}"),
            ma.low.scale(&s).to_f64(),
            u_low.to_f64(),
            &mb.low,
        ));
        report.push(derived(
            format!("ratio(B) <= ratio(A ∪ B) at R = {r}"),
            mb.low.scale(&s).to_f64(),
            u_low.to_f64(),
            &ma.low,
        ));
    }
    Ok(report.finish())
}
