use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::One;
use serde_json::{Map, Value};

use super::{rat_value, schedule_value};
use super::{Relation, ReportItem, VerificationReport};
use crate::constructions::AnnuliConstruction;
use crate::error::{Error, Result};
use crate::exact::{int, rat, rat_pow, ratio_to_f64, ExactReal};
use crate::geometry::{annulus_distance_range, pinned_distance_set, Point};
use crate::measure::{
    density_profile, max_ratio_low, unit_ball_volume_exact, Mode, RadiusSchedule,
};

/// `M(pin)`: the least annulus index `i` with `2|pin| ≤ ε₀R_i/2`, which puts
/// `D_pin(S_j)` inside `[(1−ε₀/2)R_j, (1+3ε₀/2)R_j]` for every `j ≥ i`.
pub fn sharpness_threshold(annuli: &AnnuliConstruction, pin: &Point) -> Option<usize> {
    let eps0 = annuli.epsilon0();
    let lhs = int(16) * pin.norm_sq();
    annuli.indices().find(|&i| {
        let r = annuli.radius(i);
        lhs <= eps0 * eps0 * r * r
    })
}

/// Rational part of `C(ε₀) = 2ε₀(1+ε₀)^d / ((1−ε₀/2) ω_d [(1+ε₀)^d − 1])`,
/// i.e. `C(ε₀) · ω_d`.
fn constant_times_omega(d: usize, eps0: &BigRational) -> BigRational {
    let grow = rat_pow(&(BigRational::one() + eps0), d as u32);
    int(2) * eps0 * &grow / ((BigRational::one() - eps0 / int(2)) * (&grow - BigRational::one()))
}

/// The certified sharpness constant `C(ε₀)` and the ε₀-free bound `2^{d+2}/(d ω_d)`.
pub fn sharpness_constant(d: usize, eps0: &BigRational) -> Result<(f64, f64)> {
    let omega = unit_ball_volume_exact(d)?.to_f64();
    let c = ratio_to_f64(&constant_times_omega(d, eps0)) / omega;
    let uniform = 2f64.powi(d as i32 + 2) / (d as f64 * omega);
    Ok((c, uniform))
}

/// `2ε₀/(1−ε₀/2)`.
fn case_bound(eps0: &BigRational) -> BigRational {
    int(2) * eps0 / (BigRational::one() - eps0 / int(2))
}

/// Sharpness of the pinned density bound on the thin-annuli family:
/// (a) bracket containment from `M(pin)` on, (b) the pinned ratio bound
/// `2ε₀/(1−ε₀/2)` beyond `R_{2M}`, (c) the quotient against the ambient density.
///
/// The pinned ratio is evaluated at the schedule radii beyond `R_{2M}`, at
/// `R_{2M}` itself and at every right endpoint of the pinned set past it; the
/// ratio `|D ∩ [0,R]|/R` peaks at those endpoints, so (b) covers the supremum
/// over `[R_{2M}, ∞)`.
pub fn check_sharpness(
    annuli: &AnnuliConstruction,
    pins: &[Point],
    schedule: Option<&RadiusSchedule>,
) -> Result<VerificationReport> {
    let d = annuli.dim();
    let eps0 = annuli.epsilon0().clone();
    let one = BigRational::one();
    let family = annuli.family();
    let canonical = annuli.canonical_schedule();
    let schedule = schedule.unwrap_or(&canonical);
    let last = annuli.indices().end - 1;
    let omega = unit_ball_volume_exact(d)?;
    let bound = case_bound(&eps0);
    let c_omega = constant_times_omega(d, &eps0);
    let (c_value, uniform) = sharpness_constant(d, &eps0)?;

    let mut report = VerificationReport::new("sharpness");
    report
        .param("d", d)
        .param("epsilon0", rat_value(&eps0))
        .param("N", annuli.params().count)
        .param("case_bound", ratio_to_f64(&bound))
        .param("constant", c_value)
        .param("constant_uniform", uniform)
        .param("schedule", schedule_value(schedule));

    // Ambient side: canonical radii, closed form of the annulus density.
    let ambient = density_profile(family, &canonical)?;
    let best_e = max_ratio_low(&ambient)
        .expect("non-empty family")
        .ratio_low
        .clone();
    let grow = rat_pow(&(&one + &eps0), d as u32);
    let closed = omega.scale(&((&grow - &one) / &grow));
    report.push(ReportItem::exact(
        "max ambient ratio >= omega_d [(1+eps0)^d - 1]/(1+eps0)^d",
        &best_e,
        Relation::Ge,
        &closed,
    ));
    report.push(ReportItem::exact(
        "C(eps0) <= 2^(d+2)/(d omega_d)",
        &ExactReal::from_rational(c_omega.clone()),
        Relation::Le,
        &ExactReal::from_rational(rat_pow(&int(2), d as u32 + 2) / int(d as i64)),
    ));

    let mut quotients = Map::new();
    let mut worst = 0f64;
    for (p_idx, pin) in pins.iter().enumerate() {
        pin.check_dim(d)?;
        let m = sharpness_threshold(annuli, pin).ok_or_else(|| {
            Error::ScheduleTooShort(format!(
                "no annulus index satisfies 2|pin| <= eps0 R_i/2 for {pin}"
            ))
        })?;
        if 2 * m > last {
            return Err(Error::ScheduleTooShort(format!(
                "pin {pin} needs index 2M = {} but the family ends at {last}",
                2 * m
            )));
        }
        let tag = format!("pin {p_idx} {pin}, M = {m}: ");
        let rho = ExactReal::sqrt(&pin.norm_sq());

        // (a)
        for i in m..=last {
            let r = annuli.radius(i);
            let range = annulus_distance_range(pin, r, &annuli.outer_radius(i))?;
            let lo = ExactReal::from_rational((&one - &eps0 / int(2)) * r);
            let hi = ExactReal::from_rational((&one + &eps0 * rat(3, 2)) * r);
            report.push(ReportItem::exact(
                format!("{tag}min D_pin(S_{i}) >= (1 - eps0/2) R_{i}"),
                range.lo_exact(),
                Relation::Ge,
                &lo,
            ));
            report.push(ReportItem::exact(
                format!("{tag}max D_pin(S_{i}) <= (1 + 3 eps0/2) R_{i}"),
                range.hi_exact(),
                Relation::Le,
                &hi,
            ));
        }

        // (b)
        let set = pinned_distance_set(pin, family)?;
        let threshold = annuli.radius(2 * m).clone();
        let t_exact = ExactReal::from_rational(threshold.clone());
        let mut points: Vec<(String, ExactReal, ExactReal)> = Vec::new();
        points.push((
            format!("R_{}", 2 * m),
            t_exact.clone(),
            set.measure_up_to_exact(&threshold)?,
        ));
        for r in schedule.radii().iter().filter(|r| **r > threshold) {
            points.push((
                format!("R = {r}"),
                ExactReal::from_rational(r.clone()),
                set.measure_up_to_exact(r)?,
            ));
        }
        let mut prefix = ExactReal::zero();
        for (k, iv) in set.intervals().iter().enumerate() {
            prefix = &prefix + &iv.length();
            if iv.hi_exact().cmp_exact(&t_exact) == Ordering::Greater {
                points.push((
                    format!("right end of component {k}"),
                    iv.hi_exact().clone(),
                    prefix.clone(),
                ));
            }
        }
        let mut best_q = 0f64;
        for (label, r, measure) in &points {
            let ratio = measure.to_f64() / r.to_f64();
            let mut item = ReportItem::exact(
                format!("{tag}pinned ratio at {label} <= 2 eps0/(1 - eps0/2)"),
                measure,
                Relation::Le,
                &r.scale(&bound),
            );
            item.lhs = ratio;
            item.rhs = ratio_to_f64(&bound);
            report.push(item);

            // (c) ratio / maxE ≤ C  ⇔  measure · ω_d ≤ C·ω_d · maxE · R
            let q = ratio / best_e.to_f64();
            let mut item = ReportItem::exact(
                format!("{tag}quotient at {label} <= C(eps0)"),
                &(measure * &omega),
                Relation::Le,
                &(&best_e * r).scale(&c_omega),
            );
            item.lhs = q;
            item.rhs = c_value;
            report.push(item);
            best_q = best_q.max(q);
        }

        // Pigeonhole cases along the schedule.
        let prefix_len = if m > annuli.indices().start {
            ratio_to_f64(&annuli.outer_radius(m - 1)) + rho.to_f64()
        } else {
            0.0
        };
        let e = ratio_to_f64(&eps0);
        for r in schedule.radii().iter().filter(|r| **r > threshold) {
            let rf = ratio_to_f64(r);
            let measure = set.measure_up_to_exact(r)?.to_f64();
            let (label, budget) = pigeonhole_case(annuli, m, r, e, prefix_len);
            report.push(ReportItem::info(
                format!("{tag}R = {r}: {label}; ratio vs case bound"),
                measure / rf,
                budget / rf,
                Mode::Exact,
            ));
        }

        quotients.insert(pin.to_string(), Value::from(best_q));
        worst = worst.max(best_q);
        report.push(ReportItem::info(
            format!("{tag}sharpness quotient"),
            best_q,
            c_value,
            Mode::Exact,
        ));
    }
    report.param("quotients", Value::Object(quotients));
    report.param("quotient", worst);
    Ok(report.finish())
}

/// Case of the pigeonhole split for a radius `R` and the length budget
/// `|D ∩ [0,R]|` it allows: either `R` lies in some `Ĩ_i`, or between `Ĩ_i` and
/// `Ĩ_{i+1}`.
fn pigeonhole_case(
    annuli: &AnnuliConstruction,
    m: usize,
    r: &BigRational,
    eps0: f64,
    prefix: f64,
) -> (String, f64) {
    let rf = ratio_to_f64(r);
    let mut budget = prefix;
    for i in m..annuli.indices().end {
        let ri = ratio_to_f64(annuli.radius(i));
        let (lo, hi) = ((1.0 - eps0 / 2.0) * ri, (1.0 + 1.5 * eps0) * ri);
        if rf < lo {
            return (format!("between brackets below I~_{i}"), budget);
        }
        if rf <= hi {
            return (format!("inside I~_{i}"), budget + (rf - lo));
        }
        budget += 2.0 * eps0 * ri;
    }
    ("beyond the last bracket".to_string(), budget)
}
