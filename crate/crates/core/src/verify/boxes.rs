use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{rat_value, schedule_value};
use super::{Relation, ReportItem, Status, VerificationReport};
use crate::constructions::BoxConstruction;
use crate::error::{Error, Result};
use crate::exact::{int, rat_pow, ExactReal};
use crate::geometry::{distance_range, pinned_distance_set, Point};
use crate::measure::{density_profile, Mode, RadiusSchedule};

/// `n^d` pins on the grid `corner + ℓ_i · (k_1, …, k_d)/(n−1)` of `Q_i`;
/// `n = 1` gives the corner alone.
pub fn grid_pins(boxes: &BoxConstruction, i: usize, n: usize) -> Vec<Point> {
    let d = boxes.dim();
    let corner = boxes.corner(i);
    let side = boxes.side(i);
    let steps: Vec<BigRational> = if n <= 1 {
        vec![BigRational::zero()]
    } else {
        (0..n)
            .map(|k| side * BigRational::new(k.into(), (n - 1).into()))
            .collect()
    };
    let mut pins: Vec<Vec<BigRational>> = vec![Vec::new()];
    for c in corner.coords().iter().take(d) {
        pins = pins
            .iter()
            .flat_map(|p| {
                steps.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(c + s);
                    q
                })
            })
            .collect();
    }
    pins.into_iter().map(Point::new).collect()
}

/// Distances from a pin in `Q_{i₀}` to every later box `Q_m`, `m ≥ M > i₀`,
/// lie in `[R_m, 2ε√d R_{m+1}]`, and the gaps of the pinned distance set
/// between consecutive such boxes strictly increase.
///
/// `m_index = None` uses `M = i₀ + 1` for each pin.
pub fn check_counterexample(
    boxes: &BoxConstruction,
    pins: &[Point],
    m_index: Option<usize>,
) -> Result<VerificationReport> {
    let d = boxes.dim();
    let n = boxes.count();
    let eps = boxes.epsilon();
    // (2ε√d R)^2 = 4ε²d R²
    let upper_sq_factor = int(4 * d as i64) * eps * eps;
    let sqrt_d = ExactReal::sqrt(&int(d as i64));
    let mut report = VerificationReport::new("counterexample");
    report
        .param("d", d)
        .param("N", n)
        .param("epsilon", rat_value(eps))
        .param("growth", rat_value(&boxes.params().growth))
        .param("pins", pins.len());
    if let Some(m) = m_index {
        report.param("M", m);
    }

    for (p_idx, pin) in pins.iter().enumerate() {
        pin.check_dim(d)?;
        let i0 = boxes
            .locate(pin)
            .ok_or_else(|| Error::PinOutsideFamily(pin.to_string()))?;
        let m0 = m_index.unwrap_or(i0 + 1);
        if m0 <= i0 || m0 > n {
            return Err(Error::PinOutsideFamily(format!(
                "{pin} lies in Q_{i0}, which needs {i0} < M <= {n}, got M = {m0}"
            )));
        }
        let tag = format!("pin {p_idx} {pin} in Q_{i0}, M = {m0}: ");
        let set = pinned_distance_set(pin, boxes.family())?;

        let mut components = Vec::new();
        for m in m0..=n {
            let range = distance_range(pin, boxes.cube(m))?;
            let lo_sq = range.lo_sq().expect("box distances have rational squares");
            let hi_sq = range.hi_sq().expect("box distances have rational squares");
            let r_m = boxes.radius(m);
            let r_next = boxes.radius(m + 1);
            report.push(ReportItem::exact(
                format!("{tag}dmin(pin, Q_{m})^2 >= R_{m}^2"),
                &ExactReal::from_rational(lo_sq),
                Relation::Ge,
                &ExactReal::from_rational(r_m * r_m),
            ));
            report.push(ReportItem::exact(
                format!("{tag}dmax(pin, Q_{m})^2 <= (2 eps sqrt(d) R_{})^2", m + 1),
                &ExactReal::from_rational(hi_sq),
                Relation::Le,
                &ExactReal::from_rational(&upper_sq_factor * r_next * r_next),
            ));
            components.push(set.locate_interval(&range));
        }

        let mut gaps = Vec::new();
        for (j, m) in (m0..n).enumerate() {
            let (a, b) = (components[j], components[j + 1]);
            let adjacent = matches!((a, b), (Some(a), Some(b)) if b == a + 1);
            report.push(ReportItem::new(
                format!(
                    "{tag}D(Q_{m}) and D(Q_{}) are consecutive components",
                    m + 1
                ),
                a.map_or(-1.0, |a| a as f64 + 1.0),
                Relation::Eq,
                b.map_or(-1.0, |b| b as f64),
                Mode::Exact,
                if adjacent {
                    Status::Holds
                } else {
                    Status::Violated
                },
            ));
            if !adjacent {
                continue;
            }
            let (a, b) = (a.unwrap(), b.unwrap());
            let iv = set.intervals();
            let gap = iv[b].lo_exact() - iv[a].hi_exact();
            // (1 − 2ε√d) R_{m+1}
            let r_next = boxes.radius(m + 1);
            let floor =
                ExactReal::from_rational(r_next.clone()) - sqrt_d.scale(&(int(2) * eps * r_next));
            report.push(ReportItem::exact(
                format!("{tag}gap_{m} >= (1 - 2 eps sqrt(d)) R_{}", m + 1),
                &gap,
                Relation::Ge,
                &floor,
            ));
            report.push(ReportItem::exact(
                format!("{tag}(1 - 2 eps sqrt(d)) R_{} > 0", m + 1),
                &floor,
                Relation::Gt,
                &ExactReal::zero(),
            ));
            gaps.push((m, gap));
        }
        for w in gaps.windows(2) {
            let ((m, g0), (m1, g1)) = (&w[0], &w[1]);
            report.push(ReportItem::exact(
                format!("{tag}gap_{m1} > gap_{m}"),
                g1,
                Relation::Gt,
                g0,
            ));
            report.push(ReportItem::info(
                format!("{tag}gap_{m1} / gap_{m}"),
                g1.to_f64() / g0.to_f64(),
                0.0,
                Mode::Exact,
            ));
        }
    }
    Ok(report.finish())
}

/// `ratio_low ≥ (2d)^{−d}` at every canonical radius `2εdR_i`, together with
/// the (uncertified) ratios at the lower-right vertices `x1_i + ℓ_i`.
pub fn check_density_lower_bound(boxes: &BoxConstruction) -> Result<VerificationReport> {
    let d = boxes.dim();
    let bound =
        ExactReal::from_rational(BigRational::one() / rat_pow(&int(2 * d as i64), d as u32));
    let schedule = boxes.canonical_schedule();
    let mut report = VerificationReport::new("density-bound");
    report
        .param("d", d)
        .param("N", boxes.count())
        .param("epsilon", rat_value(boxes.epsilon()))
        .param("bound", bound.to_f64())
        .param("schedule", schedule_value(&schedule));
    for (k, e) in density_profile(boxes.family(), &schedule)?
        .iter()
        .enumerate()
    {
        report.push(ReportItem::bracketed(
            format!("ratio_low at 2 eps d R_{} >= (2d)^(-d)", k + 2),
            &e.ratio_low,
            &e.ratio_high,
            Relation::Ge,
            &bound,
        ));
    }
    let vertices = RadiusSchedule::new(
        (1..=boxes.count())
            .map(|i| boxes.offset(i) + boxes.side(i))
            .collect(),
    )?;
    for (i, e) in density_profile(boxes.family(), &vertices)?
        .iter()
        .enumerate()
    {
        report.push(ReportItem::info(
            format!("vertex radius x1_{0} + l_{0}: ratio bracket", i + 1),
            e.ratio_low.to_f64(),
            e.ratio_high.to_f64(),
            e.mode,
        ));
    }
    Ok(report.finish())
}
