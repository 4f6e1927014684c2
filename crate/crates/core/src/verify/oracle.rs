use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::random;
use super::{derive_seed, point_value};
use super::{Relation, ReportItem, Status, VerificationReport};
use crate::error::Result;
use crate::exact::{rat, ratio_to_f64};
use crate::geometry::{distance_range, pinned_distance_set, Point, ROUNDED_REL_BUDGET};
use crate::measure::mc::{mc_pinned_distances, mc_volume, volume_shares};
use crate::measure::{family_ball_measure, Mode, SetFamily};

#[derive(Clone, Debug)]
pub struct CrossCheckConfig {
    pub cases: usize,
    pub samples: u64,
    pub pinned_cases: usize,
    pub pinned_samples: u64,
    pub seed: u64,
}

impl Default for CrossCheckConfig {
    fn default() -> Self {
        CrossCheckConfig {
            cases: 100,
            samples: 100_000,
            pinned_cases: 6,
            pinned_samples: 100_000,
            seed: 0,
        }
    }
}

/// Smallest number of intersecting cases out of `n` still accepted: a 99%
/// interval misses about one case in a hundred.
pub fn required_hits(n: usize) -> usize {
    n - n.div_ceil(100)
}

fn random_family(rng: &mut ChaCha8Rng, d: usize) -> SetFamily {
    match rng.random_range(0..3) {
        0 => random::disjoint_annuli(rng, d, 8),
        1 => random::disjoint_boxes(rng, d, 6),
        _ => random::single_ball(rng, d),
    }
}

/// Volume shares of the components of `D_pin(A)`.
fn component_shares(
    pin: &Point,
    family: &SetFamily,
) -> Result<(crate::geometry::IntervalSet, Vec<f64>)> {
    let set = pinned_distance_set(pin, family)?;
    let mut shares = vec![0.0; set.len()];
    for (p, s) in family.primitives().iter().zip(volume_shares(family)) {
        let range = distance_range(pin, p)?;
        if let Some(k) = set.locate_interval(&range) {
            shares[k] += s;
        }
    }
    Ok((set, shares))
}

/// Samples of `mc_pinned_distances` must all land in the analytic `D_pin(A)`,
/// and every component carrying at least 1% of the volume must be hit.
pub fn check_pinned_sampling(
    pin: &Point,
    family: &SetFamily,
    samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let (set, shares) = component_shares(pin, family)?;
    let dists = mc_pinned_distances(pin, family, samples, seed);
    let mut hits = vec![0u64; set.len()];
    let mut inside = 0u64;
    // Samples are produced in f64; allow a few ulps beyond the rounding budget.
    let tol = 1e-12_f64.max(ROUNDED_REL_BUDGET);
    for x in &dists {
        if let Some(k) = set.locate_f64(*x, tol) {
            inside += 1;
            hits[k] += 1;
        }
    }
    let mut report = VerificationReport::new("pinned-sampling");
    report
        .param("pin", point_value(pin))
        .param("samples", samples)
        .param("components", set.len());
    report.seed = Some(seed);
    report.push(ReportItem::new(
        "samples inside the analytic pinned set",
        inside as f64,
        Relation::Eq,
        samples as f64,
        Mode::MonteCarlo,
        if inside == samples {
            Status::Holds
        } else {
            Status::Violated
        },
    ));
    for (k, (share, h)) in shares.iter().zip(&hits).enumerate() {
        if *share < 0.01 {
            continue;
        }
        report.push(ReportItem::new(
            format!("component {k} (volume share {share:.4}) is hit"),
            *h as f64,
            Relation::Ge,
            1.0,
            Mode::MonteCarlo,
            if *h >= 1 {
                Status::Holds
            } else {
                Status::Violated
            },
        ));
    }
    Ok(report.finish())
}

/// Monte Carlo versus analytic volumes on seeded random families, plus the
/// pinned-distance sampler on seeded random pins.
pub fn check_mc_crosscheck(config: &CrossCheckConfig) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("mc-crosscheck");
    report
        .param("cases", config.cases)
        .param("samples", config.samples)
        .param("pinned_cases", config.pinned_cases)
        .param("pinned_samples", config.pinned_samples)
        .param("confidence", 0.99);
    report.seed = Some(config.seed);

    let mut agree = 0usize;
    for k in 0..config.cases {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, k as u64));
        let d = rng.random_range(2..=3usize);
        let family = random_family(&mut rng, d);
        let top = random::outer_extent(&family) * rat(6, 5);
        let r: BigRational = random::radii(&mut rng, &top, 1).remove(0);
        let analytic = family_ball_measure(&family, &r)?;
        let (lo, hi) = (analytic.low.to_f64(), analytic.high.to_f64());
        // Cosmetic f64 rounding of the analytic side.
        let slack = 1e-12 * hi.abs();
        let est = mc_volume(
            &family,
            &r,
            config.samples,
            derive_seed(config.seed ^ 0x5eed, k as u64),
        );
        let ok = est.intersects(lo - slack, hi + slack);
        agree += ok as usize;
        report.push(ReportItem::info(
            format!(
                "case {k}: {} (d={d}) at R = {r}: CI [{:.6e}, {:.6e}] vs analytic [{lo:.6e}, {hi:.6e}] {}",
                family.provenance(),
                est.ci_low,
                est.ci_high,
                if ok { "intersect" } else { "miss" }
            ),
            est.volume,
            (lo + hi) / 2.0,
            if analytic.exact { Mode::Exact } else { Mode::Bracketed },
        ));
    }
    let need = required_hits(config.cases);
    report.param("intersecting", agree).param("required", need);
    report.push(ReportItem::new(
        "cases whose 99% CI intersects the analytic value",
        agree as f64,
        Relation::Ge,
        need as f64,
        Mode::MonteCarlo,
        if agree >= need {
            Status::Holds
        } else {
            Status::Violated
        },
    ));

    for k in 0..config.pinned_cases {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed ^ 0x9177ed, k as u64));
        let d = rng.random_range(2..=3usize);
        let family = random_family(&mut rng, d);
        let top = ratio_to_f64(&random::outer_extent(&family)) as i64;
        let pin = Point::new(
            (0..d)
                .map(|_| rat(rng.random_range(-top..=top), rng.random_range(1..=4)))
                .collect(),
        );
        let sub = check_pinned_sampling(
            &pin,
            &family,
            config.pinned_samples,
            derive_seed(config.seed, k as u64),
        )?;
        report.absorb(
            &format!("pinned case {k} ({}, d={d}): ", family.provenance()),
            sub,
        );
    }
    Ok(report.finish())
}
