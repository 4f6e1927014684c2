//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use density_lab::constructions::{
    build_annuli, build_boxes, AnnuliConstructionParams, BoxConstructionParams,
};
use density_lab::exact::{int, rat};
use density_lab::geometry::Point;
use density_lab::measure::{Mode, RadiusSchedule};
use density_lab::verify::{
    check_annular_bound_random, check_counterexample, check_density_lower_bound,
    check_mc_crosscheck, check_pinned_density_theorem, check_sharpness,
    check_translation_invariance, grid_pins, CrossCheckConfig, Relation, Status, TranslationConfig,
    Verdict, VerificationReport,
};

const SEED: u64 = 20_240_917;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn passed(r: &VerificationReport) -> bool {
    r.verdict == Verdict::Pass && r.recompute_verdict() == Verdict::Pass
}

fn all_exact(r: &VerificationReport) -> bool {
    r.checked_items().all(|i| i.mode == Mode::Exact)
}

fn pt(c: &[(i64, i64)]) -> Point {
    Point::new(c.iter().map(|&(n, d)| rat(n, d)).collect())
}

fn counterexample() -> Outcome {
    let mut notes = Vec::new();
    for d in [2, 3] {
        let boxes = build_boxes(BoxConstructionParams::relaxed(d, 8)).unwrap();
        let mut pins = grid_pins(&boxes, 1, 3);
        pins.extend(grid_pins(&boxes, 2, 3));
        let r = check_counterexample(&boxes, &pins, None).unwrap();
        let increases = r
            .checked_items()
            .filter(|i| i.desc.contains(" > gap_") && i.status == Status::Holds)
            .count();
        // Pins in Q_1 compare gaps 2..7 (6 → 5 steps), pins in Q_2 gaps 3..7 (4 steps).
        let expected = pins.len() / 2 * (5 + 4);
        if !(passed(&r) && all_exact(&r) && increases == expected) {
            return outcome(
                false,
                format!(
                    "d={d}: verdict {}, {increases}/{expected} gap increases",
                    r.verdict
                ),
            );
        }
        notes.push(format!(
            "d={d}: {} pins, {} exact items",
            pins.len(),
            r.checked_items().count()
        ));
    }
    outcome(true, notes.join("; "))
}

fn density_bound() -> Outcome {
    let mut notes = Vec::new();
    // (2d)^(-d) written out by hand.
    for (d, expect) in [(2usize, 1.0 / 16.0), (3, 1.0 / 216.0)] {
        let boxes = build_boxes(BoxConstructionParams::relaxed(d, 8)).unwrap();
        let r = check_density_lower_bound(&boxes).unwrap();
        let bound = r.params["bound"].as_f64().unwrap();
        let min = r
            .checked_items()
            .map(|i| i.lhs)
            .fold(f64::INFINITY, f64::min);
        let ok = passed(&r) && all_exact(&r) && bound == expect && r.checked_items().count() == 8;
        if !ok {
            return outcome(
                false,
                format!("d={d}: verdict {}, bound {bound}", r.verdict),
            );
        }
        notes.push(format!("d={d}: min ratio {min:.4} >= {expect:.6}"));
    }
    outcome(true, notes.join("; "))
}

fn annular_bound() -> Outcome {
    let r = check_annular_bound_random(1000, 20, SEED).unwrap();
    let n = r.checked_items().count();
    let bad = r.count(Status::Violated) + r.count(Status::Undecided);
    outcome(
        passed(&r) && all_exact(&r) && n == 20_000 && bad == 0,
        format!("{n} exact comparisons, {bad} failures"),
    )
}

fn theorem() -> Outcome {
    let mut notes = Vec::new();
    let boxes = build_boxes(BoxConstructionParams::relaxed(2, 6)).unwrap();
    let annuli = build_annuli(AnnuliConstructionParams::new(2, 6)).unwrap();
    // Interior points: centre of Q_1 = [2, 204] x [0, 202]; middle of S_1 = [1, 101/100].
    let cases = [
        (
            "boxes",
            boxes.family(),
            boxes.canonical_schedule(),
            pt(&[(0, 1), (0, 1)]),
        ),
        (
            "boxes",
            boxes.family(),
            boxes.canonical_schedule(),
            pt(&[(103, 1), (101, 1)]),
        ),
        (
            "annuli",
            annuli.family(),
            annuli.canonical_schedule(),
            pt(&[(0, 1), (0, 1)]),
        ),
        (
            "annuli",
            annuli.family(),
            annuli.canonical_schedule(),
            pt(&[(201, 200), (0, 1)]),
        ),
    ];
    for (name, fam, sched, pin) in cases {
        let r = check_pinned_density_theorem(fam, &pin, &sched).unwrap();
        let main = r.checked_items().last().unwrap();
        if !passed(&r) || main.lhs < main.rhs - 1e-12 {
            return outcome(
                false,
                format!("{name} pin {pin}: {} < {}", main.lhs, main.rhs),
            );
        }
        notes.push(format!("{name} {pin}: {:.4} >= {:.4}", main.lhs, main.rhs));
    }
    outcome(true, notes.join("; "))
}

fn translation_reports(samples: u64) -> Vec<VerificationReport> {
    let cfg = TranslationConfig {
        samples,
        seed: SEED,
    };
    let x2 = pt(&[(1, 1), (0, 1)]);
    let boxes2 = build_boxes(BoxConstructionParams::relaxed(2, 3)).unwrap();
    let annuli2 = build_annuli(AnnuliConstructionParams::new(2, 3)).unwrap();
    let sched2 = RadiusSchedule::geometric(int(16), int(2), 8).unwrap();
    let x3 = pt(&[(3, 5), (4, 5), (0, 1)]);
    let boxes3 = build_boxes(BoxConstructionParams::relaxed(3, 3)).unwrap();
    let sched3 = RadiusSchedule::geometric(int(32), int(2), 8).unwrap();
    vec![
        check_translation_invariance(boxes2.family(), &x2, &sched2, &cfg).unwrap(),
        check_translation_invariance(annuli2.family(), &x2, &sched2, &cfg).unwrap(),
        check_translation_invariance(boxes3.family(), &x3, &sched3, &cfg).unwrap(),
    ]
}

fn translation() -> (Outcome, Vec<String>) {
    let reports = translation_reports(1_000_000);
    let mut notes = Vec::new();
    for r in &reports {
        let d = r.params["d"].as_u64().unwrap() as i32;
        let norm = r.params["norm_x"].as_f64().unwrap();
        let bounds: Vec<f64> = r
            .checked_items()
            .filter(|i| i.desc.starts_with("|ratio"))
            .map(|i| i.rhs)
            .collect();
        // ((R+|x|)^d - R^d)/R^d recomputed in f64 at the last radius.
        let r_last = r.params["schedule"].as_array().unwrap().last().unwrap();
        let r_last: f64 = r_last.as_str().unwrap().parse().unwrap();
        let oracle = ((r_last + norm) / r_last).powi(d) - 1.0;
        let last = *bounds.last().unwrap();
        let decreasing = bounds.windows(2).all(|w| w[1] < w[0]);
        if !(passed(r) && decreasing && last < 1e-3 && (last - oracle).abs() < 1e-12) {
            return (
                outcome(
                    false,
                    format!("d={d}: verdict {}, last bound {last:e}", r.verdict),
                ),
                Vec::new(),
            );
        }
        let mc = r
            .checked_items()
            .filter(|i| i.mode == Mode::MonteCarlo)
            .count();
        notes.push(format!("d={d}: last bound {last:.3e}, {mc} MC radii"));
    }
    let json = reports.iter().map(|r| r.to_json()).collect();
    (outcome(true, notes.join("; ")), json)
}

fn sharpness() -> Outcome {
    let mut quotients = Vec::new();
    for eps0 in [rat(1, 100), rat(1, 20)] {
        let annuli =
            build_annuli(AnnuliConstructionParams::with_epsilon0(2, eps0.clone(), 6)).unwrap();
        let pins = [pt(&[(0, 1), (0, 1)]), pt(&[(1, 1), (0, 1)])];
        let r = check_sharpness(&annuli, &pins, None).unwrap();
        let e = density_lab::exact::ratio_to_f64(&eps0);
        let bound = 2.0 * e / (1.0 - e / 2.0);
        let ratios_ok = r
            .checked_items()
            .filter(|i| i.desc.contains("pinned ratio at"))
            .all(|i| {
                i.mode == Mode::Exact
                    && i.status == Status::Holds
                    && i.rel == Relation::Le
                    && i.lhs <= bound
            });
        if !(passed(&r) && ratios_ok) {
            return outcome(false, format!("eps0={eps0}: verdict {}", r.verdict));
        }
        let q = r.params["quotient"].as_f64().unwrap();
        // Leading-order value (1+eps0)/(pi (2+eps0)) from the closed forms.
        let approx = (1.0 + e) / (PI * (2.0 + e));
        if (q - approx).abs() > 0.05 * approx {
            return outcome(
                false,
                format!("eps0={eps0}: quotient {q} far from {approx}"),
            );
        }
        quotients.push(q);
    }
    let spread = (quotients[0] - quotients[1]).abs() / quotients[0].max(quotients[1]);
    outcome(
        spread < 0.25,
        format!(
            "quotients {:.5} / {:.5}, relative spread {:.2}%",
            quotients[0],
            quotients[1],
            100.0 * spread
        ),
    )
}

fn crosscheck_report() -> VerificationReport {
    check_mc_crosscheck(&CrossCheckConfig {
        seed: SEED,
        ..CrossCheckConfig::default()
    })
    .unwrap()
}

fn mc_oracle() -> (Outcome, String) {
    let r = crosscheck_report();
    let agree = r.params["intersecting"].as_u64().unwrap();
    let pinned_ok = r
        .checked_items()
        .filter(|i| i.desc.starts_with("pinned case"))
        .all(|i| i.status == Status::Holds);
    let inside = r
        .checked_items()
        .filter(|i| i.desc.contains("samples inside"))
        .all(|i| i.lhs == i.rhs && i.rhs == 100_000.0);
    (
        outcome(
            passed(&r) && agree >= 99 && pinned_ok && inside,
            format!("{agree}/100 intervals intersect; pinned samples all inside"),
        ),
        r.to_json(),
    )
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |n: usize, name: &str, limit: f64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let ok = o.ok && secs < limit;
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {n} [{status}] {name} ({secs:.1}s, budget {limit}s): {}",
            o.detail
        );
        all_ok &= ok;
    };

    report(1, "counterexample certificate", 5.0, &mut counterexample);
    report(2, "density lower bound", 1.0, &mut density_bound);
    report(3, "finite-radius annular bound", 30.0, &mut annular_bound);
    report(4, "pinned density theorem", 10.0, &mut theorem);
    let mut first_translation = Vec::new();
    report(5, "translation shell bound", 60.0, &mut || {
        let (o, json) = translation();
        first_translation = json;
        o
    });
    report(6, "sharpness", 10.0, &mut sharpness);
    let mut first_mc = String::new();
    report(7, "Monte Carlo oracle", 120.0, &mut || {
        let (o, json) = mc_oracle();
        first_mc = json;
        o
    });
    report(8, "determinism", 180.0, &mut || {
        let again: Vec<String> = translation_reports(1_000_000)
            .iter()
            .map(|r| r.to_json())
            .collect();
        let same_t = !first_translation.is_empty() && again == first_translation;
        let same_mc = !first_mc.is_empty() && crosscheck_report().to_json() == first_mc;
        outcome(
            same_t && same_mc,
            format!(
                "translation reports identical: {same_t}; crosscheck report identical: {same_mc}"
            ),
        )
    });

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
