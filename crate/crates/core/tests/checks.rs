//! Checker reports compared with values worked out by hand or by brute force.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use density_lab::constructions::{
    build_annuli, build_boxes, AnnuliConstructionParams, BoxConstructionParams,
};
use density_lab::exact::{int, rat, ratio_to_f64};
use density_lab::geometry::{pinned_distance_set, Point, Primitive};
use density_lab::measure::{Mode, RadiusSchedule, SetFamily};
use density_lab::verify::{
    check_annular_bound, check_counterexample, check_density_lower_bound, check_mc_crosscheck,
    check_pinned_sampling, check_sharpness, check_subadditivity_monotonicity,
    check_translation_invariance, random, required_hits, sharpness_constant, sharpness_threshold,
    CrossCheckConfig, Relation, Status, TranslationConfig, Verdict,
};
use density_lab::Error;

fn pt(c: &[i64]) -> Point {
    Point::new(c.iter().map(|&x| int(x)).collect())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn annular_bound_on_one_annulus() {
    // A = {2 <= |y| <= 5} in the plane, R = 4: lhs = π(16 − 4), rhs = 2π·(4 − 2)·4.
    let fam = SetFamily::new(2, vec![Primitive::annulus(int(2), int(5)).unwrap()], "t").unwrap();
    let r = check_annular_bound(&fam, &int(4)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let item = &r.items[0];
    assert_eq!(item.mode, Mode::Exact);
    assert!(close(item.lhs, 12.0 * PI), "{}", item.lhs);
    assert!(close(item.rhs, 16.0 * PI), "{}", item.rhs);
}

#[test]
fn annular_bound_on_a_thin_shell() {
    // A thin shell [R − h, R] in d = 3: lhs = 4π/3 (R³ − (R−h)³), rhs = 4π R² h.
    let fam = SetFamily::new(3, vec![Primitive::annulus(int(9), int(10)).unwrap()], "t").unwrap();
    let r = check_annular_bound(&fam, &int(10)).unwrap();
    let item = &r.items[0];
    assert!(close(item.lhs, 4.0 * PI / 3.0 * (1000.0 - 729.0)));
    assert!(close(item.rhs, 4.0 * PI * 100.0));
    assert_eq!(item.status, Status::Holds);
}

#[test]
fn submon_items_and_overlap() {
    let a = SetFamily::new(2, vec![Primitive::annulus(int(1), int(2)).unwrap()], "a").unwrap();
    let b = SetFamily::new(2, vec![Primitive::annulus(int(3), int(4)).unwrap()], "b").unwrap();
    let s = RadiusSchedule::new(vec![int(3), int(5)]).unwrap();
    let r = check_subadditivity_monotonicity(&a, &b, &s).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.checked_items().count(), 8);
    // At R = 5: ratio(A ∪ B) = π(3 + 7)/25.
    let add = r
        .items
        .iter()
        .filter(|i| i.rel == Relation::Eq)
        .nth(1)
        .unwrap();
    assert!(close(add.lhs, 10.0 * PI / 25.0));

    let c = SetFamily::new(2, vec![Primitive::annulus(rat(3, 2), int(3)).unwrap()], "c").unwrap();
    assert!(matches!(
        check_subadditivity_monotonicity(&a, &c, &s),
        Err(Error::Overlap(_))
    ));
}

#[test]
fn translation_far_from_the_family_is_decided_exactly() {
    // One unit ball centred at (100, 0); every radius below 90 or above 110 is exact.
    let ball = Primitive::ball(pt(&[100, 0]), int(1)).unwrap();
    let fam = SetFamily::new(2, vec![ball], "t").unwrap();
    let s = RadiusSchedule::new(vec![int(10), int(50), int(200)]).unwrap();
    let cfg = TranslationConfig {
        samples: 1000,
        seed: 3,
    };
    let r = check_translation_invariance(&fam, &pt(&[3, 4]), &s, &cfg).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.checked_items().all(|i| i.mode == Mode::Exact));
    // Bound ((R+5)^2 − R^2)/R^2 at R = 10.
    assert!(close(r.items[0].rhs, 125.0 / 100.0));
}

#[test]
fn translation_straddling_radius_uses_sampling() {
    let ball = Primitive::ball(pt(&[100, 0]), int(1)).unwrap();
    let fam = SetFamily::new(2, vec![ball], "t").unwrap();
    let s = RadiusSchedule::new(vec![int(100)]).unwrap();
    let cfg = TranslationConfig {
        samples: 20_000,
        seed: 3,
    };
    let r = check_translation_invariance(&fam, &pt(&[1, 0]), &s, &cfg).unwrap();
    assert_eq!(r.items[0].mode, Mode::MonteCarlo);
    assert_eq!(r.verdict, Verdict::Pass);
}

#[test]
fn counterexample_rejects_pins_outside_the_family() {
    let boxes = build_boxes(BoxConstructionParams::relaxed(2, 5)).unwrap();
    let outside = pt(&[-1, -1]);
    assert!(matches!(
        check_counterexample(&boxes, &[outside], None),
        Err(Error::PinOutsideFamily(_))
    ));
}

#[test]
fn density_bound_values_by_hand() {
    let boxes = build_boxes(BoxConstructionParams::relaxed(2, 5)).unwrap();
    let r = check_density_lower_bound(&boxes).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.params["bound"].as_f64(), Some(1.0 / 16.0));
}

#[test]
fn sharpness_threshold_by_hand() {
    // ε₀ = 1/100, pin (1, 0): need 16 <= R_i²/10⁴, i.e. R_i >= 400.
    let annuli = build_annuli(AnnuliConstructionParams::new(2, 8)).unwrap();
    let pin = pt(&[1, 0]);
    let expected = annuli
        .indices()
        .find(|&i| ratio_to_f64(annuli.radius(i)) >= 400.0)
        .unwrap();
    assert_eq!(sharpness_threshold(&annuli, &pin), Some(expected));
    assert_eq!(
        sharpness_threshold(&annuli, &pt(&[0, 0])),
        Some(annuli.indices().start)
    );
}

#[test]
fn sharpness_constant_matches_its_formula() {
    for (d, e) in [(2usize, 0.01f64), (3, 0.05)] {
        let omega = if d == 2 { PI } else { 4.0 * PI / 3.0 };
        let g = (1.0 + e).powi(d as i32);
        let expect = 2.0 * e * g / ((1.0 - e / 2.0) * omega * (g - 1.0));
        let (c, uniform) = sharpness_constant(d, &rat((e * 100.0).round() as i64, 100)).unwrap();
        assert!((c - expect).abs() < 1e-12 * expect);
        assert!((uniform - 2f64.powi(d as i32 + 2) / (d as f64 * omega)).abs() < 1e-12);
        assert!(c <= uniform);
    }
}

#[test]
fn sharpness_needs_enough_annuli() {
    let annuli = build_annuli(AnnuliConstructionParams::new(2, 3)).unwrap();
    assert!(matches!(
        check_sharpness(&annuli, &[pt(&[50, 0])], None),
        Err(Error::ScheduleTooShort(_))
    ));
}

#[test]
fn required_hits_values() {
    assert_eq!(required_hits(100), 99);
    assert_eq!(required_hits(1000), 990);
    assert_eq!(required_hits(50), 49);
    assert_eq!(required_hits(1), 0);
}

#[test]
fn small_crosscheck_passes_and_is_reproducible() {
    let cfg = CrossCheckConfig {
        cases: 10,
        samples: 20_000,
        pinned_cases: 2,
        pinned_samples: 20_000,
        seed: 11,
    };
    let a = check_mc_crosscheck(&cfg).unwrap();
    let b = check_mc_crosscheck(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_ne!(a.verdict, Verdict::Fail);
}

/// Brute force: distances from the pin to a fine grid on each box must fall in
/// the analytic pinned set, and each component's endpoints must be approached.
#[test]
fn pinned_set_of_six_boxes_matches_a_grid_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let family = loop {
        let f = random::disjoint_boxes(&mut rng, 2, 6);
        if f.len() == 6 {
            break f;
        }
    };
    let pin = Point::new(vec![rat(rng.random_range(-100..100), 4), rat(7, 3)]);
    let set = pinned_distance_set(&pin, &family).unwrap();
    let x = pin.to_f64();
    let steps = 200;
    let mut seen = vec![(f64::INFINITY, 0f64); set.len()];
    for p in family.primitives() {
        let Primitive::AxisBox { lo, hi } = p else {
            unreachable!()
        };
        let (lo, hi) = (lo.to_f64(), hi.to_f64());
        for a in 0..=steps {
            for b in 0..=steps {
                let y0 = lo[0] + (hi[0] - lo[0]) * a as f64 / steps as f64;
                let y1 = lo[1] + (hi[1] - lo[1]) * b as f64 / steps as f64;
                let r = ((y0 - x[0]).powi(2) + (y1 - x[1]).powi(2)).sqrt();
                let k = set
                    .locate_f64(r, 1e-12)
                    .expect("grid distance outside the pinned set");
                seen[k].0 = seen[k].0.min(r);
                seen[k].1 = seen[k].1.max(r);
            }
        }
    }
    for (iv, (lo, hi)) in set.intervals().iter().zip(&seen) {
        // Box sides are at most 50 units, so grid spacing is at most 1/4.
        let h = 0.25;
        assert!(lo - iv.lo() <= h, "component {iv}: scanned min {lo}");
        assert!(iv.hi() - hi <= h, "component {iv}: scanned max {hi}");
    }
    let r = check_pinned_sampling(&pin, &family, 50_000, 9).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
}
