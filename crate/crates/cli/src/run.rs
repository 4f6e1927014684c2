use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;

use density_lab::constructions::{
    build_annuli, build_boxes, canonical_schedule, AnnuliConstructionParams, BoxConstruction,
    BoxConstructionParams, Construction, ScheduleKind,
};
use density_lab::exact::int;
use density_lab::geometry::{pinned_distance_set, Point};
use density_lab::io::{construction_from_json, construction_to_json, parse_point, parse_rational};
use density_lab::measure::mc::{mc_volume_centered, DEFAULT_CHUNK};
use density_lab::measure::{
    density_profile, family_ball_measure, pinned_density_profile, write_pinned_profiles_csv,
    write_profile_csv, RadiusSchedule,
};
use density_lab::verify::{
    check_annular_bound_random, check_annular_bound_schedule, check_counterexample,
    check_density_lower_bound, check_mc_crosscheck, check_pinned_density_theorem, check_sharpness,
    check_subadditivity_monotonicity, check_translation_invariance, grid_pins, CrossCheckConfig,
    TranslationConfig, VerificationReport,
};

use crate::{
    emit, BuildArgs, Check, ConstructionArgs, Kind, McArgs, PinnedArgs, Preset, ProfileArgs,
    VerifyArgs,
};

const MC_SCHEMA_VERSION: u32 = 1;

fn construct(kind: Kind, a: &ConstructionArgs) -> Result<Construction> {
    let rational = |s: &Option<String>, name: &str| {
        s.as_deref()
            .map(|v| parse_rational(v).with_context(|| format!("--{name}")))
            .transpose()
    };
    let growth = rational(&a.growth, "growth")?;
    match kind {
        Kind::Boxes => {
            if a.eps0.is_some() || a.start_index.is_some() {
                bail!("--eps0 and --start-index apply to annuli only");
            }
            let mut p = match (rational(&a.eps, "eps")?, a.preset) {
                (Some(eps), _) => BoxConstructionParams::with_epsilon(a.d, eps, a.count),
                (None, Preset::Paper) => BoxConstructionParams::paper(a.d, a.count),
                (None, Preset::Relaxed) => BoxConstructionParams::relaxed(a.d, a.count),
            };
            if let Some(g) = growth {
                p.growth = g;
            }
            Ok(Construction::Boxes(build_boxes(p)?))
        }
        Kind::Annuli => {
            if a.eps.is_some() {
                bail!("--eps applies to boxes only; use --eps0 for annuli");
            }
            let mut p = match rational(&a.eps0, "eps0")? {
                Some(e) => AnnuliConstructionParams::with_epsilon0(a.d, e, a.count),
                None => AnnuliConstructionParams::new(a.d, a.count),
            };
            if a.preset == Preset::Paper {
                p.start_index = 100;
            }
            if let Some(i) = a.start_index {
                p.start_index = i;
            }
            if let Some(g) = growth {
                p.growth = g;
            }
            Ok(Construction::Annuli(build_annuli(p)?))
        }
    }
}

fn load(path: &Path) -> Result<Construction> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    construction_from_json(&text)
        .with_context(|| format!("invalid construction file {}", path.display()))
}

/// `canonical` or `geom:r0,g,n`.
fn schedule(spec: &str, c: &Construction) -> Result<RadiusSchedule> {
    let kind = if spec == "canonical" {
        ScheduleKind::Canonical
    } else if let Some(rest) = spec.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(',').collect();
        let [r0, g, n] = parts.as_slice() else {
            bail!("geometric schedule must be geom:r0,g,n, got {spec:?}");
        };
        ScheduleKind::Geometric {
            r0: parse_rational(r0)?,
            ratio: parse_rational(g)?,
            terms: n
                .trim()
                .parse()
                .with_context(|| format!("bad term count {n:?}"))?,
        }
    } else {
        bail!("unknown schedule {spec:?}; use canonical or geom:r0,g,n");
    };
    Ok(canonical_schedule(c, &kind)?)
}

fn pins(specs: &[String], c: &Construction) -> Result<Vec<Point>> {
    let d = c.dim();
    let mut out = Vec::new();
    for s in specs {
        let s = s.trim();
        if s == "0" {
            out.push(Point::origin(d));
        } else if let Some(n) = s.strip_prefix("grid:") {
            let n: usize = n.parse().with_context(|| format!("bad grid size {n:?}"))?;
            if n < 2 {
                bail!("grid size must be at least 2");
            }
            let Construction::Boxes(b) = c else {
                bail!("grid pins need a box construction");
            };
            out.extend(grid_pins(b, 1, n));
            out.extend(grid_pins(b, 2, n));
        } else {
            let p = parse_point(s)?;
            if p.dim() != d {
                bail!(
                    "pin {s:?} has {} coordinates, construction has dimension {d}",
                    p.dim()
                );
            }
            out.push(p);
        }
    }
    Ok(out)
}

fn pin_lines(path: &Path) -> Result<Vec<String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub fn build(a: &BuildArgs) -> Result<()> {
    let c = construct(a.kind, &a.construction)?;
    emit(a.output.as_ref(), &(construction_to_json(&c) + "\n"))?;
    let certs = c.certificates();
    let held = certs.iter().filter(|c| c.holds).count();
    let mut summary = format!(
        "{} d={} N={}: {held}/{} certificates hold (exact)\n",
        c.kind(),
        c.dim(),
        c.family().len(),
        certs.len()
    );
    let mut names: Vec<&str> = Vec::new();
    for c in &certs {
        if !names.contains(&c.name) {
            names.push(c.name);
        }
    }
    for name in names {
        let n = certs.iter().filter(|c| c.name == name).count();
        summary.push_str(&format!("  {name}: {n} indices\n"));
    }
    // Keep stdout clean when it carries the JSON.
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

pub fn profile(a: &ProfileArgs) -> Result<()> {
    let c = load(&a.file)?;
    let s = schedule(&a.schedule, &c)?;
    let mut buf = Vec::new();
    write_profile_csv(&density_profile(c.family(), &s)?, &mut buf)?;
    emit(a.output.as_ref(), &String::from_utf8(buf)?)
}

pub fn pinned(a: &PinnedArgs) -> Result<()> {
    let c = load(&a.file)?;
    let s = schedule(&a.schedule, &c)?;
    let mut specs = a.pins.clone();
    if let Some(path) = &a.pins_file {
        specs.extend(pin_lines(path)?);
    }
    if specs.is_empty() {
        bail!("give at least one --pin or a --pins-file");
    }
    let mut profiles = Vec::new();
    for pin in pins(&specs, &c)? {
        let set = pinned_distance_set(&pin, c.family())?;
        let prof = pinned_density_profile(&set, &s)?;
        profiles.push((pin, prof));
    }
    let mut buf = Vec::new();
    write_pinned_profiles_csv(&profiles, &mut buf)?;
    emit(a.output.as_ref(), &String::from_utf8(buf)?)
}

fn combine(check: &str, reports: Vec<VerificationReport>) -> VerificationReport {
    if reports.len() == 1 {
        return reports.into_iter().next().unwrap();
    }
    let mut all = VerificationReport::new(check);
    all.param("pins", reports.len());
    for (k, r) in reports.into_iter().enumerate() {
        all.absorb(&format!("pin {k}: "), r);
    }
    all.finish()
}

fn boxes_of(c: &Construction) -> Result<&BoxConstruction> {
    match c {
        Construction::Boxes(b) => Ok(b),
        Construction::Annuli(_) => bail!("this check needs a box construction"),
    }
}

pub fn verify(a: &VerifyArgs) -> Result<u8> {
    let seed = a.seed.unwrap_or(0);
    let default_kind = match a.check {
        Check::Counterexample | Check::DensityBound | Check::Translation => Kind::Boxes,
        _ => Kind::Annuli,
    };
    let needs_construction = !matches!(a.check, Check::McCrosscheck)
        && !(a.check == Check::AnnularBound && a.random.is_some());
    let c = if !needs_construction {
        None
    } else if let Some(path) = &a.construction {
        Some(load(path)?)
    } else {
        Some(construct(a.kind.unwrap_or(default_kind), &a.params)?)
    };
    let sched =
        |c: &Construction, default: &str| schedule(a.schedule.as_deref().unwrap_or(default), c);
    let pin_specs = |default: &str| -> Vec<String> {
        if a.pins.is_empty() {
            vec![default.to_string()]
        } else {
            a.pins.clone()
        }
    };

    let report = match (a.check, &c) {
        (Check::AnnularBound, _) if a.random.is_some() => {
            check_annular_bound_random(a.random.unwrap(), a.radii, seed)?
        }
        (Check::McCrosscheck, _) => {
            let mut cfg = CrossCheckConfig {
                seed,
                ..CrossCheckConfig::default()
            };
            if let Some(n) = a.cases {
                cfg.cases = n;
            }
            if let Some(n) = a.samples {
                cfg.samples = n;
                cfg.pinned_samples = n;
            }
            check_mc_crosscheck(&cfg)?
        }
        (check, Some(c)) => match check {
            Check::AnnularBound => {
                check_annular_bound_schedule(c.family(), &sched(c, "canonical")?)?
            }
            Check::Theorem => {
                let s = sched(c, "canonical")?;
                let reports = pins(&pin_specs("0"), c)?
                    .iter()
                    .map(|p| check_pinned_density_theorem(c.family(), p, &s))
                    .collect::<Result<Vec<_>, _>>()?;
                combine("theorem", reports)
            }
            Check::Translation => {
                let x = match &a.shift {
                    Some(s) => parse_point(s)?,
                    None => {
                        let mut v = vec![int(0); c.dim()];
                        v[0] = int(1);
                        Point::new(v)
                    }
                };
                if x.dim() != c.dim() {
                    bail!(
                        "shift has {} coordinates, construction has dimension {}",
                        x.dim(),
                        c.dim()
                    );
                }
                let cfg = TranslationConfig {
                    samples: a.samples.unwrap_or(1_000_000),
                    seed,
                };
                check_translation_invariance(c.family(), &x, &sched(c, "geom:16,2,8")?, &cfg)?
            }
            Check::Submon => {
                let f = c.family();
                if f.len() < 2 {
                    bail!("submon needs at least two primitives to split");
                }
                let (even, odd): (Vec<usize>, Vec<usize>) = (0..f.len()).partition(|i| i % 2 == 0);
                check_subadditivity_monotonicity(
                    &f.select(&even),
                    &f.select(&odd),
                    &sched(c, "canonical")?,
                )?
            }
            Check::Counterexample => {
                let b = boxes_of(c)?;
                check_counterexample(b, &pins(&pin_specs("grid:3"), c)?, None)?
            }
            Check::Sharpness => {
                let Construction::Annuli(an) = c else {
                    bail!("sharpness needs an annuli construction");
                };
                let s = a
                    .schedule
                    .as_deref()
                    .map(|spec| schedule(spec, c))
                    .transpose()?;
                check_sharpness(an, &pins(&pin_specs("0"), c)?, s.as_ref())?
            }
            Check::DensityBound => check_density_lower_bound(boxes_of(c)?)?,
            Check::McCrosscheck => unreachable!(),
        },
        (_, None) => return Err(anyhow!("no construction available")),
    };
    emit(a.output.as_ref(), &(report.to_json() + "\n"))?;
    eprintln!(
        "{}: {} ({} checked items)",
        report.check,
        report.verdict,
        report.checked_items().count()
    );
    Ok(report.verdict.exit_code() as u8)
}

pub fn mc(a: &McArgs) -> Result<()> {
    let c = load(&a.file)?;
    let r = parse_rational(&a.radius).context("--radius")?;
    let center = match &a.center {
        Some(s) => parse_point(s)?,
        None => Point::origin(c.dim()),
    };
    if center.dim() != c.dim() {
        bail!(
            "centre has {} coordinates, construction has dimension {}",
            center.dim(),
            c.dim()
        );
    }
    let seed = a.seed.unwrap_or(0);
    let est = mc_volume_centered(c.family(), &center, &r, a.samples, seed, DEFAULT_CHUNK);
    let analytic = if center.is_origin() {
        let b = family_ball_measure(c.family(), &r)?;
        json!({ "low": b.low.to_f64(), "high": b.high.to_f64(), "exact": b.exact })
    } else {
        serde_json::Value::Null
    };
    let out = json!({
        "schema_version": MC_SCHEMA_VERSION,
        "construction": c.kind(),
        "radius": r.to_string(),
        "center": center.to_string(),
        "estimate": est,
        "analytic": analytic,
    });
    emit(
        a.output.as_ref(),
        &(serde_json::to_string_pretty(&out)? + "\n"),
    )
}
