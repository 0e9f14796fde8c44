use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use dsym_core::arith::{gcd_i64, Rational};
use dsym_core::counting::{default_workers, growth_report_with_workers, CountKind};
use dsym_core::fiber::{build_fiber_decomposition, fiber_cylinder_index};
use dsym_core::sl2z::{cusp_count_formula, cusp_decomposition, orbit_enumerate, TorusPoint};
use dsym_core::surface::{build, components, cone_data, decompose_direction, trace_decompose, DSurface, TwistPoint};
use dsym_core::svconstants::{
    area_restricted_constant, d2_convergence_limit, d2_convergence_sequence, generic_cylinder_constant,
    m_homologous_finite, m_homologous_generic, saddle_torsion_constant_cover, torsion_cylinder_constant, AreaMode,
    SaddleConvention, SpinePart,
};
use dsym_core::{Constant, CylinderDecomposition};

use crate::report::{stdout, write_csv, ReportDocument};
use crate::{Cli, Command, ConstantCmd, Convention, CountObject, JsonArg, Oracle, Part, SurfaceArgs};

/// Orbits are enumerated for display only below this order.
const ORBIT_DISPLAY_LIMIT: u64 = 1000;

fn command_line() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

fn surface(args: &SurfaceArgs) -> Result<DSurface> {
    let twist = TwistPoint::parse(&args.twist, args.d)?;
    Ok(build(args.d, twist)?)
}

fn parse_pair(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("expected 'p,q', got '{s}'"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn parse_filter(s: &str) -> Result<Option<u64>> {
    if s == "all" {
        return Ok(None);
    }
    let m = s
        .strip_prefix("m=")
        .ok_or_else(|| anyhow!("filter must be 'all' or 'm=K', got '{s}'"))?;
    Ok(Some(m.parse().with_context(|| format!("bad class in filter '{s}'"))?))
}

/// Prints the human-readable text unless JSON goes to stdout, then emits JSON.
fn finish(mut doc: ReportDocument, text: &str, out: &JsonArg, start: Instant) -> Result<()> {
    doc.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    match &out.json {
        None => stdout(text)?,
        Some(None) => doc.emit(None)?,
        Some(Some(path)) => {
            stdout(text)?;
            doc.emit(Some(path))?;
        }
    }
    Ok(())
}

fn constant_text(c: &Constant) -> String {
    format!("{}\n  exact:   {}\n  tag:     {}\n  decimal: {}\n", c.description, c, c.tag.label(), c.value())
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let start = Instant::now();
    match cli.command {
        Command::SurfaceInfo { surface: sa, exact, out } => {
            let s = surface(&sa)?;
            if exact && !s.twist().is_exact() {
                bail!("--exact needs a twist of integers or fractions p/q, got '{}'", sa.twist);
            }
            surface_info(&s, &out, start)?;
        }
        Command::Decompose { surface: sa, dir, oracle, out } => {
            let s = surface(&sa)?;
            let (p, q) = parse_pair(&dir)?;
            if gcd_i64(p, q) != 1 {
                bail!("direction ({p},{q}) is not primitive");
            }
            return decompose(&s, p, q, oracle, &out, start);
        }
        Command::Constants { which } => constants(which, start)?,
        Command::Count { object, surface: sa, t_list, workers, filter, csv, out } => {
            let s = surface(&sa)?;
            let kind = match (object, parse_filter(&filter)?) {
                (CountObject::Cylinders, None) => CountKind::Cylinders,
                (CountObject::Cylinders, Some(_)) => bail!("--filter applies to saddle counts only"),
                (CountObject::Saddles, None) => CountKind::SaddlesAll,
                (CountObject::Saddles, Some(m)) => CountKind::SaddlesClass(m),
            };
            let workers = workers.unwrap_or_else(default_workers);
            count(&s, &t_list, kind, workers, csv.as_deref(), &out, start)?;
        }
        Command::Convergence { d, max_n, part, out } => convergence(d, max_n, part, &out, start)?,
        Command::Check { seed, cases, max_d } => return check(seed, cases, max_d),
    }
    Ok(ExitCode::SUCCESS)
}

fn surface_info(s: &DSurface, out: &JsonArg, start: Instant) -> Result<()> {
    let d = s.d();
    let mut text = format!("d: {d}\ntwist: {}\nmode: {}\n", s.twist(), if s.twist().is_exact() { "exact" } else { "float" });
    if d == 1 {
        text += "surface: marked torus\n";
    }
    text += &format!("degenerate={}\n", s.is_degenerate());
    let mut details = json!({
        "d": d,
        "twist": s.twist().to_string(),
        "exact": s.twist().is_exact(),
        "degenerate": s.is_degenerate(),
    });
    if s.is_degenerate() {
        let c = components(s)?;
        text += &format!(
            "components: {} tori of area {}\nhorizontal: {} cylinders of width {} per component\nvertical: {} cylinders of width {} per component\n",
            c.components,
            c.area_per_component,
            c.horizontal.count_per_component,
            c.horizontal.width,
            c.vertical.count_per_component,
            c.vertical.width
        );
        details["components"] = serde_json::to_value(&c)?;
    } else {
        let cd = cone_data(s)?;
        text += &format!("genus: {}\neuler characteristic: {}\n", cd.genus, cd.euler_characteristic);
        for c in &cd.cone_points {
            text += &format!("cone point at ({}, {}): angle 2π·{}\n", c.base[0], c.base[1], c.angle_multiple);
        }
        details["genus"] = json!(cd.genus);
        details["cone_data"] = serde_json::to_value(&cd)?;
    }
    let (i, on) = fiber_cylinder_index(s.twist());
    text += &format!("fiber cylinder: C_{i}{}\n", if on { " (bottom boundary)" } else { "" });
    details["fiber_cylinder"] = json!({ "index": i, "on_boundary": on });
    if let Some(p) = s.twist().as_torus_point() {
        if p.order() <= ORBIT_DISPLAY_LIMIT {
            let o = orbit_enumerate(p)?;
            text += &format!("orbit size: {}\n", o.len());
            details["orbit_size"] = json!(o.len());
        }
    }
    let mut doc = ReportDocument::new(&command_line(), json!({ "d": d, "twist": s.twist().to_string() }));
    doc.details = details;
    finish(doc, &text, out, start)
}

fn decomposition_text(label: &str, c: &CylinderDecomposition) -> String {
    let mut t = format!("{label}: direction ({},{}), |u| = {}\n", c.direction.0, c.direction.1, c.norm());
    t += &format!("  {:>5} {:>6} {:>12} {:>12}\n", "count", "period", "width", "height");
    for g in &c.groups {
        t += &format!("  {:>5} {:>6} {:>12.6} {:>12.6}\n", g.count, g.period, g.width, g.height);
    }
    t += &format!("  {c}\n");
    t
}

fn decompose(s: &DSurface, p: i64, q: i64, oracle: Oracle, out: &JsonArg, start: Instant) -> Result<ExitCode> {
    let mut text = String::new();
    let mut details = json!({});
    let formula = matches!(oracle, Oracle::Formula | Oracle::Both).then(|| decompose_direction(s, p, q)).transpose()?;
    let traced = matches!(oracle, Oracle::Trace | Oracle::Both).then(|| trace_decompose(s, p, q)).transpose()?;
    if let Some(f) = &formula {
        text += &decomposition_text("formula", f);
        details["formula"] = serde_json::to_value(f)?;
    }
    if let Some(t) = &traced {
        text += &decomposition_text("trace", t);
        details["trace"] = serde_json::to_value(t)?;
    }
    let mut code = ExitCode::SUCCESS;
    if let (Some(f), Some(t)) = (&formula, &traced) {
        let ok = f.same_cylinders(t, 1e-12);
        text += if ok { "MATCH\n" } else { "MISMATCH\n" };
        details["match"] = json!(ok);
        if !ok {
            code = ExitCode::FAILURE;
        }
    }
    let mut doc = ReportDocument::new(&command_line(), json!({ "d": s.d(), "twist": s.twist().to_string(), "dir": [p, q] }));
    doc.details = details;
    finish(doc, &text, out, start)?;
    Ok(code)
}

fn torsion_orbit(d: u64, n: u64) -> Result<dsym_core::OrbitSet> {
    Ok(orbit_enumerate(&TorusPoint::from_parts(d as i64, 0, n as i64, d)?)?)
}

fn constants(which: ConstantCmd, start: Instant) -> Result<()> {
    let (params, constants, mut text, out, details) = match which {
        ConstantCmd::Generic { d, out } => {
            (json!({ "kind": "generic", "d": d }), vec![generic_cylinder_constant(d)?], String::new(), out, json!(null))
        }
        ConstantCmd::Torsion { d, n, out } => {
            (json!({ "kind": "torsion", "d": d, "n": n }), vec![torsion_cylinder_constant(d, n)?], String::new(), out, json!(null))
        }
        ConstantCmd::Saddle { d, n, out } => {
            (json!({ "kind": "saddle", "d": d, "n": n }), vec![saddle_torsion_constant_cover(d, n)?], String::new(), out, json!(null))
        }
        ConstantCmd::Mhom { d, m, n, convention, out } => {
            let conv = match convention {
                Convention::All => SaddleConvention::AllConnections,
                Convention::PerChain => SaddleConvention::PerChain,
            };
            let c = match n {
                None => m_homologous_generic(d, m, conv)?,
                Some(n) => m_homologous_finite(d, m, &torsion_orbit(d, n)?, conv)?,
            };
            (json!({ "kind": "mhom", "d": d, "m": m, "n": n, "convention": conv }), vec![c], String::new(), out, json!(null))
        }
        ConstantCmd::Area { d, i, a, b, n, out } => {
            let ra: Rational = a.parse().map_err(|e| anyhow!("bad --a: {e}"))?;
            let rb: Rational = b.parse().map_err(|e| anyhow!("bad --b: {e}"))?;
            let f = build_fiber_decomposition(d)?;
            let c = match n {
                None => area_restricted_constant(&f, i, &ra, &rb, AreaMode::Generic)?,
                Some(n) => area_restricted_constant(&f, i, &ra, &rb, AreaMode::Orbit(&torsion_orbit(d, n)?))?,
            };
            (json!({ "kind": "area", "d": d, "i": i, "a": a, "b": b, "n": n }), vec![c], String::new(), out, json!(null))
        }
        ConstantCmd::Cusps { n, out } => {
            let formula = cusp_count_formula(n)?;
            let orbit = torsion_orbit(1, n)?;
            let signed = cusp_decomposition(&orbit, false).total;
            let unsigned = cusp_decomposition(&orbit, true).total;
            let c = Constant::rational(formula.clone(), format!("cusp count formula, n={n}"));
            let text = format!("cusps of the order-{n} orbit: p ~ -p identified {unsigned}, signed {signed}\n");
            let details = json!({ "identified": unsigned, "signed": signed, "formula": formula });
            (json!({ "kind": "cusps", "n": n }), vec![c], text, out, details)
        }
    };
    text = constants.iter().map(constant_text).collect::<String>() + &text;
    let mut doc = ReportDocument::new(&command_line(), params);
    doc.constants = constants;
    doc.details = details;
    finish(doc, &text, &out, start)
}

fn count(
    s: &DSurface,
    ts: &[f64],
    kind: CountKind,
    workers: usize,
    csv: Option<&Path>,
    out: &JsonArg,
    start: Instant,
) -> Result<()> {
    let report = growth_report_with_workers(s, ts, kind, workers)?;
    let mut text = format!(
        "{} {}\npredicted constant {} = {}, N/T² -> {}\n",
        report.kind,
        report.surface,
        report.constant,
        report.constant.value(),
        report.constant.growth_rate()
    );
    text += &format!("{:>12} {:>14} {:>12} {:>12} {:>10}\n", "T", "N", "N/T²", "predicted", "rel_error");
    for r in &report.rows {
        text += &format!("{:>12} {:>14} {:>12.6} {:>12.6} {:>10.6}\n", r.t, r.n, r.n_over_t2, r.predicted, r.rel_error);
    }
    if let Some(p) = csv {
        write_csv(&report, p)?;
    }
    let mut doc = ReportDocument::new(
        &command_line(),
        json!({ "d": s.d(), "twist": s.twist().to_string(), "kind": kind, "T_list": ts, "workers": workers }),
    );
    doc.constants = vec![report.constant.clone()];
    doc.counts = Some(report);
    finish(doc, &text, out, start)
}

fn convergence(d: u64, max_n: u64, part: Part, out: &JsonArg, start: Instant) -> Result<()> {
    if d != 2 {
        bail!("convergence is defined for d = 2 only, got {d}");
    }
    let part = match part {
        Part::Lattice => SpinePart::Lattice,
        Part::Shifted => SpinePart::Shifted,
    };
    let ns: Vec<u64> = (3..=max_n).collect();
    let rows = d2_convergence_sequence(d, &ns, part)?;
    let limit = d2_convergence_limit();
    let mut text = format!("{:>5} {:>10} {:>24} {:>20} {:>12} {:>6}\n", "n", "branch", "c1(n)", "decimal", "gap", "hits");
    for r in &rows {
        text += &format!(
            "{:>5} {:>10} {:>24} {:>20.15} {:>12.3e} {:>6}\n",
            r.n,
            r.branch.label(),
            r.value.to_string(),
            r.value.value(),
            r.value.value() - limit.value(),
            r.spine_hits
        );
    }
    text += &format!("limit: {} = {}\n", limit, limit.value());
    let mut doc = ReportDocument::new(&command_line(), json!({ "d": d, "max_n": max_n, "part": part }));
    doc.constants = vec![limit];
    doc.convergence = Some(rows);
    finish(doc, &text, out, start)
}

fn check(seed: u64, cases: u64, max_d: u64) -> Result<ExitCode> {
    if max_d == 0 {
        bail!("--max-d must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut mismatches = vec![];
    while done < cases {
        let d = rng.gen_range(1..=max_d);
        let den = rng.gen_range(2..=12i64);
        let twist = TwistPoint::ratio(rng.gen_range(0..d as i64 * den), rng.gen_range(0..d as i64 * den), den, d)?;
        let s = build(d, twist)?;
        let (p, q) = (rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6));
        if s.is_degenerate() || gcd_i64(p, q) != 1 {
            continue;
        }
        done += 1;
        let f = decompose_direction(&s, p, q)?;
        let ok = trace_decompose(&s, p, q).map(|t| f.same_cylinders(&t, 1e-12)).unwrap_or(false);
        if !ok {
            mismatches.push(format!("d={d} twist={} dir=({p},{q})", s.twist()));
        }
    }
    let mut text = format!("seed {seed}: {} of {cases} decompositions MATCH\n", cases - mismatches.len() as u64);
    for m in &mismatches {
        text += &format!("MISMATCH {m}\n");
    }
    stdout(&text)?;
    Ok(if mismatches.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
