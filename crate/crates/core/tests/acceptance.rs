//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero on any FAIL.
//!
//! Run with `cargo test -p dsym-core --test acceptance`.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dsym_core::arith::{divisor_count, divisors, euler_phi, gcd, gcd3, orbit_size, Rational};
use dsym_core::counting::{count_cylinders_many, count_many, count_saddles_many, CountKind};
use dsym_core::fiber::build_fiber_decomposition;
use dsym_core::sl2z::{cusp_count_formula, cusp_decomposition, orbit_classes_on_kernel, orbit_enumerate, TorusPoint};
use dsym_core::surface::{build, components, components_formula, decompose_direction, trace_decompose, DSurface, TwistPoint};
use dsym_core::svconstants::{
    d2_closed_form, finite_orbit_from_fiber, generic_cylinder_constant, generic_cylinder_constant_divisor_form,
    generic_cylinder_constant_gcd_form, m_homologous_generic, saddle_torsion_constant, torsion_cylinder_constant,
    SaddleConvention,
};

const WORKERS: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit: f64) -> bool {
    elapsed.as_secs_f64() < limit
}

fn generic_twist(d: u64) -> TwistPoint {
    TwistPoint::float(2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0, d).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

fn c1_formula_identity() -> Outcome {
    let t = Instant::now();
    let bad: Vec<u64> = (1..=2000)
        .filter(|&d| generic_cylinder_constant_gcd_form(d).unwrap() != generic_cylinder_constant_divisor_form(d).unwrap())
        .collect();
    let e = t.elapsed();
    outcome(bad.is_empty() && within(e, 1.0), format!("d <= 2000, mismatches {bad:?}, {:.3} s", e.as_secs_f64()))
}

fn c2_orbit_sizes() -> Outcome {
    let t = Instant::now();
    let mut bad = vec![];
    for n in 1..=40u64 {
        let o = orbit_enumerate(&TorusPoint::from_parts(1, 0, n as i64, 1).unwrap()).unwrap();
        if o.len() as u64 != orbit_size(n).unwrap() {
            bad.push(n);
        }
    }
    let e = t.elapsed();
    outcome(bad.is_empty() && within(e, 10.0), format!("n <= 40, mismatches {bad:?}, {:.3} s", e.as_secs_f64()))
}

fn c3_orbit_classes() -> Outcome {
    let t = Instant::now();
    let mut bad = vec![];
    for d in 1..=10u64 {
        for m in 1..=12u64 {
            let got = orbit_classes_on_kernel(d, m).unwrap() as u64;
            if got != divisor_count(m).unwrap() {
                bad.push((d, m, got));
            }
        }
    }
    let e = t.elapsed();
    outcome(bad.is_empty() && within(e, 30.0), format!("d <= 10, m <= 12, mismatches {bad:?}, {:.3} s", e.as_secs_f64()))
}

fn c4_decomposition_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut failures = vec![];
    for d in 1..=6u64 {
        let mut twists = 0;
        while twists < 25 {
            let den = rng.gen_range(2..=12i64);
            let x = rng.gen_range(0..d as i64 * den);
            let y = rng.gen_range(0..d as i64 * den);
            let s = build(d, TwistPoint::ratio(x, y, den, d).unwrap()).unwrap();
            if s.is_degenerate() {
                continue;
            }
            twists += 1;
            for p in -5i64..=5 {
                for q in -5i64..=5 {
                    if gcd(p.unsigned_abs(), q.unsigned_abs()) != 1 {
                        continue;
                    }
                    checked += 1;
                    let f = decompose_direction(&s, p, q).unwrap();
                    let ok = match trace_decompose(&s, p, q) {
                        Ok(t) => {
                            f.same_cylinders(&t, 1e-12)
                                && f.exact_area() == Some(Rational::from(d))
                                && t.exact_area() == Some(Rational::from(d))
                        }
                        Err(_) => false,
                    };
                    if !ok {
                        failures.push(format!("d={d} twist={} dir=({p},{q})", s.twist()));
                    }
                }
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} (surface, direction) pairs, {} mismatches {:?}", failures.len(), &failures[..failures.len().min(5)]),
    )
}

fn c5_d2_closed_forms() -> Outcome {
    let t = Instant::now();
    let f = build_fiber_decomposition(2).unwrap();
    let mut bad = vec![];
    for n in 2..=200u64 {
        let closed = d2_closed_form(n).unwrap().coefficient;
        let orbit = orbit_enumerate(&TorusPoint::from_parts(2, 0, n as i64, 2).unwrap()).unwrap();
        let by_leaves = torsion_cylinder_constant(2, n).unwrap().coefficient;
        let Ok(by_orbit) = finite_orbit_from_fiber(&f, &orbit).map(|c| c.coefficient) else {
            bad.push(format!("n={n}: order-{n} points of T²_2 are lattice points, closed {closed}"));
            continue;
        };
        if by_orbit != by_leaves || by_orbit != closed {
            bad.push(format!("n={n}: orbit {by_orbit}, leaves {by_leaves}, closed {closed}"));
        }
    }
    let e = t.elapsed();
    let odd_ok = bad.iter().all(|s| {
        let n: u64 = s[2..s.find(':').unwrap()].parse().unwrap();
        n % 2 == 0
    });
    outcome(
        bad.is_empty() && within(e, 5.0),
        format!(
            "2 <= n <= 200: {} disagreements (odd n all agree: {odd_ok}), first {:?}, {:.3} s",
            bad.len(),
            &bad[..bad.len().min(4)],
            e.as_secs_f64()
        ),
    )
}

fn cylinder_growth(s: &DSurface, t: f64) -> f64 {
    count_cylinders_many(s, &[t], WORKERS).unwrap()[0] as f64 / (t * t)
}

fn c6_generic_cylinders() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = vec![];
    for (d, tol) in [(2u64, 0.03), (1, 0.03), (6, 0.05)] {
        let s = build(d, generic_twist(d)).unwrap();
        let pred = generic_cylinder_constant(d).unwrap().growth_rate();
        let got = cylinder_growth(&s, 3000.0);
        let err = rel(got, pred);
        pass &= err <= tol;
        parts.push(format!("d={d}: N/T² {got:.4} vs {pred:.4} ({:.2}%)", 100.0 * err));
    }
    let e = t.elapsed();
    outcome(pass, format!("T=3000, {}, {:.1} s", parts.join("; "), e.as_secs_f64()))
}

fn c7_torsion_cylinders() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for (d, n, num, den) in [(2u64, 3u64, 35, 16), (1, 2, 5, 3)] {
        let s = build(d, TwistPoint::ratio(d as i64, 0, n as i64, d).unwrap()).unwrap();
        let c = torsion_cylinder_constant(d, n).unwrap();
        pass &= c.coefficient == Rational::new(num, den);
        let pred = c.growth_rate();
        let got = cylinder_growth(&s, 3000.0);
        let err = rel(got, pred);
        pass &= err <= 0.03;
        parts.push(format!("d={d}, n={n}: c={c}, N/T² {got:.4} vs {pred:.4} ({:.2}%)", 100.0 * err));
    }
    outcome(pass, format!("T=3000, {}", parts.join("; ")))
}

fn saddle_growth(s: &DSurface, t: f64, filter: Option<u64>) -> (u64, f64) {
    let n = count_saddles_many(s, &[t], filter, WORKERS).unwrap()[0];
    (n, n as f64 / (t * t))
}

fn c8_saddles() -> Outcome {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut pass = true;
    let mut parts = vec![];
    for (label, tw) in [("generic", generic_twist(1)), ("(1/5,0)", TwistPoint::ratio(1, 0, 5, 1).unwrap())] {
        let s = build(1, tw).unwrap();
        let (_, got) = saddle_growth(&s, 2000.0, None);
        let err = rel(got, two_pi);
        pass &= err <= 0.03;
        parts.push(format!("{label}: N/T² {got:.4} vs 2π ({:.2}%)", 100.0 * err));
    }
    for d in [2u64, 3] {
        for tw in [generic_twist(1), TwistPoint::ratio(1, 0, 5, 1).unwrap()] {
            let base = build(1, tw).unwrap();
            let cover = build(d, tw.with_modulus(d).unwrap()).unwrap();
            let (nb, _) = saddle_growth(&base, 1000.0, None);
            let (nc, _) = saddle_growth(&cover, 1000.0, None);
            pass &= nc == d * nb;
            parts.push(format!("cover d={d} twist {}: {nc} = {d}×{nb}: {}", base.twist(), nc == d * nb));
        }
    }
    outcome(pass, parts.join("; "))
}

fn c9_m_classes() -> Outcome {
    let mut pass = true;
    let mut parts = vec![];
    for d in [2u64, 4, 6] {
        let s = build(d, generic_twist(d)).unwrap();
        let ts = [2000.0];
        let total = count_saddles_many(&s, &ts, None, WORKERS).unwrap()[0] as f64;
        for m in divisors(d).unwrap() {
            let n = count_saddles_many(&s, &ts, Some(m), WORKERS).unwrap()[0] as f64;
            let pred = m_homologous_generic(d, m, SaddleConvention::AllConnections).unwrap().growth_rate();
            let got = n / 4e6;
            let err = rel(got, pred);
            let frac = n / total;
            let want = orbit_size(d / m).unwrap() as f64 / (d * d) as f64;
            let ferr = rel(frac, want);
            pass &= err <= 0.05 && ferr <= 0.05;
            parts.push(format!("d={d} m={m}: {:.2}% / fraction {frac:.4} vs {want:.4}", 100.0 * err));
        }
    }
    outcome(pass, format!("T=2000, {}", parts.join("; ")))
}

fn c10_degenerate() -> Outcome {
    let t = Instant::now();
    let mut bad = vec![];
    let mut n = 0;
    for d in 1..=8u64 {
        for j in 0..d as i64 {
            for k in 0..d as i64 {
                n += 1;
                let s = build(d, TwistPoint::ratio(j, k, 1, d).unwrap()).unwrap();
                let got = components(&s).unwrap();
                let want = components_formula(d, j, k);
                if got != want || got.components != gcd3(j, k, d) {
                    bad.push((d, j, k));
                }
            }
        }
    }
    let e = t.elapsed();
    outcome(bad.is_empty() && within(e, 10.0), format!("{n} lattice twists, mismatches {bad:?}, {:.3} s", e.as_secs_f64()))
}

fn c11_cusps() -> Outcome {
    let ns: Vec<u64> = std::iter::once(2).chain(3..=24).collect();
    let mut best: Option<(bool, Vec<u64>)> = None;
    for identify in [true, false] {
        let mut bad = vec![];
        for &n in &ns {
            let orbit = orbit_enumerate(&TorusPoint::from_parts(1, 0, n as i64, 1).unwrap()).unwrap();
            let got = cusp_decomposition(&orbit, identify).total as i64;
            if Rational::from_integer(got) != cusp_count_formula(n).unwrap() {
                bad.push(n);
            }
        }
        if best.as_ref().is_none_or(|(_, b)| bad.len() < b.len()) {
            best = Some((identify, bad));
        }
    }
    let (identify, bad) = best.unwrap();
    let detail = bad
        .iter()
        .map(|&n| {
            let orbit = orbit_enumerate(&TorusPoint::from_parts(1, 0, n as i64, 1).unwrap()).unwrap();
            format!("n={n}: {} vs {}", cusp_decomposition(&orbit, identify).total, cusp_count_formula(n).unwrap())
        })
        .collect::<Vec<_>>();
    outcome(
        bad.is_empty(),
        format!("convention: {}, mismatches {detail:?}", if identify { "p ~ -p identified" } else { "signed" }),
    )
}

fn c12_identities() -> Outcome {
    let mut bad = vec![];
    for n in 1..=500u64 {
        let s: u64 = (1..=n)
            .map(|a| {
                let g = gcd(a, n);
                n / g * euler_phi(g).unwrap()
            })
            .sum();
        if s != orbit_size(n).unwrap() {
            bad.push(format!("leaf sum n={n}"));
        }
        if n >= 2 {
            let c = saddle_torsion_constant(n).unwrap();
            if c.coefficient != Rational::from_integer(2) || c.tag != dsym_core::Transcendental::Zeta2 {
                bad.push(format!("saddle n={n}"));
            }
        }
    }
    for d in 1..=2000u64 {
        let s: u64 = divisors(d).unwrap().into_iter().map(|q| orbit_size(q).unwrap()).sum();
        if s != d * d {
            bad.push(format!("divisor sum d={d}"));
        }
    }
    outcome(bad.is_empty(), format!("failures {bad:?}"))
}

fn c13_determinism() -> Outcome {
    let surfaces = [
        build(2, generic_twist(2)).unwrap(),
        build(3, TwistPoint::ratio(2, 7, 5, 3).unwrap()).unwrap(),
        build(6, TwistPoint::float(0.123, 4.567, 6).unwrap()).unwrap(),
    ];
    let ts = [50.0, 200.0, 400.0];
    let mut pass = true;
    for s in &surfaces {
        for kind in [CountKind::Cylinders, CountKind::SaddlesAll, CountKind::SaddlesClass(1)] {
            let base = count_many(s, &ts, kind, 1).unwrap();
            for w in [1, 2, 8] {
                for _ in 0..2 {
                    pass &= count_many(s, &ts, kind, w).unwrap() == base;
                }
            }
        }
    }
    outcome(pass, "3 surfaces × 3 kinds × workers {1,2,8} × 2 runs")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("exact cylinder-constant identity", c1_formula_identity),
        ("orbit sizes φψ(n)", c2_orbit_sizes),
        ("orbit classes on T²_d[m]", c3_orbit_classes),
        ("decomposition oracle equivalence", c4_decomposition_oracles),
        ("d=2 closed forms", c5_d2_closed_forms),
        ("generic cylinder growth", c6_generic_cylinders),
        ("torsion cylinder growth", c7_torsion_cylinders),
        ("saddle connection growth", c8_saddles),
        ("m-homologous classes", c9_m_classes),
        ("degenerate structure", c10_degenerate),
        ("cusp counts", c11_cusps),
        ("identity suite", c12_identities),
        ("determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
