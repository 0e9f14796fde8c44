//! N(T) for cylinders and saddle connections, with growth reports.
//!
//! Every sweep runs once up to the largest T and buckets each event by the
//! first T that admits it; prefix sums then give N at every T. Rows of the
//! sweep are dealt round-robin to worker threads and partial buckets are added,
//! so counts do not depend on the number of workers.

use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, gcd_i64, row_extent};
use crate::error::{Error, Result};
use crate::fiber::build_fiber_decomposition;
use crate::surface::{DSurface, SaddleSweep, TwistPoint};
use crate::svconstants::{
    finite_orbit_from_fiber, generic_cylinder_constant, m_homologous_generic, saddle_generic_constant,
    saddle_orbit_constant, Constant, SaddleConvention,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    Cylinders,
    SaddlesAll,
    SaddlesClass(u64),
}

impl CountKind {
    pub fn saddle_filter(&self) -> Option<Option<u64>> {
        match self {
            CountKind::Cylinders => None,
            CountKind::SaddlesAll => Some(None),
            CountKind::SaddlesClass(m) => Some(Some(*m)),
        }
    }
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountKind::Cylinders => write!(f, "cylinders"),
            CountKind::SaddlesAll => write!(f, "saddles-all"),
            CountKind::SaddlesClass(m) => write!(f, "saddles-m-class({m})"),
        }
    }
}

impl Serialize for CountKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Default worker count: `WORKERS` if set, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("WORKERS")
        .ok()
        .and_then(|w| w.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn check_ts(ts: &[f64]) -> Result<()> {
    if ts.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::Domain("T values must be finite and non-negative".into()));
    }
    if ts.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("T-list must be ascending".into()));
    }
    Ok(())
}

/// Runs `row(r, buckets)` for each row in `rows`, dealt round-robin to workers,
/// and returns the prefix-summed bucket totals.
fn sweep<R>(rows: Vec<i64>, nbuckets: usize, workers: usize, row: R) -> Vec<u64>
where
    R: Fn(i64, &mut [u64]) + Sync,
{
    let workers = workers.max(1).min(rows.len().max(1));
    let partials: Vec<Vec<u64>> = if workers == 1 {
        let mut b = vec![0u64; nbuckets];
        for &r in &rows {
            row(r, &mut b);
        }
        vec![b]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let rows = &rows;
                    let row = &row;
                    scope.spawn(move || {
                        let mut b = vec![0u64; nbuckets];
                        for &r in rows.iter().skip(w).step_by(workers) {
                            row(r, &mut b);
                        }
                        b
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("counting worker panicked")).collect()
        })
    };
    let mut total = vec![0u64; nbuckets];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    let mut acc = 0;
    for t in total.iter_mut() {
        acc += *t;
        *t = acc;
    }
    total
}

/// Cross value u×w in the form the inner loop needs.
#[derive(Clone, Copy)]
enum Twist {
    Exact { x: i128, y: i128, den: i128 },
    Float { h: f64, v: f64, eps: f64 },
}

impl Twist {
    fn of(s: &DSurface) -> Self {
        match s.twist() {
            TwistPoint::Exact(p) => {
                let [x, y] = p.numerators();
                Twist::Exact { x: x as i128, y: y as i128, den: p.den() as i128 }
            }
            TwistPoint::Float { h, v, .. } => Twist::Float { h: *h, v: *v, eps: s.eps() },
        }
    }

    /// (⌊u×w⌋, u×w ∈ Z).
    #[inline]
    fn cross(&self, p: i64, q: i64) -> (i64, bool) {
        match *self {
            Twist::Exact { x, y, den } => {
                let l = p as i128 * y - q as i128 * x;
                (l.div_euclid(den) as i64, l.rem_euclid(den) == 0)
            }
            Twist::Float { h, v, eps } => {
                let l = p as f64 * v - q as f64 * h;
                let n = l.round();
                if (l - n).abs() < eps {
                    (n as i64, true)
                } else {
                    (l.floor() as i64, false)
                }
            }
        }
    }
}

/// N(T_k) for cylinders of width < T_k, for each T_k in the ascending list.
pub fn count_cylinders_many(s: &DSurface, ts: &[f64], workers: usize) -> Result<Vec<u64>> {
    if s.is_degenerate() {
        return Err(Error::Degenerate);
    }
    check_ts(ts)?;
    let Some(&tmax) = ts.last() else { return Ok(vec![]) };
    let d = s.d();
    let gcds: Vec<u64> = (0..d).map(|i| gcd(i, d)).collect();
    let t2s: Vec<f64> = ts.iter().map(|t| t * t).collect();
    let twist = Twist::of(s);
    let pmax = tmax.floor() as i64;
    let rows: Vec<i64> = (-pmax..=pmax).collect();
    let di = d as i64;
    Ok(sweep(rows, ts.len(), workers, |p, buckets| {
        let Some(e) = row_extent(p, tmax) else { return };
        let p2 = (p as i128) * (p as i128);
        let mut add = |period: u64, count: u64, n2: i128| {
            let l2 = (period as i128 * period as i128 * n2) as f64;
            let k = t2s.partition_point(|&t2| t2 <= l2);
            if k < buckets.len() {
                buckets[k] += count;
            }
        };
        for q in -e..=e {
            if gcd_i64(p, q) != 1 {
                continue;
            }
            let n2 = p2 + (q as i128) * (q as i128);
            let (i, integral) = twist.cross(p, q);
            let g0 = gcds[i.rem_euclid(di) as usize];
            add(d / g0, g0, n2);
            if !integral {
                let g1 = gcds[(i + 1).rem_euclid(di) as usize];
                add(d / g1, g1, n2);
            }
        }
    }))
}

pub fn count_cylinders(s: &DSurface, t: f64) -> Result<u64> {
    Ok(count_cylinders_many(s, &[t], 1)?[0])
}

/// Oriented saddle connections with |v| ≤ T_k: 2·d per base holonomy from the
/// first cone point to the second (each lifts to d connections, and each is
/// also traversed backwards).
pub fn count_saddles_many(s: &DSurface, ts: &[f64], filter: Option<u64>, workers: usize) -> Result<Vec<u64>> {
    let sweep_data = SaddleSweep::new(s)?;
    let d = sweep_data.d();
    if let Some(m) = filter {
        if m == 0 || d % m != 0 {
            return Err(Error::NotDivisor(m, d));
        }
    }
    check_ts(ts)?;
    let Some(&tmax) = ts.last() else { return Ok(vec![]) };
    let t2s: Vec<f64> = ts.iter().map(|t| t * t).collect();
    let rows: Vec<i64> = if tmax > 0.0 { sweep_data.rows(tmax).collect() } else { vec![] };
    let weight = 2 * d;
    Ok(sweep(rows, ts.len(), workers, |j, buckets| {
        sweep_data.visit_row(j, tmax, |len2, class, _| {
            if filter.is_some_and(|m| m != class) {
                return;
            }
            let k = t2s.partition_point(|&t2| t2 < len2);
            if k < buckets.len() {
                buckets[k] += weight;
            }
        });
    }))
}

pub fn count_saddles(s: &DSurface, t: f64, filter: Option<u64>) -> Result<u64> {
    Ok(count_saddles_many(s, &[t], filter, 1)?[0])
}

pub fn count_many(s: &DSurface, ts: &[f64], kind: CountKind, workers: usize) -> Result<Vec<u64>> {
    match kind.saddle_filter() {
        None => count_cylinders_many(s, ts, workers),
        Some(filter) => count_saddles_many(s, ts, filter, workers),
    }
}

/// The constant N(T)/T² should approach, times π/ζ(2): the orbit constant for
/// a rational twist, the generic one otherwise.
pub fn predicted_constant(s: &DSurface, kind: CountKind) -> Result<Constant> {
    if s.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let d = s.d();
    match s.twist() {
        TwistPoint::Exact(_) => {
            let orbit = s.twist().orbit()?;
            match kind {
                CountKind::Cylinders => finite_orbit_from_fiber(&build_fiber_decomposition(d)?, &orbit),
                CountKind::SaddlesAll => saddle_orbit_constant(d, &orbit, None),
                CountKind::SaddlesClass(m) => saddle_orbit_constant(d, &orbit, Some(m)),
            }
        }
        TwistPoint::Float { .. } => match kind {
            CountKind::Cylinders => generic_cylinder_constant(d),
            CountKind::SaddlesAll => Ok(saddle_generic_constant(d)),
            CountKind::SaddlesClass(m) => m_homologous_generic(d, m, SaddleConvention::AllConnections),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "N_over_T2")]
    pub n_over_t2: f64,
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub surface: String,
    pub kind: CountKind,
    pub constant: Constant,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn last_rel_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.rel_error)
    }
}

pub fn describe(s: &DSurface) -> String {
    format!("d={}, twist=({})", s.d(), s.twist())
}

pub fn growth_report_with_workers(s: &DSurface, ts: &[f64], kind: CountKind, workers: usize) -> Result<GrowthReport> {
    let constant = predicted_constant(s, kind)?;
    let predicted = constant.growth_rate();
    let counts = count_many(s, ts, kind, workers)?;
    let rows = ts
        .iter()
        .zip(counts)
        .map(|(&t, n)| {
            let n_over_t2 = if t > 0.0 { n as f64 / (t * t) } else { 0.0 };
            let rel_error = if predicted > 0.0 { (n_over_t2 - predicted).abs() / predicted } else { f64::NAN };
            GrowthRow { t, n, n_over_t2, predicted, rel_error }
        })
        .collect();
    Ok(GrowthReport { surface: describe(s), kind, constant, rows })
}

pub fn growth_report(s: &DSurface, ts: &[f64], kind: CountKind) -> Result<GrowthReport> {
    growth_report_with_workers(s, ts, kind, default_workers())
}
