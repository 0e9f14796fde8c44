//! Geometric oracle: straight-line flow on the d-sheet slit model.
//!
//! A closed leaf of the base torus in direction u is followed once around; every
//! transversal crossing with a translate of the slit [0, w] moves the flow to the
//! neighbouring sheet, in the direction given by sign(u × w). The resulting
//! sheet permutation is decomposed into cycles, one cylinder per cycle.

use serde::Serialize;

use super::{CylinderDecomposition, CylinderGroup, DSurface, TwistPoint};
use crate::arith::{gcd_i64, Rational};
use crate::error::{Error, Result};

const FLOAT_TOL: f64 = 1e-11;

trait Scalar: Clone + PartialOrd + std::fmt::Debug {
    fn int(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn floor(&self) -> i64;
    fn ceil(&self) -> i64;
    fn is_zero(&self) -> bool;
    fn f64(&self) -> f64;
    fn exact(&self) -> Option<Rational>;
    /// Representative of x mod 1 in [0, 1), snapping to 0 within tolerance.
    fn fract(&self) -> Self;
}

impl Scalar for Rational {
    fn int(n: i64) -> Self {
        Rational::from_integer(n)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn floor(&self) -> i64 {
        num_traits::ToPrimitive::to_i64(&Rational::floor(self)).expect("small")
    }
    fn ceil(&self) -> i64 {
        -Scalar::floor(&(Rational::zero() - self.clone()))
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn f64(&self) -> f64 {
        self.to_f64()
    }
    fn exact(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn fract(&self) -> Self {
        Rational::fract(self)
    }
}

impl Scalar for f64 {
    fn int(n: i64) -> Self {
        n as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn floor(&self) -> i64 {
        f64::floor(*self) as i64
    }
    fn ceil(&self) -> i64 {
        f64::ceil(*self) as i64
    }
    fn is_zero(&self) -> bool {
        self.abs() < FLOAT_TOL
    }
    fn f64(&self) -> f64 {
        *self
    }
    fn exact(&self) -> Option<Rational> {
        None
    }
    fn fract(&self) -> Self {
        let r = self - f64::floor(*self);
        if r.is_zero() || (1.0 - r).is_zero() {
            0.0
        } else {
            r
        }
    }
}

type V<S> = [S; 2];

fn cross<S: Scalar>(a: &V<S>, b: &V<S>) -> S {
    a[0].mul(&b[1]).sub(&a[1].mul(&b[0]))
}

fn sign<S: Scalar>(x: &S) -> i64 {
    if x.is_zero() {
        0
    } else if *x > S::int(0) {
        1
    } else {
        -1
    }
}

fn in_open_unit<S: Scalar>(x: &S) -> bool {
    *x > S::int(0) && *x < S::int(1) && !x.is_zero() && !x.sub(&S::int(1)).is_zero()
}

/// Slit parameters s ∈ (0,1) of the crossings of x0 + t·v, t ∈ [t_lo, t_hi),
/// with the translates m + [0, w]. Errors if the path runs through a slit endpoint.
fn crossings<S: Scalar>(x0: &V<S>, v: &V<S>, w: &V<S>, t_lo: &S, t_hi: &S) -> Result<Vec<(S, S)>> {
    let det = cross(v, w);
    if det.is_zero() {
        return Ok(Vec::new());
    }
    let mut lo = [i64::MAX; 2];
    let mut hi = [i64::MIN; 2];
    for t in [t_lo, t_hi] {
        for s in [S::int(0), S::int(1)] {
            for k in 0..2 {
                let c = x0[k].add(&t.mul(&v[k])).sub(&s.mul(&w[k]));
                lo[k] = lo[k].min(c.floor() - 1);
                hi[k] = hi[k].max(c.ceil() + 1);
            }
        }
    }
    let mut out = Vec::new();
    for mx in lo[0]..=hi[0] {
        for my in lo[1]..=hi[1] {
            let rel = [S::int(mx).sub(&x0[0]), S::int(my).sub(&x0[1])];
            let t = cross(&rel, w).div(&det);
            if t < *t_lo || t >= *t_hi {
                continue;
            }
            let s = cross(&rel, v).div(&det);
            if s.is_zero() || s.sub(&S::int(1)).is_zero() {
                return Err(Error::HitConePoint);
            }
            if in_open_unit(&s) {
                out.push((t, s));
            }
        }
    }
    Ok(out)
}

/// Net sheet change along the closed leaf through x0 in the integer direction u.
fn closed_leaf_shift<S: Scalar>(x0: &V<S>, u: (i64, i64), w: &V<S>) -> Result<i64> {
    let v = [S::int(u.0), S::int(u.1)];
    let det = cross(&v, w);
    if det.is_zero() {
        return Ok(0);
    }
    // a wider window plus deduplication by slit parameter absorbs rounding at the seam
    let mut hits = crossings(x0, &v, w, &S::int(-1), &S::int(2))?;
    hits.retain(|(t, _)| {
        let t = t.f64();
        t > -0.25 && t < 1.25
    });
    let mut ss: Vec<S> = hits.into_iter().map(|(_, s)| s).collect();
    ss.sort_by(|a, b| a.partial_cmp(b).expect("ordered"));
    let mut distinct = 0i64;
    let mut last: Option<S> = None;
    for s in ss {
        if last.as_ref().map_or(true, |l| !s.sub(l).is_zero()) {
            distinct += 1;
        }
        last = Some(s);
    }
    Ok(sign(&det) * distinct)
}

fn twist_vec<S: Scalar>(s: &DSurface) -> V<S>
where
    S: From<TwistCoord>,
{
    let [h, v] = twist_coords(s);
    [S::from(h), S::from(v)]
}

#[derive(Clone)]
enum TwistCoord {
    Exact(Rational),
    Float(f64),
}

impl From<TwistCoord> for Rational {
    fn from(c: TwistCoord) -> Self {
        match c {
            TwistCoord::Exact(r) => r,
            TwistCoord::Float(_) => unreachable!("exact mode on a floating twist"),
        }
    }
}

impl From<TwistCoord> for f64 {
    fn from(c: TwistCoord) -> Self {
        match c {
            TwistCoord::Exact(r) => r.to_f64(),
            TwistCoord::Float(x) => x,
        }
    }
}

fn twist_coords(s: &DSurface) -> [TwistCoord; 2] {
    match s.twist() {
        TwistPoint::Exact(p) => [TwistCoord::Exact(p.x()), TwistCoord::Exact(p.y())],
        TwistPoint::Float { h, v, .. } => [TwistCoord::Float(*h), TwistCoord::Float(*v)],
    }
}

/// Sheet permutation cycles of j ↦ j + shift on Z/d.
fn cycles(d: u64, shift: i64) -> Vec<Vec<u64>> {
    let mut seen = vec![false; d as usize];
    let mut out = Vec::new();
    for start in 0..d {
        if seen[start as usize] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut cur = start;
        while !seen[cur as usize] {
            seen[cur as usize] = true;
            cyc.push(cur);
            cur = (cur as i64 + shift).rem_euclid(d as i64) as u64;
        }
        out.push(cyc);
    }
    out
}

/// One strip of parallel closed leaves between consecutive singular leaves.
#[derive(Clone, Debug, Serialize)]
pub struct TracedStrip {
    /// Transverse interval (lo, hi) in units where the leaf spacing is 1.
    pub lo: f64,
    pub hi: f64,
    pub lo_exact: Option<Rational>,
    pub hi_exact: Option<Rational>,
    pub shift: i64,
    pub cycles: Vec<Vec<u64>>,
}

fn strips_generic<S: Scalar + From<TwistCoord>>(s: &DSurface, p: i64, q: i64) -> Result<Vec<TracedStrip>> {
    let w: V<S> = twist_vec(s);
    let n2 = S::int(p * p + q * q);
    // transverse coordinate ℓ(x) = u × x; e satisfies ℓ(e) = 1
    let e = [S::int(-q).div(&n2), S::int(p).div(&n2)];
    let u = [S::int(p), S::int(q)];
    let f = cross(&u, &w).fract();
    let mut cuts = vec![S::int(0)];
    if !f.is_zero() {
        cuts.push(f);
    }
    cuts.push(S::int(1));
    let mut out = Vec::new();
    for win in cuts.windows(2) {
        let (lo, hi) = (&win[0], &win[1]);
        let c = lo.add(hi).div(&S::int(2));
        let x0 = [c.mul(&e[0]), c.mul(&e[1])];
        let shift = closed_leaf_shift(&x0, (p, q), &w)?;
        out.push(TracedStrip {
            lo: lo.f64(),
            hi: hi.f64(),
            lo_exact: lo.exact(),
            hi_exact: hi.exact(),
            shift,
            cycles: cycles(s.d(), shift),
        });
    }
    Ok(out)
}

/// Traces every strip of closed leaves in direction (p, q).
pub fn trace_strips(s: &DSurface, p: i64, q: i64) -> Result<Vec<TracedStrip>> {
    if gcd_i64(p, q) != 1 {
        return Err(Error::NotPrimitive(p, q));
    }
    if s.is_degenerate() {
        return Err(Error::Degenerate);
    }
    if s.twist().is_exact() {
        strips_generic::<Rational>(s, p, q)
    } else {
        strips_generic::<f64>(s, p, q)
    }
}

/// Cylinder decomposition in direction (p, q) computed by tracing.
pub fn trace_decompose(s: &DSurface, p: i64, q: i64) -> Result<CylinderDecomposition> {
    let strips = trace_strips(s, p, q)?;
    let norm = ((p * p + q * q) as f64).sqrt();
    let mut groups = Vec::new();
    for st in strips {
        let mut lens: Vec<u64> = st.cycles.iter().map(|c| c.len() as u64).collect();
        lens.sort_unstable();
        lens.dedup();
        let transverse = st.hi - st.lo;
        let exact = match (&st.lo_exact, &st.hi_exact) {
            (Some(a), Some(b)) => Some(b - a),
            _ => None,
        };
        for len in lens {
            let count = st.cycles.iter().filter(|c| c.len() as u64 == len).count() as u64;
            groups.push(CylinderGroup::new(count, len, norm, transverse, exact.clone()));
        }
    }
    Ok(CylinderDecomposition { direction: (p, q), groups })
}

/// Net sheet change along the closed leaf with transverse coordinate c in
/// direction u; also valid on degenerate surfaces.
pub fn leaf_shift(s: &DSurface, u: (i64, i64), c: &Rational) -> Result<i64> {
    if gcd_i64(u.0, u.1) != 1 {
        return Err(Error::NotPrimitive(u.0, u.1));
    }
    fn go<S: Scalar + From<TwistCoord>>(s: &DSurface, u: (i64, i64), c: S) -> Result<i64> {
        let w: V<S> = twist_vec(s);
        let n2 = S::int(u.0 * u.0 + u.1 * u.1);
        let x0 = [c.mul(&S::int(-u.1)).div(&n2), c.mul(&S::int(u.0)).div(&n2)];
        closed_leaf_shift(&x0, u, &w)
    }
    if s.twist().is_exact() {
        go::<Rational>(s, u, c.clone())
    } else {
        go::<f64>(s, u, c.to_f64())
    }
}

/// A cone point of the cover: the base point it lies over and its cone angle
/// as a multiple of 2π.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConePoint {
    pub base: [f64; 2],
    pub angle_multiple: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeData {
    pub cone_points: Vec<ConePoint>,
    pub euler_characteristic: i64,
    pub genus: u64,
}

/// Net sheet change around a small square loop centred at q.
fn local_shift<S: Scalar>(q: &V<S>, w: &V<S>, eps: &S) -> Result<i64> {
    let zero = S::int(0);
    let neg = zero.sub(eps);
    let corners = [
        [q[0].add(eps), q[1].add(eps)],
        [q[0].add(&neg), q[1].add(eps)],
        [q[0].add(&neg), q[1].add(&neg)],
        [q[0].add(eps), q[1].add(&neg)],
    ];
    let mut total = 0;
    for k in 0..4 {
        let a = &corners[k];
        let b = &corners[(k + 1) % 4];
        let v = [b[0].sub(&a[0]), b[1].sub(&a[1])];
        let hits = crossings(a, &v, w, &S::int(0), &S::int(1))?;
        total += sign(&cross(&v, w)) * hits.len() as i64;
    }
    Ok(total)
}

/// Distance from q to the nearest slit translate not passing through q.
fn clearance(q: [f64; 2], w: [f64; 2]) -> f64 {
    let len2 = w[0] * w[0] + w[1] * w[1];
    let mut best = 0.25f64;
    let (lx, hx) = ((q[0] - w[0].max(0.0)).floor() - 1.0, (q[0] - w[0].min(0.0)).ceil() + 1.0);
    let (ly, hy) = ((q[1] - w[1].max(0.0)).floor() - 1.0, (q[1] - w[1].min(0.0)).ceil() + 1.0);
    let mut mx = lx;
    while mx <= hx {
        let mut my = ly;
        while my <= hy {
            let rel = [q[0] - mx, q[1] - my];
            let s = ((rel[0] * w[0] + rel[1] * w[1]) / len2).clamp(0.0, 1.0);
            let dist = ((rel[0] - s * w[0]).powi(2) + (rel[1] - s * w[1]).powi(2)).sqrt();
            if dist > 1e-9 {
                best = best.min(dist);
            }
            my += 1.0;
        }
        mx += 1.0;
    }
    best
}

/// Cone points, Euler characteristic and genus from the local monodromy around
/// the two marked points of the base torus.
pub fn cone_data(s: &DSurface) -> Result<ConeData> {
    if s.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let d = s.d();
    let slit = s.slit();
    let bases = [[0.0, 0.0], [slit.frac_h, slit.frac_v]];
    let shifts: Vec<i64> = match s.twist() {
        TwistPoint::Exact(p) => {
            let w = [p.x(), p.y()];
            let den = p.den();
            let eps = Rational::new(1, 8 * den * den * (d as i64 + 1));
            let pf = [w[0].fract(), w[1].fract()];
            vec![
                local_shift(&[Rational::zero(), Rational::zero()], &w, &eps)?,
                local_shift(&pf, &w, &eps)?,
            ]
        }
        TwistPoint::Float { h, v, .. } => {
            let w = [*h, *v];
            bases
                .iter()
                .map(|b| local_shift(b, &w, &(0.25 * clearance(*b, w))))
                .collect::<Result<_>>()?
        }
    };
    let mut cone_points = Vec::new();
    for (base, shift) in bases.iter().zip(shifts) {
        for cyc in cycles(d, shift) {
            cone_points.push(ConePoint { base: *base, angle_multiple: cyc.len() as u64 });
        }
    }
    // the d-fold cover of the twice punctured torus has χ = −2d
    let chi = -2 * d as i64 + cone_points.len() as i64;
    let genus = ((2 - chi) / 2) as u64;
    Ok(ConeData { cone_points, euler_characteristic: chi, genus })
}
