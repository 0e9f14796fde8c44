//! d-symmetric surfaces: d copies of the unit torus slit along the straight
//! segment from 0 to the twist w and reglued cyclically.

mod saddle;
mod trace;

use std::fmt;

use serde::Serialize;

use crate::arith::{gcd, gcd3, Rational};
use crate::error::{Error, Result};
use crate::sl2z::{act, orbit_enumerate, reduce_to_horizontal, IntegerMatrix2, OrbitSet, TorusPoint};

pub use saddle::{
    base_holonomy_is_clear, saddle_connections_upto, ExactHolonomy, SaddleConnection, SaddleSweep,
};
pub use trace::{cone_data, leaf_shift, trace_decompose, trace_strips, ConeData, ConePoint, TracedStrip};

/// Default tolerance for integer-membership tests in floating mode.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Twist coordinates (t_h, t_v) ∈ T²_d, exact rational or floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwistPoint {
    Exact(TorusPoint),
    Float { h: f64, v: f64, modulus: u64 },
}

fn wrap(x: f64, d: u64) -> f64 {
    let r = x.rem_euclid(d as f64);
    if r >= d as f64 {
        0.0
    } else {
        r
    }
}

impl TwistPoint {
    pub fn exact(h: &Rational, v: &Rational, d: u64) -> Result<Self> {
        Ok(TwistPoint::Exact(TorusPoint::new(h, v, d)?))
    }

    /// Exact twist (nh/den, nv/den).
    pub fn ratio(nh: i64, nv: i64, den: i64, d: u64) -> Result<Self> {
        Ok(TwistPoint::Exact(TorusPoint::from_parts(nh, nv, den, d)?))
    }

    pub fn float(h: f64, v: f64, d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        if !h.is_finite() || !v.is_finite() {
            return Err(Error::Domain("twist must be finite".into()));
        }
        Ok(TwistPoint::Float { h: wrap(h, d), v: wrap(v, d), modulus: d })
    }

    /// Parses "x,y": both coordinates as integers or p/q fractions give an exact
    /// twist, both as decimals a floating one; mixing the two is rejected.
    pub fn parse(s: &str, d: u64) -> Result<Self> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Domain(format!("expected 'x,y', got '{s}'")))?;
        let (a, b) = (a.trim(), b.trim());
        let is_float = |t: &str| t.contains('.') || t.contains('e') || t.contains('E');
        match (is_float(a), is_float(b)) {
            (false, false) => Self::exact(&a.parse()?, &b.parse()?, d),
            (true, true) => {
                let pf = |t: &str| t.parse::<f64>().map_err(|_| Error::Domain(format!("cannot parse '{t}'")));
                Self::float(pf(a)?, pf(b)?, d)
            }
            _ => Err(Error::Domain(format!(
                "twist '{s}' mixes exact and decimal coordinates"
            ))),
        }
    }

    pub fn modulus(&self) -> u64 {
        match self {
            TwistPoint::Exact(p) => p.modulus(),
            TwistPoint::Float { modulus, .. } => *modulus,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, TwistPoint::Exact(_))
    }

    pub fn as_torus_point(&self) -> Option<&TorusPoint> {
        match self {
            TwistPoint::Exact(p) => Some(p),
            TwistPoint::Float { .. } => None,
        }
    }

    pub fn t_h(&self) -> f64 {
        self.to_f64()[0]
    }

    pub fn t_v(&self) -> f64 {
        self.to_f64()[1]
    }

    pub fn to_f64(&self) -> [f64; 2] {
        match self {
            TwistPoint::Exact(p) => p.to_f64(),
            TwistPoint::Float { h, v, .. } => [*h, *v],
        }
    }

    /// Exact coordinates when available.
    pub fn exact_coords(&self) -> Option<(Rational, Rational)> {
        self.as_torus_point().map(|p| (p.x(), p.y()))
    }

    /// A·w reduced mod dZ².
    pub fn act(&self, m: &IntegerMatrix2) -> Result<Self> {
        m.check()?;
        match self {
            TwistPoint::Exact(p) => Ok(TwistPoint::Exact(act(m, p)?)),
            TwistPoint::Float { h, v, modulus } => {
                let nh = m.a as f64 * h + m.b as f64 * v;
                let nv = m.c as f64 * h + m.d as f64 * v;
                Self::float(nh, nv, *modulus)
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.act(&IntegerMatrix2::MINUS_ID).expect("−id is unimodular")
    }

    /// The same twist read on T²_d' (coordinates unchanged, reduced mod d').
    pub fn with_modulus(&self, d: u64) -> Result<Self> {
        match self {
            TwistPoint::Exact(p) => {
                let [x, y] = p.numerators();
                Self::ratio(x, y, p.den(), d)
            }
            TwistPoint::Float { h, v, .. } => Self::float(*h, *v, d),
        }
    }

    /// SL2(Z) orbit of an exact twist; floating twists have infinite orbits.
    pub fn orbit(&self) -> Result<OrbitSet> {
        match self {
            TwistPoint::Exact(p) => orbit_enumerate(p),
            TwistPoint::Float { .. } => Err(Error::InfiniteOrbit),
        }
    }
}

impl fmt::Display for TwistPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwistPoint::Exact(p) => write!(f, "{},{}", p.x(), p.y()),
            TwistPoint::Float { h, v, .. } => write!(f, "{h},{v}"),
        }
    }
}

/// Integer and fractional parts of the normalized twist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlitData {
    pub h: i64,
    pub v: i64,
    pub frac_h: f64,
    pub frac_v: f64,
}

/// The d-symmetric surface with twist w.
#[derive(Clone, Debug, PartialEq)]
pub struct DSurface {
    d: u64,
    twist: TwistPoint,
    degenerate: bool,
    slit: SlitData,
    eps: f64,
}

pub fn build(d: u64, twist: TwistPoint) -> Result<DSurface> {
    DSurface::new(d, twist, DEFAULT_EPS)
}

impl DSurface {
    pub fn new(d: u64, twist: TwistPoint, eps: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("d must be positive".into()));
        }
        let twist = twist.with_modulus(d)?;
        let (slit, degenerate) = match &twist {
            TwistPoint::Exact(p) => {
                let [x, y] = p.numerators();
                let den = p.den();
                let slit = SlitData {
                    h: x.div_euclid(den),
                    v: y.div_euclid(den),
                    frac_h: x.rem_euclid(den) as f64 / den as f64,
                    frac_v: y.rem_euclid(den) as f64 / den as f64,
                };
                (slit, p.is_lattice())
            }
            TwistPoint::Float { h, v, .. } => {
                let near = |x: f64| (x - x.round()).abs() < eps;
                let degenerate = near(*h) && near(*v);
                let slit = SlitData { h: h.floor() as i64, v: v.floor() as i64, frac_h: h - h.floor(), frac_v: v - v.floor() };
                (slit, degenerate)
            }
        };
        Ok(DSurface { d, twist, degenerate, slit, eps })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn twist(&self) -> &TwistPoint {
        &self.twist
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn slit(&self) -> &SlitData {
        &self.slit
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn area(&self) -> u64 {
        self.d
    }

    /// Genus of a non-degenerate surface.
    pub fn genus(&self) -> u64 {
        self.d
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::Degenerate)
        } else {
            Ok(())
        }
    }

    /// Transverse value u×w = p·t_v − q·t_h for direction u = (p, q):
    /// its floor and whether it is an integer, plus the fractional part.
    pub fn cross_value(&self, p: i64, q: i64) -> CrossValue {
        match &self.twist {
            TwistPoint::Exact(pt) => {
                let [x, y] = pt.numerators();
                let den = pt.den() as i128;
                let l = p as i128 * y as i128 - q as i128 * x as i128;
                let r = l.rem_euclid(den);
                CrossValue {
                    floor: l.div_euclid(den) as i64,
                    integral: r == 0,
                    frac: r as f64 / den as f64,
                    frac_exact: Some(Rational::new(r as i64, den as i64)),
                }
            }
            TwistPoint::Float { h, v, .. } => {
                let l = p as f64 * v - q as f64 * h;
                let n = l.round();
                if (l - n).abs() < self.eps {
                    CrossValue { floor: n as i64, integral: true, frac: 0.0, frac_exact: None }
                } else {
                    CrossValue { floor: l.floor() as i64, integral: false, frac: l - l.floor(), frac_exact: None }
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossValue {
    pub floor: i64,
    pub integral: bool,
    pub frac: f64,
    pub frac_exact: Option<Rational>,
}

/// `count` cylinders with core length `period`·|u| and height `transverse`/|u|.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderGroup {
    pub count: u64,
    pub period: u64,
    pub width: f64,
    pub height: f64,
    pub transverse: f64,
    pub transverse_exact: Option<Rational>,
}

impl CylinderGroup {
    fn new(count: u64, period: u64, norm: f64, transverse: f64, transverse_exact: Option<Rational>) -> Self {
        CylinderGroup {
            count,
            period,
            width: period as f64 * norm,
            height: transverse / norm,
            transverse,
            transverse_exact,
        }
    }

    pub fn area(&self) -> f64 {
        self.count as f64 * self.width * self.height
    }

    pub fn exact_area(&self) -> Option<Rational> {
        self.transverse_exact
            .as_ref()
            .map(|t| Rational::from(self.count * self.period) * t)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderDecomposition {
    pub direction: (i64, i64),
    pub groups: Vec<CylinderGroup>,
}

impl CylinderDecomposition {
    pub fn norm(&self) -> f64 {
        ((self.direction.0 * self.direction.0 + self.direction.1 * self.direction.1) as f64).sqrt()
    }

    pub fn cylinder_count(&self) -> u64 {
        self.groups.iter().map(|g| g.count).sum()
    }

    pub fn total_area(&self) -> f64 {
        self.groups.iter().map(|g| g.area()).sum()
    }

    pub fn exact_area(&self) -> Option<Rational> {
        self.groups.iter().map(|g| g.exact_area()).sum()
    }

    /// Sorted multiset of (count, period).
    pub fn signature(&self) -> Vec<(u64, u64)> {
        let mut s: Vec<_> = self.groups.iter().map(|g| (g.count, g.period)).collect();
        s.sort_unstable();
        s
    }

    /// Same (count, width) multiset and heights within `tol`.
    /// Individual cylinders as (period, height), sorted.
    pub fn cylinders(&self) -> Vec<(u64, f64)> {
        let mut v: Vec<(u64, f64)> = self
            .groups
            .iter()
            .flat_map(|g| std::iter::repeat((g.period, g.height)).take(g.count as usize))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }

    /// Same cylinders in the same direction, however they are grouped.
    pub fn same_cylinders(&self, other: &CylinderDecomposition, tol: f64) -> bool {
        let (a, b) = (self.cylinders(), other.cylinders());
        self.direction == other.direction
            && a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && (x.1 - y.1).abs() <= tol)
    }

    pub fn matches(&self, other: &CylinderDecomposition, tol: f64) -> bool {
        if self.direction != other.direction || self.groups.len() != other.groups.len() {
            return false;
        }
        let key = |g: &CylinderGroup| (g.count, g.period);
        let mut a: Vec<_> = self.groups.iter().collect();
        let mut b: Vec<_> = other.groups.iter().collect();
        let ord = |x: &&CylinderGroup, y: &&CylinderGroup| {
            key(x).cmp(&key(y)).then(x.height.total_cmp(&y.height))
        };
        a.sort_by(ord);
        b.sort_by(ord);
        a.iter().zip(&b).all(|(x, y)| {
            key(x) == key(y)
                && (x.height - y.height).abs() <= tol
                && match (&x.transverse_exact, &y.transverse_exact) {
                    (Some(p), Some(q)) => p == q,
                    _ => true,
                }
        })
    }
}

impl fmt::Display for CylinderDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self
            .groups
            .iter()
            .map(|g| {
                if self.direction.0.abs() + self.direction.1.abs() == 1 {
                    format!("{}×(w={})", g.count, g.period)
                } else {
                    format!("{}×(w={:.6})", g.count, g.width)
                }
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Cylinder decomposition in direction (p, q) from the reduced twist A·w.
pub fn decompose_direction(s: &DSurface, p: i64, q: i64) -> Result<CylinderDecomposition> {
    s.require_nondegenerate()?;
    let a = reduce_to_horizontal(p, q)?;
    let d = s.d;
    let (i, integral, frac, frac_exact) = match s.twist.act(&a)? {
        TwistPoint::Exact(t) => {
            let den = t.den();
            let y = t.numerators()[1];
            let r = y.rem_euclid(den);
            (y.div_euclid(den), r == 0, r as f64 / den as f64, Some(Rational::new(r, den)))
        }
        TwistPoint::Float { v, .. } => {
            let n = v.round();
            if (v - n).abs() < s.eps {
                (n as i64, true, 0.0, None)
            } else {
                (v.floor() as i64, false, v - v.floor(), None)
            }
        }
    };
    let norm = ((p * p + q * q) as f64).sqrt();
    let g_at = |k: i64| gcd(k.rem_euclid(d as i64) as u64, d);
    let g1 = g_at(i);
    let mut groups = Vec::with_capacity(2);
    if integral {
        groups.push(CylinderGroup::new(g1, d / g1, norm, 1.0, Some(Rational::one())));
    } else {
        let g2 = g_at(i + 1);
        let rest = frac_exact.as_ref().map(|f| Rational::one() - f);
        groups.push(CylinderGroup::new(g1, d / g1, norm, 1.0 - frac, rest));
        groups.push(CylinderGroup::new(g2, d / g2, norm, frac, frac_exact));
    }
    Ok(CylinderDecomposition { direction: (p, q), groups })
}

/// Per-component cylinder data of a degenerate surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderData {
    pub count_per_component: u64,
    pub width: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegenerateStructure {
    pub components: u64,
    pub area_per_component: Rational,
    pub horizontal: CylinderData,
    pub vertical: CylinderData,
}

/// Lattice coordinates (j, k) of a degenerate twist.
fn lattice_twist(s: &DSurface) -> Result<(i64, i64)> {
    if !s.degenerate {
        return Err(Error::NotDegenerate);
    }
    Ok(match &s.twist {
        TwistPoint::Exact(p) => {
            let [x, y] = p.numerators();
            (x, y)
        }
        TwistPoint::Float { h, v, .. } => (h.round() as i64, v.round() as i64),
    })
}

/// Components of a degenerate surface from the sheet monodromy of a horizontal
/// and a vertical closed leaf.
pub fn components(s: &DSurface) -> Result<DegenerateStructure> {
    lattice_twist(s)?;
    let d = s.d as usize;
    let hshift = leaf_shift(s, (1, 0), &Rational::new(1, 2))?;
    let vshift = leaf_shift(s, (0, 1), &Rational::new(1, 2))?;
    // union-find over the sheets
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for shift in [hshift, vshift] {
        for sheet in 0..d {
            let to = (sheet as i64 + shift).rem_euclid(d as i64) as usize;
            let (a, b) = (find(&mut parent, sheet), find(&mut parent, to));
            parent[a] = b;
        }
    }
    let roots: std::collections::BTreeSet<usize> = (0..d).map(|x| find(&mut parent, x)).collect();
    let comps = roots.len() as u64;
    let comp_of_zero: Vec<usize> = (0..d).filter(|&x| find(&mut parent, x) == find(&mut parent, 0)).collect();
    let cycles_in = |shift: i64| -> CylinderData {
        let mut seen = vec![false; d];
        let mut count = 0;
        let mut width = 0;
        for &start in &comp_of_zero {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut len = 0;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                len += 1;
                cur = (cur as i64 + shift).rem_euclid(d as i64) as usize;
            }
            width = len;
        }
        CylinderData { count_per_component: count, width }
    };
    Ok(DegenerateStructure {
        components: comps,
        area_per_component: Rational::new(d as i64, comps as i64),
        horizontal: cycles_in(hshift),
        vertical: cycles_in(vshift),
    })
}

/// The same data from the gcd formulas.
pub fn components_formula(d: u64, j: i64, k: i64) -> DegenerateStructure {
    let c = gcd3(j, k, d);
    let gk = gcd(k.unsigned_abs(), d);
    let gj = gcd(j.unsigned_abs(), d);
    DegenerateStructure {
        components: c,
        area_per_component: Rational::new(d as i64, c as i64),
        horizontal: CylinderData { count_per_component: gk / c, width: d / gk },
        vertical: CylinderData { count_per_component: gj / c, width: d / gj },
    }
}
