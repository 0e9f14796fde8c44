//! Saddle connections between the two cone points.
//!
//! Every such connection projects to a segment on the base torus from the
//! marked point 0 to the marked point p = w mod Z², with holonomy v ∈ p + Z²,
//! whose interior avoids both marked points; each base segment has d lifts.

use serde::Serialize;

use super::{DSurface, TwistPoint};
use crate::arith::{gcd, gcd_i64};
use crate::error::{Error, Result};

/// Holonomy (x, y)/den.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactHolonomy {
    pub x: i64,
    pub y: i64,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SaddleConnection {
    pub holonomy: [f64; 2],
    pub exact: Option<ExactHolonomy>,
    pub base_multiplicity: u64,
    pub m_class: u64,
}

impl SaddleConnection {
    pub fn length(&self) -> f64 {
        self.holonomy[0].hypot(self.holonomy[1])
    }

    /// The same connection traversed backwards.
    pub fn reversed(&self) -> SaddleConnection {
        SaddleConnection {
            holonomy: [-self.holonomy[0], -self.holonomy[1]],
            exact: self.exact.map(|e| ExactHolonomy { x: -e.x, y: -e.y, den: e.den }),
            ..self.clone()
        }
    }
}

/// Whether the open segment from 0 to v = (x, y)/n meets Z² or p + Z², where
/// p ≡ v mod Z² has exact denominator n > 1. The interior points k·v/g with
/// g = gcd(x, y) land in Z² iff n | k and in p + Z² iff n | (k − g), so the
/// segment is clear iff g ≤ n.
pub fn base_holonomy_is_clear(x: i64, y: i64, n: i64) -> bool {
    gcd_i64(x, y) <= n.unsigned_abs()
}

#[derive(Clone, Debug)]
enum Base {
    /// p = (a, b)/n in lowest terms.
    Exact { a: i64, b: i64, n: i64 },
    Float { px: f64, py: f64 },
}

/// Row-by-row enumeration of the base holonomies with their m-classes.
#[derive(Clone, Debug)]
pub struct SaddleSweep {
    d: u64,
    base: Base,
    int_h: i64,
    int_v: i64,
    classes: Vec<u64>,
}

impl SaddleSweep {
    pub fn new(s: &DSurface) -> Result<Self> {
        if s.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let d = s.d();
        let slit = s.slit();
        let base = match s.twist() {
            TwistPoint::Exact(p) => {
                let [x, y] = p.numerators();
                let den = p.den();
                let (a, b) = (x.rem_euclid(den), y.rem_euclid(den));
                let g = gcd(gcd_i64(a, b), den as u64) as i64;
                Base::Exact { a: a / g, b: b / g, n: den / g }
            }
            TwistPoint::Float { .. } => Base::Float { px: slit.frac_h, py: slit.frac_v },
        };
        let classes = (0..d * d).map(|idx| gcd(gcd(idx / d, idx % d), d)).collect();
        Ok(SaddleSweep { d, base, int_h: slit.h, int_v: slit.v, classes })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Class gcd(j, k, d) of (j, k) = (twist − v) mod d for v = p + (i, j_row).
    fn class(&self, i: i64, j: i64) -> u64 {
        let d = self.d as i64;
        let a = (self.int_h - i).rem_euclid(d);
        let b = (self.int_v - j).rem_euclid(d);
        self.classes[(a * d + b) as usize]
    }

    /// Rows j (lattice offsets in y) that can hold holonomies of length ≤ T.
    pub fn rows(&self, t: f64) -> std::ops::RangeInclusive<i64> {
        let py = match self.base {
            Base::Exact { b, n, .. } => b as f64 / n as f64,
            Base::Float { py, .. } => py,
        };
        ((-t - py).floor() as i64 - 1)..=((t - py).ceil() as i64 + 1)
    }

    /// Calls `f(|v|², class, i)` for each clear holonomy v = p + (i, j) with |v| ≤ T.
    pub fn visit_row<F: FnMut(f64, u64, i64)>(&self, j: i64, t: f64, mut f: F) {
        let t2 = t * t;
        match self.base {
            Base::Exact { a, b, n } => {
                let yy = (b + n * j) as f64;
                let nf = n as f64;
                let lim = t2 * nf * nf;
                if yy * yy > lim {
                    return;
                }
                let r = (lim - yy * yy).sqrt();
                let lo = ((-r - a as f64) / nf).floor() as i64 - 1;
                let hi = ((r - a as f64) / nf).ceil() as i64 + 1;
                let y = b + n * j;
                for i in lo..=hi {
                    let x = a + n * i;
                    let len2 = (x as i128 * x as i128 + y as i128 * y as i128) as f64;
                    if len2 > lim {
                        continue;
                    }
                    if base_holonomy_is_clear(x, y, n) {
                        f(len2 / (nf * nf), self.class(i, j), i);
                    }
                }
            }
            Base::Float { px, py } => {
                let y = py + j as f64;
                if y * y > t2 {
                    return;
                }
                let r = (t2 - y * y).sqrt();
                let lo = (-r - px).floor() as i64 - 1;
                let hi = (r - px).ceil() as i64 + 1;
                for i in lo..=hi {
                    let x = px + i as f64;
                    let len2 = x * x + y * y;
                    if len2 <= t2 {
                        f(len2, self.class(i, j), i);
                    }
                }
            }
        }
    }

    fn connection(&self, i: i64, j: i64) -> SaddleConnection {
        let (holonomy, exact) = match self.base {
            Base::Exact { a, b, n } => {
                let (x, y) = (a + n * i, b + n * j);
                ([x as f64 / n as f64, y as f64 / n as f64], Some(ExactHolonomy { x, y, den: n }))
            }
            Base::Float { px, py } => ([px + i as f64, py + j as f64], None),
        };
        SaddleConnection { holonomy, exact, base_multiplicity: self.d, m_class: self.class(i, j) }
    }
}

/// Saddle connections from the first to the second cone point on the base with
/// |v| ≤ T, sorted by length. Reversing each gives the connections in the
/// opposite orientation.
pub fn saddle_connections_upto(s: &DSurface, t: f64) -> Result<Vec<SaddleConnection>> {
    let sweep = SaddleSweep::new(s)?;
    let mut out = Vec::new();
    if t <= 0.0 {
        return Ok(out);
    }
    for j in sweep.rows(t) {
        sweep.visit_row(j, t, |_, _, i| out.push(sweep.connection(i, j)));
    }
    out.sort_by(|a, b| a.length().total_cmp(&b.length()).then(a.holonomy[0].total_cmp(&b.holonomy[0])));
    Ok(out)
}
