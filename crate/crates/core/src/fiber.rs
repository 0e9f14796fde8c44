//! The modular fiber T²_d minus its lattice: horizontal cylinders 𝒞_0..𝒞_{d−1},
//! the horizontal spine and orbit statistics.

use serde::Serialize;

use crate::arith::{euler_phi, gcd, gcd3, Rational};
use crate::error::{Error, Result};
use crate::sl2z::{torsion_points, OrbitSet, TorusPoint};
use crate::surface::TwistPoint;

/// (count, width) of one group of surface-level horizontal cylinders.
pub type WidthEntry = (u64, u64);

/// The fiber cylinder 𝒞_i = {i < t_v < i+1} with the horizontal cylinder data of
/// the surfaces inside it and on its bottom boundary t_v = i.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberCylinder {
    pub index: u64,
    pub area: u64,
    pub interior: Vec<WidthEntry>,
    pub boundary: Vec<WidthEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberDecomposition {
    pub d: u64,
    pub cylinders: Vec<FiberCylinder>,
}

impl FiberDecomposition {
    pub fn area(&self) -> u64 {
        self.cylinders.iter().map(|c| c.area).sum()
    }
}

fn gcd_class(k: u64, d: u64) -> WidthEntry {
    let g = gcd(k % d, d);
    (g, d / g)
}

/// (i, on_boundary) with i = ⌊t_v⌋ mod d.
pub fn fiber_cylinder_index(t: &TwistPoint) -> (u64, bool) {
    let d = t.modulus();
    match t {
        TwistPoint::Exact(p) => {
            let y = p.numerators()[1];
            let den = p.den();
            (y.div_euclid(den).rem_euclid(d as i64) as u64, y % den == 0)
        }
        TwistPoint::Float { v, .. } => {
            let on = (v - v.round()).abs() < crate::surface::DEFAULT_EPS;
            let i = if on { v.round() } else { v.floor() };
            ((i as i64).rem_euclid(d as i64) as u64, on)
        }
    }
}

pub fn build_fiber_decomposition(d: u64) -> Result<FiberDecomposition> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let cylinders = (0..d)
        .map(|i| FiberCylinder {
            index: i,
            area: d,
            interior: vec![gcd_class(i, d), gcd_class(i + 1, d)],
            boundary: vec![gcd_class(i, d)],
        })
        .collect();
    Ok(FiberDecomposition { d, cylinders })
}

/// |𝓛_{ad/n} ∩ T²_d(n)| = n·φ(g)/g with g = gcd(a, n).
pub fn leaf_torsion_count(d: u64, n: u64, a: u64) -> Result<u64> {
    if d == 0 || n == 0 || a == 0 || a > n {
        return Err(Error::Domain(format!("need 1 <= a <= n, got a={a}, n={n}")));
    }
    let g = gcd(a, n);
    Ok(n * euler_phi(g)? / g)
}

/// Same count by enumerating the order-n points on the leaf t_v = a·d/n.
pub fn leaf_torsion_count_enumerated(d: u64, n: u64, a: u64) -> Result<u64> {
    let target = Rational::new((a * d) as i64, n as i64);
    let dd = Rational::from(d);
    let pts = torsion_points(d, n)?;
    Ok(pts
        .iter()
        .filter(|p| {
            let y = p.y();
            // leaf heights are taken mod d; a = n is the base leaf t_v = 0
            y == target || y.clone() + dd.clone() == target
        })
        .count() as u64)
}

/// Per-cylinder counts (|𝒪 ∩ 𝒞_i|, |𝒪 ∩ ∂ᵇᵗᵐ𝒞_i|).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderCounts {
    pub interior: u64,
    pub boundary: u64,
}

pub fn orbit_cylinder_intersections(orbit: &OrbitSet, d: u64) -> Result<Vec<CylinderCounts>> {
    if orbit.modulus() != d {
        return Err(Error::ModulusMismatch(orbit.modulus(), d));
    }
    let mut out = vec![CylinderCounts { interior: 0, boundary: 0 }; d as usize];
    for p in orbit.points() {
        let (i, on) = fiber_cylinder_index(&TwistPoint::Exact(*p));
        if on {
            out[i as usize].boundary += 1;
        } else {
            out[i as usize].interior += 1;
        }
    }
    Ok(out)
}

/// Horizontal fiber segment from the lattice point (j, k) to (j+1, k) mod d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SpineSegment {
    pub left: (u64, u64),
    pub right: (u64, u64),
    pub left_class: u64,
    pub right_class: u64,
}

impl SpineSegment {
    pub fn new(j: u64, k: u64, d: u64) -> Self {
        let (j, k) = (j % d, k % d);
        let r = ((j + 1) % d, k);
        SpineSegment {
            left: (j, k),
            right: r,
            left_class: gcd3(j as i64, k as i64, d),
            right_class: gcd3(r.0 as i64, r.1 as i64, d),
        }
    }

    /// Whether the point lies in the open segment.
    pub fn contains(&self, p: &TorusPoint) -> bool {
        let [x, y] = p.numerators();
        let den = p.den();
        y == self.left.1 as i64 * den && x > self.left.0 as i64 * den && x < (self.left.0 as i64 + 1) * den
    }
}

/// All d² spine segments.
pub fn spine(d: u64) -> Vec<SpineSegment> {
    (0..d).flat_map(|k| (0..d).map(move |j| SpineSegment::new(j, k, d))).collect()
}

/// Spine segments with an endpoint of class m.
pub fn spine_segments(d: u64, m: u64) -> Result<Vec<SpineSegment>> {
    if d == 0 || m == 0 || d % m != 0 {
        return Err(Error::NotDivisor(m, d));
    }
    Ok(spine(d).into_iter().filter(|s| s.left_class == m || s.right_class == m).collect())
}

/// Lattice points (j, k) ∈ Z²/dZ² of class gcd(j, k, d) = m.
pub fn lattice_class_points(d: u64, m: u64) -> Vec<(u64, u64)> {
    (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .filter(|&(j, k)| gcd3(j as i64, k as i64, d) == m)
        .collect()
}
