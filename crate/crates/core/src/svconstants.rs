//! Closed-form quadratic growth constants, exact as (rational, π² | ζ(2) | 1).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{dedekind_psi, divisors, euler_phi, gcd, gcd3, orbit_size, coprime_zeta2_factor, Rational, ZETA2};
use crate::error::{Error, Result};
use crate::fiber::{fiber_cylinder_index, FiberDecomposition};
use crate::sl2z::{orbit_enumerate, OrbitSet, TorusPoint};
use crate::surface::TwistPoint;

/// π/ζ(2) = 6/π: the density of primitive vectors, linking constants to N(T)/T².
pub const PI_OVER_ZETA2: f64 = std::f64::consts::PI / ZETA2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transcendental {
    One,
    PiSquared,
    Zeta2,
}

impl Transcendental {
    pub fn value(&self) -> f64 {
        match self {
            Transcendental::One => 1.0,
            Transcendental::PiSquared => std::f64::consts::PI * std::f64::consts::PI,
            Transcendental::Zeta2 => ZETA2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Transcendental::One => "1",
            Transcendental::PiSquared => "pi^2",
            Transcendental::Zeta2 => "zeta(2)",
        }
    }
}

impl Serialize for Transcendental {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// coefficient × tag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constant {
    pub coefficient: Rational,
    pub tag: Transcendental,
    pub description: String,
}

impl Constant {
    pub fn new(coefficient: Rational, tag: Transcendental, description: impl Into<String>) -> Self {
        Constant { coefficient, tag, description: description.into() }
    }

    pub fn rational(coefficient: Rational, description: impl Into<String>) -> Self {
        Self::new(coefficient, Transcendental::One, description)
    }

    pub fn value(&self) -> f64 {
        self.coefficient.to_f64() * self.tag.value()
    }

    /// Coefficient of π², when the tag is π² or ζ(2).
    pub fn pi_squared_coefficient(&self) -> Option<Rational> {
        match self.tag {
            Transcendental::One => None,
            Transcendental::PiSquared => Some(self.coefficient.clone()),
            Transcendental::Zeta2 => Some(self.coefficient.clone() / Rational::from_integer(6)),
        }
    }

    /// Exact equality of values across the π² and ζ(2) tags.
    pub fn same_value(&self, other: &Constant) -> bool {
        match (self.tag, other.tag) {
            (Transcendental::One, Transcendental::One) => self.coefficient == other.coefficient,
            (Transcendental::One, _) | (_, Transcendental::One) => {
                self.coefficient.is_zero() && other.coefficient.is_zero()
            }
            _ => self.pi_squared_coefficient() == other.pi_squared_coefficient(),
        }
    }

    /// Predicted limit of N(T)/T².
    pub fn growth_rate(&self) -> f64 {
        PI_OVER_ZETA2 * self.value()
    }

    pub fn scaled(&self, k: Rational, description: impl Into<String>) -> Constant {
        Constant::new(self.coefficient.clone() * k, self.tag, description)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            Transcendental::One => write!(f, "{}", self.coefficient),
            Transcendental::PiSquared => write!(f, "{}·π²", self.coefficient),
            Transcendental::Zeta2 => write!(f, "{}·ζ(2)", self.coefficient),
        }
    }
}

impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Constant", 4)?;
        st.serialize_field("coefficient", &self.coefficient)?;
        st.serialize_field("tag", &self.tag)?;
        st.serialize_field("decimal", &self.value())?;
        st.serialize_field("description", &self.description)?;
        st.end()
    }
}

fn g(k: i64, d: u64) -> u64 {
    gcd(k.rem_euclid(d as i64) as u64, d)
}

fn cube(x: u64) -> Rational {
    Rational::from(x * x * x)
}

/// (2/d³)·Σ_{i=1}^{d} gcd(i,d)³.
pub fn generic_cylinder_constant_gcd_form(d: u64) -> Result<Rational> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    let s: u128 = (1..=d).map(|i| (gcd(i, d) as u128).pow(3)).sum();
    Ok(over_d_cubed(2 * s, d))
}

/// 2·Σ_{p|d} φ(p)/p³, summed over the common denominator d³.
pub fn generic_cylinder_constant_divisor_form(d: u64) -> Result<Rational> {
    let mut s: u128 = 0;
    for p in divisors(d)? {
        s += euler_phi(p)? as u128 * ((d / p) as u128).pow(3);
    }
    Ok(over_d_cubed(2 * s, d))
}

fn over_d_cubed(num: u128, d: u64) -> Rational {
    use num_bigint::BigInt;
    Rational::from_big(BigInt::from(num), BigInt::from(d).pow(3))
}

/// Cylinder constant of a generic d-symmetric surface.
pub fn generic_cylinder_constant(d: u64) -> Result<Constant> {
    let a = generic_cylinder_constant_gcd_form(d)?;
    let b = generic_cylinder_constant_divisor_form(d)?;
    assert_eq!(a, b, "gcd and divisor forms disagree at d = {d}");
    Ok(Constant::rational(a, format!("generic cylinder constant, d={d}")))
}

/// Per-leaf term c_{d,n}(a): the leaf t_v = a·d/n of the order-n points.
pub fn torsion_leaf_term(d: u64, n: u64, a: u64) -> Result<Rational> {
    if d == 0 || n == 0 || a == 0 || a > n {
        return Err(Error::Domain(format!("need d, n >= 1 and 1 <= a <= n (a={a}, n={n})")));
    }
    let ga = gcd(a, n);
    let ad = a * d;
    let tv = (ad / n) as i64;
    let mut cyl = cube(g(tv, d));
    if ad % n != 0 {
        cyl += cube(g(tv + 1, d));
    }
    let pre = Rational::new(n as i64, orbit_size(n)? as i64) * Rational::new(euler_phi(ga)? as i64, ga as i64);
    Ok(pre * cyl / Rational::from(d * d))
}

/// Σ_a c_{d,n}(a): cylinder constant of the order-n torsion surfaces.
pub fn torsion_cylinder_constant(d: u64, n: u64) -> Result<Constant> {
    let mut s = Rational::zero();
    for a in 1..=n {
        s += torsion_leaf_term(d, n, a)?;
    }
    Ok(Constant::rational(s, format!("torsion cylinder constant, d={d}, n={n}")))
}

/// Leaf terms grouped by the number of horizontal cylinders on the leaf.
pub fn torsion_terms_by_cylinder_count(d: u64, n: u64) -> Result<Vec<(u64, Rational)>> {
    let mut groups: std::collections::BTreeMap<u64, Rational> = Default::default();
    for a in 1..=n {
        let tv = (a * d / n) as i64;
        let mut k = g(tv, d);
        if (a * d) % n != 0 {
            k += g(tv + 1, d);
        }
        *groups.entry(k).or_default() += torsion_leaf_term(d, n, a)?;
    }
    Ok(groups.into_iter().collect())
}

/// 9/4 − {1, 9, 5}/(4ψ(n)) for n odd, n ≡ 2 mod 4, 4 | n.
pub fn d2_closed_form(n: u64) -> Result<Constant> {
    if n < 2 {
        return Err(Error::Domain(format!("closed form needs n >= 2, got {n}")));
    }
    let k = if n % 2 == 1 {
        1
    } else if n % 4 == 0 {
        5
    } else {
        9
    };
    let c = Rational::new(9, 4) - Rational::new(k, 4 * dedekind_psi(n)? as i64);
    Ok(Constant::rational(c, format!("d=2 closed form, n={n}")))
}

/// Σ_k count/w² of a width list.
fn inverse_square_sum(list: &[(u64, u64)]) -> Rational {
    list.iter().map(|&(c, w)| Rational::from(c) / Rational::from(w * w)).sum()
}

/// (1/area(𝓕))·Σ_i area(𝒞_i)·Σ_k 1/w²_{i,k}.
pub fn generic_from_fiber(f: &FiberDecomposition) -> Constant {
    let mut s = Rational::zero();
    for c in &f.cylinders {
        s += Rational::from(c.area) * inverse_square_sum(&c.interior);
    }
    Constant::rational(s / Rational::from(f.area()), format!("generic constant from fiber, d={}", f.d))
}

fn check_orbit(f: &FiberDecomposition, orbit: &OrbitSet) -> Result<()> {
    if orbit.modulus() != f.d {
        return Err(Error::ModulusMismatch(orbit.modulus(), f.d));
    }
    if orbit.seed().is_lattice() {
        return Err(Error::Domain("orbit consists of lattice points (degenerate surfaces)".into()));
    }
    Ok(())
}

/// Orbit average of Σ 1/w² over the horizontal cylinders.
pub fn finite_orbit_from_fiber(f: &FiberDecomposition, orbit: &OrbitSet) -> Result<Constant> {
    check_orbit(f, orbit)?;
    let mut s = Rational::zero();
    let sums: Vec<(Rational, Rational)> = f
        .cylinders
        .iter()
        .map(|c| (inverse_square_sum(&c.interior), inverse_square_sum(&c.boundary)))
        .collect();
    let mut counts = vec![(0u64, 0u64); f.cylinders.len()];
    for p in orbit.points() {
        let (i, on) = fiber_cylinder_index(&TwistPoint::Exact(*p));
        if on {
            counts[i as usize].1 += 1;
        } else {
            counts[i as usize].0 += 1;
        }
    }
    for ((inner, bdry), (ci, cb)) in sums.iter().zip(&counts) {
        s += Rational::from(*ci) * inner + Rational::from(*cb) * bdry;
    }
    Ok(Constant::rational(
        s / Rational::from(orbit.len() as u64),
        format!("finite orbit cylinder constant, d={}, |O|={}", f.d, orbit.len()),
    ))
}

/// c_±(n) = (2n²/φψ)·Σ_{i≥1,(i,n)=1} 1/i², identically 2ζ(2).
pub fn saddle_torsion_constant(n: u64) -> Result<Constant> {
    if n < 2 {
        return Err(Error::Domain(format!("saddle constant needs n >= 2, got {n}")));
    }
    let c = Rational::from(2 * n * n) / Rational::from(orbit_size(n)?) * coprime_zeta2_factor(n)?;
    Ok(Constant::new(c, Transcendental::Zeta2, format!("saddle constant, all i coprime to {n}")))
}

/// d·c_±(n).
pub fn saddle_torsion_constant_cover(d: u64, n: u64) -> Result<Constant> {
    let c = saddle_torsion_constant(n)?;
    Ok(c.scaled(Rational::from(d), format!("saddle constant, d={d}, n={n}")))
}

/// (2n²/φψ)·Σ_{1≤i<n,(i,n)=1} 1/i²: the saddle constant of the order-n points
/// of the marked torus, as measured by counting.
pub fn saddle_torsion_constant_finite(n: u64) -> Result<Constant> {
    if n < 2 {
        return Err(Error::Domain(format!("saddle constant needs n >= 2, got {n}")));
    }
    let mut s = Rational::zero();
    for i in 1..n {
        if gcd(i, n) == 1 {
            s += Rational::new(1, (i * i) as i64);
        }
    }
    let c = Rational::from(2 * n * n) / Rational::from(orbit_size(n)?) * s;
    Ok(Constant::rational(c, format!("finite saddle constant, n={n}")))
}

/// Generic saddle constant d·π²/3 = 2d·ζ(2).
pub fn saddle_generic_constant(d: u64) -> Constant {
    Constant::new(Rational::from(2 * d), Transcendental::Zeta2, format!("generic saddle constant, d={d}"))
}

/// Normalization of m-homologous constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SaddleConvention {
    /// One chain of d/m connections per family.
    PerChain,
    /// Every connection of the family counted.
    AllConnections,
}

fn require_divisor(d: u64, m: u64) -> Result<()> {
    if d == 0 || m == 0 || d % m != 0 {
        return Err(Error::NotDivisor(m, d));
    }
    Ok(())
}

/// (π²/3)·φ(d/m)ψ(d/m)/(d·m) per chain; ×m for all connections.
pub fn m_homologous_generic(d: u64, m: u64, conv: SaddleConvention) -> Result<Constant> {
    require_divisor(d, m)?;
    let j2 = orbit_size(d / m)?;
    let per_chain = Rational::from(j2) / Rational::from(3 * d * m);
    let (c, what) = match conv {
        SaddleConvention::PerChain => (per_chain, "per chain"),
        SaddleConvention::AllConnections => (per_chain * Rational::from(m), "all connections"),
    };
    Ok(Constant::new(c, Transcendental::PiSquared, format!("generic {m}-homologous constant, d={d}, {what}")))
}

/// Orbit points on the horizontal spine as (left endpoint, {t_h}).
fn spine_points(orbit: &OrbitSet) -> Vec<((u64, u64), Rational)> {
    orbit
        .points()
        .iter()
        .filter_map(|p| {
            let [x, y] = p.numerators();
            let den = p.den();
            (y % den == 0 && x % den != 0).then(|| {
                ((x.div_euclid(den) as u64, (y / den) as u64), Rational::new(x.rem_euclid(den), den))
            })
        })
        .collect()
}

/// m-homologous constant of a finite orbit: the d connections that degenerate
/// along a spine segment, weighted by the inverse square of the distance to the
/// class-m endpoint.
pub fn m_homologous_finite(d: u64, m: u64, orbit: &OrbitSet, conv: SaddleConvention) -> Result<Constant> {
    require_divisor(d, m)?;
    if orbit.modulus() != d {
        return Err(Error::ModulusMismatch(orbit.modulus(), d));
    }
    if orbit.seed().is_lattice() {
        return Err(Error::Domain("orbit consists of lattice points".into()));
    }
    let mut s = Rational::zero();
    for ((j, k), f) in spine_points(orbit) {
        if gcd3(j as i64, k as i64, d) == m {
            s += f.pow(-2);
        }
        if gcd3(j as i64 + 1, k as i64, d) == m {
            s += (Rational::one() - f).pow(-2);
        }
    }
    let all = s * Rational::from(d) / Rational::from(orbit.len() as u64);
    let (c, what) = match conv {
        SaddleConvention::AllConnections => (all, "all connections"),
        SaddleConvention::PerChain => (all / Rational::from(m), "per chain"),
    };
    Ok(Constant::rational(c, format!("{m}-homologous constant, d={d}, |O|={}, {what}", orbit.len())))
}

/// The one-sided form (2d/(m|𝒪|))·Σ 1/{t_h}² over orbit points on spine
/// segments whose left endpoint has class m.
pub fn m_homologous_finite_one_sided(d: u64, m: u64, orbit: &OrbitSet) -> Result<Constant> {
    require_divisor(d, m)?;
    let mut s = Rational::zero();
    for ((j, k), f) in spine_points(orbit) {
        if gcd3(j as i64, k as i64, d) == m {
            s += f.pow(-2);
        }
    }
    let c = s * Rational::from(2 * d) / Rational::from(m * orbit.len() as u64);
    Ok(Constant::rational(c, format!("{m}-homologous constant (one-sided form), d={d}")))
}

/// d/(m·|𝒪|·|{t_h} − ε|²), ε = 1 for the connection towards the right endpoint.
pub fn m_homologous_endpoint(d: u64, m: u64, orbit_len: u64, frac_h: &Rational, towards_right: bool) -> Result<Constant> {
    require_divisor(d, m)?;
    if frac_h.is_zero() || !frac_h.is_positive() || *frac_h >= Rational::one() {
        return Err(Error::Domain("fractional part must lie in (0, 1)".into()));
    }
    let dist = if towards_right { Rational::one() - frac_h } else { frac_h.clone() };
    let c = Rational::from(d) / (Rational::from(m * orbit_len) * dist.pow(2));
    Ok(Constant::rational(c, format!("{m}-homologous endpoint constant, d={d}")))
}

/// Saddle constant of a finite orbit, all classes or one class, all connections.
pub fn saddle_orbit_constant(d: u64, orbit: &OrbitSet, class: Option<u64>) -> Result<Constant> {
    match class {
        Some(m) => m_homologous_finite(d, m, orbit, SaddleConvention::AllConnections),
        None => {
            let mut s = Rational::zero();
            for m in divisors(d)? {
                s += m_homologous_finite(d, m, orbit, SaddleConvention::AllConnections)?.coefficient;
            }
            Ok(Constant::rational(s, format!("finite orbit saddle constant, d={d}, |O|={}", orbit.len())))
        }
    }
}

/// Restriction of a per-cylinder term to the transverse band a < t_v − i < b.
#[derive(Clone, Copy, Debug)]
pub enum AreaMode<'a> {
    Generic,
    Orbit(&'a OrbitSet),
}

pub fn area_restricted_constant(
    f: &FiberDecomposition,
    i: u64,
    a: &Rational,
    b: &Rational,
    mode: AreaMode<'_>,
) -> Result<Constant> {
    if i >= f.d {
        return Err(Error::Domain(format!("cylinder index {i} out of range")));
    }
    if a >= b || a.is_positive() == false && !a.is_zero() || *b > Rational::one() {
        return Err(Error::Domain(format!("need 0 <= a < b <= 1, got ({a}, {b})")));
    }
    let cyl = &f.cylinders[i as usize];
    let w = inverse_square_sum(&cyl.interior);
    let c = match mode {
        AreaMode::Generic => {
            let band_area = Rational::from(cyl.area) * (b - a);
            band_area / Rational::from(f.area()) * w
        }
        AreaMode::Orbit(orbit) => {
            if orbit.modulus() != f.d {
                return Err(Error::ModulusMismatch(orbit.modulus(), f.d));
            }
            let lo = Rational::from(i) + a;
            let hi = Rational::from(i) + b;
            let hits = orbit
                .points()
                .iter()
                .filter(|p| {
                    let y = p.y();
                    y > lo && y < hi
                })
                .count() as u64;
            Rational::from(hits) / Rational::from(orbit.len() as u64) * w
        }
    };
    Ok(Constant::rational(c, format!("area restricted constant, cylinder {i}, band ({a}, {b})")))
}

/// π/(3·vol)·Σ 1/(h_i w_i) for cylinders of one common modulus.
pub fn single_cusp_veech_constant(volume: f64, cylinders: &[(f64, f64)]) -> Result<f64> {
    if volume <= 0.0 || cylinders.is_empty() {
        return Err(Error::Domain("need positive volume and at least one cylinder".into()));
    }
    let m0 = cylinders[0].0 / cylinders[0].1;
    if cylinders.iter().any(|&(w, h)| ((w / h) - m0).abs() > 1e-9 * m0.abs().max(1.0)) {
        return Err(Error::UnequalModuli);
    }
    let s: f64 = cylinders.iter().map(|&(w, h)| 1.0 / (h * w)).sum();
    Ok(std::f64::consts::PI / (3.0 * volume) * s)
}

/// l_v/(vol·w²).
pub fn gutkin_judge_rate(volume: f64, l_v: f64, w: f64) -> Result<f64> {
    if volume <= 0.0 || l_v <= 0.0 || w <= 0.0 {
        return Err(Error::Domain("volume, l_v and w must be positive".into()));
    }
    Ok(l_v / (volume * w * w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ParityBranch {
    #[serde(rename = "odd")]
    Odd,
    #[serde(rename = "even-4∤n")]
    EvenNotFour,
    #[serde(rename = "even-4|n")]
    EvenFour,
}

impl ParityBranch {
    pub fn of(n: u64) -> Self {
        if n % 2 == 1 {
            ParityBranch::Odd
        } else if n % 4 == 0 {
            ParityBranch::EvenFour
        } else {
            ParityBranch::EvenNotFour
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ParityBranch::Odd => "odd",
            ParityBranch::EvenNotFour => "even-4∤n",
            ParityBranch::EvenFour => "even-4|n",
        }
    }
}

/// The two spine leaves of the 2-symmetric fiber: t_v = 0 through the lattice
/// point [0], and t_v = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinePart {
    Lattice,
    Shifted,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub branch: ParityBranch,
    pub value: Constant,
    /// |𝒪_n ∩ part| by enumeration.
    pub spine_hits: u64,
}

/// 3ζ(2).
pub fn d2_convergence_limit() -> Constant {
    Constant::new(Rational::from_integer(3), Transcendental::Zeta2, "limit of the d=2 class-1 saddle constants")
}

fn inv_sq(i: u64) -> Rational {
    Rational::new(1, (i * i) as i64)
}

/// c^±_1(n) by the three parity cases.
pub fn d2_convergence_value(n: u64) -> Result<Constant> {
    if n < 3 {
        return Err(Error::Domain(format!("convergence sequence needs n >= 3, got {n}")));
    }
    let pre = Rational::from(4 * n * n) / Rational::from(orbit_size(n)?);
    let branch = ParityBranch::of(n);
    let s = match branch {
        ParityBranch::Odd => (1..=(n + 1) / 2).filter(|&i| gcd(i, 2 * n) == 1).map(inv_sq).sum(),
        _ => {
            let h = n / 2;
            let first: Rational = (1..=h).filter(|&i| gcd(i, h) == 1).map(inv_sq).sum::<Rational>() * Rational::new(1, 2);
            let second: Rational = (1..=h).filter(|&i| gcd(i, n) == 1).map(|i| inv_sq(h - i)).sum();
            let w = if branch == ParityBranch::EvenFour { Rational::new(1, 4) } else { Rational::new(4, 16) };
            first + second * w
        }
    };
    Ok(Constant::rational(pre * s, format!("c1(n), n={n}, {}", branch.label())))
}

/// Rows of c^±_1(n) for each n, with the spine intersection count of the chosen part.
pub fn d2_convergence_sequence(d: u64, ns: &[u64], part: SpinePart) -> Result<Vec<ConvergenceRow>> {
    if d != 2 {
        return Err(Error::Domain(format!("convergence sequence is defined for d = 2 only, got {d}")));
    }
    ns.iter()
        .map(|&n| {
            let value = d2_convergence_value(n)?;
            let level = match part {
                SpinePart::Lattice => 0,
                SpinePart::Shifted => 1,
            };
            // order-n points of T² read on T²_2 = 2·T²
            let orbit = orbit_enumerate(&TorusPoint::from_parts(2, 0, n as i64, 2)?)?;
            let spine_hits = orbit
                .points()
                .iter()
                .filter(|p| {
                    let [x, y] = p.numerators();
                    let den = p.den();
                    y == level * den && x % den != 0
                })
                .count() as u64;
            Ok(ConvergenceRow { n, branch: ParityBranch::of(n), value, spine_hits })
        })
        .collect()
}
