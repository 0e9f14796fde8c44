//! SL2(Z): matrices, the action on torsion points of T²_d, orbits and cusps.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;

use serde::Serialize;

use crate::arith::{divisors, euler_phi, gcd, gcd_i64, Rational};
use crate::error::{Error, Result};

/// Integer 2×2 matrix [[a, b], [c, d]]; acts on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntegerMatrix2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl IntegerMatrix2 {
    pub const IDENTITY: IntegerMatrix2 = IntegerMatrix2 { a: 1, b: 0, c: 0, d: 1 };
    /// S = [[0,−1],[1,0]], rotation by a quarter turn.
    pub const S: IntegerMatrix2 = IntegerMatrix2 { a: 0, b: -1, c: 1, d: 0 };
    /// T = [[1,1],[0,1]].
    pub const T: IntegerMatrix2 = IntegerMatrix2 { a: 1, b: 1, c: 0, d: 1 };
    pub const MINUS_ID: IntegerMatrix2 = IntegerMatrix2 { a: -1, b: 0, c: 0, d: -1 };

    /// Checked constructor: rejects det ≠ 1.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = IntegerMatrix2 { a, b, c, d };
        m.check()?;
        Ok(m)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn check(&self) -> Result<()> {
        match self.det() {
            1 => Ok(()),
            det => Err(Error::NotUnimodular(det)),
        }
    }

    pub fn inverse(&self) -> Self {
        IntegerMatrix2 { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, v: (i64, i64)) -> (i64, i64) {
        (self.a * v.0 + self.b * v.1, self.c * v.0 + self.d * v.1)
    }

    /// Product of a word in S and T, read left to right.
    pub fn word(letters: &str) -> Result<Self> {
        letters.chars().try_fold(Self::IDENTITY, |acc, ch| match ch {
            'S' => Ok(acc * Self::S),
            'T' => Ok(acc * Self::T),
            _ => Err(Error::Domain(format!("unknown generator '{ch}'"))),
        })
    }
}

impl Mul for IntegerMatrix2 {
    type Output = IntegerMatrix2;
    fn mul(self, o: IntegerMatrix2) -> IntegerMatrix2 {
        IntegerMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl fmt::Display for IntegerMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Rational point of T²_d = R²/dZ², stored as (num_x, num_y)/den with a common
/// reduced denominator and numerators in [0, d·den).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusPoint {
    den: i64,
    num: [i64; 2],
    modulus: u64,
}

impl TorusPoint {
    /// The point (nx/den, ny/den) mod dZ².
    pub fn from_parts(nx: i64, ny: i64, den: i64, modulus: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        if modulus == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        let (nx, ny, den) = if den < 0 { (-nx, -ny, -den) } else { (nx, ny, den) };
        let g = gcd(gcd_i64(nx, ny), den as u64) as i64;
        let (nx, ny, den) = (nx / g, ny / g, den / g);
        let period = (den as i128) * modulus as i128;
        if period > i64::MAX as i128 / 64 {
            return Err(Error::Overflow("torus point denominator too large".into()));
        }
        let period = period as i64;
        Ok(TorusPoint { den, num: [nx.rem_euclid(period), ny.rem_euclid(period)], modulus })
    }

    pub fn new(x: &Rational, y: &Rational, modulus: u64) -> Result<Self> {
        let too_big = || Error::Overflow("coordinate does not fit in 64 bits".into());
        let l = num_integer::Integer::lcm(x.denom(), y.denom());
        let nx = x.numer() * (&l / x.denom());
        let ny = y.numer() * (&l / y.denom());
        let to = |b: &num_bigint::BigInt| num_traits::ToPrimitive::to_i64(b).ok_or_else(too_big);
        let period = &l * num_bigint::BigInt::from(modulus);
        let nx = num_integer::Integer::mod_floor(&nx, &period);
        let ny = num_integer::Integer::mod_floor(&ny, &period);
        Self::from_parts(to(&nx)?, to(&ny)?, to(&l)?, modulus)
    }

    pub fn origin(modulus: u64) -> Self {
        TorusPoint { den: 1, num: [0, 0], modulus }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Common reduced denominator.
    pub fn den(&self) -> i64 {
        self.den
    }

    /// Numerators in [0, d·den).
    pub fn numerators(&self) -> [i64; 2] {
        self.num
    }

    pub fn x(&self) -> Rational {
        Rational::new(self.num[0], self.den)
    }

    pub fn y(&self) -> Rational {
        Rational::new(self.num[1], self.den)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.num[0] as f64 / self.den as f64, self.num[1] as f64 / self.den as f64]
    }

    /// True iff the point lies on the integer lattice Z²/dZ².
    pub fn is_lattice(&self) -> bool {
        self.den == 1
    }

    /// Additive order in T²_d.
    pub fn order(&self) -> u64 {
        // x = num/den has order den / gcd(num_x/d..): k·num ≡ 0 mod d·den
        let period = self.den as u64 * self.modulus;
        let g = gcd(gcd(self.num[0] as u64, self.num[1] as u64), period);
        period / g
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-self.num[0], -self.num[1], self.den, self.modulus).expect("valid point")
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x(), self.y())
    }
}

impl Serialize for TorusPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TorusPoint", 3)?;
        st.serialize_field("x", &self.x())?;
        st.serialize_field("y", &self.y())?;
        st.serialize_field("modulus", &self.modulus)?;
        st.end()
    }
}

/// A·p reduced mod dZ².
pub fn act(m: &IntegerMatrix2, p: &TorusPoint) -> Result<TorusPoint> {
    m.check()?;
    Ok(act_unchecked(m, p))
}

fn act_unchecked(m: &IntegerMatrix2, p: &TorusPoint) -> TorusPoint {
    let period = p.den as i128 * p.modulus as i128;
    let (x, y) = (p.num[0] as i128, p.num[1] as i128);
    let nx = (m.a as i128 * x + m.b as i128 * y).rem_euclid(period) as i64;
    let ny = (m.c as i128 * x + m.d as i128 * y).rem_euclid(period) as i64;
    // unimodular maps preserve the reduced common denominator
    TorusPoint { den: p.den, num: [nx, ny], modulus: p.modulus }
}

/// Extended Euclid: (g, x, y) with x·a + y·b = g = gcd(a, b) ≥ 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// The A ∈ SL2(Z) with A·(p,q)ᵀ = (1,0)ᵀ whose first row has minimal norm
/// (ties broken towards the smaller shift parameter).
pub fn reduce_to_horizontal(p: i64, q: i64) -> Result<IntegerMatrix2> {
    if gcd_i64(p, q) != 1 {
        return Err(Error::NotPrimitive(p, q));
    }
    let (_, x0, y0) = ext_gcd(p, q);
    // all solutions: (x0 + k q, y0 − k p)
    let n2 = (p * p + q * q) as f64;
    let kstar = -((x0 * q - y0 * p) as f64) / n2;
    let norm = |k: i64| {
        let (x, y) = (x0 + k * q, y0 - k * p);
        x * x + y * y
    };
    let k0 = kstar.floor() as i64;
    let k = [k0 - 1, k0, k0 + 1, k0 + 2]
        .into_iter()
        .min_by_key(|&k| (norm(k), k))
        .expect("non-empty");
    Ok(IntegerMatrix2 { a: x0 + k * q, b: y0 - k * p, c: -q, d: p })
}

/// A finite SL2(Z) orbit on T²_d.
#[derive(Clone, Debug)]
pub struct OrbitSet {
    modulus: u64,
    seed: TorusPoint,
    points: Vec<TorusPoint>,
    index: HashSet<TorusPoint>,
}

impl OrbitSet {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn seed(&self) -> &TorusPoint {
        &self.seed
    }

    /// Points in breadth-first discovery order.
    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &TorusPoint) -> bool {
        self.index.contains(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TorusPoint> {
        self.points.iter()
    }

    /// Additive order of the orbit points (constant along the orbit).
    pub fn order(&self) -> u64 {
        self.seed.order()
    }
}

const ORBIT_LIMIT: usize = 20_000_000;

/// Breadth-first closure of the seed under S and T.
pub fn orbit_enumerate(seed: &TorusPoint) -> Result<OrbitSet> {
    let mut index = HashSet::new();
    let mut points = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(*seed);
    points.push(*seed);
    queue.push_back(*seed);
    while let Some(p) = queue.pop_front() {
        for g in [IntegerMatrix2::S, IntegerMatrix2::T] {
            let q = act_unchecked(&g, &p);
            if index.insert(q) {
                if index.len() > ORBIT_LIMIT {
                    return Err(Error::Overflow("orbit too large".into()));
                }
                points.push(q);
                queue.push_back(q);
            }
        }
    }
    Ok(OrbitSet { modulus: seed.modulus, seed: *seed, points, index })
}

/// All points of T²_d of exact additive order n, sorted.
pub fn torsion_points(d: u64, n: u64) -> Result<Vec<TorusPoint>> {
    if d == 0 || n == 0 {
        return Err(Error::Domain("d and n must be positive".into()));
    }
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if gcd(gcd(a, b), n) == 1 {
                let p = TorusPoint::from_parts((a * d) as i64, (b * d) as i64, n as i64, d)?;
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Number of SL2(Z) orbits on the kernel T²_d[m] = (d/m)Z²/dZ².
pub fn orbit_classes_on_kernel(d: u64, m: u64) -> Result<usize> {
    if d == 0 || m == 0 {
        return Err(Error::Domain("d and m must be positive".into()));
    }
    let mut seen: HashSet<TorusPoint> = HashSet::new();
    let mut classes = 0;
    for a in 0..m {
        for b in 0..m {
            let p = TorusPoint::from_parts((a * d) as i64, (b * d) as i64, m as i64, d)?;
            if seen.contains(&p) {
                continue;
            }
            classes += 1;
            seen.extend(orbit_enumerate(&p)?.points);
        }
    }
    Ok(classes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cusp {
    pub representative: TorusPoint,
    pub width: usize,
}

/// Partition of an orbit into ⟨T⟩-orbits.
#[derive(Clone, Debug, Serialize)]
pub struct CuspDecomposition {
    pub cusps: Vec<Cusp>,
    pub identify_sign: bool,
    pub total: usize,
}

pub fn cusp_decomposition(orbit: &OrbitSet, identify_sign: bool) -> CuspDecomposition {
    let class = |p: &TorusPoint| -> TorusPoint {
        if identify_sign {
            (*p).min(p.neg())
        } else {
            *p
        }
    };
    let mut seen: HashSet<TorusPoint> = HashSet::new();
    let mut cusps = Vec::new();
    for p in orbit.points() {
        let rep = class(p);
        if seen.contains(&rep) {
            continue;
        }
        let mut width = 0;
        let mut cur = rep;
        loop {
            seen.insert(cur);
            width += 1;
            cur = class(&act_unchecked(&IntegerMatrix2::T, &cur));
            if cur == rep {
                break;
            }
        }
        cusps.push(Cusp { representative: rep, width });
    }
    let total = cusps.len();
    CuspDecomposition { cusps, identify_sign, total }
}

/// ½·Σ_{l|n} φ(n/l)φ(l) for n ≥ 3 and 2 for n = 2.
pub fn cusp_count_formula(n: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::Domain(format!("cusp count needs n >= 2, got {n}")));
    }
    if n == 2 {
        return Ok(Rational::from_integer(2));
    }
    let mut s = 0u64;
    for l in divisors(n)? {
        s += euler_phi(n / l)? * euler_phi(l)?;
    }
    Ok(Rational::new(s as i64, 2))
}

/// A ∈ Γ₁(n): a ≡ 1, c ≡ 0, d ≡ 1 mod n.
pub fn gamma1_membership(m: &IntegerMatrix2, n: u64) -> Result<bool> {
    m.check()?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let n = n as i64;
    Ok((m.a - 1).rem_euclid(n) == 0 && m.c.rem_euclid(n) == 0 && (m.d - 1).rem_euclid(n) == 0)
}

/// Orbit partition of an arbitrary point set (used for lattice classes).
pub fn orbit_partition(points: &[TorusPoint]) -> Result<Vec<Vec<TorusPoint>>> {
    let mut owner: HashMap<TorusPoint, usize> = HashMap::new();
    let mut parts: Vec<Vec<TorusPoint>> = Vec::new();
    for p in points {
        if owner.contains_key(p) {
            continue;
        }
        let orb = orbit_enumerate(p)?;
        let id = parts.len();
        for q in orb.points() {
            owner.insert(*q, id);
        }
        parts.push(orb.points);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{divisor_count, orbit_size};
    use proptest::prelude::*;

    fn pt(x: (i64, i64), y: (i64, i64), d: u64) -> TorusPoint {
        TorusPoint::new(&Rational::new(x.0, x.1), &Rational::new(y.0, y.1), d).unwrap()
    }

    #[test]
    fn act_examples() {
        let p = pt((1, 2), (1, 2), 1);
        assert_eq!(act(&IntegerMatrix2::IDENTITY, &p).unwrap(), p);
        assert_eq!(act(&IntegerMatrix2::T, &p).unwrap(), pt((0, 1), (1, 2), 1));
        assert_eq!(act(&IntegerMatrix2::S, &pt((1, 3), (0, 1), 1)).unwrap(), pt((0, 1), (1, 3), 1));
        let bad = IntegerMatrix2 { a: 2, b: 0, c: 0, d: 1 };
        assert_eq!(act(&bad, &p), Err(Error::NotUnimodular(2)));
        assert!(IntegerMatrix2::new(1, 2, 3, 4).is_err());
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_to_horizontal(1, 0).unwrap(), IntegerMatrix2::IDENTITY);
        assert_eq!(reduce_to_horizontal(3, 2).unwrap(), IntegerMatrix2::new(1, -1, -2, 3).unwrap());
        assert_eq!(reduce_to_horizontal(0, 1).unwrap(), IntegerMatrix2::new(0, 1, -1, 0).unwrap());
        assert!(reduce_to_horizontal(2, 4).is_err());
        assert!(reduce_to_horizontal(0, 0).is_err());
    }

    #[test]
    fn reduce_is_canonical_minimum() {
        for p in -15i64..=15 {
            for q in -15i64..=15 {
                if gcd_i64(p, q) != 1 {
                    continue;
                }
                let m = reduce_to_horizontal(p, q).unwrap();
                assert_eq!(m.det(), 1);
                assert_eq!(m.apply((p, q)), (1, 0));
                let best = (-50..=50)
                    .map(|k| (m.a + k * q).pow(2) + (m.b - k * p).pow(2))
                    .min()
                    .unwrap();
                assert_eq!(m.a * m.a + m.b * m.b, best);
            }
        }
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(orbit_enumerate(&TorusPoint::origin(1)).unwrap().len(), 1);
        assert_eq!(orbit_enumerate(&pt((1, 2), (0, 1), 1)).unwrap().len(), 3);
        assert_eq!(orbit_enumerate(&pt((1, 5), (0, 1), 1)).unwrap().len(), 24);
    }

    #[test]
    fn orbit_sizes_match_phi_psi() {
        for n in 1..=40u64 {
            let o = orbit_enumerate(&TorusPoint::from_parts(1, 0, n as i64, 1).unwrap()).unwrap();
            assert_eq!(o.len() as u64, orbit_size(n).unwrap());
        }
    }

    #[test]
    fn torsion_point_examples() {
        assert_eq!(torsion_points(1, 1).unwrap(), vec![TorusPoint::origin(1)]);
        let two = torsion_points(2, 2).unwrap();
        let expect: Vec<_> = [(1, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(a, b)| TorusPoint::from_parts(a, b, 1, 2).unwrap())
            .collect();
        assert_eq!(two.len(), 3);
        assert!(expect.iter().all(|p| two.contains(p)));
    }

    #[test]
    fn torsion_points_match_order_enumeration() {
        for d in 1..=4u64 {
            for n in 1..=12u64 {
                let pts = torsion_points(d, n).unwrap();
                // brute force: every point of (1/n)·dZ² with smallest k, k·x ∈ dZ², equal to n
                let mut brute = 0;
                for a in 0..n {
                    for b in 0..n {
                        let k = (1..=n).find(|k| (k * a) % n == 0 && (k * b) % n == 0).unwrap();
                        if k == n {
                            brute += 1;
                        }
                    }
                }
                assert_eq!(pts.len(), brute);
                assert_eq!(pts.len() as u64, orbit_size(n).unwrap());
                assert!(pts.iter().all(|p| p.order() == n));
            }
        }
    }

    #[test]
    fn kernel_classes() {
        assert_eq!(orbit_classes_on_kernel(5, 1).unwrap(), 1);
        assert_eq!(orbit_classes_on_kernel(6, 6).unwrap(), 4);
        assert_eq!(orbit_classes_on_kernel(4, 4).unwrap(), 3);
    }

    #[test]
    fn kernel_classes_equal_divisor_count() {
        for d in 1..=10u64 {
            for m in 1..=12u64 {
                assert_eq!(
                    orbit_classes_on_kernel(d, m).unwrap() as u64,
                    divisor_count(m).unwrap(),
                    "d={d} m={m}"
                );
            }
        }
    }

    #[test]
    fn cusp_examples() {
        let o = orbit_enumerate(&TorusPoint::origin(1)).unwrap();
        let c = cusp_decomposition(&o, false);
        assert_eq!(c.total, 1);
        assert_eq!(c.cusps[0].width, 1);

        let o = orbit_enumerate(&pt((1, 2), (0, 1), 1)).unwrap();
        let c = cusp_decomposition(&o, false);
        let mut widths: Vec<_> = c.cusps.iter().map(|c| c.width).collect();
        widths.sort();
        assert_eq!(widths, vec![1, 2]);
        let fixed = c.cusps.iter().find(|c| c.width == 1).unwrap();
        assert_eq!(fixed.representative, pt((1, 2), (0, 1), 1));

        let o = orbit_enumerate(&pt((1, 5), (0, 1), 1)).unwrap();
        assert_eq!(cusp_decomposition(&o, true).total, 4);
    }

    #[test]
    fn cusp_formula_examples() {
        assert_eq!(cusp_count_formula(2).unwrap(), Rational::from_integer(2));
        assert_eq!(cusp_count_formula(5).unwrap(), Rational::from_integer(4));
        assert_eq!(cusp_count_formula(12).unwrap(), Rational::from_integer(10));
        assert!(cusp_count_formula(1).is_err());
    }

    #[test]
    fn cusp_widths_sum_to_orbit() {
        for n in 1..=24u64 {
            let o = orbit_enumerate(&TorusPoint::from_parts(1, 0, n as i64, 1).unwrap()).unwrap();
            let plain = cusp_decomposition(&o, false);
            assert_eq!(plain.cusps.iter().map(|c| c.width).sum::<usize>(), o.len());
            if n >= 3 {
                // −id acts freely on points of order ≥ 3
                let signed = cusp_decomposition(&o, true);
                assert_eq!(signed.cusps.iter().map(|c| c.width).sum::<usize>(), o.len() / 2);
            }
        }
    }

    #[test]
    fn gamma1_examples() {
        for n in 1..10 {
            assert!(gamma1_membership(&IntegerMatrix2::IDENTITY, n).unwrap());
        }
        assert!(gamma1_membership(&IntegerMatrix2::new(1, 1, 3, 4).unwrap(), 3).unwrap());
        assert!(!gamma1_membership(&IntegerMatrix2::S, 2).unwrap());
    }

    proptest! {
        #[test]
        fn gamma1_is_stabilizer(word in "[ST]{0,20}", n in 1u64..=20) {
            let m = IntegerMatrix2::word(&word).unwrap();
            let p = TorusPoint::from_parts(1, 0, n as i64, 1).unwrap();
            let fixed = act(&m, &p).unwrap() == p;
            prop_assert_eq!(gamma1_membership(&m, n).unwrap(), fixed);
        }

        #[test]
        fn orbit_is_closed(a in 0i64..12, b in 0i64..12, n in 1i64..12, d in 1u64..4) {
            let o = orbit_enumerate(&TorusPoint::from_parts(a, b, n, d).unwrap()).unwrap();
            for p in o.points() {
                prop_assert!(o.contains(&act(&IntegerMatrix2::S, p).unwrap()));
                prop_assert!(o.contains(&act(&IntegerMatrix2::T, p).unwrap()));
                prop_assert!(o.contains(&act(&IntegerMatrix2::T.inverse(), p).unwrap()));
            }
        }
    }
}
