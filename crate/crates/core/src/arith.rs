//! Exact multiplicative number theory: rationals, factorizations, φ, ψ, D and
//! the primitive-vector sweep.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// ζ(2) = π²/6.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Exact arbitrary precision rational, always reduced with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// `num/den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Rational(BigRational::new(num, den))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Fractional part in [0, 1).
    pub fn fract(&self) -> Rational {
        Rational(&self.0 - self.0.floor())
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn pow(&self, e: i32) -> Rational {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Domain(format!("cannot parse rational '{s}'"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::from_big(n, d))
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Rational(BigRational::from_integer(n)))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl<'a> AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// gcd of absolute values; gcd(0, 0) = 0.
pub fn gcd_i64(a: i64, b: i64) -> u64 {
    a.unsigned_abs().gcd(&b.unsigned_abs())
}

/// gcd(j, k, d) with the convention gcd(0, 0, d) = d.
pub fn gcd3(j: i64, k: i64, d: u64) -> u64 {
    gcd(gcd_i64(j, k), d)
}

/// Prime factorization with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn of(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("factorization of 0".into()));
        }
        let mut factors = Vec::new();
        let mut m = n;
        for p in [2u64, 3, 5] {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        }
        // wheel mod 30
        const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
        let mut p = 7u64;
        let mut i = 0;
        while p * p <= m {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
            p += STEPS[i];
            i = (i + 1) % 8;
        }
        if m > 1 {
            factors.push((m, 1));
        }
        Ok(Factorization { factors })
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

fn nonzero(n: u64, what: &str) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain(format!("{what}(0) is undefined")));
    }
    Factorization::of(n)
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = nonzero(n, "phi")?;
    Ok(f.primes().fold(n, |acc, p| acc / p * (p - 1)))
}

pub fn dedekind_psi(n: u64) -> Result<u64> {
    let f = nonzero(n, "psi")?;
    Ok(f.primes().fold(n, |acc, p| acc / p * (p + 1)))
}

pub fn divisor_count(n: u64) -> Result<u64> {
    let f = nonzero(n, "D")?;
    Ok(f.factors().iter().map(|&(_, e)| e as u64 + 1).product())
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = nonzero(n, "divisors")?;
    let mut out = vec![1u64];
    for &(p, e) in f.factors() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// φ(n)ψ(n), the size of the SL2(Z) orbit of [1/n] on the unit torus.
pub fn orbit_size(n: u64) -> Result<u64> {
    Ok(euler_phi(n)? * dedekind_psi(n)?)
}

/// ∏_{p|n}(1 − 1/p²) as an exact rational.
pub fn coprime_zeta2_factor(n: u64) -> Result<Rational> {
    let f = nonzero(n, "coprime_zeta2")?;
    let mut r = Rational::one();
    for p in f.primes() {
        let p2 = (p * p) as i64;
        r = r * Rational::new(p2 - 1, p2);
    }
    Ok(r)
}

/// Σ_{i≥1, gcd(i,n)=1} 1/i² via the Euler product ζ(2)·∏_{p|n}(1 − 1/p²).
pub fn coprime_zeta2(n: u64) -> Result<f64> {
    Ok(ZETA2 * coprime_zeta2_factor(n)?.to_f64())
}

/// Partial sum over i ≤ terms with gcd(i,n)=1, and the bound 1/terms on the omitted tail.
pub fn coprime_zeta2_partial(n: u64, terms: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("coprime_zeta2(0)".into()));
    }
    let mut s = 0.0;
    for i in (1..=terms).rev() {
        if gcd(i, n) == 1 {
            let x = i as f64;
            s += 1.0 / (x * x);
        }
    }
    Ok((s, 1.0 / terms.max(1) as f64))
}

/// Largest q ≥ 0 with p² + q² ≤ T², or None when p² > T².
pub fn row_extent(p: i64, t: f64) -> Option<i64> {
    let t2 = t * t;
    let p2 = (p as f64) * (p as f64);
    if p2 > t2 {
        return None;
    }
    let mut q = (t2 - p2).sqrt().floor() as i64;
    while ((q + 1) as f64).powi(2) + p2 <= t2 {
        q += 1;
    }
    while q > 0 && (q as f64).powi(2) + p2 > t2 {
        q -= 1;
    }
    Some(q)
}

/// Primitive integer vectors of norm ≤ T, row-major: p ascending, then q ascending.
pub fn primitive_vectors(t: f64) -> PrimitiveVectors {
    let pmax = if t > 0.0 { t.floor() as i64 } else { -1 };
    let mut it = PrimitiveVectors {
        t,
        p: -pmax,
        pmax,
        q: 0,
        qmax: -1,
    };
    if pmax >= 0 {
        it.start_row();
    }
    it
}

pub struct PrimitiveVectors {
    t: f64,
    p: i64,
    pmax: i64,
    q: i64,
    qmax: i64,
}

impl PrimitiveVectors {
    fn start_row(&mut self) {
        let e = row_extent(self.p, self.t).unwrap_or(-1);
        self.q = -e;
        self.qmax = e;
    }
}

impl Iterator for PrimitiveVectors {
    type Item = (i64, i64);

    fn next(&mut self) -> Option<(i64, i64)> {
        while self.p <= self.pmax {
            while self.q <= self.qmax {
                let q = self.q;
                self.q += 1;
                if gcd_i64(self.p, q) == 1 {
                    return Some((self.p, q));
                }
            }
            self.p += 1;
            if self.p <= self.pmax {
                self.start_row();
            }
        }
        None
    }
}
