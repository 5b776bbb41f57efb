//! Exact roots of unity and cyclotomic numbers.
//!
//! A root of unity is an element of Q/Z written additively: `a/N` stands for
//! the root `zeta_N^a`. With this model the splitting of the torsion of a
//! coefficient field into its ell-primary and prime-to-ell parts, and the
//! Teichmueller section identifying the latter with the torsion of the
//! residue field, are exact projections with no numerical content.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num::{BigInt, One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{euler_phi, gcd_u64, is_prime_u64, lcm_u64, Error, Rat, Result};

/// An element of Q/Z, i.e. the root of unity `zeta_order^numerator`.
///
/// Kept reduced: `0 <= numerator < order` and `gcd(numerator, order) = 1`,
/// except the identity which is `0/1`. The group law is addition in Q/Z.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    ord: u64,
}

impl RootOfUnity {
    pub fn new(num: i64, ord: u64) -> Self {
        assert!(ord > 0, "order must be positive");
        let n = num.rem_euclid(ord as i64) as u64;
        let g = gcd_u64(n, ord);
        if n == 0 {
            RootOfUnity { num: 0, ord: 1 }
        } else {
            RootOfUnity {
                num: n / g,
                ord: ord / g,
            }
        }
    }

    pub fn zero() -> Self {
        RootOfUnity { num: 0, ord: 1 }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// The exact multiplicative order of this root of unity.
    pub fn order(&self) -> u64 {
        self.ord
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Group law of Q/Z.
    pub fn add(&self, other: &RootOfUnity) -> RootOfUnity {
        let l = lcm_u64(self.ord, other.ord);
        let a = self.num as u128 * (l / self.ord) as u128;
        let b = other.num as u128 * (l / other.ord) as u128;
        RootOfUnity::new(((a + b) % l as u128) as i64, l)
    }

    pub fn neg(&self) -> RootOfUnity {
        RootOfUnity::new(-(self.num as i64), self.ord)
    }

    pub fn sub(&self, other: &RootOfUnity) -> RootOfUnity {
        self.add(&other.neg())
    }

    /// Scalar multiple `k*x` in Q/Z, i.e. the power `x^k` multiplicatively.
    pub fn mul_int(&self, k: i64) -> RootOfUnity {
        let kk = k.rem_euclid(self.ord as i64) as u128;
        RootOfUnity::new(((self.num as u128 * kk) % self.ord as u128) as i64, self.ord)
    }

    /// Splits `x` into its ell-power-order and prime-to-ell-order parts.
    ///
    /// The pair is the unique one with `ell_part + ell_prime_part = x`,
    /// realizing the splitting of the torsion into a direct product.
    pub fn ell_split(&self, ell: u64) -> Result<(RootOfUnity, RootOfUnity)> {
        if !is_prime_u64(ell) {
            return Err(Error::Invalid(format!("{ell} is not prime")));
        }
        let mut lp = 1u64;
        let mut m = self.ord;
        while m % ell == 0 {
            m /= ell;
            lp *= ell;
        }
        if lp == 1 {
            return Ok((RootOfUnity::zero(), *self));
        }
        // 1/N = alpha/lp + beta/m with alpha*m + beta*lp = 1.
        let (alpha, beta) = bezout(m as i64, lp as i64);
        let ell_part = RootOfUnity::new(self.num as i64 % lp as i64 * (alpha % lp as i64), lp);
        let ell_prime = RootOfUnity::new(self.num as i64 % m as i64 * (beta % m as i64), m);
        Ok((ell_part, ell_prime))
    }

    /// The Teichmueller section on prime-to-ell roots: the identity map in
    /// the Q/Z model, defined only on inputs of order coprime to ell.
    pub fn teich_section(&self, ell: u64) -> Result<RootOfUnity> {
        if !is_prime_u64(ell) {
            return Err(Error::Invalid(format!("{ell} is not prime")));
        }
        if self.ord % ell == 0 {
            return Err(Error::Invalid(format!(
                "order {} of {} is divisible by {ell}",
                self.ord, self
            )));
        }
        Ok(*self)
    }

    /// Projection killing the ell-primary part; this is reduction mod ell
    /// on values.
    pub fn r_ell_project(&self, ell: u64) -> Result<RootOfUnity> {
        Ok(self.ell_split(ell)?.1)
    }
}

fn bezout(a: i64, b: i64) -> (i64, i64) {
    // returns (x, y) with a*x + b*y = gcd(a, b)
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    (x0, y0)
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.ord)
    }
}

impl fmt::Debug for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RootOfUnity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (a, n) = s
            .split_once('/')
            .ok_or_else(|| Error::Invalid(format!("expected a/N, got {s}")))?;
        let a: i64 = a
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad numerator in {s}")))?;
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad order in {s}")))?;
        if n == 0 {
            return Err(Error::Invalid("order must be positive".into()));
        }
        Ok(RootOfUnity::new(a, n))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Coefficients of the `n`-th cyclotomic polynomial, monic, constant first.
pub fn cyclotomic_poly(n: u64) -> std::sync::Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, std::sync::Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = int_poly_exact_div(&num, &phi_d);
        }
    }
    let arc = std::sync::Arc::new(num);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

fn int_poly_exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    assert!(den[dd].is_one());
    let mut quo = vec![BigInt::zero(); nd - dd + 1];
    for i in (dd..=nd).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quo[i - dd] = c.clone();
        for j in 0..=dd {
            rem[i - dd + j] -= &c * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact division");
    quo
}

/// An exact element of the cyclotomic field of the stated conductor, in the
/// power basis `1, zeta, ..., zeta^(phi(N)-1)` with rational coordinates.
///
/// Values of ordinary and Brauer characters (finite sums of roots of unity)
/// all live here. Equality across conductors is decided after embedding both
/// sides into the field of the lcm conductor.
#[derive(Clone)]
pub struct CycloNumber {
    conductor: u64,
    coords: Vec<Rat>,
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber {
            conductor: 1,
            coords: vec![Rat::zero()],
        }
    }

    pub fn one() -> Self {
        CycloNumber::from_int(1)
    }

    pub fn from_int(k: i64) -> Self {
        CycloNumber {
            conductor: 1,
            coords: vec![Rat::from_integer(BigInt::from(k))],
        }
    }

    pub fn from_rat(r: Rat) -> Self {
        CycloNumber {
            conductor: 1,
            coords: vec![r],
        }
    }

    /// The root of unity `zeta_N^a` as a cyclotomic number of conductor `N`.
    pub fn from_root(r: &RootOfUnity) -> Self {
        let n = r.order();
        let phi = euler_phi(n) as usize;
        let mut x = vec![Rat::zero(); (n as usize).max(phi)];
        x[r.numerator() as usize] = Rat::one();
        let coords = reduce_mod_cyclotomic(x, n);
        CycloNumber {
            conductor: n,
            coords,
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    /// Rewrites in the field of conductor `m`; requires `conductor | m`.
    pub fn embed(&self, m: u64) -> CycloNumber {
        assert!(
            m % self.conductor == 0,
            "cannot embed conductor {} into {}",
            self.conductor,
            m
        );
        if m == self.conductor {
            return self.clone();
        }
        let step = (m / self.conductor) as usize;
        let mut x = vec![Rat::zero(); (self.coords.len() - 1) * step + 1];
        for (i, c) in self.coords.iter().enumerate() {
            x[i * step] = c.clone();
        }
        let coords = reduce_mod_cyclotomic(x, m);
        CycloNumber {
            conductor: m,
            coords,
        }
    }

    fn lift_pair(&self, other: &CycloNumber) -> (CycloNumber, CycloNumber, u64) {
        let m = lcm_u64(self.conductor, other.conductor);
        (self.embed(m), other.embed(m), m)
    }

    pub fn add(&self, other: &CycloNumber) -> CycloNumber {
        let (a, b, m) = self.lift_pair(other);
        let coords = a
            .coords
            .iter()
            .zip(b.coords.iter())
            .map(|(x, y)| x + y)
            .collect();
        CycloNumber {
            conductor: m,
            coords,
        }
    }

    pub fn neg(&self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn sub(&self, other: &CycloNumber) -> CycloNumber {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CycloNumber) -> CycloNumber {
        let (a, b, m) = self.lift_pair(other);
        let mut prod = vec![Rat::zero(); a.coords.len() + b.coords.len()];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let coords = reduce_mod_cyclotomic(prod, m);
        CycloNumber {
            conductor: m,
            coords,
        }
    }

    pub fn scale(&self, r: &Rat) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coords: self.coords.iter().map(|x| x * r).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> CycloNumber {
        self.scale(&Rat::from_integer(BigInt::from(k)))
    }

    /// Complex conjugation, `zeta -> zeta^(-1)`.
    pub fn conjugate(&self) -> CycloNumber {
        if self.conductor <= 2 {
            return self.clone();
        }
        let n = self.conductor;
        let mut x = vec![Rat::zero(); ((n as usize - 1) * (self.coords.len() - 1)).max(1) + 1];
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                x[(n as usize - 1) * i] += c;
            }
        }
        let coords = reduce_mod_cyclotomic(x, n);
        CycloNumber {
            conductor: n,
            coords,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Returns the value as a rational if it lies in Q.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    /// Returns the value as an integer if it is one.
    pub fn as_int(&self) -> Option<BigInt> {
        let r = self.as_rat()?;
        if r.denom().is_one() {
            Some(r.numer().clone())
        } else {
            None
        }
    }

    pub fn inv(&self) -> Option<CycloNumber> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_poly(self.conductor);
        let phi_rat: Vec<Rat> = phi.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let inv = poly_mod_inverse(&self.coords, &phi_rat)?;
        let coords = reduce_mod_cyclotomic(inv, self.conductor);
        Some(CycloNumber {
            conductor: self.conductor,
            coords,
        })
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        let (a, b, _) = self.lift_pair(other);
        a.coords == b.coords
    }
}

impl Eq for CycloNumber {}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo(N={}; {:?})", self.conductor, self.coords)
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "z{}^{}", self.conductor, i)?;
            } else {
                write!(f, "{c}*z{}^{}", self.conductor, i)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    conductor: u64,
    coords: Vec<String>,
}

impl Serialize for CycloNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson {
            conductor: self.conductor,
            coords: self.coords.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CycloJson::deserialize(d)?;
        let phi = euler_phi(j.conductor) as usize;
        if j.coords.len() != phi {
            return Err(D::Error::custom(format!(
                "expected {phi} coordinates for conductor {}",
                j.conductor
            )));
        }
        let coords = j
            .coords
            .iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(CycloNumber {
            conductor: j.conductor,
            coords,
        })
    }
}

pub(crate) fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| Error::Invalid(format!("bad rational {s}")))?;
    let d = BigInt::from_str(d.trim()).map_err(|_| Error::Invalid(format!("bad rational {s}")))?;
    if d.is_zero() {
        return Err(Error::Invalid("zero denominator".into()));
    }
    Ok(Rat::new(n, d))
}

/// Reduces a polynomial in `zeta_n` (coefficients indexed by powers) modulo
/// the `n`-th cyclotomic polynomial, returning exactly `phi(n)` coordinates.
fn reduce_mod_cyclotomic(mut x: Vec<Rat>, n: u64) -> Vec<Rat> {
    let phi = euler_phi(n) as usize;
    let modp = cyclotomic_poly(n);
    let deg = modp.len() - 1;
    for i in (deg..x.len()).rev() {
        if x[i].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut x[i], Rat::zero());
        for j in 0..deg {
            if !modp[j].is_zero() {
                let t = &c * Rat::from_integer(modp[j].clone());
                x[i - deg + j] -= t;
            }
        }
    }
    x.truncate(phi.max(1));
    x.resize(phi.max(1), Rat::zero());
    x
}

fn poly_deg(p: &[Rat]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

/// Extended Euclid in Q[x]: returns `f^-1 mod g`, assuming gcd(f, g) = 1.
fn poly_mod_inverse(f: &[Rat], g: &[Rat]) -> Option<Vec<Rat>> {
    let mut r0 = g.to_vec();
    let mut r1 = f.to_vec();
    let mut s0 = vec![Rat::zero()];
    let mut s1 = vec![Rat::one()];
    while poly_deg(&r1).is_some() {
        let (q, rem) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s2;
    }
    let d = poly_deg(&r0)?;
    if d != 0 {
        return None; // not coprime
    }
    let c = r0[0].clone();
    Some(s0.iter().map(|x| x / &c).collect())
}

fn poly_divrem(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = poly_deg(den).expect("division by zero polynomial");
    let mut rem = num.to_vec();
    let nd = match poly_deg(&rem) {
        Some(d) => d,
        None => return (vec![Rat::zero()], rem),
    };
    if nd < dd {
        return (vec![Rat::zero()], rem);
    }
    let lead = den[dd].clone();
    let mut quo = vec![Rat::zero(); nd - dd + 1];
    for i in (dd..=nd).rev() {
        if rem[i].is_zero() {
            continue;
        }
        let c = &rem[i] / &lead;
        quo[i - dd] = c.clone();
        for j in 0..=dd {
            let t = &c * &den[j];
            rem[i - dd + j] -= t;
        }
    }
    (quo, rem)
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ru(a: i64, n: u64) -> RootOfUnity {
        RootOfUnity::new(a, n)
    }

    #[test]
    fn reduction_invariant() {
        let x = ru(14, 12);
        assert_eq!(x, ru(1, 6));
        assert_eq!(ru(0, 7), RootOfUnity::zero());
        assert_eq!(ru(-1, 4), ru(3, 4));
    }

    // Oracle for ell_split: enumerate all pairs (a/ell^v, b/m) and find the
    // one recomposing to x.
    fn ell_split_oracle(x: RootOfUnity, ell: u64) -> (RootOfUnity, RootOfUnity) {
        let mut lp = 1u64;
        let mut m = x.order();
        while m % ell == 0 {
            m /= ell;
            lp *= ell;
        }
        for a in 0..lp {
            for b in 0..m {
                let cand = (ru(a as i64, lp), ru(b as i64, m));
                if cand.0.add(&cand.1) == x {
                    return cand;
                }
            }
        }
        unreachable!("CRT always has a solution");
    }

    #[test]
    fn ell_split_matches_oracle() {
        // frozen from the enumeration oracle
        assert_eq!(ru(1, 12).ell_split(3).unwrap(), (ru(1, 3), ru(3, 4)));
        assert_eq!(ell_split_oracle(ru(1, 12), 3), (ru(1, 3), ru(3, 4)));
        assert_eq!(
            RootOfUnity::zero().ell_split(3).unwrap(),
            (RootOfUnity::zero(), RootOfUnity::zero())
        );
        assert_eq!(
            ru(1, 8).ell_split(3).unwrap(),
            (RootOfUnity::zero(), ru(1, 8))
        );

        for ord in 1..=60u64 {
            for a in 0..ord {
                if gcd_u64(a, ord) != 1 && a != 0 {
                    continue;
                }
                let x = ru(a as i64, ord);
                for ell in [2u64, 3, 5, 7] {
                    let got = x.ell_split(ell).unwrap();
                    assert_eq!(got, ell_split_oracle(x, ell), "x={x} ell={ell}");
                    assert_eq!(got.0.add(&got.1), x);
                    assert!(got.0.order().is_power_of_two() || ell != 2 || got.0.order() == 1);
                    assert_eq!(got.0.order() * got.1.order(), x.order());
                    assert!(got.1.order() % ell != 0);
                }
            }
        }
    }

    #[test]
    fn teich_section_and_projection() {
        assert_eq!(ru(1, 4).teich_section(3).unwrap(), ru(1, 4));
        assert_eq!(
            RootOfUnity::zero().teich_section(5).unwrap(),
            RootOfUnity::zero()
        );
        assert_eq!(ru(2, 7).teich_section(2).unwrap(), ru(2, 7));
        assert!(ru(1, 3).teich_section(3).is_err());

        assert_eq!(ru(1, 12).r_ell_project(3).unwrap(), ru(3, 4));
        assert_eq!(ru(1, 3).r_ell_project(3).unwrap(), RootOfUnity::zero());
        assert_eq!(ru(1, 5).r_ell_project(3).unwrap(), ru(1, 5));

        // section property and idempotence
        for ord in [1u64, 2, 4, 5, 7, 8, 10, 14, 35] {
            for a in 0..ord {
                let x = ru(a as i64, ord);
                if ord % 3 != 0 {
                    assert_eq!(x.teich_section(3).unwrap().r_ell_project(3).unwrap(), x);
                }
                let p = x.r_ell_project(3).unwrap();
                assert_eq!(p.r_ell_project(3).unwrap(), p);
            }
        }
    }

    #[test]
    fn projection_is_additive() {
        for (a, n, b, m) in [(1i64, 12u64, 1i64, 9u64), (5, 6, 3, 8), (2, 15, 7, 20)] {
            let x = ru(a, n);
            let y = ru(b, m);
            assert_eq!(
                x.add(&y).r_ell_project(3).unwrap(),
                x.r_ell_project(3)
                    .unwrap()
                    .add(&y.r_ell_project(3).unwrap())
            );
        }
    }

    #[test]
    fn cyclotomic_polys() {
        let p12 = cyclotomic_poly(12);
        // Phi_12 = x^4 - x^2 + 1
        let expect: Vec<BigInt> = [1, 0, -1, 0, 1].iter().map(|&c| BigInt::from(c)).collect();
        assert_eq!(*p12, expect);
        assert_eq!(cyclotomic_poly(1).len(), 2);
        assert_eq!(cyclotomic_poly(8).len(), 5); // x^4 + 1
    }

    #[test]
    fn cyclo_relations() {
        let z3 = CycloNumber::from_root(&ru(1, 3));
        let z3sq = CycloNumber::from_root(&ru(2, 3));
        let sum = CycloNumber::one().add(&z3).add(&z3sq);
        assert!(sum.is_zero(), "1 + z3 + z3^2 = 0");

        let z4 = CycloNumber::from_root(&ru(1, 4));
        assert_eq!(z4.mul(&z4), CycloNumber::from_int(-1));

        // z6 = -z3^2, checked by reducing both sides mod Phi_6
        let z6 = CycloNumber::from_root(&ru(1, 6));
        assert_eq!(z6, z3sq.neg());
    }

    #[test]
    fn conjugation_and_inverse() {
        let z5 = CycloNumber::from_root(&ru(1, 5));
        assert_eq!(z5.conjugate(), CycloNumber::from_root(&ru(4, 5)));
        let x = z5.add(&CycloNumber::from_int(2));
        let inv = x.inv().unwrap();
        assert_eq!(x.mul(&inv), CycloNumber::one());
        // |z5|^2 = 1
        assert_eq!(z5.mul(&z5.conjugate()), CycloNumber::one());
    }

    #[test]
    fn embedding_stability() {
        let z3 = CycloNumber::from_root(&ru(1, 3));
        let in12 = z3.embed(12);
        assert_eq!(in12, z3);
        assert_eq!(in12.conductor(), 12);
        let back = z3.embed(6).embed(12);
        assert_eq!(back, in12);
    }

    #[test]
    fn serde_round_trip() {
        let x = CycloNumber::from_root(&ru(1, 12)).scale(&parse_rat("3/2").unwrap());
        let s = serde_json::to_string(&x).unwrap();
        let y: CycloNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
        let r: RootOfUnity = serde_json::from_str("\"5/12\"").unwrap();
        assert_eq!(r, ru(5, 12));
    }
}
