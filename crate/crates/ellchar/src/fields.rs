//! Finite fields `F_(p^k)` at desk scale: Conway-style default moduli,
//! compatible tower embeddings, Frobenius, discrete logs and the
//! Teichmueller bijection onto prime-to-p roots of unity in Q/Z.
//!
//! Default moduli are primitive and norm-compatible down the divisor
//! lattice, so the embedding `gen_a -> gen_b^((p^b-1)/(p^a-1))` is a genuine
//! field embedding and the Teichmueller lift commutes with it. Discrete
//! logarithms are exhaustive with a memoized table; field sizes are capped.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cyclo::RootOfUnity;
use crate::linalg::FieldArith;
use crate::{factorize, is_prime_u64, Error, Result};

pub const FIELD_CAP: u64 = 1 << 20;

/// An element of a finite field: coefficients of the polynomial
/// representative, constant first, reduced modulo the field modulus.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FFElem(pub Vec<u64>);

impl FFElem {
    /// Encodes the element as the integer `sum c_i p^i`.
    pub fn key(&self, p: u64) -> u64 {
        self.0.iter().rev().fold(0, |acc, &c| acc * p + c)
    }
}

/// A finite field `F_(p^k)` with a fixed monic irreducible modulus and a
/// designated multiplicative generator.
pub struct FiniteField {
    p: u64,
    k: usize,
    size: u64,
    /// monic, length k+1, constant first
    modulus: Vec<u64>,
    generator: FFElem,
    /// whether the modulus is the Conway-style default (embeddings are then
    /// ring embeddings, not just multiplicative ones)
    canonical: bool,
    dlog: OnceLock<Vec<u64>>,
}

impl std::fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{}", self.p, self.k)
    }
}

/// JSON shape of a field descriptor.
#[derive(Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u64,
    pub k: usize,
    pub modulus: Vec<u64>,
    pub generator: Vec<u64>,
}

impl FiniteField {
    /// Builds `F_(p^k)`. Without an explicit modulus the Conway-style
    /// polynomial is used and the generator is the class of `x`; an explicit
    /// modulus must be irreducible and gets the least primitive element as
    /// generator.
    pub fn new(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<Arc<FiniteField>> {
        if !is_prime_u64(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::Invalid("degree must be positive".into()));
        }
        let size = checked_pow(p, k)?;
        match modulus {
            Some(m) => {
                let m: Vec<u64> = m.iter().map(|c| c % p).collect();
                if m.len() != k + 1 || m[k] != 1 {
                    return Err(Error::Invalid(format!(
                        "modulus must be monic of degree {k}"
                    )));
                }
                if !poly_is_irreducible(&m, p) {
                    return Err(Error::Invalid("modulus is reducible".into()));
                }
                let canonical = m == conway_poly(p, k);
                let mut f = FiniteField {
                    p,
                    k,
                    size,
                    modulus: m,
                    generator: FFElem(vec![0; k]),
                    canonical,
                    dlog: OnceLock::new(),
                };
                f.generator = f.least_primitive()?;
                Ok(Arc::new(f))
            }
            None => {
                let m = conway_poly(p, k);
                let generator = if k == 1 {
                    // class of x is the constant -m[0] = least primitive root
                    FFElem(vec![(p - m[0]) % p])
                } else {
                    let mut x = vec![0; k];
                    x[1] = 1;
                    FFElem(x)
                };
                Ok(Arc::new(FiniteField {
                    p,
                    k,
                    size,
                    modulus: m,
                    generator,
                    canonical: true,
                    dlog: OnceLock::new(),
                }))
            }
        }
    }

    pub fn from_descriptor(d: &FieldDescriptor) -> Result<Arc<FiniteField>> {
        let base = FiniteField::new(d.p, d.k, Some(d.modulus.clone()))?;
        let g = FFElem(normalize_len(&d.generator, d.k, d.p));
        if base.mult_order(&g) != base.size - 1 {
            return Err(Error::Invalid(
                "descriptor generator is not primitive".into(),
            ));
        }
        Ok(Arc::new(FiniteField {
            p: base.p,
            k: base.k,
            size: base.size,
            modulus: base.modulus.clone(),
            generator: g,
            canonical: base.canonical,
            dlog: OnceLock::new(),
        }))
    }

    pub fn descriptor(&self) -> FieldDescriptor {
        FieldDescriptor {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
            generator: self.generator.0.clone(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn generator(&self) -> FFElem {
        self.generator.clone()
    }

    pub fn zero(&self) -> FFElem {
        FFElem(vec![0; self.k])
    }

    pub fn one(&self) -> FFElem {
        self.from_int(1)
    }

    pub fn from_int(&self, c: u64) -> FFElem {
        let mut v = vec![0; self.k];
        v[0] = c % self.p;
        FFElem(v)
    }

    /// Decodes the integer encoding used by [`FFElem::key`].
    pub fn from_key(&self, mut key: u64) -> FFElem {
        let mut v = vec![0; self.k];
        for c in v.iter_mut() {
            *c = key % self.p;
            key /= self.p;
        }
        FFElem(v)
    }

    pub fn is_zero(&self, a: &FFElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        FFElem(
            a.0.iter()
                .zip(b.0.iter())
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        )
    }

    pub fn neg(&self, a: &FFElem) -> FFElem {
        FFElem(a.0.iter().map(|&x| (self.p - x) % self.p).collect())
    }

    pub fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = (prod[i + j] + x * y) % self.p;
                }
            }
        }
        for i in (self.k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..self.k {
                let m = self.modulus[j];
                if m != 0 {
                    let sub = c * m % self.p;
                    prod[i - self.k + j] = (prod[i - self.k + j] + self.p - sub) % self.p;
                }
            }
        }
        prod.truncate(self.k);
        FFElem(prod)
    }

    pub fn pow(&self, a: &FFElem, mut e: u128) -> FFElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FFElem) -> FFElem {
        assert!(!self.is_zero(a), "inverse of zero");
        self.pow(a, (self.size - 2) as u128)
    }

    pub fn mult_order(&self, a: &FFElem) -> u64 {
        if self.is_zero(a) {
            return 0;
        }
        let n = self.size - 1;
        let mut ord = n;
        for (q, _) in factorize(n) {
            while ord % q == 0 && self.pow(a, (ord / q) as u128) == self.one() {
                ord /= q;
            }
        }
        ord
    }

    fn least_primitive(&self) -> Result<FFElem> {
        for key in 1..self.size {
            let cand = self.from_key(key);
            if self.mult_order(&cand) == self.size - 1 {
                return Ok(cand);
            }
        }
        Err(Error::Invalid("no generator found".into()))
    }

    /// Frobenius `x -> x^q` with `q = p^base_degree`; `base_degree` must
    /// divide the field degree.
    pub fn frobenius(&self, x: &FFElem, base_degree: usize) -> Result<FFElem> {
        if base_degree == 0 || self.k % base_degree != 0 {
            return Err(Error::Invalid(format!(
                "base degree {base_degree} does not divide field degree {}",
                self.k
            )));
        }
        let q = self.p.pow(base_degree as u32);
        Ok(self.pow(x, q as u128))
    }

    fn dlog_table(&self) -> &Vec<u64> {
        self.dlog.get_or_init(|| {
            let mut table = vec![u64::MAX; self.size as usize];
            let mut cur = self.one();
            for d in 0..self.size - 1 {
                table[cur.key(self.p) as usize] = d;
                cur = self.mul(&cur, &self.generator);
            }
            table
        })
    }

    /// Discrete log with respect to the recorded generator.
    pub fn dlog(&self, x: &FFElem) -> Result<u64> {
        if self.is_zero(x) {
            return Err(Error::Invalid("dlog of zero".into()));
        }
        Ok(self.dlog_table()[x.key(self.p) as usize])
    }

    /// Teichmueller lift: the nonzero element `generator^d` goes to the root
    /// of unity `d/(p^k - 1)` in Q/Z. A group isomorphism onto
    /// `mu_(p^k - 1)` compatible with tower embeddings.
    pub fn teich_lift(&self, x: &FFElem) -> Result<RootOfUnity> {
        let d = self.dlog(x)?;
        Ok(RootOfUnity::new(d as i64, self.size - 1))
    }

    /// Inverse of [`FiniteField::teich_lift`]; the order of `r` must divide
    /// `p^k - 1`.
    pub fn teich_drop(&self, r: &RootOfUnity) -> Result<FFElem> {
        let n = self.size - 1;
        if n % r.order() != 0 {
            return Err(Error::Unrealizable {
                order: r.order(),
                spec: format!("F_{}^{}", self.p, self.k),
            });
        }
        let d = r.numerator() as u128 * (n / r.order()) as u128;
        Ok(self.pow(&self.generator, d))
    }

    /// Tower embedding `gen_a -> gen_b^((p^b-1)/(p^a-1))`. For canonical
    /// (Conway-modulus) fields this is a field embedding; in general it is
    /// multiplicative and Teichmueller-compatible.
    pub fn embed(&self, x: &FFElem, bigger: &FiniteField) -> Result<FFElem> {
        if bigger.p != self.p || bigger.k % self.k != 0 {
            return Err(Error::Invalid(format!(
                "no tower embedding F_{}^{} -> F_{}^{}",
                self.p, self.k, bigger.p, bigger.k
            )));
        }
        if self.is_zero(x) {
            return Ok(bigger.zero());
        }
        let d = self.dlog(x)?;
        let step = (bigger.size - 1) / (self.size - 1);
        Ok(bigger.pow(&bigger.generator, d as u128 * step as u128))
    }
}

fn checked_pow(p: u64, k: usize) -> Result<u64> {
    let mut n = 1u64;
    for _ in 0..k {
        n = n
            .checked_mul(p)
            .filter(|&m| m <= FIELD_CAP)
            .ok_or_else(|| Error::CapExceeded(format!("p^k = {p}^{k} exceeds field cap")))?;
    }
    Ok(n)
}

fn normalize_len(v: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = v.iter().map(|c| c % p).collect();
    out.resize(k, 0);
    out
}

/// Conway-style polynomial for `F_(p^k)`: the least monic polynomial (in the
/// integer encoding of its lower coefficients) that is primitive and whose
/// root is norm-compatible with the Conway polynomials of all proper
/// subfields. Memoized globally.
pub fn conway_poly(p: u64, k: usize) -> Vec<u64> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Vec<u64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&(p, k)) {
        return f.clone();
    }
    let result = if k == 1 {
        // x - g for the least primitive root g mod p
        let g = (1..p)
            .find(|&g| {
                factorize(p - 1)
                    .iter()
                    .all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1)
            })
            .unwrap_or(1);
        vec![(p - g) % p, 1]
    } else {
        let size = p.pow(k as u32);
        let subs: Vec<(usize, Vec<u64>)> = (1..k)
            .filter(|a| k % a == 0)
            .map(|a| (a, conway_poly(p, a)))
            .collect();
        let mut found = None;
        'search: for low in 0..size {
            let mut f = Vec::with_capacity(k + 1);
            let mut rest = low;
            for _ in 0..k {
                f.push(rest % p);
                rest /= p;
            }
            f.push(1);
            if !is_primitive_poly(&f, p, k) {
                continue;
            }
            let x = vec![0u64, 1];
            for (a, ca) in &subs {
                let e = ((size - 1) / (p.pow(*a as u32) - 1)) as u128;
                let y = ppowmod(&x, e, &f, p);
                // evaluate C_a at y modulo f
                let mut acc = vec![0u64];
                for c in ca.iter().rev() {
                    acc = pmulmod(&acc, &y, &f, p);
                    if acc.is_empty() {
                        acc = vec![0];
                    }
                    acc[0] = (acc[0] + c) % p;
                }
                if pdeg(&acc).is_some() {
                    continue 'search;
                }
            }
            found = Some(f);
            break;
        }
        found.expect("a compatible primitive polynomial exists")
    };
    cache
        .lock()
        .unwrap()
        .insert((p, k), result.clone());
    result
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Primitivity of a monic degree-k polynomial: the class of x has
/// multiplicative order `p^k - 1` in the quotient ring (which forces the
/// quotient to be a field).
fn is_primitive_poly(f: &[u64], p: u64, k: usize) -> bool {
    if k >= 1 && f[0] == 0 {
        return false; // x divides f
    }
    let n = p.pow(k as u32) - 1;
    let x = vec![0u64, 1];
    let full = ppowmod(&x, n as u128, f, p);
    if pdeg(&full) != Some(0) || full[0] != 1 {
        return false;
    }
    factorize(n)
        .iter()
        .all(|&(q, _)| {
            let part = ppowmod(&x, (n / q) as u128, f, p);
            !(pdeg(&part) == Some(0) && part[0] == 1)
        })
}

// dense polynomial helpers over F_p, constant-first

fn pdeg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn pmulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
    }
    prem(&prod, m, p)
}

fn prem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let md = pdeg(m).unwrap();
    let minv = mod_inv(m[md], p);
    let mut r = a.to_vec();
    while let Some(d) = pdeg(&r) {
        if d < md {
            break;
        }
        let c = r[d] * minv % p;
        for j in 0..=md {
            let s = c * m[j] % p;
            r[d - md + j] = (r[d - md + j] + p - s) % p;
        }
    }
    r.truncate(md.max(1));
    r.resize(md.max(1), 0);
    r
}

fn ppowmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = prem(a, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = pmulmod(&acc, &base, m, p);
        }
        base = pmulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    while pdeg(&r1).is_some() {
        let r2 = prem_keep(&r0, &r1, p);
        r0 = r1;
        r1 = r2;
    }
    r0
}

fn prem_keep(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let md = pdeg(m).unwrap();
    let minv = mod_inv(m[md], p);
    let mut r = a.to_vec();
    while let Some(d) = pdeg(&r) {
        if d < md {
            break;
        }
        let c = r[d] * minv % p;
        for j in 0..=md {
            let s = c * m[j] % p;
            r[d - md + j] = (r[d - md + j] + p - s) % p;
        }
    }
    r
}

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Irreducibility over `F_p` via `x^(p^k) = x mod f` plus gcd checks at the
/// maximal proper subfield degrees.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let Some(k) = pdeg(f) else { return false };
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut diff = ppowmod(&x, (p as u128).pow(k as u32), f, p);
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    if pdeg(&diff).is_some() {
        return false;
    }
    for (q, _) in factorize(k as u64) {
        let e = (p as u128).pow((k as u64 / q) as u32);
        let mut d = ppowmod(&x, e, f, p);
        if d.len() < 2 {
            d.resize(2, 0);
        }
        d[1] = (d[1] + p - 1) % p;
        let g = pgcd(f, &d, p);
        if pdeg(&g) != Some(0) {
            return false;
        }
    }
    true
}

/// A finite field as a [`FieldArith`] context for generic linear algebra.
#[derive(Clone)]
pub struct Gf {
    pub field: Arc<FiniteField>,
}

impl std::fmt::Debug for Gf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.field)
    }
}

impl FieldArith for Gf {
    type Elem = FFElem;
    fn zero(&self) -> FFElem {
        self.field.zero()
    }
    fn one(&self) -> FFElem {
        self.field.one()
    }
    fn add(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.field.add(a, b)
    }
    fn sub(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.field.sub(a, b)
    }
    fn mul(&self, a: &FFElem, b: &FFElem) -> FFElem {
        self.field.mul(a, b)
    }
    fn neg(&self, a: &FFElem) -> FFElem {
        self.field.neg(a)
    }
    fn inv(&self, a: &FFElem) -> FFElem {
        self.field.inv(a)
    }
    fn is_zero(&self, a: &FFElem) -> bool {
        self.field.is_zero(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_arithmetic() {
        let f4 = FiniteField::new(2, 2, Some(vec![1, 1, 1])).unwrap();
        let g = f4.generator();
        // g^2 = g + 1
        let gsq = f4.mul(&g, &g);
        assert_eq!(gsq, f4.add(&g, &f4.one()));
        assert_eq!(f4.mult_order(&g), 3);
        assert_eq!(f4.frobenius(&g, 1).unwrap(), gsq);
        assert_eq!(f4.frobenius(&f4.zero(), 1).unwrap(), f4.zero());
    }

    #[test]
    fn prime_field_and_defaults() {
        let f3 = FiniteField::new(3, 1, None).unwrap();
        assert_eq!(f3.generator(), f3.from_int(2));
        let f9 = FiniteField::new(3, 2, None).unwrap();
        assert_eq!(f9.size() - 1, 8);
        assert!(FiniteField::new(4, 1, None).is_err());
        assert!(FiniteField::new(2, 2, Some(vec![1, 0, 1])).is_err()); // (x+1)^2 over F_2
    }

    #[test]
    fn frobenius_properties() {
        let f8 = FiniteField::new(2, 3, None).unwrap();
        let g = f8.generator();
        let mut x = g.clone();
        for _ in 0..3 {
            x = f8.frobenius(&x, 1).unwrap();
        }
        assert_eq!(x, g);
        assert!(f8.frobenius(&g, 2).is_err());
        assert_eq!(f8.frobenius(&f8.one(), 3).unwrap(), f8.one());
    }

    #[test]
    fn teich_lift_is_isomorphism() {
        let f9 = FiniteField::new(3, 2, None).unwrap();
        let g = f9.generator();
        assert_eq!(f9.teich_lift(&g).unwrap(), RootOfUnity::new(1, 8));
        assert_eq!(f9.teich_lift(&f9.one()).unwrap(), RootOfUnity::new(0, 1));
        // frozen from the exhaustive-powering dlog oracle
        let gsq = f9.mul(&g, &g);
        assert_eq!(f9.teich_lift(&gsq).unwrap(), RootOfUnity::new(1, 4));
        assert!(f9.teich_lift(&f9.zero()).is_err());

        for (p, k) in [(2u64, 1usize), (2, 3), (3, 2), (5, 1), (2, 6), (7, 2)] {
            let f = FiniteField::new(p, k, None).unwrap();
            for a in 1..f.size() {
                let x = f.from_key(a);
                let tx = f.teich_lift(&x).unwrap();
                assert_eq!(tx.order(), f.mult_order(&x));
                for b in 1..f.size() {
                    let y = f.from_key(b);
                    let l = f.teich_lift(&f.mul(&x, &y)).unwrap();
                    assert_eq!(l, tx.add(&f.teich_lift(&y).unwrap()));
                }
                assert_eq!(f.teich_drop(&tx).unwrap(), x);
            }
        }
    }

    #[test]
    fn conway_embeddings_are_field_maps() {
        for (p, a, b) in [(2u64, 1usize, 4usize), (2, 2, 4), (2, 2, 6), (3, 1, 2), (3, 2, 4)] {
            let small = FiniteField::new(p, a, None).unwrap();
            let big = FiniteField::new(p, b, None).unwrap();
            let e = |z: &FFElem| small.embed(z, &big).unwrap();
            for x in 0..small.size() {
                for y in 0..small.size() {
                    let (u, v) = (small.from_key(x), small.from_key(y));
                    assert_eq!(e(&small.add(&u, &v)), big.add(&e(&u), &e(&v)));
                    assert_eq!(e(&small.mul(&u, &v)), big.mul(&e(&u), &e(&v)));
                }
            }
            // generator convention
            let step = (big.size() - 1) / (small.size() - 1);
            assert_eq!(
                e(&small.generator()),
                big.pow(&big.generator(), step as u128)
            );
        }
    }

    #[test]
    fn tower_teichmueller_compatibility() {
        let f4 = FiniteField::new(2, 2, None).unwrap();
        let f16 = FiniteField::new(2, 4, None).unwrap();
        for a in 1..4u64 {
            let x = f4.from_key(a);
            let y = f4.embed(&x, &f16).unwrap();
            assert_eq!(f4.teich_lift(&x).unwrap(), f16.teich_lift(&y).unwrap());
        }
    }

    #[test]
    fn frobenius_generates_cyclic_group() {
        let f16 = FiniteField::new(2, 4, None).unwrap();
        // orbit of the generator under x -> x^2 has size 4
        let g = f16.generator();
        let mut seen = vec![g.clone()];
        let mut x = f16.frobenius(&g, 1).unwrap();
        while x != g {
            seen.push(x.clone());
            x = f16.frobenius(&x, 1).unwrap();
        }
        assert_eq!(seen.len(), 4);
    }
}
