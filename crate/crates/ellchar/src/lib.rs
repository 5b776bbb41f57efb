//! Desk-scale exact computations around smooth characters of the units of an
//! unramified extension of a local function field: torus truncations with
//! Frobenius, reduction modulo `ell` and its fibers, Weil-side induction,
//! Grothendieck-group class calculus, and equivariant permutation complexes
//! with (derived) isotypic parts.
//!
//! Everything is exact: roots of unity live in Q/Z, character values in
//! cyclotomic fields, and all linear algebra is over Q, cyclotomic fields,
//! finite fields, or the integers.

pub mod chaincx;
pub mod chars;
pub mod config;
pub mod cyclo;
pub mod dlclass;
pub mod fgab;
pub mod fields;
pub mod ggroup;
pub mod linalg;
pub mod suites;
pub mod torus;
pub mod weil;

use serde::{Deserialize, Serialize};

pub type Rat = num::BigRational;
pub type Int = num::BigInt;

/// Coefficient tag for characters and Grothendieck classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coeff {
    /// Characteristic-zero coefficients (values in cyclotomic fields).
    Char0,
    /// Coefficients of characteristic `ell`, with values recorded as
    /// prime-to-`ell` roots of unity via the Teichmueller identification.
    ModEll(u64),
}

impl Coeff {
    pub fn ell(&self) -> Option<u64> {
        match self {
            Coeff::Char0 => None,
            Coeff::ModEll(l) => Some(*l),
        }
    }
}

impl std::fmt::Display for Coeff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coeff::Char0 => write!(f, "char0"),
            Coeff::ModEll(l) => write!(f, "mod-{l}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("character is not integral: uniformizer valuation {0}")]
    NotIntegral(String),
    #[error("value of order {order} not realizable over {spec}")]
    Unrealizable { order: u64, spec: String },
    #[error("matrices do not satisfy the group relations: {0}")]
    RelationCheck(String),
    #[error("truncation too small: reached degree {reached}, need {needed}")]
    TruncationTooSmall { reached: i64, needed: i64 },
    #[error("coefficient tag mismatch: {0} vs {1}")]
    TagMismatch(Coeff, Coeff),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}

/// `v_p(n)`: the exponent of the prime `p` in `n`.
pub fn val_p(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n > 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `n = p^e` with `p` prime, if possible.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            return if m == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn totient_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(24), 8);
    }
}
