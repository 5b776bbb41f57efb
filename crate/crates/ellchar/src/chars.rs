//! Smooth characters of `T = L^x`: level, Galois orbits and (strongly)
//! general position, integrality, reduction mod ell, Teichmueller lifting
//! with its `ell^m` fibers, and the rectifier.

use num::Zero;

use crate::cyclo::RootOfUnity;
use crate::fgab::{dual_enumerate, AbChar};
use crate::torus::{TorusChar, TorusLevel};
use crate::{val_p, Coeff, Error, Rat, Result};

/// `m = v_ell(q^n - 1)`: the ell-adic valuation controlling fiber sizes.
pub fn m_value(q: u64, n: usize, ell: u64) -> u32 {
    val_p(q.pow(n as u32) - 1, ell)
}

/// The level of a character: the smallest `a >= 1` such that the level part
/// is trivial on the congruence subgroup `T^a_h`.
pub fn level(torus: &TorusLevel, theta: &TorusChar) -> usize {
    assert_eq!(theta.level_h, torus.h);
    for a in 1..=torus.h {
        let sub = torus.filtration_subgroup(a).expect("a in range");
        if theta.level_part.pullback(&sub.inclusion).is_trivial() {
            return a;
        }
    }
    torus.h
}

/// Trivial Galois stabilizer of the restriction to the integral units;
/// indifferent to the uniformizer value.
pub fn is_general(torus: &TorusLevel, theta: &TorusChar) -> bool {
    let chi = &theta.level_part;
    let mut cur = chi.pullback(&torus.frobenius);
    for _ in 1..torus.n {
        if cur == *chi {
            return false;
        }
        cur = cur.pullback(&torus.frobenius);
    }
    true
}

/// Trivial Galois stabilizer of the restriction to the one-units `T^1`.
pub fn is_strongly_general(torus: &TorusLevel, theta: &TorusChar) -> bool {
    let sub = torus.filtration_subgroup(1).expect("T^1 exists");
    let chi = theta.level_part.pullback(&sub.inclusion);
    let mut cur = chi.pullback(&sub.frobenius);
    for _ in 1..torus.n {
        if cur == chi {
            return false;
        }
        cur = cur.pullback(&sub.frobenius);
    }
    true
}

/// Reduction modulo ell: projects every value onto its prime-to-ell part.
/// Defined only for integral characters (uniformizer valuation zero).
pub fn r_ell(theta: &TorusChar, ell: u64) -> Result<TorusChar> {
    if !theta.is_integral() {
        return Err(Error::NotIntegral(theta.unif_val.to_string()));
    }
    if theta.coeff != Coeff::Char0 {
        return Err(Error::Invalid(
            "reduction takes a characteristic-zero character".into(),
        ));
    }
    let level_part = theta.level_part.r_ell(ell)?;
    TorusChar::new(
        Coeff::ModEll(ell),
        theta.level_h,
        level_part,
        Rat::zero(),
        theta.unif_unit.r_ell_project(ell)?,
    )
}

/// All characteristic-zero lifts of a mod-ell character whose uniformizer
/// value is the Teichmueller lift: exactly `ell^m` of them, with pairwise
/// distinct restrictions to the integral units, in the mixed-radix order of
/// the ell-power twist.
pub fn lifts_enum(torus: &TorusLevel, psi: &TorusChar) -> Result<Vec<TorusChar>> {
    let Coeff::ModEll(ell) = psi.coeff else {
        return Err(Error::Invalid("lifting takes a mod-ell character".into()));
    };
    assert_eq!(psi.level_h, torus.h);
    let group = torus.unit_group();
    let ell_parts: Vec<u64> = group
        .invariant_factors
        .iter()
        .map(|&d| ell.pow(val_p(d, ell)))
        .collect();
    let total: u64 = ell_parts.iter().product();
    let mut out = Vec::with_capacity(total as usize);
    for idx in 0..total {
        let mut rest = idx;
        let mut twist = Vec::with_capacity(group.rank());
        for &lp in ell_parts.iter().rev() {
            twist.push(RootOfUnity::new((rest % lp) as i64, lp));
            rest /= lp;
        }
        twist.reverse();
        let values: Vec<RootOfUnity> = psi
            .level_part
            .values
            .iter()
            .zip(&twist)
            .map(|(v, t)| v.add(t))
            .collect();
        let level_part = AbChar::new(group.clone(), values)?;
        out.push(TorusChar::new(
            Coeff::Char0,
            torus.h,
            level_part,
            Rat::zero(),
            psi.unif_unit,
        )?);
    }
    Ok(out)
}

/// The rectifier: trivial on the integral units, sending the uniformizer to
/// `(-1)^(n-1)`. Over a field of characteristic 2 the sign collapses.
pub fn rectifier(n: usize, coeff: Coeff) -> TorusChar {
    let mut unit = RootOfUnity::new((n as i64 - 1) % 2, 2);
    if let Coeff::ModEll(ell) = coeff {
        unit = unit.r_ell_project(ell).expect("ell is prime");
    }
    TorusChar {
        coeff,
        level_h: 1,
        level_part: AbChar::trivial(&crate::fgab::FinAb::trivial()),
        unif_val: Rat::zero(),
        unif_unit: unit,
    }
}

/// The twist `mu * theta` by the rectifier: only the uniformizer value moves.
pub fn mul_rectifier(theta: &TorusChar, n: usize) -> TorusChar {
    let mu = rectifier(n, theta.coeff);
    TorusChar {
        coeff: theta.coeff,
        level_h: theta.level_h,
        level_part: theta.level_part.clone(),
        unif_val: theta.unif_val.clone(),
        unif_unit: theta.unif_unit.add(&mu.unif_unit),
    }
}

/// Enumerates the smooth characters of `T` factoring through `T_h` with the
/// given uniformizer value. For mod-ell coefficients only the prime-to-ell
/// part of the dual survives.
pub fn enumerate_chars(
    torus: &TorusLevel,
    coeff: Coeff,
    unif_unit: RootOfUnity,
) -> Result<Vec<TorusChar>> {
    let all = dual_enumerate(torus.unit_group())?;
    let mut out = Vec::new();
    for chi in all {
        if let Coeff::ModEll(ell) = coeff {
            if chi.order() % ell == 0 {
                continue;
            }
        }
        out.push(TorusChar::new(
            coeff,
            torus.h,
            chi,
            Rat::zero(),
            unif_unit,
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::build_torus;

    fn triv_char(t: &TorusLevel) -> TorusChar {
        TorusChar::new(
            Coeff::Char0,
            t.h,
            AbChar::trivial(t.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap()
    }

    #[test]
    fn levels_on_t2() {
        let t = build_torus(2, 2, 2).unwrap();
        assert_eq!(level(&t, &triv_char(&t)), 1);
        // exhaustive triviality test on the order-4 kernel: the characters of
        // level 1 are exactly those factoring through T_1 = Z/3, so 12/4 = 3
        // of them and the remaining 9 have level 2
        let chars = enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap();
        assert_eq!(chars.len(), 12);
        let level_counts =
            chars
                .iter()
                .map(|c| level(&t, c))
                .fold(std::collections::BTreeMap::new(), |mut m, l| {
                    *m.entry(l).or_insert(0) += 1;
                    m
                });
        assert_eq!(level_counts[&1], 3);
        assert_eq!(level_counts[&2], 9);
    }

    #[test]
    fn general_position_counts() {
        let t = build_torus(2, 2, 2).unwrap();
        let chars = enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap();
        // frozen from the exhaustive orbit computation: exactly 6 of the 12
        // characters of T_2 are strongly general
        let sg = chars
            .iter()
            .filter(|c| is_strongly_general(&t, c))
            .count();
        assert_eq!(sg, 6);
        assert!(!is_general(&t, &triv_char(&t)));
        // level-1 characters restrict trivially to T^1
        for c in &chars {
            if level(&t, c) == 1 {
                assert!(!is_strongly_general(&t, c));
            }
        }
    }

    #[test]
    fn general_position_ignores_uniformizer() {
        let t = build_torus(2, 2, 2).unwrap();
        for chi in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
            let twisted = TorusChar::new(
                Coeff::Char0,
                chi.level_h,
                chi.level_part.clone(),
                Rat::zero(),
                RootOfUnity::new(1, 4),
            )
            .unwrap();
            assert_eq!(is_general(&t, &chi), is_general(&t, &twisted));
        }
    }

    #[test]
    fn reduction_examples() {
        let t = build_torus(2, 2, 1).unwrap();
        // both nontrivial characters of T_1 = Z/3 reduce to the trivial
        // mod-3 character
        for chi in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
            let red = r_ell(&chi, 3).unwrap();
            assert!(red.level_part.is_trivial());
        }
        // an ell'-valued character is fixed
        let chars = enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap();
        for chi in &chars {
            let red = r_ell(chi, 5).unwrap();
            assert_eq!(red.level_part.values, chi.level_part.values);
        }
        // non-integral characters are rejected
        let bad = TorusChar::new(
            Coeff::Char0,
            1,
            AbChar::trivial(t.unit_group()),
            Rat::from_integer(1.into()),
            RootOfUnity::zero(),
        )
        .unwrap();
        assert!(matches!(r_ell(&bad, 3), Err(Error::NotIntegral(_))));
    }

    #[test]
    fn lift_fibers() {
        let t = build_torus(2, 2, 1).unwrap();
        // m = v_3(2^2 - 1) = 1: three lifts
        assert_eq!(m_value(2, 2, 3), 1);
        let psi = TorusChar::new(
            Coeff::ModEll(3),
            1,
            AbChar::trivial(t.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap();
        let lifts = lifts_enum(&t, &psi).unwrap();
        assert_eq!(lifts.len(), 3);
        for l in &lifts {
            assert_eq!(r_ell(l, 3).unwrap(), psi);
        }
        // pairwise distinct restrictions to the integral units
        for (i, a) in lifts.iter().enumerate() {
            for b in &lifts[i + 1..] {
                assert_ne!(a.level_part, b.level_part);
            }
        }
        // m = 0: a single lift
        assert_eq!(m_value(2, 2, 5), 0);
        let psi5 = TorusChar::new(
            Coeff::ModEll(5),
            1,
            AbChar::trivial(t.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap();
        assert_eq!(lifts_enum(&t, &psi5).unwrap().len(), 1);
    }

    #[test]
    fn lifting_is_frobenius_equivariant() {
        let t = build_torus(2, 2, 2).unwrap();
        for psi in enumerate_chars(&t, Coeff::ModEll(3), RootOfUnity::zero()).unwrap() {
            let lhs: Vec<_> = lifts_enum(&t, &psi.precompose_frobenius(&t))
                .unwrap()
                .into_iter()
                .collect();
            let mut rhs: Vec<_> = lifts_enum(&t, &psi)
                .unwrap()
                .iter()
                .map(|l| l.precompose_frobenius(&t))
                .collect();
            for x in &lhs {
                let pos = rhs.iter().position(|y| y == x);
                assert!(pos.is_some(), "lift sets differ");
                rhs.remove(pos.unwrap());
            }
            assert!(rhs.is_empty());
        }
    }

    #[test]
    fn rectifier_values() {
        assert_eq!(
            rectifier(2, Coeff::Char0).unif_unit,
            RootOfUnity::new(1, 2)
        );
        assert!(rectifier(1, Coeff::Char0).unif_unit.is_zero());
        assert!(rectifier(3, Coeff::Char0).unif_unit.is_zero());
        // mod 2 the sign collapses
        assert!(rectifier(2, Coeff::ModEll(2)).unif_unit.is_zero());
        assert_eq!(
            rectifier(2, Coeff::ModEll(3)).unif_unit,
            RootOfUnity::new(1, 2)
        );
    }

    #[test]
    fn strongly_general_preserved_by_reduction() {
        // Lemma-level property on a small grid
        for (q, n, h, ell) in [(2u64, 2usize, 2usize, 3u64), (2, 2, 2, 5), (3, 2, 1, 2)] {
            let t = build_torus(q, n, h).unwrap();
            for chi in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
                let red = r_ell(&chi, ell).unwrap();
                assert_eq!(
                    is_strongly_general(&t, &chi),
                    is_strongly_general(&t, &red),
                    "q={q} n={n} h={h} ell={ell} chi={chi:?}"
                );
            }
        }
    }

    #[test]
    fn level_of_reduction() {
        // level(r_ell(theta)) = level(theta) whenever theta is nontrivial on
        // T^1 (the kernel-side reduction is an isomorphism)
        let t = build_torus(2, 2, 2).unwrap();
        for chi in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
            let red = r_ell(&chi, 3).unwrap();
            assert!(level(&t, &red) <= level(&t, &chi));
            if level(&t, &chi) > 1 {
                assert_eq!(level(&t, &red), level(&t, &chi));
            }
        }
    }
}
