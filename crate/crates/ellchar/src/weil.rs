//! Weil-side parameters: the Galois orbit of a rectified torus character,
//! realized when needed on a finite metacyclic quotient `A x| C_(n s)` where
//! a Frobenius lift `F` acts through its order-`n` quotient and `F^n`
//! carries the uniformizer value.
//!
//! The orbit is the parameter; the finite model exists to witness
//! irreducibility and induction identities concretely (Mackey restriction,
//! ordinary inner products).

use std::sync::Arc;

use crate::chars::{mul_rectifier, r_ell};
use crate::cyclo::{CycloNumber, RootOfUnity};
use crate::fgab::{blackbox_structure, AbChar, FinAb};
use crate::ggroup::{induce, FinGroup, GClass, Subgroup};
use crate::torus::{TorusChar, TorusLevel};
use crate::{lcm_u64, Coeff, Error, Result};

/// A Weil parameter: the Frobenius orbit of `mu * theta`, canonically
/// rotated, with its coefficient tag.
#[derive(Clone, Debug, PartialEq)]
pub struct WeilParam {
    pub n: usize,
    pub coeff: Coeff,
    pub orbit: Vec<TorusChar>,
}

fn char_sort_key(c: &TorusChar) -> (Vec<(u64, u64)>, u64, u64) {
    (
        c.level_part
            .values
            .iter()
            .map(|v| (v.order(), v.numerator()))
            .collect(),
        c.unif_unit.order(),
        c.unif_unit.numerator(),
    )
}

/// The parameter attached to a torus character: the Frobenius orbit of
/// `mu * theta`, rotated to start at its minimal member.
pub fn sigma(torus: &TorusLevel, theta: &TorusChar) -> WeilParam {
    let adjusted = mul_rectifier(theta, torus.n);
    let mut orbit = vec![adjusted.clone()];
    let mut cur = adjusted.precompose_frobenius(torus);
    while cur != adjusted {
        orbit.push(cur.clone());
        cur = cur.precompose_frobenius(torus);
    }
    let min_pos = (0..orbit.len())
        .min_by_key(|&i| char_sort_key(&orbit[i]))
        .unwrap();
    orbit.rotate_left(min_pos);
    WeilParam {
        n: torus.n,
        coeff: theta.coeff,
        orbit,
    }
}

/// Irreducibility by the Mackey criterion: full orbit.
pub fn is_irreducible(p: &WeilParam) -> bool {
    p.orbit.len() == p.n
}

/// Reduction of a parameter mod ell, member by member; the result is again
/// a single Frobenius orbit.
pub fn r_ell_param(torus: &TorusLevel, p: &WeilParam, ell: u64) -> Result<WeilParam> {
    let reduced: Vec<TorusChar> = p
        .orbit
        .iter()
        .map(|t| r_ell(t, ell))
        .collect::<Result<Vec<_>>>()?;
    // the reduced members must form one orbit
    let mut expected = vec![reduced[0].clone()];
    let mut cur = reduced[0].precompose_frobenius(torus);
    while cur != reduced[0] {
        expected.push(cur.clone());
        cur = cur.precompose_frobenius(torus);
    }
    for r in &reduced {
        if !expected.contains(r) {
            return Err(Error::Invalid(
                "reduction of the orbit is not a single orbit".into(),
            ));
        }
    }
    let min_pos = (0..expected.len())
        .min_by_key(|&i| char_sort_key(&expected[i]))
        .unwrap();
    expected.rotate_left(min_pos);
    Ok(WeilParam {
        n: p.n,
        coeff: Coeff::ModEll(ell),
        orbit: expected,
    })
}

/// The finite model `Gamma = A x| C_(n s)`: `A` is the torus level modulo
/// the largest Frobenius-stable subgroup killed by all the given characters,
/// `F` acts as Frobenius, and `F^n` is central of order `s`.
pub struct WeilModel {
    pub n: usize,
    pub s: u64,
    pub a: FinAb,
    pub group: Arc<FinGroup>,
    pub base: Subgroup,
    /// per input character: its descent to `A` and its uniformizer value
    descents: Vec<(AbChar, RootOfUnity)>,
    /// Frobenius on `A` as an element-index permutation
    frob_perm: Vec<u32>,
    /// element id = a_index * (n * s) + j
    cyc: u64,
}

impl WeilModel {
    /// Builds the joint model for one or more integral characters of the
    /// same torus; `s` is the lcm of the orders of their rectified
    /// uniformizer values.
    pub fn build(torus: &TorusLevel, thetas: &[TorusChar]) -> Result<WeilModel> {
        match WeilModel::build_bounded(torus, thetas, crate::ggroup::GROUP_CAP)? {
            Some(m) => Ok(m),
            None => Err(Error::CapExceeded("Weil model exceeds the group cap".into())),
        }
    }

    /// Like [`WeilModel::build`], but gives up quietly (returning `None`)
    /// when the model order would exceed `bound`; the size is known before
    /// the multiplication table is materialized.
    pub fn build_bounded(
        torus: &TorusLevel,
        thetas: &[TorusChar],
        bound: usize,
    ) -> Result<Option<WeilModel>> {
        if thetas.is_empty() {
            return Err(Error::Invalid("need at least one character".into()));
        }
        for t in thetas {
            if !t.is_integral() {
                return Err(Error::NotIntegral(t.unif_val.to_string()));
            }
        }
        let n = torus.n;
        let adjusted: Vec<TorusChar> = thetas.iter().map(|t| mul_rectifier(t, n)).collect();
        let group = torus.unit_group();

        // signature of x: (chi_i(frob^j x))_(i,j); cosets of the joint
        // stable kernel = distinct signatures
        let mut frob_chars: Vec<AbChar> = Vec::new();
        for t in &adjusted {
            let mut chi = t.level_part.clone();
            for _ in 0..n {
                frob_chars.push(chi.clone());
                chi = chi.pullback(&torus.frobenius);
            }
        }
        let mut sig_index: std::collections::HashMap<Vec<RootOfUnity>, u32> =
            std::collections::HashMap::new();
        let mut sigs: Vec<Vec<RootOfUnity>> = Vec::new();
        for x in group.elements() {
            let sig: Vec<RootOfUnity> = frob_chars.iter().map(|c| c.eval(&x)).collect();
            sig_index.entry(sig.clone()).or_insert_with(|| {
                sigs.push(sig.clone());
                (sigs.len() - 1) as u32
            });
        }
        let zero_sig: Vec<RootOfUnity> = vec![RootOfUnity::zero(); frob_chars.len()];
        let identity = sig_index[&zero_sig];
        let sig_mul = |a: u32, b: u32| -> u32 {
            let s: Vec<RootOfUnity> = sigs[a as usize]
                .iter()
                .zip(&sigs[b as usize])
                .map(|(x, y)| x.add(y))
                .collect();
            sig_index[&s]
        };
        let structure = blackbox_structure(sigs.len(), identity, sig_mul)?;
        let a_group = structure.group.clone();
        let a_order = a_group.order() as usize;

        // Frobenius permutes signatures by a cyclic shift within each block
        let mut frob_perm = vec![0u32; a_order];
        for (sid, sig) in sigs.iter().enumerate() {
            let mut shifted = Vec::with_capacity(sig.len());
            for block in sig.chunks(n) {
                let mut b: Vec<RootOfUnity> = block[1..].to_vec();
                b.push(block[0]);
                shifted.extend(b);
            }
            let target = sig_index[&shifted];
            let from = a_group.elem_index(&structure.coords[sid]) as usize;
            let to = a_group.elem_index(&structure.coords[target as usize]) as u32;
            frob_perm[from] = to;
        }

        // descended characters and uniformizer values
        let mut descents = Vec::new();
        let mut s = 1u64;
        for (i, t) in adjusted.iter().enumerate() {
            // chi-bar on A: the value at a signature is its (i*n)-th entry
            let values: Vec<RootOfUnity> = (0..a_group.rank())
                .map(|r| {
                    let mut e = a_group.zero_elem();
                    e[r] = 1;
                    let sid = structure.elem_of[a_group.elem_index(&e) as usize];
                    sigs[sid as usize][i * n]
                })
                .collect();
            let chi_bar = AbChar::new(a_group.clone(), values)?;
            let omega = t.unif_unit;
            s = lcm_u64(s, omega.order());
            descents.push((chi_bar, omega));
        }

        let cyc = n as u64 * s;
        let order = a_order as u64 * cyc;
        if order as usize > bound {
            return Ok(None);
        }

        // frobenius powers as index maps on A
        let mut frob_pows: Vec<Vec<u32>> = vec![(0..a_order as u32).collect()];
        for j in 1..n.max(1) {
            let prev = &frob_pows[j - 1];
            frob_pows.push((0..a_order).map(|x| frob_perm[prev[x] as usize]).collect());
        }

        let nn = order as usize;
        let mut flat = vec![0u32; nn * nn];
        for x in 0..a_order as u32 {
            for j in 0..cyc as u32 {
                let e1 = x * cyc as u32 + j;
                for y in 0..a_order as u32 {
                    // phi^j acts through the order-n quotient
                    let moved = frob_pows[(j as usize) % n][y as usize];
                    let sum = a_group.elem_index(&a_group.add(
                        &a_group.elem_at(x as u64),
                        &a_group.elem_at(moved as u64),
                    )) as u32;
                    for k in 0..cyc as u32 {
                        let e2 = y * cyc as u32 + k;
                        let e3 = sum * cyc as u32 + (j + k) % cyc as u32;
                        flat[e1 as usize * nn + e2 as usize] = e3;
                    }
                }
            }
        }
        let gamma = FinGroup::from_mult_table(
            (0..nn)
                .map(|i| flat[i * nn..(i + 1) * nn].to_vec())
                .collect(),
        )?;

        // base subgroup A x <F^n>
        let mut base_elems = Vec::new();
        for x in 0..a_order as u32 {
            for t in 0..s as u32 {
                base_elems.push(x * cyc as u32 + t * n as u32);
            }
        }
        let base = Subgroup::new(&gamma, base_elems)?;

        Ok(Some(WeilModel {
            n,
            s,
            a: a_group,
            group: gamma,
            base,
            descents,
            frob_perm,
            cyc,
        }))
    }

    fn decode(&self, e: u32) -> (u32, u32) {
        (e / self.cyc as u32, e % self.cyc as u32)
    }

    /// The base character of the i-th input: `chi-bar` on `A` and the
    /// uniformizer value on `F^n`, as a class function on the base subgroup.
    pub fn base_character(&self, i: usize) -> GClass {
        let (chi, omega) = &self.descents[i];
        let values = self
            .base
            .group
            .classes
            .iter()
            .map(|cls| {
                let parent_e = self.base.elements[cls[0] as usize];
                let (x, j) = self.decode(parent_e);
                debug_assert!(j as usize % self.n == 0);
                let t = j as usize / self.n;
                let val = chi
                    .eval(&self.a.elem_at(x as u64))
                    .add(&omega.mul_int(t as i64));
                CycloNumber::from_root(&val)
            })
            .collect();
        GClass {
            group: self.base.group.clone(),
            coeff: Coeff::Char0,
            values,
        }
    }

    /// The induced character `Ind_(A x <F^n>)^Gamma` of the i-th input.
    pub fn induced(&self, i: usize) -> Result<GClass> {
        induce(&self.base, &self.base_character(i))
    }

    /// Mackey restriction of the induced character back to the base: the
    /// multiset of conjugates of the base character by the `F^j`.
    pub fn mackey_restrict(&self, i: usize) -> Vec<GClass> {
        let base_char = self.base_character(i);
        let mut out = Vec::with_capacity(self.n);
        for j in 0..self.n {
            // conjugation by F^j moves the A-component by phi^j
            let mut frob_j: Vec<u32> = (0..self.a.order() as u32).collect();
            for _ in 0..j {
                frob_j = frob_j
                    .iter()
                    .map(|&x| self.frob_perm[x as usize])
                    .collect();
            }
            let values = self
                .base
                .group
                .classes
                .iter()
                .map(|cls| {
                    let parent_e = self.base.elements[cls[0] as usize];
                    let (x, k) = self.decode(parent_e);
                    let moved = frob_j[x as usize];
                    let sub_idx = self
                        .base
                        .to_sub(moved * self.cyc as u32 + k)
                        .expect("conjugate stays in base");
                    base_char.value_at(sub_idx).expect("char0 class").clone()
                })
                .collect();
            out.push(GClass {
                group: self.base.group.clone(),
                coeff: Coeff::Char0,
                values,
            });
        }
        out
    }

    /// Restriction of an ordinary class on `Gamma` to the base subgroup.
    pub fn restrict_to_base(&self, x: &GClass) -> GClass {
        let values = self
            .base
            .group
            .classes
            .iter()
            .map(|cls| {
                let parent_e = self.base.elements[cls[0] as usize];
                x.values[self.group.class_of[parent_e as usize] as usize].clone()
            })
            .collect();
        GClass {
            group: self.base.group.clone(),
            coeff: Coeff::Char0,
            values,
        }
    }
}

/// Builds the single-character model.
pub fn build_model(torus: &TorusLevel, theta: &TorusChar) -> Result<WeilModel> {
    WeilModel::build(torus, std::slice::from_ref(theta))
}

/// Orbit equality of parameters.
pub fn params_equal(p: &WeilParam, q: &WeilParam) -> bool {
    p.n == q.n
        && p.coeff == q.coeff
        && p.orbit.len() == q.orbit.len()
        && p.orbit.iter().all(|x| q.orbit.contains(x))
}

/// Whether two characters lie in one Frobenius orbit (as characters of the
/// full `T`, so including the uniformizer datum).
pub fn same_galois_orbit(torus: &TorusLevel, a: &TorusChar, b: &TorusChar) -> bool {
    let mut cur = a.clone();
    for _ in 0..torus.n {
        if cur == *b {
            return true;
        }
        cur = cur.precompose_frobenius(torus);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::{enumerate_chars, is_general};
    use crate::torus::build_torus;
    use crate::Rat;
    use num::Zero;

    fn theta_nontrivial_neg_unif(torus: &TorusLevel) -> TorusChar {
        // nontrivial on Z/3, theta(pi) = -1
        let chi =
            AbChar::new(torus.unit_group().clone(), vec![RootOfUnity::new(1, 3)]).unwrap();
        TorusChar::new(
            Coeff::Char0,
            torus.h,
            chi,
            Rat::zero(),
            RootOfUnity::new(1, 2),
        )
        .unwrap()
    }

    #[test]
    fn orbit_sizes() {
        let t = build_torus(2, 2, 1).unwrap();
        let theta = theta_nontrivial_neg_unif(&t);
        let p = sigma(&t, &theta);
        assert_eq!(p.orbit.len(), 2);
        assert!(is_irreducible(&p));

        let triv = TorusChar::new(
            Coeff::Char0,
            1,
            AbChar::trivial(t.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap();
        let p = sigma(&t, &triv);
        assert_eq!(p.orbit.len(), 1);
        assert!(!is_irreducible(&p));

        // n = 1: always irreducible
        let t1 = build_torus(2, 1, 1).unwrap();
        let triv1 = TorusChar::new(
            Coeff::Char0,
            1,
            AbChar::trivial(t1.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap();
        assert!(is_irreducible(&sigma(&t1, &triv1)));
    }

    #[test]
    fn s3_model() {
        // (q=2, n=2, h=1), theta nontrivial on Z/3 with theta(pi) = -1:
        // (mu theta)(pi) = 1, so s = 1 and Gamma = Z/3 x| Z/2 = S_3; the
        // induced character is the 2-dimensional irreducible (oracle: the
        // character table of S_3 computed from the multiplication table)
        let t = build_torus(2, 2, 1).unwrap();
        let theta = theta_nontrivial_neg_unif(&t);
        let model = build_model(&t, &theta).unwrap();
        assert_eq!(model.s, 1);
        assert_eq!(model.group.order, 6);
        let mut sizes: Vec<usize> = model.group.classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);

        let ind = model.induced(0).unwrap();
        assert_eq!(ind.dim(), CycloNumber::from_int(2));
        assert_eq!(ind.inner_product(&ind).unwrap(), CycloNumber::one());

        // Mackey: restriction to the base equals the sum of the two
        // distinct conjugates
        let conjs = model.mackey_restrict(0);
        assert_eq!(conjs.len(), 2);
        assert_ne!(conjs[0], conjs[1]);
        let sum = conjs[0].add(&conjs[1]).unwrap();
        assert_eq!(model.restrict_to_base(&ind), sum);
    }

    #[test]
    fn induced_dimension_is_n() {
        let t = build_torus(2, 2, 2).unwrap();
        for theta in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
            let model = build_model(&t, &theta).unwrap();
            let ind = model.induced(0).unwrap();
            assert_eq!(ind.dim(), CycloNumber::from_int(2));
        }
    }

    #[test]
    fn mackey_repetition_for_fixed_characters() {
        let t = build_torus(2, 2, 1).unwrap();
        let triv = TorusChar::new(
            Coeff::Char0,
            1,
            AbChar::trivial(t.unit_group()),
            Rat::zero(),
            RootOfUnity::zero(),
        )
        .unwrap();
        let model = build_model(&t, &triv).unwrap();
        let conjs = model.mackey_restrict(0);
        assert_eq!(conjs.len(), 2);
        assert_eq!(conjs[0], conjs[1]);
    }

    #[test]
    fn injectivity_via_inner_products() {
        // sigma separates Galois orbits; cross-checked with <Ind, Ind'> on
        // the joint finite model
        let t = build_torus(2, 2, 1).unwrap();
        let chars: Vec<TorusChar> = enumerate_chars(&t, Coeff::Char0, RootOfUnity::new(1, 2))
            .unwrap()
            .into_iter()
            .filter(|c| is_general(&t, c))
            .collect();
        assert_eq!(chars.len(), 2);
        for a in &chars {
            for b in &chars {
                let model = WeilModel::build(&t, &[a.clone(), b.clone()]).unwrap();
                let ia = model.induced(0).unwrap();
                let ib = model.induced(1).unwrap();
                let ip = ia.inner_product(&ib).unwrap();
                let same = same_galois_orbit(&t, a, b);
                assert_eq!(
                    params_equal(&sigma(&t, a), &sigma(&t, b)),
                    same,
                    "sigma must separate exactly the orbits"
                );
                assert_eq!(
                    ip,
                    if same {
                        CycloNumber::one()
                    } else {
                        CycloNumber::zero()
                    }
                );
            }
        }
    }

    #[test]
    fn reduction_square_on_strongly_general_grid() {
        // r_ell(sigma(theta)) = sigma(r_ell(theta)) for strongly general
        // characters
        let t = build_torus(2, 2, 2).unwrap();
        for ell in [3u64, 5, 7] {
            for theta in enumerate_chars(&t, Coeff::Char0, RootOfUnity::zero()).unwrap() {
                if !crate::chars::is_strongly_general(&t, &theta) {
                    continue;
                }
                let lhs = r_ell_param(&t, &sigma(&t, &theta), ell).unwrap();
                let rhs = sigma(&t, &r_ell(&theta, ell).unwrap());
                assert!(params_equal(&lhs, &rhs), "ell={ell} theta={theta:?}");
                assert!(is_irreducible(&lhs));
            }
        }
    }
}
