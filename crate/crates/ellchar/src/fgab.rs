//! Finite abelian groups via invariant factors, homomorphisms, characters,
//! and the Smith-normal-form presentation kernel.
//!
//! Everything group-structural routes through one verified SNF core:
//! cokernels of relation matrices, quotients, and the structure of black-box
//! abelian groups (the relation lattice is accumulated from collisions in a
//! BFS over the Cayley graph, and completeness is certified by comparing the
//! lattice index with the group order).

use num::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::RootOfUnity;
use crate::linalg::{smith_normal_form, LatticeBasis};
use crate::{val_p, Error, Int, Result};

pub const ENUM_CAP: u64 = 1_000_000;

/// A finite abelian group `Z/d_1 x ... x Z/d_r` with `d_1 | d_2 | ... | d_r`,
/// all `d_i >= 2`. The empty list is the trivial group. Elements are
/// coordinate vectors mod the invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAb {
    pub invariant_factors: Vec<u64>,
}

impl std::fmt::Debug for FinAb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z/{:?}", self.invariant_factors)
    }
}

impl FinAb {
    pub fn new(factors: Vec<u64>) -> Result<FinAb> {
        for w in factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::Invalid(format!(
                    "invariant factors must form a divisibility chain: {factors:?}"
                )));
            }
        }
        if factors.iter().any(|&d| d < 2) {
            return Err(Error::Invalid("invariant factors must be >= 2".into()));
        }
        Ok(FinAb {
            invariant_factors: factors,
        })
    }

    pub fn trivial() -> FinAb {
        FinAb {
            invariant_factors: vec![],
        }
    }

    pub fn cyclic(n: u64) -> FinAb {
        if n <= 1 {
            FinAb::trivial()
        } else {
            FinAb {
                invariant_factors: vec![n],
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn zero_elem(&self) -> Vec<i64> {
        vec![0; self.rank()]
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<i64> {
        x.iter()
            .zip(&self.invariant_factors)
            .map(|(&c, &d)| c.rem_euclid(d as i64))
            .collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        self.reduce(
            &a.iter()
                .zip(b.iter())
                .map(|(&x, &y)| x + y)
                .collect::<Vec<_>>(),
        )
    }

    pub fn neg(&self, a: &[i64]) -> Vec<i64> {
        self.reduce(&a.iter().map(|&x| -x).collect::<Vec<_>>())
    }

    /// Index of an element in the mixed-radix enumeration (first coordinate
    /// most significant).
    pub fn elem_index(&self, x: &[i64]) -> u64 {
        let x = self.reduce(x);
        let mut idx = 0u64;
        for (c, d) in x.iter().zip(&self.invariant_factors) {
            idx = idx * d + *c as u64;
        }
        idx
    }

    pub fn elem_at(&self, mut idx: u64) -> Vec<i64> {
        let mut out = vec![0i64; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.invariant_factors[i];
            out[i] = (idx % d) as i64;
            idx /= d;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.order()).map(|i| self.elem_at(i))
    }

    pub fn elem_order(&self, x: &[i64]) -> u64 {
        let x = self.reduce(x);
        let mut ord = 1u64;
        for (&c, &d) in x.iter().zip(&self.invariant_factors) {
            if c != 0 {
                let g = crate::gcd_u64(c as u64, d);
                ord = crate::lcm_u64(ord, d / g);
            }
        }
        ord
    }

    /// Number of elements of ell-power order, i.e. `ell^(v_ell(|A|))`.
    pub fn ell_power_count(&self, ell: u64) -> u64 {
        self.invariant_factors
            .iter()
            .map(|&d| ell.pow(val_p(d, ell)))
            .product()
    }
}

/// A homomorphism between finite abelian groups, as the matrix of images of
/// the canonical generators (columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbHom {
    pub domain: FinAb,
    pub codomain: FinAb,
    /// `cols[j]` = image of the j-th canonical generator
    pub cols: Vec<Vec<i64>>,
}

impl AbHom {
    pub fn new(domain: FinAb, codomain: FinAb, cols: Vec<Vec<i64>>) -> Result<AbHom> {
        if cols.len() != domain.rank() {
            return Err(Error::Invalid("one column per domain generator".into()));
        }
        let cols: Vec<Vec<i64>> = cols.iter().map(|c| codomain.reduce(c)).collect();
        // relations must be respected: d_j * col_j = 0 in the codomain
        for (j, col) in cols.iter().enumerate() {
            let d = domain.invariant_factors[j];
            for (&c, &e) in col.iter().zip(&codomain.invariant_factors) {
                if (c as i128 * d as i128) % e as i128 != 0 {
                    return Err(Error::Invalid(format!(
                        "column {j} does not respect the order-{d} relation"
                    )));
                }
            }
        }
        Ok(AbHom {
            domain,
            codomain,
            cols,
        })
    }

    pub fn identity(a: &FinAb) -> AbHom {
        let cols = (0..a.rank())
            .map(|j| {
                let mut c = a.zero_elem();
                c[j] = 1;
                c
            })
            .collect();
        AbHom {
            domain: a.clone(),
            codomain: a.clone(),
            cols,
        }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let x = self.domain.reduce(x);
        let mut out = vec![0i128; self.codomain.rank()];
        for (j, &c) in x.iter().enumerate() {
            for (i, &m) in self.cols[j].iter().enumerate() {
                out[i] += c as i128 * m as i128;
            }
        }
        out.iter()
            .zip(&self.codomain.invariant_factors)
            .map(|(&v, &d)| v.rem_euclid(d as i128) as i64)
            .collect()
    }

    /// `other` after `self` (domain of `other` = codomain of `self`).
    pub fn then(&self, other: &AbHom) -> AbHom {
        assert_eq!(self.codomain, other.domain);
        AbHom {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            cols: self.cols.iter().map(|c| other.apply(c)).collect(),
        }
    }

    pub fn pow(&self, e: usize) -> AbHom {
        assert_eq!(self.domain, self.codomain);
        let mut acc = AbHom::identity(&self.domain);
        for _ in 0..e {
            acc = acc.then(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain && *self == AbHom::identity(&self.domain)
    }

    /// An endomorphism of a finite group is an automorphism iff it is
    /// surjective, i.e. its columns together with the relations present the
    /// trivial cokernel.
    pub fn is_automorphism(&self) -> bool {
        if self.domain != self.codomain {
            return false;
        }
        let r = self.codomain.rank();
        if r == 0 {
            return true;
        }
        let mut m: Vec<Vec<Int>> = Vec::new();
        for i in 0..r {
            let mut row: Vec<Int> = self.cols.iter().map(|c| Int::from(c[i])).collect();
            for j in 0..r {
                row.push(if i == j {
                    Int::from(self.codomain.invariant_factors[i])
                } else {
                    Int::zero()
                });
            }
            m.push(row);
        }
        let snf = smith_normal_form(&m);
        (0..r).all(|i| snf.d[i][i] == Int::from(1))
    }
}

/// A character of a finite abelian group: a root of unity per canonical
/// generator, the order of `values[i]` dividing `d_i`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbChar {
    pub domain: FinAb,
    pub values: Vec<RootOfUnity>,
}

impl std::fmt::Debug for AbChar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AbChar{:?}", self.values)
    }
}

impl AbChar {
    pub fn new(domain: FinAb, values: Vec<RootOfUnity>) -> Result<AbChar> {
        if values.len() != domain.rank() {
            return Err(Error::Invalid("one value per generator".into()));
        }
        for (v, &d) in values.iter().zip(&domain.invariant_factors) {
            if d % v.order() != 0 {
                return Err(Error::Invalid(format!(
                    "value order {} does not divide invariant factor {d}",
                    v.order()
                )));
            }
        }
        Ok(AbChar { domain, values })
    }

    pub fn trivial(domain: &FinAb) -> AbChar {
        AbChar {
            domain: domain.clone(),
            values: vec![RootOfUnity::zero(); domain.rank()],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn eval(&self, x: &[i64]) -> RootOfUnity {
        let x = self.domain.reduce(x);
        let mut acc = RootOfUnity::zero();
        for (&c, v) in x.iter().zip(&self.values) {
            acc = acc.add(&v.mul_int(c));
        }
        acc
    }

    /// Pointwise product of characters (sum in Q/Z).
    pub fn mul(&self, other: &AbChar) -> AbChar {
        assert_eq!(self.domain, other.domain);
        AbChar {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn inverse(&self) -> AbChar {
        AbChar {
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| v.neg()).collect(),
        }
    }

    /// Precomposition with a homomorphism into this character's domain.
    pub fn pullback(&self, f: &AbHom) -> AbChar {
        assert_eq!(f.codomain, self.domain);
        AbChar {
            domain: f.domain.clone(),
            values: f.cols.iter().map(|c| self.eval(c)).collect(),
        }
    }

    /// The order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.values
            .iter()
            .fold(1, |acc, v| crate::lcm_u64(acc, v.order()))
    }

    /// Projection of every value onto its prime-to-ell part.
    pub fn r_ell(&self, ell: u64) -> Result<AbChar> {
        let values = self
            .values
            .iter()
            .map(|v| v.r_ell_project(ell))
            .collect::<Result<Vec<_>>>()?;
        Ok(AbChar {
            domain: self.domain.clone(),
            values,
        })
    }
}

/// Witness of a Smith normal form presentation: maps ambient `Z^g`
/// coordinates onto the cokernel's canonical coordinates.
#[derive(Clone, Debug)]
pub struct SnfWitness {
    pub group: FinAb,
    /// rows of U for the kept (nontrivial) diagonal entries, reduced mod the
    /// matching invariant factor
    rows: Vec<Vec<i64>>,
}

impl SnfWitness {
    pub fn apply(&self, y: &[i128]) -> Vec<i64> {
        self.rows
            .iter()
            .zip(&self.group.invariant_factors)
            .map(|(row, &d)| {
                let mut acc = 0i128;
                for (&r, &c) in row.iter().zip(y) {
                    acc = (acc + (r as i128 * c).rem_euclid(d as i128)) % d as i128;
                }
                acc.rem_euclid(d as i128) as i64
            })
            .collect()
    }
}

/// Cokernel of an integer relation matrix (columns are relations among `g`
/// generators), computed by Smith normal form. Errors when the cokernel is
/// infinite.
pub fn from_relations(matrix: &[Vec<i64>]) -> Result<(FinAb, SnfWitness)> {
    let g = matrix.len();
    if g == 0 {
        let group = FinAb::trivial();
        return Ok((
            group.clone(),
            SnfWitness {
                group,
                rows: vec![],
            },
        ));
    }
    let cols = matrix[0].len();
    let m: Vec<Vec<Int>> = (0..g)
        .map(|i| (0..cols).map(|j| Int::from(matrix[i][j])).collect())
        .collect();
    let snf = smith_normal_form(&m);
    let mut factors = Vec::new();
    let mut rows = Vec::new();
    for i in 0..g {
        let d = if i < cols {
            snf.d[i][i].clone()
        } else {
            Int::zero()
        };
        if d.is_zero() {
            return Err(Error::Invalid(
                "relation matrix has infinite cokernel".into(),
            ));
        }
        let d = d
            .abs()
            .to_u64()
            .ok_or_else(|| Error::CapExceeded("invariant factor exceeds u64".into()))?;
        if d == 1 {
            continue;
        }
        factors.push(d);
        let row: Vec<i64> = snf.u[i]
            .iter()
            .map(|x| {
                let m = x % Int::from(d);
                m.to_i64().unwrap().rem_euclid(d as i64)
            })
            .collect();
        rows.push(row);
    }
    let group = FinAb::new(factors)?;
    Ok((group.clone(), SnfWitness { group, rows }))
}

/// All characters of `A`, in the mixed-radix order of their value numerators
/// (first generator most significant).
pub fn dual_enumerate(a: &FinAb) -> Result<Vec<AbChar>> {
    if a.order() > ENUM_CAP {
        return Err(Error::CapExceeded(format!(
            "dual of group of order {} exceeds cap",
            a.order()
        )));
    }
    let mut out = Vec::with_capacity(a.order() as usize);
    for idx in 0..a.order() {
        let coords = a.elem_at(idx);
        let values = coords
            .iter()
            .zip(&a.invariant_factors)
            .map(|(&c, &d)| RootOfUnity::new(c, d))
            .collect();
        out.push(AbChar {
            domain: a.clone(),
            values,
        });
    }
    Ok(out)
}

/// Orbit of `chi` under precomposition with the automorphism `phi` of order
/// dividing `n`, listed without repetition starting at `chi`.
pub fn char_orbit(chi: &AbChar, phi: &AbHom, n: usize) -> Result<Vec<AbChar>> {
    if !phi.is_automorphism() {
        return Err(Error::Invalid("phi is not an automorphism".into()));
    }
    if !phi.pow(n).is_identity() {
        return Err(Error::Invalid(format!("phi^{n} is not the identity")));
    }
    let mut orbit = vec![chi.clone()];
    let mut cur = chi.pullback(phi);
    while cur != *chi {
        orbit.push(cur.clone());
        cur = cur.pullback(phi);
    }
    debug_assert!(n % orbit.len() == 0);
    Ok(orbit)
}

/// Structure data of a black-box finite abelian group.
pub struct BlackboxStructure {
    pub group: FinAb,
    /// canonical coordinates per element index
    pub coords: Vec<Vec<i64>>,
    /// element index per canonical coordinate (indexed by mixed-radix index)
    pub elem_of: Vec<u32>,
    /// the chosen generators (element indices)
    pub generators: Vec<u32>,
}

/// Structure of a black-box finite abelian group given by a multiplication
/// closure on element indices `0..n`.
pub fn blackbox_structure<M>(n: usize, identity: u32, mul: M) -> Result<BlackboxStructure>
where
    M: Fn(u32, u32) -> u32,
{
    if n as u64 > ENUM_CAP {
        return Err(Error::CapExceeded(format!(
            "group of order {n} exceeds enumeration cap"
        )));
    }
    if n == 1 {
        return Ok(BlackboxStructure {
            group: FinAb::trivial(),
            coords: vec![vec![]],
            elem_of: vec![identity],
            generators: vec![],
        });
    }

    // greedy generating set: scan elements, keep those outside the current span
    let mut gens: Vec<u32> = Vec::new();
    let mut span = vec![false; n];
    span[identity as usize] = true;
    let mut span_list = vec![identity];
    for cand in 0..n as u32 {
        if span[cand as usize] {
            continue;
        }
        gens.push(cand);
        let mut frontier = span_list.clone();
        while let Some(x) = frontier.pop() {
            let y = mul(x, cand);
            if !span[y as usize] {
                span[y as usize] = true;
                span_list.push(y);
                frontier.push(y);
            }
        }
        if span_list.len() == n {
            break;
        }
    }
    assert_eq!(span_list.len(), n, "generators do not span");

    let g = gens.len();
    // BFS over the Cayley graph, assigning ambient Z^g coordinates and
    // accumulating collision relations
    let mut raw: Vec<Option<Vec<i32>>> = vec![None; n];
    raw[identity as usize] = Some(vec![0; g]);
    let mut queue = std::collections::VecDeque::from([identity]);
    let mut lattice = LatticeBasis::new(g);
    let order = n as i128;
    let mut complete = false;
    while let Some(x) = queue.pop_front() {
        let base = raw[x as usize].clone().unwrap();
        for (j, &gen) in gens.iter().enumerate() {
            let y = mul(x, gen);
            let mut next = base.clone();
            next[j] += 1;
            match &raw[y as usize] {
                None => {
                    raw[y as usize] = Some(next);
                    queue.push_back(y);
                }
                Some(existing) => {
                    if !complete {
                        let rel: Vec<i128> = next
                            .iter()
                            .zip(existing.iter())
                            .map(|(&a, &b)| (a - b) as i128)
                            .collect();
                        lattice.add(rel);
                        if lattice.index_det() == Some(order) {
                            complete = true;
                        }
                    }
                }
            }
        }
    }
    // the collected relations generate the full lattice exactly when the
    // index matches the group order
    assert_eq!(
        lattice.index_det(),
        Some(order),
        "relation lattice does not present the group"
    );

    let rows = lattice.rows();
    let rel_matrix: Vec<Vec<i64>> = (0..g)
        .map(|i| rows.iter().map(|r| r[i] as i64).collect())
        .collect();
    let (group, witness) = from_relations(&rel_matrix)?;
    assert_eq!(group.order(), n as u64);

    let mut coords = vec![Vec::new(); n];
    let mut elem_of = vec![u32::MAX; n];
    for (e, r) in raw.iter().enumerate() {
        let y: Vec<i128> = r
            .as_ref()
            .expect("BFS reaches every element")
            .iter()
            .map(|&v| v as i128)
            .collect();
        let c = witness.apply(&y);
        elem_of[group.elem_index(&c) as usize] = e as u32;
        coords[e] = c;
    }
    assert!(elem_of.iter().all(|&e| e != u32::MAX));

    Ok(BlackboxStructure {
        group,
        coords,
        elem_of,
        generators: gens,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ru(a: i64, n: u64) -> RootOfUnity {
        RootOfUnity::new(a, n)
    }

    #[test]
    fn cokernels() {
        // diag(6) -> Z/6
        let (a, _) = from_relations(&[vec![6]]).unwrap();
        assert_eq!(a.invariant_factors, vec![6]);
        // [[2,1],[1,2]] -> Z/3, frozen from the row/column reduction oracle
        let (a, w) = from_relations(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(a.invariant_factors, vec![3]);
        // witness maps the relation columns to zero
        assert_eq!(w.apply(&[2, 1]), vec![0]);
        assert_eq!(w.apply(&[1, 2]), vec![0]);
        // identity matrix -> trivial group
        let (a, _) = from_relations(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(a, FinAb::trivial());
        // infinite cokernel rejected
        assert!(from_relations(&[vec![0], vec![2]]).is_err());
    }

    #[test]
    fn from_relations_is_isomorphism_invariant() {
        let base = vec![vec![4, 0, 0], vec![0, 6, 2], vec![2, 0, 8]];
        let (a, _) = from_relations(&base).unwrap();
        let perm_rows = vec![base[2].clone(), base[0].clone(), base[1].clone()];
        let (b, _) = from_relations(&perm_rows).unwrap();
        assert_eq!(a.invariant_factors, b.invariant_factors);
        let perm_cols: Vec<Vec<i64>> = base.iter().map(|r| vec![r[1], r[2], r[0]]).collect();
        let (c, _) = from_relations(&perm_cols).unwrap();
        assert_eq!(a.invariant_factors, c.invariant_factors);
    }

    #[test]
    fn dual_sizes_and_order() {
        let z6 = FinAb::cyclic(6);
        let chars = dual_enumerate(&z6).unwrap();
        assert_eq!(chars.len(), 6);
        let t = dual_enumerate(&FinAb::trivial()).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t[0].is_trivial());
        let v4 = FinAb::new(vec![2, 2]).unwrap();
        let chars = dual_enumerate(&v4).unwrap();
        assert_eq!(chars.len(), 4);
        assert!(chars.iter().all(|c| c.order() <= 2));
    }

    #[test]
    fn char_bilinearity_exhaustive() {
        for factors in [vec![4u64], vec![2, 4], vec![3, 3], vec![2, 2, 4]] {
            let a = FinAb::new(factors).unwrap();
            for chi in dual_enumerate(&a).unwrap() {
                for x in a.elements() {
                    for y in a.elements() {
                        let s = a.add(&x, &y);
                        assert_eq!(chi.eval(&s), chi.eval(&x).add(&chi.eval(&y)));
                    }
                }
            }
        }
    }

    #[test]
    fn orbits() {
        let z3 = FinAb::cyclic(3);
        let inv = AbHom::new(z3.clone(), z3.clone(), vec![vec![-1]]).unwrap();
        let chi = AbChar::new(z3.clone(), vec![ru(1, 3)]).unwrap();
        let orbit = char_orbit(&chi, &inv, 2).unwrap();
        assert_eq!(orbit.len(), 2);
        let triv = AbChar::trivial(&z3);
        assert_eq!(char_orbit(&triv, &inv, 2).unwrap().len(), 1);
        let id = AbHom::identity(&z3);
        assert_eq!(char_orbit(&chi, &id, 1).unwrap().len(), 1);
        let bad = AbHom::new(z3.clone(), z3.clone(), vec![vec![0]]).unwrap();
        assert!(char_orbit(&chi, &bad, 2).is_err());
        assert!(char_orbit(&chi, &inv, 3).is_err());
    }

    #[test]
    fn orbit_sizes_partition_the_dual() {
        let a = FinAb::new(vec![3, 3]).unwrap();
        let swap = AbHom::new(a.clone(), a.clone(), vec![vec![0, 1], vec![1, 0]]).unwrap();
        let mut seen: Vec<AbChar> = Vec::new();
        let mut total = 0;
        for chi in dual_enumerate(&a).unwrap() {
            if seen.contains(&chi) {
                continue;
            }
            let orbit = char_orbit(&chi, &swap, 2).unwrap();
            total += orbit.len();
            seen.extend(orbit);
        }
        assert_eq!(total as u64, a.order());
    }

    #[test]
    fn blackbox_cyclic_and_product() {
        let s = blackbox_structure(12, 0, |a, b| (a + b) % 12).unwrap();
        assert_eq!(s.group.invariant_factors, vec![12]);
        for a in 0..12u32 {
            for b in 0..12u32 {
                let sum = s.group.add(&s.coords[a as usize], &s.coords[b as usize]);
                assert_eq!(sum, s.coords[((a + b) % 12) as usize]);
            }
        }
        let s = blackbox_structure(4, 0, |a, b| a ^ b).unwrap();
        assert_eq!(s.group.invariant_factors, vec![2, 2]);
        let s = blackbox_structure(12, 0, |a, b| {
            let (a1, a2) = (a % 6, a / 6);
            let (b1, b2) = (b % 6, b / 6);
            (a1 + b1) % 6 + ((a2 + b2) % 2) * 6
        })
        .unwrap();
        assert_eq!(s.group.invariant_factors, vec![2, 6]);
    }

    #[test]
    fn automorphism_detection() {
        let a = FinAb::new(vec![2, 4]).unwrap();
        let id = AbHom::identity(&a);
        assert!(id.is_automorphism());
        let neg = AbHom::new(a.clone(), a.clone(), vec![vec![1, 0], vec![0, 3]]).unwrap();
        assert!(neg.is_automorphism());
        let proj = AbHom::new(a.clone(), a.clone(), vec![vec![1, 0], vec![0, 2]]).unwrap();
        assert!(!proj.is_automorphism());
    }
}
