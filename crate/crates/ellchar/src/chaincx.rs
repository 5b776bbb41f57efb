//! Bounded equivariant permutation chain complexes for a commuting pair
//! `(G, T)` with `T` abelian: the realized shape of the homotopy-category
//! representatives of equivariant cohomology.
//!
//! Operations: base change of the integer differentials into a field,
//! homology as Grothendieck classes, isotypic twists by a character of `T`,
//! derived isotypic parts via truncated free resolutions over `F[T]`, Euler
//! classes, the permutation-module projectivity solver, and a seeded
//! generator of synthetic `T`-free complexes.

use std::sync::Arc;

use num::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloNumber, RootOfUnity};
use crate::fgab::{AbChar, FinAb};
use crate::fields::{FFElem, FiniteField, Gf};
use crate::ggroup::{brauer_value, FinGroup, GClass, ProductGroup, Subgroup};
use crate::linalg::{smith_normal_form, FieldArith, Mat, QQ};
use crate::{Coeff, Error, Int, Rat, Result};

/// Coefficient choice for realizing a complex over a field (or the
/// integers).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffSpec {
    Integers,
    /// cyclotomic field of the given conductor
    Cyclo(u64),
    /// finite field `F_(ell^k)`
    GfSpec { ell: u64, k: usize },
}

/// Cyclotomic fields as a [`FieldArith`] context. Elements carry their own
/// conductor and embed on demand, so mixed-conductor arithmetic stays exact.
#[derive(Clone, Debug)]
pub struct CycloField;

impl FieldArith for CycloField {
    type Elem = CycloNumber;
    fn zero(&self) -> CycloNumber {
        CycloNumber::zero()
    }
    fn one(&self) -> CycloNumber {
        CycloNumber::one()
    }
    fn add(&self, a: &CycloNumber, b: &CycloNumber) -> CycloNumber {
        a.add(b)
    }
    fn sub(&self, a: &CycloNumber, b: &CycloNumber) -> CycloNumber {
        a.sub(b)
    }
    fn mul(&self, a: &CycloNumber, b: &CycloNumber) -> CycloNumber {
        a.mul(b)
    }
    fn neg(&self, a: &CycloNumber) -> CycloNumber {
        a.neg()
    }
    fn inv(&self, a: &CycloNumber) -> CycloNumber {
        a.inv().expect("inverse of nonzero cyclotomic number")
    }
    fn is_zero(&self, a: &CycloNumber) -> bool {
        a.is_zero()
    }
}

/// A finite `(G x T)`-set: the action table of the full product group.
#[derive(Clone)]
pub struct GtSet {
    pub size: usize,
    /// `act[e * size + s]` for a full-group element `e`
    pub act: Vec<u32>,
}

impl GtSet {
    /// Disjoint union of orbits `(G/H_i) x T` for subgroups `H_i` of `G`
    /// given by sorted element lists. These are `T`-free by construction.
    pub fn from_stabilizers(prod: &ProductGroup, stabs: &[Vec<u32>]) -> Result<GtSet> {
        let t_ord = prod.right.order;
        let full_ord = prod.full.order;
        let mut points: Vec<(u32, u32)> = Vec::new(); // (coset id within block, t)
        let mut block_coset_of: Vec<Vec<u32>> = Vec::new();
        let mut offsets = Vec::new();
        for h in stabs {
            let sub = Subgroup::new(&prod.left, h.clone())?;
            let cosets = sub.left_cosets();
            let mut coset_of = vec![0u32; prod.left.order];
            for (i, c) in cosets.iter().enumerate() {
                for &x in c {
                    coset_of[x as usize] = i as u32;
                }
            }
            offsets.push(points.len());
            for ci in 0..cosets.len() as u32 {
                for t in 0..t_ord as u32 {
                    points.push((ci, t));
                }
            }
            block_coset_of.push(coset_of);
        }
        let size = points.len();
        let mut act = vec![0u32; full_ord * size];
        for e in 0..full_ord as u32 {
            let (g, te) = prod.split(e);
            for (blk, h) in stabs.iter().enumerate() {
                let sub_cosets = {
                    // recompute coset representatives for this block
                    let sub = Subgroup::new(&prod.left, h.clone())?;
                    sub.left_cosets()
                };
                let coset_of = &block_coset_of[blk];
                let base = offsets[blk];
                let n_cosets = sub_cosets.len();
                for ci in 0..n_cosets {
                    let rep = sub_cosets[ci][0];
                    let moved = coset_of[prod.left.mul(g, rep) as usize];
                    for t in 0..t_ord as u32 {
                        let s = base + ci * t_ord + t as usize;
                        let t2 = prod.right.mul(te, t);
                        let s2 = base + moved as usize * t_ord + t2 as usize;
                        act[e as usize * size + s] = s2 as u32;
                    }
                }
            }
        }
        Ok(GtSet { size, act })
    }

    pub fn apply(&self, e: u32, s: usize) -> usize {
        self.act[e as usize * self.size + s] as usize
    }

    /// Order of the `T`-stabilizer of a point.
    pub fn t_stab_order(&self, prod: &ProductGroup, s: usize) -> usize {
        (0..prod.right.order as u32)
            .filter(|&t| self.apply(prod.pair(prod.left.identity, t), s) == s)
            .count()
    }

    pub fn is_t_free(&self, prod: &ProductGroup) -> bool {
        (0..self.size).all(|s| self.t_stab_order(prod, s) == 1)
    }
}

/// A bounded chain complex of `(G x T)`-permutation modules with integer
/// differentials `d_i : C_i -> C_(i-1)`; `terms[0]` sits in degree `low`.
pub struct PermComplex {
    pub prod: Arc<ProductGroup>,
    pub low: i64,
    pub terms: Vec<GtSet>,
    /// `diffs[i]` maps `terms[i+1]` to `terms[i]`; row-major
    /// `|terms[i]| x |terms[i+1]|`
    pub diffs: Vec<Vec<i64>>,
}

impl PermComplex {
    pub fn new(
        prod: Arc<ProductGroup>,
        low: i64,
        terms: Vec<GtSet>,
        diffs: Vec<Vec<i64>>,
    ) -> Result<PermComplex> {
        if diffs.len() + 1 != terms.len() && !(terms.len() <= 1 && diffs.is_empty()) {
            return Err(Error::Invalid("need one differential per adjacent pair".into()));
        }
        let c = PermComplex {
            prod,
            low,
            terms,
            diffs,
        };
        c.verify()?;
        Ok(c)
    }

    /// Re-checks `d o d = 0` and equivariance of every differential.
    pub fn verify(&self) -> Result<()> {
        for i in 0..self.diffs.len() {
            let rows = self.terms[i].size;
            let cols = self.terms[i + 1].size;
            if self.diffs[i].len() != rows * cols {
                return Err(Error::Invalid(format!("differential {i} has wrong shape")));
            }
        }
        // d^2 = 0
        for i in 1..self.diffs.len() {
            let a = &self.diffs[i - 1]; // C_i -> C_(i-1)
            let b = &self.diffs[i]; // C_(i+1) -> C_i
            let (ra, ca) = (self.terms[i - 1].size, self.terms[i].size);
            let cb = self.terms[i + 1].size;
            for r in 0..ra {
                for c in 0..cb {
                    let mut acc: i128 = 0;
                    for k in 0..ca {
                        acc += a[r * ca + k] as i128 * b[k * cb + c] as i128;
                    }
                    if acc != 0 {
                        return Err(Error::Invalid(format!(
                            "d^2 != 0 at degree index {i} entry ({r},{c})"
                        )));
                    }
                }
            }
        }
        // equivariance on the full group generators
        for &e in &self.prod.full.generators {
            for (i, d) in self.diffs.iter().enumerate() {
                let rows = self.terms[i].size;
                let cols = self.terms[i + 1].size;
                for r in 0..rows {
                    for c in 0..cols {
                        let moved =
                            d[self.terms[i].apply(e, r) * cols + self.terms[i + 1].apply(e, c)];
                        if d[r * cols + c] != moved {
                            return Err(Error::Invalid(format!(
                                "differential {i} is not equivariant"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_t_free(&self) -> bool {
        self.terms.iter().all(|t| t.is_t_free(&self.prod))
    }

    /// Degree relabeling `C[k]`.
    pub fn shift(&self, k: i64) -> PermComplex {
        PermComplex {
            prod: self.prod.clone(),
            low: self.low + k,
            terms: self.terms.clone(),
            diffs: self.diffs.clone(),
        }
    }
}

/// The degree shift appearing in representation stability between levels
/// `h >= h'`: `2(n-1)(h - h')`, always even.
pub fn stability_shift(n: usize, h: usize, h_prime: usize) -> i64 {
    2 * (n as i64 - 1) * (h as i64 - h_prime as i64)
}

/// A matrix complex over a field with an action of a designated group on
/// each term; produced by base change, isotypic twist, or derived isotypic
/// parts.
pub struct FieldComplex<F: FieldArith> {
    pub f: F,
    pub low: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<Mat<F>>,
    pub group: Arc<FinGroup>,
    /// action matrices per degree for every group element, lazily filled by
    /// the producer (complete for the generators is not enough: homology
    /// needs class representatives, so producers supply a closure)
    action: ActionKind<F>,
}

enum ActionKind<F: FieldArith> {
    /// permutation of the term bases by the full product group
    Perm { sets: Vec<GtSet> },
    /// orbit basis with character twists: for each degree, for each kept
    /// orbit base point and group element, a target orbit and scalar
    Twisted {
        sets: Vec<GtSet>,
        data: Vec<TwistDegree<F>>,
        prod: Arc<ProductGroup>,
    },
    /// blocks `C_i^(r_j)` with the group acting diagonally by permutations
    Tensor {
        sets: Vec<GtSet>,
        blocks: Vec<Vec<(usize, usize)>>,
        prod: Arc<ProductGroup>,
    },
}

struct TwistDegree<F: FieldArith> {
    /// base point of each kept orbit
    bases: Vec<usize>,
    /// for each point of the underlying set: (kept orbit index or MAX, twist scalar)
    classify: Vec<(u32, F::Elem)>,
}

impl<F: FieldArith> FieldComplex<F> {
    pub fn action_matrix(&self, deg: usize, g: u32) -> Mat<F> {
        match &self.action {
            ActionKind::Perm { sets } => {
                let set = &sets[deg];
                let mut m = Mat::zero(&self.f, set.size, set.size);
                for s in 0..set.size {
                    m.set(set.apply(g, s), s, self.f.one());
                }
                m
            }
            ActionKind::Twisted { sets, data, prod } => {
                let set = &sets[deg];
                let td = &data[deg];
                let e = prod.pair(g, prod.right.identity);
                let n = td.bases.len();
                let mut m = Mat::zero(&self.f, n, n);
                for (o, &b) in td.bases.iter().enumerate() {
                    let target = set.apply(e, b);
                    let (o2, scalar) = &td.classify[target];
                    if *o2 != u32::MAX {
                        m.set(*o2 as usize, o, scalar.clone());
                    }
                }
                m
            }
            ActionKind::Tensor { sets, blocks, prod } => {
                let dim = self.dims[deg];
                let mut m = Mat::zero(&self.f, dim, dim);
                let e = prod.pair(g, prod.right.identity);
                let mut offset = 0usize;
                for &(i, r) in &blocks[deg] {
                    let set = &sets[i];
                    for copy in 0..r {
                        let base = offset + copy * set.size;
                        for s in 0..set.size {
                            m.set(base + set.apply(e, s), base + s, self.f.one());
                        }
                    }
                    offset += r * set.size;
                }
                m
            }
        }
    }
}

/// Base change of the integer differentials into a field context.
fn lift_diff<F: FieldArith>(f: &F, d: &[i64], rows: usize, cols: usize, conv: &impl Fn(i64) -> F::Elem) -> Mat<F> {
    let mut m = Mat::zero(f, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = d[r * cols + c];
            if v != 0 {
                m.set(r, c, conv(v));
            }
        }
    }
    m
}

fn int_to_cyclo(v: i64) -> CycloNumber {
    CycloNumber::from_int(v)
}

fn int_to_gf(field: &Arc<FiniteField>, v: i64) -> FFElem {
    let p = field.p();
    let r = v.rem_euclid(p as i64) as u64;
    field.from_int(r)
}

/// Base change over a cyclotomic field; the action is the plain permutation
/// action of the full product group.
pub fn base_change_cyclo(c: &PermComplex) -> FieldComplex<CycloField> {
    let f = CycloField;
    let dims: Vec<usize> = c.terms.iter().map(|t| t.size).collect();
    let diffs = c
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| lift_diff(&f, d, dims[i], dims[i + 1], &int_to_cyclo))
        .collect();
    FieldComplex {
        f,
        low: c.low,
        dims,
        diffs,
        group: c.prod.full.clone(),
        action: ActionKind::Perm {
            sets: c.terms.clone(),
        },
    }
}

/// Base change over a finite field.
pub fn base_change_gf(c: &PermComplex, field: &Arc<FiniteField>) -> FieldComplex<Gf> {
    let f = Gf {
        field: field.clone(),
    };
    let dims: Vec<usize> = c.terms.iter().map(|t| t.size).collect();
    let diffs = c
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| lift_diff(&f, d, dims[i], dims[i + 1], &|v| int_to_gf(field, v)))
        .collect();
    FieldComplex {
        f,
        low: c.low,
        dims,
        diffs,
        group: c.prod.full.clone(),
        action: ActionKind::Perm {
            sets: c.terms.clone(),
        },
    }
}

/// Integral homology via Smith normal form: per degree, the Betti number
/// and the torsion invariant factors (reported, but excluded from classes).
pub fn integral_homology(c: &PermComplex) -> Vec<(usize, Vec<u64>)> {
    let n = c.terms.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let dim = c.terms[i].size;
        // rank of the outgoing differential d_i: C_i -> C_(i-1)
        let rank_out = if i == 0 {
            0
        } else {
            int_rank(&c.diffs[i - 1], c.terms[i - 1].size, dim)
        };
        // incoming d_(i+1): C_(i+1) -> C_i
        let (rank_in, torsion) = if i < c.diffs.len() {
            let rows = dim;
            let cols = c.terms[i + 1].size;
            let m: Vec<Vec<Int>> = (0..rows)
                .map(|r| (0..cols).map(|cc| Int::from(c.diffs[i][r * cols + cc])).collect())
                .collect();
            let snf = smith_normal_form(&m);
            let mut rank = 0;
            let mut tors = Vec::new();
            for d in 0..rows.min(cols) {
                let v = snf.d[d][d].abs();
                if v.is_zero() {
                    break;
                }
                rank += 1;
                if v > Int::one() {
                    tors.push(v.to_u64().unwrap());
                }
            }
            (rank, tors)
        } else {
            (0, Vec::new())
        };
        out.push((dim - rank_out - rank_in, torsion));
    }
    out
}

fn int_rank(d: &[i64], rows: usize, cols: usize) -> usize {
    let f = QQ;
    let mut m = Mat::zero(&f, rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if d[r * cols + c] != 0 {
                m.set(r, c, Rat::from_integer(Int::from(d[r * cols + c])));
            }
        }
    }
    m.rank(&f)
}

/// The isotypic part `C tensor_(Lambda[T]) theta` over a cyclotomic field:
/// basis the kept `T`-orbits, `G` acting with character twists.
pub fn isotypic_cyclo(
    c: &PermComplex,
    theta: &AbChar,
    conductor: u64,
) -> Result<FieldComplex<CycloField>> {
    if conductor % theta.order() != 0 {
        return Err(Error::Unrealizable {
            order: theta.order(),
            spec: format!("Q(zeta_{conductor})"),
        });
    }
    let f = CycloField;
    let conv = |r: &RootOfUnity| CycloNumber::from_root(r);
    isotypic_generic(c, theta, f, conv)
}

/// The isotypic part over `F_(ell^k)`, with character values realized
/// through the inverse Teichmueller map.
pub fn isotypic_gf(
    c: &PermComplex,
    theta: &AbChar,
    field: &Arc<FiniteField>,
) -> Result<FieldComplex<Gf>> {
    if (field.size() - 1) % theta.order() != 0 {
        return Err(Error::Unrealizable {
            order: theta.order(),
            spec: format!("F_{}^{}", field.p(), field.degree()),
        });
    }
    let f = Gf {
        field: field.clone(),
    };
    let fld = field.clone();
    let conv = move |r: &RootOfUnity| fld.teich_drop(r).expect("order divides q-1");
    isotypic_generic(c, theta, f, conv)
}

fn isotypic_generic<F: FieldArith>(
    c: &PermComplex,
    theta: &AbChar,
    f: F,
    conv: impl Fn(&RootOfUnity) -> F::Elem,
) -> Result<FieldComplex<F>> {
    let prod = &c.prod;
    if theta.domain != prod.right_ab {
        return Err(Error::Invalid("character is not on the T factor".into()));
    }
    let t_ord = prod.right.order as u32;
    let mut data: Vec<TwistDegree<F>> = Vec::with_capacity(c.terms.len());
    for set in &c.terms {
        // T-orbits: base point = least index; twist of a point r in the
        // orbit of b is theta(t) for any t with t*b = r
        let mut classify: Vec<(u32, F::Elem)> = vec![(u32::MAX, f.zero()); set.size];
        let mut visited = vec![false; set.size];
        let mut bases = Vec::new();
        for b in 0..set.size {
            if visited[b] {
                continue;
            }
            // orbit of b under T, recording a transporter for each point
            let mut transporters: Vec<(usize, u32)> = Vec::new();
            let mut stab_kill = false;
            for t in 0..t_ord {
                let e = prod.pair(prod.left.identity, t);
                let r = set.apply(e, b);
                if r == b && t != prod.right.identity {
                    // stabilizer element: the orbit survives iff theta kills it
                    if !theta
                        .eval(&prod.right_ab.elem_at(t as u64))
                        .is_zero()
                    {
                        stab_kill = true;
                    }
                }
                transporters.push((r, t));
            }
            let keep = !stab_kill;
            let orbit_idx = bases.len() as u32;
            for &(r, t) in &transporters {
                visited[r] = true;
                if keep {
                    let tw = theta.eval(&prod.right_ab.elem_at(t as u64));
                    classify[r] = (orbit_idx, conv(&tw));
                }
            }
            if keep {
                bases.push(b);
            }
        }
        data.push(TwistDegree { bases, classify });
    }
    let dims: Vec<usize> = data.iter().map(|d| d.bases.len()).collect();
    // twisted differentials: entry (O', O) = sum over r in O' of
    // D[r][base_O] * twist(r)
    let mut diffs = Vec::with_capacity(c.diffs.len());
    for (i, d) in c.diffs.iter().enumerate() {
        let cols_full = c.terms[i + 1].size;
        let mut m = Mat::zero(&f, dims[i], dims[i + 1]);
        for (o, &b) in data[i + 1].bases.iter().enumerate() {
            for r in 0..c.terms[i].size {
                let v = d[r * cols_full + b];
                if v == 0 {
                    continue;
                }
                let (o2, scalar) = &data[i].classify[r];
                if *o2 == u32::MAX {
                    continue;
                }
                let term = f.mul(scalar, &int_conv(&f, v));
                let cur = m.at(*o2 as usize, o).clone();
                m.set(*o2 as usize, o, f.add(&cur, &term));
            }
        }
        diffs.push(m);
    }
    Ok(FieldComplex {
        f,
        low: c.low,
        dims,
        diffs,
        group: c.prod.left.clone(),
        action: ActionKind::Twisted {
            sets: c.terms.clone(),
            data,
            prod: c.prod.clone(),
        },
    })
}

fn int_conv<F: FieldArith>(f: &F, v: i64) -> F::Elem {
    let one = f.one();
    let mut acc = f.zero();
    for _ in 0..v.unsigned_abs() {
        acc = f.add(&acc, &one);
    }
    if v < 0 {
        f.neg(&acc)
    } else {
        acc
    }
}

/// A truncated free resolution of the one-dimensional module `theta` over
/// `F[T]`, with generators chosen greedily from column-reduced kernels.
struct Resolution {
    ranks: Vec<usize>,
    /// maps[j]: columns = images of the generators of `A^(ranks[j+1])`
    /// inside `A^(ranks[j])`, in the basis `(copy, t)` with `t` fastest
    maps: Vec<Mat<Gf>>,
}

fn resolve_theta(
    t_ab: &FinAb,
    t_group: &Arc<FinGroup>,
    theta: &AbChar,
    field: &Arc<FiniteField>,
    steps: usize,
) -> Result<Resolution> {
    let gf = Gf {
        field: field.clone(),
    };
    let t_ord = t_group.order;
    // T-generator action on the regular module A = F[T]
    let t_gens: Vec<u32> = t_group.generators.clone();
    let theta_scalars: Vec<FFElem> = t_gens
        .iter()
        .map(|&g| {
            field
                .teich_drop(&theta.eval(&t_ab.elem_at(g as u64)))
                .expect("realizable")
        })
        .collect();

    // current module: F-dim, action matrices for the T generators, plus the
    // embedding of its basis into A^(prev rank) (for building the maps)
    let mut ranks = vec![1usize];
    let mut maps: Vec<Mat<Gf>> = Vec::new();

    // M = theta as a 1-dim module; the first syzygy lives inside A^1
    // epsilon: A -> theta, t |-> theta(t)
    // kernel basis inside A = F[T]
    let mut prev_rank = 1usize;
    let mut kernel: Vec<Vec<FFElem>> = {
        // epsilon matrix: 1 x |T|
        let mut eps = Mat::zero(&gf, 1, t_ord);
        for t in 0..t_ord {
            // theta(t) via evaluation at the mixed-radix element
            let v = field
                .teich_drop(&theta.eval(&t_ab.elem_at(t as u64)))
                .expect("realizable");
            eps.set(0, t, v);
        }
        eps.kernel_basis(&gf)
    };

    for _ in 0..steps {
        // choose generators of the kernel submodule greedily
        let dim_ambient = prev_rank * t_ord;
        let mut span = Mat::zero(&gf, dim_ambient, 0);
        let mut span_cols: Vec<Vec<FFElem>> = Vec::new();
        let mut gens: Vec<Vec<FFElem>> = Vec::new();
        let in_span = |cols: &Vec<Vec<FFElem>>, v: &Vec<FFElem>, gf: &Gf| -> bool {
            if cols.is_empty() {
                return v.iter().all(|x| gf.is_zero(x));
            }
            let mut m = Mat::zero(gf, v.len(), cols.len());
            for (j, c) in cols.iter().enumerate() {
                for (i, x) in c.iter().enumerate() {
                    m.set(i, j, x.clone());
                }
            }
            m.solve(gf, v).is_some()
        };
        for cand in &kernel {
            if in_span(&span_cols, cand, &gf) {
                continue;
            }
            gens.push(cand.clone());
            // close under the T-action
            let mut frontier = vec![cand.clone()];
            while let Some(v) = frontier.pop() {
                if in_span(&span_cols, &v, &gf) {
                    continue;
                }
                span_cols.push(v.clone());
                for &tg in &t_gens {
                    frontier.push(apply_t_to_free(t_group, tg, &v, prev_rank, &gf));
                }
            }
        }
        let _ = &mut span;
        let r_next = gens.len();
        // resolution map: A^(r_next) -> A^(prev_rank), generator u -> gens[u]
        let mut map = Mat::zero(&gf, dim_ambient, r_next);
        for (u, g) in gens.iter().enumerate() {
            for (i, x) in g.iter().enumerate() {
                map.set(i, u, x.clone());
            }
        }
        maps.push(map);
        ranks.push(r_next);
        if r_next == 0 {
            break;
        }
        // next kernel: of the full map A^(r_next) -> A^(prev_rank),
        // (u, t) -> t * gens[u]
        let mut full = Mat::zero(&gf, dim_ambient, r_next * t_ord);
        for (u, g) in gens.iter().enumerate() {
            for t in 0..t_ord as u32 {
                let moved = apply_t_to_free(t_group, t, g, prev_rank, &gf);
                for (i, x) in moved.iter().enumerate() {
                    full.set(i, u * t_ord + t as usize, x.clone());
                }
            }
        }
        kernel = full.kernel_basis(&gf);
        prev_rank = r_next;
    }
    let _ = theta_scalars;
    Ok(Resolution { ranks, maps })
}

fn apply_t_to_free(
    t_group: &Arc<FinGroup>,
    t: u32,
    v: &[FFElem],
    rank: usize,
    gf: &Gf,
) -> Vec<FFElem> {
    let t_ord = t_group.order;
    let mut out = vec![gf.zero(); v.len()];
    for u in 0..rank {
        for s in 0..t_ord as u32 {
            let x = &v[u * t_ord + s as usize];
            if !gf.is_zero(x) {
                let moved = t_group.mul(t, s);
                out[u * t_ord + moved as usize] = gf.add(&out[u * t_ord + moved as usize], x);
            }
        }
    }
    out
}

/// The derived isotypic part `C tensor^L_(F[T]) theta`, computed as the
/// total complex of `C tensor P` for a truncated free resolution `P` of
/// `theta`. Homology is reported for the degrees where the truncation is
/// exact; `truncation` must be at least the length of `C`.
pub fn derived_isotypic_gf(
    c: &PermComplex,
    theta: &AbChar,
    field: &Arc<FiniteField>,
    truncation: usize,
) -> Result<FieldComplex<Gf>> {
    if truncation < c.len() {
        return Err(Error::TruncationTooSmall {
            reached: truncation as i64,
            needed: c.len() as i64,
        });
    }
    if (field.size() - 1) % theta.order() != 0 {
        return Err(Error::Unrealizable {
            order: theta.order(),
            spec: format!("F_{}^{}", field.p(), field.degree()),
        });
    }
    let gf = Gf {
        field: field.clone(),
    };
    let prod = &c.prod;
    let res = resolve_theta(&prod.right_ab, &prod.right, theta, field, truncation)?;

    // T-action permutation on each term, as reusable index maps
    let t_ord = prod.right.order;
    let t_act = |set: &GtSet, t: u32, s: usize| -> usize {
        set.apply(prod.pair(prod.left.identity, t), s)
    };

    // total complex: degree m holds blocks (i, j) with i + j = m - low,
    // i indexing C, j the resolution
    let n_c = c.terms.len();
    let max_j = res.ranks.len() - 1;
    let top = n_c - 1 + max_j;
    let mut blocks: Vec<Vec<(usize, usize)>> = vec![Vec::new(); top + 1];
    for m in 0..=top {
        for i in 0..n_c {
            if let Some(j) = m.checked_sub(i) {
                if j <= max_j && res.ranks[j] > 0 {
                    blocks[m].push((i, res.ranks[j]));
                }
            }
        }
    }
    let block_dim = |i: usize, r: usize| c.terms[i].size * r;
    let dims: Vec<usize> = blocks
        .iter()
        .map(|bs| bs.iter().map(|&(i, r)| block_dim(i, r)).sum())
        .collect();

    // offsets of block (i, j) inside total degree m
    let offset_of = |m: usize, i: usize| -> usize {
        let mut off = 0;
        for &(bi, r) in &blocks[m] {
            if bi == i {
                return off;
            }
            off += block_dim(bi, r);
        }
        unreachable!("block not found")
    };

    let mut diffs: Vec<Mat<Gf>> = Vec::new();
    for m in 1..=top {
        let mut mat = Mat::zero(&gf, dims[m - 1], dims[m]);
        for &(i, _r) in &blocks[m] {
            let j = m - i;
            let col_off = offset_of(m, i);
            let r_j = res.ranks[j];
            // d_C part: (i, j) -> (i-1, j), sign +1
            if i >= 1 && blocks[m - 1].iter().any(|&(bi, _)| bi == i - 1) && j <= max_j {
                let row_off = offset_of(m - 1, i - 1);
                let d = &c.diffs[i - 1];
                let (rows_c, cols_c) = (c.terms[i - 1].size, c.terms[i].size);
                for copy in 0..r_j {
                    for rr in 0..rows_c {
                        for cc in 0..cols_c {
                            let v = d[rr * cols_c + cc];
                            if v != 0 {
                                let cur = mat
                                    .at(row_off + copy * rows_c + rr, col_off + copy * cols_c + cc)
                                    .clone();
                                mat.set(
                                    row_off + copy * rows_c + rr,
                                    col_off + copy * cols_c + cc,
                                    gf.add(&cur, &int_conv(&gf, v)),
                                );
                            }
                        }
                    }
                }
            }
            // d_P part: (i, j) -> (i, j-1), sign (-1)^i
            if j >= 1 && blocks[m - 1].iter().any(|&(bi, _)| bi == i) {
                let row_off = offset_of(m - 1, i);
                let pm = &res.maps[j - 1]; // (ranks[j-1] * |T|) x ranks[j]
                let r_prev = res.ranks[j - 1];
                let sgn_neg = i % 2 == 1;
                let set = &c.terms[i];
                for u in 0..r_j {
                    for v_idx in 0..r_prev {
                        for t in 0..t_ord {
                            let coef = pm.at(v_idx * t_ord + t, u);
                            if gf.is_zero(coef) {
                                continue;
                            }
                            let coef = if sgn_neg { gf.neg(coef) } else { coef.clone() };
                            // multiplication by t moves basis point s to t*s
                            for s in 0..set.size {
                                let moved = t_act(set, t as u32, s);
                                let cur = mat
                                    .at(row_off + v_idx * set.size + moved, col_off + u * set.size + s)
                                    .clone();
                                mat.set(
                                    row_off + v_idx * set.size + moved,
                                    col_off + u * set.size + s,
                                    gf.add(&cur, &coef),
                                );
                            }
                        }
                    }
                }
            }
        }
        diffs.push(mat);
    }

    let tensor_blocks: Vec<Vec<(usize, usize)>> = blocks;
    Ok(FieldComplex {
        f: gf,
        low: c.low,
        dims,
        diffs,
        group: c.prod.left.clone(),
        action: ActionKind::Tensor {
            sets: c.terms.clone(),
            blocks: tensor_blocks,
            prod: c.prod.clone(),
        },
    })
}

/// Homology data of one degree: dimension plus a basis/projection pair for
/// computing induced actions.
struct HomologyDegree<F: FieldArith> {
    kernel: Vec<Vec<F::Elem>>,
    /// rref rows of the image in kernel coordinates, with pivot columns
    reduce_rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
    basis_positions: Vec<usize>,
}

fn homology_degree<F: FieldArith>(
    f: &F,
    dim: usize,
    d_out: Option<&Mat<F>>,
    d_in: Option<&Mat<F>>,
) -> HomologyDegree<F> {
    let kernel: Vec<Vec<F::Elem>> = match d_out {
        Some(m) => m.kernel_basis(f),
        None => (0..dim)
            .map(|i| {
                let mut v = vec![f.zero(); dim];
                v[i] = f.one();
                v
            })
            .collect(),
    };
    let kdim = kernel.len();
    let mut kmat = Mat::zero(f, dim, kdim);
    for (j, k) in kernel.iter().enumerate() {
        for (i, x) in k.iter().enumerate() {
            kmat.set(i, j, x.clone());
        }
    }
    // image vectors in kernel coordinates
    let img_coords: Vec<Vec<F::Elem>> = match d_in {
        Some(m) => (0..m.cols)
            .map(|c| {
                let v: Vec<F::Elem> = (0..m.rows).map(|r| m.at(r, c).clone()).collect();
                kmat.solve(f, &v).expect("image lies in the kernel")
            })
            .collect(),
        None => Vec::new(),
    };
    // row echelon of the image
    let mut img = Mat::zero(f, img_coords.len(), kdim);
    for (r, v) in img_coords.iter().enumerate() {
        for (cc, x) in v.iter().enumerate() {
            img.set(r, cc, x.clone());
        }
    }
    let pivots = img.row_echelon(f);
    let reduce_rows: Vec<Vec<F::Elem>> = (0..pivots.len())
        .map(|r| (0..kdim).map(|cc| img.at(r, cc).clone()).collect())
        .collect();
    let basis_positions: Vec<usize> = (0..kdim).filter(|i| !pivots.contains(i)).collect();
    HomologyDegree {
        kernel,
        reduce_rows,
        pivots,
        basis_positions,
    }
}

impl<F: FieldArith> HomologyDegree<F> {
    fn dim(&self) -> usize {
        self.basis_positions.len()
    }

    /// Induced matrix of a linear map on the ambient term.
    fn induced(&self, f: &F, act: &Mat<F>) -> Mat<F> {
        let hd = self.dim();
        let dim = act.rows;
        let kdim = self.kernel.len();
        let mut kmat = Mat::zero(f, dim, kdim);
        for (j, k) in self.kernel.iter().enumerate() {
            for (i, x) in k.iter().enumerate() {
                kmat.set(i, j, x.clone());
            }
        }
        let mut out = Mat::zero(f, hd, hd);
        for (col, &pos) in self.basis_positions.iter().enumerate() {
            let v = act.apply(f, &self.kernel[pos]);
            let mut y = kmat.solve(f, &v).expect("action preserves the kernel");
            // reduce modulo the image
            for (r, &p) in self.pivots.iter().enumerate() {
                if !f.is_zero(&y[p]) {
                    let c = y[p].clone();
                    for cc in 0..kdim {
                        let t = f.mul(&c, &self.reduce_rows[r][cc]);
                        y[cc] = f.sub(&y[cc], &t);
                    }
                }
            }
            for (row, &bp) in self.basis_positions.iter().enumerate() {
                out.set(row, col, y[bp].clone());
            }
        }
        out
    }
}

/// Degreewise homology dimensions.
pub fn homology_dims<F: FieldArith>(c: &FieldComplex<F>) -> Vec<usize> {
    (0..c.dims.len())
        .map(|i| {
            let d_out = if i > 0 { Some(&c.diffs[i - 1]) } else { None };
            let d_in = if i < c.diffs.len() {
                Some(&c.diffs[i])
            } else {
                None
            };
            homology_degree(&c.f, c.dims[i], d_out, d_in).dim()
        })
        .collect()
}

/// Homology of a cyclotomic-coefficient complex as ordinary classes on the
/// acting group.
pub fn homology_classes_cyclo(c: &FieldComplex<CycloField>) -> Vec<GClass> {
    (0..c.dims.len())
        .map(|i| {
            let d_out = if i > 0 { Some(&c.diffs[i - 1]) } else { None };
            let d_in = if i < c.diffs.len() {
                Some(&c.diffs[i])
            } else {
                None
            };
            let h = homology_degree(&c.f, c.dims[i], d_out, d_in);
            let values = c
                .group
                .classes
                .iter()
                .map(|cls| {
                    if h.dim() == 0 {
                        return CycloNumber::zero();
                    }
                    let act = c.action_matrix(i, cls[0]);
                    h.induced(&c.f, &act).trace(&c.f)
                })
                .collect();
            GClass {
                group: c.group.clone(),
                coeff: Coeff::Char0,
                values,
            }
        })
        .collect()
}

/// Homology of a finite-field complex as Brauer classes on the acting
/// group.
pub fn homology_classes_gf(c: &FieldComplex<Gf>) -> Result<Vec<GClass>> {
    let field = &c.f.field;
    let ell = field.p();
    let mut out = Vec::with_capacity(c.dims.len());
    for i in 0..c.dims.len() {
        let d_out = if i > 0 { Some(&c.diffs[i - 1]) } else { None };
        let d_in = if i < c.diffs.len() {
            Some(&c.diffs[i])
        } else {
            None
        };
        let h = homology_degree(&c.f, c.dims[i], d_out, d_in);
        let regs = c.group.ell_regular_classes(ell);
        let mut values = Vec::with_capacity(regs.len());
        for &cls in &regs {
            if h.dim() == 0 {
                values.push(CycloNumber::zero());
                continue;
            }
            let g = c.group.class_rep(cls);
            let act = c.action_matrix(i, g);
            let induced = h.induced(&c.f, &act);
            values.push(brauer_value(
                field,
                &induced,
                c.group.elem_order[g as usize] as u64,
            )?);
        }
        out.push(GClass {
            group: c.group.clone(),
            coeff: Coeff::ModEll(ell),
            values,
        });
    }
    Ok(out)
}

/// Alternating sum of homology classes with signs from the true degrees.
pub fn euler_from_classes(low: i64, classes: &[GClass]) -> Result<GClass> {
    let mut acc: Option<GClass> = None;
    for (i, cls) in classes.iter().enumerate() {
        let sign = if (low + i as i64).rem_euclid(2) == 0 {
            1
        } else {
            -1
        };
        let term = cls.scale_int(sign);
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term)?,
        });
    }
    acc.ok_or_else(|| Error::Invalid("empty complex".into()))
}

/// Euler class of a complex over a cyclotomic field, optionally
/// theta-twisted.
pub fn euler_class_cyclo(
    c: &PermComplex,
    theta: Option<&AbChar>,
    conductor: u64,
) -> Result<GClass> {
    match theta {
        None => {
            let bc = base_change_cyclo(c);
            euler_from_classes(c.low, &homology_classes_cyclo(&bc))
        }
        Some(th) => {
            let tw = isotypic_cyclo(c, th, conductor)?;
            euler_from_classes(c.low, &homology_classes_cyclo(&tw))
        }
    }
}

/// Euler class over `F_(ell^k)`; with a twist this requires `T`-projective
/// terms (stabilizer orders prime to ell), so that the plain isotypic part
/// computes the derived one.
pub fn euler_class_gf(
    c: &PermComplex,
    theta: Option<&AbChar>,
    field: &Arc<FiniteField>,
) -> Result<GClass> {
    match theta {
        None => {
            let bc = base_change_gf(c, field);
            let classes = homology_classes_gf(&bc)?;
            euler_from_classes(c.low, &classes)
        }
        Some(th) => {
            let ell = field.p();
            for set in &c.terms {
                for s in 0..set.size {
                    let st = set.t_stab_order(&c.prod, s);
                    if st as u64 % ell == 0 {
                        return Err(Error::Invalid(format!(
                            "term has a point with T-stabilizer of order {st}, not prime to {ell}"
                        )));
                    }
                }
            }
            let tw = isotypic_gf(c, th, field)?;
            let classes = homology_classes_gf(&tw)?;
            euler_from_classes(c.low, &classes)
        }
    }
}

/// Decides projectivity of the permutation module `Lambda[G/H]` over
/// `F_(ell^k)` by solving for an `H`-invariant lift of the coset `1 H` in
/// `Lambda[G]`: unknown coefficients constant on the right cosets `Hx`,
/// summing to the indicator of `1 H` over the left cosets.
pub fn is_projective_perm(
    group: &Arc<FinGroup>,
    h_elems: &[u32],
    field: &Arc<FiniteField>,
) -> Result<bool> {
    let sub = Subgroup::new(group, h_elems.to_vec())?;
    let gf = Gf {
        field: field.clone(),
    };
    let n = group.order;
    // equations: invariance c_{kx} = c_x for k in H, plus one sum equation
    // per left coset gH
    let cosets = sub.left_cosets();
    let rows = sub.order() * n + cosets.len();
    let mut m = Mat::zero(&gf, rows, n);
    let mut b = vec![gf.zero(); rows];
    let mut r = 0;
    for &k in &sub.elements {
        for x in 0..n as u32 {
            let kx = group.mul(k, x);
            // c_{kx} - c_x = 0
            let cur = m.at(r, kx as usize).clone();
            m.set(r, kx as usize, gf.add(&cur, &gf.one()));
            let cur = m.at(r, x as usize).clone();
            m.set(r, x as usize, gf.sub(&cur, &gf.one()));
            r += 1;
        }
    }
    let h_coset: Vec<u32> = sub.elements.clone();
    for coset in &cosets {
        for &x in coset {
            m.set(r, x as usize, gf.one());
        }
        b[r] = if *coset == h_coset {
            gf.one()
        } else {
            gf.zero()
        };
        r += 1;
    }
    Ok(m.solve(&gf, &b).is_some())
}

/// Seeded generator of synthetic bounded complexes whose terms are disjoint
/// unions of free `T`-orbits with a commuting `G`-action and `d^2 = 0`.
pub fn make_torsor_complex(
    prod: &Arc<ProductGroup>,
    seed: u64,
) -> Result<PermComplex> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let subgroups = prod.left.all_subgroups();
    let n_terms = 1 + (rng.gen::<u32>() % 3) as usize;
    let low = (rng.gen::<u32>() % 3) as i64;
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let n_orbits = 1 + (rng.gen::<u32>() % 2) as usize;
        let stabs: Vec<Vec<u32>> = (0..n_orbits)
            .map(|_| subgroups[(rng.gen::<u32>() as usize) % subgroups.len()].clone())
            .collect();
        terms.push(GtSet::from_stabilizers(prod, &stabs)?);
    }
    let mut diffs = Vec::new();
    for i in 0..n_terms.saturating_sub(1) {
        let basis = equivariant_map_basis(prod, &terms[i + 1], &terms[i]);
        let rows = terms[i].size;
        let cols = terms[i + 1].size;
        if i == 0 {
            // free choice
            let mut d = vec![0i64; rows * cols];
            for bmap in &basis {
                let coef = (rng.gen::<i64>() % 3).signum() * ((rng.gen::<u32>() % 2) as i64 + 1);
                if coef != 0 {
                    for (idx, v) in bmap.iter().enumerate() {
                        d[idx] += coef * v;
                    }
                }
            }
            diffs.push(d);
        } else {
            // constrain d_prev * d = 0: solve over Q on the basis coefficients
            let prev = &diffs[i - 1];
            let prev_rows = terms[i - 1].size;
            let f = QQ;
            let mut sys = Mat::zero(&f, prev_rows * cols, basis.len());
            for (j, bmap) in basis.iter().enumerate() {
                // prev * bmap
                for rr in 0..prev_rows {
                    for cc in 0..cols {
                        let mut acc = 0i64;
                        for kk in 0..rows {
                            acc += prev[rr * rows + kk] * bmap[kk * cols + cc];
                        }
                        if acc != 0 {
                            sys.set(rr * cols + cc, j, Rat::from_integer(Int::from(acc)));
                        }
                    }
                }
            }
            let ker = sys.kernel_basis(&f);
            let mut d = vec![0i64; rows * cols];
            if !ker.is_empty() {
                // clear denominators of one random kernel combination
                let pick = &ker[(rng.gen::<u32>() as usize) % ker.len()];
                let lcm_den = pick
                    .iter()
                    .fold(Int::one(), |acc, x| num::Integer::lcm(&acc, x.denom()));
                for (j, coeff) in pick.iter().enumerate() {
                    let c = (coeff * Rat::from_integer(lcm_den.clone()))
                        .to_integer()
                        .to_i64()
                        .unwrap_or(0);
                    if c != 0 {
                        for (idx, v) in basis[j].iter().enumerate() {
                            d[idx] += c * v;
                        }
                    }
                }
            }
            diffs.push(d);
        }
    }
    PermComplex::new(prod.clone(), low, terms, diffs)
}

/// Integer basis of the equivariant maps `Lambda[S2] -> Lambda[S1]`:
/// for each orbit base point of `S2` and each orbit of its stabilizer on
/// `S1`, the orbit-sum map extended equivariantly.
fn equivariant_map_basis(prod: &ProductGroup, s2: &GtSet, s1: &GtSet) -> Vec<Vec<i64>> {
    let full = &prod.full;
    // orbit decomposition of S2 under the full group
    let mut orbit_of = vec![u32::MAX; s2.size];
    let mut base_points = Vec::new();
    for s in 0..s2.size {
        if orbit_of[s] != u32::MAX {
            continue;
        }
        let oid = base_points.len() as u32;
        // transporter-aware BFS
        let mut transporter: Vec<Option<u32>> = vec![None; s2.size];
        transporter[s] = Some(full.identity);
        let mut queue = vec![s];
        orbit_of[s] = oid;
        while let Some(x) = queue.pop() {
            for e in 0..full.order as u32 {
                let y = s2.apply(e, x);
                if orbit_of[y] == u32::MAX {
                    orbit_of[y] = oid;
                    transporter[y] = Some(full.mul(e, transporter[x].unwrap()));
                    queue.push(y);
                }
            }
        }
        base_points.push((s, transporter));
    }
    let mut basis = Vec::new();
    for (oid, (b, transporter)) in base_points.iter().enumerate() {
        // stabilizer of the base point
        let stab: Vec<u32> = (0..full.order as u32)
            .filter(|&e| s2.apply(e, *b) == *b)
            .collect();
        // orbits of the stabilizer on S1
        let mut seen = vec![false; s1.size];
        for r in 0..s1.size {
            if seen[r] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut queue = vec![r];
            seen[r] = true;
            while let Some(x) = queue.pop() {
                orbit.push(x);
                for &e in &stab {
                    let y = s1.apply(e, x);
                    if !seen[y] {
                        seen[y] = true;
                        queue.push(y);
                    }
                }
            }
            // invariant vector at the base point: sum over the orbit;
            // extend over the base point's full-group orbit by
            // equivariance, zero on the other orbits of S2
            let mut map = vec![0i64; s1.size * s2.size];
            for s in 0..s2.size {
                if orbit_of[s] != oid as u32 {
                    continue;
                }
                let e = transporter[s].expect("transitive orbit");
                debug_assert_eq!(s2.apply(e, *b), s);
                for &x in &orbit {
                    let moved = s1.apply(e, x);
                    map[moved * s2.size + s] += 1;
                }
            }
            basis.push(map);
        }
    }
    basis
}

/// Serialized form of a permutation complex: orbit stabilizers per term and
/// sparse integer differentials.
#[derive(Serialize, Deserialize)]
pub struct PermComplexJson {
    pub g_mult_table: Vec<Vec<u32>>,
    pub t_invariant_factors: Vec<u64>,
    pub low: i64,
    /// per term: the list of orbit stabilizers (element lists in G)
    pub terms: Vec<Vec<Vec<u32>>>,
    /// per differential: sparse (row, col, value) triplets
    pub diffs: Vec<Vec<(u32, u32, i64)>>,
}

impl PermComplex {
    pub fn from_json(j: &PermComplexJson) -> Result<PermComplex> {
        let g = FinGroup::from_mult_table(j.g_mult_table.clone())?;
        let t = FinAb::new(j.t_invariant_factors.clone())?;
        let prod = Arc::new(ProductGroup::new(&g, &t)?);
        let mut terms = Vec::new();
        for stabs in &j.terms {
            terms.push(GtSet::from_stabilizers(&prod, stabs)?);
        }
        let mut diffs = Vec::new();
        for (i, triplets) in j.diffs.iter().enumerate() {
            let rows = terms[i].size;
            let cols = terms[i + 1].size;
            let mut d = vec![0i64; rows * cols];
            for &(r, c, v) in triplets {
                d[r as usize * cols + c as usize] = v;
            }
            diffs.push(d);
        }
        PermComplex::new(prod, j.low, terms, diffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fgab::dual_enumerate;
    use crate::ggroup::{decomposition_map, symmetric_3};

    fn trivial_g_z3() -> Arc<ProductGroup> {
        Arc::new(ProductGroup::new(&FinGroup::cyclic(1), &FinAb::cyclic(3)).unwrap())
    }

    /// 0 -> Z[T] --(1 - t)--> Z[T] -> 0 over the trivial G and T = Z/3.
    fn circulant_complex() -> PermComplex {
        let prod = trivial_g_z3();
        let term = GtSet::from_stabilizers(&prod, &[vec![0]]).unwrap();
        let size = term.size;
        let t_gen = prod.right.generators[0];
        let mut d = vec![0i64; size * size];
        for s in 0..size {
            d[s * size + s] += 1;
            let moved = term.apply(prod.pair(0, t_gen), s);
            d[moved * size + s] -= 1;
        }
        PermComplex::new(prod, 0, vec![term.clone(), term], vec![d]).unwrap()
    }

    #[test]
    fn point_complex_over_q() {
        let prod = Arc::new(
            ProductGroup::new(&FinGroup::cyclic(1), &FinAb::trivial()).unwrap(),
        );
        let term = GtSet::from_stabilizers(&prod, &[vec![0]]).unwrap();
        let c = PermComplex::new(prod, 0, vec![term], vec![]).unwrap();
        let bc = base_change_cyclo(&c);
        assert_eq!(homology_dims(&bc), vec![1]);
        let (betti, torsion) = integral_homology(&c)[0].clone();
        assert_eq!(betti, 1);
        assert!(torsion.is_empty());
    }

    #[test]
    fn circulant_homology() {
        let c = circulant_complex();
        // over Q(zeta_3): H_0 = H_1 = trivial character, 1-dimensional
        let bc = base_change_cyclo(&c);
        let classes = homology_classes_cyclo(&bc);
        assert_eq!(homology_dims(&bc), vec![1, 1]);
        for cls in &classes {
            assert_eq!(cls.dim(), CycloNumber::one());
        }
        // over F_3: rank of (1 - t) is 2, so both homologies are
        // 1-dimensional as well
        let f3 = FiniteField::new(3, 1, None).unwrap();
        let bc3 = base_change_gf(&c, &f3);
        assert_eq!(homology_dims(&bc3), vec![1, 1]);
        assert_eq!(bc3.diffs[0].rank(&bc3.f), 2);
    }

    #[test]
    fn acyclic_complex_has_zero_homology() {
        let prod = trivial_g_z3();
        let term = GtSet::from_stabilizers(&prod, &[vec![0]]).unwrap();
        let size = term.size;
        let mut d = vec![0i64; size * size];
        for s in 0..size {
            d[s * size + s] = 1;
        }
        let c = PermComplex::new(prod, 0, vec![term.clone(), term], vec![d]).unwrap();
        let bc = base_change_cyclo(&c);
        assert_eq!(homology_dims(&bc), vec![0, 0]);
        let e = euler_class_cyclo(&c, None, 3).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn isotypic_circulant() {
        let c = circulant_complex();
        let t = FinAb::cyclic(3);
        for theta in dual_enumerate(&t).unwrap() {
            let tw = isotypic_cyclo(&c, &theta, 3).unwrap();
            // each term is one free T-orbit: rank 1
            assert_eq!(tw.dims, vec![1, 1]);
            let dims = homology_dims(&tw);
            if theta.is_trivial() {
                // 1 - t acts as 0 on the invariants line
                assert_eq!(dims, vec![1, 1]);
            } else {
                // 1 - theta(t) is invertible
                assert_eq!(dims, vec![0, 0]);
            }
        }
    }

    #[test]
    fn isotypic_fixed_point() {
        // a single T-fixed point: theta nontrivial kills it, theta trivial
        // keeps a rank-1 term
        let prod = trivial_g_z3();
        // stabilizer = all of G x T cannot be expressed via G-stabilizers;
        // build the one-point set directly
        let full_ord = prod.full.order;
        let term = GtSet {
            size: 1,
            act: vec![0; full_ord],
        };
        let c = PermComplex::new(prod, 0, vec![term], vec![]).unwrap();
        assert!(!c.is_t_free());
        let t = FinAb::cyclic(3);
        let chars = dual_enumerate(&t).unwrap();
        let triv = isotypic_cyclo(&c, &chars[0], 3).unwrap();
        assert_eq!(triv.dims, vec![1]);
        let nontriv = isotypic_cyclo(&c, &chars[1], 3).unwrap();
        assert_eq!(nontriv.dims, vec![0]);
    }

    #[test]
    fn derived_fixed_point_has_periodic_tor() {
        // single T-fixed point, T = Z/3, ell = 3, theta trivial:
        // Tor_i is 1-dimensional for every degree the truncation reaches
        let prod = trivial_g_z3();
        let full_ord = prod.full.order;
        let term = GtSet {
            size: 1,
            act: vec![0; full_ord],
        };
        let c = PermComplex::new(prod, 0, vec![term], vec![]).unwrap();
        let t = FinAb::cyclic(3);
        let theta = AbChar::trivial(&t);
        let f3 = FiniteField::new(3, 1, None).unwrap();
        let trunc = 8;
        let d = derived_isotypic_gf(&c, &theta, &f3, trunc).unwrap();
        let dims = homology_dims(&d);
        // degrees 0 .. trunc-1 are exact under the truncation
        for (i, &dim) in dims.iter().take(trunc).enumerate() {
            assert_eq!(dim, 1, "Tor_{i} should be 1-dimensional");
        }
        // truncation errors
        assert!(matches!(
            derived_isotypic_gf(&c, &theta, &f3, 0),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn derived_equals_plain_for_free_actions() {
        let g = symmetric_3();
        let t = FinAb::cyclic(4);
        let prod = Arc::new(ProductGroup::new(&g, &t).unwrap());
        for seed in 0..6u64 {
            let c = make_torsor_complex(&prod, seed).unwrap();
            assert!(c.is_t_free());
            for ell in [3u64, 5] {
                // splitting field for theta values and element orders
                let k = splitting_degree(ell, &[t.exponent(), 6]);
                let field = FiniteField::new(ell, k, None).unwrap();
                for theta in dual_enumerate(&t).unwrap() {
                    if theta.order() % ell == 0 {
                        continue;
                    }
                    let plain = isotypic_gf(&c, &theta, &field).unwrap();
                    let derived =
                        derived_isotypic_gf(&c, &theta, &field, c.len() + 2).unwrap();
                    let pd = homology_dims(&plain);
                    let dd = homology_dims(&derived);
                    for i in 0..pd.len() {
                        assert_eq!(pd[i], dd[i], "seed {seed} ell {ell} degree {i}");
                    }
                    // beyond the complex the derived part has no homology
                    for (i, &d) in dd.iter().enumerate().skip(pd.len()) {
                        if i < c.len() + 1 {
                            assert_eq!(d, 0);
                        }
                    }
                    let pc = homology_classes_gf(&plain).unwrap();
                    let dc = homology_classes_gf(&derived).unwrap();
                    for i in 0..pc.len() {
                        assert_eq!(pc[i], dc[i], "Brauer characters at degree {i}");
                    }
                }
            }
        }
    }

    fn splitting_degree(ell: u64, orders: &[u64]) -> usize {
        let mut l = 1u64;
        for &o in orders {
            let mut m = o;
            while m % ell == 0 {
                m /= ell;
            }
            l = crate::lcm_u64(l, m);
        }
        if l == 1 {
            return 1;
        }
        let mut d = 1usize;
        let mut pw = ell % l;
        while pw != 1 {
            pw = pw * ell % l;
            d += 1;
        }
        d
    }

    #[test]
    fn euler_reduction_square() {
        // decomposition_map(euler over Q(zeta)) = euler over F_ell
        let g = symmetric_3();
        let t = FinAb::cyclic(4);
        let prod = Arc::new(ProductGroup::new(&g, &t).unwrap());
        for seed in [1u64, 5, 9] {
            let c = make_torsor_complex(&prod, seed).unwrap();
            for ell in [5u64, 7] {
                let k = splitting_degree(ell, &[12]);
                let field = FiniteField::new(ell, k, None).unwrap();
                let e0 = euler_class_cyclo(&c, None, 4).unwrap();
                let el = euler_class_gf(&c, None, &field).unwrap();
                assert_eq!(decomposition_map(&e0, ell).unwrap(), el, "seed {seed} ell {ell}");
            }
        }
    }

    #[test]
    fn euler_single_term_is_regular_class() {
        // one free orbit (G x T)/1 with G = Z/2, T = Z/2
        let g = FinGroup::cyclic(2);
        let t = FinAb::cyclic(2);
        let prod = Arc::new(ProductGroup::new(&g, &t).unwrap());
        let term = GtSet::from_stabilizers(&prod, &[vec![g.identity]]).unwrap();
        let c = PermComplex::new(prod.clone(), 0, vec![term], vec![]).unwrap();
        let e = euler_class_cyclo(&c, None, 2).unwrap();
        assert_eq!(e.dim(), CycloNumber::from_int(4));
        for (i, cls) in prod.full.classes.iter().enumerate() {
            if cls[0] != prod.full.identity {
                assert!(e.values[i].is_zero());
            }
        }
        // shift by one negates
        let shifted = c.shift(1);
        let es = euler_class_cyclo(&shifted, None, 2).unwrap();
        assert_eq!(es, e.neg());
    }

    #[test]
    fn projectivity_solver() {
        for ell in [2u64, 3, 5] {
            let field = FiniteField::new(ell, 1, None).unwrap();
            // G = Z/ell, H = 1: free, projective
            let zl = FinGroup::cyclic(ell);
            assert!(is_projective_perm(&zl, &[zl.identity], &field).unwrap());
            // H = G: projective iff ell does not divide |H| = ell: never
            let all: Vec<u32> = (0..ell as u32).collect();
            assert!(!is_projective_perm(&zl, &all, &field).unwrap());
        }
        // G = S_3, H = Z/3, ell = 2: the averaging lift exists
        let s3 = symmetric_3();
        let f2 = FiniteField::new(2, 1, None).unwrap();
        let three = (0..6u32).find(|&x| s3.elem_order[x as usize] == 3).unwrap();
        let h = s3.closure(&[three]);
        assert!(is_projective_perm(&s3, &h, &f2).unwrap());
        // agreement with ell | |H| on all subgroups
        for ell in [2u64, 3, 5] {
            let field = FiniteField::new(ell, 1, None).unwrap();
            for h in s3.all_subgroups() {
                let expect = (h.len() as u64) % ell != 0;
                assert_eq!(
                    is_projective_perm(&s3, &h, &field).unwrap(),
                    expect,
                    "H of order {} mod {ell}",
                    h.len()
                );
            }
        }
    }

    #[test]
    fn stability_shift_values() {
        assert_eq!(stability_shift(2, 3, 2), 2);
        assert_eq!(stability_shift(1, 5, 2), 0);
        assert_eq!(stability_shift(3, 2, 2), 0);
    }

    #[test]
    fn torsor_complexes_are_reproducible() {
        let g = symmetric_3();
        let t = FinAb::cyclic(4);
        let prod = Arc::new(ProductGroup::new(&g, &t).unwrap());
        let a = make_torsor_complex(&prod, 42).unwrap();
        let b = make_torsor_complex(&prod, 42).unwrap();
        assert_eq!(a.low, b.low);
        assert_eq!(a.diffs, b.diffs);
        let ea = euler_class_cyclo(&a, None, 4).unwrap();
        let eb = euler_class_cyclo(&b, None, 4).unwrap();
        assert_eq!(ea, eb);
    }

    #[test]
    fn json_round_trip() {
        let g = FinGroup::cyclic(2);
        let t = FinAb::cyclic(2);
        let prod = Arc::new(ProductGroup::new(&g, &t).unwrap());
        let term = GtSet::from_stabilizers(&prod, &[vec![g.identity]]).unwrap();
        let size = term.size;
        let mut d = vec![0i64; size * size];
        let tg = prod.right.generators[0];
        for s in 0..size {
            d[s * size + s] += 1;
            let moved = term.apply(prod.pair(0, tg), s);
            d[moved * size + s] -= 1;
        }
        let c = PermComplex::new(prod, 0, vec![term.clone(), term], vec![d.clone()]).unwrap();
        let mut mult = Vec::new();
        for i in 0..2u32 {
            mult.push((0..2u32).map(|j| g.mul(i, j)).collect::<Vec<u32>>());
        }
        let json = PermComplexJson {
            g_mult_table: mult,
            t_invariant_factors: vec![2],
            low: 0,
            terms: vec![vec![vec![0]], vec![vec![0]]],
            diffs: vec![{
                let mut triplets = Vec::new();
                for r in 0..size as u32 {
                    for cc in 0..size as u32 {
                        let v = d[r as usize * size + cc as usize];
                        if v != 0 {
                            triplets.push((r, cc, v));
                        }
                    }
                }
                triplets
            }],
        };
        let c2 = PermComplex::from_json(&json).unwrap();
        assert_eq!(c.diffs, c2.diffs);
        let s = serde_json::to_string(&json).unwrap();
        let back: PermComplexJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.low, 0);
    }
}
