//! Finite groups with conjugacy data, and Grothendieck-group classes
//! represented as ordinary or Brauer class functions.
//!
//! A class over characteristic zero is a cyclotomic-valued function on all
//! conjugacy classes; a class mod ell is a function on the ell-regular
//! classes. Brauer characters are produced by Teichmueller-lifting the
//! eigenvalues of representing matrices, so equality of classes is exact
//! equality of class functions for both coefficient tags.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloNumber, RootOfUnity};
use crate::fgab::{AbChar, FinAb};
use crate::fields::{FiniteField, Gf};
use crate::linalg::Mat;
use crate::{gcd_u64, lcm_u64, Coeff, Error, Rat, Result};

pub const GROUP_CAP: usize = 10_000;

/// A finite group with a full multiplication table and conjugacy data.
/// Conjugacy classes are ordered by their minimal element index.
pub struct FinGroup {
    pub order: usize,
    mult: Vec<u32>,
    pub inv: Vec<u32>,
    pub identity: u32,
    pub elem_order: Vec<u32>,
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
    pub generators: Vec<u32>,
}

impl std::fmt::Debug for FinGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FinGroup(order {})", self.order)
    }
}

impl FinGroup {
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mult[a as usize * self.order + b as usize]
    }

    pub fn conj(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv[g as usize])
    }

    /// Builds the group from a multiplication table. Verifies a two-sided
    /// identity, inverses, and associativity by Light's test on a greedy
    /// generating set.
    pub fn from_mult_table(mult: Vec<Vec<u32>>) -> Result<Arc<FinGroup>> {
        let n = mult.len();
        if n == 0 || n > GROUP_CAP {
            return Err(Error::CapExceeded(format!("group order {n} out of range")));
        }
        let mut flat = vec![0u32; n * n];
        for (i, row) in mult.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid("multiplication table not square".into()));
            }
            for (j, &v) in row.iter().enumerate() {
                if v as usize >= n {
                    return Err(Error::Invalid("table entry out of range".into()));
                }
                flat[i * n + j] = v;
            }
        }
        finish_group(n, flat)
    }

    /// Builds the closure of a set of permutations of `0..deg`.
    pub fn from_permutations(deg: usize, gens: &[Vec<u32>]) -> Result<Arc<FinGroup>> {
        for g in gens {
            if g.len() != deg || !is_permutation(g) {
                return Err(Error::Invalid("not a permutation".into()));
            }
        }
        let id: Vec<u32> = (0..deg as u32).collect();
        let mut elems: Vec<Vec<u32>> = vec![id.clone()];
        let mut index: HashMap<Vec<u32>, u32> = HashMap::from([(id, 0u32)]);
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                // right-multiply: (x * g)(pt) = g(x(pt))
                let composed: Vec<u32> = elems[i as usize].iter().map(|&x| g[x as usize]).collect();
                if !index.contains_key(&composed) {
                    let id = elems.len() as u32;
                    if elems.len() >= GROUP_CAP {
                        return Err(Error::CapExceeded("permutation closure exceeds cap".into()));
                    }
                    index.insert(composed.clone(), id);
                    elems.push(composed);
                    queue.push_back(id);
                }
            }
        }
        let n = elems.len();
        let mut flat = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let composed: Vec<u32> = elems[b].iter().map(|&x| elems[a][x as usize]).collect();
                flat[a * n + b] = index[&composed];
            }
        }
        finish_group(n, flat)
    }

    /// A finite abelian group as a table group; element `i` is the
    /// mixed-radix element of the same index, so characters evaluate by
    /// index.
    pub fn from_finab(a: &FinAb) -> Result<Arc<FinGroup>> {
        let n = a.order() as usize;
        if n > GROUP_CAP {
            return Err(Error::CapExceeded("abelian group exceeds table cap".into()));
        }
        let mut flat = vec![0u32; n * n];
        let elems: Vec<Vec<i64>> = a.elements().collect();
        for i in 0..n {
            for j in 0..n {
                flat[i * n + j] = a.elem_index(&a.add(&elems[i], &elems[j])) as u32;
            }
        }
        finish_group(n, flat)
    }

    pub fn cyclic(n: u64) -> Arc<FinGroup> {
        FinGroup::from_finab(&FinAb::cyclic(n)).expect("small cyclic group")
    }

    /// Class indices of the ell-regular classes (element order coprime to
    /// ell), in class order.
    pub fn ell_regular_classes(&self, ell: u64) -> Vec<usize> {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, c)| self.elem_order[c[0] as usize] as u64 % ell != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn class_rep(&self, class: usize) -> u32 {
        self.classes[class][0]
    }

    /// Element indices of the subgroup generated by a subset.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut in_set = vec![false; self.order];
        in_set[self.identity as usize] = true;
        let mut list = vec![self.identity];
        let mut queue: Vec<u32> = vec![self.identity];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !in_set[y as usize] {
                    in_set[y as usize] = true;
                    list.push(y);
                    queue.push(y);
                }
            }
        }
        list.sort_unstable();
        list
    }

    /// All subgroups, as sorted element lists, ordered by (order, elements).
    /// Intended for small groups.
    pub fn all_subgroups(self: &Arc<FinGroup>) -> Vec<Vec<u32>> {
        let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
        found.insert(vec![self.identity]);
        let mut worklist: Vec<Vec<u32>> = vec![vec![self.identity]];
        for g in 0..self.order as u32 {
            let c = self.closure(&[g]);
            if found.insert(c.clone()) {
                worklist.push(c);
            }
        }
        while let Some(h) = worklist.pop() {
            if h.len() == self.order {
                continue;
            }
            for g in 0..self.order as u32 {
                if h.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = h.clone();
                gens.push(g);
                let k = self.closure(&gens);
                if found.insert(k.clone()) {
                    worklist.push(k);
                }
            }
        }
        let mut out: Vec<Vec<u32>> = found.into_iter().collect();
        out.sort_by_key(|h| (h.len(), h.clone()));
        out
    }
}

fn is_permutation(g: &[u32]) -> bool {
    let mut seen = vec![false; g.len()];
    g.iter().all(|&x| {
        let ok = (x as usize) < g.len() && !seen[x as usize];
        if ok {
            seen[x as usize] = true;
        }
        ok
    })
}

fn finish_group(n: usize, flat: Vec<u32>) -> Result<Arc<FinGroup>> {
    let mul = |a: u32, b: u32| flat[a as usize * n + b as usize];
    let identity = (0..n as u32)
        .find(|&e| (0..n as u32).all(|x| mul(e, x) == x && mul(x, e) == x))
        .ok_or_else(|| Error::Invalid("no identity element".into()))?;
    let mut inv = vec![u32::MAX; n];
    for a in 0..n as u32 {
        let b = (0..n as u32)
            .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
            .ok_or_else(|| Error::Invalid("missing inverse".into()))?;
        inv[a as usize] = b;
    }
    // greedy generating set
    let mut generators = Vec::new();
    {
        let mut span = vec![false; n];
        span[identity as usize] = true;
        let mut count = 1;
        for cand in 0..n as u32 {
            if span[cand as usize] {
                continue;
            }
            generators.push(cand);
            let mut queue: Vec<u32> = (0..n as u32).filter(|&x| span[x as usize]).collect();
            while let Some(x) = queue.pop() {
                for &g in &generators {
                    for y in [mul(x, g), mul(g, x)] {
                        if !span[y as usize] {
                            span[y as usize] = true;
                            count += 1;
                            queue.push(y);
                        }
                    }
                }
            }
            if count == n {
                break;
            }
        }
        if count != n {
            return Err(Error::Invalid(
                "table is not generated by its elements".into(),
            ));
        }
    }
    // Light's associativity test on the generating set
    for &s in &generators {
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if mul(mul(a, s), b) != mul(a, mul(s, b)) {
                    return Err(Error::Invalid(
                        "multiplication table not associative".into(),
                    ));
                }
            }
        }
    }
    let mut elem_order = vec![0u32; n];
    for a in 0..n as u32 {
        let mut x = a;
        let mut o = 1;
        while x != identity {
            x = mul(x, a);
            o += 1;
        }
        elem_order[a as usize] = o;
    }
    // conjugacy classes, ordered by minimal element
    let mut class_of = vec![u32::MAX; n];
    let mut classes: Vec<Vec<u32>> = Vec::new();
    for x in 0..n as u32 {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let idx = classes.len() as u32;
        let mut cls = Vec::new();
        for g in 0..n as u32 {
            let y = mul(mul(g, x), inv[g as usize]);
            if class_of[y as usize] == u32::MAX {
                class_of[y as usize] = idx;
                cls.push(y);
            }
        }
        cls.sort_unstable();
        classes.push(cls);
    }
    Ok(Arc::new(FinGroup {
        order: n,
        mult: flat,
        inv,
        identity,
        elem_order,
        classes,
        class_of,
        generators,
    }))
}

/// A subgroup together with its own table-group structure.
pub struct Subgroup {
    pub parent: Arc<FinGroup>,
    /// sorted element indices in the parent
    pub elements: Vec<u32>,
    pub group: Arc<FinGroup>,
    from_parent: HashMap<u32, u32>,
}

impl Subgroup {
    pub fn new(parent: &Arc<FinGroup>, elements: Vec<u32>) -> Result<Subgroup> {
        let mut elements = elements;
        elements.sort_unstable();
        elements.dedup();
        let from_parent: HashMap<u32, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as u32))
            .collect();
        let n = elements.len();
        let mut table = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = parent.mul(elements[i], elements[j]);
                let Some(&k) = from_parent.get(&prod) else {
                    return Err(Error::Invalid("subset is not closed".into()));
                };
                table[i][j] = k;
            }
        }
        let group = FinGroup::from_mult_table(table)?;
        Ok(Subgroup {
            parent: parent.clone(),
            elements,
            group,
            from_parent,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.from_parent.contains_key(&e)
    }

    pub fn to_sub(&self, parent_elem: u32) -> Option<u32> {
        self.from_parent.get(&parent_elem).copied()
    }

    /// Left cosets `gH`, each a sorted list, ordered by minimal element.
    pub fn left_cosets(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.parent.order];
        let mut cosets = Vec::new();
        for g in 0..self.parent.order as u32 {
            if seen[g as usize] {
                continue;
            }
            let mut coset: Vec<u32> = self
                .elements
                .iter()
                .map(|&h| self.parent.mul(g, h))
                .collect();
            coset.sort_unstable();
            for &x in &coset {
                seen[x as usize] = true;
            }
            cosets.push(coset);
        }
        cosets
    }
}

/// A Grothendieck-group class as a class function: values on all classes
/// (characteristic zero) or on the ell-regular classes (mod ell).
#[derive(Clone)]
pub struct GClass {
    pub group: Arc<FinGroup>,
    pub coeff: Coeff,
    pub values: Vec<CycloNumber>,
}

impl std::fmt::Debug for GClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GClass[{}; {:?}]", self.coeff, self.values)
    }
}

impl PartialEq for GClass {
    fn eq(&self, other: &Self) -> bool {
        self.group.order == other.group.order
            && self.coeff == other.coeff
            && self.values == other.values
    }
}

impl GClass {
    pub fn zero(group: &Arc<FinGroup>, coeff: Coeff) -> GClass {
        let n = match coeff {
            Coeff::Char0 => group.classes.len(),
            Coeff::ModEll(ell) => group.ell_regular_classes(ell).len(),
        };
        GClass {
            group: group.clone(),
            coeff,
            values: vec![CycloNumber::zero(); n],
        }
    }

    /// The classes this class function is indexed by.
    pub fn class_indices(&self) -> Vec<usize> {
        match self.coeff {
            Coeff::Char0 => (0..self.group.classes.len()).collect(),
            Coeff::ModEll(ell) => self.group.ell_regular_classes(ell),
        }
    }

    /// Value at a group element (must be ell-regular for mod-ell classes).
    pub fn value_at(&self, e: u32) -> Result<&CycloNumber> {
        let cls = self.group.class_of[e as usize] as usize;
        match self.coeff {
            Coeff::Char0 => Ok(&self.values[cls]),
            Coeff::ModEll(ell) => {
                let regs = self.group.ell_regular_classes(ell);
                regs.iter()
                    .position(|&c| c == cls)
                    .map(|i| &self.values[i])
                    .ok_or_else(|| Error::Invalid(format!("element {e} is not {ell}-regular")))
            }
        }
    }

    pub fn dim(&self) -> CycloNumber {
        self.value_at(self.group.identity)
            .expect("identity is regular")
            .clone()
    }

    pub fn add(&self, other: &GClass) -> Result<GClass> {
        if self.coeff != other.coeff {
            return Err(Error::TagMismatch(self.coeff, other.coeff));
        }
        Ok(GClass {
            group: self.group.clone(),
            coeff: self.coeff,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn neg(&self) -> GClass {
        GClass {
            group: self.group.clone(),
            coeff: self.coeff,
            values: self.values.iter().map(|v| v.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &GClass) -> Result<GClass> {
        self.add(&other.neg())
    }

    pub fn scale_int(&self, k: i64) -> GClass {
        GClass {
            group: self.group.clone(),
            coeff: self.coeff,
            values: self.values.iter().map(|v| v.scale_int(k)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Ordinary inner product of characteristic-zero class functions,
    /// computed over classes with their sizes.
    pub fn inner_product(&self, other: &GClass) -> Result<CycloNumber> {
        if self.coeff != Coeff::Char0 || other.coeff != Coeff::Char0 {
            return Err(Error::Invalid(
                "inner product is for ordinary class functions".into(),
            ));
        }
        let mut acc = CycloNumber::zero();
        for (i, cls) in self.group.classes.iter().enumerate() {
            let term = self.values[i].mul(&other.values[i].conjugate());
            acc = acc.add(&term.scale_int(cls.len() as i64));
        }
        Ok(acc.scale(&Rat::new(1.into(), (self.group.order as i64).into())))
    }
}

/// Ordinary character of a permutation action: fixed points per class.
/// `act[e * size + s]` is the action of element `e` on point `s`.
pub fn perm_character(group: &Arc<FinGroup>, size: usize, act: &[u32]) -> GClass {
    let values = group
        .classes
        .iter()
        .map(|cls| {
            let g = cls[0] as usize;
            let fixed = (0..size).filter(|&s| act[g * size + s] == s as u32).count();
            CycloNumber::from_int(fixed as i64)
        })
        .collect();
    GClass {
        group: group.clone(),
        coeff: Coeff::Char0,
        values,
    }
}

/// The permutation action of a group on the left cosets of a subgroup.
pub fn coset_action(sub: &Subgroup) -> (usize, Vec<u32>) {
    let cosets = sub.left_cosets();
    let size = cosets.len();
    let n = sub.parent.order;
    let mut coset_of = vec![0u32; n];
    for (i, c) in cosets.iter().enumerate() {
        for &x in c {
            coset_of[x as usize] = i as u32;
        }
    }
    let mut act = vec![0u32; n * size];
    for e in 0..n as u32 {
        for (s, c) in cosets.iter().enumerate() {
            act[e as usize * size + s] = coset_of[sub.parent.mul(e, c[0]) as usize];
        }
    }
    (size, act)
}

/// A one-dimensional ordinary class on an abelian table group built from
/// [`FinGroup::from_finab`], evaluated through the matching [`AbChar`].
pub fn abelian_character(group: &Arc<FinGroup>, a: &FinAb, chi: &AbChar) -> GClass {
    let values = group
        .classes
        .iter()
        .map(|cls| {
            let e = cls[0] as u64;
            CycloNumber::from_root(&chi.eval(&a.elem_at(e)))
        })
        .collect();
    GClass {
        group: group.clone(),
        coeff: Coeff::Char0,
        values,
    }
}

/// All one-dimensional ordinary classes of an abelian table group, found
/// through its black-box structure; empty for nonabelian groups.
pub fn blackbox_abelian_chars(group: &Arc<FinGroup>) -> Result<Vec<GClass>> {
    for a in 0..group.order as u32 {
        for b in a + 1..group.order as u32 {
            if group.mul(a, b) != group.mul(b, a) {
                return Ok(Vec::new());
            }
        }
    }
    let s = crate::fgab::blackbox_structure(group.order, group.identity, |a, b| group.mul(a, b))?;
    let chars = crate::fgab::dual_enumerate(&s.group)?;
    Ok(chars
        .iter()
        .map(|chi| GClass {
            group: group.clone(),
            coeff: Coeff::Char0,
            values: group
                .classes
                .iter()
                .map(|cls| CycloNumber::from_root(&chi.eval(&s.coords[cls[0] as usize])))
                .collect(),
        })
        .collect())
}

/// Restriction of an ordinary class function to the ell-regular classes:
/// the decomposition map on Grothendieck groups.
pub fn decomposition_map(x: &GClass, ell: u64) -> Result<GClass> {
    if x.coeff != Coeff::Char0 {
        return Err(Error::Invalid(
            "decomposition map takes an ordinary class".into(),
        ));
    }
    let regs = x.group.ell_regular_classes(ell);
    Ok(GClass {
        group: x.group.clone(),
        coeff: Coeff::ModEll(ell),
        values: regs.iter().map(|&c| x.values[c].clone()).collect(),
    })
}

/// Induction of class functions from a subgroup:
/// `Ind x(g) = (1/|H|) sum over y in G with y^-1 g y in H of x(y^-1 g y)`.
/// The same formula applies verbatim on ell-regular classes.
pub fn induce(sub: &Subgroup, x: &GClass) -> Result<GClass> {
    if !Arc::ptr_eq(&x.group, &sub.group) {
        return Err(Error::Invalid("class is not on the given subgroup".into()));
    }
    let parent = &sub.parent;
    let h_order = sub.order() as i64;
    let class_list: Vec<usize> = match x.coeff {
        Coeff::Char0 => (0..parent.classes.len()).collect(),
        Coeff::ModEll(ell) => parent.ell_regular_classes(ell),
    };
    let mut values = Vec::with_capacity(class_list.len());
    for &c in &class_list {
        let g = parent.class_rep(c);
        let mut acc = CycloNumber::zero();
        for y in 0..parent.order as u32 {
            let conj = parent.mul(parent.mul(parent.inv[y as usize], g), y);
            if let Some(hs) = sub.to_sub(conj) {
                acc = acc.add(x.value_at(hs)?);
            }
        }
        values.push(acc.scale(&Rat::new(1.into(), h_order.into())));
    }
    Ok(GClass {
        group: parent.clone(),
        coeff: x.coeff,
        values,
    })
}

/// Brauer character of a module given by matrices for the group generators
/// over a canonical field of characteristic ell: for each ell-regular class,
/// the sum of Teichmueller lifts of the eigenvalues of the representing
/// matrix. Verifies the generator relations before evaluating.
pub fn brauer_character(
    group: &Arc<FinGroup>,
    field: &Arc<FiniteField>,
    gen_mats: &[Mat<Gf>],
) -> Result<GClass> {
    let ell = field.p();
    if gen_mats.len() != group.generators.len() {
        return Err(Error::RelationCheck(format!(
            "expected {} generator matrices",
            group.generators.len()
        )));
    }
    let gf = Gf {
        field: field.clone(),
    };
    let dim = gen_mats.first().map(|m| m.rows).unwrap_or(0);
    for m in gen_mats {
        if m.rows != dim || m.cols != dim {
            return Err(Error::RelationCheck(
                "matrices must be square of equal size".into(),
            ));
        }
    }

    // materialize rho on every element by BFS from the identity
    let mut rho: Vec<Option<Mat<Gf>>> = vec![None; group.order];
    rho[group.identity as usize] = Some(Mat::identity(&gf, dim));
    let mut queue = std::collections::VecDeque::from([group.identity]);
    while let Some(x) = queue.pop_front() {
        let mx = rho[x as usize].clone().unwrap();
        for (j, &g) in group.generators.iter().enumerate() {
            let y = group.mul(x, g);
            if rho[y as usize].is_none() {
                rho[y as usize] = Some(mx.mul(&gf, &gen_mats[j]));
                queue.push_back(y);
            }
        }
    }
    // relation check: rho(x * g) = rho(x) rho(g) for every x and generator g
    for x in 0..group.order as u32 {
        let mx = rho[x as usize].as_ref().unwrap();
        for (j, &g) in group.generators.iter().enumerate() {
            let y = group.mul(x, g);
            let prod = mx.mul(&gf, &gen_mats[j]);
            if prod.a != rho[y as usize].as_ref().unwrap().a {
                return Err(Error::RelationCheck(format!(
                    "rho({x} * g{j}) != rho({x}) rho(g{j})"
                )));
            }
        }
    }

    let regs = group.ell_regular_classes(ell);
    let mut values = Vec::with_capacity(regs.len());
    for &c in &regs {
        let g = group.class_rep(c);
        let m = rho[g as usize].as_ref().unwrap();
        values.push(brauer_value(field, m, group.elem_order[g as usize] as u64)?);
    }
    Ok(GClass {
        group: group.clone(),
        coeff: Coeff::ModEll(ell),
        values,
    })
}

/// Sum of Teichmueller lifts of the eigenvalues of a matrix whose
/// multiplicative order divides `o` (coprime to the characteristic): works
/// in an extension containing the o-th roots of unity and reads off
/// multiplicities from the characteristic polynomial.
pub fn brauer_value(field: &Arc<FiniteField>, m: &Mat<Gf>, o: u64) -> Result<CycloNumber> {
    let ell = field.p();
    debug_assert!(gcd_u64(o, ell) == 1, "order must be ell-regular");
    if m.rows == 0 {
        return Ok(CycloNumber::zero());
    }
    if !field.is_canonical() {
        return Err(Error::Invalid(
            "Brauer lifting needs a canonical (default-modulus) field".into(),
        ));
    }
    // splitting field: lcm of the base degree with ord_o(ell)
    let mut d = 1u64;
    if o > 1 {
        let mut pw = ell % o;
        d = 1;
        while pw != 1 {
            pw = pw * ell % o;
            d += 1;
        }
    }
    let k_big = lcm_u64(field.degree() as u64, d) as usize;
    let big = if k_big == field.degree() {
        field.clone()
    } else {
        FiniteField::new(ell, k_big, None)?
    };

    let gf = Gf {
        field: field.clone(),
    };
    let cp = m.charpoly(&gf);
    let mut coeffs: Vec<crate::fields::FFElem> = Vec::with_capacity(cp.len());
    for c in &cp {
        coeffs.push(field.embed(c, &big)?);
    }

    // multiplicities of each o-th root of unity by synthetic division
    let step = (big.size() - 1) / o;
    let mut total = 0usize;
    let mut value = CycloNumber::zero();
    for j in 0..o {
        let omega = big.pow(&big.generator(), (j * step) as u128);
        let mut mult = 0usize;
        let mut poly = coeffs.clone();
        loop {
            let mut acc = big.zero();
            for c in poly.iter().rev() {
                acc = big.add(&big.mul(&acc, &omega), c);
            }
            if !big.is_zero(&acc) || poly.len() <= 1 {
                break;
            }
            // synthetic division by (x - omega)
            let mut quo = vec![big.zero(); poly.len() - 1];
            let mut carry = big.zero();
            for i in (1..poly.len()).rev() {
                carry = big.add(&poly[i], &big.mul(&carry, &omega));
                quo[i - 1] = carry.clone();
            }
            poly = quo;
            mult += 1;
        }
        if mult > 0 {
            total += mult;
            let root = RootOfUnity::new(j as i64, o);
            value = value.add(&CycloNumber::from_root(&root).scale_int(mult as i64));
        }
    }
    if total != m.rows {
        return Err(Error::Invalid(format!(
            "eigenvalues did not split: found {total} of {}",
            m.rows
        )));
    }
    Ok(value)
}

/// A product `G x T` with `T` abelian; the full group is the table product
/// with element id `g * |T| + t`.
pub struct ProductGroup {
    pub left: Arc<FinGroup>,
    pub right_ab: FinAb,
    pub right: Arc<FinGroup>,
    pub full: Arc<FinGroup>,
}

impl ProductGroup {
    pub fn new(left: &Arc<FinGroup>, right_ab: &FinAb) -> Result<ProductGroup> {
        let right = FinGroup::from_finab(right_ab)?;
        let n1 = left.order;
        let n2 = right.order;
        if n1 * n2 > GROUP_CAP {
            return Err(Error::CapExceeded("product group exceeds cap".into()));
        }
        let n = n1 * n2;
        let mut flat = vec![0u32; n * n];
        for a1 in 0..n1 as u32 {
            for a2 in 0..n2 as u32 {
                let a = a1 * n2 as u32 + a2;
                for b1 in 0..n1 as u32 {
                    let c1 = left.mul(a1, b1);
                    for b2 in 0..n2 as u32 {
                        let b = b1 * n2 as u32 + b2;
                        let c = c1 * n2 as u32 + right.mul(a2, b2);
                        flat[a as usize * n + b as usize] = c;
                    }
                }
            }
        }
        let full = finish_group(n, flat)?;
        Ok(ProductGroup {
            left: left.clone(),
            right_ab: right_ab.clone(),
            right,
            full,
        })
    }

    pub fn pair(&self, g: u32, t: u32) -> u32 {
        g * self.right.order as u32 + t
    }

    pub fn split(&self, e: u32) -> (u32, u32) {
        (e / self.right.order as u32, e % self.right.order as u32)
    }

    /// External product of an ordinary class on the left factor with a
    /// character of the right factor.
    pub fn external_product(&self, x: &GClass, chi: &AbChar) -> GClass {
        assert!(Arc::ptr_eq(&x.group, &self.left));
        let values = self
            .full
            .classes
            .iter()
            .map(|cls| {
                let (g, t) = self.split(cls[0]);
                let xv = x.values[self.left.class_of[g as usize] as usize].clone();
                xv.mul(&CycloNumber::from_root(
                    &chi.eval(&self.right_ab.elem_at(t as u64)),
                ))
            })
            .collect();
        GClass {
            group: self.full.clone(),
            coeff: Coeff::Char0,
            values,
        }
    }
}

/// Naive isotypic projection of a class on `G x T` onto a character of the
/// abelian factor: over characteristic zero,
/// `value(c) = (1/|T|) sum_t M(c, t) psi(t)^-1`; mod ell the sum runs over
/// the prime-to-ell part `T_(ell')` with its size, and `psi` must have
/// prime-to-ell order.
pub fn naive_isotypic(prod: &ProductGroup, m: &GClass, psi: &AbChar) -> Result<GClass> {
    if !Arc::ptr_eq(&m.group, &prod.full) {
        return Err(Error::Invalid("class is not on the product group".into()));
    }
    let t_order = prod.right_ab.order();
    match m.coeff {
        Coeff::Char0 => {
            let mut values = Vec::with_capacity(prod.left.classes.len());
            for gcls in 0..prod.left.classes.len() {
                let g = prod.left.class_rep(gcls);
                let mut acc = CycloNumber::zero();
                for t in 0..t_order {
                    let e = prod.pair(g, t as u32);
                    let mv = m.value_at(e)?;
                    let tw = psi.eval(&prod.right_ab.elem_at(t)).neg();
                    acc = acc.add(&mv.mul(&CycloNumber::from_root(&tw)));
                }
                values.push(acc.scale(&Rat::new(1.into(), (t_order as i64).into())));
            }
            Ok(GClass {
                group: prod.left.clone(),
                coeff: Coeff::Char0,
                values,
            })
        }
        Coeff::ModEll(ell) => {
            if psi.order() % ell == 0 {
                return Err(Error::Invalid(format!(
                    "isotypic character must have prime-to-{ell} order"
                )));
            }
            let regular_t: Vec<u64> = (0..t_order)
                .filter(|&t| prod.right_ab.elem_order(&prod.right_ab.elem_at(t)) % ell != 0)
                .collect();
            let regs = prod.left.ell_regular_classes(ell);
            let mut values = Vec::with_capacity(regs.len());
            for &gcls in &regs {
                let g = prod.left.class_rep(gcls);
                let mut acc = CycloNumber::zero();
                for &t in &regular_t {
                    let e = prod.pair(g, t as u32);
                    let mv = m.value_at(e)?;
                    let tw = psi.eval(&prod.right_ab.elem_at(t)).neg();
                    acc = acc.add(&mv.mul(&CycloNumber::from_root(&tw)));
                }
                values.push(acc.scale(&Rat::new(1.into(), (regular_t.len() as i64).into())));
            }
            Ok(GClass {
                group: prod.left.clone(),
                coeff: Coeff::ModEll(ell),
                values,
            })
        }
    }
}

/// `GL_n` over the truncated ring `F_q[pi]/(pi^h)` as a table group.
/// A matrix is invertible iff its reduction mod `pi` is.
pub fn gl_truncated(q: u64, n: usize, h: usize) -> Result<Arc<FinGroup>> {
    let (p, e) =
        crate::prime_power(q).ok_or_else(|| Error::Invalid(format!("{q} is not a prime power")))?;
    let field = FiniteField::new(p, e as usize, None)?;
    let ring_size = q.pow(h as u32);
    let entries = n * n;
    let total = (0..entries).try_fold(1u64, |acc, _| acc.checked_mul(ring_size));
    let Some(total) = total else {
        return Err(Error::CapExceeded("matrix space too large".into()));
    };
    if total > 100_000_000 {
        return Err(Error::CapExceeded("matrix space too large".into()));
    }

    let ring_mul = |a: u64, b: u64| -> u64 {
        let da: Vec<u64> = (0..h)
            .scan(a, |s, _| {
                let d = *s % q;
                *s /= q;
                Some(d)
            })
            .collect();
        let db: Vec<u64> = (0..h)
            .scan(b, |s, _| {
                let d = *s % q;
                *s /= q;
                Some(d)
            })
            .collect();
        let mut out = vec![field.zero(); h];
        for i in 0..h {
            for j in 0..h - i {
                let prod = field.mul(&field.from_key(da[i]), &field.from_key(db[j]));
                out[i + j] = field.add(&out[i + j], &prod);
            }
        }
        out.iter().rev().fold(0u64, |acc, c| acc * q + c.key(p))
    };
    let ring_add = |a: u64, b: u64| -> u64 {
        let mut out = 0u64;
        let (mut a, mut b) = (a, b);
        let mut mulp = 1u64;
        for _ in 0..h {
            let s = field.add(&field.from_key(a % q), &field.from_key(b % q));
            out += s.key(p) * mulp;
            a /= q;
            b /= q;
            mulp *= q;
        }
        out
    };

    let decode = |mut m: u64| -> Vec<u64> {
        (0..entries)
            .map(|_| {
                let v = m % ring_size;
                m /= ring_size;
                v
            })
            .collect()
    };

    // invertibility: the mod-pi reduction has full rank over F_q
    let det_unit = |mat: &[u64]| -> bool {
        let mut red: Vec<crate::fields::FFElem> =
            mat.iter().map(|&v| field.from_key(v % q)).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| !field.is_zero(&red[r * n + col])) else {
                return false;
            };
            for c in 0..n {
                red.swap(pivot * n + c, rank * n + c);
            }
            let inv = field.inv(&red[rank * n + col]);
            for r in 0..n {
                if r != rank && !field.is_zero(&red[r * n + col]) {
                    let f = field.mul(&red[r * n + col], &inv);
                    for c in 0..n {
                        let s = field.mul(&f, &red[rank * n + c]);
                        red[r * n + c] = field.sub(&red[r * n + c], &s);
                    }
                }
            }
            rank += 1;
        }
        true
    };

    let mut elems: Vec<Vec<u64>> = Vec::new();
    let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
    for key in 0..total {
        let mat = decode(key);
        if det_unit(&mat) {
            if elems.len() >= GROUP_CAP {
                return Err(Error::CapExceeded("group order exceeds cap".into()));
            }
            index.insert(mat.clone(), elems.len() as u32);
            elems.push(mat);
        }
    }
    let order = elems.len();
    let mut flat = vec![0u32; order * order];
    for a in 0..order {
        for b in 0..order {
            let mut prod = vec![0u64; entries];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc = ring_add(acc, ring_mul(elems[a][i * n + k], elems[b][k * n + j]));
                    }
                    prod[i * n + j] = acc;
                }
            }
            flat[a * order + b] = index[&prod];
        }
    }
    finish_group(order, flat)
}

/// The symmetric group S_3 as a permutation group.
pub fn symmetric_3() -> Arc<FinGroup> {
    FinGroup::from_permutations(3, &[vec![1, 2, 0], vec![1, 0, 2]]).unwrap()
}

/// JSON shape of a finite group (multiplication table form).
#[derive(Serialize, Deserialize)]
pub struct FinGroupJson {
    pub mult_table: Vec<Vec<u32>>,
}

/// JSON shape of a class function.
#[derive(Serialize, Deserialize)]
pub struct GClassJson {
    pub tag: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    pub values: Vec<CycloNumber>,
}

impl GClass {
    pub fn to_json(&self) -> GClassJson {
        GClassJson {
            tag: match self.coeff {
                Coeff::Char0 => "char0".into(),
                Coeff::ModEll(_) => "mod-ell".into(),
            },
            ell: self.coeff.ell(),
            values: self.values.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_structure() {
        let g = symmetric_3();
        assert_eq!(g.order, 6);
        assert_eq!(g.classes.len(), 3);
        let mut sizes: Vec<usize> = g.classes.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        assert_eq!(g.ell_regular_classes(2).len(), 2);
        assert_eq!(g.ell_regular_classes(3).len(), 2);
    }

    #[test]
    fn gl_truncated_orders() {
        assert_eq!(gl_truncated(2, 2, 1).unwrap().order, 6);
        assert_eq!(gl_truncated(3, 1, 1).unwrap().order, 2);
        // |GL_2(F_2)| * 2^4 by counting the congruence kernel
        assert_eq!(gl_truncated(2, 2, 2).unwrap().order, 96);
        assert_eq!(gl_truncated(3, 2, 1).unwrap().order, 48);
    }

    #[test]
    fn subgroup_enumeration() {
        let s3 = symmetric_3();
        let subs = s3.all_subgroups();
        assert_eq!(subs.len(), 6);
        let s4 = FinGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]]).unwrap();
        assert_eq!(s4.order, 24);
        assert_eq!(s4.all_subgroups().len(), 30);
    }

    #[test]
    fn induction_from_trivial_is_regular() {
        let z2 = FinGroup::cyclic(2);
        let triv = Subgroup::new(&z2, vec![z2.identity]).unwrap();
        let x = GClass {
            group: triv.group.clone(),
            coeff: Coeff::Char0,
            values: vec![CycloNumber::one()],
        };
        let ind = induce(&triv, &x).unwrap();
        let id_cls = z2.class_of[z2.identity as usize] as usize;
        assert_eq!(ind.values[id_cls], CycloNumber::from_int(2));
        assert!(ind.values[1 - id_cls].is_zero());
    }

    #[test]
    fn induction_to_s3() {
        // Ind_{Z/3}^{S_3} of a nontrivial character is the 2-dimensional
        // irreducible; oracle: the character table of S_3 computed from the
        // multiplication table
        let s3 = symmetric_3();
        let three_elt = (0..6u32)
            .find(|&x| s3.elem_order[x as usize] == 3)
            .unwrap();
        let sub = Subgroup::new(&s3, s3.closure(&[three_elt])).unwrap();
        assert_eq!(sub.order(), 3);
        let gen = (0..3u32)
            .find(|&y| sub.group.elem_order[y as usize] == 3)
            .unwrap();
        let chi_vals: Vec<CycloNumber> = sub
            .group
            .classes
            .iter()
            .map(|cls| {
                let e = cls[0];
                let mut x = sub.group.identity;
                let mut d = 0;
                while x != e {
                    x = sub.group.mul(x, gen);
                    d += 1;
                }
                CycloNumber::from_root(&RootOfUnity::new(d, 3))
            })
            .collect();
        let chi = GClass {
            group: sub.group.clone(),
            coeff: Coeff::Char0,
            values: chi_vals,
        };
        let ind = induce(&sub, &chi).unwrap();
        assert_eq!(ind.dim(), CycloNumber::from_int(2));
        for (i, cls) in s3.classes.iter().enumerate() {
            let o = s3.elem_order[cls[0] as usize];
            let v = &ind.values[i];
            match o {
                1 => assert_eq!(*v, CycloNumber::from_int(2)),
                2 => assert!(v.is_zero()),
                3 => assert_eq!(*v, CycloNumber::from_int(-1)),
                _ => unreachable!(),
            }
        }
        assert_eq!(ind.inner_product(&ind).unwrap(), CycloNumber::one());
        // dimension multiplies by the index
        let triv = GClass {
            group: sub.group.clone(),
            coeff: Coeff::Char0,
            values: vec![CycloNumber::one(); sub.group.classes.len()],
        };
        assert_eq!(induce(&sub, &triv).unwrap().dim(), CycloNumber::from_int(2));
    }

    #[test]
    fn decomposition_map_preserves_dimension() {
        let s3 = symmetric_3();
        let sub = Subgroup::new(&s3, vec![s3.identity]).unwrap();
        let (size, act) = coset_action(&sub);
        let reg = perm_character(&s3, size, &act);
        assert_eq!(reg.dim(), CycloNumber::from_int(6));
        let red = decomposition_map(&reg, 3).unwrap();
        assert_eq!(red.dim(), CycloNumber::from_int(6));
        let red5 = decomposition_map(&reg, 5).unwrap();
        assert_eq!(red5.values.len(), s3.classes.len());
    }

    #[test]
    fn brauer_character_of_regular_module() {
        // regular module of Z/3 over F_3: the only 3-regular class is {e},
        // value 3 (the dimension)
        let z3 = FinGroup::cyclic(3);
        let f3 = FiniteField::new(3, 1, None).unwrap();
        let gf = Gf { field: f3.clone() };
        let g = z3.generators[0];
        let mut m = Mat::zero(&gf, 3, 3);
        for x in 0..3u32 {
            m.set(z3.mul(g, x) as usize, x as usize, f3.one());
        }
        let b = brauer_character(&z3, &f3, &[m]).unwrap();
        assert_eq!(b.values.len(), 1);
        assert_eq!(b.dim(), CycloNumber::from_int(3));
    }

    #[test]
    fn brauer_character_of_z4_regular_mod_5() {
        // F_5[Z/4] at the generator: eigenvalues are the four 4th roots of
        // unity, whose Teichmueller lifts sum to zero
        let z4 = FinGroup::cyclic(4);
        let f5 = FiniteField::new(5, 1, None).unwrap();
        let gf = Gf { field: f5.clone() };
        let g = z4.generators[0];
        let mut m = Mat::zero(&gf, 4, 4);
        for x in 0..4u32 {
            m.set(z4.mul(g, x) as usize, x as usize, f5.one());
        }
        let b = brauer_character(&z4, &f5, &[m]).unwrap();
        assert!(b.value_at(g).unwrap().is_zero());
        assert_eq!(b.dim(), CycloNumber::from_int(4));
    }

    #[test]
    fn brauer_rejects_non_representations() {
        let z3 = FinGroup::cyclic(3);
        let f2 = FiniteField::new(2, 1, None).unwrap();
        let gf = Gf { field: f2.clone() };
        // an order-2 matrix cannot represent the order-3 generator
        let mut m = Mat::identity(&gf, 2);
        m.set(0, 1, f2.one());
        assert!(brauer_character(&z3, &f2, &[m]).is_err());
    }

    #[test]
    fn naive_isotypic_regular_f3() {
        // [F_3[T]] with T = Z/3, ell = 3, psi trivial -> 3 * [trivial]
        let trivial_g = FinGroup::cyclic(1);
        let t = FinAb::cyclic(3);
        let prod = ProductGroup::new(&trivial_g, &t).unwrap();
        let mut values = Vec::new();
        for cls in prod.full.classes.iter() {
            let (_, te) = prod.split(cls[0]);
            values.push(if te == prod.right.identity {
                CycloNumber::from_int(3)
            } else {
                CycloNumber::zero()
            });
        }
        let m = GClass {
            group: prod.full.clone(),
            coeff: Coeff::Char0,
            values,
        };
        let m_red = decomposition_map(&m, 3).unwrap();
        let psi = AbChar::trivial(&t);
        let proj = naive_isotypic(&prod, &m_red, &psi).unwrap();
        assert_eq!(proj.dim(), CycloNumber::from_int(3));
    }

    #[test]
    fn naive_isotypic_fourier_orthogonality() {
        // char0 regular class of T with G trivial: every psi picks out 1
        let trivial_g = FinGroup::cyclic(1);
        let t = FinAb::cyclic(4);
        let prod = ProductGroup::new(&trivial_g, &t).unwrap();
        let mut values = Vec::new();
        for cls in prod.full.classes.iter() {
            let (_, te) = prod.split(cls[0]);
            values.push(if te == prod.right.identity {
                CycloNumber::from_int(4)
            } else {
                CycloNumber::zero()
            });
        }
        let m = GClass {
            group: prod.full.clone(),
            coeff: Coeff::Char0,
            values,
        };
        for psi in crate::fgab::dual_enumerate(&t).unwrap() {
            let proj = naive_isotypic(&prod, &m, &psi).unwrap();
            assert_eq!(proj.dim(), CycloNumber::one());
        }
    }

    #[test]
    fn naive_isotypic_is_additive() {
        let g = FinGroup::cyclic(2);
        let t = FinAb::cyclic(3);
        let prod = ProductGroup::new(&g, &t).unwrap();
        let sub = Subgroup::new(&prod.full, vec![prod.full.identity]).unwrap();
        let (size, act) = coset_action(&sub);
        let reg = perm_character(&prod.full, size, &act);
        let psi = crate::fgab::dual_enumerate(&t).unwrap()[1].clone();
        let a = naive_isotypic(&prod, &reg, &psi).unwrap();
        let double = naive_isotypic(&prod, &reg.scale_int(2), &psi).unwrap();
        assert_eq!(a.scale_int(2), double);
    }
}
