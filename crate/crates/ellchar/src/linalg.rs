//! Field-generic dense linear algebra and integer lattice utilities.
//!
//! The field is passed around as a context object (not encoded in the element
//! type), so the same elimination code runs over Q, cyclotomic fields and
//! finite fields.

use num::{One, Signed, Zero};

use crate::Int;

/// Arithmetic context for a field; elements are plain data.
pub trait FieldArith: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

/// Dense matrix over a [`FieldArith`] context, row major.
#[derive(Clone, Debug)]
pub struct Mat<F: FieldArith> {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<F::Elem>,
}

impl<F: FieldArith> Mat<F> {
    pub fn zero(f: &F, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            a: vec![f.zero(); rows * cols],
        }
    }

    pub fn identity(f: &F, n: usize) -> Self {
        let mut m = Mat::zero(f, n, n);
        for i in 0..n {
            m.a[i * n + i] = f.one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &F::Elem {
        &self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.a[i * self.cols + j] = v;
    }

    pub fn mul(&self, f: &F, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.at(i, k);
                if f.is_zero(x) {
                    continue;
                }
                for j in 0..other.cols {
                    let t = f.mul(x, other.at(k, j));
                    out.a[i * other.cols + j] = f.add(&out.a[i * other.cols + j], &t);
                }
            }
        }
        out
    }

    pub fn apply(&self, f: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for j in 0..self.cols {
                    if !f.is_zero(self.at(i, j)) && !f.is_zero(&v[j]) {
                        acc = f.add(&acc, &f.mul(self.at(i, j), &v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, f: &F, other: &Mat<F>) -> Mat<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self
                .a
                .iter()
                .zip(other.a.iter())
                .map(|(x, y)| f.add(x, y))
                .collect(),
        }
    }

    pub fn scale(&self, f: &F, c: &F::Elem) -> Mat<F> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            a: self.a.iter().map(|x| f.mul(x, c)).collect(),
        }
    }

    pub fn trace(&self, f: &F) -> F::Elem {
        assert_eq!(self.rows, self.cols);
        let mut t = f.zero();
        for i in 0..self.rows {
            t = f.add(&t, self.at(i, i));
        }
        t
    }

    pub fn is_zero(&self, f: &F) -> bool {
        self.a.iter().all(|x| f.is_zero(x))
    }

    /// In-place reduction to reduced row echelon form; returns pivot columns.
    pub fn row_echelon(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !f.is_zero(self.at(r, col))) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.a.swap(p * self.cols + j, row * self.cols + j);
                }
            }
            let inv = f.inv(self.at(row, col));
            for j in col..self.cols {
                let v = f.mul(self.at(row, j), &inv);
                self.set(row, j, v);
            }
            for r in 0..self.rows {
                if r != row && !f.is_zero(self.at(r, col)) {
                    let c = self.at(r, col).clone();
                    for j in col..self.cols {
                        let t = f.mul(&c, self.at(row, j));
                        let v = f.sub(self.at(r, j), &t);
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &F) -> usize {
        let mut m = self.clone();
        m.row_echelon(f).len()
    }

    /// A basis of the right kernel, as vectors.
    pub fn kernel_basis(&self, f: &F) -> Vec<Vec<F::Elem>> {
        let mut m = self.clone();
        let pivots = m.row_echelon(f);
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                if pc < free {
                    v[pc] = f.neg(m.at(r, free));
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `self * x = b`; `None` when inconsistent.
    pub fn solve(&self, f: &F, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::zero(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.row_echelon(f);
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    /// Characteristic polynomial by the division-free Berkowitz algorithm;
    /// coefficients constant-first, normalized monic.
    pub fn charpoly(&self, f: &F) -> Vec<F::Elem> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return vec![f.one()];
        }
        let mut c: Vec<F::Elem> = vec![f.neg(&f.one()), self.at(0, 0).clone()];
        for m in 1..n {
            let a_mm = self.at(m, m).clone();
            // powers S, A1*S, ..., A1^(m-1)*S for the leading m x m block A1
            let mut pows: Vec<Vec<F::Elem>> = Vec::with_capacity(m);
            let s: Vec<F::Elem> = (0..m).map(|i| self.at(i, m).clone()).collect();
            pows.push(s);
            for _ in 1..m {
                let last = pows.last().unwrap();
                let mut next = vec![f.zero(); m];
                for i in 0..m {
                    for k in 0..m {
                        if !f.is_zero(self.at(i, k)) && !f.is_zero(&last[k]) {
                            next[i] = f.add(&next[i], &f.mul(self.at(i, k), &last[k]));
                        }
                    }
                }
                pows.push(next);
            }
            let mut t = vec![f.neg(&f.one()), a_mm];
            for p in pows.iter().take(m) {
                let mut dot = f.zero();
                for k in 0..m {
                    if !f.is_zero(self.at(m, k)) && !f.is_zero(&p[k]) {
                        dot = f.add(&dot, &f.mul(self.at(m, k), &p[k]));
                    }
                }
                t.push(dot);
            }
            let mut cn = vec![f.zero(); m + 2];
            for (j, tj) in t.iter().enumerate() {
                if f.is_zero(tj) {
                    continue;
                }
                for (i, ci) in c.iter().enumerate() {
                    if i + j < cn.len() && !f.is_zero(ci) {
                        cn[i + j] = f.add(&cn[i + j], &f.mul(tj, ci));
                    }
                }
            }
            c = cn;
        }
        let mut coeffs: Vec<F::Elem> = c.into_iter().rev().collect();
        let lead = coeffs.last().unwrap().clone();
        if lead != f.one() {
            let li = f.inv(&lead);
            coeffs = coeffs.iter().map(|x| f.mul(x, &li)).collect();
        }
        coeffs
    }
}

/// The rationals as a field context.
#[derive(Clone, Debug)]
pub struct QQ;

impl FieldArith for QQ {
    type Elem = crate::Rat;
    fn zero(&self) -> Self::Elem {
        crate::Rat::zero()
    }
    fn one(&self) -> Self::Elem {
        crate::Rat::one()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a + b
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a - b
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a * b
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        -a
    }
    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        a.recip()
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_zero()
    }
}

/// Smith normal form `U * A * V = D` over the integers, with transforms.
pub struct Snf {
    pub d: Vec<Vec<Int>>,
    pub u: Vec<Vec<Int>>,
    pub v: Vec<Vec<Int>>,
}

pub fn smith_normal_form(a: &[Vec<Int>]) -> Snf {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<Int>> = a.to_vec();
    let mut u: Vec<Vec<Int>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<Int>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect();

    let n = rows.min(cols);
    let mut t = 0;
    while t < n {
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| d[i][j].abs() < d[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&d[i][t], &d[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &q * &d[t][j];
                        d[i][j] -= s;
                    }
                    for j in 0..rows {
                        let s = &q * &u[t][j];
                        u[i][j] -= s;
                    }
                }
                if !d[i][t].is_zero() {
                    d.swap(t, i);
                    u.swap(t, i);
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&d[t][j], &d[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = &q * &d[i][t];
                        d[i][j] -= s;
                    }
                    for i in 0..cols {
                        let s = &q * &v[i][t];
                        v[i][j] -= s;
                    }
                }
                if !d[t][j].is_zero() {
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }

        let mut redo = false;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if (&d[i][j] % &d[t][t]).is_zero() {
                    continue;
                }
                for jj in 0..cols {
                    let s = d[i][jj].clone();
                    d[t][jj] += s;
                }
                for jj in 0..rows {
                    let s = u[i][jj].clone();
                    u[t][jj] += s;
                }
                redo = true;
                break 'scan;
            }
        }
        if redo {
            continue;
        }
        if d[t][t].is_negative() {
            for j in 0..cols {
                d[t][j] = -d[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }
    Snf { d, u, v }
}

fn swap_cols(m: &mut [Vec<Int>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn div_round(a: &Int, b: &Int) -> Int {
    // nearest-integer division keeps entries small
    let (q, r) = num::Integer::div_rem(a, b);
    if r.abs() * Int::from(2) > b.abs() {
        if a.is_negative() == b.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Incremental basis of an integer lattice in `Z^n`, kept in echelon form by
/// leading index. Used to accumulate relation vectors one at a time.
#[derive(Debug)]
pub struct LatticeBasis {
    pub dim: usize,
    rows: Vec<Vec<i128>>,
}

impl LatticeBasis {
    pub fn new(dim: usize) -> Self {
        LatticeBasis {
            dim,
            rows: Vec::new(),
        }
    }

    /// Adds a vector; returns true if the lattice grew.
    pub fn add(&mut self, mut v: Vec<i128>) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut grew = false;
        loop {
            let Some(lead) = v.iter().position(|&x| x != 0) else {
                return grew;
            };
            let idx = self.rows.partition_point(|r| leading(r) < lead);
            if idx == self.rows.len() || leading(&self.rows[idx]) > lead {
                if v[lead] < 0 {
                    for x in v.iter_mut() {
                        *x = -x.clone();
                    }
                }
                self.rows.insert(idx, v);
                return true;
            }
            let old_lead = self.rows[idx][lead];
            if v[lead] % old_lead == 0 {
                let q = v[lead] / old_lead;
                let b = &self.rows[idx];
                for (x, y) in v.iter_mut().zip(b.iter()) {
                    *x -= q * y;
                }
            } else {
                let (g, s, t) = ext_gcd_i128(old_lead, v[lead]);
                let old = self.rows[idx].clone();
                let new_row: Vec<i128> = old
                    .iter()
                    .zip(v.iter())
                    .map(|(&x, &y)| s * x + t * y)
                    .collect();
                let q_old = old[lead] / g;
                let q_v = v[lead] / g;
                let reduced: Vec<i128> = old
                    .iter()
                    .zip(v.iter())
                    .map(|(&x, &y)| q_v * x - q_old * y)
                    .collect();
                self.rows[idx] = new_row;
                grew = true;
                v = reduced;
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Product of leading entries; equals the index `[Z^n : L]` when the
    /// lattice has full rank.
    pub fn index_det(&self) -> Option<i128> {
        if self.rows.len() != self.dim {
            return None;
        }
        let mut det = 1i128;
        for r in &self.rows {
            det = det.checked_mul(r[leading(r)].abs())?;
        }
        Some(det)
    }

    pub fn rows(&self) -> &[Vec<i128>] {
        &self.rows
    }
}

fn leading(v: &[i128]) -> usize {
    v.iter().position(|&x| x != 0).unwrap()
}

fn ext_gcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
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

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    fn int_mat(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect()
    }

    fn mat_mul_int(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
        let n = a.len();
        let m = b[0].len();
        let k = b.len();
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).map(|t| &a[i][t] * &b[t][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn snf_small() {
        let a = int_mat(&[&[2, 1], &[1, 2]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d[0][0].to_i64(), Some(1));
        assert_eq!(s.d[1][1].to_i64(), Some(3));
        let uav = mat_mul_int(&mat_mul_int(&s.u, &a), &s.v);
        assert_eq!(uav, s.d);
    }

    #[test]
    fn snf_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let r = rng.gen_range(1..5usize);
            let c = rng.gen_range(1..5usize);
            let a: Vec<Vec<Int>> = (0..r)
                .map(|_| {
                    (0..c)
                        .map(|_| Int::from(rng.gen_range(-9..=9i64)))
                        .collect()
                })
                .collect();
            let s = smith_normal_form(&a);
            let uav = mat_mul_int(&mat_mul_int(&s.u, &a), &s.v);
            assert_eq!(uav, s.d);
            let diag: Vec<Int> = (0..r.min(c)).map(|i| s.d[i][i].clone()).collect();
            for w in diag.windows(2) {
                if !w[1].is_zero() {
                    assert!(!w[0].is_zero() || w[1].is_zero());
                }
                if !w[0].is_zero() && !w[1].is_zero() {
                    assert!((&w[1] % &w[0]).is_zero(), "chain broken: {diag:?}");
                }
            }
            for (i, row) in s.d.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if i != j {
                        assert!(x.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn qq_solve_and_kernel() {
        let f = QQ;
        let mut m = Mat::zero(&f, 2, 3);
        let q = |x: i64| crate::Rat::from_integer(Int::from(x));
        m.set(0, 0, q(1));
        m.set(0, 1, q(2));
        m.set(0, 2, q(3));
        m.set(1, 0, q(2));
        m.set(1, 1, q(4));
        m.set(1, 2, q(6));
        assert_eq!(m.rank(&f), 1);
        let ker = m.kernel_basis(&f);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(&f, v).iter().all(|x| x.is_zero()));
        }
        let b = vec![q(6), q(12)];
        let x = m.solve(&f, &b).unwrap();
        assert_eq!(m.apply(&f, &x), b);
        assert!(m.solve(&f, &[q(1), q(0)]).is_none());
    }

    #[test]
    fn charpoly_rational() {
        let f = QQ;
        let q = |x: i64| crate::Rat::from_integer(Int::from(x));
        let mut m = Mat::zero(&f, 2, 2);
        m.set(0, 1, q(-1));
        m.set(1, 0, q(1));
        assert_eq!(m.charpoly(&f), vec![q(1), q(0), q(1)]);
        let mut d = Mat::zero(&f, 2, 2);
        d.set(0, 0, q(2));
        d.set(1, 1, q(3));
        assert_eq!(d.charpoly(&f), vec![q(6), q(-5), q(1)]);
        // permutation 3-cycle: x^3 - 1
        let mut p = Mat::zero(&f, 3, 3);
        p.set(1, 0, q(1));
        p.set(2, 1, q(1));
        p.set(0, 2, q(1));
        assert_eq!(p.charpoly(&f), vec![q(-1), q(0), q(0), q(1)]);
    }

    #[test]
    fn lattice_accumulation() {
        let mut l = LatticeBasis::new(2);
        assert!(l.add(vec![2, 0]));
        assert!(l.add(vec![0, 3]));
        assert!(!l.add(vec![2, 3]));
        assert_eq!(l.index_det(), Some(6));
        assert!(l.add(vec![1, 0]));
        assert_eq!(l.index_det(), Some(3));
    }
}
