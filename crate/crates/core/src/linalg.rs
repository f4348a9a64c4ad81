//! Exact dense linear algebra over Euclidean rings and fields.
//!
//! Smith normal form drives every integral computation: ranks, elementary
//! divisors, saturated kernels and coordinate solves. Nothing in here touches
//! floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::{EuclideanRing, Field, Ring};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Ring> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix from column vectors of a common length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<S>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| S::from_i64(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (jj, j) in range.clone().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add_ref(&a.mul_ref(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t.add_ref(&self[(i, i)]);
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &S) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[source * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let delta = s.mul_ref(factor);
            let t = &mut self.data[target * self.cols + j];
            *t = t.add_ref(&delta);
        }
    }

    /// col[target] += factor * col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &S) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + source];
            if s.is_zero() {
                continue;
            }
            let delta = s.mul_ref(factor);
            let t = &mut self.data[i * self.cols + target];
            *t = t.add_ref(&delta);
        }
    }

    fn scale_row(&mut self, i: usize, factor: &S) {
        for j in 0..self.cols {
            let v = &mut self.data[i * self.cols + j];
            *v = v.mul_ref(factor);
        }
    }

    fn scale_col(&mut self, j: usize, factor: &S) {
        for i in 0..self.rows {
            let v = &mut self.data[i * self.cols + j];
            *v = v.mul_ref(factor);
        }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Ring> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        let v: &mut S = &mut out[(i, j)];
                        *v = v.add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        out
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Result of [`smith_normal_form`]: `u * a * v == d`.
#[derive(Clone, Debug)]
pub struct Smith<S> {
    pub u: Matrix<S>,
    pub d: Matrix<S>,
    pub v: Matrix<S>,
    pub rank: usize,
}

impl<S: Ring> Smith<S> {
    /// Nonzero diagonal entries `d_1 | d_2 | ...`.
    pub fn diagonal(&self) -> Vec<S> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

fn smallest_pivot<S: EuclideanRing>(
    a: &Matrix<S>,
    rows: impl Iterator<Item = usize> + Clone,
    cols: impl Iterator<Item = usize> + Clone,
) -> Option<(usize, usize)> {
    // ties broken by row-major position
    let mut best: Option<(usize, usize)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if x.size_cmp(&a[(bi, bj)]) != Ordering::Less => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Smith normal form with optional transforms. Pivot rule: the nonzero
/// entry of smallest size in the active submatrix, ties broken row-major.
fn smith_impl<S: EuclideanRing>(a: &Matrix<S>, track: bool) -> Smith<S> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = if track { Matrix::identity(m) } else { Matrix::zeros(0, 0) };
    let mut v = if track { Matrix::identity(n) } else { Matrix::zeros(0, 0) };
    let mut rank = 0;

    for t in 0..m.min(n) {
        let Some((pi, pj)) = smallest_pivot(&d, t..m, t..n) else { break };
        d.swap_rows(t, pi);
        d.swap_cols(t, pj);
        if track {
            u.swap_rows(t, pi);
            v.swap_cols(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (q, r) = d[(i, t)].div_rem_euclid(&d[(t, t)]);
                let neg_q = -q;
                d.add_row_multiple(i, t, &neg_q);
                if track {
                    u.add_row_multiple(i, t, &neg_q);
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (q, r) = d[(t, j)].div_rem_euclid(&d[(t, t)]);
                let neg_q = -q;
                d.add_col_multiple(j, t, &neg_q);
                if track {
                    v.add_col_multiple(j, t, &neg_q);
                }
                if !r.is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // move the smallest remainder in the pivot cross onto the diagonal
                let cross_rows = smallest_pivot(&d, t..m, t..t + 1);
                let cross_cols = smallest_pivot(&d, t..t + 1, t..n);
                let pick = match (cross_rows, cross_cols) {
                    (Some(r), Some(c)) => {
                        if d[c].size_cmp(&d[r]) == Ordering::Less {
                            c
                        } else {
                            r
                        }
                    }
                    (Some(r), None) => r,
                    (None, Some(c)) => c,
                    (None, None) => unreachable!("pivot vanished"),
                };
                d.swap_rows(t, pick.0);
                d.swap_cols(t, pick.1);
                if track {
                    u.swap_rows(t, pick.0);
                    v.swap_cols(t, pick.1);
                }
                continue;
            }
            // divisibility of the trailing block
            let mut offending = None;
            'scan: for i in t + 1..m {
                for j in t + 1..n {
                    if !d[(t, t)].divides(&d[(i, j)]) {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => {
                    let one = S::one();
                    d.add_row_multiple(t, i, &one);
                    if track {
                        u.add_row_multiple(t, i, &one);
                    }
                }
                None => break,
            }
        }
        let unit = d[(t, t)].normalizing_unit();
        if !unit.is_one() {
            d.scale_row(t, &unit);
            if track {
                u.scale_row(t, &unit);
            }
        }
        rank += 1;
    }
    Smith { u, d, v, rank }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and
/// `d_1 | d_2 | ...` on the diagonal in canonical (non-negative) form.
pub fn smith_normal_form<S: EuclideanRing>(a: &Matrix<S>) -> Smith<S> {
    smith_impl(a, true)
}

/// Rank and the nonzero elementary divisors; units are dropped when
/// `drop_units` is set.
pub fn rank_and_elementary_divisors<S: EuclideanRing>(
    a: &Matrix<S>,
    drop_units: bool,
) -> (usize, Vec<S>) {
    let s = smith_impl(a, false);
    let divs = s.diagonal().into_iter().filter(|x| !(drop_units && x.is_unit())).collect();
    (s.rank, divs)
}

pub fn rank<S: EuclideanRing>(a: &Matrix<S>) -> usize {
    smith_impl(a, false).rank
}

/// Column echelon form by unimodular column operations: returns `(e, v)`
/// with `a * v = e`, the first `r` columns of `e` in echelon form and the
/// remaining columns zero.
pub fn column_echelon<S: EuclideanRing>(a: &Matrix<S>) -> (Matrix<S>, Matrix<S>, usize) {
    let (m, n) = (a.rows, a.cols);
    let mut e = a.clone();
    let mut v = Matrix::identity(n);
    let mut c = 0;
    for i in 0..m {
        if c == n {
            break;
        }
        loop {
            // smallest nonzero entry of row i among active columns
            let mut best: Option<usize> = None;
            for j in c..n {
                if e[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if e[(i, j)].size_cmp(&e[(i, b)]) != Ordering::Less => {}
                    _ => best = Some(j),
                }
            }
            let Some(b) = best else { break };
            e.swap_cols(c, b);
            v.swap_cols(c, b);
            let mut done = true;
            for j in c + 1..n {
                if e[(i, j)].is_zero() {
                    continue;
                }
                let (q, r) = e[(i, j)].div_rem_euclid(&e[(i, c)]);
                let neg_q = -q;
                e.add_col_multiple(j, c, &neg_q);
                v.add_col_multiple(j, c, &neg_q);
                if !r.is_zero() {
                    done = false;
                }
            }
            if done {
                let unit = e[(i, c)].normalizing_unit();
                if !unit.is_one() {
                    e.scale_col(c, &unit);
                    v.scale_col(c, &unit);
                }
                c += 1;
                break;
            }
        }
    }
    (e, v, c)
}

/// A saturated basis of `{x : a x = 0}`, one basis vector per column.
pub fn integer_kernel_basis<S: EuclideanRing>(a: &Matrix<S>) -> Matrix<S> {
    let (_, v, r) = column_echelon(a);
    v.columns(r..a.cols)
}

/// Coordinate solver for a lattice given by the columns of a full-column-rank
/// matrix `b`.
#[derive(Clone, Debug)]
pub struct LatticeSolver<S> {
    smith: Smith<S>,
}

/// Coordinates of a vector relative to a [`LatticeSolver`].
#[derive(Clone, Debug, PartialEq)]
pub struct Coordinates<S> {
    pub coords: Vec<S>,
    /// The vector lies in the lattice exactly.
    pub exact: bool,
}

impl<S: EuclideanRing> LatticeSolver<S> {
    pub fn new(b: &Matrix<S>) -> Self {
        let smith = smith_normal_form(b);
        assert_eq!(smith.rank, b.cols, "lattice generators must be independent");
        LatticeSolver { smith }
    }

    pub fn rank(&self) -> usize {
        self.smith.rank
    }

    /// True when the lattice is saturated (all elementary divisors units).
    pub fn is_saturated(&self) -> bool {
        self.smith.diagonal().iter().all(S::is_unit)
    }

    /// Solves `b x = p`. When `p` lies outside the lattice the returned
    /// coordinates are those of its projection along the complement spanned
    /// by the trailing columns of `u^{-1}`, and `exact` is false.
    pub fn solve(&self, p: &[S]) -> Coordinates<S> {
        let y = self.smith.u.mul_vec(p);
        let r = self.smith.rank;
        let mut exact = y[r..].iter().all(S::is_zero);
        let mut z = Vec::with_capacity(r);
        for (i, yi) in y.iter().take(r).enumerate() {
            let (q, rem) = yi.div_rem_euclid(&self.smith.d[(i, i)]);
            if !rem.is_zero() {
                exact = false;
            }
            z.push(q);
        }
        let coords = self.smith.v.mul_vec(&z);
        Coordinates { coords, exact }
    }
}

/// Reduced row echelon form over a field; returns the pivot columns.
pub fn rref<F: Field>(a: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else { continue };
        m.swap_rows(row, p);
        let inv = m[(row, col)].inv();
        m.scale_row(row, &inv);
        for i in 0..m.rows {
            if i != row && !m[(i, col)].is_zero() {
                let f = -m[(i, col)].clone();
                m.add_row_multiple(i, row, &f);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

pub fn rank_field<F: Field>(a: &Matrix<F>) -> usize {
    rref(a).1.len()
}

/// Basis of the null space over a field, one vector per free column.
pub fn kernel_field<F: Field>(a: &Matrix<F>) -> Vec<Vec<F>> {
    let (r, pivots) = rref(a);
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![F::zero(); a.cols];
            x[f] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[(i, f)].clone();
            }
            x
        })
        .collect()
}

/// Some solution of `a x = b` over a field, if one exists.
pub fn solve_field<F: Field>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    assert_eq!(a.rows, b.len());
    let aug = a.hstack(&Matrix::from_columns(a.rows, &[b.to_vec()]));
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![F::zero(); a.cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, a.cols)].clone();
    }
    Some(x)
}

/// Incremental rank over the fraction field of an integral domain, for long
/// sparse integer vectors. Reduction is fraction-free with content removal.
#[derive(Clone, Debug, Default)]
pub struct SparseRank {
    pivots: std::collections::HashMap<usize, Vec<(usize, BigInt)>>,
}

impl SparseRank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a vector given as `(index, value)` pairs; returns whether the
    /// rank grew.
    pub fn insert(&mut self, entries: impl IntoIterator<Item = (usize, BigInt)>) -> bool {
        let mut v: std::collections::BTreeMap<usize, BigInt> = std::collections::BTreeMap::new();
        for (i, x) in entries {
            if !x.is_zero() {
                *v.entry(i).or_insert_with(BigInt::zero) += x;
            }
        }
        v.retain(|_, x| !x.is_zero());
        loop {
            let Some((&lead, a)) = v.iter().next_back() else { return false };
            let Some(piv) = self.pivots.get(&lead) else {
                let mut row: Vec<(usize, BigInt)> = v.into_iter().collect();
                normalize_content(&mut row);
                self.pivots.insert(lead, row);
                return true;
            };
            let b = piv.last().unwrap().1.clone();
            let a = a.clone();
            // v <- b*v - a*piv, which clears the lead
            for x in v.values_mut() {
                *x *= &b;
            }
            for (i, y) in piv {
                let e = v.entry(*i).or_insert_with(BigInt::zero);
                *e -= &a * y;
            }
            v.retain(|_, x| !x.is_zero());
            let mut row: Vec<(usize, BigInt)> = std::mem::take(&mut v).into_iter().collect();
            normalize_content(&mut row);
            v = row.into_iter().collect();
        }
    }
}

fn normalize_content(row: &mut [(usize, BigInt)]) {
    use num_integer::Integer;
    let mut g = BigInt::zero();
    for (_, x) in row.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Rank over `ℚ` of the columns of a sparse integer matrix.
pub fn sparse_rank<I>(columns: I) -> usize
where
    I: IntoIterator,
    I::Item: IntoIterator<Item = (usize, BigInt)>,
{
    let mut r = SparseRank::new();
    for c in columns {
        r.insert(c);
    }
    r.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    type Z = BigInt;

    fn is_diagonal_chain(s: &Smith<Z>) -> bool {
        let d = &s.d;
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j && !d[(i, j)].is_zero() {
                    return false;
                }
            }
        }
        let diag = s.diagonal();
        diag.windows(2).all(|w| w[0].divides(&w[1])) && diag.iter().all(|x| *x > Z::zero())
    }

    fn det_is_unit(m: &Matrix<Z>) -> bool {
        let (r, divs) = rank_and_elementary_divisors(m, true);
        r == m.rows() && divs.is_empty()
    }

    #[test]
    fn smith_identity_and_zero() {
        let id = Matrix::<Z>::identity(3);
        assert_eq!(smith_normal_form(&id).d, id);
        let z = Matrix::<Z>::zeros(2, 3);
        let s = smith_normal_form(&z);
        assert_eq!(s.rank, 0);
        assert!(s.d.is_zero());
    }

    #[test]
    fn smith_diag_2_3() {
        let a = Matrix::<Z>::from_i64_rows(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![Z::from(1), Z::from(6)]);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
    }

    #[test]
    fn divisors_examples() {
        let id = Matrix::<Z>::identity(4);
        assert_eq!(rank_and_elementary_divisors(&id, true), (4, vec![]));
        let a = Matrix::<Z>::from_i64_rows(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 0]]);
        assert_eq!(rank_and_elementary_divisors(&a, true), (2, vec![Z::from(2)]));
        let c = Matrix::<Z>::from_i64_rows(&[&[1], &[-1], &[1], &[-1]]);
        assert_eq!(rank_and_elementary_divisors(&c, true), (1, vec![]));
        assert_eq!(rank_and_elementary_divisors(&c, false), (1, vec![Z::from(1)]));
    }

    #[test]
    fn kernel_examples() {
        let a = Matrix::<Z>::from_i64_rows(&[&[1, -1]]);
        let k = integer_kernel_basis(&a);
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col == vec![Z::from(1), Z::from(1)] || col == vec![Z::from(-1), Z::from(-1)]);

        let two = Matrix::<Z>::from_i64_rows(&[&[2]]);
        assert_eq!(integer_kernel_basis(&two).cols(), 0);

        // boundary of the directed 3-cycle on edges ab, bc, ca
        let d1 = Matrix::<Z>::from_i64_rows(&[&[-1, 0, 1], &[1, -1, 0], &[0, 1, -1]]);
        let k = integer_kernel_basis(&d1);
        assert_eq!(k.cols(), 1);
        let col = k.column(0);
        assert!(col[0] == col[1] && col[1] == col[2] && col[0].is_unit());
    }

    #[test]
    fn lattice_solver_projects() {
        let b = Matrix::<Z>::from_i64_rows(&[&[1], &[1], &[0]]);
        let s = LatticeSolver::new(&b);
        assert!(s.is_saturated());
        let c = s.solve(&[Z::from(3), Z::from(3), Z::from(0)]);
        assert!(c.exact);
        assert_eq!(c.coords, vec![Z::from(3)]);
        assert!(!s.solve(&[Z::from(1), Z::from(0), Z::from(0)]).exact);
    }

    #[test]
    fn field_solves() {
        let a = Matrix::<BigRational>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank_field(&a), 1);
        let k = kernel_field(&a);
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        let b: Vec<BigRational> = vec![BigRational::from_integer(3.into()), BigRational::from_integer(6.into())];
        let x = solve_field(&a, &b).unwrap();
        assert_eq!(a.mul_vec(&x), b);
        let bad: Vec<BigRational> = vec![BigRational::from_integer(1.into()), BigRational::from_integer(0.into())];
        assert!(solve_field(&a, &bad).is_none());
    }

    fn small_matrix() -> impl Strategy<Value = Matrix<Z>> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
                Matrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| Z::from(x)).collect()).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn smith_is_a_unimodular_diagonalization(a in small_matrix()) {
            let s = smith_normal_form(&a);
            prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
            prop_assert!(is_diagonal_chain(&s));
            prop_assert!(det_is_unit(&s.u));
            prop_assert!(det_is_unit(&s.v));
            // machine-integer route agrees
            let small = a.map(crate::scalar::convert::<Z, i64>);
            let (r, divs) = rank_and_elementary_divisors(&small, false);
            prop_assert_eq!(r, s.rank);
            prop_assert_eq!(divs.iter().map(|&x| Z::from(x)).collect::<Vec<_>>(), s.diagonal());
        }

        #[test]
        fn kernel_is_saturated_and_annihilated(a in small_matrix()) {
            let k = integer_kernel_basis(&a);
            prop_assert!((&a * &k).is_zero());
            prop_assert_eq!(k.cols(), a.cols() - rank(&a));
            if k.cols() > 0 {
                let (_, divs) = rank_and_elementary_divisors(&k, true);
                prop_assert!(divs.is_empty());
            }
        }
    }
}
