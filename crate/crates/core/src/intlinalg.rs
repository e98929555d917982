//! Exact integer matrices: Hermite and Smith normal forms, integer kernels and
//! lattice membership.
//!
//! Lattices are column spans throughout. The column Hermite normal form used
//! here is lower triangular: each column has a positive pivot in its first
//! nonzero row, pivot rows strictly increase from left to right, and the
//! entries to the left of a pivot (same row, earlier columns) lie in
//! `[0, pivot)`. Zero columns are dropped, so the form is a canonical basis
//! and structural equality of two forms is lattice equality.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    /// Row-major construction from machine integers; panics on a length mismatch.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        IntMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from column vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has the wrong length");
            for (i, x) in c.iter().enumerate() {
                m.entries[i * cols + j] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot concatenate {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        let mut cols = self.columns();
        cols.extend(other.columns());
        Ok(Self::from_columns(self.rows, &cols))
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let cols: Vec<_> = idx.iter().map(|&j| self.column(j)).collect();
        Self::from_columns(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.entries[r * self.cols + j] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        ColumnEchelon::from_columns(self.rows, self.columns()).len()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Extended gcd normalized so that `g >= 0` and `g = s*a + t*b`.
pub(crate) fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

fn first_nonzero(v: &[BigInt], start: usize) -> Option<usize> {
    (start..v.len()).find(|&i| !v[i].is_zero())
}

/// `target -= q * source` on rows `from..`.
fn sub_scaled(target: &mut [BigInt], source: &[BigInt], q: &BigInt, from: usize) {
    for (t, s) in target[from..].iter_mut().zip(&source[from..]) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Unimodular 2x2 mix of two columns sharing first nonzero row `row`.
/// Afterwards `c[row] = gcd > 0` and `v[row] = 0`.
fn gcd_mix(c: &mut [BigInt], v: &mut [BigInt], row: usize) {
    let a = c[row].clone();
    let b = v[row].clone();
    let (g, s, t) = ext_gcd(&a, &b);
    let a_g = &a / &g;
    let b_g = &b / &g;
    for i in row..c.len() {
        if c[i].is_zero() && v[i].is_zero() {
            continue;
        }
        let ci = &s * &c[i] + &t * &v[i];
        let vi = &a_g * &v[i] - &b_g * &c[i];
        c[i] = ci;
        v[i] = vi;
    }
}

/// Column echelon basis of an integer lattice, pivots in first nonzero rows.
///
/// Columns are kept sorted by pivot row. Insertion keeps the basis in echelon
/// form with positive pivots but does not reduce off-pivot entries; call
/// [`ColumnEchelon::reduce`] for the canonical Hermite form.
#[derive(Clone, Debug, Default)]
pub struct ColumnEchelon {
    rows: usize,
    cols: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl ColumnEchelon {
    pub fn new(rows: usize) -> Self {
        ColumnEchelon {
            rows,
            cols: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_columns<I: IntoIterator<Item = Vec<BigInt>>>(rows: usize, columns: I) -> Self {
        let mut e = Self::new(rows);
        for c in columns {
            e.insert(c);
        }
        e
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn columns(&self) -> &[Vec<BigInt>] {
        &self.cols
    }

    /// Adds `v` to the spanned lattice. Returns the indices (after the call)
    /// of columns whose content changed, including a newly created column.
    pub fn insert(&mut self, mut v: Vec<BigInt>) -> Vec<usize> {
        assert_eq!(v.len(), self.rows, "vector length does not match the ambient");
        let mut touched = Vec::new();
        let mut start = 0;
        loop {
            let Some(i) = first_nonzero(&v, start) else {
                return touched;
            };
            match self.pivots.binary_search(&i) {
                Err(pos) => {
                    if v[i].is_negative() {
                        for x in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.pivots.insert(pos, i);
                    self.cols.insert(pos, v);
                    for t in touched.iter_mut() {
                        if *t >= pos {
                            *t += 1;
                        }
                    }
                    touched.push(pos);
                    return touched;
                }
                Ok(pos) => {
                    let c = &mut self.cols[pos];
                    let (q, r) = v[i].div_rem(&c[i]);
                    if r.is_zero() {
                        sub_scaled(&mut v, c, &q, i);
                    } else {
                        gcd_mix(c, &mut v, i);
                        touched.push(pos);
                    }
                    start = i + 1;
                }
            }
        }
    }

    /// Reduces entries left of each pivot into `[0, pivot)`.
    pub fn reduce(&mut self) {
        for j in 0..self.cols.len() {
            let r = self.pivots[j];
            let (left, right) = self.cols.split_at_mut(j);
            let pivot_col = &right[0];
            let h = &pivot_col[r];
            for col in left.iter_mut() {
                let q = col[r].div_floor(h);
                if !q.is_zero() {
                    sub_scaled(col, pivot_col, &q, r);
                }
            }
        }
    }

    /// Coordinates of `v` with respect to the echelon columns, if `v` lies
    /// in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.rows);
        let mut rest = v.to_vec();
        let mut coords = vec![BigInt::zero(); self.cols.len()];
        let mut next_row = 0;
        for (j, (&r, col)) in self.pivots.iter().zip(&self.cols).enumerate() {
            if rest[next_row..r].iter().any(|x| !x.is_zero()) {
                return None;
            }
            let (q, rem) = rest[r].div_rem(&col[r]);
            if !rem.is_zero() {
                return None;
            }
            if !q.is_zero() {
                sub_scaled(&mut rest, col, &q, r);
            }
            coords[j] = q;
            next_row = r + 1;
        }
        if rest[next_row..].iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(coords)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.rows, &self.cols)
    }

    pub fn into_columns(self) -> Vec<Vec<BigInt>> {
        self.cols
    }
}

/// Canonical column Hermite normal form of the lattice spanned by the columns of `m`.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    let mut e = ColumnEchelon::from_columns(m.rows(), m.columns());
    e.reduce();
    e.to_matrix()
}

/// Tests whether `v` is an integer combination of the columns of `m`.
pub fn in_column_lattice(m: &IntMatrix, v: &[BigInt]) -> Result<bool> {
    if v.len() != m.rows() {
        return Err(Error::Dimension(format!(
            "vector of length {} against a lattice in Z^{}",
            v.len(),
            m.rows()
        )));
    }
    Ok(ColumnEchelon::from_columns(m.rows(), m.columns()).contains(v))
}

/// Coordinates of `v` against the columns of `basis`, which must already be
/// in column echelon form (for example the output of [`hnf`]).
pub fn echelon_coordinates(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let cols = basis.columns();
    let pivots: Vec<usize> = cols
        .iter()
        .map(|c| first_nonzero(c, 0).expect("echelon basis has a zero column"))
        .collect();
    debug_assert!(pivots.windows(2).all(|w| w[0] < w[1]), "basis is not in echelon form");
    let e = ColumnEchelon {
        rows: basis.rows(),
        cols,
        pivots,
    };
    e.coordinates(v)
}

/// Saturated basis (in Hermite form) of the integer kernel `{x : m x = 0}`.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let n = m.cols();
    let mut image: Vec<(usize, Vec<BigInt>, Vec<BigInt>)> = Vec::new();
    let mut kernel = Vec::new();
    for j in 0..n {
        let mut v = m.column(j);
        let mut t = vec![BigInt::zero(); n];
        t[j] = BigInt::one();
        let mut start = 0;
        loop {
            let Some(i) = first_nonzero(&v, start) else {
                kernel.push(t);
                break;
            };
            match image.binary_search_by_key(&i, |(p, _, _)| *p) {
                Err(pos) => {
                    image.insert(pos, (i, v, t));
                    break;
                }
                Ok(pos) => {
                    let (_, c, ct) = &mut image[pos];
                    let (q, r) = v[i].div_rem(&c[i]);
                    if r.is_zero() {
                        sub_scaled(&mut v, c, &q, i);
                        sub_scaled(&mut t, ct, &q, 0);
                    } else {
                        let a = c[i].clone();
                        let b = v[i].clone();
                        let (g, s, x) = ext_gcd(&a, &b);
                        let a_g = &a / &g;
                        let b_g = &b / &g;
                        mix_pair(c, &mut v, &s, &x, &a_g, &b_g, i);
                        mix_pair(ct, &mut t, &s, &x, &a_g, &b_g, 0);
                    }
                    start = i + 1;
                }
            }
        }
    }
    hnf(&IntMatrix::from_columns(n, &kernel))
}

fn mix_pair(c: &mut [BigInt], v: &mut [BigInt], s: &BigInt, t: &BigInt, a_g: &BigInt, b_g: &BigInt, from: usize) {
    for i in from..c.len() {
        if c[i].is_zero() && v[i].is_zero() {
            continue;
        }
        let ci = s * &c[i] + t * &v[i];
        let vi = a_g * &v[i] - b_g * &c[i];
        c[i] = ci;
        v[i] = vi;
    }
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal with a
/// nonnegative divisibility chain on its diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k)
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with transforms.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let full = snf_with_inverse(m);
    SmithDecomposition {
        u: full.u,
        d: full.d,
        v: full.v,
    }
}

pub(crate) struct FullSmith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

struct Work {
    d: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        self.d.swap(a, b);
        self.u.swap(a, b);
        for row in self.u_inv.iter_mut() {
            row.swap(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for row in self.d.iter_mut() {
            row.swap(a, b);
        }
        for row in self.v.iter_mut() {
            row.swap(a, b);
        }
    }

    fn negate_row(&mut self, t: usize) {
        for x in self.d[t].iter_mut().chain(self.u[t].iter_mut()) {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[t] = -&row[t];
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        for mat in [&mut self.d, &mut self.u] {
            let src = mat[t].clone();
            for (x, s) in mat[i].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *x -= q * s;
                }
            }
        }
        for row in self.u_inv.iter_mut() {
            let add = q * &row[i];
            row[t] += add;
        }
    }

    /// rows (t, i) <- [[s, x], [-b', a']] (t, i)
    fn row_mix(&mut self, t: usize, i: usize, s: &BigInt, x: &BigInt, a_g: &BigInt, b_g: &BigInt) {
        for mat in [&mut self.d, &mut self.u] {
            let rt = mat[t].clone();
            let ri = mat[i].clone();
            for k in 0..rt.len() {
                mat[t][k] = s * &rt[k] + x * &ri[k];
                mat[i][k] = a_g * &ri[k] - b_g * &rt[k];
            }
        }
        for row in self.u_inv.iter_mut() {
            let ct = row[t].clone();
            let ci = row[i].clone();
            row[t] = a_g * &ct + b_g * &ci;
            row[i] = s * &ci - x * &ct;
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        for mat in [&mut self.d, &mut self.v] {
            for row in mat.iter_mut() {
                if !row[t].is_zero() {
                    let sub = q * &row[t];
                    row[j] -= sub;
                }
            }
        }
    }

    /// cols (t, j) <- (t, j) [[s, -b'], [x, a']]
    fn col_mix(&mut self, t: usize, j: usize, s: &BigInt, x: &BigInt, a_g: &BigInt, b_g: &BigInt) {
        for mat in [&mut self.d, &mut self.v] {
            for row in mat.iter_mut() {
                let ct = row[t].clone();
                let cj = row[j].clone();
                row[t] = s * &ct + x * &cj;
                row[j] = a_g * &cj - b_g * &ct;
            }
        }
    }
}

fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn from_rows(rows: usize, cols: usize, data: Vec<Vec<BigInt>>) -> IntMatrix {
    IntMatrix {
        rows,
        cols,
        entries: data.into_iter().flatten().collect(),
    }
}

pub(crate) fn snf_with_inverse(m: &IntMatrix) -> FullSmith {
    let (nr, nc) = (m.rows(), m.cols());
    let mut w = Work {
        d: to_rows(m),
        u: to_rows(&IntMatrix::identity(nr)),
        u_inv: to_rows(&IntMatrix::identity(nr)),
        v: to_rows(&IntMatrix::identity(nc)),
    };
    for t in 0..nr.min(nc) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                let x = &w.d[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < w.d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            for i in t + 1..nr {
                if w.d[i][t].is_zero() {
                    continue;
                }
                let a = w.d[t][t].clone();
                let b = w.d[i][t].clone();
                let (q, r) = b.div_rem(&a);
                if r.is_zero() {
                    w.row_sub(i, t, &q);
                } else {
                    let (g, s, x) = ext_gcd(&a, &b);
                    w.row_mix(t, i, &s, &x, &(&a / &g), &(&b / &g));
                }
            }
            for j in t + 1..nc {
                if w.d[t][j].is_zero() {
                    continue;
                }
                let a = w.d[t][t].clone();
                let b = w.d[t][j].clone();
                let (q, r) = b.div_rem(&a);
                if r.is_zero() {
                    w.col_sub(j, t, &q);
                } else {
                    let (g, s, x) = ext_gcd(&a, &b);
                    w.col_mix(t, j, &s, &x, &(&a / &g), &(&b / &g));
                }
            }
            let clear = (t + 1..nr).all(|i| w.d[i][t].is_zero()) && (t + 1..nc).all(|j| w.d[t][j].is_zero());
            if !clear {
                continue;
            }
            let pivot = w.d[t][t].clone();
            let offender = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !w.d[i][j].is_multiple_of(&pivot)));
            match offender {
                // row_t += row_i brings the offending entry into the pivot row
                Some(i) => w.row_sub(t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        if w.d[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    FullSmith {
        u: from_rows(nr, nr, w.u),
        u_inv: from_rows(nr, nr, w.u_inv),
        d: from_rows(nr, nc, w.d),
        v: from_rows(nc, nc, w.v),
    }
}
