//! Sparse persistence engine.
//!
//! Boundaries are inserted grade by grade into an incremental column echelon
//! of `B_m(X_q)`; after the last grade the cycles `Z_m(X_n)` are inserted, which
//! plays the role of `B_m(X_{n+1})`. The factor on `[p, q)` is the growth of the
//! grade-`p` block of pivots between `q - 1` and `q`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::FilteredComplex;
use crate::abgrp::QuotientShape;
use crate::coeff::{inv_mod, Coeff};
use crate::diagram::Interval;
use crate::error::{Error, Result};
use crate::intlinalg::{ext_gcd, IntMatrix};
use crate::par;

/// Sparse chain as `(cell index, coefficient)` pairs.
pub type SparseChain = Vec<(usize, BigInt)>;

/// Sparse coordinate vector sorted by coordinate.
type Sparse = Vec<(usize, BigInt)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyFactor {
    pub support: Interval,
    pub shape: QuotientShape,
    /// Cycles whose classes generate the factor, one per summand of `shape`.
    pub representatives: Vec<SparseChain>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyBarcode {
    pub degree: usize,
    pub coeff: Coeff,
    pub n: usize,
    /// Bars `[p, q)` with `p < q ≤ n + 1`; `q = n + 1` never dies.
    pub bars: BTreeMap<Interval, HomologyFactor>,
    /// Zero-persistence pieces: boundaries born in the grade of their leading cell.
    pub diagonal: BTreeMap<usize, HomologyFactor>,
}

impl HomologyBarcode {
    /// Shapes keyed by `(p, q)`, diagonal pieces as `(p, p)`.
    pub fn shapes(&self) -> BTreeMap<(usize, usize), QuotientShape> {
        let mut out: BTreeMap<(usize, usize), QuotientShape> =
            self.bars.iter().map(|(i, f)| ((i.p, i.q), f.shape.clone())).collect();
        for (p, f) in &self.diagonal {
            out.insert((*p, *p), f.shape.clone());
        }
        out
    }
}

fn axpby(a: &BigInt, x: &Sparse, b: &BigInt, y: &Sparse) -> Sparse {
    let mut out = Vec::with_capacity(x.len().max(y.len()));
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let (k, v) = match (x.get(i), y.get(j)) {
            (Some((kx, vx)), Some((ky, vy))) if kx == ky => {
                i += 1;
                j += 1;
                (*kx, a * vx + b * vy)
            }
            (Some((kx, vx)), Some((ky, _))) if kx < ky => {
                i += 1;
                (*kx, a * vx)
            }
            (Some((kx, vx)), None) => {
                i += 1;
                (*kx, a * vx)
            }
            (_, Some((ky, vy))) => {
                j += 1;
                (*ky, b * vy)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((k, v));
        }
    }
    out
}

fn reduce_mod(v: Sparse, p: u64) -> Sparse {
    let p = BigInt::from(p);
    v.into_iter()
        .map(|(k, x)| (k, x.mod_floor(&p)))
        .filter(|(_, x)| !x.is_zero())
        .collect()
}

#[derive(Debug, Default)]
struct Inserted {
    /// Existing columns whose content changed.
    touched: Vec<usize>,
    created: Option<usize>,
    /// Transform of a vector that reduced to zero.
    kernel: Option<Sparse>,
}

/// Incremental sparse column echelon over `Z` (gcd mixing) or `F_p`
/// (pivots scaled to one). Column indices are stable; the pivot row of a
/// column never changes.
struct SparseEchelon {
    modulus: Option<u64>,
    pivot_at: Vec<Option<usize>>,
    cols: Vec<Sparse>,
    transforms: Option<Vec<Sparse>>,
}

impl SparseEchelon {
    fn new(rows: usize, modulus: Option<u64>, track: bool) -> Self {
        SparseEchelon {
            modulus,
            pivot_at: vec![None; rows],
            cols: Vec::new(),
            transforms: track.then(Vec::new),
        }
    }

    fn pivot_row(&self, j: usize) -> usize {
        self.cols[j][0].0
    }

    fn combine(&self, a: &BigInt, x: &Sparse, b: &BigInt, y: &Sparse) -> Sparse {
        let v = axpby(a, x, b, y);
        match self.modulus {
            Some(p) => reduce_mod(v, p),
            None => v,
        }
    }

    fn insert(&mut self, mut v: Sparse, mut t: Sparse) -> Inserted {
        let mut out = Inserted::default();
        if let Some(p) = self.modulus {
            v = reduce_mod(v, p);
        }
        let one = BigInt::one();
        loop {
            let Some((r, b)) = v.first().cloned() else {
                if self.transforms.is_some() {
                    out.kernel = Some(t);
                }
                return out;
            };
            let Some(j) = self.pivot_at[r] else {
                match self.modulus {
                    Some(p) => {
                        let inv = BigInt::from(inv_mod((&b).try_into().expect("reduced entry"), p));
                        v = reduce_mod(v.into_iter().map(|(k, x)| (k, x * &inv)).collect(), p);
                        t = reduce_mod(t.into_iter().map(|(k, x)| (k, x * &inv)).collect(), p);
                    }
                    None if b.is_negative() => {
                        v = v.into_iter().map(|(k, x)| (k, -x)).collect();
                        t = t.into_iter().map(|(k, x)| (k, -x)).collect();
                    }
                    None => {}
                }
                let idx = self.cols.len();
                self.pivot_at[r] = Some(idx);
                self.cols.push(v);
                if let Some(ts) = self.transforms.as_mut() {
                    ts.push(t);
                }
                out.created = Some(idx);
                return out;
            };
            let a = self.cols[j][0].1.clone();
            let exact = self.modulus.is_some() || b.is_multiple_of(&a);
            if exact {
                // pivot is 1 over F_p
                let q = if self.modulus.is_some() { b.clone() } else { &b / &a };
                let neg = -q;
                v = self.combine(&one, &v, &neg, &self.cols[j]);
                if let Some(ts) = &self.transforms {
                    t = self.combine(&one, &t, &neg, &ts[j]);
                }
            } else {
                let (g, s, x) = ext_gcd(&a, &b);
                let (a_g, mb_g) = (&a / &g, -(&b / &g));
                let c = &self.cols[j];
                let new_c = axpby(&s, c, &x, &v);
                v = axpby(&a_g, &v, &mb_g, c);
                self.cols[j] = new_c;
                if let Some(ts) = self.transforms.as_mut() {
                    let tc = &ts[j];
                    let new_tc = axpby(&s, tc, &x, &t);
                    t = axpby(&a_g, &t, &mb_g, tc);
                    ts[j] = new_tc;
                }
                out.touched.push(j);
            }
        }
    }
}

fn modulus_of(coeff: Coeff) -> Option<u64> {
    match coeff {
        Coeff::Prime(p) => Some(p),
        _ => None,
    }
}

/// Basis of `Z_m(X_n)` in `C_m` coordinates, sparse.
fn cycle_basis(x: &FilteredComplex, m: usize) -> Vec<Sparse> {
    let rank = x.chain_rank(m);
    if m == 0 {
        return (0..rank).map(|k| vec![(k, BigInt::one())]).collect();
    }
    let mut e = SparseEchelon::new(x.chain_rank(m - 1), modulus_of(x.coeff()), true);
    let mut out = Vec::new();
    for (k, &cell) in x.cells_of_dim(m).iter().enumerate() {
        let r = e.insert(x.boundary_coords(cell), vec![(k, BigInt::one())]);
        if let Some(z) = r.kernel {
            out.push(z);
        }
    }
    out
}

/// Coordinates of `v` (dense, block coordinates) against columns in echelon
/// form; `cols` are `(pivot, dense column)` sorted by pivot.
fn block_coordinates(cols: &[(usize, Vec<BigInt>)], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rest = v.to_vec();
    let mut coords = Vec::with_capacity(cols.len());
    for (r, c) in cols {
        let (q, rem) = rest[*r].div_rem(&c[*r]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (x, y) in rest.iter_mut().zip(c) {
                *x -= &q * y;
            }
        }
        coords.push(q);
    }
    rest.iter().all(Zero::is_zero).then_some(coords)
}

struct BlockState {
    /// Canonical basis of the projected lattice at the last snapshot.
    snapshot: IntMatrix,
}

/// Persistent homology in degree `m`, with shapes and representative cycles.
pub fn homology_barcode(x: &FilteredComplex, m: usize) -> Result<HomologyBarcode> {
    let n = x.n();
    if n == 0 {
        return Err(Error::InvalidComplex("complex has no grades".into()));
    }
    let coeff = x.coeff();
    let rows = x.chain_rank(m);
    let grade_of: Vec<usize> = (0..rows).map(|k| x.grade_of_coordinate(m, k)).collect();
    // block of grade p is the coordinate range [start[p], start[p - 1])
    let start: Vec<usize> = (0..=n).map(|p| x.suffix_start(m, p)).collect();
    let mut ech = SparseEchelon::new(rows, modulus_of(coeff), false);
    let mut cols_of_grade: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut blocks: Vec<BlockState> = (0..=n)
        .map(|p| BlockState {
            snapshot: IntMatrix::zeros(if p == 0 { 0 } else { start[p - 1] - start[p] }, 0),
        })
        .collect();
    let mut out = HomologyBarcode {
        degree: m,
        coeff,
        n,
        bars: BTreeMap::new(),
        diagonal: BTreeMap::new(),
    };
    let cycles = cycle_basis(x, m);
    let mut by_grade: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for &cell in x.cells_of_dim(m + 1) {
        by_grade[x.cells()[cell].grade].push(cell);
    }
    for q in 1..=n + 1 {
        let incoming: Vec<Sparse> = if q <= n {
            by_grade[q].iter().map(|&c| x.boundary_coords(c)).collect()
        } else {
            cycles.clone()
        };
        let mut dirty = BTreeSet::new();
        let mut fresh: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in incoming {
            let r = ech.insert(v, Vec::new());
            for j in r.touched {
                dirty.insert(grade_of[ech.pivot_row(j)]);
            }
            if let Some(j) = r.created {
                let p = grade_of[ech.pivot_row(j)];
                cols_of_grade[p].push(j);
                dirty.insert(p);
                fresh.entry(p).or_default().push(j);
            }
        }
        let record = |out: &mut HomologyBarcode, p: usize, shape: QuotientShape, reps: Vec<SparseChain>| {
            if shape.is_trivial() {
                return;
            }
            // a diagonal piece is recorded with the degenerate support [p, p)
            let f = HomologyFactor {
                support: Interval { p, q },
                shape,
                representatives: reps,
            };
            if p == q {
                out.diagonal.insert(p, f);
            } else {
                out.bars.insert(f.support, f);
            }
        };
        if coeff.is_field() {
            // rank growth of the grade-p block is the number of fresh pivots
            for (p, js) in fresh {
                let shape = QuotientShape {
                    free_rank: js.len(),
                    invariant_factors: Vec::new(),
                };
                let reps = js.iter().map(|&j| x.to_cells(m, &ech.cols[j])).collect();
                record(&mut out, p, shape, reps);
            }
            continue;
        }
        let dirty: Vec<usize> = dirty.into_iter().collect();
        let ech_ref = &ech;
        let cols_ref = &cols_of_grade;
        let blocks_ref = &blocks;
        let start_ref = &start;
        let results = par::map(&dirty, |&p| -> Result<(usize, IntMatrix, QuotientShape, Vec<Sparse>)> {
            let (lo, hi) = (start_ref[p], start_ref[p - 1]);
            let width = hi - lo;
            let mut projected: Vec<(usize, Vec<BigInt>, usize)> = cols_ref[p]
                .iter()
                .map(|&j| {
                    let mut d = vec![BigInt::zero(); width];
                    for (k, v) in &ech_ref.cols[j] {
                        if (lo..hi).contains(k) {
                            d[k - lo] = v.clone();
                        }
                    }
                    (ech_ref.pivot_row(j) - lo, d, j)
                })
                .collect();
            projected.sort_by_key(|(r, _, _)| *r);
            let snapshot = Coeff::Integers.span(width, projected.iter().map(|(_, d, _)| d.clone()).collect());
            let (shape, gens) = Coeff::Integers.quotient(&snapshot, &blocks_ref[p].snapshot)?;
            let echelon: Vec<(usize, Vec<BigInt>)> = projected.iter().map(|(r, d, _)| (*r, d.clone())).collect();
            let mut reps = Vec::with_capacity(gens.len());
            for g in gens {
                let c = block_coordinates(&echelon, &g)
                    .ok_or_else(|| Error::Inconsistent("generator outside the projected lattice".into()))?;
                let mut lift: Sparse = Vec::new();
                for (coef, (_, _, j)) in c.iter().zip(&projected) {
                    if !coef.is_zero() {
                        lift = axpby(&BigInt::one(), &lift, coef, &ech_ref.cols[*j]);
                    }
                }
                reps.push(lift);
            }
            Ok((p, snapshot, shape, reps))
        });
        for r in results {
            let (p, snapshot, shape, reps) = r?;
            blocks[p].snapshot = snapshot;
            let reps = reps.iter().map(|v| x.to_cells(m, v)).collect();
            record(&mut out, p, shape, reps);
        }
    }
    Ok(out)
}

/// Barcodes of every degree `0..=max_dim`, degrees in parallel.
pub fn homology_barcodes(x: &FilteredComplex) -> Result<Vec<HomologyBarcode>> {
    par::map_range(x.max_dim() + 1, |m| homology_barcode(x, m))
        .into_iter()
        .collect()
}
