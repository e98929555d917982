//! Coefficient domains. Every subobject is stored as an integer matrix whose
//! columns form a canonical basis:
//!
//! * integers: the column Hermite form of the lattice;
//! * rationals: the Hermite form of the saturated lattice `span_Q ∩ Z^n`;
//! * prime field `p`: the reduced column echelon form mod `p`, pivots equal
//!   to 1 and entries in `[0, p)`.
//!
//! In each case structural equality of bases is equality of subobjects.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::abgrp::QuotientShape;
use crate::error::{Error, Result};
use crate::intlinalg::{kernel_basis, snf_with_inverse, ColumnEchelon, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coeff {
    Integers,
    Rationals,
    Prime(u64),
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FromStr for Coeff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "z" | "Z" => Ok(Coeff::Integers),
            "q" | "Q" => Ok(Coeff::Rationals),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|x| x.parse::<u64>().ok())
                    .ok_or_else(|| Error::Schema(format!("unknown coefficient domain {other:?}")))?;
                if p > u32::MAX as u64 || !is_prime(p) {
                    return Err(Error::Schema(format!("{p} is not a supported prime")));
                }
                Ok(Coeff::Prime(p))
            }
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Integers => write!(f, "z"),
            Coeff::Rationals => write!(f, "q"),
            Coeff::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

fn mod_p(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = crate::intlinalg::ext_gcd(&BigInt::from(a), &BigInt::from(p));
    debug_assert!(g.is_one(), "{a} is not invertible mod {p}");
    mod_p(&x, p)
}

/// Reduced column echelon form mod p. Returns columns sorted by pivot row and the pivot rows.
pub(crate) fn fp_echelon(rows: usize, cols: Vec<Vec<u64>>, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut v in cols {
        debug_assert_eq!(v.len(), rows);
        for (b, &r) in basis.iter().zip(&pivots) {
            let c = v[r];
            if c != 0 {
                fp_axpy(&mut v, b, p - c, p);
            }
        }
        let Some(r) = v.iter().position(|&x| x != 0) else {
            continue;
        };
        let inv = inv_mod(v[r], p);
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for b in basis.iter_mut() {
            let c = b[r];
            if c != 0 {
                fp_axpy(b, &v, p - c, p);
            }
        }
        let pos = pivots.partition_point(|&q| q < r);
        pivots.insert(pos, r);
        basis.insert(pos, v);
    }
    (basis, pivots)
}

/// `y += a * x` mod p.
pub(crate) fn fp_axpy(y: &mut [u64], x: &[u64], a: u64, p: u64) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            *yi = (*yi + mul_mod(a, xi, p)) % p;
        }
    }
}

fn to_fp(v: &[BigInt], p: u64) -> Vec<u64> {
    v.iter().map(|x| mod_p(x, p)).collect()
}

fn from_fp(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn pivot_rows(basis: &IntMatrix) -> Vec<usize> {
    basis
        .columns()
        .iter()
        .map(|c| c.iter().position(|x| !x.is_zero()).expect("zero column in a basis"))
        .collect()
}

impl Coeff {
    pub fn is_field(self) -> bool {
        !matches!(self, Coeff::Integers)
    }

    /// Canonical basis of the subobject spanned by `cols` in a rank-`rows` ambient.
    pub fn span(self, rows: usize, cols: Vec<Vec<BigInt>>) -> IntMatrix {
        match self {
            Coeff::Integers => {
                let mut e = ColumnEchelon::from_columns(rows, cols);
                e.reduce();
                e.to_matrix()
            }
            Coeff::Rationals => {
                let l = IntMatrix::from_columns(rows, &cols);
                let ann = kernel_basis(&l.transpose());
                kernel_basis(&ann.transpose())
            }
            Coeff::Prime(p) => {
                let (basis, _) = fp_echelon(rows, cols.iter().map(|c| to_fp(c, p)).collect(), p);
                let basis: Vec<_> = basis.iter().map(|c| from_fp(c)).collect();
                IntMatrix::from_columns(rows, &basis)
            }
        }
    }

    /// Canonical basis of the kernel of `m`.
    pub fn kernel(self, m: &IntMatrix) -> IntMatrix {
        match self {
            Coeff::Integers | Coeff::Rationals => kernel_basis(m),
            Coeff::Prime(p) => {
                let n = m.cols();
                let rows = m.rows();
                // column reduction of [m; I] mod p
                let mut image: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
                let mut kernel = Vec::new();
                for j in 0..n {
                    let mut v = to_fp(&m.column(j), p);
                    let mut t = vec![0u64; n];
                    t[j] = 1;
                    for (r, c, ct) in &image {
                        let a = v[*r];
                        if a != 0 {
                            fp_axpy(&mut v, c, p - a, p);
                            fp_axpy(&mut t, ct, p - a, p);
                        }
                    }
                    match v.iter().position(|&x| x != 0) {
                        None => kernel.push(from_fp(&t)),
                        Some(r) => {
                            let inv = inv_mod(v[r], p);
                            v.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
                            t.iter_mut().for_each(|x| *x = mul_mod(*x, inv, p));
                            image.push((r, v, t));
                        }
                    }
                    debug_assert!(image.iter().all(|(_, c, _)| c.len() == rows));
                }
                self.span(n, kernel)
            }
        }
    }

    /// Reduces a vector to its canonical entry range (only affects prime fields).
    pub fn normalize(self, v: &[BigInt]) -> Vec<BigInt> {
        match self {
            Coeff::Prime(p) => from_fp(&to_fp(v, p)),
            _ => v.to_vec(),
        }
    }

    pub fn normalize_matrix(self, m: &IntMatrix) -> IntMatrix {
        match self {
            Coeff::Prime(p) => {
                let e = m.entries().iter().map(|x| BigInt::from(mod_p(x, p))).collect();
                IntMatrix::new(m.rows(), m.cols(), e).expect("shape preserved")
            }
            _ => m.clone(),
        }
    }

    /// Coordinates of `v` against a canonical basis produced by [`Coeff::span`].
    pub fn coordinates(self, basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
        match self {
            Coeff::Integers | Coeff::Rationals => crate::intlinalg::echelon_coordinates(basis, v),
            Coeff::Prime(p) => {
                let mut rest = to_fp(v, p);
                let cols: Vec<Vec<u64>> = basis.columns().iter().map(|c| to_fp(c, p)).collect();
                let mut coords = Vec::with_capacity(cols.len());
                for (c, r) in cols.iter().zip(pivot_rows(basis)) {
                    let a = rest[r];
                    if a != 0 {
                        fp_axpy(&mut rest, c, p - a, p);
                    }
                    coords.push(BigInt::from(a));
                }
                rest.iter().all(|&x| x == 0).then_some(coords)
            }
        }
    }

    pub fn contains(self, basis: &IntMatrix, v: &[BigInt]) -> bool {
        self.coordinates(basis, v).is_some()
    }

    /// A canonical representative of the coset `v + span(basis)`.
    pub fn reduce_modulo(self, basis: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
        match self {
            Coeff::Prime(p) => {
                let mut rest = to_fp(v, p);
                for (c, r) in basis.columns().iter().zip(pivot_rows(basis)) {
                    let a = rest[r];
                    if a != 0 {
                        fp_axpy(&mut rest, &to_fp(c, p), p - a, p);
                    }
                }
                from_fp(&rest)
            }
            _ => {
                let mut rest = v.to_vec();
                for (c, r) in basis.columns().iter().zip(pivot_rows(basis)) {
                    let q = rest[r].div_floor(&c[r]);
                    if !q.is_zero() {
                        for (x, y) in rest.iter_mut().zip(c) {
                            *x -= &q * y;
                        }
                    }
                }
                rest
            }
        }
    }

    /// Shape of `num / den` and generators (vectors in the ambient) whose
    /// cosets generate the quotient, torsion first by increasing order, then
    /// free generators.
    pub fn quotient(self, num: &IntMatrix, den: &IntMatrix) -> Result<(QuotientShape, Vec<Vec<BigInt>>)> {
        let k = num.cols();
        let mut coord_cols = Vec::with_capacity(den.cols());
        for (j, c) in den.columns().iter().enumerate() {
            let x = self
                .coordinates(num, c)
                .ok_or_else(|| Error::NotNested(format!(": denominator column {j} lies outside")))?;
            coord_cols.push(x);
        }
        let combine = |w: &[BigInt]| -> Vec<BigInt> {
            let v = num.mul_vec(w).expect("coordinate length matches basis");
            self.reduce_modulo(den, &self.normalize(&v))
        };
        match self {
            Coeff::Integers => {
                let c = IntMatrix::from_columns(k, &coord_cols);
                let s = snf_with_inverse(&c);
                let mut factors = Vec::new();
                let mut gens = Vec::new();
                let mut free = 0;
                for i in 0..k {
                    let d = if i < c.cols() {
                        s.d.get(i, i).clone()
                    } else {
                        BigInt::zero()
                    };
                    if d.is_one() {
                        continue;
                    }
                    if d.is_zero() {
                        free += 1;
                    } else {
                        factors.push(d);
                    }
                    gens.push(combine(&s.u_inv.column(i)));
                }
                Ok((
                    QuotientShape {
                        free_rank: free,
                        invariant_factors: factors,
                    },
                    gens,
                ))
            }
            Coeff::Rationals | Coeff::Prime(_) => {
                let pivots: Vec<usize> = match self {
                    Coeff::Prime(p) => fp_echelon(k, coord_cols.iter().map(|c| to_fp(c, p)).collect(), p).1,
                    _ => ColumnEchelon::from_columns(k, coord_cols).pivots().to_vec(),
                };
                let gens: Vec<_> = (0..k)
                    .filter(|i| pivots.binary_search(i).is_err())
                    .map(|i| {
                        let mut e = vec![BigInt::zero(); k];
                        e[i] = BigInt::one();
                        combine(&e)
                    })
                    .collect();
                Ok((
                    QuotientShape {
                        free_rank: gens.len(),
                        invariant_factors: Vec::new(),
                    },
                    gens,
                ))
            }
        }
    }
}
