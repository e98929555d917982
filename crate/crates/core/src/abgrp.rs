//! Finitely generated abelian groups `Z^n / R` (or vector spaces over a
//! field) and their modular lattices of subobjects.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::intlinalg::IntMatrix;

/// `Z^rank` modulo the column span of `relations`, over a coefficient domain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbPresentation {
    coeff: Coeff,
    rank: usize,
    relations: IntMatrix,
}

impl AbPresentation {
    pub fn new(coeff: Coeff, rank: usize, relations: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(c) = relations.iter().find(|c| c.len() != rank) {
            return Err(Error::Dimension(format!(
                "relation of length {} in an ambient of rank {rank}",
                c.len()
            )));
        }
        Ok(AbPresentation {
            coeff,
            rank,
            relations: coeff.span(rank, relations),
        })
    }

    /// Free object of the given rank.
    pub fn free(coeff: Coeff, rank: usize) -> Self {
        AbPresentation {
            coeff,
            rank,
            relations: IntMatrix::zeros(rank, 0),
        }
    }

    /// Cyclic group `Z/order` (order 0 gives `Z`).
    pub fn cyclic(order: i64) -> Self {
        let rel = if order == 0 {
            vec![]
        } else {
            vec![vec![BigInt::from(order)]]
        };
        Self::new(Coeff::Integers, 1, rel).expect("rank one relation")
    }

    pub fn coeff(&self) -> Coeff {
        self.coeff
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Shape of the whole object.
    pub fn shape(&self) -> QuotientShape {
        self.full().shape()
    }

    pub fn full(&self) -> SubgroupElt {
        SubgroupElt::full_of(&Arc::new(self.clone()))
    }

    pub fn zero(&self) -> SubgroupElt {
        SubgroupElt::zero_of(&Arc::new(self.clone()))
    }

    /// Subgroup generated by the given vectors (and the relations).
    pub fn subgroup(&self, gens: Vec<Vec<BigInt>>) -> Result<SubgroupElt> {
        if let Some(g) = gens.iter().find(|g| g.len() != self.rank) {
            return Err(Error::Dimension(format!(
                "generator of length {} in an ambient of rank {}",
                g.len(),
                self.rank
            )));
        }
        Ok(SubgroupElt::spanned(Arc::new(self.clone()), gens))
    }
}

/// A subobject `R ⊆ L ⊆ Z^n`, stored by the canonical basis of `L`.
#[derive(Clone)]
pub struct SubgroupElt {
    parent: Arc<AbPresentation>,
    basis: IntMatrix,
}

impl PartialEq for SubgroupElt {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && same_parent(&self.parent, &other.parent)
    }
}

impl Eq for SubgroupElt {}

impl fmt::Debug for SubgroupElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgroupElt({:?})", self.basis)
    }
}

fn same_parent(a: &Arc<AbPresentation>, b: &Arc<AbPresentation>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl SubgroupElt {
    fn spanned(parent: Arc<AbPresentation>, mut cols: Vec<Vec<BigInt>>) -> Self {
        cols.extend(parent.relations.columns());
        let basis = parent.coeff.span(parent.rank, cols);
        SubgroupElt { parent, basis }
    }

    pub(crate) fn full_of(parent: &Arc<AbPresentation>) -> Self {
        let cols = (0..parent.rank)
            .map(|i| {
                let mut e = vec![BigInt::zero(); parent.rank];
                e[i] = BigInt::one();
                e
            })
            .collect();
        SubgroupElt::spanned(parent.clone(), cols)
    }

    pub(crate) fn zero_of(parent: &Arc<AbPresentation>) -> Self {
        SubgroupElt {
            parent: parent.clone(),
            basis: parent.relations.clone(),
        }
    }

    pub(crate) fn from_gens(parent: &Arc<AbPresentation>, gens: Vec<Vec<BigInt>>) -> Self {
        SubgroupElt::spanned(parent.clone(), gens)
    }

    pub fn parent(&self) -> &AbPresentation {
        &self.parent
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    fn check_parent(&self, other: &SubgroupElt) -> Result<()> {
        if same_parent(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.parent.coeff.contains(&self.basis, v)
    }

    pub fn le(&self, other: &SubgroupElt) -> Result<bool> {
        self.check_parent(other)?;
        Ok(self.basis.columns().iter().all(|c| other.contains(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.basis == self.parent.relations
    }

    pub fn is_full(&self) -> bool {
        self.basis.cols() == self.parent.rank && *self == SubgroupElt::full_of(&self.parent)
    }

    pub fn join(&self, other: &SubgroupElt) -> Result<SubgroupElt> {
        self.check_parent(other)?;
        let mut cols = self.basis.columns();
        cols.extend(other.basis.columns());
        Ok(SubgroupElt {
            parent: self.parent.clone(),
            basis: self.parent.coeff.span(self.parent.rank, cols),
        })
    }

    pub fn meet(&self, other: &SubgroupElt) -> Result<SubgroupElt> {
        self.check_parent(other)?;
        let coeff = self.parent.coeff;
        let a = &self.basis;
        let block = a.hcat(&other.basis.neg())?;
        let k = coeff.kernel(&block);
        let a_rows: Vec<usize> = (0..a.cols()).collect();
        let coords = k.select_rows(&a_rows);
        let inter = a.mul(&coords)?;
        Ok(SubgroupElt::spanned(self.parent.clone(), inter.columns()))
    }

    /// Shape of the subgroup itself (as a quotient over the zero subgroup).
    pub fn shape(&self) -> QuotientShape {
        quotient_shape(self, &SubgroupElt::zero_of(&self.parent))
            .expect("zero subgroup lies in every subgroup")
            .0
    }
}

/// A homomorphism between presentations, as an integer matrix acting on columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbHom {
    source: Arc<AbPresentation>,
    target: Arc<AbPresentation>,
    matrix: IntMatrix,
}

impl AbHom {
    /// Builds the map without the well-definedness check; see [`AbHom::relation_failure`].
    pub fn new_unchecked(source: AbPresentation, target: AbPresentation, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.rank || matrix.cols() != source.rank {
            return Err(Error::Dimension(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank,
                source.rank
            )));
        }
        if source.coeff != target.coeff {
            return Err(Error::ParentMismatch);
        }
        let matrix = source.coeff.normalize_matrix(&matrix);
        Ok(AbHom {
            source: Arc::new(source),
            target: Arc::new(target),
            matrix,
        })
    }

    pub(crate) fn from_arcs(source: Arc<AbPresentation>, target: Arc<AbPresentation>, matrix: IntMatrix) -> Self {
        let matrix = source.coeff.normalize_matrix(&matrix);
        AbHom { source, target, matrix }
    }

    pub fn new(source: AbPresentation, target: AbPresentation, matrix: IntMatrix) -> Result<Self> {
        let f = Self::new_unchecked(source, target, matrix)?;
        if let Some(column) = f.relation_failure() {
            return Err(Error::IllDefinedMap { index: 0, column });
        }
        Ok(f)
    }

    pub fn identity(obj: &AbPresentation) -> Self {
        AbHom {
            source: Arc::new(obj.clone()),
            target: Arc::new(obj.clone()),
            matrix: IntMatrix::identity(obj.rank),
        }
    }

    /// First source relation column whose image is not a target relation.
    pub fn relation_failure(&self) -> Option<usize> {
        let coeff = self.source.coeff;
        self.source.relations.columns().iter().position(|c| {
            let img = self.matrix.mul_vec(c).expect("shape checked");
            !coeff.contains(&self.target.relations, &img)
        })
    }

    pub fn source(&self) -> &AbPresentation {
        &self.source
    }

    pub fn target(&self) -> &AbPresentation {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AbHom) -> Result<AbHom> {
        if !same_parent(&self.target, &other.source) {
            return Err(Error::ParentMismatch);
        }
        let m = other.matrix.mul(&self.matrix)?;
        Ok(AbHom {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: self.source.coeff.normalize_matrix(&m),
        })
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        let w = self.matrix.mul_vec(v).expect("vector length matches source rank");
        self.source.coeff.normalize(&w)
    }

    pub fn image(&self, s: &SubgroupElt) -> Result<SubgroupElt> {
        if !same_parent(&s.parent, &self.source) {
            return Err(Error::ParentMismatch);
        }
        let img = self.matrix.mul(&s.basis)?;
        Ok(SubgroupElt::spanned(self.target.clone(), img.columns()))
    }

    pub fn preimage(&self, t: &SubgroupElt) -> Result<SubgroupElt> {
        if !same_parent(&t.parent, &self.target) {
            return Err(Error::ParentMismatch);
        }
        let coeff = self.source.coeff;
        let block = self.matrix.hcat(&t.basis.neg())?;
        let k = coeff.kernel(&block);
        let x_rows: Vec<usize> = (0..self.source.rank).collect();
        Ok(SubgroupElt::spanned(
            self.source.clone(),
            k.select_rows(&x_rows).columns(),
        ))
    }

    pub fn kernel(&self) -> SubgroupElt {
        self.preimage(&SubgroupElt::zero_of(&self.target)).expect("same parent")
    }

    pub fn image_of_full(&self) -> SubgroupElt {
        self.image(&SubgroupElt::full_of(&self.source)).expect("same parent")
    }
}

pub fn sub_join(a: &SubgroupElt, b: &SubgroupElt) -> Result<SubgroupElt> {
    a.join(b)
}

pub fn sub_meet(a: &SubgroupElt, b: &SubgroupElt) -> Result<SubgroupElt> {
    a.meet(b)
}

pub fn hom_image(f: &AbHom, s: &SubgroupElt) -> Result<SubgroupElt> {
    f.image(s)
}

pub fn hom_preimage(f: &AbHom, t: &SubgroupElt) -> Result<SubgroupElt> {
    f.preimage(t)
}

/// Isomorphism type of a subquotient: free rank plus invariant factors `> 1`.
/// Over a field only `free_rank` (the dimension) is used.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuotientShape {
    pub free_rank: usize,
    #[serde(with = "bigint_list")]
    pub invariant_factors: Vec<BigInt>,
}

mod bigint_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let as_str: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        as_str.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

impl QuotientShape {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Order of a finite shape.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }

    pub fn torsion_i64(&self) -> Vec<i64> {
        self.invariant_factors
            .iter()
            .map(|d| d.to_i64().expect("invariant factor fits in i64"))
            .collect()
    }

    /// Jordan–Hölder vector of this shape under the given coefficients.
    pub fn jh(&self, coeff: Coeff) -> JhVector {
        if coeff.is_field() {
            let mut torsion = BTreeMap::new();
            if self.free_rank > 0 {
                torsion.insert(SimpleFactor::Field, self.free_rank as u64);
            }
            return JhVector { free_rank: 0, torsion };
        }
        jh_vector(self)
    }
}

impl fmt::Display for QuotientShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("C{d}")).collect();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 {
                "Z".into()
            } else {
                format!("Z^{}", self.free_rank)
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Shape of `num / den` together with generators of the quotient.
pub fn quotient_shape_with_generators(
    num: &SubgroupElt,
    den: &SubgroupElt,
) -> Result<(QuotientShape, Vec<Vec<BigInt>>)> {
    num.check_parent(den)?;
    num.parent.coeff.quotient(&num.basis, &den.basis)
}

pub fn quotient_shape(num: &SubgroupElt, den: &SubgroupElt) -> Result<(QuotientShape, Vec<Vec<BigInt>>)> {
    quotient_shape_with_generators(num, den)
}

/// A simple composition factor: `Z/p` for a prime `p`, or the ground field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleFactor {
    Cyclic(u64),
    Field,
}

impl fmt::Display for SimpleFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleFactor::Cyclic(p) => write!(f, "{p}"),
            SimpleFactor::Field => write!(f, "k"),
        }
    }
}

/// Multiplicities of simple factors plus the free rank (infinite length).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct JhVector {
    pub free_rank: usize,
    pub torsion: BTreeMap<SimpleFactor, u64>,
}

impl JhVector {
    pub fn finite_length(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn add(&self, other: &JhVector) -> JhVector {
        let mut out = self.clone();
        out.free_rank += other.free_rank;
        for (k, v) in &other.torsion {
            *out.torsion.entry(*k).or_insert(0) += v;
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.torsion.values().sum()
    }
}

impl fmt::Display for JhVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.torsion.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))?;
        if self.free_rank > 0 {
            write!(f, " + Z^{}", self.free_rank)?;
        }
        Ok(())
    }
}

fn factorize(n: &BigInt, out: &mut BTreeMap<SimpleFactor, u64>) {
    let mut n = n.abs();
    let mut p = BigInt::from(2u32);
    while &p * &p <= n {
        while n.is_multiple_of(&p) {
            n /= &p;
            *out.entry(SimpleFactor::Cyclic(p.to_u64().expect("prime fits in u64")))
                .or_insert(0) += 1;
        }
        p += 1u32;
    }
    if n > BigInt::one() {
        let q = n.to_u64().expect("prime factor fits in u64");
        *out.entry(SimpleFactor::Cyclic(q)).or_insert(0) += 1;
    }
}

/// Jordan–Hölder vector of a shape over the integers.
pub fn jh_vector(shape: &QuotientShape) -> JhVector {
    let mut torsion = BTreeMap::new();
    for d in &shape.invariant_factors {
        factorize(d, &mut torsion);
    }
    JhVector {
        free_rank: shape.free_rank,
        torsion,
    }
}
