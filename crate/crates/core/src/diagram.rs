//! Finite chain diagrams `f_1 → f_2 → … → f_n`, their subdiagrams, and the
//! interval-functor test. Indices are 1-based; a death bound `q = n + 1`
//! stands for a bar that never dies.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::abgrp::{AbHom, AbPresentation, SubgroupElt};
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::intlinalg::IntMatrix;

/// Half-open interval `[p, q)` of indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub p: usize,
    pub q: usize,
}

impl Interval {
    pub fn new(p: usize, q: usize) -> Self {
        Interval { p, q }
    }

    pub fn contains(&self, a: usize) -> bool {
        self.p <= a && a < self.q
    }

    /// Product order: `[p,q) ≤ [p',q')` iff `p ≤ p'` and `q ≤ q'`.
    pub fn le(&self, other: &Interval) -> bool {
        self.p <= other.p && self.q <= other.q
    }

    pub fn is_valid(&self, n: usize) -> bool {
        1 <= self.p && self.p < self.q && self.q <= n + 1
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.p, self.q)
    }
}

/// Every nonempty interval of `{1..n}` in lexicographic order.
pub fn all_intervals(n: usize) -> Vec<Interval> {
    (1..=n)
        .flat_map(|p| (p + 1..=n + 1).map(move |q| Interval { p, q }))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    /// First offending map (1-based source index) and relation column.
    pub failure: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct ChainDiagram {
    coeff: Coeff,
    objects: Vec<Arc<AbPresentation>>,
    steps: Vec<AbHom>,
    /// `composites[a][b - a]` is the map from index `a+1` to `b+1` (0-based storage).
    composites: Vec<Vec<AbHom>>,
}

impl ChainDiagram {
    /// Builds a diagram and checks that every map is well defined.
    pub fn new(objects: Vec<AbPresentation>, maps: Vec<IntMatrix>) -> Result<Self> {
        let d = Self::new_unchecked(objects, maps)?;
        if let Some((index, column)) = d.validate().failure {
            return Err(Error::IllDefinedMap { index, column });
        }
        Ok(d)
    }

    /// Builds a diagram checking only shapes; see [`ChainDiagram::validate`].
    pub fn new_unchecked(objects: Vec<AbPresentation>, maps: Vec<IntMatrix>) -> Result<Self> {
        if objects.is_empty() {
            return Err(Error::InvalidDiagram("a diagram needs at least one object".into()));
        }
        if maps.len() + 1 != objects.len() {
            return Err(Error::InvalidDiagram(format!(
                "{} objects need {} maps, got {}",
                objects.len(),
                objects.len() - 1,
                maps.len()
            )));
        }
        let coeff = objects[0].coeff();
        if objects.iter().any(|o| o.coeff() != coeff) {
            return Err(Error::InvalidDiagram("objects use different coefficients".into()));
        }
        let objects: Vec<Arc<AbPresentation>> = objects.into_iter().map(Arc::new).collect();
        let mut steps = Vec::with_capacity(maps.len());
        for (a, m) in maps.into_iter().enumerate() {
            let (src, dst) = (&objects[a], &objects[a + 1]);
            if m.rows() != dst.rank() || m.cols() != src.rank() {
                return Err(Error::Dimension(format!(
                    "map {} is {}x{}, expected {}x{}",
                    a + 1,
                    m.rows(),
                    m.cols(),
                    dst.rank(),
                    src.rank()
                )));
            }
            steps.push(AbHom::from_arcs(src.clone(), dst.clone(), m));
        }
        let n = objects.len();
        let composites = (0..n)
            .map(|a| {
                let mut row = vec![AbHom::from_arcs(
                    objects[a].clone(),
                    objects[a].clone(),
                    IntMatrix::identity(objects[a].rank()),
                )];
                for b in a..n - 1 {
                    let next = row.last().unwrap().then(&steps[b]).expect("consecutive maps compose");
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(ChainDiagram {
            coeff,
            objects,
            steps,
            composites,
        })
    }

    /// Convenience constructor for diagrams of cyclic groups `Z/orders[i]`
    /// with multiplication maps.
    pub fn cyclic(orders: &[i64], multipliers: &[i64]) -> Result<Self> {
        let objects = orders.iter().map(|&d| AbPresentation::cyclic(d)).collect();
        let maps = multipliers.iter().map(|&m| IntMatrix::from_i64(1, 1, &[m])).collect();
        Self::new(objects, maps)
    }

    pub fn validate(&self) -> ValidationReport {
        for (a, f) in self.steps.iter().enumerate() {
            if let Some(c) = f.relation_failure() {
                return ValidationReport {
                    valid: false,
                    failure: Some((a + 1, c)),
                };
            }
        }
        ValidationReport {
            valid: true,
            failure: None,
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self) -> Coeff {
        self.coeff
    }

    pub fn object(&self, a: usize) -> &AbPresentation {
        &self.objects[a - 1]
    }

    pub(crate) fn object_arc(&self, a: usize) -> &Arc<AbPresentation> {
        &self.objects[a - 1]
    }

    /// Map from index `a` to `a + 1`.
    pub fn step(&self, a: usize) -> &AbHom {
        &self.steps[a - 1]
    }

    /// Map from index `a` to index `b`, for `a ≤ b`.
    pub fn composite(&self, a: usize, b: usize) -> &AbHom {
        assert!(1 <= a && a <= b && b <= self.len(), "composite({a},{b}) out of range");
        &self.composites[a - 1][b - a]
    }

    pub fn zero_sub(&self) -> SubDiagram {
        SubDiagram {
            parts: self.objects.iter().map(SubgroupElt::zero_of).collect(),
        }
    }

    pub fn full_sub(&self) -> SubDiagram {
        SubDiagram {
            parts: self.objects.iter().map(SubgroupElt::full_of).collect(),
        }
    }

    /// Subdiagram from per-index generator lists; fails if not compatible.
    pub fn sub_from_generators(&self, gens: Vec<Vec<Vec<BigInt>>>) -> Result<SubDiagram> {
        if gens.len() != self.len() {
            return Err(Error::Dimension(format!(
                "{} parts for {} objects",
                gens.len(),
                self.len()
            )));
        }
        let parts = gens
            .into_iter()
            .zip(&self.objects)
            .map(|(g, o)| {
                if g.iter().any(|v| v.len() != o.rank()) {
                    return Err(Error::Dimension("generator length does not match rank".into()));
                }
                Ok(SubgroupElt::from_gens(o, g))
            })
            .collect::<Result<Vec<_>>>()?;
        let s = SubDiagram { parts };
        if !s.is_compatible(self)? {
            return Err(Error::InvalidDiagram(
                "parts are not carried into each other by the maps".into(),
            ));
        }
        Ok(s)
    }

    pub(crate) fn sub_from_parts(&self, parts: Vec<SubgroupElt>) -> SubDiagram {
        debug_assert_eq!(parts.len(), self.len());
        SubDiagram { parts }
    }
}

/// An index-wise family of subobjects carried forward by the maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubDiagram {
    parts: Vec<SubgroupElt>,
}

impl SubDiagram {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Part at index `a` (1-based).
    pub fn part(&self, a: usize) -> &SubgroupElt {
        &self.parts[a - 1]
    }

    pub fn parts(&self) -> &[SubgroupElt] {
        &self.parts
    }

    fn zip_with(
        &self,
        other: &SubDiagram,
        f: impl Fn(&SubgroupElt, &SubgroupElt) -> Result<SubgroupElt>,
    ) -> Result<SubDiagram> {
        if self.len() != other.len() {
            return Err(Error::ParentMismatch);
        }
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubDiagram { parts })
    }

    pub fn join(&self, other: &SubDiagram) -> Result<SubDiagram> {
        self.zip_with(other, SubgroupElt::join)
    }

    pub fn meet(&self, other: &SubDiagram) -> Result<SubDiagram> {
        self.zip_with(other, SubgroupElt::meet)
    }

    pub fn le(&self, other: &SubDiagram) -> Result<bool> {
        if self.len() != other.len() {
            return Err(Error::ParentMismatch);
        }
        for (a, b) in self.parts.iter().zip(&other.parts) {
            if !a.le(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(SubgroupElt::is_zero)
    }

    /// Whether every step map carries part `a` into part `a + 1`.
    pub fn is_compatible(&self, d: &ChainDiagram) -> Result<bool> {
        if self.len() != d.len() {
            return Err(Error::ParentMismatch);
        }
        for a in 1..d.len() {
            if !d.step(a).image(self.part(a))?.le(self.part(a + 1))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn sub_join_diag(a: &SubDiagram, b: &SubDiagram) -> Result<SubDiagram> {
    a.join(b)
}

pub fn sub_meet_diag(a: &SubDiagram, b: &SubDiagram) -> Result<SubDiagram> {
    a.meet(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntervalCheck {
    /// `num = den` everywhere.
    Empty,
    Interval(Interval),
    Failure(String),
}

/// Decides whether `num / den` is an interval functor and returns its support.
pub fn is_interval_functor(d: &ChainDiagram, num: &SubDiagram, den: &SubDiagram) -> Result<IntervalCheck> {
    if !den.le(num)? {
        return Err(Error::NotNested(String::new()));
    }
    let n = d.len();
    let live: Vec<usize> = (1..=n).filter(|&a| num.part(a) != den.part(a)).collect();
    let (Some(&p), Some(&last)) = (live.first(), live.last()) else {
        return Ok(IntervalCheck::Empty);
    };
    if last - p + 1 != live.len() {
        return Ok(IntervalCheck::Failure(format!("support {live:?} is not contiguous")));
    }
    let q = last + 1;
    for a in 1..n {
        let f = d.step(a);
        if !f.image(num.part(a))?.le(num.part(a + 1))? || !f.image(den.part(a))?.le(den.part(a + 1))? {
            return Ok(IntervalCheck::Failure(format!(
                "map {a} does not respect the subquotient"
            )));
        }
    }
    for a in p..q - 1 {
        let f = d.step(a);
        let onto = f.image(num.part(a))?.join(den.part(a + 1))? == *num.part(a + 1);
        let into = f.preimage(den.part(a + 1))?.meet(num.part(a))? == *den.part(a);
        if !onto || !into {
            return Ok(IntervalCheck::Failure(format!(
                "induced map {a} -> {} is not an isomorphism",
                a + 1
            )));
        }
    }
    Ok(IntervalCheck::Interval(Interval { p, q }))
}
