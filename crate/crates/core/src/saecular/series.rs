use rand::seq::SliceRandom;
use rand::Rng;

use super::{omega_unchecked, CdfTable, Downset};
use crate::abgrp::{quotient_shape_with_generators, QuotientShape};
use crate::diagram::{all_intervals, is_interval_functor, Interval, IntervalCheck, SubDiagram};
use crate::error::{Error, Result};

/// Smallest downset containing the given intervals.
pub fn down_closure(n: usize, gens: impl IntoIterator<Item = Interval>) -> Downset {
    let gens: Vec<Interval> = gens.into_iter().collect();
    all_intervals(n)
        .into_iter()
        .filter(|i| gens.iter().any(|g| i.le(g)))
        .collect()
}

pub(crate) fn missing_from_downset(n: usize, d: &Downset) -> Option<Interval> {
    d.iter()
        .flat_map(|top| all_intervals(n).into_iter().filter(move |i| i.le(top)))
        .find(|i| !d.contains(i))
}

pub fn is_downset(n: usize, d: &Downset) -> bool {
    d.iter().all(|i| i.is_valid(n)) && missing_from_downset(n, d).is_none()
}

/// Every downset of the interval poset on `{1..n}`; intended for small `n`.
pub fn all_downsets(n: usize) -> Vec<Downset> {
    let intervals = all_intervals(n);
    assert!(
        intervals.len() <= 20,
        "exhaustive downset enumeration is limited to n <= 5"
    );
    // grow downsets by adding intervals in a linear extension order
    let mut out = vec![Downset::new()];
    for i in &intervals {
        let mut next = Vec::new();
        for d in &out {
            next.push(d.clone());
            let preds_in = intervals.iter().filter(|&j| j.le(i) && j != i).all(|j| d.contains(j));
            if preds_in {
                let mut e = d.clone();
                e.insert(*i);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// Down-closure of a few random intervals.
pub fn random_downset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Downset {
    let intervals = all_intervals(n);
    let k = rng.gen_range(0..=3.min(intervals.len()));
    let gens: Vec<Interval> = intervals.choose_multiple(rng, k).copied().collect();
    down_closure(n, gens)
}

/// The default order: by birth, then by death.
pub fn lexicographic_order(n: usize) -> Vec<Interval> {
    all_intervals(n)
}

pub fn is_linear_extension(n: usize, lin: &[Interval]) -> bool {
    let mut sorted = lin.to_vec();
    sorted.sort();
    if sorted != all_intervals(n) {
        return false;
    }
    lin.iter()
        .enumerate()
        .all(|(i, a)| lin[i + 1..].iter().all(|b| !(b.le(a) && b != a)))
}

/// Uniformly picks a minimal remaining interval at each step.
pub fn random_linear_extension<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Interval> {
    let mut remaining = all_intervals(n);
    let mut out = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let minimal: Vec<usize> = (0..remaining.len())
            .filter(|&i| remaining.iter().all(|j| !(j.le(&remaining[i]) && *j != remaining[i])))
            .collect();
        let pick = *minimal.choose(rng).expect("a finite poset has minimal elements");
        out.push(remaining.remove(pick));
    }
    out
}

/// One nonzero step of the reduced series.
#[derive(Clone, Debug)]
pub struct SeriesStep {
    /// Position in the linearization (1-based) of the interval that grew the chain.
    pub position: usize,
    pub support: Interval,
    pub shape: QuotientShape,
    pub upper: SubDiagram,
    pub lower: SubDiagram,
}

#[derive(Clone, Debug)]
pub struct SubsaecularSeries {
    pub linearization: Vec<Interval>,
    /// `chain[k] = Ω` of the first `k` intervals; `chain[0]` is zero.
    pub chain: Vec<SubDiagram>,
    pub reduced: Vec<SeriesStep>,
}

impl SubsaecularSeries {
    /// Sorted `(support, shape)` pairs of the reduced series.
    pub fn factor_multiset(&self) -> Vec<(Interval, QuotientShape)> {
        let mut v: Vec<_> = self.reduced.iter().map(|s| (s.support, s.shape.clone())).collect();
        v.sort();
        v
    }
}

pub fn subsaecular_series(cdf: &CdfTable, lin: &[Interval]) -> Result<SubsaecularSeries> {
    let n = cdf.n();
    if !is_linear_extension(n, lin) {
        return Err(Error::NotLinearExtension(format!("{} intervals supplied", lin.len())));
    }
    let mut chain = vec![cdf.zero().clone()];
    for i in lin {
        let next = omega_unchecked(cdf, std::iter::once(i)).join(chain.last().unwrap())?;
        chain.push(next);
    }
    let mut reduced = Vec::new();
    for (k, i) in lin.iter().enumerate() {
        let (lower, upper) = (&chain[k], &chain[k + 1]);
        if lower == upper {
            continue;
        }
        match is_interval_functor(cdf.diagram(), upper, lower)? {
            IntervalCheck::Interval(found) if found == *i => {}
            other => {
                return Err(Error::NaturalityFailure(format!(
                    "series step {} at {i} has support {other:?}",
                    k + 1
                )))
            }
        }
        let (shape, _) = quotient_shape_with_generators(upper.part(i.p), lower.part(i.p))?;
        reduced.push(SeriesStep {
            position: k + 1,
            support: *i,
            shape,
            upper: upper.clone(),
            lower: lower.clone(),
        });
    }
    Ok(SubsaecularSeries {
        linearization: lin.to_vec(),
        chain,
        reduced,
    })
}
