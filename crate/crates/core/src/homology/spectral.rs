//! Leray–Serre terms of the grade filtration and their enumeration by bars.
//!
//! Grades run over `0..=n` with `F_0 = 0`; indices outside are clamped.

use std::collections::BTreeMap;

use serde::Serialize;

use super::engine::homology_barcode;
use super::{homology_diagram, FilteredComplex};
use crate::abgrp::{quotient_shape_with_generators, AbPresentation, JhVector, QuotientShape, SubgroupElt};
use crate::diagram::Interval;
use crate::error::{Error, Result};
use crate::par;
use crate::saecular::type_b_pd;

/// Cached filtrations of `C_m` used by every term of one degree.
#[derive(Clone, Debug)]
pub struct SpectralContext {
    degree: usize,
    n: usize,
    filtration: Vec<SubgroupElt>,
    /// `∂⁻¹ F_k C_{m-1}`.
    preimages: Vec<SubgroupElt>,
    /// `∂ F_k C_{m+1}`.
    images: Vec<SubgroupElt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralTerm {
    pub degree: usize,
    pub p: usize,
    pub q: i64,
    pub r: usize,
    pub cycles: QuotientShape,
    pub boundaries: QuotientShape,
    pub page: QuotientShape,
}

fn rehome(g: &AbPresentation, s: &SubgroupElt) -> Result<SubgroupElt> {
    g.subgroup(s.basis().columns())
}

impl SpectralContext {
    pub fn new(x: &FilteredComplex, m: usize) -> Result<Self> {
        let n = x.n();
        let g = x.chain_group(m);
        let down = x.boundary_hom(m);
        let up = x.boundary_hom(m + 1);
        let mut filtration = Vec::with_capacity(n + 1);
        let mut preimages = Vec::with_capacity(n + 1);
        let mut images = Vec::with_capacity(n + 1);
        for k in 0..=n as i64 {
            filtration.push(rehome(&g, &x.grade_filtration(m, k))?);
            let below = if m == 0 {
                down.target().zero()
            } else {
                rehome(down.target(), &x.grade_filtration(m - 1, k))?
            };
            preimages.push(rehome(&g, &down.preimage(&below)?)?);
            let above = rehome(up.source(), &x.grade_filtration(m + 1, k))?;
            images.push(rehome(&g, &up.image(&above)?)?);
        }
        Ok(SpectralContext {
            degree: m,
            n,
            filtration,
            preimages,
            images,
        })
    }

    fn clamp(&self, k: i64) -> usize {
        k.clamp(0, self.n as i64) as usize
    }

    /// `Z^r_p = F_p ∧ ∂⁻¹ F_{p-r}`.
    pub fn cycles(&self, p: i64, r: i64) -> Result<SubgroupElt> {
        self.filtration[self.clamp(p)].meet(&self.preimages[self.clamp(p - r)])
    }

    /// `B^r_p = F_p ∧ ∂ F_{p+r}`.
    pub fn boundaries(&self, p: i64, r: i64) -> Result<SubgroupElt> {
        self.filtration[self.clamp(p)].meet(&self.images[self.clamp(p + r)])
    }

    pub fn term(&self, p: usize, r: usize) -> Result<SpectralTerm> {
        if p > self.n {
            return Err(Error::OutOfRange(format!("filtration index {p} exceeds {}", self.n)));
        }
        let (pi, ri) = (p as i64, r as i64);
        let z = self.cycles(pi, ri)?;
        let b = self.boundaries(pi, ri)?;
        let den = self.cycles(pi - 1, ri - 1)?.join(&self.boundaries(pi, ri - 1)?)?;
        let (page, _) = quotient_shape_with_generators(&z, &den)?;
        Ok(SpectralTerm {
            degree: self.degree,
            p,
            q: self.degree as i64 - pi,
            r,
            cycles: z.shape(),
            boundaries: b.shape(),
            page,
        })
    }
}

/// `Z^r_{pq}`, `B^r_{pq}` and `E^r_{pq}` in total degree `p + q`.
pub fn ls_terms(x: &FilteredComplex, p: usize, q: i64, r: usize) -> Result<SpectralTerm> {
    let m = p as i64 + q;
    if m < 0 {
        return Err(Error::OutOfRange(format!("total degree {m} is negative")));
    }
    if p > x.n() {
        return Err(Error::OutOfRange(format!("filtration index {p} exceeds {}", x.n())));
    }
    SpectralContext::new(x, m as usize)?.term(p, r)
}

/// JH vectors of bars by `(birth, death)`; zero-persistence pieces sit at `(p, p)`.
type Tau = BTreeMap<(usize, usize), JhVector>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationPoint {
    pub degree: usize,
    pub p: usize,
    pub q: i64,
    pub r: usize,
    pub cycles: bool,
    pub boundaries: bool,
    pub page: bool,
    /// Whether the identities as printed with closed-interval indexing also hold.
    pub literal_boundaries: bool,
    pub literal_page: bool,
}

impl EnumerationPoint {
    pub fn passes(&self) -> bool {
        self.cycles && self.boundaries && self.page
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationReport {
    pub points: Vec<EnumerationPoint>,
    /// Bars of the sparse engine agree with the type-B diagram of the homology diagram.
    pub routes_agree: bool,
}

impl EnumerationReport {
    pub fn all_pass(&self) -> bool {
        self.routes_agree && self.points.iter().all(EnumerationPoint::passes)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.passes()).count()
    }

    pub fn literal_failures(&self) -> usize {
        self.points
            .iter()
            .filter(|p| !(p.literal_boundaries && p.literal_page))
            .count()
    }
}

fn tau_of(x: &FilteredComplex, m: usize) -> Result<(Tau, bool)> {
    let coeff = x.coeff();
    let bars = homology_barcode(x, m)?;
    let tau: Tau = bars
        .shapes()
        .into_iter()
        .map(|(k, s)| (k, s.jh(coeff)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let pd = type_b_pd(&homology_diagram(x, m)?)?;
    let off_diagonal: BTreeMap<Interval, JhVector> = tau
        .iter()
        .filter(|((p, q), _)| p < q)
        .map(|((p, q), v)| (Interval::new(*p, *q), v.clone()))
        .collect();
    Ok((tau, pd.table == off_diagonal))
}

fn get(t: &Tau, a: usize, b: usize) -> JhVector {
    t.get(&(a, b)).cloned().unwrap_or_default()
}

/// JH vector of the singleton `(x, y)` of the grade × boundary-grade grid:
/// `y ≤ n + 1` indexes cycles dying at `y`, larger `y` indexes chains whose
/// boundary is born at `y - n - 1`.
fn singleton(cur: &Tau, prev: Option<&Tau>, n: usize, x: usize, y: usize) -> JhVector {
    if x == 0 {
        return JhVector::default();
    }
    if y <= n + 1 {
        return if x <= y { get(cur, x, y) } else { JhVector::default() };
    }
    let birth = y - (n + 1);
    match prev {
        Some(t) if birth >= 1 && birth <= x => get(t, birth, x),
        _ => JhVector::default(),
    }
}

fn sum(it: impl Iterator<Item = JhVector>) -> JhVector {
    it.fold(JhVector::default(), |a, b| a.add(&b))
}

struct Predicted {
    cycles: JhVector,
    boundaries: JhVector,
    page: JhVector,
}

fn predicted(cur: &Tau, prev: Option<&Tau>, n: usize, p: usize, r: usize) -> Predicted {
    let clamp = |k: i64| k.clamp(0, n as i64) as usize;
    let (pi, ri) = (p as i64, r as i64);
    let top_z = clamp(pi - ri) + n + 1;
    let top_b = clamp(pi + ri);
    let bottom_e = clamp(pi + ri - 1);
    let block = |ymax: usize| {
        sum((1..=p)
            .flat_map(|x| (0..=ymax).map(move |y| (x, y)))
            .map(|(x, y)| singleton(cur, prev, n, x, y)))
    };
    Predicted {
        cycles: block(top_z),
        boundaries: block(top_b),
        page: sum((bottom_e + 1..=top_z).map(|y| singleton(cur, prev, n, p, y))),
    }
}

/// The boundary and page identities read with closed intervals `[a, b]` of
/// `{0..n}`, a bar `[a, b)` being `[a, b - 1]`.
fn literal(cur: &Tau, prev: Option<&Tau>, p: usize, r: usize) -> (JhVector, JhVector) {
    let limit = p as i64 - r as i64;
    let closed = |t: &Tau| -> Vec<(usize, usize, JhVector)> {
        t.iter()
            .filter(|((a, b), _)| a < b)
            .map(|((a, b), v)| (*a, *b - 1, v.clone()))
            .collect()
    };
    let cur_c = closed(cur);
    let boundaries = sum(cur_c
        .iter()
        .filter(|(_, b, _)| (*b as i64) <= limit)
        .map(|(_, _, v)| v.clone()));
    let mut page = sum(cur_c
        .iter()
        .filter(|(a, b, _)| *a == p && *b > p)
        .map(|(_, _, v)| v.clone()));
    if let Some(t) = prev {
        page = page.add(&sum(closed(t)
            .into_iter()
            .filter(|(a, b, _)| *b == p && (*a as i64) <= limit)
            .map(|(_, _, v)| v)));
    }
    (boundaries, page)
}

/// Compares directly computed `Z^r`, `B^r`, `E^r` against the bar sums at
/// every `(p, q, r)` with `0 ≤ p ≤ n`, `0 ≤ r ≤ n + 1` and every degree.
pub fn ls_enumeration_check(x: &FilteredComplex) -> Result<EnumerationReport> {
    let coeff = x.coeff();
    if !coeff.is_field() {
        return Err(Error::InfiniteLength(
            "chain groups over the integers have infinite length; use a field".into(),
        ));
    }
    let n = x.n();
    let degrees = x.max_dim() + 1;
    let taus: Vec<(Tau, bool)> = par::map_range(degrees, |m| tau_of(x, m))
        .into_iter()
        .collect::<Result<_>>()?;
    let contexts: Vec<SpectralContext> = par::map_range(degrees, |m| SpectralContext::new(x, m))
        .into_iter()
        .collect::<Result<_>>()?;
    let grid: Vec<(usize, usize, usize)> = (0..degrees)
        .flat_map(|m| (0..=n).flat_map(move |p| (0..=n + 1).map(move |r| (m, p, r))))
        .collect();
    let points = par::map(&grid, |&(m, p, r)| -> Result<EnumerationPoint> {
        let term = contexts[m].term(p, r)?;
        let cur = &taus[m].0;
        let prev = if m == 0 { None } else { Some(&taus[m - 1].0) };
        let want = predicted(cur, prev, n, p, r);
        let (lit_b, lit_e) = literal(cur, prev, p, r);
        let (z, b, e) = (term.cycles.jh(coeff), term.boundaries.jh(coeff), term.page.jh(coeff));
        Ok(EnumerationPoint {
            degree: m,
            p,
            q: term.q,
            r,
            cycles: z == want.cycles,
            boundaries: b == want.boundaries,
            page: e == want.page,
            literal_boundaries: b == lit_b,
            literal_page: e == lit_e,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(EnumerationReport {
        points,
        routes_agree: taus.iter().all(|(_, ok)| *ok),
    })
}
