//! Saecular decomposition of a chain diagram: image and kernel filtrations,
//! the joint distribution table `A[p][q]`, the lattice homomorphism on
//! downsets of intervals, interval factors and the barcode.

mod pd;
mod series;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::abgrp::{quotient_shape_with_generators, QuotientShape};
use crate::diagram::{all_intervals, is_interval_functor, ChainDiagram, Interval, IntervalCheck, SubDiagram};
use crate::error::{Error, Result};
use crate::par;

pub use pd::{field_decompose, jh_of_barcode, mobius_inversion, rank_function, type_b_pd, FieldThread, TypeBPd};
pub use series::{
    all_downsets, down_closure, is_downset, is_linear_extension, lexicographic_order, random_downset,
    random_linear_extension, subsaecular_series, SeriesStep, SubsaecularSeries,
};

/// A set of intervals closed downward in the product order.
pub type Downset = BTreeSet<Interval>;

/// Image filtration `K̂(p)` for `p = 1..n` and kernel filtration `K(q)` for `q = 1..n+1`.
#[derive(Clone, Debug)]
pub struct SaecularFiltrations {
    n: usize,
    khat: Vec<SubDiagram>,
    k: Vec<SubDiagram>,
    zero: SubDiagram,
}

impl SaecularFiltrations {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `K̂(p)`; `p = 0` gives the zero subdiagram.
    pub fn khat(&self, p: usize) -> &SubDiagram {
        if p == 0 {
            &self.zero
        } else {
            &self.khat[p - 1]
        }
    }

    /// `K(q)`; `q = 0` gives the zero subdiagram.
    pub fn k(&self, q: usize) -> &SubDiagram {
        if q == 0 {
            &self.zero
        } else {
            &self.k[q - 1]
        }
    }
}

pub fn saecular_filtrations(d: &ChainDiagram) -> Result<SaecularFiltrations> {
    if let Some((index, column)) = d.validate().failure {
        return Err(Error::IllDefinedMap { index, column });
    }
    let n = d.len();
    let khat = par::map_range(n, |i| {
        let p = i + 1;
        let parts = (1..=n)
            .map(|a| {
                if a <= p {
                    crate::abgrp::SubgroupElt::full_of(d.object_arc(a))
                } else {
                    d.composite(p, a).image_of_full()
                }
            })
            .collect();
        d.sub_from_parts(parts)
    });
    let k = par::map_range(n + 1, |i| {
        let q = i + 1;
        if q == n + 1 {
            return d.full_sub();
        }
        let parts = (1..=n)
            .map(|a| {
                if a < q {
                    d.composite(a, q).kernel()
                } else {
                    crate::abgrp::SubgroupElt::zero_of(d.object_arc(a))
                }
            })
            .collect();
        d.sub_from_parts(parts)
    });
    Ok(SaecularFiltrations {
        n,
        khat,
        k,
        zero: d.zero_sub(),
    })
}

/// `A[p][q] = K̂(p) ∧ K(q)` for `0 ≤ p ≤ n`, `0 ≤ q ≤ n + 1`.
#[derive(Clone, Debug)]
pub struct CdfTable {
    diagram: ChainDiagram,
    filtrations: SaecularFiltrations,
    entries: Vec<SubDiagram>,
}

impl CdfTable {
    pub fn n(&self) -> usize {
        self.diagram.len()
    }

    pub fn diagram(&self) -> &ChainDiagram {
        &self.diagram
    }

    pub fn filtrations(&self) -> &SaecularFiltrations {
        &self.filtrations
    }

    pub fn get(&self, p: usize, q: usize) -> &SubDiagram {
        let n = self.n();
        assert!(p <= n && q <= n + 1, "A[{p}][{q}] out of range");
        &self.entries[p * (n + 2) + q]
    }

    pub fn zero(&self) -> &SubDiagram {
        &self.entries[0]
    }
}

pub fn cdf_table(d: &ChainDiagram, filts: SaecularFiltrations) -> Result<CdfTable> {
    let n = d.len();
    let entries = par::map_range((n + 1) * (n + 2), |i| {
        let (p, q) = (i / (n + 2), i % (n + 2));
        if p == 0 || q == 0 {
            Ok(d.zero_sub())
        } else {
            filts.khat(p).meet(filts.k(q))
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CdfTable {
        diagram: d.clone(),
        filtrations: filts,
        entries,
    })
}

/// Filtrations and table in one step.
pub fn analyze(d: &ChainDiagram) -> Result<CdfTable> {
    let f = saecular_filtrations(d)?;
    cdf_table(d, f)
}

/// Join of `A[p][q]` over the members of a downset.
pub fn omega_on_downset(cdf: &CdfTable, downset: &Downset) -> Result<SubDiagram> {
    let n = cdf.n();
    if let Some(bad) = downset.iter().find(|i| !i.is_valid(n)) {
        return Err(Error::OutOfRange(format!("interval {bad} for n = {n}")));
    }
    if let Some(missing) = series::missing_from_downset(n, downset) {
        return Err(Error::NotDownset(missing.to_string()));
    }
    Ok(omega_unchecked(cdf, downset.iter()))
}

pub(crate) fn omega_unchecked<'a>(cdf: &CdfTable, members: impl Iterator<Item = &'a Interval>) -> SubDiagram {
    let mut acc = cdf.zero().clone();
    for i in members {
        acc = acc.join(cdf.get(i.p, i.q)).expect("table entries share parents");
    }
    acc
}

/// The factor of a chain diagram supported on one interval.
#[derive(Clone, Debug)]
pub struct IntervalFactor {
    pub support: Interval,
    pub num: SubDiagram,
    pub den: SubDiagram,
    pub shape: QuotientShape,
    /// Vectors in the ambient of the birth index whose cosets generate the factor.
    pub generators: Vec<Vec<BigInt>>,
}

impl IntervalFactor {
    pub fn is_zero(&self) -> bool {
        self.shape.is_trivial()
    }
}

pub fn interval_factor(cdf: &CdfTable, interval: Interval) -> Result<IntervalFactor> {
    let n = cdf.n();
    if !interval.is_valid(n) {
        return Err(Error::OutOfRange(format!("interval {interval} for n = {n}")));
    }
    let Interval { p, q } = interval;
    let num = cdf.get(p, q).clone();
    let den = cdf.get(p, q - 1).join(cdf.get(p - 1, q))?;
    let (shape, generators) = quotient_shape_with_generators(num.part(p), den.part(p))?;
    match is_interval_functor(cdf.diagram(), &num, &den)? {
        IntervalCheck::Empty => {}
        IntervalCheck::Interval(found) if found == interval => {}
        IntervalCheck::Interval(found) => {
            return Err(Error::NaturalityFailure(format!(
                "factor at {interval} is supported on {found}"
            )))
        }
        IntervalCheck::Failure(why) => return Err(Error::NaturalityFailure(format!("factor at {interval}: {why}"))),
    }
    Ok(IntervalFactor {
        support: interval,
        num,
        den,
        shape,
        generators,
    })
}

pub fn barcode_from_cdf(cdf: &CdfTable) -> Result<BTreeMap<Interval, IntervalFactor>> {
    let intervals = all_intervals(cdf.n());
    let factors = par::map(&intervals, |&i| interval_factor(cdf, i));
    let mut out = BTreeMap::new();
    for f in factors {
        let f = f?;
        if !f.is_zero() {
            out.insert(f.support, f);
        }
    }
    Ok(out)
}

/// All nonzero interval factors of the diagram, keyed by support.
pub fn barcode(d: &ChainDiagram) -> Result<BTreeMap<Interval, IntervalFactor>> {
    barcode_from_cdf(&analyze(d)?)
}

/// Checks the pushforward and pullback identities of `Ω(S)` against the filtrations.
pub fn check_naturality(cdf: &CdfTable, s: &Downset) -> Result<bool> {
    let d = cdf.diagram();
    let f = cdf.filtrations();
    let sub = omega_on_downset(cdf, s)?;
    let n = d.len();
    for a in 1..=n {
        for b in a..=n {
            let g = d.composite(a, b);
            let khat_ab = f.khat(a).part(b);
            let k_ba = f.k(b).part(a);
            if g.image(sub.part(a))? != sub.part(b).meet(khat_ab)? {
                return Ok(false);
            }
            if g.preimage(sub.part(b))? != sub.part(a).join(k_ba)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeHomReport {
    pub pairs_checked: usize,
    pub join_failures: Vec<(Downset, Downset)>,
    pub meet_failures: Vec<(Downset, Downset)>,
}

impl LatticeHomReport {
    pub fn holds(&self) -> bool {
        self.join_failures.is_empty() && self.meet_failures.is_empty()
    }
}

/// Checks `Ω(D ∪ D') = Ω(D) ∨ Ω(D')` and `Ω(D ∩ D') = Ω(D) ∧ Ω(D')`.
pub fn check_lattice_hom(cdf: &CdfTable, pairs: &[(Downset, Downset)]) -> Result<LatticeHomReport> {
    let results = par::map(pairs, |(x, y)| -> Result<(bool, bool)> {
        let ox = omega_on_downset(cdf, x)?;
        let oy = omega_on_downset(cdf, y)?;
        let union: Downset = x.union(y).copied().collect();
        let inter: Downset = x.intersection(y).copied().collect();
        let join_ok = omega_on_downset(cdf, &union)? == ox.join(&oy)?;
        let meet_ok = omega_on_downset(cdf, &inter)? == ox.meet(&oy)?;
        Ok((join_ok, meet_ok))
    });
    let mut report = LatticeHomReport {
        pairs_checked: pairs.len(),
        ..Default::default()
    };
    for (r, pair) in results.into_iter().zip(pairs) {
        let (j, m) = r?;
        if !j {
            report.join_failures.push(pair.clone());
        }
        if !m {
            report.meet_failures.push(pair.clone());
        }
    }
    Ok(report)
}
