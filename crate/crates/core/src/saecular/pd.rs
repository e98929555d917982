use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::{analyze, barcode_from_cdf, IntervalFactor};
use crate::abgrp::{JhVector, SimpleFactor};
use crate::diagram::{all_intervals, ChainDiagram, Interval};
use crate::error::{Error, Result};

/// Basis threads of one interval summand: `threads[k][a - p]` is the image at
/// index `a` of the `k`-th generator born at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldThread {
    pub interval: Interval,
    pub threads: Vec<Vec<Vec<BigInt>>>,
}

/// Internal direct-sum decomposition of a diagram of vector spaces.
pub fn field_decompose(d: &ChainDiagram) -> Result<Vec<FieldThread>> {
    if !d.coeff().is_field() {
        return Err(Error::NotField);
    }
    let bars = barcode_from_cdf(&analyze(d)?)?;
    Ok(bars.values().map(|f| threads_of(d, f)).collect())
}

fn threads_of(d: &ChainDiagram, f: &IntervalFactor) -> FieldThread {
    let Interval { p, q } = f.support;
    let threads = f
        .generators
        .iter()
        .map(|g| (p..q).map(|a| d.composite(p, a).apply(g)).collect())
        .collect();
    FieldThread {
        interval: f.support,
        threads,
    }
}

/// JH vector of the persistent image from `p` to `q - 1`.
pub fn rank_function(d: &ChainDiagram, interval: Interval) -> Result<JhVector> {
    let n = d.len();
    if !interval.is_valid(n) {
        return Err(Error::OutOfRange(format!("interval {interval} for n = {n}")));
    }
    let image = d.composite(interval.p, interval.q - 1).image_of_full();
    let jh = image.shape().jh(d.coeff());
    if !jh.finite_length() {
        return Err(Error::InfiniteLength(format!(
            "persistent image on {interval} has free rank {}",
            jh.free_rank
        )));
    }
    Ok(jh)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeBPd {
    pub table: BTreeMap<Interval, JhVector>,
}

/// Möbius inversion of the rank function alone, without consulting the barcode.
pub fn mobius_inversion(d: &ChainDiagram) -> Result<TypeBPd> {
    let n = d.len();
    let mut rank: BTreeMap<Interval, JhVector> = BTreeMap::new();
    for i in all_intervals(n) {
        rank.insert(i, rank_function(d, i)?);
    }
    let r = |p: usize, q: usize| -> Option<&JhVector> {
        if p == 0 || q > n + 1 || p >= q {
            None
        } else {
            rank.get(&Interval::new(p, q))
        }
    };
    let mut table = BTreeMap::new();
    for i in all_intervals(n) {
        let Interval { p, q } = i;
        let mut acc: BTreeMap<SimpleFactor, i64> = BTreeMap::new();
        let terms = [(p, q, 1i64), (p - 1, q, -1), (p, q + 1, -1), (p - 1, q + 1, 1)];
        for (a, b, sign) in terms {
            if let Some(v) = r(a, b) {
                for (k, m) in &v.torsion {
                    *acc.entry(*k).or_insert(0) += sign * *m as i64;
                }
            }
        }
        let mut out = JhVector::default();
        for (k, m) in acc {
            if m < 0 {
                return Err(Error::NegativeCoordinate(format!("{i}, factor {k}: {m}")));
            }
            if m > 0 {
                out.torsion.insert(k, m as u64);
            }
        }
        if !out.is_zero() {
            table.insert(i, out);
        }
    }
    Ok(TypeBPd { table })
}

/// JH vectors of the barcode, keyed by support.
pub fn jh_of_barcode(d: &ChainDiagram) -> Result<TypeBPd> {
    let bars = barcode_from_cdf(&analyze(d)?)?;
    let table = bars
        .iter()
        .map(|(i, f)| (*i, f.shape.jh(d.coeff())))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    Ok(TypeBPd { table })
}

/// Type-B diagram by Möbius inversion, cross-checked against the barcode.
pub fn type_b_pd(d: &ChainDiagram) -> Result<TypeBPd> {
    let pd = mobius_inversion(d)?;
    let from_bars = jh_of_barcode(d)?;
    if pd != from_bars {
        return Err(Error::Inconsistent(
            "Moebius inversion of the rank function disagrees with the barcode".into(),
        ));
    }
    Ok(pd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgrp::AbPresentation;
    use crate::coeff::Coeff;
    use crate::intlinalg::IntMatrix;

    fn dcyc() -> ChainDiagram {
        ChainDiagram::cyclic(&[9, 6, 4], &[2, 2]).unwrap()
    }

    fn jh(pairs: &[(u64, u64)]) -> JhVector {
        JhVector {
            free_rank: 0,
            torsion: pairs.iter().map(|&(p, m)| (SimpleFactor::Cyclic(p), m)).collect(),
        }
    }

    /// Standard persistence of a chain of F_p maps: rank of composites, inverted by hand.
    fn classical_bars(d: &ChainDiagram) -> BTreeMap<Interval, u64> {
        let n = d.len();
        let rk = |p: usize, q: usize| -> i64 {
            if p == 0 || q > n + 1 || p >= q {
                0
            } else {
                let m = d.coeff().normalize_matrix(d.composite(p, q - 1).matrix());
                Coeff::Prime(match d.coeff() {
                    Coeff::Prime(x) => x,
                    _ => unreachable!(),
                })
                .span(m.rows(), m.columns())
                .cols() as i64
            }
        };
        let mut out = BTreeMap::new();
        for i in all_intervals(n) {
            let (p, q) = (i.p, i.q);
            let m = rk(p, q) - rk(p - 1, q) - rk(p, q + 1) + rk(p - 1, q + 1);
            assert!(m >= 0);
            if m > 0 {
                out.insert(i, m as u64);
            }
        }
        out
    }

    #[test]
    fn rank_function_of_the_cyclic_diagram() {
        let d = dcyc();
        assert_eq!(rank_function(&d, Interval::new(1, 2)).unwrap(), jh(&[(3, 2)]));
        assert_eq!(rank_function(&d, Interval::new(1, 3)).unwrap(), jh(&[(3, 1)]));
        assert!(rank_function(&d, Interval::new(1, 4)).unwrap().is_zero());
        assert_eq!(rank_function(&d, Interval::new(2, 3)).unwrap(), jh(&[(2, 1), (3, 1)]));
    }

    #[test]
    fn type_b_of_the_cyclic_diagram() {
        let pd = type_b_pd(&dcyc()).unwrap();
        let expected = BTreeMap::from([
            (Interval::new(1, 2), jh(&[(3, 1)])),
            (Interval::new(1, 3), jh(&[(3, 1)])),
            (Interval::new(2, 4), jh(&[(2, 1)])),
            (Interval::new(3, 4), jh(&[(2, 1)])),
        ]);
        assert_eq!(pd.table, expected);
    }

    #[test]
    fn zero_diagram_has_empty_pd() {
        let d = ChainDiagram::cyclic(&[1, 1], &[0]).unwrap();
        assert!(type_b_pd(&d).unwrap().table.is_empty());
    }

    #[test]
    fn infinite_length_is_rejected() {
        let d = ChainDiagram::cyclic(&[0, 0], &[2]).unwrap();
        assert!(matches!(
            rank_function(&d, Interval::new(1, 2)),
            Err(Error::InfiniteLength(_))
        ));
    }

    fn f2_projection() -> ChainDiagram {
        let a = AbPresentation::free(Coeff::Prime(2), 2);
        let b = AbPresentation::free(Coeff::Prime(2), 1);
        ChainDiagram::new(vec![a, b], vec![IntMatrix::from_i64(1, 2, &[1, 0])]).unwrap()
    }

    #[test]
    fn projection_decomposes_into_two_bars() {
        let d = f2_projection();
        let parts = field_decompose(&d).unwrap();
        let bars: Vec<(Interval, usize)> = parts.iter().map(|t| (t.interval, t.threads.len())).collect();
        assert_eq!(bars, vec![(Interval::new(1, 2), 1), (Interval::new(1, 3), 1)]);
        let expected = BTreeMap::from([(Interval::new(1, 2), 1), (Interval::new(1, 3), 1)]);
        assert_eq!(classical_bars(&d), expected);
        let pd = type_b_pd(&d).unwrap();
        let counts: BTreeMap<Interval, u64> = pd.table.iter().map(|(i, v)| (*i, v.total())).collect();
        assert_eq!(counts, expected);
    }

    #[test]
    fn identity_chain_has_full_threads() {
        let v = AbPresentation::free(Coeff::Prime(5), 3);
        let d = ChainDiagram::new(vec![v.clone(), v.clone(), v], vec![IntMatrix::identity(3); 2]).unwrap();
        let parts = field_decompose(&d).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].interval, Interval::new(1, 4));
        assert_eq!(parts[0].threads.len(), 3);
        assert!(field_decompose(&dcyc()).is_err());
    }
}
