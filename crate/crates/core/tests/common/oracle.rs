//! Standard persistence by left-to-right column reduction over `F_p`,
//! computed from the raw cell list without the library's echelon code.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use saecula::homology::FilteredComplex;

fn inv(a: u64, p: u64) -> u64 {
    // Fermat
    let (mut base, mut e, mut acc) = (a % p, p - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Bar multiplicities keyed by `(degree, birth, death)`; `death = n + 1`
/// for classes that never die. Pairs born and killed in one grade are dropped.
pub fn standard_bars(x: &FilteredComplex, p: u64) -> BTreeMap<(usize, usize, usize), usize> {
    let cells = x.cells();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (cells[i].grade, cells[i].dim, i));
    let mut pos = vec![0; cells.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let modulus = BigInt::from(p);
    let mut cols: Vec<BTreeMap<usize, u64>> = order
        .iter()
        .map(|&i| {
            let mut c = BTreeMap::new();
            for (f, v) in &cells[i].boundary {
                let r = v.mod_floor(&modulus).to_u64().unwrap();
                if r != 0 {
                    c.insert(pos[*f], r);
                }
            }
            c
        })
        .collect();
    let mut low_owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut paired = vec![false; cols.len()];
    for j in 0..cols.len() {
        while let Some((&low, &a)) = cols[j].iter().next_back() {
            let Some(&k) = low_owner.get(&low) else { break };
            let b = cols[k][&low];
            let factor = a * inv(b, p) % p;
            let other = cols[k].clone();
            for (r, v) in other {
                let e = cols[j].entry(r).or_insert(0);
                *e = (*e + p - factor * v % p) % p;
                if *e == 0 {
                    cols[j].remove(&r);
                }
            }
        }
        if let Some((&low, _)) = cols[j].iter().next_back() {
            low_owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
        }
    }
    let n = x.n();
    let mut out = BTreeMap::new();
    for (&low, &j) in &low_owner {
        let (b, d) = (&cells[order[low]], &cells[order[j]]);
        if b.grade < d.grade {
            *out.entry((b.dim, b.grade, d.grade)).or_insert(0) += 1;
        }
    }
    for k in 0..cols.len() {
        if !paired[k] {
            let c = &cells[order[k]];
            *out.entry((c.dim, c.grade, n + 1)).or_insert(0) += 1;
        }
    }
    out
}
