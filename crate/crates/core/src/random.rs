//! Seeded generators for diagrams, complexes and group diagrams.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::abgrp::AbPresentation;
use crate::coeff::Coeff;
use crate::diagram::ChainDiagram;
use crate::error::Result;
use crate::fingroup::{closure, FiniteGroup, GroupDiagram, GroupHom};
use crate::homology::{CellId, CellSpec, FilteredComplex};
use crate::intlinalg::{kernel_basis, IntMatrix};
use std::sync::Arc;

const TORSION: [i64; 8] = [1, 2, 3, 4, 5, 6, 8, 9];

/// Random unimodular matrix together with its inverse.
fn unimodular<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(n);
    let mut p_inv = IntMatrix::identity(n);
    if n < 2 {
        return (p, p_inv);
    }
    for _ in 0..2 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        // E = I + c e_ij; P ← P E, P⁻¹ ← E⁻¹ P⁻¹
        for r in 0..n {
            let v = p.get(r, j) + &c * p.get(r, i);
            p.set(r, j, v);
        }
        for col in 0..n {
            let v = p_inv.get(i, col) - &c * p_inv.get(j, col);
            p_inv.set(i, col, v);
        }
    }
    (p, p_inv)
}

struct TorsionObject {
    orders: Vec<i64>,
    basis: IntMatrix,
    basis_inv: IntMatrix,
}

/// Random chain diagram of finite abelian groups: each object is `⊕ Z/d_i`
/// presented in a scrambled basis, each map is a well-defined diagonal-block
/// map conjugated accordingly.
pub fn random_torsion_diagram<R: Rng + ?Sized>(rng: &mut R, max_len: usize, max_rank: usize) -> ChainDiagram {
    let len = rng.gen_range(1..=max_len.max(1));
    let objects: Vec<TorsionObject> = (0..len)
        .map(|_| {
            let r = rng.gen_range(1..=max_rank.max(1));
            let orders = (0..r).map(|_| *TORSION.choose(rng).unwrap()).collect();
            let (basis, basis_inv) = unimodular(rng, r);
            TorsionObject {
                orders,
                basis,
                basis_inv,
            }
        })
        .collect();
    let presentations = objects
        .iter()
        .map(|o| {
            let r = o.orders.len();
            let rels = (0..r)
                .map(|j| {
                    let col: Vec<BigInt> = o.basis.column(j).iter().map(|x| x * o.orders[j]).collect();
                    col
                })
                .collect();
            AbPresentation::new(Coeff::Integers, r, rels).expect("relation length matches rank")
        })
        .collect();
    let maps = objects
        .windows(2)
        .map(|w| {
            let (s, t) = (&w[0], &w[1]);
            let mut f = IntMatrix::zeros(t.orders.len(), s.orders.len());
            for i in 0..t.orders.len() {
                for j in 0..s.orders.len() {
                    let (e, d) = (t.orders[i], s.orders[j]);
                    let step = e / e.gcd(&d);
                    f.set(i, j, BigInt::from(step * rng.gen_range(0..3i64)));
                }
            }
            t.basis.mul(&f).and_then(|m| m.mul(&s.basis_inv)).expect("shapes agree")
        })
        .collect();
    ChainDiagram::new(presentations, maps).expect("maps respect relations by construction")
}

/// Parameters for random filtered complexes.
#[derive(Clone, Copy, Debug)]
pub struct ComplexParams {
    pub max_cells: usize,
    pub max_dim: usize,
    pub grades: usize,
    /// Coefficients multiplying each attached cycle (e.g. `[1]` or `[2, 3, 4]`).
    pub multipliers: &'static [i64],
}

/// Random integer filtered complex. Edges join two vertices; higher cells are
/// attached along integer combinations of cycles of the previous dimension,
/// scaled by one of `multipliers`, so `∂∂ = 0` over `Z`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, params: ComplexParams, coeff: Coeff) -> Result<FilteredComplex> {
    let n = params.grades.max(1);
    let total = rng.gen_range(3..=params.max_cells.max(3));
    let mut dims: Vec<Vec<(usize, Vec<(usize, i64)>)>> = vec![Vec::new(); params.max_dim + 1];
    let n_vertices = (total / 3).max(2);
    for _ in 0..n_vertices {
        dims[0].push((rng.gen_range(1..=n), Vec::new()));
    }
    let mut remaining = total - n_vertices;
    for m in 1..=params.max_dim {
        if remaining == 0 {
            break;
        }
        let budget = if m == params.max_dim {
            remaining
        } else {
            rng.gen_range(1..=remaining)
        };
        for _ in 0..budget {
            let faces = &dims[m - 1];
            let boundary: Vec<(usize, i64)> = if m == 1 {
                let a = rng.gen_range(0..faces.len());
                let b = rng.gen_range(0..faces.len());
                if a == b {
                    Vec::new()
                } else {
                    vec![(a, -1), (b, 1)]
                }
            } else {
                let cycles = cycle_basis(&dims, m - 1);
                if cycles.is_empty() || rng.gen_bool(0.15) {
                    Vec::new()
                } else {
                    let k = rng.gen_range(1..=cycles.len().min(2));
                    let mut acc = vec![0i64; faces.len()];
                    for z in cycles.choose_multiple(rng, k) {
                        let c = *[-1i64, 1, 2].choose(rng).unwrap();
                        for (x, y) in acc.iter_mut().zip(z) {
                            *x += c * y;
                        }
                    }
                    let s = *params.multipliers.choose(rng).unwrap();
                    acc.iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0)
                        .map(|(i, v)| (i, v * s))
                        .collect()
                }
            };
            let floor = boundary.iter().map(|(i, _)| faces[*i].0).max().unwrap_or(1);
            dims[m].push((rng.gen_range(floor..=n), boundary));
        }
        remaining -= budget;
    }
    let name = |m: usize, i: usize| CellId::Name(format!("c{m}_{i}"));
    let mut specs = Vec::new();
    for (m, cells) in dims.iter().enumerate() {
        for (i, (grade, bd)) in cells.iter().enumerate() {
            specs.push(CellSpec {
                id: name(m, i),
                dim: m,
                grade: *grade,
                boundary: bd.iter().map(|(f, c)| (name(m - 1, *f), BigInt::from(*c))).collect(),
            });
        }
    }
    FilteredComplex::new(coeff, n, specs)
}

/// Integer cycle basis of the `m`-cells built so far, as dense vectors.
fn cycle_basis(dims: &[Vec<(usize, Vec<(usize, i64)>)>], m: usize) -> Vec<Vec<i64>> {
    let cols = dims[m].len();
    if m == 0 {
        return (0..cols)
            .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
            .collect();
    }
    let rows = dims[m - 1].len();
    let mut d = IntMatrix::zeros(rows, cols);
    for (j, (_, bd)) in dims[m].iter().enumerate() {
        for (i, c) in bd {
            let v = d.get(*i, j) + BigInt::from(*c);
            d.set(*i, j, v);
        }
    }
    kernel_basis(&d)
        .columns()
        .into_iter()
        .filter_map(|c| {
            c.iter()
                .map(i64::try_from)
                .collect::<std::result::Result<Vec<_>, _>>()
                .ok()
        })
        .collect()
}

/// Triangulated torus on a `w × h` vertex grid (`6wh` cells) with random
/// vertex grades in `1..=grades`, each higher cell entering with its last face.
pub fn torus<R: Rng + ?Sized>(rng: &mut R, w: usize, h: usize, grades: usize, coeff: Coeff) -> Result<FilteredComplex> {
    let vid = |i: usize, j: usize| (i % w) * h + (j % h);
    let vgrade: Vec<usize> = (0..w * h).map(|_| rng.gen_range(1..=grades)).collect();
    let v = |k: usize| CellId::Name(format!("p{k}"));
    let e = |kind: char, i: usize, j: usize| CellId::Name(format!("{kind}{}", vid(i, j)));
    let mut specs = Vec::with_capacity(6 * w * h);
    for k in 0..w * h {
        specs.push(CellSpec {
            id: v(k),
            dim: 0,
            grade: vgrade[k],
            boundary: Vec::new(),
        });
    }
    let one = BigInt::one();
    let edge = |kind: char, i: usize, j: usize, from: usize, to: usize| CellSpec {
        id: e(kind, i, j),
        dim: 1,
        grade: vgrade[from].max(vgrade[to]),
        boundary: vec![(v(from), -one.clone()), (v(to), one.clone())],
    };
    let mut egrade = std::collections::HashMap::new();
    for i in 0..w {
        for j in 0..h {
            for (kind, to) in [('h', vid(i + 1, j)), ('v', vid(i, j + 1)), ('d', vid(i + 1, j + 1))] {
                let s = edge(kind, i, j, vid(i, j), to);
                egrade.insert(s.id.clone(), s.grade);
                specs.push(s);
            }
        }
    }
    for i in 0..w {
        for j in 0..h {
            let tris = [
                ("s", [(e('h', i, j), 1), (e('v', i + 1, j), 1), (e('d', i, j), -1)]),
                ("t", [(e('v', i, j), 1), (e('h', i, j + 1), 1), (e('d', i, j), -1)]),
            ];
            for (tag, faces) in tris {
                let grade = faces.iter().map(|(f, _)| egrade[f]).max().unwrap();
                specs.push(CellSpec {
                    id: CellId::Name(format!("{tag}{}", vid(i, j))),
                    dim: 2,
                    grade,
                    boundary: faces.iter().map(|(f, c)| (f.clone(), BigInt::from(*c))).collect(),
                });
            }
        }
    }
    FilteredComplex::new(coeff, grades, specs)
}

/// Groups of order at most 24 used by the random group suite.
pub fn small_group_catalog() -> Vec<FiniteGroup> {
    let mut out = Vec::new();
    for n in [1, 2, 3, 4, 5, 6, 8, 12] {
        out.push(FiniteGroup::cyclic(n).unwrap());
    }
    for n in [3, 4, 5, 6] {
        out.push(FiniteGroup::dihedral(n).unwrap());
    }
    out.push(FiniteGroup::symmetric(4).unwrap());
    out.push(FiniteGroup::alternating(4).unwrap());
    out.push(FiniteGroup::quaternion());
    out.push(FiniteGroup::abelian(&[2, 2]).unwrap());
    out.push(FiniteGroup::abelian(&[2, 4]).unwrap());
    out.push(FiniteGroup::abelian(&[2, 2, 2]).unwrap());
    out.push(
        FiniteGroup::direct_product(&FiniteGroup::symmetric(3).unwrap(), &FiniteGroup::cyclic(2).unwrap()).unwrap(),
    );
    out.push(
        FiniteGroup::direct_product(&FiniteGroup::symmetric(3).unwrap(), &FiniteGroup::cyclic(3).unwrap()).unwrap(),
    );
    out
}

/// A small generating set, found greedily.
pub fn generators(g: &Arc<FiniteGroup>) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut cur = closure(g, &[]).expect("empty generating set");
    // prefer elements of large order
    let mut order: Vec<usize> = (1..g.order()).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(g.element_order(x)));
    for x in order {
        if !cur.contains(x) {
            gens.push(x);
            cur = closure(g, &gens).expect("elements of the group");
        }
    }
    gens
}

/// Random homomorphism by choosing generator images and extending along words;
/// inconsistent choices are retried, falling back to the trivial map.
pub fn random_hom<R: Rng + ?Sized>(rng: &mut R, source: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> GroupHom {
    let gens = generators(source);
    for _ in 0..40 {
        let images: Vec<usize> = gens
            .iter()
            .map(|&s| {
                let o = source.element_order(s);
                let candidates: Vec<usize> = (0..target.order())
                    .filter(|&t| o % target.element_order(t) == 0)
                    .collect();
                *candidates.choose(rng).expect("identity always qualifies")
            })
            .collect();
        let mut map = vec![usize::MAX; source.order()];
        map[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut ok = true;
        'walk: while let Some(x) = queue.pop_front() {
            for (s, t) in gens.iter().zip(&images) {
                let y = source.mul(x, *s);
                let val = target.mul(map[x], *t);
                if map[y] == usize::MAX {
                    map[y] = val;
                    queue.push_back(y);
                } else if map[y] != val {
                    ok = false;
                    break 'walk;
                }
            }
        }
        if ok {
            if let Ok(f) = GroupHom::new(source.clone(), target.clone(), map) {
                return f;
            }
        }
    }
    GroupHom::new(source.clone(), target.clone(), vec![0; source.order()]).expect("trivial map")
}

pub fn random_group_diagram<R: Rng + ?Sized>(rng: &mut R, max_len: usize) -> GroupDiagram {
    let catalog = small_group_catalog();
    let len = rng.gen_range(1..=max_len.max(1));
    let groups: Vec<Arc<FiniteGroup>> = (0..len)
        .map(|_| Arc::new(catalog.choose(rng).unwrap().clone()))
        .collect();
    let maps = groups.windows(2).map(|w| random_hom(rng, &w[0], &w[1]).map()).collect();
    let owned = groups.iter().map(|g| (**g).clone()).collect();
    GroupDiagram::new(owned, maps).expect("maps are homomorphisms")
}
