//! Chain diagrams of small finite groups, given by Cayley tables.
//!
//! Subgroups are bitsets over element indices; identity is element `0`.
//! Filtrations, the generated lattice, coset and normalized factors follow the
//! abelian construction with subgroup joins in place of sums.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::Coeff;
use crate::diagram::{ChainDiagram, Interval};
use crate::error::{Error, Result};
use crate::intlinalg::{snf_with_inverse, IntMatrix};
use crate::par;

pub const ORDER_CAP: usize = 512;

/// Tables up to this order are checked for associativity exhaustively.
const FULL_CHECK_ORDER: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    k: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup(order {})", self.k)
    }
}

impl FiniteGroup {
    /// Validates a multiplication table under the default order cap.
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_cap(rows, ORDER_CAP)
    }

    pub fn with_cap(rows: Vec<Vec<usize>>, cap: usize) -> Result<Self> {
        let k = rows.len();
        if k > cap {
            return Err(Error::OrderCap { order: k, cap });
        }
        if k == 0 {
            return Err(Error::MalformedGroup("empty table".into()));
        }
        let mut table = Vec::with_capacity(k * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::MalformedGroup(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            for &x in row {
                if x >= k {
                    return Err(Error::MalformedGroup(format!("entry {x} in row {i} is not an element")));
                }
                table.push(x as u32);
            }
        }
        for x in 0..k {
            if table[x] as usize != x || table[x * k] as usize != x {
                return Err(Error::MalformedGroup(format!("element 0 is not an identity for {x}")));
            }
        }
        let mut seen = vec![false; k];
        for i in 0..k {
            seen.iter_mut().for_each(|s| *s = false);
            for j in 0..k {
                let x = table[i * k + j] as usize;
                if seen[x] {
                    return Err(Error::MalformedGroup(format!("row {i} repeats element {x}")));
                }
                seen[x] = true;
            }
        }
        let g = Self::from_flat(k, table);
        if let Some((a, b, c)) = g.associativity_failure() {
            return Err(Error::MalformedGroup(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
        }
        Ok(g)
    }

    /// Builds from a table already known to be a group.
    fn from_flat(k: usize, table: Vec<u32>) -> Self {
        let mut inv = vec![0u32; k];
        for a in 0..k {
            let b = (0..k).find(|&b| table[a * k + b] == 0).expect("rows are permutations");
            inv[a] = b as u32;
        }
        FiniteGroup { k, table, inv }
    }

    fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        let k = self.k;
        let check = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if k <= FULL_CHECK_ORDER {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        if !check(a, b, c) {
                            return Some((a, b, c));
                        }
                    }
                }
            }
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for _ in 0..20_000 {
            let (a, b, c) = (rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k));
            if !check(a, b, c) {
                return Some((a, b, c));
            }
        }
        None
    }

    pub fn order(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.k + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        (0..self.k)
            .map(|a| (0..self.k).map(|b| self.mul(a, b)).collect())
            .collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.k).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedGroup("cyclic group of order 0".into()));
        }
        if n > ORDER_CAP {
            return Err(Error::OrderCap {
                order: n,
                cap: ORDER_CAP,
            });
        }
        let table = (0..n * n).map(|i| ((i / n + i % n) % n) as u32).collect();
        Ok(Self::from_flat(n, table))
    }

    /// Elements `(g, h)` indexed `g * |h| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let k = g.k * h.k;
        if k > ORDER_CAP {
            return Err(Error::OrderCap {
                order: k,
                cap: ORDER_CAP,
            });
        }
        let mut table = Vec::with_capacity(k * k);
        for x in 0..k {
            for y in 0..k {
                let (gx, hx, gy, hy) = (x / h.k, x % h.k, y / h.k, y % h.k);
                table.push((g.mul(gx, gy) * h.k + h.mul(hx, hy)) as u32);
            }
        }
        Ok(Self::from_flat(k, table))
    }

    /// Group generated by permutations of `0..d`, composed right to left.
    /// Element `0` is the identity; the rest are numbered in discovery order.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<(Self, Vec<Vec<usize>>)> {
        let d = gens.first().map_or(0, Vec::len);
        for g in gens {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if g.len() != d || sorted != (0..d).collect::<Vec<_>>() {
                return Err(Error::MalformedGroup(
                    "generators are not permutations of a common set".into(),
                ));
            }
        }
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&i| a[i]).collect() };
        let id: Vec<usize> = (0..d).collect();
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let x = compose(&elements[i], g);
                if !index.contains_key(&x) {
                    if elements.len() == ORDER_CAP {
                        return Err(Error::OrderCap {
                            order: ORDER_CAP + 1,
                            cap: ORDER_CAP,
                        });
                    }
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        let k = elements.len();
        let mut table = Vec::with_capacity(k * k);
        for a in &elements {
            for b in &elements {
                table.push(index[&compose(a, b)] as u32);
            }
        }
        Ok((Self::from_flat(k, table), elements))
    }

    /// Dihedral group of order `2n`.
    pub fn dihedral(n: usize) -> Result<Self> {
        match n {
            0 => Err(Error::MalformedGroup("dihedral group of a 0-gon".into())),
            1 => Self::cyclic(2),
            2 => Self::direct_product(&Self::cyclic(2)?, &Self::cyclic(2)?),
            _ => {
                let rot: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                let refl: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
                Ok(Self::from_permutations(&[rot, refl])?.0)
            }
        }
    }

    pub fn symmetric(k: usize) -> Result<Self> {
        if k <= 1 {
            return Self::cyclic(1);
        }
        let swap: Vec<usize> = (0..k).map(|i| if i < 2 { 1 - i } else { i }).collect();
        let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        Ok(Self::from_permutations(&[swap, cycle])?.0)
    }

    pub fn alternating(k: usize) -> Result<Self> {
        if k <= 2 {
            return Self::cyclic(1);
        }
        // 3-cycles (0 1 i) generate A_k
        let gens: Vec<Vec<usize>> = (2..k)
            .map(|i| {
                let mut p: Vec<usize> = (0..k).collect();
                p[0] = 1;
                p[1] = i;
                p[i] = 0;
                p
            })
            .collect();
        Ok(Self::from_permutations(&gens)?.0)
    }

    /// Quaternion group: element `u + 4s` is `(-1)^s` times unit `u ∈ {1, i, j, k}`.
    pub fn quaternion() -> Self {
        // (sign, unit) of unit products
        const UNIT: [[(u8, u8); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let mut table = Vec::with_capacity(64);
        for a in 0..8usize {
            for b in 0..8usize {
                let (s, u) = UNIT[a % 4][b % 4];
                let sign = (a / 4 + b / 4 + s as usize) % 2;
                table.push((u as usize + 4 * sign) as u32);
            }
        }
        Self::from_flat(8, table)
    }

    /// `⊕ Z/d_i` with mixed-radix indexing, first factor most significant.
    pub fn abelian(orders: &[usize]) -> Result<Self> {
        let mut g = Self::cyclic(1)?;
        for &d in orders {
            g = Self::direct_product(&g, &Self::cyclic(d)?)?;
        }
        Ok(g)
    }
}

/// Subgroup of a finite group, stored as its member set.
#[derive(Clone)]
pub struct GSubgroup {
    parent: Arc<FiniteGroup>,
    members: FixedBitSet,
}

impl PartialEq for GSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && same_group(&self.parent, &other.parent)
    }
}

impl Eq for GSubgroup {}

impl std::hash::Hash for GSubgroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.members.hash(state);
    }
}

impl fmt::Debug for GSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.elements())
    }
}

fn same_group(a: &Arc<FiniteGroup>, b: &Arc<FiniteGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub fn trivial(g: &Arc<FiniteGroup>) -> GSubgroup {
    let mut members = FixedBitSet::with_capacity(g.k);
    members.insert(0);
    GSubgroup {
        parent: g.clone(),
        members,
    }
}

pub fn full(g: &Arc<FiniteGroup>) -> GSubgroup {
    let mut members = FixedBitSet::with_capacity(g.k);
    members.insert_range(..);
    GSubgroup {
        parent: g.clone(),
        members,
    }
}

/// Closes `start` (which must contain the identity) under right multiplication by `gens`.
fn close_from(g: &Arc<FiniteGroup>, mut members: FixedBitSet, gens: &[usize]) -> GSubgroup {
    let mut queue: VecDeque<usize> = members.ones().collect();
    while let Some(x) = queue.pop_front() {
        for &s in gens {
            let y = g.mul(x, s);
            if !members.put(y) {
                queue.push_back(y);
            }
        }
    }
    GSubgroup {
        parent: g.clone(),
        members,
    }
}

/// Smallest subgroup containing `gens`.
pub fn closure(g: &Arc<FiniteGroup>, gens: &[usize]) -> Result<GSubgroup> {
    if let Some(&x) = gens.iter().find(|&&x| x >= g.k) {
        return Err(Error::OutOfRange(format!("element {x} of a group of order {}", g.k)));
    }
    Ok(close_from(g, trivial(g).members, gens))
}

impl GSubgroup {
    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn elements(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn order(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_full(&self) -> bool {
        self.order() == self.parent.k
    }

    fn check_parent(&self, other: &GSubgroup) -> Result<()> {
        if same_group(&self.parent, &other.parent) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn le(&self, other: &GSubgroup) -> Result<bool> {
        self.check_parent(other)?;
        Ok(self.members.is_subset(&other.members))
    }

    pub fn meet(&self, other: &GSubgroup) -> Result<GSubgroup> {
        self.check_parent(other)?;
        let mut members = self.members.clone();
        members.intersect_with(&other.members);
        Ok(GSubgroup {
            parent: self.parent.clone(),
            members,
        })
    }

    pub fn join(&self, other: &GSubgroup) -> Result<GSubgroup> {
        self.check_parent(other)?;
        if other.members.is_subset(&self.members) {
            return Ok(self.clone());
        }
        if self.members.is_subset(&other.members) {
            return Ok(other.clone());
        }
        let gens: Vec<usize> = other.members.difference(&self.members).collect();
        let mut all = self.elements();
        all.extend(&gens);
        Ok(close_from(&self.parent, self.members.clone(), &all))
    }

    /// Whether `self` is normal in `within` (and contained in it).
    pub fn is_normal_in(&self, within: &GSubgroup) -> Result<bool> {
        if !self.le(within)? {
            return Ok(false);
        }
        let g = &self.parent;
        Ok(within.members.ones().all(|a| {
            self.members
                .ones()
                .all(|h| self.members.contains(g.mul(g.mul(a, h), g.inv(a))))
        }))
    }

    /// Left cosets `x·self` of `self` inside `within`, the coset `self` first.
    pub fn left_cosets_in(&self, within: &GSubgroup) -> Result<Vec<Vec<usize>>> {
        if !self.le(within)? {
            return Err(Error::NotNested(format!(": {:?} inside {:?}", self, within)));
        }
        let g = &self.parent;
        let mut seen = FixedBitSet::with_capacity(g.k);
        let mut out = Vec::new();
        for x in within.members.ones() {
            if seen.contains(x) {
                continue;
            }
            let mut coset: Vec<usize> = self.members.ones().map(|h| g.mul(x, h)).collect();
            coset.sort_unstable();
            for &y in &coset {
                seen.insert(y);
            }
            out.push(coset);
        }
        Ok(out)
    }
}

/// Smallest subgroup of `within` containing `h` and closed under conjugation by `within`.
pub fn normal_closure(h: &GSubgroup, within: &GSubgroup) -> Result<GSubgroup> {
    if !h.le(within)? {
        return Err(Error::NotNested(format!(": {h:?} inside {within:?}")));
    }
    let g = &h.parent;
    let mut gens: Vec<usize> = Vec::new();
    let mut seen = FixedBitSet::with_capacity(g.k);
    for a in within.members.ones() {
        for x in h.members.ones() {
            let c = g.mul(g.mul(a, x), g.inv(a));
            if !seen.put(c) {
                gens.push(c);
            }
        }
    }
    closure(g, &gens)
}

/// For subgroups with `HK = KH`, checks that `h(H∧K) ↦ hK` is a bijection
/// `H/(H∧K) → (H∨K)/K`. Returns `None` when the subgroups do not permute.
pub fn product_formula(h: &GSubgroup, k: &GSubgroup) -> Result<Option<bool>> {
    h.check_parent(k)?;
    let g = &h.parent;
    let product = |a: &GSubgroup, b: &GSubgroup| -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(g.k);
        for x in a.members.ones() {
            for y in b.members.ones() {
                s.insert(g.mul(x, y));
            }
        }
        s
    };
    let hk = product(h, k);
    if hk != product(k, h) {
        return Ok(None);
    }
    let join = h.join(k)?;
    let meet = h.meet(k)?;
    let source = meet.left_cosets_in(h)?;
    let target = k.left_cosets_in(&join)?;
    let coset_of: HashMap<usize, usize> = target
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&x| (x, i)))
        .collect();
    let mut hit = vec![false; target.len()];
    for c in &source {
        let i = coset_of[&c[0]];
        // different representatives of one coset must land together
        if c.iter().any(|x| coset_of[x] != i) || hit[i] {
            return Ok(Some(false));
        }
        hit[i] = true;
    }
    Ok(Some(hit.iter().all(|&b| b)))
}

/// Homomorphism given by the image of every element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<u32>,
}

impl GroupHom {
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, map: Vec<usize>) -> Result<Self> {
        let fail = |detail: String| Error::NotHomomorphism { index: 0, detail };
        if map.len() != source.k {
            return Err(fail(format!("{} images for a group of order {}", map.len(), source.k)));
        }
        if let Some(&x) = map.iter().find(|&&x| x >= target.k) {
            return Err(fail(format!("image {x} is not an element of the target")));
        }
        for a in 0..source.k {
            for b in 0..source.k {
                if map[source.mul(a, b)] != target.mul(map[a], map[b]) {
                    return Err(fail(format!("f({a}*{b}) != f({a})*f({b})")));
                }
            }
        }
        Ok(GroupHom {
            source,
            target,
            map: map.into_iter().map(|x| x as u32).collect(),
        })
    }

    pub fn identity(g: &Arc<FiniteGroup>) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            map: (0..g.k as u32).collect(),
        }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    pub fn map(&self) -> Vec<usize> {
        self.map.iter().map(|&x| x as usize).collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> GroupHom {
        GroupHom {
            source: self.source.clone(),
            target: other.target.clone(),
            map: self.map.iter().map(|&x| other.map[x as usize]).collect(),
        }
    }

    pub fn image(&self, s: &GSubgroup) -> GSubgroup {
        let mut members = FixedBitSet::with_capacity(self.target.k);
        for x in s.members.ones() {
            members.insert(self.apply(x));
        }
        GSubgroup {
            parent: self.target.clone(),
            members,
        }
    }

    pub fn preimage(&self, t: &GSubgroup) -> GSubgroup {
        let mut members = FixedBitSet::with_capacity(self.source.k);
        for x in 0..self.source.k {
            if t.contains(self.apply(x)) {
                members.insert(x);
            }
        }
        GSubgroup {
            parent: self.source.clone(),
            members,
        }
    }

    pub fn kernel(&self) -> GSubgroup {
        self.preimage(&trivial(&self.target))
    }
}

#[derive(Clone, Debug)]
pub struct GroupDiagram {
    groups: Vec<Arc<FiniteGroup>>,
    steps: Vec<GroupHom>,
    composites: Vec<Vec<GroupHom>>,
}

impl GroupDiagram {
    /// Builds a diagram from groups and element maps; map `a` goes from index `a` to `a + 1`.
    pub fn new(groups: Vec<FiniteGroup>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidDiagram("a diagram needs at least one group".into()));
        }
        if maps.len() + 1 != groups.len() {
            return Err(Error::InvalidDiagram(format!(
                "{} groups need {} maps, got {}",
                groups.len(),
                groups.len() - 1,
                maps.len()
            )));
        }
        let groups: Vec<Arc<FiniteGroup>> = groups.into_iter().map(Arc::new).collect();
        let mut steps = Vec::with_capacity(maps.len());
        for (a, m) in maps.into_iter().enumerate() {
            let f = GroupHom::new(groups[a].clone(), groups[a + 1].clone(), m).map_err(|e| match e {
                Error::NotHomomorphism { detail, .. } => Error::NotHomomorphism { index: a + 1, detail },
                other => other,
            })?;
            steps.push(f);
        }
        let n = groups.len();
        let composites = (0..n)
            .map(|a| {
                let mut row = vec![GroupHom::identity(&groups[a])];
                for step in &steps[a..] {
                    let next = row.last().unwrap().then(step);
                    row.push(next);
                }
                row
            })
            .collect();
        Ok(GroupDiagram {
            groups,
            steps,
            composites,
        })
    }

    /// Cayley-table copy of a diagram of finite abelian groups.
    pub fn from_abelian(d: &ChainDiagram) -> Result<Self> {
        let n = d.len();
        let mut groups = Vec::with_capacity(n);
        let mut coords = Vec::with_capacity(n);
        for a in 1..=n {
            let (g, c) = abelian_table(d.object(a))?;
            groups.push(g);
            coords.push(c);
        }
        let mut maps = Vec::with_capacity(n.saturating_sub(1));
        for a in 1..n {
            let (src, dst) = (&coords[a - 1], &coords[a]);
            let m = d.step(a).matrix();
            let map = (0..src.elements)
                .map(|e| dst.index_of(&m.mul_vec(&src.vector_of(e)).expect("map shape matches")))
                .collect();
            maps.push(map);
        }
        Self::new(groups, maps)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn group(&self, a: usize) -> &Arc<FiniteGroup> {
        &self.groups[a - 1]
    }

    pub fn step(&self, a: usize) -> &GroupHom {
        &self.steps[a - 1]
    }

    /// Map from index `a` to index `b ≥ a` (1-based).
    pub fn composite(&self, a: usize, b: usize) -> &GroupHom {
        &self.composites[a - 1][b - a]
    }

    pub fn zero_sub(&self) -> GSubDiagram {
        GSubDiagram {
            parts: self.groups.iter().map(trivial).collect(),
        }
    }

    pub fn full_sub(&self) -> GSubDiagram {
        GSubDiagram {
            parts: self.groups.iter().map(full).collect(),
        }
    }
}

/// Coordinates of a finite abelian presentation in Smith form.
struct AbelianCoords {
    /// Nontrivial invariant factors and the Smith row each belongs to.
    factors: Vec<(usize, usize)>,
    u: IntMatrix,
    u_inv: IntMatrix,
    rank: usize,
    elements: usize,
}

impl AbelianCoords {
    fn vector_of(&self, e: usize) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.rank];
        let mut rest = e;
        for &(row, d) in self.factors.iter().rev() {
            y[row] = BigInt::from(rest % d);
            rest /= d;
        }
        self.u_inv.mul_vec(&y).expect("square transform")
    }

    fn index_of(&self, x: &[BigInt]) -> usize {
        let y = self.u.mul_vec(x).expect("square transform");
        self.factors.iter().fold(0, |acc, &(row, d)| {
            let r = y[row].mod_floor(&BigInt::from(d)).to_usize().expect("reduced residue");
            acc * d + r
        })
    }
}

fn abelian_table(obj: &crate::abgrp::AbPresentation) -> Result<(FiniteGroup, AbelianCoords)> {
    let r = obj.rank();
    let mut rels = obj.relations().columns();
    match obj.coeff() {
        Coeff::Integers => {}
        Coeff::Prime(p) => {
            for i in 0..r {
                let mut e = vec![BigInt::zero(); r];
                e[i] = BigInt::from(p);
                rels.push(e);
            }
        }
        Coeff::Rationals => {
            return Err(Error::InfiniteLength(
                "rational vector spaces are infinite groups".into(),
            ))
        }
    }
    let s = snf_with_inverse(&IntMatrix::from_columns(r, &rels));
    let mut factors = Vec::new();
    let mut elements = 1usize;
    for i in 0..r {
        let d = if i < s.d.cols() {
            s.d.get(i, i).clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            return Err(Error::InfiniteLength("object has positive free rank".into()));
        }
        let d = d.to_usize().filter(|&d| d <= ORDER_CAP).ok_or(Error::OrderCap {
            order: usize::MAX,
            cap: ORDER_CAP,
        })?;
        if d > 1 {
            elements = elements.saturating_mul(d);
            if elements > ORDER_CAP {
                return Err(Error::OrderCap {
                    order: elements,
                    cap: ORDER_CAP,
                });
            }
            factors.push((i, d));
        }
    }
    let orders: Vec<usize> = factors.iter().map(|&(_, d)| d).collect();
    let g = FiniteGroup::abelian(&orders)?;
    Ok((
        g,
        AbelianCoords {
            factors,
            u: s.u,
            u_inv: s.u_inv,
            rank: r,
            elements,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GSubDiagram {
    parts: Vec<GSubgroup>,
}

impl GSubDiagram {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn part(&self, a: usize) -> &GSubgroup {
        &self.parts[a - 1]
    }

    pub fn parts(&self) -> &[GSubgroup] {
        &self.parts
    }

    pub fn orders(&self) -> Vec<usize> {
        self.parts.iter().map(GSubgroup::order).collect()
    }

    pub fn join(&self, other: &GSubDiagram) -> Result<GSubDiagram> {
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.join(b))
            .collect::<Result<_>>()?;
        Ok(GSubDiagram { parts })
    }

    pub fn meet(&self, other: &GSubDiagram) -> Result<GSubDiagram> {
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| a.meet(b))
            .collect::<Result<_>>()?;
        Ok(GSubDiagram { parts })
    }

    pub fn le(&self, other: &GSubDiagram) -> Result<bool> {
        for (a, b) in self.parts.iter().zip(&other.parts) {
            if !a.le(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Image and kernel filtrations of a group diagram.
#[derive(Clone, Debug)]
pub struct GroupFiltrations {
    /// `khat[p]` for `p = 0..=n`; `khat[0]` is trivial.
    pub khat: Vec<GSubDiagram>,
    /// `k[q]` for `q = 0..=n+1`; `k[0]` is trivial and `k[n+1]` full.
    pub k: Vec<GSubDiagram>,
}

pub fn group_filtrations(d: &GroupDiagram) -> GroupFiltrations {
    let n = d.len();
    let khat = (0..=n)
        .map(|p| {
            if p == 0 {
                return d.zero_sub();
            }
            let parts = (1..=n)
                .map(|a| {
                    if a <= p {
                        full(d.group(a))
                    } else {
                        d.composite(p, a).image(&full(d.group(p)))
                    }
                })
                .collect();
            GSubDiagram { parts }
        })
        .collect();
    let k = (0..=n + 1)
        .map(|q| {
            if q == n + 1 {
                return d.full_sub();
            }
            let parts = (1..=n)
                .map(|a| {
                    if q > 0 && a < q {
                        d.composite(a, q).kernel()
                    } else {
                        trivial(d.group(a))
                    }
                })
                .collect();
            GSubDiagram { parts }
        })
        .collect();
    GroupFiltrations { khat, k }
}

/// The finite lattice generated by the filtrations, with meet/join tables.
#[derive(Clone, Debug)]
pub struct GeneratedLattice {
    pub elements: Vec<GSubDiagram>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

impl GeneratedLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, s: &GSubDiagram) -> Option<usize> {
        self.elements.iter().position(|e| e == s)
    }

    /// First triple violating `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
    pub fn distributivity_failure(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let rows: Vec<Option<(usize, usize, usize)>> = par::map_range(n, |a| {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.meet[a][self.join[b][c]];
                    let rhs = self.join[self.meet[a][b]][self.meet[a][c]];
                    if lhs != rhs {
                        return Some((a, b, c));
                    }
                }
            }
            None
        });
        rows.into_iter().flatten().next()
    }
}

/// Closes the filtrations, trivial and full subdiagrams under meet and join.
pub fn generated_lattice(d: &GroupDiagram, f: &GroupFiltrations) -> Result<GeneratedLattice> {
    let mut elements: Vec<GSubDiagram> = Vec::new();
    let mut index: HashMap<GSubDiagram, usize> = HashMap::new();
    let mut add = |s: GSubDiagram, elements: &mut Vec<GSubDiagram>| -> usize {
        *index.entry(s.clone()).or_insert_with(|| {
            elements.push(s);
            elements.len() - 1
        })
    };
    for s in [d.zero_sub(), d.full_sub()].iter().chain(&f.khat).chain(&f.k) {
        add(s.clone(), &mut elements);
    }
    let mut meet: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut join: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut done = 0;
    while done < elements.len() {
        let upto = elements.len();
        for a in 0..upto {
            for b in done.max(a)..upto {
                if meet.contains_key(&(a, b)) {
                    continue;
                }
                let m = elements[a].meet(&elements[b])?;
                let j = elements[a].join(&elements[b])?;
                let (mi, ji) = (add(m, &mut elements), add(j, &mut elements));
                meet.insert((a, b), mi);
                join.insert((a, b), ji);
            }
        }
        done = upto;
    }
    let n = elements.len();
    let table = |t: &BTreeMap<(usize, usize), usize>| -> Vec<Vec<usize>> {
        (0..n)
            .map(|a| (0..n).map(|b| t[&(a.min(b), a.max(b))]).collect())
            .collect()
    };
    Ok(GeneratedLattice {
        meet: table(&meet),
        join: table(&join),
        elements,
    })
}

#[derive(Clone, Debug)]
pub struct GroupAnalysis {
    pub filtrations: GroupFiltrations,
    pub lattice: GeneratedLattice,
    /// `A[p][q] = K̂(p) ∧ K(q)` as lattice indices, `p = 0..=n`, `q = 0..=n+1`.
    pub grid: Vec<Vec<usize>>,
    pub distributive: bool,
    /// Every `K(q)_a` is normal in its group.
    pub kernels_normal: bool,
}

pub fn g_saecular(d: &GroupDiagram) -> Result<GroupAnalysis> {
    let filtrations = group_filtrations(d);
    let lattice = generated_lattice(d, &filtrations)?;
    let n = d.len();
    let idx = |s: &GSubDiagram| lattice.index_of(s).expect("generators lie in the lattice");
    let grid = (0..=n)
        .map(|p| {
            (0..=n + 1)
                .map(|q| lattice.meet[idx(&filtrations.khat[p])][idx(&filtrations.k[q])])
                .collect()
        })
        .collect();
    let mut kernels_normal = true;
    for kq in &filtrations.k {
        for (a, part) in kq.parts.iter().enumerate() {
            kernels_normal &= part.is_normal_in(&full(d.group(a + 1)))?;
        }
    }
    let distributive = lattice.distributivity_failure().is_none();
    Ok(GroupAnalysis {
        filtrations,
        lattice,
        grid,
        distributive,
        kernels_normal,
    })
}

impl GroupAnalysis {
    pub fn cell(&self, p: usize, q: usize) -> &GSubDiagram {
        &self.lattice.elements[self.grid[p][q]]
    }

    /// Numerator and denominator of the factor on `[p, q)`.
    pub fn factor_pair(&self, i: Interval) -> (usize, usize) {
        let (p, q) = (i.p, i.q);
        let num = self.grid[p][q];
        let den = self.lattice.join[self.grid[p][q - 1]][self.grid[p - 1][q]];
        (num, den)
    }
}

/// Left-coset factor on one interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetFactor {
    pub support: Interval,
    /// Number of cosets of `den_a` in `num_a` for each index `a = 1..n`.
    pub cardinalities: Vec<usize>,
    /// Cosets per index; the first one is `den_a` itself.
    pub cosets: Vec<Vec<Vec<usize>>>,
    /// `maps[a-1][i]` is the coset at `a + 1` receiving coset `i` at `a`.
    pub maps: Vec<Vec<usize>>,
    /// The onto/into equations hold across the support.
    pub natural: bool,
    /// Singletons outside the support and bijections inside.
    pub interval_property: bool,
}

fn nested_natural(d: &GroupDiagram, num: &GSubDiagram, den: &GSubDiagram, i: Interval) -> Result<bool> {
    for a in 1..d.len() {
        let f = d.step(a);
        if !f.image(num.part(a)).le(num.part(a + 1))? || !f.image(den.part(a)).le(den.part(a + 1))? {
            return Ok(false);
        }
    }
    for a in i.p..i.q.min(d.len() + 1) - 1 {
        let f = d.step(a);
        let onto = f.image(num.part(a)).join(den.part(a + 1))? == *num.part(a + 1);
        let into = f.preimage(den.part(a + 1)).meet(num.part(a))? == *den.part(a);
        if !onto || !into {
            return Ok(false);
        }
    }
    Ok(true)
}

fn coset_factor(d: &GroupDiagram, g: &GroupAnalysis, i: Interval) -> Result<CosetFactor> {
    let n = d.len();
    let (ni, di) = g.factor_pair(i);
    let (num, den) = (&g.lattice.elements[ni], &g.lattice.elements[di]);
    let natural = den.le(num)? && nested_natural(d, num, den, i)?;
    let mut cosets = Vec::with_capacity(n);
    for a in 1..=n {
        let mut c = den.part(a).left_cosets_in(num.part(a))?;
        // basepoint first
        if let Some(pos) = c.iter().position(|x| x.contains(&0)) {
            c.swap(0, pos);
        }
        cosets.push(c);
    }
    let cardinalities: Vec<usize> = cosets.iter().map(Vec::len).collect();
    let mut maps = Vec::with_capacity(n.saturating_sub(1));
    let mut bijective = Vec::with_capacity(n.saturating_sub(1));
    for a in 1..n {
        let f = d.step(a);
        let lookup: HashMap<usize, usize> = cosets[a]
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.iter().map(move |&x| (x, k)))
            .collect();
        let m: Vec<usize> = cosets[a - 1]
            .iter()
            .map(|c| lookup.get(&f.apply(c[0])).copied().unwrap_or(usize::MAX))
            .collect();
        let mut hit = vec![false; cosets[a].len()];
        let mut injective = true;
        for &t in &m {
            if t == usize::MAX || hit[t] {
                injective = false;
            } else {
                hit[t] = true;
            }
        }
        bijective.push(injective && hit.iter().all(|&h| h));
        maps.push(m);
    }
    let interval_property = (1..=n).all(|a| i.contains(a) || cardinalities[a - 1] == 1)
        && (i.p..i.q.min(n + 1) - 1).all(|a| bijective[a - 1]);
    Ok(CosetFactor {
        support: i,
        cardinalities,
        cosets,
        maps,
        natural,
        interval_property,
    })
}

fn nonzero_intervals(g: &GroupAnalysis, n: usize) -> Vec<Interval> {
    crate::diagram::all_intervals(n)
        .into_iter()
        .filter(|&i| {
            let (num, den) = g.factor_pair(i);
            num != den
        })
        .collect()
}

pub fn coset_barcode(d: &GroupDiagram) -> Result<BTreeMap<Interval, CosetFactor>> {
    let g = g_saecular(d)?;
    coset_barcode_from(d, &g)
}

pub fn coset_barcode_from(d: &GroupDiagram, g: &GroupAnalysis) -> Result<BTreeMap<Interval, CosetFactor>> {
    nonzero_intervals(g, d.len())
        .into_iter()
        .map(|i| Ok((i, coset_factor(d, g, i)?)))
        .collect()
}

/// Group-valued factor `num_a / ⟨den_a⟩^{num_a}` on one interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedFactor {
    pub support: Interval,
    /// Order of the quotient group at each index.
    pub orders: Vec<usize>,
    /// Quotient multiplication tables, cosets numbered with the identity first.
    pub tables: Vec<Vec<Vec<usize>>>,
    /// Induced homomorphisms between consecutive quotients.
    pub maps: Vec<Vec<usize>>,
    /// Whether `den_a` is already normal in `num_a`, per index.
    pub den_normal: Vec<bool>,
    pub interval_property: bool,
}

fn normalized_factor(d: &GroupDiagram, g: &GroupAnalysis, i: Interval) -> Result<NormalizedFactor> {
    let n = d.len();
    let (ni, di) = g.factor_pair(i);
    let (num, den) = (&g.lattice.elements[ni], &g.lattice.elements[di]);
    let mut quotients = Vec::with_capacity(n);
    let mut den_normal = Vec::with_capacity(n);
    for a in 1..=n {
        let grp = d.group(a);
        den_normal.push(den.part(a).is_normal_in(num.part(a))?);
        let normal = normal_closure(den.part(a), num.part(a))?;
        let mut cosets = normal.left_cosets_in(num.part(a))?;
        if let Some(pos) = cosets.iter().position(|x| x.contains(&0)) {
            cosets.swap(0, pos);
        }
        let lookup: HashMap<usize, usize> = cosets
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.iter().map(move |&x| (x, k)))
            .collect();
        let table: Vec<Vec<usize>> = cosets
            .iter()
            .map(|x| cosets.iter().map(|y| lookup[&grp.mul(x[0], y[0])]).collect())
            .collect();
        quotients.push((cosets, lookup, table));
    }
    let mut maps = Vec::with_capacity(n.saturating_sub(1));
    let mut iso = Vec::with_capacity(n.saturating_sub(1));
    for a in 1..n {
        let f = d.step(a);
        let (src, _, _) = &quotients[a - 1];
        let (dst, lookup, _) = &quotients[a];
        let m: Vec<usize> = src
            .iter()
            .map(|c| lookup.get(&f.apply(c[0])).copied().unwrap_or(usize::MAX))
            .collect();
        let mut sorted = m.clone();
        sorted.sort_unstable();
        iso.push(sorted == (0..dst.len()).collect::<Vec<_>>());
        maps.push(m);
    }
    let orders: Vec<usize> = quotients.iter().map(|q| q.0.len()).collect();
    let interval_property =
        (1..=n).all(|a| i.contains(a) || orders[a - 1] == 1) && (i.p..i.q.min(n + 1) - 1).all(|a| iso[a - 1]);
    Ok(NormalizedFactor {
        support: i,
        orders,
        tables: quotients.into_iter().map(|q| q.2).collect(),
        maps,
        den_normal,
        interval_property,
    })
}

pub fn normalized_barcode(d: &GroupDiagram) -> Result<BTreeMap<Interval, NormalizedFactor>> {
    let g = g_saecular(d)?;
    nonzero_intervals(&g, d.len())
        .into_iter()
        .map(|i| Ok((i, normalized_factor(d, &g, i)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(g: FiniteGroup) -> Arc<FiniteGroup> {
        Arc::new(g)
    }

    /// Brute-force subgroup test by the axioms.
    fn is_subgroup(g: &FiniteGroup, s: &GSubgroup) -> bool {
        s.contains(0)
            && s.members
                .ones()
                .all(|x| s.contains(g.inv(x)) && s.members.ones().all(|y| s.contains(g.mul(x, y))))
    }

    #[test]
    fn catalog_orders() {
        assert_eq!(FiniteGroup::cyclic(7).unwrap().order(), 7);
        assert_eq!(FiniteGroup::dihedral(4).unwrap().order(), 8);
        assert_eq!(FiniteGroup::symmetric(4).unwrap().order(), 24);
        assert_eq!(FiniteGroup::alternating(4).unwrap().order(), 12);
        assert_eq!(FiniteGroup::quaternion().order(), 8);
        assert!(!FiniteGroup::quaternion().is_abelian());
        assert!(!FiniteGroup::dihedral(3).unwrap().is_abelian());
        assert!(FiniteGroup::abelian(&[2, 3]).unwrap().is_abelian());
        assert!(matches!(FiniteGroup::symmetric(6), Err(Error::OrderCap { .. })));
        // the quaternion table passes full validation
        FiniteGroup::new(FiniteGroup::quaternion().table()).unwrap();
        FiniteGroup::new(FiniteGroup::alternating(5).unwrap().table()).unwrap();
    }

    #[test]
    fn malformed_tables() {
        assert!(matches!(FiniteGroup::new(vec![]), Err(Error::MalformedGroup(_))));
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::new(vec![vec![1, 0], vec![0, 1]]).is_err());
        // a Latin square with identity that is not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(FiniteGroup::new(loop5), Err(Error::MalformedGroup(_))));
        assert!(matches!(
            FiniteGroup::with_cap(vec![vec![0]; 3], 2),
            Err(Error::OrderCap { order: 3, cap: 2 })
        ));
    }

    #[test]
    fn closure_examples_in_s3() {
        let s3 = arc(FiniteGroup::symmetric(3).unwrap());
        let three_cycle = (0..6).find(|&x| s3.element_order(x) == 3).unwrap();
        let c3 = closure(&s3, &[three_cycle]).unwrap();
        assert_eq!(c3.order(), 3);
        assert!(closure(&s3, &[]).unwrap().is_trivial());
        assert!(closure(&s3, &(0..6).collect::<Vec<_>>()).unwrap().is_full());
        let involutions: Vec<usize> = (0..6).filter(|&x| s3.element_order(x) == 2).collect();
        let a = closure(&s3, &[involutions[0]]).unwrap();
        let b = closure(&s3, &[involutions[1]]).unwrap();
        assert!(a.join(&b).unwrap().is_full());
        assert!(a.meet(&b).unwrap().is_trivial());
        assert_eq!(a.meet(&a).unwrap(), a);
        assert!(normal_closure(&a, &full(&s3)).unwrap().is_full());
        assert_eq!(normal_closure(&c3, &full(&s3)).unwrap(), c3);
        assert!(normal_closure(&trivial(&s3), &full(&s3)).unwrap().is_trivial());
        assert!(c3.is_normal_in(&full(&s3)).unwrap());
        assert!(!a.is_normal_in(&full(&s3)).unwrap());
        assert!(normal_closure(&full(&s3), &a).is_err());
    }

    #[test]
    fn every_cyclic_closure_is_a_subgroup() {
        for g in [FiniteGroup::symmetric(4).unwrap(), FiniteGroup::quaternion()] {
            let g = arc(g);
            for x in 0..g.order() {
                for y in 0..g.order() {
                    let s = closure(&g, &[x, y]).unwrap();
                    assert!(is_subgroup(&g, &s));
                    assert_eq!(g.order() % s.order(), 0);
                }
            }
        }
    }

    #[test]
    fn normal_joins_are_normal() {
        let s4 = arc(FiniteGroup::symmetric(4).unwrap());
        let g = full(&s4);
        let normals: Vec<GSubgroup> = (0..24)
            .map(|x| normal_closure(&closure(&s4, &[x]).unwrap(), &g).unwrap())
            .collect();
        for a in &normals {
            for b in &normals {
                assert!(a.join(b).unwrap().is_normal_in(&g).unwrap());
                assert!(a.meet(b).unwrap().is_normal_in(&g).unwrap());
            }
        }
    }

    #[test]
    fn product_formula_cases() {
        let s3 = arc(FiniteGroup::symmetric(3).unwrap());
        let three_cycle = (0..6).find(|&x| s3.element_order(x) == 3).unwrap();
        let involution = (0..6).find(|&x| s3.element_order(x) == 2).unwrap();
        let c3 = closure(&s3, &[three_cycle]).unwrap();
        let c2 = closure(&s3, &[involution]).unwrap();
        assert_eq!(product_formula(&c2, &c3).unwrap(), Some(true));
        let others: Vec<usize> = (0..6)
            .filter(|&x| s3.element_order(x) == 2 && x != involution)
            .collect();
        let c2b = closure(&s3, &[others[0]]).unwrap();
        assert_eq!(product_formula(&c2, &c2b).unwrap(), None);
    }

    #[test]
    fn homomorphism_checks() {
        let c4 = arc(FiniteGroup::cyclic(4).unwrap());
        let c2 = arc(FiniteGroup::cyclic(2).unwrap());
        let f = GroupHom::new(c4.clone(), c2.clone(), vec![0, 1, 0, 1]).unwrap();
        assert_eq!(f.kernel().elements(), vec![0, 2]);
        assert!(f.image(&full(&c4)).is_full());
        let bad = GroupHom::new(c4.clone(), c2.clone(), vec![0, 1, 1, 0]);
        assert!(matches!(bad, Err(Error::NotHomomorphism { .. })));
        let d = GroupDiagram::new(
            vec![FiniteGroup::cyclic(4).unwrap(), FiniteGroup::cyclic(2).unwrap()],
            vec![vec![0, 1, 1, 1]],
        );
        assert!(matches!(d, Err(Error::NotHomomorphism { index: 1, .. })));
    }

    fn dcyc_groups() -> GroupDiagram {
        GroupDiagram::from_abelian(&ChainDiagram::cyclic(&[9, 6, 4], &[2, 2]).unwrap()).unwrap()
    }

    #[test]
    fn cyclic_diagram_coset_barcode() {
        let d = dcyc_groups();
        let bars = coset_barcode(&d).unwrap();
        let got: Vec<(Interval, Vec<usize>)> = bars.iter().map(|(i, f)| (*i, f.cardinalities.clone())).collect();
        assert_eq!(
            got,
            vec![
                (Interval::new(1, 2), vec![3, 1, 1]),
                (Interval::new(1, 3), vec![3, 3, 1]),
                (Interval::new(2, 4), vec![1, 2, 2]),
                (Interval::new(3, 4), vec![1, 1, 2]),
            ]
        );
        assert!(bars.values().all(|f| f.natural && f.interval_property));
        let g = g_saecular(&d).unwrap();
        assert!(g.distributive && g.kernels_normal);
    }

    #[test]
    fn generated_lattice_matches_the_abelian_cdf() {
        let ab = ChainDiagram::cyclic(&[9, 6, 4], &[2, 2]).unwrap();
        let cdf = crate::saecular::analyze(&ab).unwrap();
        let g = g_saecular(&dcyc_groups()).unwrap();
        for p in 1..=3 {
            for q in 1..=4 {
                let orders: Vec<usize> = (1..=3)
                    .map(|a| {
                        let sub = cdf.get(p, q).part(a);
                        let (shape, _) = crate::abgrp::quotient_shape(sub, &sub.parent().zero()).unwrap();
                        shape.order().unwrap().to_usize().unwrap()
                    })
                    .collect();
                assert_eq!(g.cell(p, q).orders(), orders, "cell ({p},{q})");
            }
        }
    }

    fn s3_chain() -> GroupDiagram {
        // C_2 into S_3, then the sign map onto C_2
        let (s3, perms) = FiniteGroup::from_permutations(&[vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        let sign: Vec<usize> = perms
            .iter()
            .map(|p| {
                let inversions = (0..3)
                    .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                inversions % 2
            })
            .collect();
        let swap = perms.iter().position(|p| p == &vec![1, 0, 2]).unwrap();
        GroupDiagram::new(
            vec![FiniteGroup::cyclic(2).unwrap(), s3, FiniteGroup::cyclic(2).unwrap()],
            vec![vec![0, swap], sign],
        )
        .unwrap()
    }

    #[test]
    fn s3_chain_is_distributive_and_natural() {
        let d = s3_chain();
        let g = g_saecular(&d).unwrap();
        assert!(g.distributive && g.kernels_normal);
        let bars = coset_barcode_from(&d, &g).unwrap();
        let total: usize = bars.values().map(|f| f.cardinalities[1]).product();
        assert_eq!(total, 6);
        for f in bars.values() {
            if f.natural {
                assert!(f.interval_property, "{:?}", f.support);
            }
        }
        let normalized = normalized_barcode(&d).unwrap();
        for (i, f) in &normalized {
            let cosets = &bars[i].cardinalities;
            for a in 0..3 {
                assert!(f.orders[a] <= cosets[a]);
                assert_eq!(cosets[a] % f.orders[a], 0);
            }
        }
    }

    #[test]
    fn constant_diagrams() {
        let s3 = FiniteGroup::symmetric(3).unwrap();
        let id: Vec<usize> = (0..6).collect();
        let d = GroupDiagram::new(vec![s3.clone(), s3.clone(), s3], vec![id.clone(), id]).unwrap();
        let g = g_saecular(&d).unwrap();
        assert_eq!(g.lattice.len(), 2);
        let bars = coset_barcode_from(&d, &g).unwrap();
        assert_eq!(bars.len(), 1);
        let f = &bars[&Interval::new(1, 4)];
        assert_eq!(f.cardinalities, vec![6, 6, 6]);
        assert!(f.natural && f.interval_property);
    }

    #[test]
    fn abelian_normalized_equals_coset() {
        let d = dcyc_groups();
        let cos = coset_barcode(&d).unwrap();
        let nor = normalized_barcode(&d).unwrap();
        for (i, f) in &nor {
            assert_eq!(f.orders, cos[i].cardinalities);
            assert!(f.den_normal.iter().all(|&b| b));
        }
    }

    #[test]
    fn abelian_translation_respects_maps() {
        // Z/4 --x3--> Z/4 is an automorphism
        let ab = ChainDiagram::cyclic(&[4, 4], &[3]).unwrap();
        let d = GroupDiagram::from_abelian(&ab).unwrap();
        assert!(d.step(1).kernel().is_trivial());
        let free = ChainDiagram::cyclic(&[0], &[]).unwrap();
        assert!(matches!(
            GroupDiagram::from_abelian(&free),
            Err(Error::InfiniteLength(_))
        ));
    }
}
