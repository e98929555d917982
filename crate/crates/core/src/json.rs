//! JSON input schemas, report records and their plain-text tables.
//!
//! Every report is plain data: it serializes to JSON, deserializes back, and
//! its table rendering reads nothing but its own fields.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::abgrp::{quotient_shape_with_generators, AbPresentation, JhVector, QuotientShape, SimpleFactor};
use crate::coeff::Coeff;
use crate::diagram::{ChainDiagram, Interval};
use crate::error::{Error, Result};
use crate::fingroup::{coset_barcode_from, g_saecular, normalized_barcode, FiniteGroup, GroupDiagram};
use crate::homology::{
    homology_barcode, ls_enumeration_check, CellId, CellSpec, FilteredComplex, HomologyFactor, SpectralContext,
};
use crate::intlinalg::IntMatrix;
use crate::saecular::{analyze, barcode_from_cdf, lexicographic_order, subsaecular_series, type_b_pd};

/// Integer that prints as a JSON number when it fits in `i64` and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => s.serialize_i64(x),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Small(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Small(x) => Ok(Int(BigInt::from(x))),
            Raw::Text(s) => s.trim().parse().map(Int).map_err(serde::de::Error::custom),
        }
    }
}

impl From<&BigInt> for Int {
    fn from(x: &BigInt) -> Self {
        Int(x.clone())
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().map(Int::from).collect()
}

fn bigs(v: Vec<Int>) -> Vec<BigInt> {
    v.into_iter().map(|x| x.0).collect()
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

fn resolve_coeff(field: Option<&str>, over: Option<Coeff>) -> Result<Coeff> {
    match (over, field) {
        (Some(c), _) => Ok(c),
        (None, Some(s)) => s.parse(),
        (None, None) => Ok(Coeff::Integers),
    }
}

// ---------------------------------------------------------------- inputs

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
    pub objects: Vec<ObjectInput>,
    /// Row-major matrices; map `a` sends object `a` to object `a + 1`.
    #[serde(default)]
    pub maps: Vec<Vec<Vec<Int>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectInput {
    pub rank: usize,
    /// Relation columns, each of length `rank`.
    #[serde(default)]
    pub relations: Vec<Vec<Int>>,
}

/// Parses and validates a diagram. An empty object list is a schema error.
pub fn parse_diagram(text: &str, coeff: Option<Coeff>) -> Result<ChainDiagram> {
    let input: DiagramInput = parse(text)?;
    if input.objects.is_empty() {
        return Err(Error::Schema("diagram has no objects".into()));
    }
    let coeff = resolve_coeff(input.coeff.as_deref(), coeff)?;
    let mut objects = Vec::with_capacity(input.objects.len());
    for (a, o) in input.objects.into_iter().enumerate() {
        if let Some(bad) = o.relations.iter().position(|c| c.len() != o.rank) {
            return Err(Error::Schema(format!(
                "object {}: relation column {bad} has length {}, expected {}",
                a + 1,
                o.relations[bad].len(),
                o.rank
            )));
        }
        objects.push(AbPresentation::new(
            coeff,
            o.rank,
            o.relations.into_iter().map(bigs).collect(),
        )?);
    }
    let mut maps = Vec::with_capacity(input.maps.len());
    for (a, rows) in input.maps.into_iter().enumerate() {
        let cols = objects.get(a).map_or(0, AbPresentation::rank);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "map {}: row {bad} has {} entries, expected {cols}",
                a + 1,
                rows[bad].len()
            )));
        }
        let nrows = rows.len();
        let entries = rows.into_iter().flat_map(bigs).collect();
        maps.push(IntMatrix::new(nrows, cols, entries)?);
    }
    ChainDiagram::new(objects, maps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<String>,
    /// Length of the filtration; defaults to the largest grade.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub cells: Vec<CellInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellInput {
    pub id: CellId,
    pub dim: usize,
    pub grade: serde_json::Number,
    #[serde(default)]
    pub boundary: Vec<(CellId, Int)>,
}

/// Translation between filtration indices and the grades found in the input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradeEntry {
    pub index: usize,
    pub value: serde_json::Number,
}

pub struct ParsedComplex {
    pub complex: FilteredComplex,
    pub grades: Vec<GradeEntry>,
}

/// Positive integer grades are used as indices directly. Any other grade set
/// is rank-compressed: the distinct values, sorted, become `1..=k`.
fn compress_grades(cells: &[CellInput], n: Option<usize>) -> Result<(Vec<usize>, usize, Vec<GradeEntry>)> {
    let literal: Option<Vec<usize>> = cells
        .iter()
        .map(|c| c.grade.as_u64().filter(|&g| g >= 1).map(|g| g as usize))
        .collect();
    if let Some(idx) = literal {
        let top = idx.iter().copied().max().unwrap_or(1);
        let n = n.unwrap_or(top);
        if n < top {
            return Err(Error::Schema(format!("n = {n} is below the largest grade {top}")));
        }
        let used: BTreeSet<usize> = idx.iter().copied().collect();
        let grades = used
            .into_iter()
            .map(|g| GradeEntry {
                index: g,
                value: serde_json::Number::from(g as u64),
            })
            .collect();
        return Ok((idx, n, grades));
    }
    let values: Vec<f64> = cells
        .iter()
        .map(|c| {
            c.grade
                .as_f64()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Schema(format!("cell {}: grade is not a finite number", c.id)))
        })
        .collect::<Result<_>>()?;
    let mut distinct = values.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let idx: Vec<usize> = values.iter().map(|v| distinct.partition_point(|d| d < v) + 1).collect();
    let k = distinct.len().max(1);
    if n.is_some_and(|n| n != k) {
        return Err(Error::Schema("n cannot be combined with rank-compressed grades".into()));
    }
    let mut grades = Vec::with_capacity(distinct.len());
    let mut seen = BTreeSet::new();
    for (c, &i) in cells.iter().zip(&idx) {
        if seen.insert(i) {
            grades.push(GradeEntry {
                index: i,
                value: c.grade.clone(),
            });
        }
    }
    grades.sort_by_key(|g| g.index);
    Ok((idx, k, grades))
}

pub fn parse_complex(text: &str, coeff: Option<Coeff>) -> Result<ParsedComplex> {
    let input: ComplexInput = parse(text)?;
    let coeff = resolve_coeff(input.coeff.as_deref(), coeff)?;
    let (idx, n, grades) = compress_grades(&input.cells, input.n)?;
    let specs = input
        .cells
        .into_iter()
        .zip(idx)
        .map(|(c, grade)| CellSpec {
            id: c.id,
            dim: c.dim,
            grade,
            boundary: c.boundary.into_iter().map(|(f, k)| (f, k.0)).collect(),
        })
        .collect();
    Ok(ParsedComplex {
        complex: FilteredComplex::new(coeff, n, specs)?,
        grades,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub groups: Vec<TableInput>,
    /// Map `a` lists the image of every element of group `a`.
    #[serde(default)]
    pub maps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableInput {
    pub table: Vec<Vec<usize>>,
}

pub fn parse_groups(text: &str) -> Result<GroupDiagram> {
    let input: GroupInput = parse(text)?;
    if input.groups.is_empty() {
        return Err(Error::Schema("diagram has no groups".into()));
    }
    let groups = input
        .groups
        .into_iter()
        .map(|g| FiniteGroup::new(g.table))
        .collect::<Result<Vec<_>>>()?;
    GroupDiagram::new(groups, input.maps)
}

/// Cayley-table form of a finite abelian diagram, in the group input schema.
pub fn group_input_of(d: &GroupDiagram) -> GroupInput {
    GroupInput {
        groups: (1..=d.len())
            .map(|a| TableInput {
                table: d.group(a).table(),
            })
            .collect(),
        maps: (1..d.len()).map(|a| d.step(a).map()).collect(),
    }
}

// ---------------------------------------------------------------- shared records

/// Right end of a bar: a finite index or `"inf"` for bars alive at the top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    At(usize),
    Inf,
}

impl Serialize for End {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            End::At(q) => s.serialize_u64(*q as u64),
            End::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for End {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            At(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::At(q) => Ok(End::At(q)),
            Raw::Text(s) if s == "inf" => Ok(End::Inf),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected an index or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// `[p, q)` as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span(pub usize, pub End);

impl Span {
    pub fn of(i: Interval, n: usize) -> Self {
        Span(i.p, if i.q > n { End::Inf } else { End::At(i.q) })
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.1 {
            End::At(q) => write!(f, "[{},{})", self.0, q),
            End::Inf => write!(f, "[{},inf)", self.0),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

impl From<&QuotientShape> for ShapeRecord {
    fn from(s: &QuotientShape) -> Self {
        ShapeRecord {
            free_rank: s.free_rank,
            torsion: ints(&s.invariant_factors),
        }
    }
}

impl std::fmt::Display for ShapeRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("C{}", d.0)).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Field shapes print as `k^d`.
fn field_shape(coeff: &str, s: &ShapeRecord) -> String {
    if coeff == "z" {
        s.to_string()
    } else {
        match s.free_rank {
            0 => "0".into(),
            1 => "k".into(),
            d => format!("k^{d}"),
        }
    }
}

/// Column-aligned text table.
fn grid(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let mut s = String::new();
        for (k, c) in cells.iter().enumerate().take(cols) {
            let pad = width[k] - c.chars().count();
            s.push_str(c);
            if k + 1 < cols {
                s.push_str(&" ".repeat(pad + 2));
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut out, &header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    line(&mut out, &width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for r in rows {
        line(&mut out, r);
    }
    out
}

fn vector(v: &[Int]) -> String {
    format!("({})", v.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(","))
}

/// Anything the command line can print.
pub trait Report: Serialize + DeserializeOwned {
    fn table(&self) -> String;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

// ---------------------------------------------------------------- abelian reports

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarRecord {
    pub interval: Span,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    /// Generators in the coordinates of the object at the birth index.
    pub generators: Vec<Vec<Int>>,
}

impl BarRecord {
    fn shape(&self) -> ShapeRecord {
        ShapeRecord {
            free_rank: self.free_rank,
            torsion: self.torsion.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarcodeReport {
    pub coeff: String,
    pub n: usize,
    pub bars: Vec<BarRecord>,
}

pub fn abelian_barcode(d: &ChainDiagram) -> Result<BarcodeReport> {
    let n = d.len();
    let cdf = analyze(d)?;
    let bars = barcode_from_cdf(&cdf)?
        .into_values()
        .map(|f| BarRecord {
            interval: Span::of(f.support, n),
            free_rank: f.shape.free_rank,
            torsion: ints(&f.shape.invariant_factors),
            generators: f.generators.iter().map(|g| ints(g)).collect(),
        })
        .collect();
    Ok(BarcodeReport {
        coeff: d.coeff().to_string(),
        n,
        bars,
    })
}

impl Report for BarcodeReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .bars
            .iter()
            .map(|b| {
                vec![
                    b.interval.to_string(),
                    field_shape(&self.coeff, &b.shape()),
                    b.generators.iter().map(|g| vector(g)).collect::<Vec<_>>().join(" "),
                ]
            })
            .collect();
        format!(
            "barcode over {}, n = {}\n{}",
            self.coeff,
            self.n,
            grid(&["interval", "factor", "generators"], &rows)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdfCell {
    pub p: usize,
    pub q: usize,
    /// `L<k>` when the cell is the `k`-th term of the reduced lexicographic series.
    pub label: Option<String>,
    /// Subgroup at each index `1..=n`, as an isomorphism type.
    pub parts: Vec<ShapeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCell {
    pub p: usize,
    pub q: usize,
    pub label: String,
    pub shape: ShapeRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdfReport {
    pub coeff: String,
    pub n: usize,
    /// Every `(p, q)` with `0 ≤ p ≤ n`, `0 ≤ q ≤ n + 1`, ordered by `(p, q)`.
    pub grid: Vec<CdfCell>,
    /// Nonzero quotients `A[p][q] / (A[p][q-1] ∨ A[p-1][q])`.
    pub factors: Vec<FactorCell>,
}

pub fn abelian_cdf(d: &ChainDiagram) -> Result<CdfReport> {
    let n = d.len();
    let cdf = analyze(d)?;
    let series = subsaecular_series(&cdf, &lexicographic_order(n))?;
    let label_of = |s: &crate::diagram::SubDiagram| -> Option<String> {
        series
            .reduced
            .iter()
            .position(|step| &step.upper == s)
            .map(|k| format!("L{}", k + 1))
    };
    let mut grid = Vec::with_capacity((n + 1) * (n + 2));
    for p in 0..=n {
        for q in 0..=n + 1 {
            let cell = cdf.get(p, q);
            grid.push(CdfCell {
                p,
                q,
                label: label_of(cell),
                parts: cell.parts().iter().map(|s| ShapeRecord::from(&s.shape())).collect(),
            });
        }
    }
    let mut factors = Vec::new();
    for (k, step) in series.reduced.iter().enumerate() {
        factors.push(FactorCell {
            p: step.support.p,
            q: step.support.q,
            label: format!("λ{}", k + 1),
            shape: ShapeRecord::from(&step.shape),
        });
    }
    factors.sort_by_key(|f| (f.p, f.q));
    Ok(CdfReport {
        coeff: d.coeff().to_string(),
        n,
        grid,
        factors,
    })
}

impl CdfReport {
    fn cell(&self, p: usize, q: usize) -> &CdfCell {
        &self.grid[p * (self.n + 2) + q]
    }

    fn tuple(&self, parts: &[ShapeRecord]) -> String {
        format!(
            "({})",
            parts
                .iter()
                .map(|s| field_shape(&self.coeff, s))
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

impl Report for CdfReport {
    /// Rows are `q` from the top down, columns are `p`, as in the usual
    /// matrix picture of the joint distribution function.
    fn table(&self) -> String {
        let n = self.n;
        let mut extra: BTreeMap<String, String> = BTreeMap::new();
        let mut unnamed: Vec<Vec<ShapeRecord>> = Vec::new();
        let mut name = |c: &CdfCell, extra: &mut BTreeMap<String, String>| -> String {
            if c.parts.iter().all(|s| s.free_rank == 0 && s.torsion.is_empty()) {
                return "0".into();
            }
            if let Some(l) = &c.label {
                extra.insert(l.clone(), self.tuple(&c.parts));
                return l.clone();
            }
            let k = match unnamed.iter().position(|u| u == &c.parts) {
                Some(k) => k,
                None => {
                    unnamed.push(c.parts.clone());
                    unnamed.len() - 1
                }
            };
            let l = format!("M{}", k + 1);
            extra.insert(l.clone(), self.tuple(&c.parts));
            l
        };
        let header: Vec<String> = std::iter::once("q\\p".to_string())
            .chain((0..=n).map(|p| p.to_string()))
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = (0..=n + 1)
            .rev()
            .map(|q| {
                std::iter::once(q.to_string())
                    .chain((0..=n).map(|p| name(self.cell(p, q), &mut extra)))
                    .collect()
            })
            .collect();
        let mut out = format!("A over {}, n = {}\n{}", self.coeff, n, grid(&header, &rows));
        let mut keys: Vec<&String> = extra.keys().collect();
        keys.sort_by_key(|k| (k.starts_with('M'), k[1..].parse::<usize>().unwrap_or(0)));
        for k in keys {
            let _ = writeln!(out, "{k} = {}", extra[k]);
        }
        let brows: Vec<Vec<String>> = (0..=n + 1)
            .rev()
            .map(|q| {
                std::iter::once(q.to_string())
                    .chain((0..=n).map(|p| {
                        self.factors
                            .iter()
                            .find(|f| f.p == p && f.q == q)
                            .map_or(String::new(), |f| f.label.clone())
                    }))
                    .collect()
            })
            .collect();
        let _ = write!(out, "\nB over {}, n = {}\n{}", self.coeff, n, grid(&header, &brows));
        for f in &self.factors {
            let _ = writeln!(
                out,
                "{} = {} on [{},{})",
                f.label,
                field_shape(&self.coeff, &f.shape),
                f.p,
                f.q
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    /// 1-based position in the linearization of the interval that grew the chain.
    pub position: usize,
    pub interval: Span,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    /// Coset representatives of the step quotient at the birth index.
    pub generators: Vec<Vec<Int>>,
    /// The new chain term, index by index.
    pub term: Vec<ShapeRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub coeff: String,
    pub n: usize,
    pub linearization: Vec<Span>,
    pub steps: Vec<SeriesRecord>,
}

pub fn abelian_series(d: &ChainDiagram, lin: &[Interval]) -> Result<SeriesReport> {
    let n = d.len();
    let cdf = analyze(d)?;
    let series = subsaecular_series(&cdf, lin)?;
    let mut steps = Vec::with_capacity(series.reduced.len());
    for s in &series.reduced {
        let p = s.support.p;
        let (_, gens) = quotient_shape_with_generators(s.upper.part(p), s.lower.part(p))?;
        steps.push(SeriesRecord {
            position: s.position,
            interval: Span::of(s.support, n),
            free_rank: s.shape.free_rank,
            torsion: ints(&s.shape.invariant_factors),
            generators: gens.iter().map(|g| ints(g)).collect(),
            term: s.upper.parts().iter().map(|x| ShapeRecord::from(&x.shape())).collect(),
        });
    }
    Ok(SeriesReport {
        coeff: d.coeff().to_string(),
        n,
        linearization: series.linearization.iter().map(|i| Span::of(*i, n)).collect(),
        steps,
    })
}

impl Report for SeriesReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let shape = ShapeRecord {
                    free_rank: s.free_rank,
                    torsion: s.torsion.clone(),
                };
                vec![
                    format!("L{}", k + 1),
                    s.position.to_string(),
                    s.interval.to_string(),
                    field_shape(&self.coeff, &shape),
                    s.term
                        .iter()
                        .map(|t| field_shape(&self.coeff, t))
                        .collect::<Vec<_>>()
                        .join(" -> "),
                ]
            })
            .collect();
        let order: Vec<String> = self.linearization.iter().map(Span::to_string).collect();
        format!(
            "reduced series over {}, n = {}\nlinearization: {}\n{}",
            self.coeff,
            self.n,
            order.join(" "),
            grid(&["term", "position", "interval", "factor", "chain term"], &rows)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JhRecord {
    pub free_rank: usize,
    /// Multiplicity of each simple factor: a prime `p` for `Z/p`, or `"k"` for the field.
    pub factors: BTreeMap<String, u64>,
}

impl From<&JhVector> for JhRecord {
    fn from(v: &JhVector) -> Self {
        let factors = v
            .torsion
            .iter()
            .map(|(f, k)| {
                let key = match f {
                    SimpleFactor::Cyclic(p) => p.to_string(),
                    SimpleFactor::Field => "k".to_string(),
                };
                (key, *k)
            })
            .collect();
        JhRecord {
            free_rank: v.free_rank,
            factors,
        }
    }
}

impl std::fmt::Display for JhRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(|(k, m)| format!("{m}*[{k}]")).collect();
        if self.free_rank > 0 {
            parts.push(format!("{}*[Z]", self.free_rank));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdbEntry {
    pub interval: Span,
    pub jh: JhRecord,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdbReport {
    pub coeff: String,
    pub n: usize,
    pub entries: Vec<PdbEntry>,
}

pub fn abelian_pdb(d: &ChainDiagram) -> Result<PdbReport> {
    let n = d.len();
    let pd = type_b_pd(d)?;
    Ok(PdbReport {
        coeff: d.coeff().to_string(),
        n,
        entries: pd
            .table
            .iter()
            .map(|(i, v)| PdbEntry {
                interval: Span::of(*i, n),
                jh: JhRecord::from(v),
            })
            .collect(),
    })
}

impl Report for PdbReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|e| vec![e.interval.to_string(), e.jh.to_string()])
            .collect();
        format!(
            "type-B diagram over {}, n = {}\n{}",
            self.coeff,
            self.n,
            grid(&["interval", "composition factors"], &rows)
        )
    }
}

// ---------------------------------------------------------------- homology reports

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyBar {
    pub interval: Span,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    /// One sparse cycle per summand, as `[cell id, coefficient]` pairs.
    pub representative: Vec<Vec<(CellId, Int)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalPiece {
    pub grade: usize,
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    pub representative: Vec<Vec<(CellId, Int)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyDegree {
    pub degree: usize,
    pub bars: Vec<HomologyBar>,
    /// Zero-persistence pieces, omitted from the bars.
    pub diagonal: Vec<DiagonalPiece>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub coeff: String,
    pub n: usize,
    pub grades: Vec<GradeEntry>,
    pub degrees: Vec<HomologyDegree>,
}

fn representative(x: &FilteredComplex, f: &HomologyFactor) -> Vec<Vec<(CellId, Int)>> {
    f.representatives
        .iter()
        .map(|r| {
            r.iter()
                .map(|(c, k)| (x.cells()[*c].id.clone(), Int(k.clone())))
                .collect()
        })
        .collect()
}

/// Barcodes in the given degrees, or every degree when `dims` is empty.
pub fn homology_report(parsed: &ParsedComplex, dims: &[usize]) -> Result<HomologyReport> {
    let x = &parsed.complex;
    let n = x.n();
    let dims: Vec<usize> = if dims.is_empty() {
        (0..=x.max_dim()).collect()
    } else {
        dims.to_vec()
    };
    let barcodes = crate::par::map(&dims, |&m| homology_barcode(x, m))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let degrees = barcodes
        .iter()
        .map(|b| HomologyDegree {
            degree: b.degree,
            bars: b
                .bars
                .values()
                .map(|f| HomologyBar {
                    interval: Span::of(f.support, n),
                    free_rank: f.shape.free_rank,
                    torsion: ints(&f.shape.invariant_factors),
                    representative: representative(x, f),
                })
                .collect(),
            diagonal: b
                .diagonal
                .iter()
                .map(|(g, f)| DiagonalPiece {
                    grade: *g,
                    free_rank: f.shape.free_rank,
                    torsion: ints(&f.shape.invariant_factors),
                    representative: representative(x, f),
                })
                .collect(),
        })
        .collect();
    Ok(HomologyReport {
        coeff: x.coeff().to_string(),
        n,
        grades: parsed.grades.clone(),
        degrees,
    })
}

fn chain_text(c: &[(CellId, Int)]) -> String {
    let terms: Vec<String> = c
        .iter()
        .map(|(id, k)| {
            if k.0 == BigInt::from(1) {
                id.to_string()
            } else {
                format!("{}*{id}", k.0)
            }
        })
        .collect();
    terms.join(" + ")
}

fn grades_line(grades: &[GradeEntry]) -> String {
    let literal = grades.iter().all(|g| g.value.as_u64() == Some(g.index as u64));
    if literal {
        return String::new();
    }
    let pairs: Vec<String> = grades.iter().map(|g| format!("{}={}", g.index, g.value)).collect();
    format!("grades: {}\n", pairs.join(" "))
}

impl Report for HomologyReport {
    fn table(&self) -> String {
        let mut out = format!(
            "homology over {}, n = {}\n{}",
            self.coeff,
            self.n,
            grades_line(&self.grades)
        );
        for d in &self.degrees {
            let mut rows: Vec<Vec<String>> = d
                .bars
                .iter()
                .map(|b| {
                    let shape = ShapeRecord {
                        free_rank: b.free_rank,
                        torsion: b.torsion.clone(),
                    };
                    let reps: Vec<String> = b.representative.iter().map(|r| chain_text(r)).collect();
                    vec![
                        b.interval.to_string(),
                        field_shape(&self.coeff, &shape),
                        reps.join("; "),
                    ]
                })
                .collect();
            for g in &d.diagonal {
                let shape = ShapeRecord {
                    free_rank: g.free_rank,
                    torsion: g.torsion.clone(),
                };
                let reps: Vec<String> = g.representative.iter().map(|r| chain_text(r)).collect();
                rows.push(vec![
                    format!("[{0},{0}]", g.grade),
                    field_shape(&self.coeff, &shape),
                    reps.join("; "),
                ]);
            }
            let _ = write!(
                out,
                "\nH{}\n{}",
                d.degree,
                grid(&["interval", "factor", "representative"], &rows)
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralRecord {
    pub degree: usize,
    pub p: usize,
    pub q: i64,
    pub cycles: ShapeRecord,
    pub boundaries: ShapeRecord,
    pub page: ShapeRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub coeff: String,
    pub n: usize,
    pub r: usize,
    pub grades: Vec<GradeEntry>,
    /// Ordered by `(degree, p)`.
    pub terms: Vec<SpectralRecord>,
}

/// `Z^r`, `B^r` and `E^r` at every `0 ≤ p ≤ n` of the given degrees (all when empty).
pub fn spectral_report(parsed: &ParsedComplex, dims: &[usize], r: usize) -> Result<SpectralReport> {
    let x = &parsed.complex;
    let n = x.n();
    let dims: Vec<usize> = if dims.is_empty() {
        (0..=x.max_dim()).collect()
    } else {
        dims.to_vec()
    };
    let contexts = crate::par::map(&dims, |&m| SpectralContext::new(x, m))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<(usize, usize)> = (0..dims.len()).flat_map(|k| (0..=n).map(move |p| (k, p))).collect();
    let terms = crate::par::map(&grid, |&(k, p)| contexts[k].term(p, r))
        .into_iter()
        .map(|t| {
            t.map(|t| SpectralRecord {
                degree: t.degree,
                p: t.p,
                q: t.q,
                cycles: ShapeRecord::from(&t.cycles),
                boundaries: ShapeRecord::from(&t.boundaries),
                page: ShapeRecord::from(&t.page),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralReport {
        coeff: x.coeff().to_string(),
        n,
        r,
        grades: parsed.grades.clone(),
        terms,
    })
}

impl Report for SpectralReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .terms
            .iter()
            .map(|t| {
                vec![
                    t.degree.to_string(),
                    t.p.to_string(),
                    t.q.to_string(),
                    field_shape(&self.coeff, &t.cycles),
                    field_shape(&self.coeff, &t.boundaries),
                    field_shape(&self.coeff, &t.page),
                ]
            })
            .collect();
        format!(
            "page r = {} over {}, n = {}\n{}{}",
            self.r,
            self.coeff,
            self.n,
            grades_line(&self.grades),
            grid(&["degree", "p", "q", "Z", "B", "E"], &rows)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationRecord {
    pub degree: usize,
    pub p: usize,
    pub q: i64,
    pub r: usize,
    pub cycles: bool,
    pub boundaries: bool,
    pub page: bool,
    /// Agreement with the closed-interval sums read literally.
    pub literal_boundaries: bool,
    pub literal_page: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub coeff: String,
    pub n: usize,
    pub all_pass: bool,
    pub failures: usize,
    pub literal_failures: usize,
    /// Whether the bar counts from the fast engine and the diagram route agree.
    pub routes_agree: bool,
    pub points: Vec<EnumerationRecord>,
}

pub fn enumeration_report(parsed: &ParsedComplex) -> Result<EnumerationSummary> {
    let x = &parsed.complex;
    let rep = ls_enumeration_check(x)?;
    Ok(EnumerationSummary {
        coeff: x.coeff().to_string(),
        n: x.n(),
        all_pass: rep.all_pass(),
        failures: rep.failures(),
        literal_failures: rep.literal_failures(),
        routes_agree: rep.routes_agree,
        points: rep
            .points
            .iter()
            .map(|p| EnumerationRecord {
                degree: p.degree,
                p: p.p,
                q: p.q,
                r: p.r,
                cycles: p.cycles,
                boundaries: p.boundaries,
                page: p.page,
                literal_boundaries: p.literal_boundaries,
                literal_page: p.literal_page,
            })
            .collect(),
    })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

impl Report for EnumerationSummary {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|p| {
                vec![
                    p.degree.to_string(),
                    p.p.to_string(),
                    p.q.to_string(),
                    p.r.to_string(),
                    verdict(p.cycles).into(),
                    verdict(p.boundaries).into(),
                    verdict(p.page).into(),
                    verdict(p.literal_boundaries && p.literal_page).into(),
                ]
            })
            .collect();
        format!(
            "enumeration over {}, n = {}: {} ({} failing points, {} literal misses, routes {})\n{}",
            self.coeff,
            self.n,
            verdict(self.all_pass),
            self.failures,
            self.literal_failures,
            if self.routes_agree { "agree" } else { "disagree" },
            grid(&["degree", "p", "q", "r", "Z", "B", "E", "literal"], &rows)
        )
    }
}

// ---------------------------------------------------------------- group reports

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetRecord {
    pub interval: Span,
    /// Number of cosets on the support.
    pub order: usize,
    pub cardinalities: Vec<usize>,
    pub natural: bool,
    pub interval_property: bool,
    /// Cosets at each index, as sorted element lists.
    pub cosets: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetReport {
    pub n: usize,
    pub bars: Vec<CosetRecord>,
}

pub fn group_barcode(d: &GroupDiagram) -> Result<CosetReport> {
    let n = d.len();
    let g = g_saecular(d)?;
    let bars = coset_barcode_from(d, &g)?
        .into_values()
        .map(|f| CosetRecord {
            interval: Span::of(f.support, n),
            order: f.cardinalities.iter().copied().max().unwrap_or(1),
            cardinalities: f.cardinalities,
            natural: f.natural,
            interval_property: f.interval_property,
            cosets: f.cosets,
        })
        .collect();
    Ok(CosetReport { n, bars })
}

fn counts(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

impl Report for CosetReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .bars
            .iter()
            .map(|b| {
                vec![
                    b.interval.to_string(),
                    b.order.to_string(),
                    counts(&b.cardinalities),
                    verdict(b.natural).into(),
                    verdict(b.interval_property).into(),
                ]
            })
            .collect();
        format!(
            "coset barcode, n = {}\n{}",
            self.n,
            grid(&["interval", "order", "cosets per index", "natural", "interval"], &rows)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedRecord {
    pub interval: Span,
    pub orders: Vec<usize>,
    pub den_normal: Vec<bool>,
    pub interval_property: bool,
    /// Multiplication table of the quotient at each index.
    pub tables: Vec<Vec<Vec<usize>>>,
    /// Induced maps between consecutive quotients.
    pub maps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedReport {
    pub n: usize,
    pub bars: Vec<NormalizedRecord>,
}

pub fn group_normalized(d: &GroupDiagram) -> Result<NormalizedReport> {
    let n = d.len();
    let bars = normalized_barcode(d)?
        .into_values()
        .map(|f| NormalizedRecord {
            interval: Span::of(f.support, n),
            orders: f.orders,
            den_normal: f.den_normal,
            interval_property: f.interval_property,
            tables: f.tables,
            maps: f.maps,
        })
        .collect();
    Ok(NormalizedReport { n, bars })
}

impl Report for NormalizedReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .bars
            .iter()
            .map(|b| {
                let normal: Vec<&str> = b.den_normal.iter().map(|x| if *x { "y" } else { "n" }).collect();
                vec![
                    b.interval.to_string(),
                    counts(&b.orders),
                    normal.join(" "),
                    verdict(b.interval_property).into(),
                ]
            })
            .collect();
        format!(
            "normalized barcode, n = {}\n{}",
            self.n,
            grid(&["interval", "orders per index", "normal", "interval"], &rows)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub n: usize,
    pub size: usize,
    /// Subgroup orders at each index for every lattice element.
    pub elements: Vec<Vec<usize>>,
    /// `grid[p][q]` is the element index of `K̂(p) ∧ K(q)`.
    pub grid: Vec<Vec<usize>>,
    pub distributivity: String,
    /// A failing triple of element indices, when there is one.
    pub witness: Option<(usize, usize, usize)>,
    pub kernels_normal: bool,
}

pub fn group_lattice(d: &GroupDiagram) -> Result<LatticeReport> {
    let g = g_saecular(d)?;
    let witness = g.lattice.distributivity_failure();
    Ok(LatticeReport {
        n: d.len(),
        size: g.lattice.len(),
        elements: g.lattice.elements.iter().map(|e| e.orders()).collect(),
        grid: g.grid.clone(),
        distributivity: verdict(g.distributive).into(),
        witness,
        kernels_normal: g.kernels_normal,
    })
}

impl Report for LatticeReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .elements
            .iter()
            .enumerate()
            .map(|(k, e)| vec![k.to_string(), counts(e)])
            .collect();
        let mut out = format!(
            "generated lattice, n = {}: {} elements, distributivity {}, kernels normal: {}\n",
            self.n,
            self.size,
            self.distributivity,
            if self.kernels_normal { "yes" } else { "no" }
        );
        if let Some((a, b, c)) = self.witness {
            let _ = writeln!(out, "failing triple: {a} {b} {c}");
        }
        out.push_str(&grid(&["element", "orders per index"], &rows));
        let header: Vec<String> = std::iter::once("p\\q".to_string())
            .chain((0..self.grid.first().map_or(0, Vec::len)).map(|q| q.to_string()))
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let cells: Vec<Vec<String>> = self
            .grid
            .iter()
            .enumerate()
            .map(|(p, row)| {
                std::iter::once(p.to_string())
                    .chain(row.iter().map(usize::to_string))
                    .collect()
            })
            .collect();
        let _ = write!(out, "\n{}", grid(&header, &cells));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DCYC: &str = r#"{"coeff":"z","objects":[{"rank":1,"relations":[[9]]},{"rank":1,"relations":[[6]]},{"rank":1,"relations":[[4]]}],"maps":[[[2]],[[2]]]}"#;

    #[test]
    fn cyclic_barcode_round_trips() {
        let d = parse_diagram(DCYC, None).unwrap();
        let r = abelian_barcode(&d).unwrap();
        let spans: Vec<String> = r.bars.iter().map(|b| b.interval.to_string()).collect();
        assert_eq!(spans, ["[1,2)", "[1,3)", "[2,inf)", "[3,inf)"]);
        let back: BarcodeReport = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.table(), r.table());
    }

    #[test]
    fn cdf_table_uses_series_labels() {
        let d = parse_diagram(DCYC, None).unwrap();
        let t = abelian_cdf(&d).unwrap().table();
        assert!(t.contains("L1 = (C3, 0, 0)"), "{t}");
        assert!(t.contains("L2 = (C9, C3, 0)"), "{t}");
        assert!(t.contains("L3 = (C9, C6, C2)"), "{t}");
        assert!(t.contains("L4 = (C9, C6, C4)"), "{t}");
        let top = t.lines().nth(3).unwrap();
        assert_eq!(top.split_whitespace().collect::<Vec<_>>(), ["4", "0", "L2", "L3", "L4"]);
    }

    #[test]
    fn big_integers_print_as_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        assert_eq!(serde_json::to_string(&Int(big.clone())).unwrap(), format!("\"{big}\""));
        assert_eq!(serde_json::to_string(&Int(BigInt::from(-7))).unwrap(), "-7");
        let back: Int = serde_json::from_str(&format!("\"{big}\"")).unwrap();
        assert_eq!(back.0, big);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(parse_diagram("{\"objects\":[]}", None), Err(Error::Schema(_))));
        assert!(matches!(parse_diagram("not json", None), Err(Error::Schema(_))));
        assert!(matches!(
            parse_diagram(r#"{"coeff":"fp:4","objects":[{"rank":1}]}"#, None),
            Err(Error::Schema(_))
        ));
        let bad = r#"{"objects":[{"rank":1,"relations":[[4]]},{"rank":1,"relations":[[6]]}],"maps":[[[1]]]}"#;
        assert!(matches!(parse_diagram(bad, None), Err(Error::IllDefinedMap { .. })));
    }

    #[test]
    fn real_grades_are_rank_compressed() {
        let text = r#"{"cells":[
            {"id":"a","dim":0,"grade":0.5},
            {"id":"b","dim":0,"grade":2.25},
            {"id":"e","dim":1,"grade":3.0,"boundary":[["a",-1],["b",1]]}]}"#;
        let parsed = parse_complex(text, Some(Coeff::Prime(2))).unwrap();
        assert_eq!(parsed.complex.n(), 3);
        let idx: Vec<usize> = parsed.complex.cells().iter().map(|c| c.grade).collect();
        assert_eq!(idx, [1, 2, 3]);
        assert_eq!(parsed.grades[1].value.as_f64(), Some(2.25));
        let r = homology_report(&parsed, &[0]).unwrap();
        let spans: Vec<String> = r.degrees[0].bars.iter().map(|b| b.interval.to_string()).collect();
        assert_eq!(spans, ["[1,inf)", "[2,3)"]);
    }

    #[test]
    fn integer_grades_are_kept() {
        let text = r#"{"n":5,"cells":[{"id":1,"dim":0,"grade":2},{"id":2,"dim":0,"grade":4}]}"#;
        let parsed = parse_complex(text, None).unwrap();
        assert_eq!(parsed.complex.n(), 5);
        assert_eq!(parsed.grades.iter().map(|g| g.index).collect::<Vec<_>>(), [2, 4]);
    }

    #[test]
    fn abelian_group_tables_give_cyclic_cardinalities() {
        let d = parse_diagram(DCYC, None).unwrap();
        let g = GroupDiagram::from_abelian(&d).unwrap();
        let text = serde_json::to_string(&group_input_of(&g)).unwrap();
        let g = parse_groups(&text).unwrap();
        let mut orders: Vec<usize> = group_barcode(&g).unwrap().bars.iter().map(|b| b.order).collect();
        orders.sort_unstable();
        assert_eq!(orders, [2, 2, 3, 3]);
    }
}
