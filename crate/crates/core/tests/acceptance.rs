//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use saecula::coeff::Coeff;
use saecula::diagram::{ChainDiagram, Interval};
use saecula::fingroup::{coset_barcode_from, g_saecular};
use saecula::homology::{
    cycle_boundary_filtrations, homology_barcode, homology_diagram, ls_enumeration_check, CellSpec, FilteredComplex,
};
use saecula::random::{random_complex, random_group_diagram, random_torsion_diagram, torus, ComplexParams};
use saecula::saecular::{
    all_downsets, analyze, barcode, check_lattice_hom, jh_of_barcode, lexicographic_order, mobius_inversion,
    random_downset, random_linear_extension, subsaecular_series, Downset,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn dcyc() -> ChainDiagram {
    ChainDiagram::cyclic(&[9, 6, 4], &[2, 2]).unwrap()
}

fn disk(coeff: Coeff) -> FilteredComplex {
    FilteredComplex::new(
        coeff,
        3,
        vec![
            CellSpec::new("v", 0, 1, &[]),
            CellSpec::new("zeta", 1, 1, &[]),
            CellSpec::new("A", 2, 2, &[("zeta", 4)]),
            CellSpec::new("B", 2, 3, &[("zeta", 2)]),
        ],
    )
    .unwrap()
}

fn cyclic_fixture() -> Outcome {
    let start = Instant::now();
    let d = dcyc();
    let bars: Vec<(Interval, Vec<i64>)> = barcode(&d)
        .map_err(err)?
        .into_iter()
        .map(|(i, f)| (i, f.shape.torsion_i64()))
        .collect();
    let expected = vec![
        (Interval::new(1, 2), vec![3]),
        (Interval::new(1, 3), vec![3]),
        (Interval::new(2, 4), vec![2]),
        (Interval::new(3, 4), vec![2]),
    ];
    ensure(bars == expected, || format!("barcode {bars:?}"))?;
    let cdf = analyze(&d).map_err(err)?;
    let l1 = vec![vec![3], vec![], vec![]];
    let l2 = vec![vec![9], vec![3], vec![]];
    let l3 = vec![vec![9], vec![6], vec![2]];
    let l4 = vec![vec![9], vec![6], vec![4]];
    let zero = vec![vec![], vec![], vec![]];
    let want: BTreeMap<(usize, usize), Vec<Vec<i64>>> = BTreeMap::from([
        ((1, 2), l1.clone()),
        ((2, 2), l1.clone()),
        ((3, 2), l1),
        ((1, 3), l2.clone()),
        ((1, 4), l2.clone()),
        ((2, 3), l2.clone()),
        ((3, 3), l2),
        ((2, 4), l3),
        ((3, 4), l4),
    ]);
    for p in 1..=3 {
        for q in 1..=4 {
            let got: Vec<Vec<i64>> = (1..=3).map(|a| cdf.get(p, q).part(a).shape().torsion_i64()).collect();
            let w = want.get(&(p, q)).unwrap_or(&zero);
            ensure(&got == w, || format!("A[{p}][{q}] = {got:?}, expected {w:?}"))?;
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("4 bars and 12 grid cells match in {:.0?}", start.elapsed()))
}

fn disk_fixture() -> Outcome {
    let start = Instant::now();
    let x = disk(Coeff::Integers);
    let b = homology_barcode(&x, 1).map_err(err)?;
    let shapes: Vec<(Interval, String)> = b.bars.iter().map(|(i, f)| (*i, f.shape.to_string())).collect();
    let want = vec![
        (Interval::new(1, 2), "Z".to_string()),
        (Interval::new(1, 3), "C2".to_string()),
        (Interval::new(1, 4), "C2".to_string()),
    ];
    ensure(shapes == want, || format!("bars {shapes:?}"))?;
    let f = cycle_boundary_filtrations(&x, 1).map_err(err)?;
    let g = x.chain_group(1);
    let zeta = x.cells().iter().position(|c| c.id == "zeta".into()).unwrap();
    for ((i, factor), k) in b.bars.iter().zip([4i64, 2, 1]) {
        let (p, q) = (i.p, i.q);
        let den = f
            .z(p)
            .meet(&f.b(q - 1))
            .and_then(|a| a.join(&f.z(p - 1).meet(&f.b(q))?))
            .map_err(err)?;
        let gens: Vec<Vec<BigInt>> = factor.representatives.iter().map(|r| x.dense_chain(1, r)).collect();
        let emitted = g.subgroup(gens).and_then(|s| s.join(&den)).map_err(err)?;
        let mut e = vec![BigInt::from(0); x.chain_rank(1)];
        e[x.coordinate(zeta)] = BigInt::from(k);
        let reference = g.subgroup(vec![e]).and_then(|s| s.join(&den)).map_err(err)?;
        ensure(emitted == reference, || format!("generator on {i} does not match {k}ζ"))?;
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("Z, C2, C2 with cosets of 4ζ, 2ζ, ζ in {:.0?}", start.elapsed()))
}

fn field_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ae1);
    let params = ComplexParams {
        max_cells: 60,
        max_dim: 3,
        grades: 6,
        multipliers: &[1, 2, 3, 5],
    };
    let mut factors = 0;
    for trial in 0..200 {
        let base = random_complex(&mut rng, params, Coeff::Integers).map_err(err)?;
        for p in [2u64, 5] {
            let x = base.with_coeff(Coeff::Prime(p)).map_err(err)?;
            let oracle = common::oracle::standard_bars(&x, p);
            for m in 0..=x.max_dim() {
                let want: BTreeMap<Interval, usize> = oracle
                    .iter()
                    .filter(|((dim, _, _), _)| *dim == m)
                    .map(|((_, b, d), k)| (Interval::new(*b, *d), *k))
                    .collect();
                let saecular: BTreeMap<Interval, usize> = barcode(&homology_diagram(&x, m).map_err(err)?)
                    .map_err(err)?
                    .into_iter()
                    .map(|(i, f)| (i, f.shape.free_rank))
                    .collect();
                let fast: BTreeMap<Interval, usize> = homology_barcode(&x, m)
                    .map_err(err)?
                    .bars
                    .into_iter()
                    .map(|(i, f)| (i, f.shape.free_rank))
                    .collect();
                ensure(saecular == want, || {
                    format!("trial {trial}, F_{p}, degree {m}: {saecular:?} vs oracle {want:?}")
                })?;
                ensure(fast == want, || {
                    format!("trial {trial}, F_{p}, degree {m}: engine {fast:?} vs oracle {want:?}")
                })?;
                factors += want.len();
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "400 complex/field pairs, {factors} factors agree in {:.1?}",
        start.elapsed()
    ))
}

fn abelian_corpus() -> Vec<ChainDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x55);
    (0..200).map(|_| random_torsion_diagram(&mut rng, 6, 4)).collect()
}

fn type_b_cross_check(corpus: &[ChainDiagram]) -> Outcome {
    let start = Instant::now();
    let mut intervals = 0;
    for (k, d) in corpus.iter().enumerate() {
        let pd = mobius_inversion(d).map_err(err)?;
        let bars = jh_of_barcode(d).map_err(err)?;
        ensure(pd == bars, || {
            format!("diagram {k}: {:?} vs {:?}", pd.table, bars.table)
        })?;
        intervals += pd.table.len();
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "200 diagrams, {intervals} nonzero intervals agree in {:.1?}",
        start.elapsed()
    ))
}

fn leray_serre() -> Outcome {
    let start = Instant::now();
    let mut points = 0;
    let mut literal_misses = 0;
    let report = ls_enumeration_check(&disk(Coeff::Prime(2))).map_err(err)?;
    ensure(report.all_pass(), || {
        format!("disk: {} failing points", report.failures())
    })?;
    points += report.points.len();
    literal_misses += report.literal_failures();
    let mut rng = ChaCha8Rng::seed_from_u64(0x15);
    let params = ComplexParams {
        max_cells: 40,
        max_dim: 3,
        grades: 5,
        multipliers: &[2, 3, 4],
    };
    for k in 0..50 {
        let p = [2u64, 3, 5][k % 3];
        let x = random_complex(&mut rng, params, Coeff::Integers)
            .and_then(|x| x.with_coeff(Coeff::Prime(p)))
            .map_err(err)?;
        let report = ls_enumeration_check(&x).map_err(err)?;
        ensure(report.routes_agree, || format!("complex {k}: bar routes disagree"))?;
        ensure(report.all_pass(), || {
            format!("complex {k} over F_{p}: {} failing points", report.failures())
        })?;
        points += report.points.len();
        literal_misses += report.literal_failures();
    }
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "{points} grid points hold with grid-corrected indexing in {:.1?} (printed indexing misses {literal_misses})",
        start.elapsed()
    ))
}

fn lattice_homomorphism() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x01);
    let mut small = vec![dcyc()];
    while small.len() < 12 {
        let d = random_torsion_diagram(&mut rng, 3, 3);
        small.push(d);
    }
    let mut checked = 0;
    for d in &small {
        let n = d.len();
        let cdf = analyze(d).map_err(err)?;
        let all = all_downsets(n);
        let pairs: Vec<(Downset, Downset)> = all
            .iter()
            .flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        let r = check_lattice_hom(&cdf, &pairs).map_err(err)?;
        ensure(r.holds(), || format!("n = {n}: {r:?}"))?;
        checked += r.pairs_checked;
    }
    let mut large = Vec::new();
    while large.len() < 5 {
        let d = random_torsion_diagram(&mut rng, 6, 3);
        if d.len() >= 4 {
            large.push(d);
        }
    }
    for (k, d) in large.iter().enumerate() {
        let cdf = analyze(d).map_err(err)?;
        let pairs: Vec<(Downset, Downset)> = (0..100)
            .map(|_| (random_downset(d.len(), &mut rng), random_downset(d.len(), &mut rng)))
            .collect();
        let r = check_lattice_hom(&cdf, &pairs).map_err(err)?;
        ensure(r.holds(), || format!("random diagram {k}: {r:?}"))?;
        checked += r.pairs_checked;
    }
    Ok(format!("{checked} downset pairs preserved in {:.1?}", start.elapsed()))
}

fn linearization_independence(corpus: &[ChainDiagram]) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x30);
    for (k, d) in corpus.iter().enumerate() {
        let n = d.len();
        let cdf = analyze(d).map_err(err)?;
        let base = subsaecular_series(&cdf, &lexicographic_order(n))
            .map_err(err)?
            .factor_multiset();
        for _ in 0..5 {
            let lin = random_linear_extension(n, &mut rng);
            let got = subsaecular_series(&cdf, &lin).map_err(err)?.factor_multiset();
            ensure(got == base, || {
                format!("diagram {k}: order {lin:?} changes the factors")
            })?;
        }
    }
    Ok(format!(
        "1000 random linear extensions agree in {:.1?}",
        start.elapsed()
    ))
}

fn group_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x45);
    let mut natural = 0;
    let mut factors = 0;
    for k in 0..100 {
        let d = random_group_diagram(&mut rng, 4);
        let g = g_saecular(&d).map_err(err)?;
        ensure(g.distributive, || {
            format!("diagram {k}: generated lattice is not distributive")
        })?;
        ensure(g.kernels_normal, || format!("diagram {k}: a kernel is not normal"))?;
        for (i, f) in coset_barcode_from(&d, &g).map_err(err)? {
            factors += 1;
            if f.natural {
                natural += 1;
                ensure(f.interval_property, || {
                    format!("diagram {k}: natural factor on {i} is not an interval")
                })?;
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "100 diagrams distributive with normal kernels; {natural}/{factors} natural factors are intervals in {:.1?}",
        start.elapsed()
    ))
}

fn performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9);
    let xz = torus(&mut rng, 19, 18, 50, Coeff::Integers).map_err(err)?;
    let x = xz.with_coeff(Coeff::Prime(2)).map_err(err)?;
    let cells = x.cells().len();
    let start = Instant::now();
    let f2 = homology_barcode(&x, 1).map_err(err)?;
    let t2 = start.elapsed();
    ensure(t2 < Duration::from_secs(10), || format!("F_2 took {t2:.2?}"))?;
    let start = Instant::now();
    let z = homology_barcode(&xz, 1).map_err(err)?;
    let tz = start.elapsed();
    ensure(tz < Duration::from_secs(60), || format!("Z took {tz:.2?}"))?;
    let essential = |b: &saecula::homology::HomologyBarcode| -> usize {
        b.bars
            .iter()
            .filter(|(i, _)| i.q == x.n() + 1)
            .map(|(_, f)| f.shape.free_rank)
            .sum()
    };
    ensure(essential(&f2) == 2 && essential(&z) == 2, || {
        "torus must keep two essential classes".into()
    })?;
    Ok(format!("{cells}-cell torus: F_2 {t2:.2?}, Z {tz:.2?}"))
}

fn main() {
    let corpus = abelian_corpus();
    let results: Vec<(&str, Outcome)> = vec![
        ("cyclic fixture", cyclic_fixture()),
        ("disk fixture", disk_fixture()),
        ("field equivalence", field_equivalence()),
        ("type-B cross-check", type_b_cross_check(&corpus)),
        ("Leray-Serre enumeration", leray_serre()),
        ("lattice homomorphism", lattice_homomorphism()),
        ("linearization independence", linearization_independence(&corpus)),
        ("group suite", group_suite()),
        ("performance floor", performance()),
    ];
    let mut failed = 0;
    for (k, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg}", k + 1)
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
