use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use saecula::json::{
    BarcodeReport, CdfReport, CosetReport, EnumerationSummary, HomologyReport, LatticeReport, NormalizedReport,
    PdbReport, Report, SeriesReport, SpectralReport,
};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/fixtures")
        .join(name)
}

fn saecula(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saecula"))
        .args(args)
        .env_remove("SAECULA_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = saecula(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    saecula(args).status.code().expect("exit code")
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

fn bars(v: &Value) -> Vec<(String, Vec<i64>)> {
    v["bars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            let i = &b["interval"];
            let q = if i[1].is_string() {
                "inf".to_string()
            } else {
                i[1].to_string()
            };
            let t = b["torsion"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_i64().unwrap())
                .collect();
            (format!("[{},{q})", i[0]), t)
        })
        .collect()
}

#[test]
fn cyclic_barcode_has_four_bars() {
    let dcyc = fixture("dcyc.json");
    let v: Value = serde_json::from_str(&ok(&["abelian", "barcode", dcyc.to_str().unwrap()])).unwrap();
    let want = [("[1,2)", 3), ("[1,3)", 3), ("[2,inf)", 2), ("[3,inf)", 2)];
    let got = bars(&v);
    assert_eq!(got.len(), 4);
    for ((span, t), (ws, wt)) in got.iter().zip(want) {
        assert_eq!((span.as_str(), t.as_slice()), (ws, [wt].as_slice()));
    }
}

#[test]
fn cdf_table_has_the_matrix_rows() {
    let dcyc = fixture("dcyc.json");
    let t = ok(&["abelian", "cdf", dcyc.to_str().unwrap(), "--format", "table"]);
    let rows: Vec<Vec<&str>> = t
        .lines()
        .skip(3)
        .take(5)
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows[0], ["4", "0", "L2", "L3", "L4"]);
    assert_eq!(rows[1], ["3", "0", "L2", "L2", "L2"]);
    assert_eq!(rows[2], ["2", "0", "L1", "L1", "L1"]);
    assert_eq!(rows[3], ["1", "0", "0", "0", "0"]);
    assert!(t.contains("L3 = (C9, C6, C2)"));
}

#[test]
fn disk_bars_and_generators() {
    let disk = fixture("ddisk.json");
    let v: Value = serde_json::from_str(&ok(&["homology", "barcode", disk.to_str().unwrap(), "--dim", "1"])).unwrap();
    let d = &v["degrees"][0];
    assert_eq!(d["degree"], 1);
    let reps: Vec<(String, i64)> = d["bars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            let r = &b["representative"][0][0];
            (r[0].as_str().unwrap().to_string(), r[1].as_i64().unwrap().abs())
        })
        .collect();
    let free: Vec<u64> = d["bars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["free_rank"].as_u64().unwrap())
        .collect();
    assert_eq!(free, [1, 0, 0]);
    assert_eq!(reps[0], ("zeta".to_string(), 4));
    assert_eq!(reps[1].1 % 4, 2);
    assert_eq!(reps[2].1 % 2, 1);
}

#[test]
fn disk_over_f2_matches_reduction() {
    let disk = fixture("ddisk.json");
    let path = disk.to_str().unwrap();
    let v: Value = serde_json::from_str(&ok(&["homology", "barcode", path, "--dim", "1", "--coeff", "fp:2"])).unwrap();
    let spans: Vec<String> = v["degrees"][0]["bars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| format!("{}:{}", b["interval"], b["free_rank"]))
        .collect();
    assert_eq!(spans, [r#"[1,"inf"]:1"#]);
    let v: Value = serde_json::from_str(&ok(&["homology", "barcode", path, "--dim", "1", "--coeff", "fp:3"])).unwrap();
    assert_eq!(v["degrees"][0]["bars"][0]["interval"], serde_json::json!([1, 2]));
}

#[test]
fn enumcheck_passes_over_f2_and_refuses_integers() {
    let disk = fixture("ddisk.json");
    let path = disk.to_str().unwrap();
    let v: Value = serde_json::from_str(&ok(&["homology", "enumcheck", path, "--coeff", "fp:2"])).unwrap();
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["failures"], 0);
    assert_eq!(code(&["homology", "enumcheck", path]), 5);
}

#[test]
fn group_commands_on_fixtures() {
    let s3 = fixture("s3chain.json");
    let v: Value = serde_json::from_str(&ok(&["group", "lattice", s3.to_str().unwrap()])).unwrap();
    assert_eq!(v["distributivity"], "pass");
    let dcyc = fixture("dcyc.json");
    let v: Value = serde_json::from_str(&ok(&["group", "barcode", dcyc.to_str().unwrap(), "--from-abelian"])).unwrap();
    let mut orders: Vec<u64> = v["bars"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["order"].as_u64().unwrap())
        .collect();
    orders.sort_unstable();
    assert_eq!(orders, [2, 2, 3, 3]);
}

#[test]
fn exit_codes() {
    let empty = write_temp(r#"{"coeff":"z","objects":[],"maps":[]}"#);
    assert_eq!(code(&["abelian", "barcode", empty.path().to_str().unwrap()]), 2);
    let garbage = write_temp("{");
    assert_eq!(code(&["abelian", "barcode", garbage.path().to_str().unwrap()]), 2);
    assert_eq!(code(&["abelian", "barcode", "/nonexistent/file.json"]), 1);

    let ill = write_temp(r#"{"objects":[{"rank":1,"relations":[[4]]},{"rank":1,"relations":[[6]]}],"maps":[[[1]]]}"#);
    let out = saecula(&["abelian", "barcode", ill.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("map 1"));

    let square = write_temp(
        r#"{"cells":[{"id":"a","dim":0,"grade":1},{"id":"b","dim":0,"grade":1},
        {"id":"e","dim":1,"grade":1,"boundary":[["a",1],["b",1]]},
        {"id":"f","dim":2,"grade":2,"boundary":[["e",1]]}]}"#,
    );
    let out = saecula(&["homology", "barcode", square.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("cell f") && msg.contains("face a"), "{msg}");

    // a Latin square with identity 0 that is not associative
    let loop5 =
        write_temp(r#"{"groups":[{"table":[[0,1,2,3,4],[1,0,3,4,2],[2,4,0,1,3],[3,2,4,0,1],[4,3,1,2,0]]}],"maps":[]}"#);
    let out = saecula(&["group", "barcode", loop5.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("!="));
    let repeated = write_temp(r#"{"groups":[{"table":[[0,1,2],[1,0,0],[2,2,1]]}],"maps":[]}"#);
    assert_eq!(code(&["group", "barcode", repeated.path().to_str().unwrap()]), 3);
    let nonhom =
        write_temp(r#"{"groups":[{"table":[[0,1],[1,0]]},{"table":[[0,1,2],[1,2,0],[2,0,1]]}],"maps":[[0,1]]}"#);
    assert_eq!(code(&["group", "barcode", nonhom.path().to_str().unwrap()]), 3);

    let n = 600;
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let big = write_temp(&serde_json::json!({"groups": [{"table": table}], "maps": []}).to_string());
    assert_eq!(code(&["group", "lattice", big.path().to_str().unwrap()]), 6);

    let dcyc = fixture("dcyc.json");
    assert_eq!(
        code(&[
            "abelian",
            "series",
            dcyc.to_str().unwrap(),
            "--linearization",
            "1:3,1:2"
        ]),
        3
    );
}

#[test]
fn json_output_is_deterministic() {
    let dcyc = fixture("dcyc.json");
    let disk = fixture("ddisk.json");
    for args in [
        vec!["abelian", "cdf", dcyc.to_str().unwrap()],
        vec!["homology", "barcode", disk.to_str().unwrap()],
        vec![
            "homology",
            "spectral",
            disk.to_str().unwrap(),
            "--coeff",
            "fp:2",
            "--page",
            "2",
        ],
    ] {
        let a = ok(&args);
        let mut threaded = args.clone();
        threaded.extend(["--threads", "1"]);
        assert_eq!(a, ok(&args));
        assert_eq!(a, ok(&threaded));
    }
}

fn round_trip<R: Report>(args: &[&str]) {
    let json = ok(args);
    let report: R = serde_json::from_str(&json).unwrap();
    assert_eq!(report.json(), json, "{args:?}");
    let mut table_args = args.to_vec();
    table_args.extend(["--format", "table"]);
    assert_eq!(report.table(), ok(&table_args), "{args:?}");
}

#[test]
fn tables_render_the_json_data() {
    let dcyc = fixture("dcyc.json");
    let disk = fixture("ddisk.json");
    let s3 = fixture("s3chain.json");
    let (dcyc, disk, s3) = (dcyc.to_str().unwrap(), disk.to_str().unwrap(), s3.to_str().unwrap());
    round_trip::<BarcodeReport>(&["abelian", "barcode", dcyc]);
    round_trip::<CdfReport>(&["abelian", "cdf", dcyc]);
    round_trip::<SeriesReport>(&["abelian", "series", dcyc, "--linearization", "random", "--seed", "7"]);
    round_trip::<PdbReport>(&["abelian", "pdb", dcyc]);
    round_trip::<HomologyReport>(&["homology", "barcode", disk]);
    round_trip::<SpectralReport>(&["homology", "spectral", disk, "--page", "1"]);
    round_trip::<EnumerationSummary>(&["homology", "enumcheck", disk, "--coeff", "fp:3"]);
    round_trip::<CosetReport>(&["group", "barcode", s3]);
    round_trip::<NormalizedReport>(&["group", "normalized", s3]);
    round_trip::<LatticeReport>(&["group", "lattice", s3]);
}
