mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixtures_dir;
use reskit_core::io::{CertificateFile, PartitionFile, ProblemFile};

fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

fn reskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reskit")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn essential_exit_codes() {
    let ok = reskit(&["essential", path_str(&fixture("example1.json"))]);
    assert_eq!(code(&ok), 0);
    assert_eq!(stdout(&ok).trim(), "essential");
    let bad = reskit(&["essential", path_str(&fixture("parallel_segments.json"))]);
    assert_eq!(code(&bad), 4);
    assert!(stdout(&bad).contains("members [0, 1] sum to dimension 1"));
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"ambient_dim\": 2, \"polytopes\": [").unwrap();
    assert_eq!(code(&reskit(&["essential", path_str(&p)])), 3);
    std::fs::write(&p, "{\"ambient_dim\": 2, \"polytopes\": [{\"points\": [[0]]}]}").unwrap();
    assert_eq!(code(&reskit(&["essential", path_str(&p)])), 3);
    assert_eq!(code(&reskit(&["essential", "/nonexistent/file.json"])), 3);
    assert_eq!(code(&reskit(&["frobnicate"])), 3);
}

#[test]
fn partition_strategies() {
    let o = reskit(&["partition", path_str(&fixture("example2.json"))]);
    assert_eq!(code(&o), 0);
    let p = PartitionFile::parse(&stdout(&o)).unwrap();
    assert_eq!(p.strategy.as_deref(), Some("dim2"));
    assert_eq!(p.planar_case.as_deref(), Some("PartiallyUnmixed2a"));
    let o = reskit(&["partition", path_str(&fixture("triangles.json"))]);
    assert_eq!(PartitionFile::parse(&stdout(&o)).unwrap().strategy.as_deref(), Some("locally-unmixed"));
    let o = reskit(&["partition", "--strategy", "search", path_str(&fixture("segments.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(PartitionFile::parse(&stdout(&o)).unwrap().cells, vec![vec![vec![vec![0]], vec![vec![1]]]; 2]);
    let o = reskit(&["partition", "--strategy", "locally-unmixed", path_str(&fixture("example1.json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn exceptional_partition_exits_2() {
    let o = reskit(&["partition", path_str(&fixture("example3.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("exceptional"));
    assert_eq!(code(&reskit(&["residue", path_str(&fixture("example3.json"))])), 2);
}

#[test]
fn non_essential_residue_exits_4() {
    assert_eq!(code(&reskit(&["residue", path_str(&fixture("parallel_segments.json"))])), 4);
}

#[test]
fn residue_reports_determinant_and_degree() {
    let o = reskit(&["residue", path_str(&fixture("example2.json"))]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("determinant: a1*b2*c0*x*y + a0*b1*c1*x^2*y - a1*b0*c1*x^2*y"));
    assert!(stderr(&o).contains("cdeg: 1"));
    let c = CertificateFile::parse(&stdout(&o)).unwrap();
    assert_eq!(c.cdeg, 1);
    assert!(!c.vanishing);
    assert_eq!(c.support, vec![vec![1, 1], vec![2, 1]]);
    assert!(c.ledger.iter().all(|e| e.passed == Some(true)));
    let o = reskit(&["residue", path_str(&fixture("segments.json"))]);
    assert!(stderr(&o).contains("determinant: a0*b1*x - a1*b0*x"));
}

#[test]
fn cdeg_command() {
    let o = reskit(&["cdeg", path_str(&fixture("example1.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "1");
    assert_eq!(stdout(&reskit(&["cdeg", path_str(&fixture("tetrahedra.json"))])).trim(), "1");
}

#[test]
fn files_round_trip_byte_for_byte() {
    for name in ["example1.json", "example2.json", "example3.json", "triangles.json", "segments.json", "tetrahedra.json", "parallel_segments.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        assert_eq!(ProblemFile::parse(&text).unwrap().to_json(), text, "{name}");
    }
    let cert = stdout(&reskit(&["residue", path_str(&fixture("example1.json"))]));
    assert_eq!(CertificateFile::parse(&cert).unwrap().to_json(), cert);
    let part = stdout(&reskit(&["partition", path_str(&fixture("example1.json"))]));
    assert_eq!(PartitionFile::parse(&part).unwrap().to_json(), part);
}

#[test]
fn output_is_deterministic() {
    let input = fixture("example1.json");
    let a = reskit(&["residue", path_str(&input)]);
    let b = reskit(&["residue", path_str(&input)]);
    assert_eq!(a.stdout, b.stdout);
    for jobs in ["1", "2", "7"] {
        assert_eq!(reskit(&["--jobs", jobs, "residue", path_str(&input)]).stdout, a.stdout);
    }
    let other = CertificateFile::parse(&stdout(&reskit(&["--seed", "17", "residue", path_str(&input)]))).unwrap();
    let base = CertificateFile::parse(&stdout(&a)).unwrap();
    assert_eq!(other.seed, 17);
    assert_eq!((other.cdeg, &other.determinant, &other.partition), (base.cdeg, &base.determinant, &base.partition));
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = reskit(&["residue", path_str(&fixture("example2.json")), "--output", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(CertificateFile::parse(&text).unwrap().cdeg, 1);
}

fn write_partition(dir: &Path, cells: Vec<Vec<Vec<Vec<i64>>>>) -> PathBuf {
    let p = dir.join("partition.json");
    let file = PartitionFile { ambient_dim: 2, cells, strategy: None, planar_case: None };
    std::fs::write(&p, file.to_json()).unwrap();
    p
}

#[test]
fn verify_example2_and_corruptions() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("example2.json");
    let part = dir.path().join("good.json");
    reskit(&["partition", path_str(&input), "--output", path_str(&part)]);
    let o = reskit(&["verify", path_str(&input), "--partition", path_str(&part)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));

    let mut cells = PartitionFile::parse(&std::fs::read_to_string(&part).unwrap()).unwrap().cells;
    cells[2].swap(0, 2);
    let bad = write_partition(dir.path(), cells);
    let o = reskit(&["verify", path_str(&input), "--partition", path_str(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL  coloring matrices have permanent 0"));
    assert!(stdout(&o).contains("FAIL  every transversal sum is interior"));

    assert_eq!(code(&reskit(&["verify", path_str(&input)])), 3);
}

#[test]
fn verify_names_a_non_induced_point() {
    let dir = tempfile::tempdir().unwrap();
    // the midpoint of [0,2] sits in class 1 while both endpoints are in class 0
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"ambient_dim": 1, "polytopes": [{"points": [[0], [2]]}, {"points": [[0], [1]]}],
            "partition": [[[[0], [2]], [[1]]], [[[0]], [[1]]]]}"#,
    )
    .unwrap();
    let o = reskit(&["verify", path_str(&problem)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL  cells induced from vertex partitions: cell (0,1) holds [1]"));
}

#[test]
fn embedded_partition_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"ambient_dim": 1, "polytopes": [{"points": [[0], [1]]}, {"points": [[0], [1]]}],
            "partition": [[[[0]], [[1]]], [[[1]], [[0]]]]}"#,
    )
    .unwrap();
    assert_eq!(code(&reskit(&["residue", path_str(&problem)])), 1);
    assert_eq!(code(&reskit(&["cdeg", path_str(&problem)])), 1);
}
