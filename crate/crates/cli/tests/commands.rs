use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hyperim::hypergraph::load_edge_list;

fn hyperim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperim"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "0 1 2 3\n0 4 5\n2 3 6\n";

#[test]
fn convert_benson_prefix_and_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "toy-nverts.txt", "2\n3\n1\n");
    write(dir.path(), "toy-simplices.txt", "1\n2\n2\n3\n4\n4\n");
    let prefix = dir.path().join("toy");
    let out = hyperim(&[
        "convert",
        "--format",
        "benson",
        "--input",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let hg = load_edge_list(out.stdout.as_slice()).unwrap();
    assert_eq!(hg.hyperedges(), &[vec![0, 1], vec![1, 2, 3], vec![3]]);

    let nv = dir.path().join("toy-nverts.txt");
    let sx = dir.path().join("toy-simplices.txt");
    let out2 = hyperim(&[
        "convert",
        "--format",
        "benson",
        "--input",
        nv.to_str().unwrap(),
        "--input",
        sx.to_str().unwrap(),
    ]);
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn convert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.txt", "# comment\n3 1\n\n2 0 4\n");
    let out_path = dir.path().join("out.txt");
    let out = hyperim(&[
        "convert",
        "--input",
        &input,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let a = load_edge_list(fs::read(&input).unwrap().as_slice()).unwrap();
    let b = load_edge_list(fs::read(&out_path).unwrap().as_slice()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    let out = hyperim(&["stats", "--input", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));

    let bad = write(dir.path(), "bad.txt", "0 1\n2 x\n");
    let out = hyperim(&["stats", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let good = write(dir.path(), "g.txt", SMALL);
    assert_eq!(
        hyperim(&["seeds", "--input", &good, "--k", "0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyperim(&["seeds", "--input", &good, "--k", "2", "--epsilon", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hyperim(&["bench", "--input", &good, "--algo", "hyperim", "--k", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hyperim(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hyperim(&["seeds", "--input", &good, "--k", "1", "--algo", "imm"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn stats_and_layer_dump() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "fig1.txt", SMALL);
    let layers = dir.path().join("layers.csv");
    let out = hyperim(&[
        "stats",
        "--input",
        &input,
        "--dump-layers",
        layers.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,vertices,hyperedges,edges,avg_deg,avg_size,theta_lstar"
    );
    assert!(lines[1].starts_with("fig1,7,3,11,"));
    let dump = fs::read_to_string(layers).unwrap();
    assert!(dump.starts_with("vertex,layer_index,weight,size,layer_prob,member_prob\n"));
    assert!(dump.lines().any(|l| l.starts_with("2,1,2,1,")));
}

#[test]
fn seeds_evaluate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.txt", SMALL);
    let seeds = dir.path().join("seeds.csv");
    let out = hyperim(&[
        "seeds",
        "--input",
        &input,
        "--k",
        "2",
        "--epsilon",
        "0.3",
        "--algo",
        "hyperim-brr",
        "--output",
        seeds.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let table = fs::read_to_string(&seeds).unwrap();
    assert!(
        table.starts_with("rank,vertex,marginal_coverage,cumulative_coverage,influence_estimate\n")
    );
    assert_eq!(table.lines().count(), 3);
    let log = fs::read_to_string(dir.path().join("seeds.csv.iterations.csv")).unwrap();
    assert!(log.starts_with("iter,theta,coverage,lower,upper,ratio,stopped\n"));

    let out = hyperim(&[
        "evaluate",
        "--input",
        &input,
        "--seeds-csv",
        seeds.to_str().unwrap(),
        "--runs",
        "500",
        "--k",
        "1,2",
        "--model",
        "lt",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "model,k,runs,mean_spread,stderr,wall_ms");
    assert!(rows[1].starts_with("lt,1,500,"));
    assert!(rows[2].starts_with("lt,2,500,"));
}

#[test]
fn single_hyperedge_lowest_member() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "one.txt", "0 1\n");
    let out = hyperim(&["seeds", "--input", &input, "--k", "1", "--epsilon", "0.3"]);
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(1), Some("0"));
}

#[test]
fn bench_rows_and_counters() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.txt", SMALL);
    let out = hyperim(&[
        "bench",
        "--input",
        &input,
        "--algo",
        "hyperim",
        "--algo",
        "naive",
        "--algo",
        "hyperim",
        "--k",
        "1,2",
        "--epsilon",
        "0.3",
        "--runs",
        "500",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 6);
    let ops = |r: &Vec<&str>| r[9].parse::<u64>().unwrap();
    // hyperim rows 0,1 and 4,5; naive rows 2,3
    for k in 0..2 {
        assert!(ops(&rows[k]) <= ops(&rows[2 + k]));
        assert_eq!(rows[k][..10], rows[4 + k][..10]);
    }
}

#[test]
fn gen_rr_counters() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "g.txt", SMALL);
    let out = hyperim(&[
        "gen-rr", "--input", &input, "--algo", "hyperim", "--algo", "naive", "--algo", "subsim",
        "--theta", "200",
    ]);
    let text = stdout(&out);
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "algo,theta,total_members,size_draws,selection_draws,bernoulli_draws,geometric_draws,wall_ms");
    assert!(rows[1].starts_with("hyperim,200,"));
    assert!(rows[2].starts_with("naive,200,"));
    assert!(rows[3].starts_with("subsim,200,"));
}
