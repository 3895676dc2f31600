use std::path::Path;
use std::process::{Command, Output};

fn effham(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effham"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn effham")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL_MOTT: &str = "lobes = 2\nn_max = 6\ndetuning_points = 5\n";

#[test]
fn jch_mott_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.toml", SMALL_MOTT);
    let out = effham(&["jch-mott", "--config", &cfg, "--out", "m.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,detuning_over_g,boundary_npad,boundary_dense_eig,boundary_analytic,rel_err_npad,rel_err_dense"
    );
    assert_eq!(lines.count(), 10);
}

#[test]
fn reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.toml", SMALL_MOTT);
    effham(&["jch-mott", "--config", &cfg, "--out", "a.csv"], dir.path());
    effham(&["jch-mott", "--config", &cfg, "--out", "b.csv"], dir.path());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(dir.path(), "u.toml", "lobes = 2\nbogus = 1\n");
    assert_eq!(effham(&["jch-mott", "--config", &unknown], dir.path()).status.code(), Some(2));

    let malformed = write(dir.path(), "bad.toml", "lobes = [\n");
    assert_eq!(effham(&["jch-mott", "--config", &malformed], dir.path()).status.code(), Some(2));

    let missing = dir.path().join("nope.toml");
    let out = effham(&["jch-mott", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = effham(&["bench-givens", "--repeats", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let wrong = write(dir.path(), "w.toml", "experiment = \"spin-chain\"\n");
    assert_eq!(effham(&["jch-mott", "--config", &wrong], dir.path()).status.code(), Some(2));

    let out = effham(&["jch-mott", "--config", &write(dir.path(), "t.toml", "n_max = 1\n")], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_givens_small() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", "sizes = [10, 100]\n");
    let out = effham(&["bench-givens", "--config", &cfg, "--repeats", "5", "--parallelism", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("bench_givens.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["case", "n", "nnz", "repeats", "median_s", "min_s", "max_s", "parallelism", "backend"]
    );
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][7], "1");
}

#[test]
fn spin_chain_small_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "intervals = 10\nreference_steps = 200\nsweep = [5, 10]\ntiming_lengths = [4]\n\
         [chain]\nlength = 4\n[pulse]\nduration = 5.0\nsamples = 801\n",
    );
    let out = effham(&["spin-chain", "--config", &cfg, "--out", "s.csv", "--seed", "3"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["s.csv", "s_sweep.csv", "s_timing.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
