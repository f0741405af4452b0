use std::path::PathBuf;
use std::process::{Command, Output};

fn binec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_binec")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("binec-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(binec(&["--help"]).status.code(), Some(0));
    assert_eq!(binec(&[]).status.code(), Some(1));
    assert_eq!(binec(&["bounds", "--p", "abc", "--C", "2", "--E", "3", "--m", "1"]).status.code(), Some(1));
    let o = binec(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn verify_field_reports_clean() {
    let o = binec(&["verify-field", "--m", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations 0"));
}

#[test]
fn bounds_csv() {
    let o = binec(&["bounds", "--p", "1/18", "--C", "2", "--E", "3", "--m", "1", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(binec::bounds::CSV_HEADER));
    assert_eq!(lines.count(), 1);
}

#[test]
fn build_then_simulate_from_config() {
    let dir = workdir("desk");
    std::fs::write(
        dir.join("desk.conf"),
        "network = synthetic\nC = 2\nE = 3\nm = 1\nn = 6\np = 1/18\nseed = 5\nnoise = exhaustive\ncodebook = desk.book\n",
    )
    .unwrap();
    let conf = dir.join("desk.conf");
    let book = dir.join("desk.book");
    let o = binec(&["build", "--config", conf.to_str().unwrap(), "--out", book.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("min_distance 3"));
    assert!(book.exists());

    // codebook path in the file resolves against the file's directory
    let o = binec(&["simulate", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("failures 0"));

    let csv = dir.join("trials.csv");
    let o = binec(&[
        "simulate",
        "--config",
        conf.to_str().unwrap(),
        "--noise",
        "uniform",
        "--trials",
        "25",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("trial,message,weight,decoded,distance,unique,ok\n"));
    assert_eq!(rows.lines().count(), 26);
}

#[test]
fn guards_exit_two() {
    let dir = workdir("guard");
    let big = dir.join("big.book");
    let o = binec(&["build", "--C", "4", "--E", "6", "--m", "2", "--n", "8", "--p", "1/100", "--out", big.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!big.exists());
    let book = dir.join("b.book");
    let b = book.to_str().unwrap();
    let base = ["--C", "2", "--E", "3", "--m", "1", "--n", "6", "--p", "1/18", "--seed", "1"];
    let mut args = vec!["build"];
    args.extend(base);
    args.extend(["--out", b]);
    assert_eq!(binec(&args).status.code(), Some(0));
    let mut args = vec!["simulate"];
    args.extend(base);
    args.extend(["--codebook", b, "--noise", "adversary", "--adversary-budget", "19"]);
    assert_eq!(binec(&args).status.code(), Some(1));
    let mut args = vec!["simulate"];
    args.extend(base);
    args.extend(["--codebook", b, "--noise", "concentrated:0", "--p", "2/9"]);
    assert_ne!(binec(&args).status.code(), Some(0));
}

#[test]
fn mds_check_on_network_file() {
    let dir = workdir("mds");
    let good = dir.join("relay.net");
    std::fs::write(&good, "net 3\nsource 0\nsink 2\nedge 0 1\nedge 0 1\nedge 1 2\nedge 1 2\n").unwrap();
    let o = binec(&["mds-check", "--network", good.to_str().unwrap(), "--m", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("mds true\n"));

    // parallel paths can never be MDS
    let bad = dir.join("paths.net");
    std::fs::write(&bad, "net 4\nsource 0\nsink 3\nedge 0 1\nedge 1 3\nedge 0 2\nedge 2 3\n").unwrap();
    let o = binec(&["mds-check", "--network", bad.to_str().unwrap(), "--m", "2", "--retries", "5"]);
    assert_eq!(o.status.code(), Some(2));
}
