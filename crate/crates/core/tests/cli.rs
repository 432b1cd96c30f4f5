use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
name = small
ball = 0 0 -5 4 1
ball = -5.52 0 -7.36 4 1
n_theta = 60
n_gamma = 60
eps = 0.3
rho = 0
p_min = -14
p_max = 14
probe = ball-normal
probe_ball = 0
normal_angles = 0.7*pi 0.2*pi
h_min = -2
h_max = 2
h_step = 0.5
remote_eps = 0.6 0.3
";

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radon-edge"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    dir
}

#[test]
fn kernel_check_succeeds() {
    let dir = setup();
    let out = bin(&["kernel-check", "--out", "k"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 7, "{text}");
    let csv = fs::read_to_string(dir.path().join("k/kernel_phi.csv")).unwrap();
    assert!(csv.starts_with("breakpoint,c0,c1,c2,c3,c4\n"));
}

#[test]
fn profile_outputs_are_thread_independent() {
    let dir = setup();
    let mut runs = Vec::new();
    for threads in ["1", "3", "1"] {
        let outdir = format!("t{}_{}", threads, runs.len());
        let out = bin(&["--config", "small.cfg", "--threads", threads, "--out", &outdir, "profile"], dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read(dir.path().join(&outdir).join("small.csv")).unwrap();
        let svg = fs::read(dir.path().join(&outdir).join("small.svg")).unwrap();
        runs.push((csv, svg, out.stdout));
    }
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(runs[0].0.clone()).unwrap();
    assert!(csv.starts_with("h,f_eps,predicted,abs_err\n"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn simulated_sinogram_feeds_profile() {
    let dir = setup();
    assert!(bin(&["--config", "small.cfg", "--out", "a", "simulate"], dir.path()).status.success());
    let rsg = fs::read(dir.path().join("a/small.rsg")).unwrap();
    assert!(rsg.starts_with(b"RSG1\n"));
    let table = bin(
        &["--config", "small.cfg", "--out", "b", "profile", "--sinogram", "a/small.rsg"],
        dir.path(),
    );
    assert!(table.status.success(), "{}", String::from_utf8_lossy(&table.stderr));
    assert!(bin(&["--config", "small.cfg", "--out", "c", "profile"], dir.path()).status.success());
    assert_eq!(
        fs::read(dir.path().join("b/small.csv")).unwrap(),
        fs::read(dir.path().join("c/small.csv")).unwrap()
    );
}

#[test]
fn genericity_and_remote_check() {
    let dir = setup();
    let out = bin(&["--config", "small.cfg", "genericity"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cond2 irrational_gradient: generic"), "{text}");
    assert!(text.contains("cond4 ball 1"), "{text}");

    let out = bin(&["--config", "small.cfg", "--out", "r", "remote-check"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("eps,max_abs\n0.6,"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = setup();
    fs::write(dir.path().join("bad.cfg"), SMALL.replace("eps = 0.3\n", "")).unwrap();
    let out = bin(&["--config", "bad.cfg", "profile"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("'eps'"));
    assert_eq!(bin(&["profile"], dir.path()).status.code(), Some(2));
    assert_eq!(bin(&["--threads", "0", "kernel-check"], dir.path()).status.code(), Some(2));
}

#[test]
fn geometry_errors_exit_with_three() {
    let dir = setup();
    let off = SMALL.replace("probe = ball-normal", "probe = explicit")
        .replace("probe_ball = 0\n", "x0 = 0 0 0\n")
        .replace("normal_angles = 0.7*pi 0.2*pi", "theta0 = 1 0 0");
    fs::write(dir.path().join("off.cfg"), off).unwrap();
    let out = bin(&["--config", "off.cfg", "profile"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ud_sweep_rows() {
    let dir = setup();
    let out = bin(
        &["ud", "--f", "t/2", "--a", "0", "--b", "99", "--eps", "1", "--weyl", "2"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "eps,n,star_discrepancy,weyl\n1,100,0.5,1\n");
    let out = bin(
        &["ud", "--f", "t*t", "--a", "0.1", "--b", "0.45", "--eps", "1e-2,1e-3", "--d2", "20", "--shear", "1"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("eps,n,star_discrepancy,d2,d2_error_bound,d2_sheared\n"));
    assert_eq!(text.lines().count(), 3);
    let out = bin(&["ud", "--f", "t +", "--a", "0", "--b", "1", "--eps", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn plot_command() {
    let dir = setup();
    fs::write(dir.path().join("one.csv"), "h,f_eps,predicted,abs_err\n0,0.5,0.5,0\n").unwrap();
    let out = bin(&["plot", "--input", "one.csv"], dir.path());
    assert!(out.status.success());
    let svg = fs::read_to_string(dir.path().join("one.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    fs::write(dir.path().join("empty.csv"), "h,f_eps,predicted,abs_err\n").unwrap();
    let out = bin(&["plot", "--input", "empty.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}
