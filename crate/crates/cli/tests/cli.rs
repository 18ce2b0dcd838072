use std::path::Path;
use std::process::{Command, Output};

fn braidlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidlab")).args(args).env("BRAIDLAB_THREADS", "1").output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn constants_record() {
    let text = stdout(&braidlab(&["constants"]));
    assert!(text.contains("theta0 = 0.5901"), "{text}");
    assert!(text.contains("xi0 = -0.7681"));
    assert!(text.contains("c1 = "));
    let json: serde_json::Value = serde_json::from_str(&stdout(&braidlab(&["constants", "--json"]))).unwrap();
    let rec = &json["records"][0];
    let theta0 = rec["theta0"].as_f64().unwrap();
    assert!((theta0 - 0.590106125).abs() < 1e-8);
    assert_eq!(json["config"]["command"], "constants");
    let step = stdout(&braidlab(&["constants", "--theta", "-0.5", "--csv"]));
    let rows = data_rows(&step);
    assert_eq!(rows.len(), 1);
    assert!(step.contains("\ntheta,beta,zeta,"));
}

#[test]
fn unknown_subcommand_prints_usage() {
    let o = braidlab(&["frobnicate"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn range_errors_name_the_key() {
    let o = braidlab(&["actions", "--L", "-1"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`L`") && err.contains("expected"), "{err}");
    let o = braidlab(&["actions", "--set", "colour=blue"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key `colour`"));
}

#[test]
fn module_errors_carry_the_parameters() {
    let o = braidlab(&["predict", "--n", "3", "--slope", "1", "--law", "inverse-h", "--h", "0.2:0.3", "--set", "alpha0=0.5"]);
    assert!(o.status.success());
    let o = braidlab(&["wells", "sweep", "--n", "2", "--N", "16", "--h", "0.05:0.06:2", "--m", "2"]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("wells sweep") && err.contains("N=16"), "{err}");
}

#[test]
fn csv_header_and_finite_fields() {
    let csv = stdout(&braidlab(&["reduce-demo", "--sites", "60", "--barrier", "0.05", "--phase-sweep", "0:3:4", "--csv"]));
    assert!(csv.starts_with(&format!("# braidlab {}\n", env!("CARGO_PKG_VERSION"))));
    assert!(csv.contains("# command = reduce-demo\n# format = csv\n# seed = 0\n"));
    assert!(csv.contains("\nphase,lambda1,lambda2,lambda3,I0,abs_I1,theta,norm_R\n"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    for row in rows {
        for f in row {
            let x: f64 = f.parse().unwrap();
            assert!(x.is_finite());
            // 17 significant digits
            assert_eq!(f.trim_start_matches('-').split('e').next().unwrap().len(), 18, "{f}");
        }
    }
}

#[test]
fn wells_sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# small double well\nn = 2\nN = 64\nh = 0.26:0.3:3\nm = 3\nseed = 4\n").unwrap();
    let out = |name: &str| {
        let path = dir.path().join(name);
        let o = braidlab(&["wells", "sweep", "--config", conf.to_str().unwrap(), "--out", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(path).unwrap()
    };
    let (a, b) = (out("a.csv"), out("b.csv"));
    let strip_out = |s: &str| s.lines().filter(|l| !l.starts_with("# out = ")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip_out(&a), strip_out(&b));
    assert!(a.contains("# seed = 4\n"));
    assert!(a.contains("\nh,lambda1,lambda2,lambda3,gap21,gap32,theta_fit\n"));
    let rows = data_rows(&a);
    assert_eq!(rows.len(), 3);
    let hs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!((hs[0] - 0.3).abs() < 1e-15 && (hs[2] - 0.26).abs() < 1e-15);
    assert!(rows.iter().all(|r| r[6].is_empty()));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("p.conf");
    std::fs::write(&conf, "command = predict\nslope = 2.0\nh = 0.1:0.3\n").unwrap();
    let csv = stdout(&braidlab(&["predict", "--config", conf.to_str().unwrap(), "--slope", "4.0"]));
    assert!(csv.contains("# slope = 4.0\n"));
    assert!(csv.contains("# h = 0.1:0.3\n"));
    let o = braidlab(&["constants", "--config", conf.to_str().unwrap()]);
    assert!(!o.status.success());
}

#[test]
fn keys_lists_the_table() {
    let text = stdout(&braidlab(&["keys", "strip", "sweep"]));
    assert!(text.contains("eps_curv") && text.contains("sigma_nodes"));
}

#[test]
fn golden_fixtures() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let text = stdout(&braidlab(&["regress", "--fixtures", dir.to_str().unwrap()]));
    assert!(text.contains(" 0 failed"), "{text}");
}

#[test]
fn regress_reports_drift() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.conf"), "command = predict\nslope = 3.0\n").unwrap();
    let root = dir.path().to_str().unwrap();
    assert!(braidlab(&["regress", "--fixtures", root, "--update"]).status.success());
    assert!(braidlab(&["regress", "--fixtures", root]).status.success());
    let golden = dir.path().join("p.csv");
    let text = std::fs::read_to_string(&golden).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let last = lines.len() - 1;
    lines[last] = lines[last].replacen('1', "2", 1);
    std::fs::write(&golden, lines.join("\n") + "\n").unwrap();
    let o = braidlab(&["regress", "--fixtures", root]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL p"));
}
