use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deficiency")).args(args).env_remove("DEFICIENCY_REPORT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = cli(&a);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn indices_examples() {
    for (args, want) in [
        (&["indices", "--pair", "1,1", "--power", "2"][..], "(2,2)"),
        (&["indices", "--pair", "0,0", "--poly", "3,5,1"], "(0,0)"),
        (&["indices", "--pair", "1,0", "--power", "3"], "(2,1)"),
        (&["indices", "--pair", "1,0", "--poly", "0,0,0,-1"], "(1,2)"),
        (&["indices", "--pair", "1,2", "--product", "1,1"], "(2,3)"),
        (&["indices", "--pair", "inf,1", "--power", "2"], "(inf,inf)"),
    ] {
        let o = cli(args);
        assert!(o.status.success(), "{args:?}");
        assert_eq!(stdout(&o).trim(), want, "{args:?}");
    }
}

#[test]
fn malformed_arguments_are_usage_errors() {
    for args in [
        &["indices", "--pair", "1,1"][..],
        &["indices", "--pair", "a,1", "--power", "2"],
        &["indices", "--pair", "1,1", "--power", "2", "--poly", "1,1"],
        &["indices", "--pair", "1,1", "--power", "0"],
        &["classify", "nonsense(1)"],
        &["expand", "--family", "bessel_alpha(2)", "--m", "2"],
    ] {
        let o = cli(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty());
    }
    let o = cli(&["verify", "--tol", "mfold"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_filters() {
    let o = cli(&["verify", "--filter", "none-matching"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0 checks"));

    let v = json(&["verify", "--filter", "limit3"]);
    assert_eq!(v["exit_status"], 0);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 12);
    assert!(checks.iter().all(|c| c["pass"] == true && c["claim"] == "limit3"));
    let tau4: Vec<&Value> = checks.iter().filter(|c| c["case"].as_str().unwrap().starts_with("tau4")).collect();
    assert_eq!(tau4.len(), 4);
    assert!(tau4.iter().all(|c| c["observed"] == "3"));

    let v = json(&["verify", "--filter", "jacobi-table"]);
    assert_eq!(v["checks"].as_array().unwrap().len(), 9);
}

#[test]
fn failing_checks_set_the_exit_status() {
    let o = cli(&["verify", "--filter", "compose-square", "--tol", "compose=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn json_is_deterministic_with_seventeen_digits() {
    let a = cli(&["classify", "bessel_gamma(1/2)", "--json"]);
    let b = cli(&["classify", "bessel_gamma(1/2)", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.contains("1.0000000000000000e0"), "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "deficiency-run/1");
    assert_eq!(v["results"]["indices"], "(1,1)");
    assert_eq!(v["results"]["d_a"], 2);
    assert_eq!(v["results"]["d_b"], 1);
}

#[test]
fn classify_irrational_parameter() {
    let v = json(&["classify", "bessel_alpha(sqrt(33)/2)"]);
    assert_eq!(v["results"]["indices"], "(1,1)");
    let v = json(&["classify", "bessel4_alpha(sqrt(33)/2)"]);
    assert_eq!(v["results"]["indices"], "(3,3)");
    let v = json(&["classify", "legendre", "--z", "0,-1"]);
    assert_eq!(v["results"]["indices"], "(2,2)");
}

#[test]
fn thin_commands() {
    let v = json(&["roots", "--poly", "4,0,-5,0,1"]);
    assert_eq!(v["results"]["roots"].as_array().unwrap().len(), 4);
    for p in v["results"]["perturbed"].as_array().unwrap() {
        assert_eq!(p["counts"]["in_upper"], 2);
        assert_eq!(p["counts"]["in_lower"], 2);
    }

    let v = json(&["stirling", "--family", "legendre", "--m", "4", "--j", "2"]);
    let vals: Vec<&str> =
        v["results"]["entries"].as_array().unwrap().iter().map(|e| e["value"].as_str().unwrap()).collect();
    assert_eq!(vals, ["1", "8", "52"]);
    let o = cli(&["stirling", "--m", "3"]);
    assert!(stdout(&o).contains("3  2  3"));

    let v = json(&["expand", "--family", "legendre", "--m", "2"]);
    let cs: Vec<&str> =
        v["results"]["terms"].as_array().unwrap().iter().map(|t| t["coefficient"]["value"].as_str().unwrap()).collect();
    assert_eq!(cs, ["2", "1"]);

    let v = json(&["apply", "--expr", "bessel_alpha(2)", "--fn", "(1-x)^9/2", "--x", "0.5"]);
    let got = v["results"]["values"][0].as_f64().unwrap();
    let want = -12.0 * 0.5f64.powf(2.5);
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got}");

    let v = json(&["pde", "--dim", "3", "--L", "2", "--m", "3"]);
    assert_eq!(v["results"]["total"]["n_plus"], "3");
    let powers = v["results"]["powers"].as_array().unwrap();
    assert_eq!(powers[2][1]["n_minus"], "9");
}

#[test]
fn report_directory() {
    let dir = std::env::temp_dir().join(format!("deficiency-cli-test-{}", std::process::id()));
    let o = Command::new(env!("CARGO_BIN_EXE_deficiency"))
        .args(["indices", "--pair", "1,1", "--power", "3"])
        .env("DEFICIENCY_REPORT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(dir.join("indices.json")).unwrap()).unwrap();
    assert_eq!(v["results"]["indices"], "(3,3)");
    std::fs::remove_dir_all(dir).unwrap();
}
