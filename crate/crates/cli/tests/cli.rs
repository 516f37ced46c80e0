use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gmelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gmelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_ppt_on_isotropic() {
    let out = gmelab(&[
        "check",
        "--state",
        "isotropic:0.5",
        "--criterion",
        "ppt",
        "--cut",
        "1|2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["command"][0], "check");
    assert!(r["tolerances"]["ppt"].is_number());
    let e = &r["result"]["results"][0];
    assert_eq!(e["cut"], "1|2");
    assert!((e["value"].as_f64().unwrap() + 0.125).abs() < 1e-12);
    assert_eq!(e["verdict"], "entangled-certified");
}

#[test]
fn check_sum_on_ghz() {
    let r = report(&gmelab(&[
        "check",
        "--state",
        "ghz:3",
        "--criterion",
        "sum",
    ]));
    let e = &r["result"]["results"][0];
    assert!((e["value"].as_f64().unwrap() - 1.5).abs() < 5e-3);
    assert_eq!(e["details"]["threshold"].as_f64(), Some(2.0));
    assert_eq!(e["verdict"], "no-violation");
}

#[test]
fn check_negativity_of_noise() {
    let r = report(&gmelab(&[
        "check",
        "--state",
        "isotropic:0",
        "--criterion",
        "negativity",
    ]));
    assert_eq!(r["result"]["results"][0]["value"].as_f64(), Some(0.0));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["check", "--state", "isotropic:1.5", "--criterion", "ppt"][..],
        &["check", "--state", "warp:3", "--criterion", "ppt"],
        &["check", "--state", "ghz:3", "--criterion", "magic"],
        &[
            "check",
            "--state",
            "ghz:3",
            "--criterion",
            "ppt",
            "--cut",
            "1|2",
        ],
        &[
            "check",
            "--state",
            "ghz:3",
            "--criterion",
            "sum",
            "--cut",
            "1|23",
        ],
        &["activate", "--n", "2"],
    ] {
        let out = gmelab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let r = report(&out);
        assert_eq!(r["status"], "input-error");
        assert!(r["error"].is_string());
    }
    let out = gmelab(&[
        "check",
        "--state",
        "bell",
        "--criterion",
        "ppt",
        "--tol-nonsense",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_three() {
    let out = gmelab(&[
        "check",
        "--state",
        "star_pen:3:0.9",
        "--criterion",
        "tppt",
        "--tol-sdp-max-iterations",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["status"], "solver-failure");
    assert_eq!(r["tolerances"]["sdp_max_iterations"], 2);
}

#[test]
fn tolerance_overrides_are_recorded() {
    let r = report(&gmelab(&[
        "check",
        "--state",
        "isotropic:0.5",
        "--criterion",
        "ppt",
        "--tol-ppt=0.5",
    ]));
    assert_eq!(r["tolerances"]["ppt"].as_f64(), Some(0.5));
    assert_ne!(r["result"]["results"][0]["verdict"], "entangled-certified");
}

#[test]
fn activate_single_copy() {
    let dir = tempfile::tempdir().unwrap();
    let side = dir.path().join("cert.json");
    let out = gmelab(&[
        "activate",
        "--n",
        "3",
        "--k",
        "1",
        "--emit-matrices",
        side.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out)["result"].clone();
    assert_eq!(r["p0"].as_f64(), Some(0.5));
    assert_eq!(r["p_hat"].as_f64(), Some(0.5));
    assert_eq!(r["verification"]["passed"], true);
    assert_eq!(r["activatability"]["verdict"], "activatable-certified");
    let cert = read_json(&side);
    assert_eq!(cert["certificate"]["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn activate_two_copies() {
    let r = report(&gmelab(&["activate", "--n", "3", "--k", "2"]))["result"].clone();
    assert!((r["p0"].as_f64().unwrap() - 0.4654775).abs() < 1e-7);
    assert!(r["p_hat"].as_f64().unwrap() > 1.0 / 3.0);
    assert_eq!(r["searched"], true);
    assert_eq!(r["verification"]["passed"], true);
}

#[test]
fn activate_low_visibility_is_flagged() {
    let r = report(&gmelab(&["activate", "--n", "3", "--k", "1", "--p", "0.2"]))["result"].clone();
    assert_eq!(r["verification"]["passed"], true);
    assert_eq!(r["certificate"]["activation_relevant"], false);
}

#[test]
fn sweep_edges_change_sign_at_threshold() {
    let out = gmelab(&[
        "sweep",
        "--n",
        "3",
        "--k",
        "1",
        "--p-grid",
        "0.30:0.60:0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,p,criterion,cut,value,verdict"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 14);
    let value = |i: usize| rows[i][5].parse::<f64>().unwrap();
    assert!(value(0) > 0.0 && value(2) < 0.0);
    let ps: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn sweep_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_gmelab"))
            .env("GMELAB_THREADS", threads)
            .args([
                "sweep",
                "--n",
                "3,4",
                "--k",
                "1",
                "--p-grid",
                "0.2:0.6:0.1",
                "--criterion",
                "ppt,gb,activatable",
            ])
            .args(["--seed", "11", "--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["seed"], 11);
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("4", "b.csv"));
}

#[test]
fn dense_state_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let out = gmelab(&[
        "check",
        "--state",
        "pen:3:1-2=0.37,2-3=0.81",
        "--criterion",
        "ppt",
        "--emit-matrices",
        first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, read_json(&first)["state"].to_string()).unwrap();
    let second = dir.path().join("second.json");
    let arg = format!("@{}", spec.display());
    let out = gmelab(&[
        "check",
        "--state",
        &arg,
        "--criterion",
        "ppt",
        "--emit-matrices",
        second.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let bits = |v: &Value| -> Vec<u64> {
        v["state"]["entries"]
            .as_array()
            .unwrap()
            .iter()
            .flat_map(|z| {
                z.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_f64().unwrap().to_bits())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let (a, b) = (bits(&read_json(&first)), bits(&read_json(&second)));
    assert_eq!(a.len(), 2 * 16 * 16);
    assert_eq!(a, b);
}
