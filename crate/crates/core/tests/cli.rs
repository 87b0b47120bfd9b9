use std::process::{Command, Output};

fn sscodes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sscodes")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn empty_rate_list_is_a_usage_error() {
    assert_eq!(sscodes(&["potential-curve", "--channel", "bsc:eps=0.1", "--rates", "", "--large-b"]).status.code(), Some(2));
    let dir = std::env::temp_dir().join("sscodes_cli_empty.json");
    std::fs::write(&dir, r#"{"channel":"bsc:eps=0.1","rates":[],"large_b":true}"#).unwrap();
    let o = sscodes(&["potential-curve", "--config", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty rate list"));
}

#[test]
fn bad_inputs_map_to_config_exit_code() {
    assert_eq!(sscodes(&["potential-curve", "--channel", "bsc:eps=2", "--rates", "0.2", "--large-b"]).status.code(), Some(2));
    assert_eq!(sscodes(&["sc-profile", "--channel", "bsc:eps=0.1", "--rate", "0.3", "--gamma", "8", "--w", "2"]).status.code(), Some(2));
    assert_eq!(sscodes(&["thresholds", "--family", "rayleigh", "--params", "1"]).status.code(), Some(2));
    assert_eq!(sscodes(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn large_b_curves_have_the_four_curve_layout() {
    let o = sscodes(&["potential-curve", "--channel", "bsc:eps=0.1", "--rates", "0.2,0.2939,0.531,0.6", "--large-b", "--points", "101"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# sscodes "));
    assert!(text.lines().any(|l| l == "R,E,phi_u"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4 * 101);
    let curve = |k: usize| rows[k * 101..(k + 1) * 101].iter().map(|r| r[2]).collect::<Vec<_>>();
    for k in 0..4 {
        assert_eq!(curve(k)[0], 0.0);
    }
    // below R_u^∞ the origin is the global minimum, above C the far end wins
    assert!(curve(0).iter().all(|&v| v >= 0.0));
    assert!(curve(3)[100] < 0.0);
    // at R = C the two ends are level
    assert!(curve(2)[100].abs() < 1e-3);
}

#[test]
fn finite_b_curves_are_byte_identical_across_runs() {
    let args = ["potential-curve", "--channel", "bsc:eps=0.1", "--rates", "0.25", "--b", "4", "--points", "11", "--mc-samples", "20000", "--seed", "7"];
    let a = sscodes(&args);
    let b = sscodes(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().any(|l| l == "R,E,F_u"));
}

#[test]
fn awgn_threshold_columns_match_closed_forms() {
    let params: Vec<String> = (1..=15).map(|s| s.to_string()).collect();
    let v = json(&sscodes(&["thresholds", "--family", "awgn", "--params", &params.join(",")]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 15);
    for row in rows {
        let snr = row["param"].as_f64().unwrap();
        let c = 0.5 * (1.0 + snr).log2();
        let ru = snr / (2.0 * std::f64::consts::LN_2 * (1.0 + snr));
        assert!((row["C"].as_f64().unwrap() - c).abs() < 1e-6);
        assert!((row["R_u_inf"].as_f64().unwrap() - ru).abs() < 1e-6);
    }
    assert_eq!(v["provenance"]["config"]["family"], "awgn");
    assert!(v["provenance"]["version"].is_string());
}

#[test]
fn noiseless_bsc_endpoint() {
    let v = json(&sscodes(&["thresholds", "--family", "bsc", "--params", "0"]));
    let row = &v["rows"][0];
    assert_eq!(row["C"].as_f64().unwrap(), 1.0);
    let want = 1.0 / (std::f64::consts::PI * std::f64::consts::LN_2);
    assert!((row["R_u_inf"].as_f64().unwrap() - want).abs() < 1e-9);
}

#[test]
fn z_sweep_reports_both_input_distributions() {
    let v = json(&sscodes(&["thresholds", "--family", "z", "--params", "0.1,0.3"]));
    for row in v["rows"].as_array().unwrap() {
        for key in ["C_half", "C_opt", "R_u_inf_half", "R_u_inf_opt", "p1_opt"] {
            assert!(row[key].is_number(), "missing {key}");
        }
        assert!(row["C_opt"].as_f64().unwrap() >= row["C_half"].as_f64().unwrap());
    }
}

#[test]
fn sc_profile_above_the_potential_threshold_keeps_a_plateau() {
    let o = sscodes(&["sc-profile", "--channel", "bsc:eps=0.1", "--rate", "0.3", "--gamma", "64", "--w", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "# plateau true"));
    let sat: Vec<f64> = data_rows(&text).iter().filter(|r| r[0] == -1.0).map(|r| r[2]).collect();
    assert_eq!(sat.len(), 64);
    assert!(sat.windows(2).all(|w| w[1] >= w[0]));

    let o = sscodes(&["sc-profile", "--channel", "bsc:eps=0.1", "--rate", "0.26", "--gamma", "64", "--w", "2"]);
    assert!(stdout(&o).lines().any(|l| l == "# plateau false"));
}

#[test]
fn decode_with_zero_iterations_reports_the_initial_mse() {
    let o = sscodes(&["decode", "--channel", "awgn:snr=10", "--l", "128", "--b", "4", "--rate", "0.5", "--t-max", "0", "--seeds", "3,4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "seed,t,mse_empirical,mse_se,ser"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r[2] - 0.75).abs() < 1e-14);
        assert_eq!(r[3], 0.75);
    }
}

#[test]
fn out_flag_writes_a_file() {
    let path = std::env::temp_dir().join("sscodes_cli_selftest.txt");
    let o = sscodes(&["selftest", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() >= 15);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn threshold_sat_orders_the_three_thresholds() {
    let v = json(&sscodes(&["threshold-sat", "--channel", "bsc:eps=0.1", "--gamma", "32", "--w", "1"]));
    let ru = v["R_u"]["rate"].as_f64().unwrap();
    let rp = v["R_pot"]["rate"].as_f64().unwrap();
    let rc = v["R_c"]["threshold"]["rate"].as_f64().unwrap();
    assert!(ru < rc && rc <= rp + 0.05, "{ru} {rc} {rp}");
    assert_eq!(v["R_c"]["gamma"], 32);
    assert_eq!(v["ordering"]["R_u_lt_R_c"], true);
}
