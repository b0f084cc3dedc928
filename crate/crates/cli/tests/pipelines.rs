//! Simulate, histogram and fit through the command line.

mod common;

use common::{cavqed, code, json, stderr, write};

#[test]
fn lifetime_pipeline_recovers_tau() {
    let dir = tempfile::tempdir().unwrap();
    let tau = 6.09;
    write(
        dir.path(),
        "sim.toml",
        &format!(
            "excitation = \"pulsed\"\nperiod_ns = 25.641\npulses = 1000000\ngamma_r_per_ns = 0.05\ngamma_0_per_ns = {}\nseed = 5\nout = \"pl\"\n",
            1.0 / tau - 0.05
        ),
    );
    let out = cavqed(dir.path(), &["simulate", "--config", "sim.toml"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8(out.stdout).unwrap().contains("channel 2: 1000000 tags"));

    write(
        dir.path(),
        "lt.toml",
        "sync_input = \"pl.ch2.ttag\"\nphoton_input = \"pl.ch0.ttag\"\nbin_width_ps = 100\nout = \"decay.csv\"\n",
    );
    let out = cavqed(dir.path(), &["lifetime", "--config", "lt.toml"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    assert!(text.contains("# period_ps: 25641\n") && text.contains("# partial_bin_dropped: true\n"), "{text}");

    write(dir.path(), "fit.toml", "input = \"decay.csv\"\nmodel = \"monoexp\"\nweights = \"poisson\"\n");
    let r = json(&cavqed(dir.path(), &["fit", "--config", "fit.toml"]));
    let fitted = r["params"]["tau"].as_f64().unwrap();
    assert!((fitted / tau - 1.0).abs() < 0.03, "tau {fitted}");
    assert_eq!(r["converged"], true);
}

#[test]
fn hbt_pipeline_antibunches() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "sim.toml",
        "excitation = \"cw\"\nduration_ns = 1.0e8\nk_pump_per_ns = 0.19\ngamma_r_per_ns = 0.1\n\
         gamma_0_per_ns = 0.0066666667\nk_isc_per_ns = 0.06\nk_t_per_ns = 0.065\n\
         efficiency_a = 0.5\nefficiency_b = 0.5\njitter_sigma_ps = 30\nseed = 21\nout = \"hbt\"\n",
    );
    let out = cavqed(dir.path(), &["simulate", "--config", "sim.toml", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    write(
        dir.path(),
        "corr.toml",
        "input_a = \"hbt.ch0.csv\"\ninput_b = \"hbt.ch1.csv\"\nbin_width_ps = 200\nmax_delay_ps = 100000\nduration_ns = 1.0e8\nout = \"h.csv\"\n",
    );
    let out = cavqed(dir.path(), &["correlate", "--config", "corr.toml"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(text.contains("# normalization: analytic\n") && text.contains("# g2_unity_counts: "));

    write(dir.path(), "fit.toml", "input = \"h.csv\"\nmodel = \"g2\"\nweights = \"poisson\"\nbin_average = true\n");
    let r = json(&cavqed(dir.path(), &["fit", "--config", "fit.toml"]));
    let p = &r["params"];
    assert!(p["b"].as_f64().unwrap() < 0.02, "{p}");
    assert!(p["c"].as_f64().unwrap() > 0.0, "{p}");
    assert_eq!(r["bin_width"], 0.2);

    // determinism across the whole chain
    let again = json(&cavqed(dir.path(), &["fit", "--config", "fit.toml"]));
    assert_eq!(r, again);
}

#[test]
fn shipped_configs_run_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let src = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(&src).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    let run = |cmd: &str, config: &str| {
        let out = cavqed(dir.path(), &[cmd, "--config", config]);
        assert_eq!(code(&out), 0, "{cmd} {config}: {}", stderr(&out));
        out
    };
    run("simulate", "cw_hbt.toml");
    run("correlate", "correlate.toml");
    let g2: serde_json::Value = serde_json::from_slice(&run("fit", "fit_g2.toml").stdout).unwrap();
    assert!(g2["params"]["b"].as_f64().unwrap() < 0.02);
    run("simulate", "pulsed_lifetime.toml");
    run("lifetime", "lifetime.toml");
    let lt: serde_json::Value = serde_json::from_slice(&run("fit", "fit_lifetime.toml").stdout).unwrap();
    assert!((lt["params"]["tau"].as_f64().unwrap() / 6.09 - 1.0).abs() < 0.03);
    let qe: serde_json::Value = serde_json::from_slice(&run("qe-bound", "qe_bound.toml").stdout).unwrap();
    assert!((qe["qe_bound"].as_f64().unwrap() - 0.184).abs() < 5e-4);
    let report: serde_json::Value = serde_json::from_slice(&run("detune-report", "detune_report.toml").stdout).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 2);
}
