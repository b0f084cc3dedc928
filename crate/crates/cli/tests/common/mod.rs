#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn cavqed(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cavqed")).args(args).current_dir(dir).output().unwrap()
}

pub fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn json(out: &Output) -> serde_json::Value {
    assert_eq!(code(out), 0, "{}", stderr(out));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// CW three-level emitter with a shelving state.
pub const CW_CONFIG: &str = "\
excitation = \"cw\"
duration_ns = 2.0e6
k_pump_per_ns = 0.19
gamma_r_per_ns = 0.1
gamma_0_per_ns = 0.0066666667
k_isc_per_ns = 0.06
k_t_per_ns = 0.065
efficiency_a = 0.5
efficiency_b = 0.5
seed = 11
out = \"cw\"
";
