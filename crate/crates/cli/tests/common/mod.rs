#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use qdilate::CMatrix;
use serde::Serialize;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        let last = self.stderr.lines().last().unwrap_or_else(|| panic!("no diagnostics"));
        serde_json::from_str(last).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", self.stderr))
    }
}

/// Scratch directory holding input documents for one test.
pub struct Scratch {
    dir: tempfile::TempDir,
}

impl Scratch {
    pub fn new() -> Self {
        Self {
            dir: tempfile::tempdir().expect("temp dir"),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    pub fn write<T: Serialize>(&self, name: &str, doc: &T) -> PathBuf {
        self.write_raw(name, &serde_json::to_string_pretty(doc).unwrap())
    }

    pub fn write_raw(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    /// Writes `run.stdout` under `name`.
    pub fn keep(&self, name: &str, run: &Run) -> PathBuf {
        assert_eq!(run.code, 0, "stderr: {}", run.stderr);
        self.write_raw(name, &run.stdout)
    }
}

pub fn qdilate<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    qdilate_env(args, &[])
}

pub fn qdilate_env<I, S>(args: I, env: &[(&str, &str)]) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qdilate"));
    cmd.args(args).env_remove("QDILATE_TOL_RESIDUAL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Rank of the Choi matrix `Σ_s vec(A_s) vec(A_s)*`, computed by SVD of the
/// stacked vectorisations.
pub fn choi_rank(ops: &[CMatrix]) -> usize {
    let d = ops[0].rows();
    let m = nalgebra::DMatrix::from_fn(d * d, ops.len(), |r, s| ops[s][(r / d, r % d)]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&x| x > 1e-8 * max).count()
}
