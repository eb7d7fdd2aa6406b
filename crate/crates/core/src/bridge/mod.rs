//! Optional external backend: writes `D ∪ S` as an ASP program, runs a
//! clingo-compatible solver and maps its answer sets back.

mod asp;
mod process;

use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

pub use asp::{emit_asp, mangle_symbol, mangle_variable, AspProgram, Mangling};
pub use process::{parse_output, solve_external};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub executable: PathBuf,
    pub args: Vec<String>,
    /// Answer sets to ask for; 0 means all.
    pub model_limit: usize,
    pub timeout: Duration,
}

impl SolverConfig {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        SolverConfig { executable: executable.into(), args: Vec::new(), model_limit: 0, timeout: Duration::from_secs(60) }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new("clingo")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BridgeError {
    #[error("`{first}` and `{second}` both map to `{target}` in ASP")]
    Collision { first: String, second: String, target: String },
    #[error("could not start solver {0}")]
    Spawn(String),
    #[error("solver timed out after {millis} ms")]
    Timeout { millis: u64 },
    #[error("unreadable solver output: {0}")]
    Parse(String),
    #[error("i/o: {0}")]
    Io(String),
}

/// Looks for an executable called `name` on `PATH`.
pub fn find_on_path(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|p| is_executable(p))
}

fn is_executable(p: &Path) -> bool {
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        p.metadata().is_ok_and(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
    }
    #[cfg(not(unix))]
    {
        p.is_file()
    }
}
