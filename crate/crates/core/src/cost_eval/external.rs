// SPDX-License-Identifier: Apache-2.0

//! Hook for real synthesis flows.
//!
//! The command template is run through `sh -c` after `{design}` is replaced
//! by the path of an emitted Verilog file. The command must exit with status
//! 0 and print a line `delay=<float> area=<float>` on standard output.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Duration;

use wait_timeout::ChildExt;

use super::{AdderEvaluator, EvalError, EvalResult, EvalSource, MultiplierEvaluator};
use crate::compressor_tree::CompressorState;
use crate::hdl_netlist::{build_adder_netlist, build_multiplier_netlist, emit_verilog};
use crate::prefix_tree::PrefixTree;

pub const DESIGN_PLACEHOLDER: &str = "{design}";

/// Finds the first `delay=<f> area=<f>` line in evaluator output.
pub fn parse_eval_line(stdout: &str) -> Result<(f64, f64), EvalError> {
    for line in stdout.lines() {
        let mut delay = None;
        let mut area = None;
        for tok in line.split_whitespace() {
            if let Some(v) = tok.strip_prefix("delay=") {
                delay = v.parse::<f64>().ok();
            } else if let Some(v) = tok.strip_prefix("area=") {
                area = v.parse::<f64>().ok();
            }
        }
        if let (Some(d), Some(a)) = (delay, area) {
            if d.is_finite() && a.is_finite() && d >= 0.0 && a >= 0.0 {
                return Ok((d, a));
            }
            return Err(EvalError::Parse(format!("out-of-range values in '{line}'")));
        }
    }
    Err(EvalError::Parse(format!(
        "no 'delay=<float> area=<float>' line in output: {:?}",
        stdout.chars().take(200).collect::<String>()
    )))
}

fn shell_quote(path: &Path) -> String {
    let s = path.to_string_lossy();
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Runs the evaluator command on one Verilog file.
pub fn external_eval(
    verilog_path: &Path,
    command_template: &str,
    timeout: Option<Duration>,
) -> Result<EvalResult, EvalError> {
    if !command_template.contains(DESIGN_PLACEHOLDER) {
        return Err(EvalError::Parse(format!(
            "command template lacks the {DESIGN_PLACEHOLDER} placeholder"
        )));
    }
    let command = command_template.replace(DESIGN_PLACEHOLDER, &shell_quote(verilog_path));
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;

    // drain pipes on helper threads so a chatty tool cannot block on a full pipe
    let mut out_pipe = child.stdout.take().expect("piped stdout");
    let mut err_pipe = child.stderr.take().expect("piped stderr");
    let out_thread = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = out_pipe.read_to_string(&mut s);
        s
    });
    let err_thread = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = err_pipe.read_to_string(&mut s);
        s
    });

    let status = match timeout {
        Some(limit) => match child.wait_timeout(limit)? {
            Some(status) => status,
            None => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(EvalError::Timeout(limit));
            }
        },
        None => child.wait()?,
    };
    let stdout = out_thread.join().unwrap_or_default();
    let stderr = err_thread.join().unwrap_or_default();
    if !status.success() {
        return Err(EvalError::CommandFailed {
            status: status.to_string(),
            stderr: stderr.trim().to_string(),
        });
    }
    let (delay, area) = parse_eval_line(&stdout)?;
    Ok(EvalResult::new(delay, area, EvalSource::External))
}

fn scratch_file(dir: &Path, stem: &str, key: u64) -> PathBuf {
    dir.join(format!("{stem}_{key:016x}.v"))
}

/// Emits each adder as Verilog into `workdir` and runs the command on it.
pub struct ExternalAdderEvaluator {
    pub command: String,
    pub timeout: Option<Duration>,
    pub workdir: PathBuf,
    pub module_name: String,
}

impl ExternalAdderEvaluator {
    pub fn new(command: impl Into<String>, workdir: impl Into<PathBuf>) -> Self {
        ExternalAdderEvaluator {
            command: command.into(),
            timeout: None,
            workdir: workdir.into(),
            module_name: "prefix_adder".into(),
        }
    }
}

impl AdderEvaluator for ExternalAdderEvaluator {
    fn evaluate(&mut self, tree: &PrefixTree) -> Result<EvalResult, EvalError> {
        let netlist = build_adder_netlist(tree)?;
        let text = emit_verilog(&netlist, &self.module_name)?;
        std::fs::create_dir_all(&self.workdir)?;
        let path = scratch_file(&self.workdir, &self.module_name, tree.canonical_key());
        std::fs::write(&path, text)?;
        external_eval(&path, &self.command, self.timeout)
    }
}

pub struct ExternalMultiplierEvaluator {
    pub command: String,
    pub timeout: Option<Duration>,
    pub workdir: PathBuf,
    pub module_name: String,
}

impl ExternalMultiplierEvaluator {
    pub fn new(command: impl Into<String>, workdir: impl Into<PathBuf>) -> Self {
        ExternalMultiplierEvaluator {
            command: command.into(),
            timeout: None,
            workdir: workdir.into(),
            module_name: "multiplier".into(),
        }
    }
}

impl MultiplierEvaluator for ExternalMultiplierEvaluator {
    fn evaluate(
        &mut self,
        state: &CompressorState,
        tree: &PrefixTree,
    ) -> Result<EvalResult, EvalError> {
        let netlist = build_multiplier_netlist(state, tree)?;
        let text = emit_verilog(&netlist, &self.module_name)?;
        std::fs::create_dir_all(&self.workdir)?;
        let key = super::stable_hash(super::multiplier_key_text(state, tree).as_bytes());
        let path = scratch_file(&self.workdir, &self.module_name, key);
        std::fs::write(&path, text)?;
        external_eval(&path, &self.command, self.timeout)
    }
}
