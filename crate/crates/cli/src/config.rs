// SPDX-License-Identifier: Apache-2.0

//! `--config file.json` support: the object's entries become flags placed
//! right after the subcommand, so any flag given on the command line later
//! overrides them.

use std::ffi::OsString;

use anyhow::{bail, Context};
use serde_json::Value;

const SUBCOMMANDS: &[&str] = &[
    "gen",
    "optimize-adder",
    "optimize-multiplier",
    "emit-verilog",
    "verify",
    "eval",
    "pareto",
];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn flags_from(value: &Value) -> anyhow::Result<Vec<OsString>> {
    let Value::Object(map) = value else {
        bail!("config file must hold a JSON object");
    };
    let mut out = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => {
                out.push(flag.into());
                out.push(n.to_string().into());
            }
            Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            _ => bail!("config entry '{key}' must be a scalar"),
        }
    }
    Ok(out)
}

pub fn expand_config(argv: Vec<OsString>) -> anyhow::Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.to_string_lossy()))?;
    let extra = flags_from(&value)?;
    let Some(pos) = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(argv);
    };
    let mut out = argv[..=pos].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}
