// SPDX-License-Identifier: Apache-2.0

//! Text checkpoint: a version line, the parameter version, then per network
//! a shape line followed by one parameter per line as the 16 hex digits of
//! its IEEE-754 bits, so a save/load round trip is bit-exact.

use std::fmt::Write;

use super::{AgentParams, Mlp, PpoError};

const MAGIC: &str = "ppo-checkpoint v1";

fn write_net(out: &mut String, name: &str, net: &Mlp) {
    let shape: Vec<String> = net.sizes().iter().map(|s| s.to_string()).collect();
    writeln!(out, "{name} {}", shape.join(",")).unwrap();
    for p in net.params() {
        writeln!(out, "{:016x}", p.to_bits()).unwrap();
    }
}

pub fn save_checkpoint(params: &AgentParams) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "version {}", params.version).unwrap();
    write_net(&mut out, "policy", &params.policy);
    write_net(&mut out, "value", &params.value);
    out
}

fn bad(msg: impl Into<String>) -> PpoError {
    PpoError::Checkpoint(msg.into())
}

fn read_net<'a>(lines: &mut impl Iterator<Item = &'a str>, name: &str) -> Result<Mlp, PpoError> {
    let header = lines
        .next()
        .ok_or_else(|| bad(format!("missing {name} header")))?;
    let shape = header
        .strip_prefix(name)
        .and_then(|s| s.strip_prefix(' '))
        .ok_or_else(|| bad(format!("expected '{name} <shape>', got '{header}'")))?;
    let sizes: Vec<usize> = shape
        .split(',')
        .map(|s| s.parse().map_err(|_| bad(format!("bad shape '{shape}'"))))
        .collect::<Result<_, _>>()?;
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(bad(format!("bad shape '{shape}'")));
    }
    let mut net = Mlp::zeros(&sizes);
    let mut flat = Vec::with_capacity(net.param_count());
    for _ in 0..net.param_count() {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("{name}: too few parameters")))?;
        let bits =
            u64::from_str_radix(line, 16).map_err(|_| bad(format!("bad parameter '{line}'")))?;
        flat.push(f64::from_bits(bits));
    }
    net.set_params(&flat);
    Ok(net)
}

pub fn load_checkpoint(text: &str) -> Result<AgentParams, PpoError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    if lines.next() != Some(MAGIC) {
        return Err(bad("missing checkpoint header"));
    }
    let version = lines
        .next()
        .and_then(|l| l.strip_prefix("version "))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad("missing version line"))?;
    let policy = read_net(&mut lines, "policy")?;
    let value = read_net(&mut lines, "value")?;
    if let Some(extra) = lines.next() {
        return Err(bad(format!("trailing data '{extra}'")));
    }
    Ok(AgentParams {
        policy,
        value,
        version,
    })
}
