// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::Path;

use anyhow::Context;
use arithgame::codesign::MultiplierDesign;
use arithgame::prefix_tree::PrefixTree;
use serde::Serialize;
use serde_json::json;

pub enum LoadedDesign {
    Adder(PrefixTree),
    Multiplier(Box<MultiplierDesign>),
}

/// Prefix-tree text files and multiplier JSON bundles are told apart by
/// their first character.
pub fn load(path: &Path) -> anyhow::Result<LoadedDesign> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let d = MultiplierDesign::from_bundle(&text)
            .with_context(|| format!("loading bundle {}", path.display()))?;
        Ok(LoadedDesign::Multiplier(Box::new(d)))
    } else {
        let t = PrefixTree::deserialize(&text)
            .with_context(|| format!("loading prefix tree {}", path.display()))?;
        Ok(LoadedDesign::Adder(t))
    }
}

/// Writes to `path`, or to stdout when there is none.
pub fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// First log line: tool, version, command and fully resolved options.
pub fn provenance_line<T: Serialize>(command: &str, options: &T) -> anyhow::Result<String> {
    let v = json!({
        "provenance": {
            "tool": "arithgame",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "options": options,
        }
    });
    Ok(serde_json::to_string(&v)?)
}

/// Buffered JSON-lines writer that starts with a provenance line.
pub struct RunLog {
    lines: Vec<String>,
}

impl RunLog {
    pub fn new<T: Serialize>(command: &str, options: &T) -> anyhow::Result<Self> {
        Ok(RunLog {
            lines: vec![provenance_line(command, options)?],
        })
    }

    pub fn push<T: Serialize>(&mut self, record: &T) -> anyhow::Result<()> {
        self.lines.push(serde_json::to_string(record)?);
        Ok(())
    }

    pub fn save(&self, path: Option<&Path>) -> anyhow::Result<()> {
        if let Some(p) = path {
            let mut text = self.lines.join("\n");
            text.push('\n');
            std::fs::write(p, text).with_context(|| format!("writing log {}", p.display()))?;
        }
        Ok(())
    }
}
