//! Artifact writing: fixed-precision numbers, CSV/JSON files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Rounds to 12 significant digits and prints the shortest exact form.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let r: f64 = format!("{x:.11e}").parse().expect("rounded float parses");
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                let r: f64 = format!("{x:.11e}").parse().expect("rounded float parses");
                *v = json!(if r == 0.0 { 0.0 } else { r });
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(v)
}

/// Collects the artifacts of one invocation and writes the manifest.
pub struct Run {
    dir: PathBuf,
    command: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    config: Value,
    seed: Option<u64>,
    started: Instant,
}

impl Run {
    pub fn new(dir: &Path, command: Vec<String>) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Run {
            dir: dir.to_path_buf(),
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: Value::Null,
            seed: None,
            started: Instant::now(),
        })
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    pub fn config(&mut self, config: Value) {
        self.config = config;
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    fn record(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.record(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.record(name);
        let mut text = serde_json::to_string_pretty(&to_json(value)?)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn finish(self, exit_code: u8) -> Result<()> {
        let manifest = json!({
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config,
            "outputs": self.outputs,
            "tool": concat!("edutrap ", env!("CARGO_PKG_VERSION")),
            "seed": self.seed,
            "exit_code": exit_code,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
        });
        let path = self.dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))
    }
}
