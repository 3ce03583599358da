//! Plain-text parameter checkpoints.
//!
//! ```text
//! flocknet-checkpoint 1
//! meta <key> <value...>
//! tensor <name> <d0>x<d1>x...
//! <row-major values, space separated, shortest round-trip form>
//! end
//! ```
//!
//! Values are written with `{:e}`, which round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::Tensor;
use crate::error::{Error, Result};

const MAGIC: &str = "flocknet-checkpoint 1";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Checkpoint {
    pub meta: Vec<(String, String)>,
    pub tensors: Vec<(String, Tensor)>,
}

impl Checkpoint {
    pub fn push_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require_meta(&self, key: &str) -> Result<&str> {
        self.meta(key)
            .ok_or_else(|| Error::parse("checkpoint", format!("missing meta `{key}`")))
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| Error::parse("checkpoint", format!("missing tensor `{name}`")))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC}").unwrap();
        for (k, v) in &self.meta {
            writeln!(out, "meta {k} {v}").unwrap();
        }
        for (name, t) in &self.tensors {
            let dims: Vec<String> = t.shape().iter().map(|d| d.to_string()).collect();
            writeln!(out, "tensor {name} {}", dims.join("x")).unwrap();
            let vals: Vec<String> = t.data().iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", vals.join(" ")).unwrap();
        }
        writeln!(out, "end").unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(MAGIC) {
            return Err(Error::parse("checkpoint", "bad header line"));
        }
        let mut ck = Checkpoint::default();
        while let Some(line) = lines.next() {
            if line == "end" {
                return Ok(ck);
            }
            let mut parts = line.splitn(3, ' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some("meta"), Some(k), v) => ck.push_meta(k, v.unwrap_or("")),
                (Some("tensor"), Some(name), Some(dims)) => {
                    let shape = dims
                        .split('x')
                        .filter(|d| !d.is_empty())
                        .map(|d| d.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::parse("checkpoint", format!("shape of {name}: {e}")))?;
                    let values = lines
                        .next()
                        .ok_or_else(|| Error::parse("checkpoint", format!("no values for {name}")))?
                        .split_whitespace()
                        .map(str::parse::<f64>)
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| {
                            Error::parse("checkpoint", format!("values of {name}: {e}"))
                        })?;
                    ck.tensors
                        .push((name.to_string(), Tensor::from_vec(&shape, values)?));
                }
                _ => {
                    return Err(Error::parse(
                        "checkpoint",
                        format!("unexpected line `{line}`"),
                    ))
                }
            }
        }
        Err(Error::parse("checkpoint", "missing `end`"))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingCheckpoint(path.display().to_string()),
            _ => Error::io(path, e),
        })?;
        Checkpoint::from_text(&text)
    }
}
