//! JSON-lines files of codewords and generation records, and toy model names.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use prc_core::watermark::{ConstantModel, GenerationRecord, HashModel, SinusoidalModel, ToyModel};
use prc_core::BitString;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

/// One codeword per line: `{"bits": len, "hex": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordLine {
    pub bits: usize,
    pub hex: String,
}

impl CodewordLine {
    pub fn new(x: &BitString) -> Self {
        CodewordLine {
            bits: x.len(),
            hex: x.to_hex(),
        }
    }

    pub fn bits(&self) -> Result<BitString> {
        Ok(BitString::from_hex(&self.hex, self.bits)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordLine {
    pub model: String,
    pub prompt: String,
    pub bits: usize,
    pub z: String,
    /// Seed codeword for watermarked records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
}

impl RecordLine {
    pub fn new(model: &str, record: &GenerationRecord) -> Self {
        RecordLine {
            model: model.to_string(),
            prompt: String::from_utf8_lossy(&record.prompt).into_owned(),
            bits: record.z.len(),
            z: record.z.to_hex(),
            x: record.is_watermarked().then(|| record.x.to_hex()),
        }
    }

    pub fn record(&self) -> Result<GenerationRecord> {
        Ok(GenerationRecord {
            prompt: self.prompt.as_bytes().to_vec(),
            z: BitString::from_hex(&self.z, self.bits)?,
            x: match &self.x {
                Some(h) => BitString::from_hex(h, self.bits)?,
                None => BitString::zeros(0),
            },
        })
    }
}

pub fn write_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| ToolError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| ToolError::json(path, e))?;
        w.write_all(b"\n").map_err(|e| ToolError::io(path, e))?;
    }
    w.flush().map_err(|e| ToolError::io(path, e))
}

pub fn read_lines<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = std::fs::File::open(path).map_err(|e| ToolError::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| ToolError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| ToolError::json(path, e))?);
    }
    Ok(out)
}

/// Parses `constant:P`, `sinusoidal:CENTER,AMPLITUDE,PERIOD` or
/// `hash:LO,HI,WINDOW`.
pub fn parse_model(spec: &str) -> Result<Box<dyn ToyModel + Send + Sync>> {
    let bad = || ToolError::Config(format!("bad model {spec:?}"));
    let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let in_unit = |p: f64| (0.0..=1.0).contains(&p);
    match (kind, nums.as_slice()) {
        ("constant", &[p]) if in_unit(p) => Ok(Box::new(ConstantModel { p })),
        ("sinusoidal", &[center, amplitude, period])
            if period > 0.0
                && in_unit(center - amplitude.abs())
                && in_unit(center + amplitude.abs()) =>
        {
            Ok(Box::new(SinusoidalModel {
                center,
                amplitude,
                period,
            }))
        }
        ("hash", &[lo, hi, window]) if in_unit(lo) && in_unit(hi) && lo <= hi && window >= 0.0 => {
            Ok(Box::new(HashModel {
                lo,
                hi,
                window: window as usize,
            }))
        }
        _ => Err(bad()),
    }
}
