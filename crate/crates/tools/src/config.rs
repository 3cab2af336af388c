//! JSON parameter files.
//!
//! A parameter file holds the scheme parameters at the top level plus a few
//! optional sections:
//!
//! ```json
//! {
//!   "n": 64, "m": 128, "t": 2, "eps": 0.0, "eta": 0.02,
//!   "amplify": { "calibration_trials": 20000 },
//!   "channel": { "kind": "hyp-rate", "rate": 0.1 },
//!   "keys": 4,
//!   "sweep": { "path": "channel.rate", "values": [0.0, 0.05, 0.1] }
//! }
//! ```

use std::fmt;
use std::str::FromStr;

use prc_core::channels::{AdversaryStrategy, ChannelSpec};
use prc_core::hyperloop::HyperloopParams;
use prc_core::ssr::SsrParams;
use prc_core::warmup::WarmupParams;
use prc_core::weakxor::WeakXorParams;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Result, ToolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeName {
    Warmup,
    Hyperloop,
    WeakXor,
    Ssr,
}

impl SchemeName {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::Warmup => "warmup",
            SchemeName::Hyperloop => "hyperloop",
            SchemeName::WeakXor => "weakxor",
            SchemeName::Ssr => "ssr",
        }
    }
}

impl FromStr for SchemeName {
    type Err = ToolError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "warmup" => Ok(SchemeName::Warmup),
            "hyperloop" => Ok(SchemeName::Hyperloop),
            "weakxor" => Ok(SchemeName::WeakXor),
            "ssr" => Ok(SchemeName::Ssr),
            other => Err(ToolError::Config(format!(
                "unknown scheme {other:?} (expected warmup, hyperloop, weakxor or ssr)"
            ))),
        }
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    Bsc {
        p: f64,
    },
    Hyp {
        d: usize,
    },
    HypRate {
        rate: f64,
    },
    Adv {
        p: f64,
        strategy: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        targets: Option<Vec<usize>>,
    },
}

impl ChannelConfig {
    pub fn to_spec(&self) -> Result<ChannelSpec> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(ToolError::Config(format!(
                    "channel {name} = {v} must lie in [0, 1]"
                )))
            }
        };
        Ok(match self {
            ChannelConfig::Bsc { p } => ChannelSpec::Bsc { p: unit("p", *p)? },
            ChannelConfig::Hyp { d } => ChannelSpec::Hypergeometric { d: *d },
            ChannelConfig::HypRate { rate } => ChannelSpec::HypergeometricRate {
                rate: unit("rate", *rate)?,
            },
            ChannelConfig::Adv {
                p,
                strategy,
                targets,
            } => ChannelSpec::BoundedAdversary {
                p: unit("p", *p)?,
                strategy: AdversaryStrategy::parse(strategy, targets.clone())?,
            },
        })
    }

    /// Parses a JSON channel object or the short forms `none`, `bsc:P`,
    /// `hyp:D`, `hyp-rate:R` and `adv:P,STRATEGY`.
    pub fn parse(text: &str) -> Result<ChannelSpec> {
        let text = text.trim();
        if text.starts_with('{') {
            let cfg: ChannelConfig = serde_json::from_str(text)
                .map_err(|e| ToolError::Config(format!("channel {text:?}: {e}")))?;
            return cfg.to_spec();
        }
        let bad = || ToolError::Config(format!("bad channel {text:?}"));
        if text == "none" {
            return Ok(ChannelSpec::IDENTITY);
        }
        let (kind, arg) = text.split_once(':').ok_or_else(bad)?;
        let cfg = match kind {
            "bsc" => ChannelConfig::Bsc {
                p: arg.parse().map_err(|_| bad())?,
            },
            "hyp" => ChannelConfig::Hyp {
                d: arg.parse().map_err(|_| bad())?,
            },
            "hyp-rate" => ChannelConfig::HypRate {
                rate: arg.parse().map_err(|_| bad())?,
            },
            "adv" => {
                let (p, strategy) = arg.split_once(',').ok_or_else(bad)?;
                ChannelConfig::Adv {
                    p: p.parse().map_err(|_| bad())?,
                    strategy: strategy.to_string(),
                    targets: None,
                }
            }
            _ => return Err(bad()),
        };
        cfg.to_spec()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifyConfig {
    /// Repetition count; Chernoff-sized from the calibration when absent.
    #[serde(default)]
    pub repetitions: Option<usize>,
    /// Measured on the base key when either is absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub delta: Option<f64>,
    /// Calibration channel; falls back to the file's `channel`.
    #[serde(default)]
    pub channel: Option<ChannelConfig>,
    #[serde(default = "default_calibration_trials")]
    pub calibration_trials: u64,
}

fn default_calibration_trials() -> u64 {
    20_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    /// Dotted path into the parameter file, e.g. `channel.p` or `eta`.
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WarmupDoc {
    n: usize,
    tau: u32,
    blocks: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperloopDoc {
    n: usize,
    #[serde(default = "default_hyperloop_delta")]
    delta: f64,
    #[serde(default)]
    m: Option<usize>,
    #[serde(default)]
    ell: Option<usize>,
    #[serde(default)]
    t: Option<usize>,
}

fn default_hyperloop_delta() -> f64 {
    0.1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeakXorDoc {
    n: usize,
    m: usize,
    t: usize,
    #[serde(default)]
    eps: f64,
    eta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SsrDoc {
    n: usize,
    c: f64,
    eps: f64,
    delta: f64,
    #[serde(default)]
    kprime: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseParams {
    Warmup(WarmupParams),
    Hyperloop(HyperloopParams),
    WeakXor(WeakXorParams),
    Ssr(SsrParams),
}

impl BaseParams {
    pub fn name(&self) -> SchemeName {
        match self {
            BaseParams::Warmup(_) => SchemeName::Warmup,
            BaseParams::Hyperloop(_) => SchemeName::Hyperloop,
            BaseParams::WeakXor(_) => SchemeName::WeakXor,
            BaseParams::Ssr(_) => SchemeName::Ssr,
        }
    }
}

/// A scheme with its parameters and optional amplification.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub base: BaseParams,
    pub amplify: Option<AmplifyConfig>,
    /// Channel used for calibration when `amplify.channel` is absent.
    pub default_channel: ChannelSpec,
}

/// `(name, value)` pairs identifying a report cell.
pub type Labels = Vec<(String, String)>;

/// A parsed parameter file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsFile {
    pub scheme: SchemeSpec,
    pub channel: ChannelSpec,
    pub keys: u64,
    pub sweep: Option<Sweep>,
    /// The document as read, used for hashing and sweeps.
    pub doc: Value,
}

const EXTRA_KEYS: [&str; 4] = ["amplify", "channel", "keys", "sweep"];

fn parse_section<T: for<'de> Deserialize<'de>>(what: &str, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| ToolError::Config(format!("{what}: {e}")))
}

impl ParamsFile {
    pub fn from_value(scheme: SchemeName, doc: Value) -> Result<Self> {
        let Value::Object(map) = &doc else {
            return Err(ToolError::Config(
                "parameter file must be a JSON object".into(),
            ));
        };
        let mut params = Map::new();
        for (k, v) in map {
            if !EXTRA_KEYS.contains(&k.as_str()) {
                params.insert(k.clone(), v.clone());
            }
        }
        let params = Value::Object(params);
        let base = match scheme {
            SchemeName::Warmup => {
                let d: WarmupDoc = parse_section("warmup parameters", params)?;
                BaseParams::Warmup(WarmupParams::new(d.n, d.tau, d.blocks)?)
            }
            SchemeName::Hyperloop => {
                let d: HyperloopDoc = parse_section("hyperloop parameters", params)?;
                let rec = HyperloopParams::recommended(d.n, d.delta);
                let (m, ell, t) = match (d.m, d.ell, d.t, rec) {
                    (Some(m), Some(ell), Some(t), _) => (m, ell, t),
                    (m, ell, t, Ok(r)) => {
                        (m.unwrap_or(r.m), ell.unwrap_or(r.ell), t.unwrap_or(r.t))
                    }
                    (_, _, _, Err(e)) => return Err(e.into()),
                };
                BaseParams::Hyperloop(HyperloopParams::new(d.n, d.delta, m, ell, t)?)
            }
            SchemeName::WeakXor => {
                let d: WeakXorDoc = parse_section("weakxor parameters", params)?;
                BaseParams::WeakXor(WeakXorParams::new(d.n, d.m, d.t, d.eps, d.eta)?)
            }
            SchemeName::Ssr => {
                let d: SsrDoc = parse_section("ssr parameters", params)?;
                BaseParams::Ssr(match d.kprime {
                    Some(k) => SsrParams::new(d.n, d.c, d.eps, k, d.delta)?,
                    None => SsrParams::with_default_kprime(d.n, d.c, d.eps, d.delta)?,
                })
            }
        };
        let channel = match map.get("channel") {
            Some(v) => parse_section::<ChannelConfig>("channel", v.clone())?.to_spec()?,
            None => ChannelSpec::IDENTITY,
        };
        let amplify = map
            .get("amplify")
            .map(|v| parse_section::<AmplifyConfig>("amplify", v.clone()))
            .transpose()?;
        let keys = match map.get("keys") {
            Some(v) => parse_section::<u64>("keys", v.clone())?,
            None => 1,
        };
        if keys == 0 {
            return Err(ToolError::Config("keys must be at least 1".into()));
        }
        let sweep = map
            .get("sweep")
            .map(|v| parse_section::<Sweep>("sweep", v.clone()))
            .transpose()?;
        Ok(ParamsFile {
            scheme: SchemeSpec {
                base,
                amplify,
                default_channel: channel.clone(),
            },
            channel,
            keys,
            sweep,
            doc,
        })
    }

    pub fn parse(scheme: SchemeName, text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| ToolError::Config(format!("parameter file: {e}")))?;
        Self::from_value(scheme, doc)
    }

    pub fn load(scheme: SchemeName, path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| ToolError::json(path, e))?;
        Self::from_value(scheme, doc)
    }

    /// One parameter file per sweep value, labelled by `(path, value)`.
    /// Without a sweep this is the file itself with no labels.
    pub fn cells(&self, scheme: SchemeName) -> Result<Vec<(Labels, ParamsFile)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(Vec::new(), self.clone())]);
        };
        if sweep.values.is_empty() {
            return Ok(vec![(Vec::new(), self.clone())]);
        }
        sweep
            .values
            .iter()
            .map(|v| {
                let mut doc = self.doc.clone();
                if let Value::Object(map) = &mut doc {
                    map.remove("sweep");
                }
                set_path(&mut doc, &sweep.path, v.clone())?;
                let label = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                Ok((
                    vec![(sweep.path.clone(), label)],
                    ParamsFile::from_value(scheme, doc)?,
                ))
            })
            .collect()
    }
}

/// Sets `doc[a][b]... = value` for the dotted `path`, creating objects.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let Value::Object(map) = cur else {
            return Err(ToolError::Config(format!(
                "sweep path {path:?} crosses a non-object"
            )));
        };
        if i + 1 == parts.len() {
            map.insert((*part).to_string(), value);
            return Ok(());
        }
        cur = map
            .entry((*part).to_string())
            .or_insert_with(|| Value::Object(Map::new()));
    }
    Err(ToolError::Config("empty sweep path".into()))
}

/// SHA-256 of the canonical (sorted-key) JSON of `value`, in hex.
pub fn config_hash(value: &Value) -> String {
    let digest = Sha256::digest(value.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn weakxor_file_with_sections() {
        let doc = json!({
            "n": 64, "m": 128, "t": 2, "eta": 0.02,
            "channel": {"kind": "bsc", "p": 0.1},
            "amplify": {"repetitions": 11},
            "keys": 3
        });
        let f = ParamsFile::from_value(SchemeName::WeakXor, doc).unwrap();
        assert_eq!(f.channel, ChannelSpec::Bsc { p: 0.1 });
        assert_eq!(f.keys, 3);
        assert_eq!(f.scheme.amplify.as_ref().unwrap().repetitions, Some(11));
        assert_eq!(
            f.scheme.amplify.as_ref().unwrap().calibration_trials,
            20_000
        );
    }

    #[test]
    fn unknown_fields_rejected() {
        let doc = json!({"n": 64, "m": 128, "t": 2, "eta": 0.02, "etaa": 1});
        assert!(ParamsFile::from_value(SchemeName::WeakXor, doc).is_err());
        assert!(ChannelConfig::parse(r#"{"kind":"bsc","q":0.1}"#).is_err());
    }

    #[test]
    fn hyperloop_defaults_to_recommended() {
        let f = ParamsFile::from_value(SchemeName::Hyperloop, json!({"n": 1024})).unwrap();
        let BaseParams::Hyperloop(p) = f.scheme.base else {
            panic!()
        };
        assert_eq!((p.m, p.ell, p.t, p.edge_count()), (16384, 4, 90, 16744));
    }

    #[test]
    fn channels_parse() {
        assert_eq!(
            ChannelConfig::parse(r#"{"kind":"hyp","d":128}"#).unwrap(),
            ChannelSpec::Hypergeometric { d: 128 }
        );
        let adv =
            ChannelConfig::parse(r#"{"kind":"adv","p":0.1,"strategy":"prefix-burst"}"#).unwrap();
        assert_eq!(adv.kind(), "adv");
        assert!(
            ChannelConfig::parse(r#"{"kind":"adv","p":0.1,"strategy":"parity-target"}"#).is_err()
        );
        assert_eq!(
            ChannelConfig::parse("bsc:0.1").unwrap(),
            ChannelSpec::Bsc { p: 0.1 }
        );
        assert_eq!(
            ChannelConfig::parse("hyp:6").unwrap(),
            ChannelSpec::Hypergeometric { d: 6 }
        );
        assert_eq!(ChannelConfig::parse("none").unwrap(), ChannelSpec::IDENTITY);
        assert_eq!(
            ChannelConfig::parse("adv:0.2,random-flip").unwrap().kind(),
            "adv"
        );
        assert!(ChannelConfig::parse("bsc").is_err());
        assert!(ChannelConfig::parse("bsc:x").is_err());
    }

    #[test]
    fn sweep_cells() {
        let doc = json!({
            "n": 64, "m": 128, "t": 2, "eta": 0.02,
            "channel": {"kind": "bsc", "p": 0.3},
            "sweep": {"path": "channel.p", "values": [0.0, 0.1]}
        });
        let f = ParamsFile::from_value(SchemeName::WeakXor, doc).unwrap();
        let cells = f.cells(SchemeName::WeakXor).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(
            cells[1].0,
            vec![("channel.p".to_string(), "0.1".to_string())]
        );
        assert_eq!(cells[1].1.channel, ChannelSpec::Bsc { p: 0.1 });
        assert!(cells[1].1.sweep.is_none());

        let bad = json!({"n": 64, "m": 128, "t": 2, "eta": 0.02,
            "sweep": {"path": "channel.p", "values": [0.1]}});
        let f = ParamsFile::from_value(SchemeName::WeakXor, bad).unwrap();
        assert!(f.cells(SchemeName::WeakXor).is_err());
    }

    #[test]
    fn hash_is_order_independent() {
        let a: Value = serde_json::from_str(r#"{"a":1,"b":2}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"b":2,"a":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }
}
