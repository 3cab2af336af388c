//! Type-erased keyed schemes, so the harness and the CLI can treat every
//! construction (amplified or not) the same way.

use prc_core::hyperloop::Hyperloop;
use prc_core::prc::{amplify_wrap, calibrate_alpha_delta, Amplified, Calibration};
use prc_core::ssr::Ssr;
use prc_core::stats::chernoff_repetitions;
use prc_core::warmup::WarmupPrf;
use prc_core::weakxor::{WeakXor, XorMatrix};
use prc_core::{BitString, RngStream, StreamRng, Verdict, ZeroBitScheme};
use serde_json::{json, Value};

use crate::config::{AmplifyConfig, BaseParams, ParamsFile, SchemeName, SchemeSpec};
use crate::error::{Result, ToolError};
use crate::keys::KeyCodec;

/// A scheme together with one key pair.
pub trait KeyedScheme: Send + Sync {
    fn scheme_name(&self) -> &'static str;
    fn codeword_len(&self) -> usize;
    fn encode(&self, rng: &mut StreamRng) -> BitString;
    fn decode(&self, x: &BitString) -> Result<Verdict, prc_core::Error>;
    fn sk_json(&self) -> Value;
    fn pk_json(&self) -> Value;
    fn secret_parity(&self) -> Option<Vec<usize>>;
    fn public_matrix(&self) -> Option<XorMatrix>;
    /// Calibration used to size an amplified key, if any.
    fn calibration(&self) -> Option<Calibration>;
}

pub struct Keyed<S: ZeroBitScheme> {
    pub scheme: S,
    pub sk: S::SecretKey,
    pub pk: S::PublicKey,
    pub calibration: Option<Calibration>,
}

impl<S> KeyedScheme for Keyed<S>
where
    S: KeyCodec + Send + Sync,
    S::SecretKey: Send + Sync,
    S::PublicKey: Send + Sync,
{
    fn scheme_name(&self) -> &'static str {
        self.scheme.name()
    }

    fn codeword_len(&self) -> usize {
        self.scheme.codeword_len()
    }

    fn encode(&self, rng: &mut StreamRng) -> BitString {
        self.scheme.encode(&self.pk, rng)
    }

    fn decode(&self, x: &BitString) -> Result<Verdict, prc_core::Error> {
        self.scheme.decode(&self.sk, x)
    }

    fn sk_json(&self) -> Value {
        self.scheme.sk_to_json(&self.sk)
    }

    fn pk_json(&self) -> Value {
        self.scheme.pk_to_json(&self.pk)
    }

    fn secret_parity(&self) -> Option<Vec<usize>> {
        self.scheme.secret_parity(&self.sk)
    }

    fn public_matrix(&self) -> Option<XorMatrix> {
        self.scheme.public_matrix(&self.pk)
    }

    fn calibration(&self) -> Option<Calibration> {
        self.calibration
    }
}

pub type BoxedScheme = Box<dyn KeyedScheme>;

impl SchemeSpec {
    /// Samples a key pair. Plain schemes draw from `stream` directly; the
    /// amplified path uses the named sub-streams `base`, `calibrate` and
    /// `amplify`.
    pub fn keygen(&self, stream: RngStream) -> Result<BoxedScheme> {
        match self.base {
            BaseParams::Warmup(params) => self.keygen_with(WarmupPrf { params }, stream),
            BaseParams::Hyperloop(params) => self.keygen_with(Hyperloop { params }, stream),
            BaseParams::WeakXor(params) => self.keygen_with(WeakXor { params }, stream),
            BaseParams::Ssr(params) => self.keygen_with(Ssr { params }, stream),
        }
    }

    fn keygen_with<S>(&self, scheme: S, stream: RngStream) -> Result<BoxedScheme>
    where
        S: KeyCodec + Send + Sync + 'static,
        S::SecretKey: Send + Sync,
        S::PublicKey: Send + Sync,
    {
        let Some(amp) = &self.amplify else {
            let (sk, pk) = scheme.keygen(&mut stream.rng())?;
            return Ok(Box::new(Keyed {
                scheme,
                sk,
                pk,
                calibration: None,
            }));
        };
        let (base_sk, base_pk) = scheme.keygen(&mut stream.named("base").rng())?;
        let channel = match &amp.channel {
            Some(c) => c.to_spec()?,
            None => self.default_channel.clone(),
        };
        let (alpha, delta, calibration) = match (amp.alpha, amp.delta) {
            (Some(a), Some(d)) => (a, d, None),
            _ => {
                let cal = calibrate_alpha_delta(
                    &scheme,
                    &base_sk,
                    &base_pk,
                    &channel,
                    amp.calibration_trials,
                    stream.named("calibrate"),
                )?;
                let a = amp.alpha.unwrap_or(cal.alpha.estimate());
                let d = amp.delta.unwrap_or(cal.delta.estimate());
                (a, d, Some(cal))
            }
        };
        let t = repetitions(amp, alpha, delta)?;
        let key = amplify_wrap(
            &scheme,
            base_sk,
            base_pk,
            t,
            alpha,
            delta,
            &mut stream.named("amplify").rng(),
        )?;
        let amplified = Amplified::new(scheme, t, alpha, delta)?;
        let pk = key.public();
        Ok(Box::new(Keyed {
            scheme: amplified,
            sk: key,
            pk,
            calibration,
        }))
    }

    /// Rebuilds a keyed scheme from the `sk` and `pk` sections of a key file.
    pub fn load_key(&self, sk: &Value, pk: &Value) -> Result<BoxedScheme> {
        match self.base {
            BaseParams::Warmup(params) => self.load_with(WarmupPrf { params }, sk, pk),
            BaseParams::Hyperloop(params) => self.load_with(Hyperloop { params }, sk, pk),
            BaseParams::WeakXor(params) => self.load_with(WeakXor { params }, sk, pk),
            BaseParams::Ssr(params) => self.load_with(Ssr { params }, sk, pk),
        }
    }

    fn load_with<S>(&self, scheme: S, sk: &Value, pk: &Value) -> Result<BoxedScheme>
    where
        S: KeyCodec + Send + Sync + 'static,
        S::SecretKey: Send + Sync,
        S::PublicKey: Send + Sync,
    {
        if self.amplify.is_none() {
            return Ok(Box::new(Keyed {
                sk: scheme.sk_from_json(sk)?,
                pk: scheme.pk_from_json(pk)?,
                scheme,
                calibration: None,
            }));
        }
        let field = |name: &str| {
            sk.get(name)
                .and_then(Value::as_f64)
                .ok_or_else(|| ToolError::Config(format!("amplified key lacks {name:?}")))
        };
        let amplified = Amplified::new(
            scheme,
            field("t")? as usize,
            field("alpha")?,
            field("delta")?,
        )?;
        Ok(Box::new(Keyed {
            sk: amplified.sk_from_json(sk)?,
            pk: amplified.pk_from_json(pk)?,
            scheme: amplified,
            calibration: None,
        }))
    }
}

fn repetitions(amp: &AmplifyConfig, alpha: f64, delta: f64) -> Result<usize> {
    if alpha <= delta {
        return Err(prc_core::Error::Precondition(format!(
            "alpha = {alpha} must exceed delta = {delta}"
        ))
        .into());
    }
    Ok(amp
        .repetitions
        .unwrap_or_else(|| chernoff_repetitions(alpha, delta)))
}

/// Key file contents: scheme name, parameter document and both keys.
pub fn key_file(scheme: &str, params: &Value, keyed: &dyn KeyedScheme) -> Value {
    json!({
        "scheme": scheme,
        "params": params,
        "sk": keyed.sk_json(),
        "pk": keyed.pk_json(),
    })
}

/// A key file read back: its scheme, parameter file and keyed scheme.
pub struct LoadedKey {
    pub scheme: SchemeName,
    pub params: ParamsFile,
    pub keyed: BoxedScheme,
}

pub fn load_key_file(path: &std::path::Path) -> Result<LoadedKey> {
    let text = std::fs::read_to_string(path).map_err(|e| ToolError::io(path, e))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| ToolError::json(path, e))?;
    let field = |name: &str| {
        doc.get(name).ok_or_else(|| {
            ToolError::Config(format!("{}: key file lacks {name:?}", path.display()))
        })
    };
    let scheme: SchemeName = field("scheme")?
        .as_str()
        .ok_or_else(|| ToolError::Config(format!("{}: scheme must be a string", path.display())))?
        .parse()?;
    let params = ParamsFile::from_value(scheme, field("params")?.clone())?;
    let keyed = params.scheme.load_key(field("sk")?, field("pk")?)?;
    Ok(LoadedKey {
        scheme,
        params,
        keyed,
    })
}
