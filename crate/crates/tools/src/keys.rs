//! JSON encodings of scheme keys.

use prc_core::bits::BitString;
use prc_core::gf2::BitMatrix;
use prc_core::hyperloop::{Hypergraph5, Hyperloop, HyperloopSecret};
use prc_core::prc::{check_permutation, Amplified, AmplifiedKey, AmplifiedPublicKey};
use prc_core::ssr::{Ssr, SsrKey};
use prc_core::warmup::{WarmupKey, WarmupPrf};
use prc_core::weakxor::{WeakXor, XorMatrix, XorSecret};
use prc_core::ZeroBitScheme;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Result, ToolError};

/// A scheme whose keys round-trip through JSON.
pub trait KeyCodec: ZeroBitScheme {
    fn sk_to_json(&self, sk: &Self::SecretKey) -> Value;
    fn pk_to_json(&self, pk: &Self::PublicKey) -> Value;
    fn sk_from_json(&self, v: &Value) -> Result<Self::SecretKey>;
    fn pk_from_json(&self, v: &Value) -> Result<Self::PublicKey>;

    /// Support of a secret parity check, when the key has one.
    fn secret_parity(&self, _sk: &Self::SecretKey) -> Option<Vec<usize>> {
        None
    }

    /// Public generator matrix, when the key has one.
    fn public_matrix(&self, _pk: &Self::PublicKey) -> Option<XorMatrix> {
        None
    }
}

fn from_json<T: DeserializeOwned>(what: &str, v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| ToolError::Config(format!("{what}: {e}")))
}

fn hex_bits(what: &str, hex: &str, len: usize) -> Result<BitString> {
    BitString::from_hex(hex, len).map_err(|e| ToolError::Config(format!("{what}: {e}")))
}

#[derive(Serialize, Deserialize)]
struct WarmupKeyDoc {
    key: String,
    tau: u32,
    block_count: usize,
    input_len: usize,
    tag_len: usize,
}

impl KeyCodec for WarmupPrf {
    fn sk_to_json(&self, sk: &WarmupKey) -> Value {
        json!(WarmupKeyDoc {
            key: sk.key.iter().map(|b| format!("{b:02x}")).collect(),
            tau: sk.tau,
            block_count: sk.block_count,
            input_len: sk.input_len,
            tag_len: sk.tag_len,
        })
    }

    fn pk_to_json(&self, pk: &WarmupKey) -> Value {
        self.sk_to_json(pk)
    }

    fn sk_from_json(&self, v: &Value) -> Result<WarmupKey> {
        let d: WarmupKeyDoc = from_json("warmup key", v)?;
        let bits = hex_bits("warmup key", &d.key, 128)?;
        let mut key = [0u8; 16];
        for (i, byte) in key.iter_mut().enumerate() {
            for b in 0..8 {
                if bits.get(8 * i + b) {
                    *byte |= 0x80 >> b;
                }
            }
        }
        let p = self.params;
        if (d.tau, d.block_count, d.input_len, d.tag_len)
            != (p.tau, p.block_count, p.input_len(), p.n)
        {
            return Err(ToolError::Config(
                "warmup key does not match the parameters".into(),
            ));
        }
        Ok(WarmupKey {
            key,
            tau: d.tau,
            block_count: d.block_count,
            input_len: d.input_len,
            tag_len: d.tag_len,
        })
    }

    fn pk_from_json(&self, v: &Value) -> Result<WarmupKey> {
        self.sk_from_json(v)
    }
}

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    n: usize,
    edges: Vec<[u32; 5]>,
}

#[derive(Serialize, Deserialize)]
struct LoopsDoc {
    loops: Vec<Vec<usize>>,
}

impl KeyCodec for Hyperloop {
    fn sk_to_json(&self, sk: &HyperloopSecret) -> Value {
        json!(LoopsDoc {
            loops: sk.loops.clone()
        })
    }

    fn pk_to_json(&self, pk: &Hypergraph5) -> Value {
        json!(HypergraphDoc {
            n: pk.n_vertices,
            edges: pk.edges.clone(),
        })
    }

    fn sk_from_json(&self, v: &Value) -> Result<HyperloopSecret> {
        let d: LoopsDoc = from_json("hyperloop secret key", v)?;
        let len = self.codeword_len();
        if d.loops.is_empty() || d.loops.iter().flatten().any(|&j| j >= len) {
            return Err(ToolError::Config(
                "hyperloop secret key has bad loop indices".into(),
            ));
        }
        Ok(HyperloopSecret { loops: d.loops })
    }

    fn pk_from_json(&self, v: &Value) -> Result<Hypergraph5> {
        let d: HypergraphDoc = from_json("hyperloop public key", v)?;
        if d.n != self.params.n
            || d.edges.len() != self.codeword_len()
            || d.edges.iter().flatten().any(|&u| u as usize >= d.n)
        {
            return Err(ToolError::Config(
                "hyperloop public key does not match the parameters".into(),
            ));
        }
        Ok(Hypergraph5 {
            n_vertices: d.n,
            edges: d.edges,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    n: usize,
    m: usize,
    rows: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct SupportDoc {
    n: usize,
    support: Vec<usize>,
}

impl KeyCodec for WeakXor {
    fn sk_to_json(&self, sk: &XorSecret) -> Value {
        json!(SupportDoc {
            n: sk.n,
            support: sk.support.clone(),
        })
    }

    fn pk_to_json(&self, pk: &XorMatrix) -> Value {
        json!(MatrixDoc {
            n: pk.n(),
            m: pk.m(),
            rows: pk.rows().rows().iter().map(BitString::to_hex).collect(),
        })
    }

    fn sk_from_json(&self, v: &Value) -> Result<XorSecret> {
        let d: SupportDoc = from_json("weakxor secret key", v)?;
        if d.n != self.params.n {
            return Err(ToolError::Config(
                "weakxor secret key has the wrong length".into(),
            ));
        }
        Ok(XorSecret::new(d.n, d.support)?)
    }

    fn pk_from_json(&self, v: &Value) -> Result<XorMatrix> {
        let d: MatrixDoc = from_json("weakxor public key", v)?;
        if (d.n, d.m) != (self.params.n, self.params.m) || d.rows.len() != d.n {
            return Err(ToolError::Config(
                "weakxor public key does not match the parameters".into(),
            ));
        }
        let rows = d
            .rows
            .iter()
            .map(|r| hex_bits("weakxor row", r, d.m))
            .collect::<Result<Vec<_>>>()?;
        Ok(XorMatrix::new(BitMatrix::from_rows(rows, d.m)?))
    }

    fn secret_parity(&self, sk: &XorSecret) -> Option<Vec<usize>> {
        Some(sk.support.clone())
    }

    fn public_matrix(&self, pk: &XorMatrix) -> Option<XorMatrix> {
        Some(pk.clone())
    }
}

#[derive(Serialize, Deserialize)]
struct SsrKeyDoc {
    n: usize,
    ell: usize,
    secrets: Vec<Vec<usize>>,
}

impl KeyCodec for Ssr {
    fn sk_to_json(&self, sk: &SsrKey) -> Value {
        json!(SsrKeyDoc {
            n: sk.n,
            ell: sk.ell,
            secrets: sk.secrets.clone(),
        })
    }

    fn pk_to_json(&self, pk: &SsrKey) -> Value {
        self.sk_to_json(pk)
    }

    fn sk_from_json(&self, v: &Value) -> Result<SsrKey> {
        let d: SsrKeyDoc = from_json("ssr key", v)?;
        let p = self.params;
        if (d.n, d.ell, d.secrets.len()) != (p.n, p.ell(), p.kprime) {
            return Err(ToolError::Config(
                "ssr key does not match the parameters".into(),
            ));
        }
        Ok(SsrKey::new(d.n, d.ell, d.secrets)?)
    }

    fn pk_from_json(&self, v: &Value) -> Result<SsrKey> {
        self.sk_from_json(v)
    }
}

#[derive(Serialize, Deserialize)]
struct EnvelopeDoc {
    t: usize,
    theta: usize,
    alpha: f64,
    delta: f64,
    shifts: Vec<String>,
    perm: Vec<u32>,
    base: Value,
}

fn envelope<S: KeyCodec>(
    a: &Amplified<S>,
    shifts: &[BitString],
    perm: &[u32],
    theta: usize,
    base: Value,
) -> Value {
    json!(EnvelopeDoc {
        t: a.t,
        theta,
        alpha: a.alpha,
        delta: a.delta,
        shifts: shifts.iter().map(BitString::to_hex).collect(),
        perm: perm.to_vec(),
        base,
    })
}

type Envelope = (Vec<BitString>, Vec<u32>, usize, Value);

fn open_envelope<S: KeyCodec>(a: &Amplified<S>, v: &Value) -> Result<Envelope> {
    let d: EnvelopeDoc = from_json("amplified key", v)?;
    let n = a.base.codeword_len();
    if d.t != a.t || d.shifts.len() != d.t || d.theta > d.t {
        return Err(ToolError::Config(
            "amplified key does not match the parameters".into(),
        ));
    }
    let shifts = d
        .shifts
        .iter()
        .map(|h| hex_bits("shift", h, n))
        .collect::<Result<Vec<_>>>()?;
    check_permutation(&d.perm, d.t * n)?;
    Ok((shifts, d.perm, d.theta, d.base))
}

impl<S: KeyCodec> KeyCodec for Amplified<S> {
    fn sk_to_json(&self, sk: &AmplifiedKey<S>) -> Value {
        let base = json!({
            "sk": self.base.sk_to_json(&sk.base_sk),
            "pk": self.base.pk_to_json(&sk.base_pk),
        });
        envelope(self, &sk.shifts, &sk.perm, sk.theta, base)
    }

    fn pk_to_json(&self, pk: &AmplifiedPublicKey<S>) -> Value {
        let base = json!({ "pk": self.base.pk_to_json(&pk.base_pk) });
        envelope(self, &pk.shifts, &pk.perm, pk.theta, base)
    }

    fn sk_from_json(&self, v: &Value) -> Result<AmplifiedKey<S>> {
        let (shifts, perm, theta, base) = open_envelope(self, v)?;
        Ok(AmplifiedKey {
            base_sk: self.base.sk_from_json(&base["sk"])?,
            base_pk: self.base.pk_from_json(&base["pk"])?,
            shifts,
            perm,
            theta,
        })
    }

    fn pk_from_json(&self, v: &Value) -> Result<AmplifiedPublicKey<S>> {
        let (shifts, perm, theta, base) = open_envelope(self, v)?;
        Ok(AmplifiedPublicKey {
            base_pk: self.base.pk_from_json(&base["pk"])?,
            shifts,
            perm,
            theta,
        })
    }
}
