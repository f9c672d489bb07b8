//! Checkpoint container: a little-endian binary file holding named networks
//! plus a JSON metadata header. Weights round-trip bit-exactly.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic   8 bytes  "SBNAVCK1"
//! meta    u32 length + JSON bytes (CheckpointMeta)
//! nets    u32 count, then per net:
//!   name  u32 length + UTF-8 bytes
//!   layers u32 count, then per layer:
//!     in_dim u32, out_dim u32, activation u8 (0 identity, 1 relu),
//!     bias   out_dim f64, weights out_dim*in_dim f64 (row-major)
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};

use crate::net::{Activation, DenseNet, Layer};
use crate::policy::PolicyBundle;
use crate::CheckpointError;

const MAGIC: &[u8; 8] = b"SBNAVCK1";
const MAX_META: u32 = 1 << 20;
const MAX_NETS: u32 = 64;
const MAX_NAME: u32 = 256;
const MAX_LAYERS: u32 = 64;
const MAX_DIM: u32 = 1 << 14;

/// Run provenance stored beside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct CheckpointMeta {
    /// Training mode label (`baseline_ppo`, `lagrangian_sbp`, ...).
    pub mode: String,
    /// Rule ids the run trained against, in activation order.
    pub rules: Vec<String>,
    pub seed: u64,
    /// Episodes completed when the checkpoint was written.
    pub episode: u64,
    pub extra: BTreeMap<String, String>,
}

/// A set of named networks plus metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub nets: Vec<(String, DenseNet)>,
}

impl Checkpoint {
    pub fn net(&self, name: &str) -> Option<&DenseNet> {
        self.nets.iter().find(|(n, _)| n == name).map(|(_, net)| net)
    }

    /// The actor network, present in every checkpoint this project writes.
    pub fn policy(&self) -> Result<&DenseNet, CheckpointError> {
        self.net("policy")
            .ok_or_else(|| CheckpointError::Topology("checkpoint has no `policy` net".into()))
    }

    pub fn from_bundle(bundle: &PolicyBundle, meta: CheckpointMeta) -> Self {
        let mut nets = vec![
            ("policy".to_string(), bundle.policy.clone()),
            ("reward_critic".to_string(), bundle.reward_critic.clone()),
        ];
        for (rule, net) in &bundle.cost_critics {
            nets.push((format!("cost_critic:{rule}"), net.clone()));
        }
        Self { meta, nets }
    }

    /// Reassembles a training bundle; the expected cost critics are taken
    /// from the metadata's rule list.
    pub fn to_bundle(&self) -> Result<PolicyBundle, CheckpointError> {
        let policy = self.policy()?.clone();
        let reward_critic = self
            .net("reward_critic")
            .ok_or_else(|| CheckpointError::Topology("checkpoint has no `reward_critic` net".into()))?
            .clone();
        let mut cost_critics = Vec::new();
        for rule in &self.meta.rules {
            let name = format!("cost_critic:{rule}");
            let net = self
                .net(&name)
                .ok_or_else(|| CheckpointError::Topology(format!("checkpoint has no `{name}` net")))?;
            cost_critics.push((rule.clone(), net.clone()));
        }
        let obs_dim = policy.input_dim();
        for (name, net) in std::iter::once(("reward_critic", &reward_critic))
            .chain(cost_critics.iter().map(|(r, n)| (r.as_str(), n)))
        {
            if net.input_dim() != obs_dim {
                return Err(CheckpointError::Topology(format!(
                    "`{name}` expects {} inputs but the policy takes {obs_dim}",
                    net.input_dim()
                )));
            }
            if net.output_dim() != 1 {
                return Err(CheckpointError::Topology(format!(
                    "critic `{name}` must have one output, has {}",
                    net.output_dim()
                )));
            }
        }
        Ok(PolicyBundle {
            policy,
            reward_critic,
            cost_critics,
        })
    }
}

/// Serializes a checkpoint to bytes.
pub fn encode_checkpoint(ckpt: &Checkpoint) -> Result<Vec<u8>, CheckpointError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    let meta = serde_json::to_vec(&ckpt.meta).map_err(|e| CheckpointError::Format(e.to_string()))?;
    out.write_u32::<LittleEndian>(meta.len() as u32).unwrap();
    out.extend_from_slice(&meta);
    out.write_u32::<LittleEndian>(ckpt.nets.len() as u32).unwrap();
    for (name, net) in &ckpt.nets {
        out.write_u32::<LittleEndian>(name.len() as u32).unwrap();
        out.extend_from_slice(name.as_bytes());
        out.write_u32::<LittleEndian>(net.layers.len() as u32).unwrap();
        for layer in &net.layers {
            out.write_u32::<LittleEndian>(layer.in_dim as u32).unwrap();
            out.write_u32::<LittleEndian>(layer.out_dim as u32).unwrap();
            out.write_u8(match layer.activation {
                Activation::Identity => 0,
                Activation::Relu => 1,
            })
            .unwrap();
            for b in &layer.bias {
                out.write_f64::<LittleEndian>(*b).unwrap();
            }
            for w in &layer.weights {
                out.write_f64::<LittleEndian>(*w).unwrap();
            }
        }
    }
    Ok(out)
}

/// Parses a checkpoint from bytes. Every length is validated before use, so
/// malformed input yields an error, never a panic or an oversized allocation.
pub fn decode_checkpoint(bytes: &[u8]) -> Result<Checkpoint, CheckpointError> {
    let mut r = bytes;
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| CheckpointError::Format("file shorter than the magic header".into()))?;
    if &magic != MAGIC {
        return Err(CheckpointError::Format("bad magic: not a checkpoint file".into()));
    }
    let meta_len = read_len(&mut r, MAX_META, "metadata length")?;
    let meta_bytes = take(&mut r, meta_len, "metadata")?;
    let meta: CheckpointMeta =
        serde_json::from_slice(meta_bytes).map_err(|e| CheckpointError::Format(e.to_string()))?;
    let net_count = read_len(&mut r, MAX_NETS, "net count")?;
    let mut nets = Vec::with_capacity(net_count);
    for _ in 0..net_count {
        let name_len = read_len(&mut r, MAX_NAME, "net name length")?;
        let name = String::from_utf8(take(&mut r, name_len, "net name")?.to_vec())
            .map_err(|_| CheckpointError::Format("net name is not UTF-8".into()))?;
        let layer_count = read_len(&mut r, MAX_LAYERS, "layer count")?;
        let mut layers = Vec::with_capacity(layer_count);
        for _ in 0..layer_count {
            let in_dim = read_len(&mut r, MAX_DIM, "in_dim")?;
            let out_dim = read_len(&mut r, MAX_DIM, "out_dim")?;
            let activation = match r.read_u8() {
                Ok(0) => Activation::Identity,
                Ok(1) => Activation::Relu,
                Ok(code) => {
                    return Err(CheckpointError::Format(format!("unknown activation {code}")))
                }
                Err(_) => return Err(CheckpointError::Format("truncated layer header".into())),
            };
            let bias = read_f64s(&mut r, out_dim, "bias")?;
            let weights = read_f64s(&mut r, in_dim.checked_mul(out_dim).unwrap(), "weights")?;
            layers.push(
                Layer::new(in_dim, out_dim, weights, bias, activation)
                    .map_err(|e| CheckpointError::Format(e.to_string()))?,
            );
        }
        let net = DenseNet::new(layers).map_err(|e| CheckpointError::Format(e.to_string()))?;
        nets.push((name, net));
    }
    if !r.is_empty() {
        return Err(CheckpointError::Format(format!(
            "{} trailing bytes after the last net",
            r.len()
        )));
    }
    Ok(Checkpoint { meta, nets })
}

fn read_len(r: &mut &[u8], max: u32, what: &str) -> Result<usize, CheckpointError> {
    let v = r
        .read_u32::<LittleEndian>()
        .map_err(|_| CheckpointError::Format(format!("truncated {what}")))?;
    if v > max {
        return Err(CheckpointError::Format(format!("{what} {v} exceeds limit {max}")));
    }
    Ok(v as usize)
}

fn take<'a>(r: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8], CheckpointError> {
    if r.len() < n {
        return Err(CheckpointError::Format(format!("truncated {what}")));
    }
    let (head, tail) = r.split_at(n);
    *r = tail;
    Ok(head)
}

fn read_f64s(r: &mut &[u8], n: usize, what: &str) -> Result<Vec<f64>, CheckpointError> {
    let bytes = take(r, n.checked_mul(8).unwrap(), what)?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<(), CheckpointError> {
    let bytes = encode_checkpoint(ckpt)?;
    let mut file = std::fs::File::create(path)
        .map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))?;
    file.write_all(&bytes)
        .map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CheckpointError::Io(format!("{}: {e}", path.display())))?;
    decode_checkpoint(&bytes)
}
