//! Binary bundle layout, all integers little-endian:
//!
//! ```text
//! magic       4 bytes  "SZMB"
//! version     u32      BUNDLE_FORMAT_VERSION
//! scalar      u8       bytes per parameter (4 or 8)
//! meta        u64 length + JSON (kind, shapes, scaling, means, manifest)
//! blocks      u32 count, then per block:
//!               u16 name length + name, u32 rows, u32 cols, rows*cols values
//! profiles    u64 length + JSON profile store
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bundle::{Manifest, ModelBundle, Standardizer};
use super::{ModelError, ModelKind};
use crate::domain::ZoneId;
use crate::featurize::{GlobalStats, ProfileStore};
use crate::nn::{Activation, Dense, LstmCell, NetShape, Network, Scalar, Tensor2, Topology};

pub const BUNDLE_MAGIC: &[u8; 4] = b"SZMB";
pub const BUNDLE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Meta {
    kind: ModelKind,
    taxonomy_version: u32,
    topology: Option<Topology>,
    shape: Option<NetShape>,
    activations: Vec<Activation>,
    class_prior: Option<Vec<f64>>,
    standardizer: Standardizer,
    globals: GlobalStats,
    manifest: Manifest,
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_block<S: Scalar>(out: &mut Vec<u8>, name: &str, t: &Tensor2<S>) {
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    put_u32(out, t.rows() as u32);
    put_u32(out, t.cols() as u32);
    for &v in t.data() {
        v.write_le(out);
    }
}

fn vector_block<S: Scalar>(v: &[S]) -> Tensor2<S> {
    Tensor2::from_vec(v.len(), 1, v.to_vec()).expect("column vector")
}

pub fn encode_bundle<S: Scalar>(bundle: &ModelBundle<S>) -> Vec<u8> {
    let meta = Meta {
        kind: bundle.kind,
        taxonomy_version: bundle.taxonomy_version,
        topology: bundle.network.as_ref().map(|n| n.topology),
        shape: bundle.network.as_ref().map(|n| n.shape),
        activations: bundle.network.as_ref().map(|n| n.head.iter().map(|d| d.act).collect()).unwrap_or_default(),
        class_prior: bundle.class_prior.map(|p| p.to_vec()),
        standardizer: bundle.standardizer.clone(),
        globals: bundle.globals.clone(),
        manifest: bundle.manifest.clone(),
    };
    let meta = serde_json::to_vec(&meta).expect("bundle metadata serializes");
    let mut out = Vec::new();
    out.extend_from_slice(BUNDLE_MAGIC);
    put_u32(&mut out, BUNDLE_FORMAT_VERSION);
    out.push(S::BYTES as u8);
    out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
    out.extend_from_slice(&meta);
    match &bundle.network {
        None => put_u32(&mut out, 0),
        Some(net) => {
            put_u32(&mut out, 2 * (net.lstm.len() + net.head.len()) as u32);
            for (l, c) in net.lstm.iter().enumerate() {
                put_block(&mut out, &format!("lstm{l}.w"), &c.w);
                put_block(&mut out, &format!("lstm{l}.b"), &vector_block(&c.b));
            }
            for (j, d) in net.head.iter().enumerate() {
                put_block(&mut out, &format!("dense{j}.w"), &d.w);
                put_block(&mut out, &format!("dense{j}.b"), &vector_block(&d.b));
            }
        }
    }
    let profiles = bundle.profiles.to_json();
    out.extend_from_slice(&(profiles.len() as u64).to_le_bytes());
    out.extend_from_slice(profiles.as_bytes());
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], ModelError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(ModelError::Format(format!("truncated while reading {what} at byte {}", self.pos))),
        }
    }

    fn u16(&mut self, what: &str) -> Result<u16, ModelError> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self, what: &str) -> Result<u32, ModelError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> Result<u64, ModelError> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn block<S: Scalar>(&mut self, expect_name: &str, shape: (usize, usize)) -> Result<Tensor2<S>, ModelError> {
        let len = self.u16("block name length")? as usize;
        let name = std::str::from_utf8(self.take(len, "block name")?).map_err(|_| ModelError::Format("block name is not UTF-8".into()))?;
        if name != expect_name {
            return Err(ModelError::Format(format!("expected block {expect_name}, found {name}")));
        }
        let rows = self.u32("block rows")? as usize;
        let cols = self.u32("block cols")? as usize;
        if (rows, cols) != shape {
            return Err(ModelError::Format(format!("block {name} is {rows}x{cols}, expected {}x{}", shape.0, shape.1)));
        }
        let raw = self.take(rows * cols * S::BYTES, name)?;
        let data = raw.chunks_exact(S::BYTES).map(S::read_le).collect();
        Ok(Tensor2::from_vec(rows, cols, data)?)
    }
}

pub fn decode_bundle<S: Scalar>(bytes: &[u8]) -> Result<ModelBundle<S>, ModelError> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != BUNDLE_MAGIC {
        return Err(ModelError::Format("not a model bundle".into()));
    }
    let version = r.u32("format version")?;
    if version != BUNDLE_FORMAT_VERSION {
        return Err(ModelError::Format(format!("format version {version}, this build reads {BUNDLE_FORMAT_VERSION}")));
    }
    let width = r.take(1, "scalar width")?[0] as usize;
    if width != S::BYTES {
        return Err(ModelError::Format(format!("parameters are {width}-byte floats, expected {}", S::NAME)));
    }
    let meta_len = r.u64("metadata length")? as usize;
    let meta: Meta = serde_json::from_slice(r.take(meta_len, "metadata")?)
        .map_err(|e| ModelError::Format(format!("metadata: {e}")))?;
    let n_blocks = r.u32("block count")? as usize;
    let network = match (meta.topology, meta.shape) {
        (Some(topology), Some(shape)) => {
            let layers = if topology == Topology::FeedForward { 0 } else { shape.layers };
            if n_blocks != 2 * (layers + 3) || meta.activations.len() != 3 {
                return Err(ModelError::Format(format!("{n_blocks} parameter blocks do not fit the stored shape")));
            }
            let mut lstm = Vec::new();
            for l in 0..layers {
                let d = if l == 0 { shape.context } else { shape.hidden };
                let w = r.block::<S>(&format!("lstm{l}.w"), (4 * shape.hidden, d + shape.hidden))?;
                let b = r.block::<S>(&format!("lstm{l}.b"), (4 * shape.hidden, 1))?;
                lstm.push(LstmCell::from_parts(d, shape.hidden, w, b.data().to_vec())?);
            }
            let widths = [shape.head_input(topology), shape.head, shape.head, shape.classes];
            let mut head = Vec::new();
            for j in 0..3 {
                let w = r.block::<S>(&format!("dense{j}.w"), (widths[j + 1], widths[j]))?;
                let b = r.block::<S>(&format!("dense{j}.b"), (widths[j + 1], 1))?;
                head.push(Dense::from_parts(w, b.data().to_vec(), meta.activations[j])?);
            }
            Some(Network { topology, shape, lstm, head })
        }
        (None, None) if n_blocks == 0 => None,
        _ => return Err(ModelError::Format("inconsistent network description".into())),
    };
    let profiles_len = r.u64("profile store length")? as usize;
    let profiles_text = std::str::from_utf8(r.take(profiles_len, "profile store")?)
        .map_err(|_| ModelError::Format("profile store is not UTF-8".into()))?;
    let profiles = ProfileStore::from_json(profiles_text).map_err(|e| ModelError::Format(format!("profile store: {e}")))?;
    if r.pos != bytes.len() {
        return Err(ModelError::Format(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    let class_prior = match meta.class_prior {
        None => None,
        Some(p) => Some(<[f64; ZoneId::COUNT]>::try_from(p).map_err(|_| ModelError::Format("class prior needs 17 entries".into()))?),
    };
    if !meta.standardizer.is_valid() || !meta.globals.is_consistent() {
        return Err(ModelError::Format("scaling or global vectors do not match the feature ledgers".into()));
    }
    Ok(ModelBundle {
        kind: meta.kind,
        taxonomy_version: meta.taxonomy_version,
        network,
        class_prior,
        standardizer: meta.standardizer,
        globals: meta.globals,
        profiles,
        manifest: meta.manifest,
    })
}

pub fn save_bundle<S: Scalar>(bundle: &ModelBundle<S>, path: &Path) -> Result<(), ModelError> {
    std::fs::write(path, encode_bundle(bundle))?;
    Ok(())
}

pub fn load_bundle<S: Scalar>(path: &Path) -> Result<ModelBundle<S>, ModelError> {
    decode_bundle(&std::fs::read(path)?)
}
