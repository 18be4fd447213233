//! Checkpoint directory format.
//!
//! A checkpoint is a directory holding exactly two files:
//!
//! * `manifest.json` - canonical JSON with the model config and a tensor
//!   table (name, shape, byte span, CRC-32C) in canonical tensor order.
//! * `tensors.bin` - all tensors concatenated, little-endian f32, row-major.
//!
//! Nothing in the format depends on wall-clock time or machine identity, so
//! identical parameters always serialize to identical bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::crc::crc32c;
use crate::params::Parameters;
use crate::{ModelError, Result};

pub const CHECKPOINT_FORMAT: &str = "toy-transformer-checkpoint-v1";

const MANIFEST_FILE: &str = "manifest.json";
const TENSORS_FILE: &str = "tensors.bin";

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct TensorEntry {
    name: String,
    rows: usize,
    cols: usize,
    byte_offset: u64,
    byte_len: u64,
    crc32c: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    format: String,
    dtype: String,
    byte_order: String,
    model: ModelConfig,
    tensors: Vec<TensorEntry>,
    total_bytes: u64,
    file_crc32c: u32,
}

/// Writes `params` as f32 into `dir`, creating it if needed.
pub fn save_checkpoint(dir: &Path, params: &Parameters) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut bin: Vec<u8> = Vec::new();
    let mut tensors = Vec::new();
    for view in params.tensor_views() {
        let byte_offset = bin.len() as u64;
        for &v in view.data {
            bin.extend_from_slice(&(v as f32).to_le_bytes());
        }
        let byte_len = bin.len() as u64 - byte_offset;
        let span = &bin[byte_offset as usize..];
        tensors.push(TensorEntry {
            name: view.name,
            rows: view.rows,
            cols: view.cols,
            byte_offset,
            byte_len,
            crc32c: crc32c(span),
        });
    }
    let manifest = Manifest {
        format: CHECKPOINT_FORMAT.to_string(),
        dtype: "f32".to_string(),
        byte_order: "little".to_string(),
        model: params.config.clone(),
        tensors,
        total_bytes: bin.len() as u64,
        file_crc32c: crc32c(&bin),
    };
    fs::write(dir.join(TENSORS_FILE), &bin)?;
    fs::write(
        dir.join(MANIFEST_FILE),
        tokenizer_data::canon::to_canonical_json(&manifest)?,
    )?;
    Ok(())
}

/// Reads a checkpoint directory back into f64 parameters, verifying every
/// checksum, shape, and the canonical tensor order.
pub fn load_checkpoint(dir: &Path) -> Result<Parameters> {
    let err = |msg: String| ModelError::Checkpoint(msg);
    let manifest: Manifest =
        serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    if manifest.format != CHECKPOINT_FORMAT {
        return Err(err(format!("unknown format {:?}", manifest.format)));
    }
    if manifest.dtype != "f32" || manifest.byte_order != "little" {
        return Err(err(format!(
            "unsupported encoding {}/{}",
            manifest.dtype, manifest.byte_order
        )));
    }
    manifest.model.validate()?;

    let bin = fs::read(dir.join(TENSORS_FILE))?;
    if bin.len() as u64 != manifest.total_bytes {
        return Err(err(format!(
            "tensor file is {} bytes, manifest says {}",
            bin.len(),
            manifest.total_bytes
        )));
    }
    if crc32c(&bin) != manifest.file_crc32c {
        return Err(err("tensor file checksum mismatch".into()));
    }

    let mut params = Parameters::zeros_like(&manifest.model);
    let slices = params.tensor_slices_mut();
    if slices.len() != manifest.tensors.len() {
        return Err(err(format!(
            "manifest lists {} tensors, model has {}",
            manifest.tensors.len(),
            slices.len()
        )));
    }
    for ((name, slice), entry) in slices.into_iter().zip(&manifest.tensors) {
        if name != entry.name {
            return Err(err(format!(
                "tensor order mismatch: expected {name}, manifest has {}",
                entry.name
            )));
        }
        let expected_len = (slice.len() * 4) as u64;
        if entry.byte_len != expected_len || entry.rows * entry.cols != slice.len() {
            return Err(err(format!("tensor {name} has wrong shape in manifest")));
        }
        let start = entry.byte_offset as usize;
        let end = start + entry.byte_len as usize;
        if end > bin.len() {
            return Err(err(format!("tensor {name} extends past the file")));
        }
        let span = &bin[start..end];
        if crc32c(span) != entry.crc32c {
            return Err(err(format!("tensor {name} checksum mismatch")));
        }
        for (i, chunk) in span.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk")) as f64;
            if !v.is_finite() {
                return Err(err(format!("tensor {name} holds a non-finite value")));
            }
            slice[i] = v;
        }
    }
    Ok(params)
}
