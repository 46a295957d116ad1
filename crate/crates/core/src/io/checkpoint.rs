//! Model checkpoints.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic   8 bytes  "HARCKPT\0"
//! version 1 byte   currently 1
//! config  u32 length + JSON-encoded ModelConfig
//! params  u64 count + count f64, layers in network order,
//!         each layer's tensors in its parameter order
//! ```

use std::path::Path;

use super::{atomic_write, push_string, read_file, ByteReader};
use crate::error::{Error, Result};
use crate::model::{build_network, ModelConfig};
use crate::nn::Network;

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"HARCKPT\0";
pub const CHECKPOINT_VERSION: u8 = 1;

pub fn save_checkpoint(path: &Path, config: &ModelConfig, network: &Network) -> Result<()> {
    let header = serde_json::to_string(config)?;
    let slices = network.param_slices();
    let count: usize = slices.iter().map(|s| s.len()).sum();

    let mut out = Vec::with_capacity(64 + header.len() + count * 8);
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.push(CHECKPOINT_VERSION);
    push_string(&mut out, &header);
    out.extend_from_slice(&(count as u64).to_le_bytes());
    for slice in slices {
        for &v in slice {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    atomic_write(path, &out)
}

pub fn load_checkpoint(path: &Path) -> Result<(ModelConfig, Network)> {
    let buf = read_file(path)?;
    let mut r = ByteReader::new(&buf, "checkpoint");
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Format(format!(
            "{} is not a model checkpoint (bad magic)",
            path.display()
        )));
    }
    let version = r.u8()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!(
            "checkpoint version {version} not supported (expected {CHECKPOINT_VERSION})"
        )));
    }
    let config: ModelConfig = serde_json::from_str(&r.string()?)?;
    config.validate()?;

    let mut network = build_network(config.task, config.seed)?;
    let count = r.u64()? as usize;
    if count != network.parameter_count() {
        return Err(Error::Format(format!(
            "checkpoint holds {count} parameters, architecture needs {}",
            network.parameter_count()
        )));
    }
    let mut values = Vec::with_capacity(count);
    r.f64s(count, &mut values)?;
    r.expect_end()?;

    let mut offset = 0;
    for slice in network.param_slices_mut() {
        slice.copy_from_slice(&values[offset..offset + slice.len()]);
        offset += slice.len();
    }
    Ok((config, network))
}
