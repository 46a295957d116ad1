//! Binary window archive.
//!
//! Layout (all integers and floats little-endian):
//!
//! ```text
//! magic   8 bytes  "HARWIND\0"
//! version 1 byte   currently 1
//! count   u64      number of records
//! record:
//!   participant_id  u32 length + UTF-8 bytes
//!   activity        u32 length + UTF-8 bytes
//!   label           1 byte: bit0 sedentary, bit1 locomotion, bit2 lifestyle
//!   met             f64, NaN when absent
//!   values          450*3 f64, row-major [time][axis]
//! ```

use std::path::Path;

use super::{atomic_write, push_string, read_file, ByteReader};
use crate::error::{Error, Result};
use crate::preprocess::{ClassFlags, WindowSample, AXES, WINDOW_LEN};
use crate::tensor::Tensor;

pub const ARCHIVE_MAGIC: [u8; 8] = *b"HARWIND\0";
pub const ARCHIVE_VERSION: u8 = 1;

fn encode_flags(flags: &ClassFlags) -> u8 {
    (flags.sedentary as u8) | (flags.locomotion as u8) << 1 | (flags.lifestyle as u8) << 2
}

fn decode_flags(byte: u8) -> Result<ClassFlags> {
    // At most one class bit may be set (zero means EE-only).
    if byte & !0b111 != 0 || byte.count_ones() > 1 {
        return Err(Error::Format(format!("unknown label bits 0x{byte:02x}")));
    }
    Ok(ClassFlags {
        sedentary: byte & 0b001 != 0,
        locomotion: byte & 0b010 != 0,
        lifestyle: byte & 0b100 != 0,
    })
}

pub fn write_windows(path: &Path, windows: &[WindowSample]) -> Result<()> {
    let mut out = Vec::with_capacity(32 + windows.len() * (WINDOW_LEN * AXES * 8 + 64));
    out.extend_from_slice(&ARCHIVE_MAGIC);
    out.push(ARCHIVE_VERSION);
    out.extend_from_slice(&(windows.len() as u64).to_le_bytes());
    for w in windows {
        push_string(&mut out, &w.participant_id);
        push_string(&mut out, &w.source_activity);
        out.push(encode_flags(&w.labels));
        out.extend_from_slice(&w.met.unwrap_or(f64::NAN).to_le_bytes());
        for &v in w.values.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    atomic_write(path, &out)
}

pub fn read_windows(path: &Path) -> Result<Vec<WindowSample>> {
    let buf = read_file(path)?;
    let mut r = ByteReader::new(&buf, "window archive");
    if r.take(8)? != ARCHIVE_MAGIC {
        return Err(Error::Format(format!(
            "{} is not a window archive (bad magic)",
            path.display()
        )));
    }
    let version = r.u8()?;
    if version != ARCHIVE_VERSION {
        return Err(Error::Format(format!(
            "window archive version {version} not supported (expected {ARCHIVE_VERSION})"
        )));
    }
    let count = r.u64()? as usize;
    let mut windows = Vec::with_capacity(count);
    for _ in 0..count {
        let participant_id = r.string()?;
        let activity = r.string()?;
        let flags = decode_flags(r.u8()?)?;
        let met = r.f64()?;
        let met = if met.is_nan() { None } else { Some(met) };
        let mut values = Vec::with_capacity(WINDOW_LEN * AXES);
        r.f64s(WINDOW_LEN * AXES, &mut values)?;
        windows.push(WindowSample::new(
            Tensor::from_vec(&[WINDOW_LEN, AXES], values)?,
            flags,
            met,
            participant_id,
            activity,
        )?);
    }
    r.expect_end()?;
    Ok(windows)
}
