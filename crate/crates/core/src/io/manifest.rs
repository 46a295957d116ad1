//! Dataset layout on disk: one signal CSV per bout (header
//! `t_s,x_g,y_g,z_g`), an optional VO2 CSV per bout (header
//! `t_s,vo2_ml_min_kg`), and a JSON manifest tying them together with
//! sample rates, class flags, and demographics. All paths in the
//! manifest are relative to the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{atomic_write, read_file};
use crate::error::{Error, Result};
use crate::preprocess::{ActivityBout, ClassFlags, Demographics, ParticipantRecord, AXES};
use crate::tensor::Tensor;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub participants: Vec<ManifestParticipant>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestParticipant {
    pub participant_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demographics: Option<Demographics>,
    pub activities: Vec<ManifestActivity>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestActivity {
    pub activity_name: String,
    pub sample_rate_hz: f64,
    pub signal_file: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vo2_file: Option<String>,
    pub class_flags: ClassFlags,
}

fn slug(name: &str) -> String {
    name.to_lowercase()
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn finish_csv(writer: csv::Writer<Vec<u8>>, path: &Path) -> Result<()> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::State(format!("flushing {}: {e}", path.display())))?;
    atomic_write(path, &bytes)
}

pub fn write_signal_csv(path: &Path, samples: &Tensor, sample_rate_hz: f64) -> Result<()> {
    samples.expect_rank(2, "signal samples")?;
    let mut w = csv_writer();
    w.write_record(["t_s", "x_g", "y_g", "z_g"]).map_err(Error::Csv)?;
    for i in 0..samples.shape()[0] {
        let row = samples.row(i);
        let t = i as f64 / sample_rate_hz;
        w.serialize((t, row[0], row[1], row[2])).map_err(Error::Csv)?;
    }
    finish_csv(w, path)
}

pub fn read_signal_csv(path: &Path) -> Result<Tensor> {
    let bytes = read_file(path)?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    expect_header(&mut reader, &["t_s", "x_g", "y_g", "z_g"], path)?;
    let mut data = Vec::new();
    let mut rows = 0usize;
    for record in reader.deserialize() {
        let (_t, x, y, z): (f64, f64, f64, f64) = record.map_err(Error::Csv)?;
        data.extend_from_slice(&[x, y, z]);
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Format(format!(
            "{} has a header but no samples",
            path.display()
        )));
    }
    Tensor::from_vec(&[rows, AXES], data)
}

pub fn write_vo2_csv(path: &Path, series: &[(f64, f64)]) -> Result<()> {
    let mut w = csv_writer();
    w.write_record(["t_s", "vo2_ml_min_kg"]).map_err(Error::Csv)?;
    for &(t, vo2) in series {
        w.serialize((t, vo2)).map_err(Error::Csv)?;
    }
    finish_csv(w, path)
}

pub fn read_vo2_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let bytes = read_file(path)?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    expect_header(&mut reader, &["t_s", "vo2_ml_min_kg"], path)?;
    let mut series = Vec::new();
    for record in reader.deserialize() {
        series.push(record.map_err(Error::Csv)?);
    }
    Ok(series)
}

fn expect_header(
    reader: &mut csv::Reader<&[u8]>,
    expected: &[&str],
    path: &Path,
) -> Result<()> {
    let header = reader.headers().map_err(Error::Csv)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Format(format!(
            "{}: expected header {}, got {}",
            path.display(),
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

/// Write a dataset as CSV files plus `manifest.json` under `dir`;
/// returns the manifest path.
pub fn save_dataset(records: &[ParticipantRecord], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut participants = Vec::with_capacity(records.len());
    for record in records {
        let subdir = dir.join(&record.participant_id);
        fs::create_dir_all(&subdir)?;
        let mut activities = Vec::with_capacity(record.bouts.len());
        for (k, bout) in record.bouts.iter().enumerate() {
            let stem = format!("{}_{k}", slug(&bout.activity_name));
            let signal_rel = format!("{}/{stem}.csv", record.participant_id);
            write_signal_csv(&dir.join(&signal_rel), &bout.samples, bout.sample_rate_hz)?;
            let vo2_rel = match &bout.vo2_series {
                Some(series) => {
                    let rel = format!("{}/{stem}_vo2.csv", record.participant_id);
                    write_vo2_csv(&dir.join(&rel), series)?;
                    Some(rel)
                }
                None => None,
            };
            activities.push(ManifestActivity {
                activity_name: bout.activity_name.clone(),
                sample_rate_hz: bout.sample_rate_hz,
                signal_file: signal_rel,
                vo2_file: vo2_rel,
                class_flags: bout.class_flags,
            });
        }
        participants.push(ManifestParticipant {
            participant_id: record.participant_id.clone(),
            demographics: record.demographics.clone(),
            activities,
        });
    }
    let manifest = DatasetManifest { participants };
    let path = dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    atomic_write(&path, &json)?;
    Ok(path)
}

/// Load a dataset back from its manifest.
pub fn load_dataset(manifest_path: &Path) -> Result<Vec<ParticipantRecord>> {
    let bytes = read_file(manifest_path)?;
    let manifest: DatasetManifest = serde_json::from_slice(&bytes)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut records = Vec::with_capacity(manifest.participants.len());
    for participant in manifest.participants {
        let mut bouts = Vec::with_capacity(participant.activities.len());
        for activity in participant.activities {
            let samples = read_signal_csv(&base.join(&activity.signal_file))?;
            let vo2 = activity
                .vo2_file
                .as_ref()
                .map(|rel| read_vo2_csv(&base.join(rel)))
                .transpose()?;
            bouts.push(ActivityBout::new(
                activity.activity_name,
                activity.sample_rate_hz,
                samples,
                vo2,
                activity.class_flags,
            )?);
        }
        records.push(ParticipantRecord {
            participant_id: participant.participant_id,
            bouts,
            demographics: participant.demographics,
        });
    }
    Ok(records)
}
