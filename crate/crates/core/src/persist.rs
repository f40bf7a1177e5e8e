//! On-disk run formats: `records.jsonl`, `means.jsonl`, and the per-generation
//! trajectory CSV. Shared by the ES loop and the GA.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::bounds::{encode_design, Bounds, DesignVector};
use crate::es::{MeanSource, RunObserver, SearchState};
use crate::records::{EvalStatus, RecordBuffer, ScoredRecord};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const MEANS_FILE: &str = "means.jsonl";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";

/// How the `timestamp` field of a record line is filled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimestampMode {
    /// Zero-based evaluation sequence number; keeps files byte-reproducible.
    #[default]
    Logical,
    /// Milliseconds since the Unix epoch.
    Wall,
}

/// One line of `records.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordLine {
    pub generation: usize,
    pub design: Vec<f64>,
    pub encoded: Vec<i64>,
    pub score: f64,
    pub status: EvalStatus,
    pub timestamp: u64,
}

impl RecordLine {
    pub fn into_record(self) -> ScoredRecord {
        ScoredRecord {
            design: DesignVector(self.design),
            score: self.score,
            generation: self.generation,
            status: self.status,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanLine {
    pub generation: usize,
    pub mean: Vec<f64>,
    pub encoded: Vec<i64>,
    pub sigma: f64,
    pub source: MeanSource,
}

/// Reads the complete generations of a records file.
///
/// Unparseable lines (a write cut short by a kill) end the read, and a final
/// generation with fewer than `population_size` records is dropped. Returns
/// the kept raw lines alongside the records so a resumed run can rewrite the
/// file without reformatting it.
pub fn read_records(
    path: &Path,
    population_size: usize,
) -> io::Result<(Vec<String>, Vec<ScoredRecord>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = Vec::new();
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        match serde_json::from_str::<RecordLine>(&line) {
            Ok(r) => {
                records.push(r.into_record());
                lines.push(line);
            }
            Err(_) => break,
        }
    }
    if let Some(last) = records.last().map(|r| r.generation) {
        let count = records.iter().filter(|r| r.generation == last).count();
        if count < population_size {
            let keep = records.len() - count;
            records.truncate(keep);
            lines.truncate(keep);
        }
    }
    Ok((lines, records))
}

/// Loads a run directory's records into a buffer, see [`read_records`].
pub fn load_buffer(dir: &Path, population_size: usize) -> io::Result<RecordBuffer> {
    let (_, records) = read_records(&dir.join(RECORDS_FILE), population_size)?;
    RecordBuffer::from_records(records).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

/// [`RunObserver`] that appends every generation to a run directory.
pub struct RunWriter {
    records: BufWriter<File>,
    means: BufWriter<File>,
    bounds: Bounds,
    mode: TimestampMode,
    counter: u64,
}

impl RunWriter {
    /// Starts a fresh run directory, truncating any earlier output.
    pub fn create(dir: &Path, bounds: Bounds, mode: TimestampMode) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            records: BufWriter::new(File::create(dir.join(RECORDS_FILE))?),
            means: BufWriter::new(File::create(dir.join(MEANS_FILE))?),
            bounds,
            mode,
            counter: 0,
        })
    }

    /// Reopens a run directory for appending after its last complete
    /// generation and returns the buffer read back from it.
    pub fn resume(
        dir: &Path,
        bounds: Bounds,
        mode: TimestampMode,
        population_size: usize,
    ) -> io::Result<(Self, RecordBuffer)> {
        let path = dir.join(RECORDS_FILE);
        if !path.exists() {
            return Ok((Self::create(dir, bounds, mode)?, RecordBuffer::new()));
        }
        let (lines, records) = read_records(&path, population_size)?;
        let generations = records.last().map_or(0, |r| r.generation + 1);
        let buffer = RecordBuffer::from_records(records)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;

        let mut out = BufWriter::new(File::create(&path)?);
        for l in &lines {
            writeln!(out, "{l}")?;
        }
        out.flush()?;

        let means_path = dir.join(MEANS_FILE);
        let kept_means: Vec<String> = match File::open(&means_path) {
            Ok(f) => BufReader::new(f)
                .lines()
                .map_while(Result::ok)
                .filter(|l| {
                    serde_json::from_str::<MeanLine>(l).is_ok_and(|m| m.generation < generations)
                })
                .collect(),
            Err(_) => Vec::new(),
        };
        let mut means = BufWriter::new(File::create(&means_path)?);
        for l in &kept_means {
            writeln!(means, "{l}")?;
        }
        means.flush()?;

        let records = BufWriter::new(OpenOptions::new().append(true).open(&path)?);
        Ok((
            Self {
                records,
                means,
                bounds,
                mode,
                counter: lines.len() as u64,
            },
            buffer,
        ))
    }

    fn timestamp(&mut self) -> u64 {
        let t = match self.mode {
            TimestampMode::Logical => self.counter,
            TimestampMode::Wall => SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis() as u64)
                .unwrap_or(0),
        };
        self.counter += 1;
        t
    }
}

fn to_io(e: impl std::error::Error + Send + Sync + 'static) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e)
}

impl RunObserver for RunWriter {
    fn on_generation(
        &mut self,
        records: &[ScoredRecord],
        state: Option<&SearchState>,
    ) -> io::Result<()> {
        if let Some(s) = state {
            let line = MeanLine {
                generation: s.generation,
                mean: s.mean.0.clone(),
                encoded: encode_design(&s.mean, &self.bounds).map_err(to_io)?,
                sigma: s.sigma,
                source: s.source,
            };
            serde_json::to_writer(&mut self.means, &line)?;
            self.means.write_all(b"\n")?;
            self.means.flush()?;
        }
        for r in records {
            let line = RecordLine {
                generation: r.generation,
                design: r.design.0.clone(),
                encoded: encode_design(&r.design, &self.bounds).map_err(to_io)?,
                score: r.score,
                status: r.status,
                timestamp: self.timestamp(),
            };
            serde_json::to_writer(&mut self.records, &line)?;
            self.records.write_all(b"\n")?;
        }
        self.records.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub generation: usize,
    pub best_score_in_generation: f64,
    pub best_score_so_far: f64,
}

pub fn trajectory_rows(buffer: &RecordBuffer) -> Vec<TrajectoryRow> {
    buffer
        .trajectory()
        .into_iter()
        .enumerate()
        .map(|(generation, (best, so_far))| TrajectoryRow {
            generation,
            best_score_in_generation: best,
            best_score_so_far: so_far,
        })
        .collect()
}

pub fn write_trajectory(path: &Path, buffer: &RecordBuffer) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    for row in trajectory_rows(buffer) {
        w.serialize(row).map_err(to_io)?;
    }
    w.flush()
}

pub fn read_trajectory(path: &Path) -> io::Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_path(path).map_err(to_io)?;
    r.deserialize()
        .collect::<Result<Vec<TrajectoryRow>, _>>()
        .map_err(to_io)
}

pub fn records_path(dir: &Path) -> PathBuf {
    dir.join(RECORDS_FILE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::es::{run_optimization, EsConfig};
    use crate::llm::MockProposer;
    use crate::objective::QuadraticObjective;

    fn objective() -> QuadraticObjective {
        QuadraticObjective {
            center: vec![0.2, -0.1],
            bounds: Bounds::uniform(2, -1.0, 1.0).unwrap(),
        }
    }

    fn run_to(dir: &Path, generations: usize, resume: bool) -> RecordBuffer {
        let obj = objective();
        let cfg = EsConfig {
            generations,
            seed: 21,
            ..EsConfig::default()
        };
        let (mut w, buf) = if resume {
            let (w, b) =
                RunWriter::resume(dir, obj.bounds.clone(), TimestampMode::Logical, 8).unwrap();
            (w, Some(b))
        } else {
            (RunWriter::create(dir, obj.bounds.clone(), TimestampMode::Logical).unwrap(), None)
        };
        run_optimization(&obj, &mut MockProposer, &cfg, &mut w, buf)
            .unwrap()
            .buffer
    }

    #[test]
    fn record_lines_have_the_schema() {
        let dir = tempfile::tempdir().unwrap();
        let buf = run_to(dir.path(), 3, false);
        let text = fs::read_to_string(dir.path().join(RECORDS_FILE)).unwrap();
        assert_eq!(text.lines().count(), buf.total_records());
        for (i, line) in text.lines().enumerate() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
            assert_eq!(keys.len(), 6, "{keys:?}");
            for k in ["generation", "design", "encoded", "score", "status", "timestamp"] {
                assert!(v.get(k).is_some(), "missing {k}");
            }
            assert_eq!(v["timestamp"], i as u64);
        }
        assert_eq!(load_buffer(dir.path(), 8).unwrap(), buf);
    }

    #[test]
    fn resume_after_truncated_write_is_byte_identical() {
        let full = tempfile::tempdir().unwrap();
        run_to(full.path(), 9, false);
        let expected = fs::read(full.path().join(RECORDS_FILE)).unwrap();
        let expected_means = fs::read(full.path().join(MEANS_FILE)).unwrap();

        let cut = tempfile::tempdir().unwrap();
        run_to(cut.path(), 5, false);
        // Simulate a kill in the middle of generation 4: keep 3 records and half a line.
        let text = fs::read_to_string(cut.path().join(RECORDS_FILE)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        let mut damaged = lines[..4 * 8 + 3].join("\n");
        damaged.push('\n');
        damaged.push_str(&lines[4 * 8 + 3][..10]);
        fs::write(cut.path().join(RECORDS_FILE), damaged).unwrap();

        run_to(cut.path(), 9, true);
        assert_eq!(fs::read(cut.path().join(RECORDS_FILE)).unwrap(), expected);
        assert_eq!(fs::read(cut.path().join(MEANS_FILE)).unwrap(), expected_means);
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let buf = run_to(dir.path(), 4, false);
        let path = dir.path().join(TRAJECTORY_FILE);
        write_trajectory(&path, &buf).unwrap();
        let header = fs::read_to_string(&path).unwrap();
        assert!(header.starts_with("generation,best_score_in_generation,best_score_so_far\n"));
        let rows = read_trajectory(&path).unwrap();
        assert_eq!(rows, trajectory_rows(&buf));
        assert_eq!(rows.len(), 4);
    }
}
