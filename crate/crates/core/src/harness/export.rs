//! CSV and JSON writers and readers for experiment output. Every format
//! carries `schema_version`; readers reject other versions.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{CellSummary, RunRecord, StatsSummary, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// Raw per-run output: every record with its trace and config echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawResults {
    pub schema_version: u32,
    pub reference: String,
    pub records: Vec<RunRecord>,
}

impl RawResults {
    pub fn new(reference: impl Into<String>, records: Vec<RunRecord>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            reference: reference.into(),
            records,
        }
    }
}

fn check_version(found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "schema version {found} is not supported (expected {SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(cells: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<CellSummary>> {
    let mut r = csv::Reader::from_reader(input);
    let cells = r.deserialize().collect::<std::result::Result<Vec<CellSummary>, _>>()?;
    for c in &cells {
        check_version(c.schema_version)?;
    }
    Ok(cells)
}

pub fn write_json<T: Serialize, W: Write>(value: &T, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, value)?;
    Ok(())
}

pub fn read_summary_json<R: Read>(input: R) -> Result<StatsSummary> {
    let s: StatsSummary = serde_json::from_reader(input)?;
    check_version(s.schema_version)?;
    Ok(s)
}

pub fn read_raw_json<R: Read>(input: R) -> Result<RawResults> {
    let raw: RawResults = serde_json::from_reader(input)?;
    check_version(raw.schema_version)?;
    Ok(raw)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

pub fn save_summary_csv(cells: &[CellSummary], path: impl AsRef<Path>) -> Result<()> {
    write_summary_csv(cells, create(path.as_ref())?)
}

pub fn load_summary_csv(path: impl AsRef<Path>) -> Result<Vec<CellSummary>> {
    read_summary_csv(BufReader::new(File::open(path)?))
}

pub fn save_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut w = create(path.as_ref())?;
    write_json(value, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_raw_json(path: impl AsRef<Path>) -> Result<RawResults> {
    read_raw_json(BufReader::new(File::open(path)?))
}

pub fn load_summary_json(path: impl AsRef<Path>) -> Result<StatsSummary> {
    read_summary_json(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Variant;
    use crate::harness::experiment::{run_experiment, summarize, AlgorithmSpec, ExperimentSpec, OutputPaths};
    use crate::harness::stats::Mark;
    use crate::operators::Operator;
    use crate::problems::Benchmark;

    fn cells() -> Vec<CellSummary> {
        vec![
            CellSummary {
                schema_version: SCHEMA_VERSION,
                problem: "Ellipsoid".into(),
                dim: 20,
                algorithm: "USEA-EDA".into(),
                runs: 30,
                completed: 30,
                mean: Some(9.676_543_210_123_457),
                std: Some(0.1 + 0.2),
                median: Some(1e-300),
                rank: Some(1.5),
                mark: None,
                p_value: None,
            },
            CellSummary {
                schema_version: SCHEMA_VERSION,
                problem: "Ellipsoid".into(),
                dim: 20,
                algorithm: "EDA-LS-lite".into(),
                runs: 30,
                completed: 29,
                mean: Some(-71.7),
                std: Some(f64::MIN_POSITIVE),
                median: None,
                rank: Some(2.0),
                mark: Some(Mark::Worse),
                p_value: Some(3.3e-11),
            },
        ]
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        write_summary_csv(&cells(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("schema_version,"));
        assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), cells());
    }

    #[test]
    fn version_mismatch_rejected() {
        let mut c = cells();
        c[0].schema_version = 99;
        let mut buf = Vec::new();
        write_summary_csv(&c, &mut buf).unwrap();
        assert!(matches!(read_summary_csv(buf.as_slice()), Err(Error::Format(_))));
    }

    #[test]
    fn json_round_trips_and_stats_recompute() {
        let mut a = AlgorithmSpec::new(Operator::ga(), Variant::Usea);
        a.pop_size = 6;
        a.fes = 12;
        a.surrogate_settings.forest.n_trees = 3;
        let mut b = AlgorithmSpec::new(Operator::ga(), Variant::Baseline);
        b.pop_size = 6;
        b.fes = 12;
        let spec = ExperimentSpec {
            algorithms: vec![a, b],
            problems: vec![Benchmark::Rosenbrock],
            dims: vec![2],
            runs: 2,
            base_seed: 5,
            reference: None,
            workers: Some(1),
            output: OutputPaths::default(),
        };
        let res = run_experiment(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();

        let raw_path = dir.path().join("raw.json");
        save_json(&RawResults::new(&res.summary.reference, res.records.clone()), &raw_path).unwrap();
        let raw = load_raw_json(&raw_path).unwrap();
        assert_eq!(raw.records, res.records);
        assert_eq!(summarize(&raw.records, &raw.reference).unwrap(), res.summary);

        let sum_path = dir.path().join("nested/summary.json");
        save_json(&res.summary, &sum_path).unwrap();
        assert_eq!(load_summary_json(&sum_path).unwrap(), res.summary);

        let csv_path = dir.path().join("summary.csv");
        save_summary_csv(&res.summary.cells, &csv_path).unwrap();
        assert_eq!(load_summary_csv(&csv_path).unwrap(), res.summary.cells);
    }
}
