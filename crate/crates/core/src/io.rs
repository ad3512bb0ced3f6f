//! File formats shared by the command-line tools.
//!
//! JSON documents for grids, parameters, problems, solutions and scenarios;
//! CSV for sweep results, case statistics and similarity-vs-budget series.
//! Every file is written to a temporary sibling and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{SimilarityStats, SweepRow};
use crate::rational::Rational;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, field: impl Into<String>, message: impl ToString) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        field: field.into(),
        message: message.to_string(),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_json(path, &text)
}

/// Parses `text`, reporting the JSON path of the offending field on failure.
pub fn parse_json<T: DeserializeOwned>(path: &Path, text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = match e.path().to_string() {
            p if p == "." => "<root>".to_string(),
            p => p,
        };
        parse_err(path, field, e.into_inner())
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values always serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json_string(value).as_bytes())
}

/// Writes through a temporary file in the destination directory, then renames.
/// Existing non-regular targets (`/dev/stdout`, pipes) are written in place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if fs::metadata(path).is_ok_and(|m| !m.is_file()) {
        return fs::write(path, bytes).map_err(io_err(path));
    }
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.flush().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// One line of a sweep CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub budget: u64,
    pub similarity: usize,
    pub objective1: String,
    pub objective2: String,
}

impl From<&SweepRow> for SweepRecord {
    fn from(r: &SweepRow) -> Self {
        SweepRecord {
            budget: r.budget,
            similarity: r.similarity,
            objective1: r.objective_1.to_string(),
            objective2: r.objective_2.to_string(),
        }
    }
}

impl SweepRecord {
    pub fn objectives(&self) -> Result<(Rational, Rational)> {
        Ok((self.objective1.parse()?, self.objective2.parse()?))
    }
}

/// `budget,similarity,objective1,objective2`; objectives as exact rationals.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv_writer();
    for r in rows {
        w.serialize(SweepRecord::from(r)).expect("writing to memory");
    }
    finish(w)
}

pub fn parse_sweep_csv(path: &Path, text: &str) -> Result<Vec<SweepRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize()
        .enumerate()
        .map(|(i, rec)| rec.map_err(|e| parse_err(path, format!("row {}", i + 1), e)))
        .collect()
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_sweep_csv(path, &text)
}

/// Formats a statistic with two decimals, dropping them for whole numbers.
fn trim_number(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Table with columns `case,min,average,median`; the average always has two decimals.
pub fn stats_csv(cases: &[(String, SimilarityStats)]) -> String {
    let mut w = csv_writer();
    w.write_record(["case", "min", "average", "median"]).expect("writing to memory");
    for (name, s) in cases {
        w.write_record([
            name.clone(),
            s.min.to_string(),
            format!("{:.2}", s.mean),
            trim_number(s.median),
        ])
        .expect("writing to memory");
    }
    finish(w)
}

/// Similarity-vs-budget series side by side: `budget,<label1>,<label2>,...`.
pub fn series_csv(budgets: &[u64], series: &[(String, Vec<usize>)]) -> Result<String> {
    if let Some((label, s)) = series.iter().find(|(_, s)| s.len() != budgets.len()) {
        return Err(Error::ShapeMismatch(format!(
            "series `{label}` has {} points for {} budgets",
            s.len(),
            budgets.len()
        )));
    }
    let mut w = csv_writer();
    let mut header = vec!["budget".to_string()];
    header.extend(series.iter().map(|(l, _)| l.clone()));
    w.write_record(&header).expect("writing to memory");
    for (k, b) in budgets.iter().enumerate() {
        let mut rec = vec![b.to_string()];
        rec.extend(series.iter().map(|(_, s)| s[k].to_string()));
        w.write_record(&rec).expect("writing to memory");
    }
    Ok(finish(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::CountsGrid;

    #[test]
    fn parse_errors_name_the_field() {
        let err = parse_json::<CountsGrid>(Path::new("obs.json"), r#"{"n":1,"species":1,"counts":[["x"]]}"#)
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("obs.json: field `counts[0][0]`"), "{msg}");
    }

    #[test]
    fn stats_table_format() {
        let s = stats_csv(&[
            (
                "1".into(),
                SimilarityStats {
                    min: 98,
                    mean: 99.789,
                    median: 100.0,
                },
            ),
            (
                "2".into(),
                SimilarityStats {
                    min: 92,
                    mean: 97.0,
                    median: 97.5,
                },
            ),
        ]);
        assert_eq!(s, "case,min,average,median\n1,98,99.79,100\n2,92,97.00,97.50\n");
    }

    #[test]
    fn sweep_csv_round_trip() {
        let rows = vec![SweepRow {
            budget: 5,
            similarity: 98,
            objective_1: Rational::new(27, 10).unwrap(),
            objective_2: Rational::integer(4),
            x_1: vec![],
            x_2: vec![],
        }];
        let text = sweep_csv(&rows);
        assert_eq!(text, "budget,similarity,objective1,objective2\n5,98,27/10,4\n");
        let back = parse_sweep_csv(Path::new("s.csv"), &text).unwrap();
        assert_eq!(back[0], SweepRecord::from(&rows[0]));
        assert_eq!(
            back[0].objectives().unwrap(),
            (Rational::new(27, 10).unwrap(), Rational::integer(4))
        );
        assert!(parse_sweep_csv(Path::new("s.csv"), "budget,similarity\nx,1\n").is_err());
    }

    #[test]
    fn series_layout() {
        let s = series_csv(&[0, 5], &[("a".into(), vec![100, 97]), ("b".into(), vec![100, 99])]).unwrap();
        assert_eq!(s, "budget,a,b\n0,100,100\n5,97,99\n");
        assert!(series_csv(&[0], &[("a".into(), vec![])]).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[cfg(unix)]
    #[test]
    fn device_targets_are_not_replaced() {
        write_atomic(Path::new("/dev/null"), b"discard").unwrap();
        assert!(!fs::metadata("/dev/null").unwrap().is_file());
    }
}
