//! Dataset CSV serialization.
//!
//! Format: header `id,class_id,c0,...,c199`, one profile per row, UTF-8,
//! amplitudes as decimal floats. Floats are written with the shortest
//! representation that round-trips exactly.

use std::collections::HashSet;
use std::path::Path;

use crate::data::{RangeProfile, PROFILE_CELLS};
use crate::error::{Error, Result};

fn expected_header() -> Vec<String> {
    let mut h = vec!["id".to_string(), "class_id".to_string()];
    h.extend((0..PROFILE_CELLS).map(|i| format!("c{i}")));
    h
}

/// Loads a dataset, validating every profile invariant.
///
/// Errors carry the 1-based data row number they were found on.
pub fn load_dataset<P: AsRef<Path>>(path: P) -> Result<Vec<RangeProfile>> {
    let mut reader = csv::Reader::from_path(path)?;
    {
        let header = reader.headers()?;
        let expected = expected_header();
        if header.len() != expected.len() {
            return Err(Error::DatasetFormat {
                row: 0,
                msg: format!("expected {} columns, found {}", expected.len(), header.len()),
            });
        }
        if header.iter().take(2).ne(["id", "class_id"]) {
            return Err(Error::DatasetFormat {
                row: 0,
                msg: "header must start with id,class_id".to_string(),
            });
        }
    }

    let mut profiles = Vec::new();
    let mut seen_ids = HashSet::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let parse = |field: &str, name: &str| -> Result<f64> {
            field.trim().parse::<f64>().map_err(|_| Error::DatasetFormat {
                row,
                msg: format!("cannot parse {name} value {field:?}"),
            })
        };
        let id = record
            .get(0)
            .ok_or(Error::DatasetFormat { row, msg: "missing id".into() })?
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::DatasetFormat { row, msg: "cannot parse id".into() })?;
        let class_id = record
            .get(1)
            .ok_or(Error::DatasetFormat { row, msg: "missing class_id".into() })?
            .trim()
            .parse::<u8>()
            .map_err(|_| Error::DatasetFormat { row, msg: "cannot parse class_id".into() })?;
        let mut cells = Vec::with_capacity(PROFILE_CELLS);
        for field in record.iter().skip(2) {
            cells.push(parse(field, "cell")?);
        }
        if !seen_ids.insert(id) {
            return Err(Error::DuplicateId { row, id });
        }
        let profile = RangeProfile::new(id, class_id, cells)
            .map_err(|e| Error::DatasetRow { row, source: Box::new(e) })?;
        profiles.push(profile);
    }
    Ok(profiles)
}

/// Writes a dataset in the canonical CSV format.
pub fn save_dataset<P: AsRef<Path>>(path: P, profiles: &[RangeProfile]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(expected_header())?;
    let mut record = Vec::with_capacity(PROFILE_CELLS + 2);
    for p in profiles {
        record.clear();
        record.push(p.id().to_string());
        record.push(p.class_id().to_string());
        record.extend(p.cells().iter().map(|v| v.to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use std::io::Write;

    fn csv_row(id: u64, class: u8, cells: &[f64]) -> String {
        let mut s = format!("{id},{class}");
        for c in cells {
            s.push(',');
            s.push_str(&c.to_string());
        }
        s
    }

    fn write_file(dir: &tempfile::TempDir, name: &str, contents: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    fn header_line() -> String {
        expected_header().join(",")
    }

    #[test]
    fn wellformed_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = header_line();
        for i in 0..8 {
            body.push('\n');
            body.push_str(&csv_row(i, (i % 4) as u8, &vec![0.5; PROFILE_CELLS]));
        }
        let path = write_file(&dir, "ok.csv", &body);
        let profiles = load_dataset(&path).unwrap();
        assert_eq!(profiles.len(), 8);
        assert_eq!(profiles[3].class_id(), 3);
    }

    #[test]
    fn short_row_reports_row_number() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = header_line();
        body.push('\n');
        body.push_str(&csv_row(0, 0, &vec![0.5; PROFILE_CELLS]));
        body.push('\n');
        body.push_str(&csv_row(1, 0, &vec![0.5; PROFILE_CELLS - 1]));
        let path = write_file(&dir, "short.csv", &body);
        let err = load_dataset(&path).unwrap_err();
        // The csv crate catches the column-count mismatch; the row shows up
        // in its message either way.
        assert!(err.to_string().contains('2'), "error should name row 2: {err}");
    }

    #[test]
    fn bad_amplitude_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut cells = vec![0.5; PROFILE_CELLS];
        cells[10] = -3.0;
        let mut body = header_line();
        body.push('\n');
        body.push_str(&csv_row(0, 0, &cells));
        let path = write_file(&dir, "neg.csv", &body);
        let err = load_dataset(&path).unwrap_err();
        assert!(matches!(err, Error::DatasetRow { row: 1, .. }), "got {err}");
    }

    #[test]
    fn unknown_class_reports_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = header_line();
        body.push('\n');
        body.push_str(&csv_row(0, 9, &vec![0.5; PROFILE_CELLS]));
        let path = write_file(&dir, "class.csv", &body);
        let err = load_dataset(&path).unwrap_err();
        assert!(matches!(err, Error::DatasetRow { row: 1, .. }), "got {err}");
    }

    #[test]
    fn duplicate_id_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = header_line();
        for _ in 0..2 {
            body.push('\n');
            body.push_str(&csv_row(5, 0, &vec![0.5; PROFILE_CELLS]));
        }
        let path = write_file(&dir, "dup.csv", &body);
        let err = load_dataset(&path).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { row: 2, id: 5 }));
    }

    #[test]
    fn synthetic_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let profiles = synth::generate_benchmark(12, 3).unwrap();
        let path = dir.path().join("round.csv");
        save_dataset(&path, &profiles).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(profiles.len(), back.len());
        for (a, b) in profiles.iter().zip(&back) {
            assert_eq!(a.id(), b.id());
            assert_eq!(a.class_id(), b.class_id());
            for (x, y) in a.cells().iter().zip(b.cells()) {
                assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
            }
        }
    }
}
