//! CSV ingestion and emission for labeled datasets.
//!
//! Schema: one header row; numeric feature columns; an optional `source`
//! column with values {0, 1, test}. When the column is absent, the caller
//! assigns one source to the whole file.

use std::io::Write;
use std::path::Path;

use crate::data::{LabeledDataset, PointMatrix, Source};
use crate::error::{Error, Result};

/// Load a dataset from CSV. Coordinates are returned raw (not preprocessed),
/// row order preserved.
pub fn load_csv(path: &Path, source_override: Option<Source>) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::CsvSchema(e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::CsvSchema(e.to_string()))?
        .clone();
    let source_col = headers.iter().position(|h| h.eq_ignore_ascii_case("source"));
    if source_col.is_none() && source_override.is_none() {
        return Err(Error::CsvSchema(
            "no `source` column and no per-file source tag provided".into(),
        ));
    }
    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|c| Some(*c) != source_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::CsvSchema("no feature columns".into()));
    }

    let mut points = PointMatrix::new(feature_cols.len());
    let mut sources = Vec::new();
    let mut row = Vec::with_capacity(feature_cols.len());
    for record in reader.records() {
        let record = record.map_err(|e| Error::CsvSchema(e.to_string()))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        row.clear();
        for &c in &feature_cols {
            let cell = record.get(c).ok_or(Error::CsvParse {
                line,
                msg: format!("missing column {c}"),
            })?;
            let v: f64 = cell.parse().map_err(|_| Error::CsvParse {
                line,
                msg: format!("non-numeric cell `{cell}`"),
            })?;
            row.push(v);
        }
        let src = match source_col {
            Some(c) => {
                let cell = record.get(c).unwrap_or("");
                Source::parse(cell).ok_or(Error::CsvParse {
                    line,
                    msg: format!("bad source tag `{cell}`"),
                })?
            }
            None => source_override.unwrap(),
        };
        points.push(&row)?;
        sources.push(src);
    }
    if points.is_empty() {
        return Err(Error::NoRows);
    }
    LabeledDataset::new(points, sources)
}

/// Write a dataset as CSV with columns `x0..x{d-1},source`.
pub fn write_csv<W: Write>(ds: &LabeledDataset, mut out: W) -> Result<()> {
    let d = ds.d();
    for j in 0..d {
        write!(out, "x{j},")?;
    }
    writeln!(out, "source")?;
    for i in 0..ds.n() {
        for &x in ds.points().row(i) {
            write!(out, "{x},")?;
        }
        writeln!(out, "{}", ds.source(i).as_str())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_three_rows_with_source_column() {
        let f = write_tmp("x0,x1,source\n0.1,0.2,0\n0.3,0.4,1\n0.5,0.6,test\n");
        let ds = load_csv(f.path(), None).unwrap();
        assert_eq!(ds.n(), 3);
        assert_eq!(ds.d(), 2);
        assert_eq!(ds.count(Source::Reference), 1);
        assert_eq!(ds.count(Source::Contaminant), 1);
        assert_eq!(ds.count(Source::Test), 1);
        assert_eq!(ds.points().row(1), &[0.3, 0.4]);
    }

    #[test]
    fn empty_file_is_no_rows() {
        let f = write_tmp("x0,x1,source\n");
        assert!(matches!(load_csv(f.path(), None), Err(Error::NoRows)));
    }

    #[test]
    fn bad_cell_reports_line_number() {
        let f = write_tmp(
            "x0,x1\n0.1,0.2\n0.1,0.2\n0.1,0.2\n0.1,0.2\n0.1,0.2\n0.1,oops\n0.1,0.2\n",
        );
        match load_csv(f.path(), Some(Source::Reference)) {
            Err(Error::CsvParse { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_source_is_schema_error() {
        let f = write_tmp("x0,x1\n0.1,0.2\n");
        assert!(matches!(load_csv(f.path(), None), Err(Error::CsvSchema(_))));
    }

    #[test]
    fn csv_round_trip_preserves_rows() {
        let f = write_tmp("x0,x1,source\n0.125,0.25,0\n0.375,0.5,1\n");
        let ds = load_csv(f.path(), None).unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let g = write_tmp(std::str::from_utf8(&buf).unwrap());
        let ds2 = load_csv(g.path(), None).unwrap();
        assert_eq!(ds.points(), ds2.points());
    }
}
