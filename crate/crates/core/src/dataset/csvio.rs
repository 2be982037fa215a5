use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ClassLabel, Dataset};
use crate::error::{Error, Result};

/// How to read a delimited file into a [`Dataset`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CsvOptions {
    pub label_column: String,
    /// Feature columns in order; `None` takes every column except the label.
    pub feature_columns: Option<Vec<String>>,
    pub delimiter: char,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            feature_columns: None,
            delimiter: ',',
        }
    }
}

impl CsvOptions {
    pub fn new(label_column: impl Into<String>) -> Self {
        Self {
            label_column: label_column.into(),
            ..Self::default()
        }
    }

    pub fn with_features(mut self, features: Vec<String>) -> Self {
        self.feature_columns = Some(features);
        self
    }

    pub fn with_delimiter(mut self, delimiter: char) -> Self {
        self.delimiter = delimiter;
        self
    }

    pub(crate) fn delimiter_byte(&self) -> Result<u8> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| Error::InvalidArgument(format!("delimiter {:?} is not ASCII", self.delimiter)))
    }
}

/// Header plus raw string records of a delimited file.
pub(crate) struct Table {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path, delimiter: u8) -> Result<Self> {
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        let csv_err = |e: csv::Error| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut records = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(csv_err)?;
            records.push(rec.iter().map(str::to_owned).collect());
        }
        Ok(Self {
            path: path.to_path_buf(),
            header,
            records,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: self.path.clone(),
                column: name.to_owned(),
            })
    }

    /// Parses cell `(row, col)` as a finite number. `row` is 0-based here and
    /// reported 1-based (first data row after the header is row 1).
    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let cell = &self.records[row][col];
        if cell.is_empty() {
            return Err(Error::EmptyCell {
                path: self.path.clone(),
                row: row + 1,
                column: self.header[col].clone(),
            });
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::ParseCell {
                path: self.path.clone(),
                row: row + 1,
                column: self.header[col].clone(),
                value: cell.clone(),
            }),
        }
    }

    pub fn text(&self, row: usize, col: usize) -> Result<&str> {
        let cell = &self.records[row][col];
        if cell.is_empty() {
            return Err(Error::EmptyCell {
                path: self.path.clone(),
                row: row + 1,
                column: self.header[col].clone(),
            });
        }
        Ok(cell)
    }
}

/// Reads a header-first delimited file. Categorical codes are read as plain
/// numbers; missing or unparseable cells are errors naming row and column.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let table = Table::read(path, options.delimiter_byte()?)?;
    let label_col = table.column(&options.label_column)?;
    let feature_names: Vec<String> = match &options.feature_columns {
        Some(cols) => cols.clone(),
        None => table
            .header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != label_col)
            .map(|(_, h)| h.clone())
            .collect(),
    };
    let feature_cols = feature_names
        .iter()
        .map(|f| table.column(f))
        .collect::<Result<Vec<_>>>()?;

    if table.records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rows = Vec::with_capacity(table.records.len());
    let mut labels = Vec::with_capacity(table.records.len());
    for r in 0..table.records.len() {
        let row = feature_cols
            .iter()
            .map(|&c| table.number(r, c))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        labels.push(ClassLabel::new(table.text(r, label_col)?));
    }
    Dataset::new(feature_names, rows, labels)
}

/// Feature names, rows, and labels when the file has them.
pub type Patterns = (Vec<String>, Vec<Vec<f64>>, Option<Vec<ClassLabel>>);

/// Reads feature columns without requiring labels. With `feature_columns`
/// unset, every column except the label column (if the file has one) is a
/// feature.
pub fn load_patterns(
    path: impl AsRef<Path>,
    options: &CsvOptions,
) -> Result<Patterns> {
    let path = path.as_ref();
    let table = Table::read(path, options.delimiter_byte()?)?;
    let label_col = table.header.iter().position(|h| *h == options.label_column);
    let feature_names: Vec<String> = match &options.feature_columns {
        Some(cols) => cols.clone(),
        None => table
            .header
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != label_col)
            .map(|(_, h)| h.clone())
            .collect(),
    };
    if feature_names.is_empty() {
        return Err(Error::EmptyFeatureVector);
    }
    let feature_cols = feature_names
        .iter()
        .map(|f| table.column(f))
        .collect::<Result<Vec<_>>>()?;
    if table.records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let rows = (0..table.records.len())
        .map(|r| feature_cols.iter().map(|&c| table.number(r, c)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let labels = label_col
        .map(|c| {
            (0..table.records.len())
                .map(|r| table.text(r, c).map(ClassLabel::new))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    Ok((feature_names, rows, labels))
}

/// Writes `data` in the format [`load_csv`] reads, label column last.
///
/// Numbers use Rust's shortest round-trip formatting, so reloading gives back
/// bit-identical values.
pub fn write_csv(data: &Dataset, mut out: impl Write, label_column: &str, delimiter: char) -> Result<()> {
    let delimiter = CsvOptions::default().with_delimiter(delimiter).delimiter_byte()?;
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(&mut out);
    let io_err = |e: csv::Error| Error::Csv {
        path: PathBuf::from("<output>"),
        message: e.to_string(),
    };
    let mut header: Vec<&str> = data.feature_names().iter().map(String::as_str).collect();
    header.push(label_column);
    writer.write_record(&header).map_err(io_err)?;
    for (row, label) in data.iter() {
        let mut rec: Vec<String> = row.iter().map(f64::to_string).collect();
        rec.push(label.to_string());
        writer.write_record(&rec).map_err(io_err)?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: PathBuf::from("<output>"),
        source,
    })?;
    Ok(())
}
