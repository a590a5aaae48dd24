use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::gmm::{LabeledDataset, UnlabeledDataset};

/// A binary classification table with labels mapped onto `±1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub feature_names: Vec<String>,
    pub label_name: String,
    /// Where the rows came from and what was done to them.
    pub provenance: String,
}

impl TabularDataset {
    pub fn new(
        x: Array2<f64>,
        y: Array1<f64>,
        feature_names: Vec<String>,
        label_name: impl Into<String>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        // Reuse the labelled-dataset checks.
        LabeledDataset::new(x.clone(), y.clone())?;
        if feature_names.len() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                got: feature_names.len(),
            });
        }
        Ok(Self {
            x,
            y,
            feature_names,
            label_name: label_name.into(),
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    pub fn to_labeled(&self) -> LabeledDataset {
        LabeledDataset::new(self.x.clone(), self.y.clone()).expect("validated on construction")
    }

    pub fn to_unlabeled(&self) -> UnlabeledDataset {
        UnlabeledDataset::new(self.x.clone()).expect("validated on construction")
    }

    /// Same labels and names, new features.
    pub(crate) fn with_features(&self, x: Array2<f64>, names: Vec<String>, step: &str) -> Self {
        Self {
            x,
            y: self.y.clone(),
            feature_names: names,
            label_name: self.label_name.clone(),
            provenance: format!("{}; {step}", self.provenance),
        }
    }
}

/// Reads a comma-separated file with a header row. `label_column` holds the
/// class labels (exactly two distinct values; `positive_label` maps to +1),
/// every other column must be numeric.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str, positive_label: &str) -> Result<TabularDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingColumn(label_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let d = feature_names.len();

    let mut values = Vec::new();
    let mut raw_labels = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                reason: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for (i, field) in record.iter().enumerate() {
            if i == label_idx {
                raw_labels.push(field.trim().to_string());
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line,
                reason: format!("column `{}`: `{field}` is not a number", headers[i]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    reason: format!("column `{}`: non-finite value `{field}`", headers[i]),
                });
            }
            values.push(v);
        }
    }

    let distinct: BTreeSet<&str> = raw_labels.iter().map(String::as_str).collect();
    if distinct.len() != 2 {
        return Err(Error::LabelCount(distinct.len()));
    }
    if !distinct.contains(positive_label) {
        return Err(Error::param(
            "positive_label",
            format!("`{positive_label}` does not occur in column `{label_column}`"),
        ));
    }
    let y: Array1<f64> = raw_labels
        .iter()
        .map(|l| if l == positive_label { 1.0 } else { -1.0 })
        .collect();
    let n = y.len();
    let x = Array2::from_shape_vec((n, d), values).expect("row lengths checked");
    TabularDataset::new(x, y, feature_names, label_column, format!("csv:{}", path.display()))
}

/// Writes features then the label column (`1` / `-1`). Floats use the
/// shortest representation that parses back to the same value.
pub fn save_csv(data: &TabularDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().from_path(path)?;
    let mut header = data.feature_names.clone();
    header.push(data.label_name.clone());
    writer.write_record(&header)?;
    for (row, &label) in data.x.rows().into_iter().zip(data.y.iter()) {
        let mut fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        fields.push(if label > 0.0 { "1".into() } else { "-1".into() });
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}
