//! Loaders for the three Wisconsin breast cancer files in their UCI
//! comma-separated layouts. `?` marks a missing cell; rows containing one are
//! dropped.
//!
//! | kind       | fields per line | layout |
//! |------------|-----------------|--------|
//! | original   | 11 | id, 9 cytology scores (1-10), class (`2` benign, `4` malignant) |
//! | diagnostic | 32 | id, diagnosis (`B`/`M`), 30 nucleus features |
//! | prognostic | 35 | id, outcome (`N`/`R`), time, 30 nucleus features, tumor size, lymph node status |
//!
//! For the prognostic file the 32 predictors are time, the 30 nucleus
//! features and tumor size. Lymph node status is only consulted for missing
//! values and is not used as a predictor.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, Provenance, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Original,
    Diagnostic,
    Prognostic,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 3] = [
        DatasetKind::Original,
        DatasetKind::Diagnostic,
        DatasetKind::Prognostic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Original => "original",
            DatasetKind::Diagnostic => "diagnostic",
            DatasetKind::Prognostic => "prognostic",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DatasetKind::Original => "Original",
            DatasetKind::Diagnostic => "Diagnostic",
            DatasetKind::Prognostic => "Prognostic",
        }
    }

    /// File name of the UCI distribution.
    pub fn file_name(self) -> &'static str {
        match self {
            DatasetKind::Original => "breast-cancer-wisconsin.data",
            DatasetKind::Diagnostic => "wdbc.data",
            DatasetKind::Prognostic => "wpbc.data",
        }
    }

    pub fn path_in(self, dir: &Path) -> PathBuf {
        dir.join(self.file_name())
    }

    fn field_count(self) -> usize {
        match self {
            DatasetKind::Original => 11,
            DatasetKind::Diagnostic => 32,
            DatasetKind::Prognostic => 35,
        }
    }

    fn provenance(self) -> Provenance {
        match self {
            DatasetKind::Original => Provenance::Original,
            DatasetKind::Diagnostic => Provenance::Diagnostic,
            DatasetKind::Prognostic => Provenance::Prognostic,
        }
    }

    pub fn feature_names(self) -> Vec<String> {
        match self {
            DatasetKind::Original => [
                "clump_thickness",
                "uniformity_cell_size",
                "uniformity_cell_shape",
                "marginal_adhesion",
                "single_epithelial_cell_size",
                "bare_nuclei",
                "bland_chromatin",
                "normal_nucleoli",
                "mitoses",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            DatasetKind::Diagnostic => nucleus_features(),
            DatasetKind::Prognostic => {
                let mut names = vec!["time".to_string()];
                names.extend(nucleus_features());
                names.push("tumor_size".to_string());
                names
            }
        }
    }

    fn parse_label(self, token: &str) -> Option<u8> {
        match (self, token) {
            (DatasetKind::Original, "2") => Some(NEGATIVE),
            (DatasetKind::Original, "4") => Some(POSITIVE),
            (DatasetKind::Diagnostic, "B") => Some(NEGATIVE),
            (DatasetKind::Diagnostic, "M") => Some(POSITIVE),
            (DatasetKind::Prognostic, "N") => Some(NEGATIVE),
            (DatasetKind::Prognostic, "R") => Some(POSITIVE),
            _ => None,
        }
    }

    /// (label column, predictor columns) as field indices.
    fn columns(self) -> (usize, std::ops::Range<usize>) {
        match self {
            DatasetKind::Original => (10, 1..10),
            DatasetKind::Diagnostic => (1, 2..32),
            DatasetKind::Prognostic => (1, 2..34),
        }
    }
}

fn nucleus_features() -> Vec<String> {
    const BASE: [&str; 10] = [
        "radius",
        "texture",
        "perimeter",
        "area",
        "smoothness",
        "compactness",
        "concavity",
        "concave_points",
        "symmetry",
        "fractal_dimension",
    ];
    ["mean", "se", "worst"]
        .iter()
        .flat_map(|stat| BASE.iter().map(move |b| format!("{b}_{stat}")))
        .collect()
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "wbcd" => Ok(DatasetKind::Original),
            "diagnostic" | "wdbc" => Ok(DatasetKind::Diagnostic),
            "prognostic" | "wpbc" => Ok(DatasetKind::Prognostic),
            other => Err(Error::config(format!("unknown dataset `{other}`"))),
        }
    }
}

/// Row and class counts observed while loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadSummary {
    pub raw_rows: usize,
    pub dropped_rows: usize,
    /// `[negative, positive]` before dropping incomplete rows.
    pub raw_class_counts: [usize; 2],
    /// `[negative, positive]` after cleaning.
    pub class_counts: [usize; 2],
}

impl LoadSummary {
    pub fn kept_rows(&self) -> usize {
        self.raw_rows - self.dropped_rows
    }
}

impl fmt::Display for LoadSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} rows ({} after cleaning), classes {} vs {}",
            self.raw_rows,
            self.kept_rows(),
            self.class_counts[0],
            self.class_counts[1]
        )
    }
}

pub fn load_wbcd(path: &Path, kind: DatasetKind) -> Result<(Dataset, LoadSummary)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_wbcd(file, kind, path)
}

/// Parses UCI-layout text. `origin` is only used in error messages.
pub fn parse_wbcd<R: Read>(reader: R, kind: DatasetKind, origin: &Path) -> Result<(Dataset, LoadSummary)> {
    let (label_col, predictors) = kind.columns();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut raw_rows = 0;
    let mut raw_counts = [0usize; 2];
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != kind.field_count() {
            return Err(parse_err(
                lineno,
                format!("expected {} fields, found {}", kind.field_count(), fields.len()),
            ));
        }
        raw_rows += 1;
        let label = kind.parse_label(fields[label_col]).ok_or_else(|| {
            Error::Data(format!(
                "{}:{lineno}: unknown {} label `{}`",
                origin.display(),
                kind,
                fields[label_col]
            ))
        })?;
        raw_counts[label as usize] += 1;

        if fields.contains(&"?") {
            continue;
        }
        let mut row = Vec::with_capacity(predictors.len());
        for col in predictors.clone() {
            let v: f64 = fields[col].parse().map_err(|_| {
                parse_err(lineno, format!("field {} is not a number: `{}`", col + 1, fields[col]))
            })?;
            row.push(v);
        }
        rows.push(row);
        labels.push(label);
    }

    let dropped = raw_rows - rows.len();
    let ds = Dataset::from_rows(rows, labels, kind.feature_names(), kind.provenance())?;
    let summary = LoadSummary {
        raw_rows,
        dropped_rows: dropped,
        raw_class_counts: raw_counts,
        class_counts: ds.class_counts(),
    };
    log::info!("loaded {kind} data from {}: {summary}", origin.display());
    Ok((ds, summary))
}
