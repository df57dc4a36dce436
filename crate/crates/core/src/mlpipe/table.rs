use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::MlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Regression,
    /// Integer-valued class labels.
    Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    values: Vec<f64>,
    kind: TargetKind,
}

/// Most distinct integer values a target may have to be inferred as classes.
const MAX_INFERRED_CLASSES: usize = 10;

impl Target {
    pub fn new(values: Vec<f64>, kind: TargetKind) -> Result<Self, MlError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(MlError::Schema("target values must be finite".into()));
        }
        if kind == TargetKind::Classification && values.iter().any(|v| v.fract() != 0.0) {
            return Err(MlError::Schema("class labels must be integers".into()));
        }
        Ok(Self { values, kind })
    }

    pub fn regression(values: Vec<f64>) -> Result<Self, MlError> {
        Self::new(values, TargetKind::Regression)
    }

    pub fn classification(values: Vec<f64>) -> Result<Self, MlError> {
        Self::new(values, TargetKind::Classification)
    }

    /// Classification when every value is an integer and there are at most
    /// ten distinct values, regression otherwise.
    pub fn inferred(values: Vec<f64>) -> Result<Self, MlError> {
        let integral = values.iter().all(|v| v.is_finite() && v.fract() == 0.0);
        let kind = if integral && distinct(&values).len() <= MAX_INFERRED_CLASSES {
            TargetKind::Classification
        } else {
            TargetKind::Regression
        };
        Self::new(values, kind)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }

    pub fn is_classification(&self) -> bool {
        self.kind == TargetKind::Classification
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted distinct values.
    pub fn classes(&self) -> Vec<f64> {
        distinct(&self.values)
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            values: rows.iter().map(|&i| self.values[i]).collect(),
            kind: self.kind,
        }
    }
}

fn distinct(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Named feature columns over identified rows, with an optional target.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    column_names: Vec<String>,
    row_ids: Vec<String>,
    data: DMatrix<f64>,
    target: Option<Target>,
}

const ROW_ID: &str = "row_id";
const TARGET: &str = "target";

impl FeatureTable {
    pub fn new(
        row_ids: Vec<String>,
        column_names: Vec<String>,
        data: DMatrix<f64>,
        target: Option<Target>,
    ) -> Result<Self, MlError> {
        if data.nrows() != row_ids.len() || data.ncols() != column_names.len() {
            return Err(MlError::Schema(format!(
                "data is {}x{} but there are {} row ids and {} column names",
                data.nrows(),
                data.ncols(),
                row_ids.len(),
                column_names.len()
            )));
        }
        if let Some(d) = first_duplicate(&column_names) {
            return Err(MlError::Schema(format!("duplicate column '{d}'")));
        }
        if let Some(d) = first_duplicate(&row_ids) {
            return Err(MlError::Schema(format!("duplicate row id '{d}'")));
        }
        if let Some(c) = column_names.iter().find(|c| *c == ROW_ID || *c == TARGET) {
            return Err(MlError::Schema(format!("'{c}' is a reserved column name")));
        }
        if target.as_ref().is_some_and(|t| t.len() != row_ids.len()) {
            return Err(MlError::Schema("target length differs from row count".into()));
        }
        Ok(Self {
            column_names,
            row_ids,
            data,
            target,
        })
    }

    /// Builds a table from row-major values with generated row ids `r0, r1, ..`.
    pub fn from_rows(
        column_names: &[&str],
        rows: &[Vec<f64>],
        target: Option<Target>,
    ) -> Result<Self, MlError> {
        let p = column_names.len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(MlError::Schema("ragged rows".into()));
        }
        Self::new(
            (0..rows.len()).map(|i| format!("r{i}")).collect(),
            column_names.iter().map(|s| s.to_string()).collect(),
            DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]),
            target,
        )
    }

    /// Builds a table from columns with generated names `x0, x1, ..`.
    pub fn from_columns(columns: &[Vec<f64>], target: Option<Target>) -> Result<Self, MlError> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(MlError::Schema("columns differ in length".into()));
        }
        Self::new(
            (0..n).map(|i| format!("r{i}")).collect(),
            (0..columns.len()).map(|j| format!("x{j}")).collect(),
            DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]),
            target,
        )
    }

    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn target(&self) -> Option<&Target> {
        self.target.as_ref()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.data.column(j).iter().copied().collect()
    }

    pub fn with_target(mut self, target: Option<Target>) -> Result<Self, MlError> {
        if target.as_ref().is_some_and(|t| t.len() != self.n_rows()) {
            return Err(MlError::Schema("target length differs from row count".into()));
        }
        self.target = target;
        Ok(self)
    }

    /// Same rows and target with new data and column names.
    pub fn with_data(&self, column_names: Vec<String>, data: DMatrix<f64>) -> Result<Self, MlError> {
        Self::new(self.row_ids.clone(), column_names, data, self.target.clone())
    }

    /// The named columns, in the order given.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Self, MlError> {
        let idx = names
            .iter()
            .map(|n| {
                self.column_index(n.as_ref())
                    .ok_or_else(|| MlError::Schema(format!("no column '{}'", n.as_ref())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let data = DMatrix::from_fn(self.n_rows(), idx.len(), |i, j| self.data[(i, idx[j])]);
        self.with_data(idx.iter().map(|&j| self.column_names[j].clone()).collect(), data)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            column_names: self.column_names.clone(),
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            data: DMatrix::from_fn(rows.len(), self.n_cols(), |i, j| self.data[(rows[i], j)]),
            target: self.target.as_ref().map(|t| t.subset(rows)),
        }
    }

    /// The target, or an error naming what needed it.
    pub fn require_target(&self) -> Result<&Target, MlError> {
        self.target.as_ref().ok_or(MlError::MissingTarget)
    }

    pub fn read_csv(path: &Path, kind: Option<TargetKind>) -> Result<Self, MlError> {
        Self::read_csv_from(std::fs::File::open(path)?, kind)
    }

    /// Reads `row_id,<features..>[,target]`. Empty cells and `NaN` are
    /// missing values. Without an explicit kind the target kind is inferred.
    pub fn read_csv_from<R: Read>(reader: R, kind: Option<TargetKind>) -> Result<Self, MlError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.first().map(String::as_str) != Some(ROW_ID) {
            return Err(MlError::Schema(format!("first column must be '{ROW_ID}'")));
        }
        let has_target = header.len() > 1 && header.last().map(String::as_str) == Some(TARGET);
        let feat_end = if has_target { header.len() - 1 } else { header.len() };
        let names = header[1..feat_end].to_vec();
        let mut row_ids = Vec::new();
        let mut values = Vec::new();
        let mut target = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<f64, MlError> {
                let s = rec[j].trim();
                if s.is_empty() {
                    return Ok(f64::NAN);
                }
                s.parse::<f64>().map_err(|_| {
                    MlError::Schema(format!("row {} column '{}': bad number {s:?}", i + 2, header[j]))
                })
            };
            row_ids.push(rec[0].to_string());
            for j in 1..feat_end {
                values.push(parse(j)?);
            }
            if has_target {
                target.push(parse(feat_end)?);
            }
        }
        let n = row_ids.len();
        let p = names.len();
        let data = DMatrix::from_row_slice(n, p, &values);
        let target = if has_target {
            Some(match kind {
                Some(k) => Target::new(target, k)?,
                None => Target::inferred(target)?,
            })
        } else {
            None
        };
        Self::new(row_ids, names, data, target)
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), MlError> {
        let mut f = std::fs::File::create(path)?;
        self.write_csv_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Writes `row_id,<features..>[,target]`. Numbers use the shortest
    /// representation that parses back to the same value.
    pub fn write_csv_to<W: Write>(&self, writer: W) -> Result<(), MlError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![ROW_ID.to_string()];
        header.extend(self.column_names.iter().cloned());
        if self.target.is_some() {
            header.push(TARGET.to_string());
        }
        w.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut rec = vec![self.row_ids[i].clone()];
            rec.extend((0..self.n_cols()).map(|j| self.data[(i, j)].to_string()));
            if let Some(t) = &self.target {
                rec.push(t.values[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn first_duplicate(names: &[String]) -> Option<&String> {
    let mut seen = HashSet::new();
    names.iter().find(|n| !seen.insert(n.as_str()))
}
