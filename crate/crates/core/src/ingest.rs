//! Expression matrices and class labels read from delimited text.
//!
//! Layout follows the usual microarray distribution format: the first row
//! holds a corner label followed by the sample ids, every following row holds
//! a gene id followed by one numeric cell per sample. Tab and comma
//! delimiters are detected from the header row. LF and CRLF both work.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView1, ArrayView2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Row numbers are 1-based data rows; `line` is the 1-based physical line.
    #[error("parse error at data row {row} (line {line}): {message}")]
    Parse {
        row: usize,
        line: usize,
        message: String,
    },
    /// `row` is the 1-based gene row, `column` the 1-based sample column.
    #[error(
        "data error at data row {row}, column {column}: cannot read {value:?} as a finite number"
    )]
    Data {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("degenerate labels: need at least 2 classes, found {found}")]
    DegenerateLabels { found: usize },
}

pub type Result<T> = std::result::Result<T, IngestError>;

/// Field separator of a delimited text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    /// Tab if the header row contains one, comma otherwise.
    #[default]
    Auto,
    Tab,
    Comma,
}

impl Delimiter {
    fn resolve(self, header: &str) -> char {
        match self {
            Delimiter::Tab => '\t',
            Delimiter::Comma => ',',
            Delimiter::Auto => {
                if header.contains('\t') {
                    '\t'
                } else {
                    ','
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub delimiter: Delimiter,
    /// Whether the first line is a header. For matrices the header carries the
    /// sample ids; without one, samples are named `sample_1`, `sample_2`, ...
    /// For label files the header line is skipped.
    pub header: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: Delimiter::Auto,
            header: true,
        }
    }
}

/// Genes × samples matrix of finite expression values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    gene_ids: Vec<String>,
    sample_ids: Vec<String>,
    values: Array2<f64>,
}

impl ExpressionMatrix {
    pub fn new(
        gene_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Array2<f64>,
    ) -> Result<Self> {
        if values.nrows() != gene_ids.len() || values.ncols() != sample_ids.len() {
            return Err(IngestError::Validation(format!(
                "values are {}x{} but there are {} gene ids and {} sample ids",
                values.nrows(),
                values.ncols(),
                gene_ids.len(),
                sample_ids.len()
            )));
        }
        check_unique("gene", &gene_ids)?;
        check_unique("sample", &sample_ids)?;
        if let Some(((i, j), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(IngestError::Data {
                row: i + 1,
                column: j + 1,
                value: v.to_string(),
            });
        }
        Ok(ExpressionMatrix {
            gene_ids,
            sample_ids,
            values,
        })
    }

    pub fn gene_ids(&self) -> &[String] {
        &self.gene_ids
    }

    pub fn sample_ids(&self) -> &[String] {
        &self.sample_ids
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn n_genes(&self) -> usize {
        self.gene_ids.len()
    }

    pub fn n_samples(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn gene_row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// Sub-matrix holding the given gene rows, in the order given.
    pub fn select_genes(&self, rows: &[usize]) -> ExpressionMatrix {
        let values = self.values.select(ndarray::Axis(0), rows);
        ExpressionMatrix {
            gene_ids: rows.iter().map(|&i| self.gene_ids[i].clone()).collect(),
            sample_ids: self.sample_ids.clone(),
            values,
        }
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<String>, Array2<f64>) {
        (self.gene_ids, self.sample_ids, self.values)
    }
}

fn check_unique(what: &str, ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(IngestError::Validation(format!(
                "duplicate {what} id {id:?}"
            )));
        }
    }
    Ok(())
}

/// Non-blank lines with their 1-based line numbers, line endings stripped.
fn lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, line)| {
            line.map(|mut l| {
                if l.ends_with('\r') {
                    l.pop();
                }
                (i + 1, l)
            })
            .map_err(IngestError::from)
        })
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

fn parse_cell(cell: &str, row: usize, column: usize) -> Result<f64> {
    let trimmed = cell.trim();
    match trimmed.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(IngestError::Data {
            row,
            column,
            value: trimmed.to_string(),
        }),
    }
}

pub fn parse_matrix<R: BufRead>(reader: R, options: ParseOptions) -> Result<ExpressionMatrix> {
    let mut lines = lines(reader).peekable();

    let mut delimiter = None;
    let mut sample_ids = None;
    if options.header {
        let (_, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| IngestError::Validation("empty input: missing header row".into()))?;
        let d = options.delimiter.resolve(&header);
        sample_ids = Some(
            header
                .split(d)
                .skip(1)
                .map(|s| s.trim().to_string())
                .collect::<Vec<_>>(),
        );
        delimiter = Some(d);
    }

    let mut gene_ids = Vec::new();
    let mut cells = Vec::new();
    let mut width = sample_ids.as_ref().map(Vec::len);
    for (row_idx, line) in lines.enumerate() {
        let (line_no, text) = line?;
        let row = row_idx + 1;
        let d = *delimiter.get_or_insert_with(|| options.delimiter.resolve(&text));
        let mut fields = text.split(d);
        let gene = fields.next().unwrap_or_default().trim().to_string();
        let row_cells: Vec<&str> = fields.collect();
        let expected = *width.get_or_insert(row_cells.len());
        if row_cells.len() != expected {
            return Err(IngestError::Parse {
                row,
                line: line_no,
                message: format!(
                    "expected {} data cells, found {}",
                    expected,
                    row_cells.len()
                ),
            });
        }
        for (j, cell) in row_cells.iter().enumerate() {
            cells.push(parse_cell(cell, row, j + 1)?);
        }
        gene_ids.push(gene);
    }

    let m = width.unwrap_or(0);
    let sample_ids = sample_ids.unwrap_or_else(|| (1..=m).map(|j| format!("sample_{j}")).collect());
    let values = Array2::from_shape_vec((gene_ids.len(), m), cells)
        .expect("cell count matches row count times width");
    ExpressionMatrix::new(gene_ids, sample_ids, values)
}

/// Writes `matrix` in the layout accepted by [`parse_matrix`]. Values use the
/// shortest decimal form that reads back to the same `f64`.
pub fn write_matrix<W: Write>(
    matrix: &ExpressionMatrix,
    mut out: W,
    delimiter: char,
) -> Result<()> {
    write!(out, "gene_id")?;
    for s in &matrix.sample_ids {
        write!(out, "{delimiter}{s}")?;
    }
    writeln!(out)?;
    for (gene, row) in matrix.gene_ids.iter().zip(matrix.values.rows()) {
        write!(out, "{gene}")?;
        for v in row {
            write!(out, "{delimiter}{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Class tag of every sample of a companion [`ExpressionMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLabels {
    /// Sample id → class tag.
    labels: BTreeMap<String, String>,
    /// Distinct tags in order of first appearance along the matrix sample axis.
    classes: Vec<String>,
    /// Class index per matrix sample column.
    codes: Vec<usize>,
}

impl ClassLabels {
    /// Builds labels aligned with `sample_ids`. Every sample must be covered
    /// exactly once and no unknown samples may appear.
    pub fn new<I>(pairs: I, sample_ids: &[String]) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let known: HashSet<&str> = sample_ids.iter().map(String::as_str).collect();
        let mut labels = BTreeMap::new();
        for (sample, class) in pairs {
            if !known.contains(sample.as_str()) {
                return Err(IngestError::Validation(format!(
                    "label for unknown sample id {sample:?}"
                )));
            }
            if labels.insert(sample.clone(), class).is_some() {
                return Err(IngestError::Validation(format!(
                    "sample id {sample:?} is labelled more than once"
                )));
            }
        }
        let mut classes: Vec<String> = Vec::new();
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut codes = Vec::with_capacity(sample_ids.len());
        for sample in sample_ids {
            let class = labels.get(sample).ok_or_else(|| {
                IngestError::Validation(format!("sample id {sample:?} has no label"))
            })?;
            let code = *index.entry(class.as_str()).or_insert_with(|| {
                classes.push(class.clone());
                classes.len() - 1
            });
            codes.push(code);
        }
        if classes.len() < 2 {
            return Err(IngestError::DegenerateLabels {
                found: classes.len(),
            });
        }
        Ok(ClassLabels {
            labels,
            classes,
            codes,
        })
    }

    pub fn get(&self, sample_id: &str) -> Option<&str> {
        self.labels.get(sample_id).map(String::as_str)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Class index of each sample column, aligned with the matrix.
    pub fn codes(&self) -> &[usize] {
        &self.codes
    }
}

/// Reads a two-column `sample_id <delim> class` file and aligns it with
/// `matrix`.
pub fn parse_labels<R: BufRead>(
    reader: R,
    matrix: &ExpressionMatrix,
    options: ParseOptions,
) -> Result<ClassLabels> {
    let mut pairs = Vec::new();
    let mut delimiter = None;
    for (idx, line) in lines(reader).enumerate() {
        let (line_no, text) = line?;
        if options.header && idx == 0 {
            continue;
        }
        let d = *delimiter.get_or_insert_with(|| options.delimiter.resolve(&text));
        let fields: Vec<&str> = text.split(d).map(str::trim).collect();
        if fields.len() != 2 {
            return Err(IngestError::Parse {
                row: pairs.len() + 1,
                line: line_no,
                message: format!(
                    "expected 2 fields (sample_id, class), found {}",
                    fields.len()
                ),
            });
        }
        pairs.push((fields[0].to_string(), fields[1].to_string()));
    }
    ClassLabels::new(pairs, matrix.sample_ids())
}
