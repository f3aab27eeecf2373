//! Fuzzification with S/Z-shaped membership functions and the fuzzy soft set
//! similarity `1 - Σ|x_j - z_j| / Σ(x_j + z_j)`.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::Serialize;
use thiserror::Error;

use crate::ingest::ExpressionMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum FuzzyError {
    #[error("shape error: vectors of length {left} and {right}")]
    Shape { left: usize, right: usize },
    #[error("invalid membership shape: lower knot {a} exceeds upper knot {b}")]
    Knots { a: f64, b: f64 },
    #[error("membership value {value} at ({row}, {column}) lies outside [0, 1]")]
    Domain {
        row: usize,
        column: usize,
        value: f64,
    },
    #[error("unknown membership kind {0:?} (expected s or z)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipKind {
    /// Rises from 0 at `a` to 1 at `b`.
    #[default]
    S,
    /// Falls from 1 at `a` to 0 at `b`.
    Z,
}

impl fmt::Display for MembershipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MembershipKind::S => "s",
            MembershipKind::Z => "z",
        })
    }
}

impl FromStr for MembershipKind {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "s-shaped" => Ok(MembershipKind::S),
            "z" | "z-shaped" => Ok(MembershipKind::Z),
            other => Err(FuzzyError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipShape {
    kind: MembershipKind,
    a: f64,
    b: f64,
}

impl MembershipShape {
    pub fn new(kind: MembershipKind, a: f64, b: f64) -> Result<Self, FuzzyError> {
        if a.is_nan() || b.is_nan() || a > b {
            return Err(FuzzyError::Knots { a, b });
        }
        Ok(MembershipShape { kind, a, b })
    }

    pub fn kind(&self) -> MembershipKind {
        self.kind
    }

    pub fn knots(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

fn s_curve(x: f64, a: f64, b: f64) -> f64 {
    if x <= a {
        0.0
    } else if x >= b {
        1.0
    } else if x <= (a + b) / 2.0 {
        let t = (x - a) / (b - a);
        2.0 * t * t
    } else {
        let t = (x - b) / (b - a);
        1.0 - 2.0 * t * t
    }
}

/// Membership degree of `x`. Degenerate knots (`a == b`) give full
/// membership everywhere.
pub fn membership(x: f64, shape: MembershipShape) -> f64 {
    let MembershipShape { kind, a, b } = shape;
    if a == b {
        return 1.0;
    }
    match kind {
        MembershipKind::S => s_curve(x, a, b),
        MembershipKind::Z => 1.0 - s_curve(x, a, b),
    }
}

/// Range over which membership knots are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KnotScope {
    /// `a`, `b` = min and max of each sample column.
    #[default]
    PerSample,
    /// `a`, `b` = min and max of each gene row.
    PerGene,
    /// One `a`, `b` over the whole matrix.
    Global,
}

/// Genes × samples membership degrees, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    gene_ids: Vec<String>,
    sample_ids: Vec<String>,
    values: Array2<f64>,
}

impl MembershipMatrix {
    pub fn new(
        gene_ids: Vec<String>,
        sample_ids: Vec<String>,
        values: Array2<f64>,
    ) -> Result<Self, FuzzyError> {
        check_unit_range(values.view())?;
        assert_eq!(
            values.dim(),
            (gene_ids.len(), sample_ids.len()),
            "id/value shape mismatch"
        );
        Ok(MembershipMatrix {
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

    /// The same values as an expression matrix, for export.
    pub fn to_expression_matrix(&self) -> ExpressionMatrix {
        ExpressionMatrix::new(
            self.gene_ids.clone(),
            self.sample_ids.clone(),
            self.values.clone(),
        )
        .expect("membership matrix ids and values are valid")
    }
}

/// Fails with the first entry outside `[0, 1]`.
pub fn check_unit_range(values: ArrayView2<'_, f64>) -> Result<(), FuzzyError> {
    match values
        .indexed_iter()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        Some(((row, column), &value)) => Err(FuzzyError::Domain { row, column, value }),
        None => Ok(()),
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

pub fn fuzzify(matrix: &ExpressionMatrix, kind: MembershipKind) -> MembershipMatrix {
    fuzzify_with(matrix, kind, KnotScope::PerSample)
}

pub fn fuzzify_with(
    matrix: &ExpressionMatrix,
    kind: MembershipKind,
    scope: KnotScope,
) -> MembershipMatrix {
    let raw = matrix.values();
    let mut values = raw.to_owned();
    let shape_for = |(a, b): (f64, f64)| MembershipShape { kind, a, b };
    match scope {
        KnotScope::PerSample => {
            for mut col in values.axis_iter_mut(Axis(1)) {
                let shape = shape_for(extent(col.iter().copied()));
                col.mapv_inplace(|x| membership(x, shape));
            }
        }
        KnotScope::PerGene => {
            for mut row in values.axis_iter_mut(Axis(0)) {
                let shape = shape_for(extent(row.iter().copied()));
                row.mapv_inplace(|x| membership(x, shape));
            }
        }
        KnotScope::Global => {
            let shape = shape_for(extent(raw.iter().copied()));
            values.mapv_inplace(|x| membership(x, shape));
        }
    }
    MembershipMatrix {
        gene_ids: matrix.gene_ids().to_vec(),
        sample_ids: matrix.sample_ids().to_vec(),
        values,
    }
}

/// Fuzzy soft set similarity of two membership vectors. Two all-zero vectors
/// are identical and score 1.
pub fn similarity(x: ArrayView1<'_, f64>, z: ArrayView1<'_, f64>) -> Result<f64, FuzzyError> {
    if x.len() != z.len() {
        return Err(FuzzyError::Shape {
            left: x.len(),
            right: z.len(),
        });
    }
    Ok(similarity_unchecked(x, z))
}

pub(crate) fn similarity_unchecked(x: ArrayView1<'_, f64>, z: ArrayView1<'_, f64>) -> f64 {
    let (diff, total) = x.iter().zip(z.iter()).fold((0.0, 0.0), |(d, t), (&a, &b)| {
        (d + (a - b).abs(), t + (a + b))
    });
    if total == 0.0 {
        1.0
    } else {
        1.0 - diff / total
    }
}

/// Similarity of `gene` to each centroid row.
pub fn similarity_profile(
    gene: ArrayView1<'_, f64>,
    centroids: ArrayView2<'_, f64>,
) -> Result<Vec<f64>, FuzzyError> {
    if centroids.ncols() != gene.len() {
        return Err(FuzzyError::Shape {
            left: gene.len(),
            right: centroids.ncols(),
        });
    }
    Ok(centroids
        .rows()
        .into_iter()
        .map(|c| similarity_unchecked(gene, c))
        .collect())
}
