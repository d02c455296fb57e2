//! Metric fields: symmetric component matrices carrying first and second
//! partial derivatives through [`Jet2`] entries.

use thiserror::Error;

use crate::jet::{EvalError, Jet2};
use crate::linalg;

/// Sign class of a metric field.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Signature {
    Riemannian,
    /// Index −++…+ (exactly one negative eigenvalue).
    Lorentzian,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("metric is singular at the queried point")]
    SingularMetric,
    #[error("frame vectors are linearly dependent at the queried point")]
    DegenerateFrame,
    #[error("point dimension {got} does not match metric dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("component evaluation failed: {0}")]
    Eval(#[from] EvalError),
}

/// Symmetric matrix of metric components as second-order jets: values,
/// ∂ₖ g_ij, and ∂ₖ∂ₗ g_ij.
#[derive(Clone, Debug)]
pub struct MetricComponents {
    dim: usize,
    entries: Vec<Jet2>,
}

impl MetricComponents {
    /// Start from the zero matrix; fill entries with [`set`](Self::set).
    pub fn zeros(dim: usize) -> Self {
        MetricComponents {
            dim,
            entries: vec![Jet2::constant(dim, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Set g_ij and g_ji to the same jet, keeping the matrix symmetric by
    /// construction.
    pub fn set(&mut self, i: usize, j: usize, jet: Jet2) {
        debug_assert_eq!(jet.dim(), self.dim);
        self.entries[j * self.dim + i] = jet.clone();
        self.entries[i * self.dim + j] = jet;
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet2 {
        &self.entries[i * self.dim + j]
    }

    /// Component values as a dense row-major matrix.
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(Jet2::value).collect()
    }

    /// First derivatives: `dg[k][i][j] = ∂ₖ g_ij`, flattened row-major.
    pub fn first_derivatives(&self) -> Vec<f64> {
        let n = self.dim;
        let mut dg = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                let grad = self.get(i, j).gradient();
                for k in 0..n {
                    dg[(k * n + i) * n + j] = grad[k];
                }
            }
        }
        dg
    }

    /// Second derivatives: `d2g[k][l][i][j] = ∂ₖ∂ₗ g_ij`, flattened.
    pub fn second_derivatives(&self) -> Vec<f64> {
        let n = self.dim;
        let mut d2g = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                let jet = self.get(i, j);
                for k in 0..n {
                    for l in 0..n {
                        d2g[((k * n + l) * n + i) * n + j] = jet.hessian(k, l);
                    }
                }
            }
        }
        d2g
    }

    /// Inverse of the component value matrix.
    pub fn inverse_values(&self) -> Result<Vec<f64>, GeometryError> {
        linalg::invert(self.dim, &self.values()).ok_or(GeometryError::SingularMetric)
    }
}

/// A metric field: any map from a chart point to symmetric components with
/// second-order derivative access.
pub trait Metric: Sync {
    fn dim(&self) -> usize;
    fn signature(&self) -> Signature;
    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError>;

    /// Inner product of two tangent vectors at `point`.
    fn inner(&self, point: &[f64], a: &[f64], b: &[f64]) -> Result<f64, GeometryError> {
        let g = self.components(point)?;
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += g.get(i, j).value() * a[i] * b[j];
            }
        }
        Ok(s)
    }
}

/// Check that the eigenvalue signs of the component matrix at `point` match
/// the declared signature tag.
pub fn signature_consistent_at(metric: &dyn Metric, point: &[f64]) -> Result<bool, GeometryError> {
    let g = metric.components(point)?;
    let eig = linalg::sym_eigenvalues(metric.dim(), &g.values());
    let negatives = eig.iter().filter(|e| **e < 0.0).count();
    let nonsingular = eig.iter().all(|e| e.abs() > linalg::SINGULARITY_TOL);
    Ok(nonsingular
        && match metric.signature() {
            Signature::Riemannian => negatives == 0,
            Signature::Lorentzian => negatives == 1,
        })
}

/// Metric with constant components; useful for flat spaces and fixtures.
#[derive(Clone, Debug)]
pub struct ConstantMetric {
    dim: usize,
    signature: Signature,
    values: Vec<f64>,
}

impl ConstantMetric {
    pub fn new(dim: usize, signature: Signature, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), dim * dim);
        ConstantMetric {
            dim,
            signature,
            values,
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        ConstantMetric::new(dim, Signature::Riemannian, linalg::identity(dim))
    }
}

impl Metric for ConstantMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn signature(&self) -> Signature {
        self.signature
    }

    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError> {
        if point.len() != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut g = MetricComponents::zeros(self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                g.set(i, j, Jet2::constant(self.dim, self.values[i * self.dim + j]));
            }
        }
        Ok(g)
    }
}
