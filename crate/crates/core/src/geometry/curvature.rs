//! Coordinate tensor calculus: Christoffel symbols, Riemann, Ricci, and
//! scalar curvature for any [`Metric`].
//!
//! Sign conventions (fixed for the whole crate):
//!
//! * `Γᵏ_ij = ½ gᵏᵐ (∂ᵢ g_mj + ∂ⱼ g_mi − ∂ₘ g_ij)`;
//! * `Rᵐ_ijk = ∂ᵢΓᵐ_jk − ∂ⱼΓᵐ_ik + Γᵐ_ip Γᵖ_jk − Γᵐ_jp Γᵖ_ik`, so that the
//!   lowered tensor is `R(X,Y,Z,W) = g(∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z, W)`
//!   with `R_ijkl = g_lm Rᵐ_ijk`;
//! * `Ric_jk = gⁱˡ R_ijkl` and `scal = gʲᵏ Ric_jk`.
//!
//! Derivatives of Christoffel symbols come from the jet-carried second
//! derivatives of the metric components, not from a finite-difference layer,
//! so curvature is exact (up to rounding) for polynomial profiles.

use crate::geometry::metric::{GeometryError, Metric, MetricComponents};
use crate::linalg;

/// Christoffel symbols `Γᵏ_ij` at a point, symmetric in the lower pair.
#[derive(Clone, Debug)]
pub struct ChristoffelData {
    pub point: Vec<f64>,
    dim: usize,
    gamma: Vec<f64>,
}

impl ChristoffelData {
    /// Assemble from a dense `[k][i][j]` array; used by closed-form routes.
    pub(crate) fn from_dense(point: Vec<f64>, dim: usize, gamma: Vec<f64>) -> Self {
        debug_assert_eq!(gamma.len(), dim * dim * dim);
        ChristoffelData { point, dim, gamma }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Γᵏ_ij`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.gamma[(k * self.dim + i) * self.dim + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.gamma.iter().fold(0.0_f64, |m, g| m.max(g.abs()))
    }
}

/// Lowered Riemann tensor, Ricci tensor, and scalar curvature at a point.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub point: Vec<f64>,
    dim: usize,
    riemann: Vec<f64>,
    pub ricci: Vec<f64>,
    pub scalar: f64,
}

impl CurvatureData {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fully lowered `R_ijkl`.
    pub fn riemann(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.dim;
        self.riemann[((i * n + j) * n + k) * n + l]
    }

    pub fn ricci(&self, i: usize, j: usize) -> f64 {
        self.ricci[i * self.dim + j]
    }

    pub fn max_abs_riemann(&self) -> f64 {
        self.riemann.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn max_abs_ricci(&self) -> f64 {
        self.ricci.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }
}

struct GammaJet {
    dim: usize,
    /// Γᵏ_ij values.
    value: Vec<f64>,
    /// ∂ᵢ Γᵏ_jk, indexed `[d][k][i][j]`.
    deriv: Vec<f64>,
}

/// Γ and ∂Γ from jet-carried metric components.
fn christoffel_jet(g: &MetricComponents) -> Result<GammaJet, GeometryError> {
    let n = g.dim();
    let ginv = g.inverse_values()?;
    let dg = g.first_derivatives();
    let d2g = g.second_derivatives();

    // ∂_d g⁻¹ = −g⁻¹ (∂_d g) g⁻¹
    let mut dginv = vec![0.0; n * n * n];
    for d in 0..n {
        let dgd = &dg[d * n * n..(d + 1) * n * n];
        let tmp = linalg::matmul(n, &ginv, dgd);
        let prod = linalg::matmul(n, &tmp, &ginv);
        for e in 0..n * n {
            dginv[d * n * n + e] = -prod[e];
        }
    }

    let dg_at = |k: usize, i: usize, j: usize| dg[(k * n + i) * n + j];
    let d2g_at = |k: usize, l: usize, i: usize, j: usize| d2g[((k * n + l) * n + i) * n + j];
    // bracket_{m,ij} = ∂ᵢ g_mj + ∂ⱼ g_mi − ∂ₘ g_ij
    let bracket = |m: usize, i: usize, j: usize| dg_at(i, m, j) + dg_at(j, m, i) - dg_at(m, i, j);
    // ∂_d bracket_{m,ij}
    let dbracket = |d: usize, m: usize, i: usize, j: usize| {
        d2g_at(d, i, m, j) + d2g_at(d, j, m, i) - d2g_at(d, m, i, j)
    };

    let mut value = vec![0.0; n * n * n];
    let mut deriv = vec![0.0; n * n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut v = 0.0;
                for m in 0..n {
                    v += ginv[k * n + m] * bracket(m, i, j);
                }
                v *= 0.5;
                value[(k * n + i) * n + j] = v;
                value[(k * n + j) * n + i] = v;
                for d in 0..n {
                    let mut dv = 0.0;
                    for m in 0..n {
                        dv += dginv[(d * n + k) * n + m] * bracket(m, i, j)
                            + ginv[k * n + m] * dbracket(d, m, i, j);
                    }
                    dv *= 0.5;
                    deriv[((d * n + k) * n + i) * n + j] = dv;
                    deriv[((d * n + k) * n + j) * n + i] = dv;
                }
            }
        }
    }
    Ok(GammaJet { dim: n, value, deriv })
}

/// Christoffel symbols of `metric` at `point`.
pub fn christoffel<M: Metric + ?Sized>(
    metric: &M,
    point: &[f64],
) -> Result<ChristoffelData, GeometryError> {
    let g = metric.components(point)?;
    let jet = christoffel_jet(&g)?;
    Ok(ChristoffelData {
        point: point.to_vec(),
        dim: jet.dim,
        gamma: jet.value,
    })
}

/// Full curvature data of `metric` at `point`.
pub fn riemann<M: Metric + ?Sized>(
    metric: &M,
    point: &[f64],
) -> Result<CurvatureData, GeometryError> {
    let g = metric.components(point)?;
    let n = g.dim();
    let gv = g.values();
    let ginv = g.inverse_values()?;
    let gamma = christoffel_jet(&g)?;

    let gma = |k: usize, i: usize, j: usize| gamma.value[(k * n + i) * n + j];
    let dgma = |d: usize, k: usize, i: usize, j: usize| gamma.deriv[((d * n + k) * n + i) * n + j];

    // Rᵐ_ijk, then lower the upper index with g.
    let mut upper = vec![0.0; n * n * n * n];
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = dgma(i, m, j, k) - dgma(j, m, i, k);
                    for p in 0..n {
                        r += gma(m, i, p) * gma(p, j, k) - gma(m, j, p) * gma(p, i, k);
                    }
                    upper[((m * n + i) * n + j) * n + k] = r;
                }
            }
        }
    }

    let mut riem = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut r = 0.0;
                    for m in 0..n {
                        r += gv[l * n + m] * upper[((m * n + i) * n + j) * n + k];
                    }
                    riem[((i * n + j) * n + k) * n + l] = r;
                }
            }
        }
    }

    // Ric_jk = gⁱˡ R_ijkl
    let mut ricci = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            let mut r = 0.0;
            for i in 0..n {
                for l in 0..n {
                    r += ginv[i * n + l] * riem[((i * n + j) * n + k) * n + l];
                }
            }
            ricci[j * n + k] = r;
        }
    }

    let mut scalar = 0.0;
    for j in 0..n {
        for k in 0..n {
            scalar += ginv[j * n + k] * ricci[j * n + k];
        }
    }

    Ok(CurvatureData {
        point: point.to_vec(),
        dim: n,
        riemann: riem,
        ricci,
        scalar,
    })
}

/// Ricci tensor (row-major coordinate components) and scalar curvature.
pub fn ricci_scalar<M: Metric + ?Sized>(
    metric: &M,
    point: &[f64],
) -> Result<(Vec<f64>, f64), GeometryError> {
    let c = riemann(metric, point)?;
    Ok((c.ricci, c.scalar))
}

/// Geodesic acceleration `−Γᵏ_ij ẋⁱ ẋʲ` for any metric. Serves as the
/// generic route that closed-form geodesic systems are checked against.
pub fn geodesic_acceleration<M: Metric + ?Sized>(
    metric: &M,
    position: &[f64],
    velocity: &[f64],
) -> Result<Vec<f64>, GeometryError> {
    let n = metric.dim();
    let gamma = christoffel(metric, position)?;
    let mut acc = vec![0.0; n];
    for k in 0..n {
        let mut a = 0.0;
        for i in 0..n {
            for j in 0..n {
                a += gamma.get(k, i, j) * velocity[i] * velocity[j];
            }
        }
        acc[k] = -a;
    }
    Ok(acc)
}
