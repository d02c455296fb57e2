//! The almost-complex structure J, the fundamental 2-form ω = g(·, J·), its
//! exterior derivative, and the Nijenhuis tensor for dual charts.
//!
//! J is defined on the orthonormal frame by JT = Z and JX_{2k−1} = X_{2k}
//! (adjacent transverse pairs). Conjugating through the frame change gives
//! the coordinate action
//!
//! ```text
//! J∂_v = H∂_v − 2∂_u,   J∂_u = ½(H²+1)∂_v − H∂_u,
//! J∂_{2k−1} = ∂_{2k},   J∂_{2k} = −∂_{2k−1},
//! ```
//!
//! under which ω is *constant* in coordinates: ω(∂_v,∂_u) = 1 and
//! ω(∂_{2k−1},∂_{2k}) = −1. Closedness is still verified numerically by
//! pushing jets of H through g·J and assembling dω from the resulting
//! gradients, so a frame-change bug cannot hide behind the constancy
//! argument.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::metric::{GeometryError, Metric};
use crate::jet::{Jet1, Jet2};
use crate::linalg;
use crate::ppwave::DualChart;

/// Gradient threshold below which a sampled chart is classified Kähler-flat.
pub const KAHLER_FLAT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KahlerError {
    #[error("almost complex structure requires even dimension ≥ 4, got {dim}")]
    OddDimension { dim: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// J at a point, as a matrix in the coordinate basis (column j holds the
/// components of J∂_j).
#[derive(Clone, Debug)]
pub struct AlmostComplexStructure {
    pub point: Vec<f64>,
    dim: usize,
    matrix: Vec<f64>,
}

impl AlmostComplexStructure {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major matrix with `m[i][j]` = component i of J∂_j.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Apply J to a tangent vector.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        linalg::matvec(self.dim, &self.matrix, v)
    }

    /// Max-abs residual of J² + I.
    pub fn square_residual(&self) -> f64 {
        let n = self.dim;
        let sq = linalg::matmul(n, &self.matrix, &self.matrix);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { -1.0 } else { 0.0 };
                worst = worst.max((sq[i * n + j] - want).abs());
            }
        }
        worst
    }
}

/// ω at a point as an antisymmetric coordinate matrix (antisymmetry is
/// storage-level: the lower triangle mirrors the negated upper triangle).
#[derive(Clone, Debug)]
pub struct FundamentalForm {
    pub point: Vec<f64>,
    dim: usize,
    matrix: Vec<f64>,
}

impl FundamentalForm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    /// ω(a, b) for tangent vectors.
    pub fn contract(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.matrix[i * n + j] * a[i] * b[j];
            }
        }
        s
    }

    /// Nondegeneracy: determinant of ω (the squared Pfaffian).
    pub fn determinant(&self) -> f64 {
        linalg::det(self.dim, &self.matrix)
    }
}

fn require_even(dim: usize) -> Result<(), KahlerError> {
    if dim % 2 != 0 || dim < 4 {
        return Err(KahlerError::OddDimension { dim });
    }
    Ok(())
}

/// Coordinate matrix of J as jets of H (entries H, ½(H²+1), −H carry their
/// derivatives; transverse pair entries are constants).
fn j_matrix_jets(chart: &DualChart, point: &[f64]) -> Result<Vec<Jet2>, KahlerError> {
    let n = chart.dim();
    require_even(n)?;
    let h = chart.profile_jet(point)?;
    let one = Jet2::constant(n, 1.0);
    let mut m = vec![Jet2::constant(n, 0.0); n * n];
    // Column v.
    m[0] = h.clone();
    m[n] = Jet2::constant(n, -2.0);
    // Column u.
    m[1] = h.mul(&h).add(&one).scale(0.5);
    m[n + 1] = h.neg();
    // Transverse pairs (2,3), (4,5), …
    for k in (2..n).step_by(2) {
        m[(k + 1) * n + k] = Jet2::constant(n, 1.0);
        m[k * n + (k + 1)] = Jet2::constant(n, -1.0);
    }
    Ok(m)
}

/// J at a point for a dual chart.
pub fn build_j(chart: &DualChart, point: &[f64]) -> Result<AlmostComplexStructure, KahlerError> {
    let jets = j_matrix_jets(chart, point)?;
    Ok(AlmostComplexStructure {
        point: point.to_vec(),
        dim: chart.dim(),
        matrix: jets.iter().map(Jet2::value).collect(),
    })
}

/// ω = g(·, J·) at a point.
pub fn build_omega(chart: &DualChart, point: &[f64]) -> Result<FundamentalForm, KahlerError> {
    let n = chart.dim();
    let omega_jets = omega_matrix_jets(chart, point)?;
    let mut matrix = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = omega_jets[i * n + j].value();
            matrix[i * n + j] = v;
            matrix[j * n + i] = -v;
        }
    }
    Ok(FundamentalForm {
        point: point.to_vec(),
        dim: n,
        matrix,
    })
}

/// ω entries as jets: ω_ab = Σ_m g_am J^m_b with every factor carrying H
/// derivatives.
fn omega_matrix_jets(chart: &DualChart, point: &[f64]) -> Result<Vec<Jet2>, KahlerError> {
    let n = chart.dim();
    let j = j_matrix_jets(chart, point)?;
    let g = chart.components(point)?;
    let mut omega = vec![Jet2::constant(n, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut acc = Jet2::constant(n, 0.0);
            for m in 0..n {
                acc = acc.add(&g.get(a, m).mul(&j[m * n + b]));
            }
            omega[a * n + b] = acc;
        }
    }
    Ok(omega)
}

/// Exterior derivative of ω in coordinates, as a dense rank-3 array
/// `(dω)_ijk = ∂ᵢω_jk − ∂ⱼω_ik + ∂ₖω_ij` with the ∂ω entries taken from the
/// jet gradients of the assembled ω. Vanishes identically for dual charts.
pub fn d_omega(chart: &DualChart, point: &[f64]) -> Result<Vec<f64>, KahlerError> {
    let n = chart.dim();
    let omega = omega_matrix_jets(chart, point)?;
    let grad = |d: usize, a: usize, b: usize| omega[a * n + b].gradient()[d];
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out[(i * n + j) * n + k] = grad(i, j, k) - grad(j, i, k) + grad(k, i, j);
            }
        }
    }
    Ok(out)
}

/// Max-abs component of dω at a point.
pub fn d_omega_residual(chart: &DualChart, point: &[f64]) -> Result<f64, KahlerError> {
    Ok(d_omega(chart, point)?
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Vectors that index frame fields or coordinate fields when evaluating
/// brackets and the Nijenhuis tensor.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum BasisVector {
    T,
    /// Transverse frame field X_i for coordinate index i (2-based).
    X(usize),
    Z,
    /// Coordinate field ∂_i.
    Coord(usize),
}

/// Component jets of a basis vector field at a point. Only T and Z have
/// non-constant coefficients (½(H±1) in the v-slot).
fn field_jets(chart: &DualChart, point: &[f64], v: BasisVector) -> Result<Vec<Jet1>, KahlerError> {
    let n = chart.dim();
    let mut comps = vec![Jet1::constant(n, 0.0); n];
    match v {
        BasisVector::T | BasisVector::Z => {
            let h = chart.profile().eval_jet1(point).map_err(GeometryError::from)?;
            let sign = if v == BasisVector::T { 1.0 } else { -1.0 };
            comps[0] = h.add(&Jet1::constant(n, sign)).scale(0.5);
            comps[1] = Jet1::constant(n, -1.0);
        }
        BasisVector::X(i) | BasisVector::Coord(i) => {
            comps[i] = Jet1::constant(n, 1.0);
        }
    }
    Ok(comps)
}

fn apply_j_jets(j: &[Jet1], v: &[Jet1]) -> Vec<Jet1> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = Jet1::constant(n, 0.0);
            for m in 0..n {
                acc = acc.add(&j[i * n + m].mul(&v[m]));
            }
            acc
        })
        .collect()
}

/// Lie bracket values `[A,B]^k = Σ_m A^m ∂_m B^k − B^m ∂_m A^k` from
/// component jets.
fn bracket_values(a: &[Jet1], b: &[Jet1]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|k| {
            let mut s = 0.0;
            for m in 0..n {
                s += a[m].value() * b[k].gradient()[m] - b[m].value() * a[k].gradient()[m];
            }
            s
        })
        .collect()
}

/// Lie bracket of two basis fields, in coordinate components.
pub fn lie_bracket(
    chart: &DualChart,
    point: &[f64],
    a: BasisVector,
    b: BasisVector,
) -> Result<Vec<f64>, KahlerError> {
    let av = field_jets(chart, point, a)?;
    let bv = field_jets(chart, point, b)?;
    Ok(bracket_values(&av, &bv))
}

/// Value of the Nijenhuis tensor on a pair of basis fields, in coordinate
/// components.
#[derive(Clone, Debug)]
pub struct NijenhuisValue {
    pub point: Vec<f64>,
    pub pair: (BasisVector, BasisVector),
    pub components: Vec<f64>,
}

impl NijenhuisValue {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// N_J(a,b) = [Ja,Jb] − J[Ja,b] − J[a,Jb] − [a,b] with brackets from jet
/// derivatives of the frame coefficient functions.
pub fn nijenhuis(
    chart: &DualChart,
    point: &[f64],
    a: BasisVector,
    b: BasisVector,
) -> Result<NijenhuisValue, KahlerError> {
    let n = chart.dim();
    let j2 = j_matrix_jets(chart, point)?;
    let j1: Vec<Jet1> = j2.iter().map(Jet2::to_jet1).collect();
    let j_values: Vec<f64> = j2.iter().map(Jet2::value).collect();

    let av = field_jets(chart, point, a)?;
    let bv = field_jets(chart, point, b)?;
    let ja = apply_j_jets(&j1, &av);
    let jb = apply_j_jets(&j1, &bv);

    let term1 = bracket_values(&ja, &jb);
    let term2 = linalg::matvec(n, &j_values, &bracket_values(&ja, &bv));
    let term3 = linalg::matvec(n, &j_values, &bracket_values(&av, &jb));
    let term4 = bracket_values(&av, &bv);

    let components = (0..n)
        .map(|k| term1[k] - term2[k] - term3[k] - term4[k])
        .collect();
    Ok(NijenhuisValue {
        point: point.to_vec(),
        pair: (a, b),
        components,
    })
}

/// Exterior derivative of ω on a frame triple via the bracket formula
/// dω(a,b,c) = −ω([a,b],c) + ω([a,c],b) − ω([b,c],a), valid because ω is
/// constant on the frame. Independent of the coordinate-jet route.
pub fn d_omega_frame(
    chart: &DualChart,
    point: &[f64],
    a: BasisVector,
    b: BasisVector,
    c: BasisVector,
) -> Result<f64, KahlerError> {
    let omega = build_omega(chart, point)?;
    let val = |v: BasisVector| -> Result<Vec<f64>, KahlerError> {
        Ok(field_jets(chart, point, v)?.iter().map(Jet1::value).collect())
    };
    let ab = lie_bracket(chart, point, a, b)?;
    let ac = lie_bracket(chart, point, a, c)?;
    let bc = lie_bracket(chart, point, b, c)?;
    Ok(-omega.contract(&ab, &val(c)?) + omega.contract(&ac, &val(b)?)
        - omega.contract(&bc, &val(a)?))
}

/// Verdict of the sampled Kähler classification.
#[derive(Clone, Copy, Debug, Deserialize, Eq, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    KahlerFlat,
    StrictlyAlmostKahler,
}

/// Classification report over a sample set; serialized as the module's JSON
/// interface.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ClassificationReport {
    pub profile: String,
    pub samples: usize,
    /// max over samples of max_i |H_i| (transverse gradient).
    pub max_grad_h: f64,
    /// (min, max) of the scalar curvature −½ΣH_i² over samples.
    pub scalar_range: (f64, f64),
    /// max over samples and transverse frame pairs (T, X_i) of |N_J|.
    pub max_nijenhuis: f64,
    pub verdict: Classification,
}

/// Classify a dual chart over sample points: Kähler-flat iff the transverse
/// gradient of H stays below [`KAHLER_FLAT_TOL`] on every sample
/// (equivalently the scalar curvature vanishes there), cross-checked against
/// the Nijenhuis norms.
pub fn classify(chart: &DualChart, points: &[Vec<f64>]) -> Result<ClassificationReport, KahlerError> {
    assert!(!points.is_empty(), "classification needs a nonempty sample");
    let n = chart.dim();
    let mut max_grad: f64 = 0.0;
    let mut scal_min = f64::INFINITY;
    let mut scal_max = f64::NEG_INFINITY;
    let mut max_nij: f64 = 0.0;
    for p in points {
        let h = chart.profile_jet(p)?;
        for i in 2..n {
            max_grad = max_grad.max(h.gradient()[i].abs());
        }
        let scal = chart.scalar_closed_form(p)?;
        scal_min = scal_min.min(scal);
        scal_max = scal_max.max(scal);
        for i in 2..n {
            let nij = nijenhuis(chart, p, BasisVector::T, BasisVector::X(i))?;
            max_nij = max_nij.max(nij.norm());
        }
    }
    let verdict = if max_grad <= KAHLER_FLAT_TOL {
        Classification::KahlerFlat
    } else {
        Classification::StrictlyAlmostKahler
    };
    Ok(ClassificationReport {
        profile: chart.profile_text().to_owned(),
        samples: points.len(),
        max_grad_h: max_grad,
        scalar_range: (scal_min, scal_max),
        max_nijenhuis: max_nij,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppwave::PpWaveChart;
    use crate::sampling;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dual(dim: usize, profile: &str) -> DualChart {
        PpWaveChart::new(dim, profile).unwrap().dual()
    }

    #[test]
    fn j_for_flat_profile() {
        let d = dual(4, "0");
        let j = build_j(&d, &[0.0; 4]).unwrap();
        // J∂_v = −2∂_u, J∂_u = ½∂_v.
        let jv = j.apply(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(jv, vec![0.0, -2.0, 0.0, 0.0]);
        let ju = j.apply(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ju, vec![0.5, 0.0, 0.0, 0.0]);
        let jx3 = j.apply(&[0.0, 0.0, 1.0, 0.0]);
        assert_eq!(jx3, vec![0.0, 0.0, 0.0, 1.0]);
        let jx4 = j.apply(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(jx4, vec![0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn j_squares_to_minus_identity() {
        let d = dual(4, "sin(u)*x3");
        let mut rng = StdRng::seed_from_u64(51);
        for _ in 0..100 {
            let p = sampling::point(&mut rng, 4, -2.0, 2.0);
            let j = build_j(&d, &p).unwrap();
            assert!(j.square_residual() < 1e-12, "residual {}", j.square_residual());
        }
    }

    #[test]
    fn j_is_frame_pairing() {
        // JT = Z and g(JT, JT) = 1.
        let d = dual(4, "x3^2 + u");
        let mut rng = StdRng::seed_from_u64(53);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let f = d.frame(&p).unwrap();
            let j = build_j(&d, &p).unwrap();
            let jt = j.apply(f.t());
            for (a, b) in jt.iter().zip(f.z()) {
                assert_relative_eq!(a, b, epsilon = 1e-12);
            }
            assert_relative_eq!(d.inner(&p, &jt, &jt).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn odd_dimension_rejected() {
        let d = dual(5, "0");
        assert!(matches!(
            build_j(&d, &[0.0; 5]),
            Err(KahlerError::OddDimension { dim: 5 })
        ));
    }

    #[test]
    fn omega_is_constant_in_coordinates() {
        let d = dual(6, "sin(u)*x3 + x4*x5 - cos(x6)");
        let mut rng = StdRng::seed_from_u64(59);
        let base = build_omega(&d, &[0.0; 6]).unwrap();
        for _ in 0..100 {
            let p = sampling::point(&mut rng, 6, -2.0, 2.0);
            let om = build_omega(&d, &p).unwrap();
            for (a, b) in om.matrix().iter().zip(base.matrix()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // The constant matrix itself: ω(∂_v,∂_u) = 1, ω(∂_{2k-1},∂_{2k}) = −1.
        assert_relative_eq!(base.get(0, 1), 1.0, epsilon = 1e-14);
        assert_relative_eq!(base.get(2, 3), -1.0, epsilon = 1e-14);
        assert_relative_eq!(base.get(4, 5), -1.0, epsilon = 1e-14);
        assert_eq!(base.get(0, 2), 0.0);
        assert!(base.determinant().abs() > 1e-6);
    }

    #[test]
    fn omega_frame_values() {
        let d = dual(4, "u*x3 + x4");
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.5, 1.5);
            let f = d.frame(&p).unwrap();
            let om = build_omega(&d, &p).unwrap();
            // ω(T,Z) = g(T,JZ) = −g(T,T) = −1.
            assert_relative_eq!(om.contract(f.t(), f.z()), -1.0, epsilon = 1e-12);
            // ω(X₃,X₄) = g(X₃,−X₃) = −1.
            assert_relative_eq!(om.contract(f.x(2), f.x(3)), -1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn omega_antisymmetry_is_storage_level() {
        let d = dual(4, "exp(x3)");
        let om = build_omega(&d, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        for i in 0..4 {
            assert_eq!(om.get(i, i), 0.0);
            for j in 0..4 {
                if i != j {
                    assert_eq!(om.get(i, j).to_bits(), (-om.get(j, i)).to_bits());
                }
            }
        }
    }

    #[test]
    fn d_omega_vanishes() {
        let d = dual(4, "x3^2 + x4^2");
        let mut rng = StdRng::seed_from_u64(67);
        for _ in 0..100 {
            let p = sampling::point(&mut rng, 4, -2.0, 2.0);
            assert!(d_omega_residual(&d, &p).unwrap() <= 1e-10);
        }
        // Flat profile: ω constant, dω exactly zero.
        let flat = dual(4, "0");
        assert_eq!(d_omega_residual(&flat, &[0.3, -0.7, 1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn d_omega_frame_route_cancels() {
        let d = dual(4, "sin(u)*x3 + x4^2");
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let v = d_omega_frame(&d, &p, BasisVector::T, BasisVector::X(2), BasisVector::Z)
                .unwrap();
            assert!(v.abs() < 1e-12, "dω(T,X₃,Z) = {v}");
            let w = d_omega_frame(&d, &p, BasisVector::T, BasisVector::X(2), BasisVector::X(3))
                .unwrap();
            assert!(w.abs() < 1e-12, "dω(T,X₃,X₄) = {w}");
        }
    }

    #[test]
    fn frame_brackets_match_closed_form() {
        // [T, X_i] = [Z, X_i] = −(H_i/2)(T − Z) = −(H_i/2)∂_v; [T,Z] = 0.
        let d = dual(4, "x3^2 - u*x4");
        let mut rng = StdRng::seed_from_u64(73);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let h = d.profile_jet(&p).unwrap();
            for i in [2usize, 3] {
                let tb = lie_bracket(&d, &p, BasisVector::T, BasisVector::X(i)).unwrap();
                let zb = lie_bracket(&d, &p, BasisVector::Z, BasisVector::X(i)).unwrap();
                let want = -0.5 * h.gradient()[i];
                assert_relative_eq!(tb[0], want, epsilon = 1e-12);
                assert_relative_eq!(zb[0], want, epsilon = 1e-12);
                for k in 1..4 {
                    assert_eq!(tb[k], 0.0);
                    assert_eq!(zb[k], 0.0);
                }
            }
            let tz = lie_bracket(&d, &p, BasisVector::T, BasisVector::Z).unwrap();
            assert!(tz.iter().all(|c| c.abs() < 1e-14));
        }
    }

    #[test]
    fn nijenhuis_linear_profile_gives_t() {
        let d = dual(4, "x3");
        let mut rng = StdRng::seed_from_u64(79);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let nij = nijenhuis(&d, &p, BasisVector::T, BasisVector::X(2)).unwrap();
            let f = d.frame(&p).unwrap();
            for (got, want) in nij.components.iter().zip(f.t()) {
                assert_relative_eq!(got, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn nijenhuis_matches_closed_form() {
        // N_J(T, X_i) = ½(H_i − H_{i+1})(T−Z) + ½(H_i + H_{i+1})J(T−Z)
        // for the pair leader i (JX_i = X_{i+1}).
        let d = dual(6, "sin(u)*x3 + x4*x5 + x6^2");
        let mut rng = StdRng::seed_from_u64(83);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 6, -1.0, 1.0);
            let h = d.profile_jet(&p).unwrap();
            let j = build_j(&d, &p).unwrap();
            for i in [2usize, 4] {
                let hi = h.gradient()[i];
                let hip = h.gradient()[i + 1];
                let dv = {
                    let mut e = vec![0.0; 6];
                    e[0] = 1.0;
                    e
                };
                let jdv = j.apply(&dv);
                let want: Vec<f64> = (0..6)
                    .map(|k| 0.5 * (hi - hip) * dv[k] + 0.5 * (hi + hip) * jdv[k])
                    .collect();
                let got = nijenhuis(&d, &p, BasisVector::T, BasisVector::X(i)).unwrap();
                for (g, w) in got.components.iter().zip(&want) {
                    assert_relative_eq!(g, w, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn nijenhuis_antisymmetry_and_constant_profile() {
        let d = dual(4, "7.5");
        let p = [0.4, -0.2, 1.0, 0.3];
        let pairs = [
            (BasisVector::T, BasisVector::X(2)),
            (BasisVector::T, BasisVector::Z),
            (BasisVector::X(2), BasisVector::X(3)),
            (BasisVector::Z, BasisVector::X(3)),
        ];
        for (a, b) in pairs {
            let nab = nijenhuis(&d, &p, a, b).unwrap();
            assert!(nab.norm() < 1e-14, "N({a:?},{b:?}) ≠ 0 for constant H");
        }

        let curved = dual(4, "sin(u)*x3 + x4^3");
        let mut rng = StdRng::seed_from_u64(89);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            for (a, b) in pairs {
                let nab = nijenhuis(&curved, &p, a, b).unwrap();
                let nba = nijenhuis(&curved, &p, b, a).unwrap();
                for (x, y) in nab.components.iter().zip(&nba.components) {
                    assert_relative_eq!(*x, -y, epsilon = 1e-12);
                }
                let naa = nijenhuis(&curved, &p, a, a).unwrap();
                assert!(naa.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn compatibility_on_random_profiles() {
        let mut rng = StdRng::seed_from_u64(97);
        for _ in 0..25 {
            let expr = sampling::random_wave_profile(&mut rng, 4);
            let d = PpWaveChart::from_expr(4, expr).unwrap().dual();
            for _ in 0..40 {
                let p = sampling::point(&mut rng, 4, -1.5, 1.5);
                let j = build_j(&d, &p).unwrap();
                let g = d.components(&p).unwrap().values();
                // g(J·, J·) = g on all basis pairs.
                for a in 0..4 {
                    for b in 0..4 {
                        let ea = {
                            let mut e = vec![0.0; 4];
                            e[a] = 1.0;
                            e
                        };
                        let eb = {
                            let mut e = vec![0.0; 4];
                            e[b] = 1.0;
                            e
                        };
                        let want = g[a * 4 + b];
                        let got = d.inner(&p, &j.apply(&ea), &j.apply(&eb)).unwrap();
                        assert!(
                            (got - want).abs() < 1e-10,
                            "g(J e{a}, J e{b}) = {got}, want {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let mut rng = StdRng::seed_from_u64(101);
        let points: Vec<Vec<f64>> = (0..32).map(|_| sampling::point(&mut rng, 4, -2.0, 2.0)).collect();

        let r = classify(&dual(4, "sin(u)"), &points).unwrap();
        assert_eq!(r.verdict, Classification::KahlerFlat);
        assert!(r.max_nijenhuis < 1e-8);
        assert!(r.scalar_range.0.abs() < 1e-12);

        let r = classify(&dual(4, "x3"), &points).unwrap();
        assert_eq!(r.verdict, Classification::StrictlyAlmostKahler);
        assert_relative_eq!(r.scalar_range.0, -0.5, epsilon = 1e-12);

        let r = classify(&dual(4, "0*x3 + sin(u)"), &points).unwrap();
        assert_eq!(r.verdict, Classification::KahlerFlat);

        let r = classify(&dual(4, "0"), &points).unwrap();
        assert_eq!(r.verdict, Classification::KahlerFlat);
    }

    #[test]
    fn left_invariant_profiles_have_position_independent_brackets() {
        // H = φ(u) + Σ aᵢ xⁱ: frame bracket coefficients depend on u alone.
        let d = dual(4, "sin(u) + 2*x3 - 0.5*x4");
        let mut rng = StdRng::seed_from_u64(103);
        for _ in 0..8 {
            let u = rng.random_range(-1.0..1.0);
            let mut reference: Option<Vec<Vec<f64>>> = None;
            for _ in 0..6 {
                let mut p = sampling::point(&mut rng, 4, -2.0, 2.0);
                p[1] = u;
                let f = d.frame(&p).unwrap();
                let frame_matrix = {
                    let mut m = vec![0.0; 16];
                    for (a, col) in f.columns().iter().enumerate() {
                        for i in 0..4 {
                            m[i * 4 + a] = col[i];
                        }
                    }
                    m
                };
                let inv = linalg::invert(4, &frame_matrix).unwrap();
                let mut coeffs = Vec::new();
                for pair in [
                    (BasisVector::T, BasisVector::X(2)),
                    (BasisVector::T, BasisVector::X(3)),
                    (BasisVector::Z, BasisVector::X(2)),
                    (BasisVector::T, BasisVector::Z),
                ] {
                    let br = lie_bracket(&d, &p, pair.0, pair.1).unwrap();
                    coeffs.push(linalg::matvec(4, &inv, &br));
                }
                match &reference {
                    None => reference = Some(coeffs),
                    Some(want) => {
                        for (got, want) in coeffs.iter().zip(want) {
                            for (x, y) in got.iter().zip(want) {
                                assert!((x - y).abs() < 1e-10, "bracket coefficient drifted");
                            }
                        }
                    }
                }
            }
        }
    }
}
