//! Wave charts in Brinkmann-type coordinates and their Riemannian duals.
//!
//! A wave chart on coordinates (v, u, x³, …, xⁿ) carries the Lorentzian
//! metric
//!
//! ```text
//! h = H(u, x³, …, xⁿ) du² + 2 dv du + Σ (dxⁱ)²
//! ```
//!
//! whose sole degree of freedom is the profile H. Deforming along the
//! lightlike direction produces the Riemannian dual
//!
//! ```text
//! g = h + 2 T♭ ⊗ T♭,   T = ½(H+1)∂_v − ∂_u,
//! ```
//!
//! with component matrix g_vv = 2, g_vu = H, g_uu = ½(1+H²), g_ii = 1. All
//! closed-form curvature statements about g are phrased in the global
//! g-orthonormal frame {T, X₃, …, Xₙ, Z} with X_i = ∂_i and
//! Z = ½(H−1)∂_v − ∂_u.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::expr::{Expr, ParseError};
use crate::field::ScalarField;
use crate::geometry::curvature::ChristoffelData;
use crate::geometry::metric::{GeometryError, Metric, MetricComponents, Signature};
use crate::jet::Jet2;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("profile parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("profile must not depend on the lightlike coordinate {name:?}")]
    ProfileDependsOnLightlikeCoordinate { name: String },
    #[error("chart dimension {dim} is below the minimum {min}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("torus profile is not structurally 2π-periodic")]
    AperiodicProfile,
}

/// Coordinate names for the standard chart: v, u, x3, …, xn.
pub fn standard_coordinates(dim: usize) -> Vec<String> {
    let mut coords = vec!["v".to_owned(), "u".to_owned()];
    for i in 3..=dim {
        coords.push(format!("x{i}"));
    }
    coords
}

/// Coordinate names for the torus chart: phi, theta, x1, …, x2n.
pub fn torus_coordinates(dim: usize) -> Vec<String> {
    let mut coords = vec!["phi".to_owned(), "theta".to_owned()];
    for i in 1..=(dim - 2) {
        coords.push(format!("x{i}"));
    }
    coords
}

/// A wave chart: coordinates plus the profile H (independent of the first,
/// lightlike coordinate). Immutable once built.
#[derive(Clone, Debug)]
pub struct PpWaveChart {
    coords: Vec<String>,
    profile: ScalarField,
    profile_text: String,
}

impl PpWaveChart {
    /// Standard chart of dimension `dim ≥ 3` with profile parsed from text.
    pub fn new(dim: usize, profile: &str) -> Result<Self, ChartError> {
        let coords = standard_coordinates(dim);
        Self::with_coords(coords, profile)
    }

    /// Standard chart from an already-built expression tree.
    pub fn from_expr(dim: usize, expr: Expr) -> Result<Self, ChartError> {
        let coords = standard_coordinates(dim);
        let text = expr.to_string();
        Self::from_parts(coords, ScalarField::new(expr, standard_coordinates(dim)), text)
    }

    fn with_coords(coords: Vec<String>, profile: &str) -> Result<Self, ChartError> {
        let field = ScalarField::parse(profile, &coords)?;
        Self::from_parts(coords, field, profile.to_owned())
    }

    fn from_parts(
        coords: Vec<String>,
        profile: ScalarField,
        profile_text: String,
    ) -> Result<Self, ChartError> {
        if coords.len() < 3 {
            return Err(ChartError::DimensionTooSmall {
                dim: coords.len(),
                min: 3,
            });
        }
        if profile.expr().coordinates_used().contains(&0) {
            return Err(ChartError::ProfileDependsOnLightlikeCoordinate {
                name: coords[0].clone(),
            });
        }
        Ok(PpWaveChart {
            coords,
            profile,
            profile_text,
        })
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    pub fn profile(&self) -> &ScalarField {
        &self.profile
    }

    pub fn profile_text(&self) -> &str {
        &self.profile_text
    }

    /// Profile jet at a chart point.
    pub fn profile_jet(&self, point: &[f64]) -> Result<Jet2, GeometryError> {
        Ok(self.profile.eval_jet2(point)?)
    }

    /// The Riemannian dual of this chart.
    pub fn dual(&self) -> DualChart {
        DualChart {
            chart: self.clone(),
        }
    }

    /// True when the profile is quadratic in the transverse coordinates:
    /// the x-block of the Hessian is probed at pairs of random points that
    /// share their u value and must agree to 1e-8. Evaluation failures
    /// (partial profiles) report `false`.
    pub fn is_plane_wave(&self) -> bool {
        let n = self.dim();
        let mut rng = StdRng::seed_from_u64(0x706c_616e_65);
        for _ in 0..8 {
            let u = rng.random_range(-1.0..1.0);
            let mut pa = vec![0.0; n];
            let mut pb = vec![0.0; n];
            pa[1] = u;
            pb[1] = u;
            for i in 2..n {
                pa[i] = rng.random_range(-1.0..1.0);
                pb[i] = rng.random_range(-1.0..1.0);
            }
            let (ja, jb) = match (self.profile.eval_jet2(&pa), self.profile.eval_jet2(&pb)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => return false,
            };
            for i in 2..n {
                for j in 2..n {
                    if (ja.hessian(i, j) - jb.hessian(i, j)).abs() > 1e-8 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl Metric for PpWaveChart {
    fn dim(&self) -> usize {
        self.coords.len()
    }

    fn signature(&self) -> Signature {
        Signature::Lorentzian
    }

    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError> {
        let n = self.dim();
        if point.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let h = self.profile.eval_jet2(point)?;
        let mut g = MetricComponents::zeros(n);
        g.set(0, 1, Jet2::constant(n, 1.0));
        g.set(1, 1, h);
        for i in 2..n {
            g.set(i, i, Jet2::constant(n, 1.0));
        }
        Ok(g)
    }
}

/// The standard Riemannian dual of a wave chart.
#[derive(Clone, Debug)]
pub struct DualChart {
    chart: PpWaveChart,
}

impl DualChart {
    pub fn new(chart: PpWaveChart) -> Self {
        DualChart { chart }
    }

    /// The underlying Lorentzian wave chart.
    pub fn wave(&self) -> &PpWaveChart {
        &self.chart
    }

    pub fn coordinates(&self) -> &[String] {
        &self.chart.coords
    }

    pub fn profile(&self) -> &ScalarField {
        &self.chart.profile
    }

    pub fn profile_text(&self) -> &str {
        &self.chart.profile_text
    }

    pub fn profile_jet(&self, point: &[f64]) -> Result<Jet2, GeometryError> {
        self.chart.profile_jet(point)
    }

    /// The orthonormal frame {T, X₃, …, Xₙ, Z} at a point.
    pub fn frame(&self, point: &[f64]) -> Result<FrameData, GeometryError> {
        let n = self.dim();
        let h = self.chart.profile_jet(point)?;
        let hv = h.value();
        let mut columns = Vec::with_capacity(n);
        let mut t = vec![0.0; n];
        t[0] = 0.5 * (hv + 1.0);
        t[1] = -1.0;
        columns.push(t);
        for i in 2..n {
            let mut x = vec![0.0; n];
            x[i] = 1.0;
            columns.push(x);
        }
        let mut z = vec![0.0; n];
        z[0] = 0.5 * (hv - 1.0);
        z[1] = -1.0;
        columns.push(z);
        Ok(FrameData {
            point: point.to_vec(),
            columns,
            h,
        })
    }

    /// Frame-basis Ricci tensor assembled from the profile jet:
    /// Ric(T,T) = ½ΣH_ii, Ric(T,X_i) = ½H_ui, Ric(T,Z) = −½ΣH_i²,
    /// Ric(X_i,X_j) = −½H_iH_j, Ric(X_i,Z) = −½H_iu, Ric(Z,Z) = −½ΣH_ii.
    pub fn ricci_closed_form(&self, point: &[f64]) -> Result<Vec<f64>, GeometryError> {
        let n = self.dim();
        let h = self.chart.profile_jet(point)?;
        let sum_hii: f64 = (2..n).map(|i| h.hessian(i, i)).sum();
        let sum_hi2: f64 = (2..n).map(|i| h.gradient()[i].powi(2)).sum();
        let z = n - 1; // frame slot of Z
        let mut ric = vec![0.0; n * n];
        let mut set = |a: usize, b: usize, val: f64| {
            ric[a * n + b] = val;
            ric[b * n + a] = val;
        };
        set(0, 0, 0.5 * sum_hii);
        set(z, z, -0.5 * sum_hii);
        set(0, z, -0.5 * sum_hi2);
        for a in 1..z {
            let i = a + 1; // coordinate index of X slot a
            set(0, a, 0.5 * h.hessian(1, i));
            set(a, z, -0.5 * h.hessian(i, 1));
            for b in a..z {
                let j = b + 1;
                set(a, b, -0.5 * h.gradient()[i] * h.gradient()[j]);
            }
        }
        Ok(ric)
    }

    /// Scalar curvature in closed form: −½ Σ H_i².
    pub fn scalar_closed_form(&self, point: &[f64]) -> Result<f64, GeometryError> {
        let n = self.dim();
        let h = self.chart.profile_jet(point)?;
        Ok(-0.5 * (2..n).map(|i| h.gradient()[i].powi(2)).sum::<f64>())
    }

    /// The seven non-vanishing Christoffel families of the dual metric:
    /// Γᵘ_vi = H_i, Γⁱ_vu = −½H_i, Γᵛ_vi = Γⁱ_uu = −½HH_i, Γᵘ_ui = ½HH_i,
    /// Γᵛ_uu = ½H_u, Γᵛ_ui = −¼(H²−1)H_i.
    pub fn christoffel_closed_form(&self, point: &[f64]) -> Result<ChristoffelData, GeometryError> {
        let n = self.dim();
        let h = self.chart.profile_jet(point)?;
        let hv = h.value();
        let hu = h.gradient()[1];
        let mut gamma = vec![0.0; n * n * n];
        let mut set = |k: usize, i: usize, j: usize, val: f64| {
            gamma[(k * n + i) * n + j] = val;
            gamma[(k * n + j) * n + i] = val;
        };
        set(0, 1, 1, 0.5 * hu); // Γᵛ_uu
        for i in 2..n {
            let hi = h.gradient()[i];
            set(1, 0, i, hi); // Γᵘ_vi
            set(i, 0, 1, -0.5 * hi); // Γⁱ_vu
            set(0, 0, i, -0.5 * hv * hi); // Γᵛ_vi
            set(i, 1, 1, -0.5 * hv * hi); // Γⁱ_uu
            set(1, 1, i, 0.5 * hv * hi); // Γᵘ_ui
            set(0, 1, i, -0.25 * (hv * hv - 1.0) * hi); // Γᵛ_ui
        }
        Ok(ChristoffelData::from_dense(point.to_vec(), n, gamma))
    }
}

impl Metric for DualChart {
    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn signature(&self) -> Signature {
        Signature::Riemannian
    }

    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError> {
        let n = self.dim();
        if point.len() != n {
            return Err(GeometryError::DimensionMismatch {
                expected: n,
                got: point.len(),
            });
        }
        let h = self.chart.profile.eval_jet2(point)?;
        // g_uu = ½(1 + H²) assembled in jet arithmetic so its first and
        // second derivatives are carried exactly.
        let g_uu = h.mul(&h).add(&Jet2::constant(n, 1.0)).scale(0.5);
        let mut g = MetricComponents::zeros(n);
        g.set(0, 0, Jet2::constant(n, 2.0));
        g.set(0, 1, h);
        g.set(1, 1, g_uu);
        for i in 2..n {
            g.set(i, i, Jet2::constant(n, 1.0));
        }
        Ok(g)
    }
}

/// The orthonormal frame of a dual chart at a point, stored as coordinate
/// component columns in the order [T, X₃, …, Xₙ, Z], together with the
/// profile jet used to build it.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub point: Vec<f64>,
    columns: Vec<Vec<f64>>,
    h: Jet2,
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Coordinate components of all frame vectors, in frame order.
    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn t(&self) -> &[f64] {
        &self.columns[0]
    }

    /// Transverse frame vector for coordinate index `i` (2-based slot: the
    /// coordinate ∂_i with i ≥ 2).
    pub fn x(&self, i: usize) -> &[f64] {
        debug_assert!((2..self.dim()).contains(&i));
        &self.columns[i - 1]
    }

    pub fn z(&self) -> &[f64] {
        &self.columns[self.dim() - 1]
    }

    pub fn profile_jet(&self) -> &Jet2 {
        &self.h
    }
}

/// Flat-torus wave chart: angular coordinates (φ, θ) and a flat 2n-torus
/// front, with a 2π-periodic profile H(θ, x¹, …, x²ⁿ).
#[derive(Clone, Debug)]
pub struct TorusChart {
    chart: PpWaveChart,
}

impl TorusChart {
    /// Chart on the (2n+2)-torus, `half_front ≥ 1` pairs of front
    /// coordinates. The profile must be structurally periodic and must not
    /// reference φ.
    pub fn new(half_front: usize, profile: &str) -> Result<Self, ChartError> {
        if half_front == 0 {
            return Err(ChartError::DimensionTooSmall { dim: 2, min: 4 });
        }
        let dim = 2 * half_front + 2;
        let coords = torus_coordinates(dim);
        let field = ScalarField::parse(profile, &coords)?;
        if field.expr().coordinates_used().contains(&0) {
            return Err(ChartError::ProfileDependsOnLightlikeCoordinate {
                name: coords[0].clone(),
            });
        }
        if !field.expr().is_structurally_periodic(dim) {
            return Err(ChartError::AperiodicProfile);
        }
        let chart = PpWaveChart::from_parts(coords, field, profile.to_owned())?;
        Ok(TorusChart { chart })
    }

    /// View as a wave chart (the flat-torus front makes it one; angles are
    /// stored as plain reals and reduced mod 2π only in reporting).
    pub fn as_wave(&self) -> &PpWaveChart {
        &self.chart
    }

    pub fn dual(&self) -> DualChart {
        self.chart.dual()
    }

    pub fn coordinates(&self) -> &[String] {
        self.chart.coordinates()
    }

    pub fn profile_text(&self) -> &str {
        self.chart.profile_text()
    }
}

impl Metric for TorusChart {
    fn dim(&self) -> usize {
        self.chart.dim()
    }

    fn signature(&self) -> Signature {
        Signature::Lorentzian
    }

    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError> {
        self.chart.components(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{self, rank2_to_frame};
    use crate::sampling;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn dual(dim: usize, profile: &str) -> DualChart {
        PpWaveChart::new(dim, profile).unwrap().dual()
    }

    #[test]
    fn rejects_profile_depending_on_v() {
        assert!(matches!(
            PpWaveChart::new(4, "v + x3"),
            Err(ChartError::ProfileDependsOnLightlikeCoordinate { .. })
        ));
    }

    #[test]
    fn rejects_dimension_below_three() {
        assert!(matches!(
            PpWaveChart::new(2, "0"),
            Err(ChartError::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn zero_profile_is_flat_minkowski() {
        let chart = PpWaveChart::new(4, "0").unwrap();
        let p = [0.4, -0.3, 1.0, 2.0];
        let g = chart.components(&p).unwrap();
        assert_eq!(g.get(0, 1).value(), 1.0);
        assert_eq!(g.get(1, 1).value(), 0.0);
        assert_eq!(g.get(2, 2).value(), 1.0);
        let curv = geometry::riemann(&chart, &p).unwrap();
        assert_eq!(curv.max_abs_riemann(), 0.0);
    }

    #[test]
    fn lightlike_direction_is_null_and_parallel() {
        let chart = PpWaveChart::new(4, "sin(u)*x3 + x4^2").unwrap();
        let mut rng = StdRng::seed_from_u64(7);
        let v_dir = [1.0, 0.0, 0.0, 0.0];
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            assert_eq!(chart.inner(&p, &v_dir, &v_dir).unwrap(), 0.0);
            // ∇V = 0: every Γᵏ_i v vanishes.
            let gamma = geometry::christoffel(&chart, &p).unwrap();
            for k in 0..4 {
                for i in 0..4 {
                    assert!(
                        gamma.get(k, i, 0).abs() < 1e-12,
                        "Γ^{k}_{i}v = {}",
                        gamma.get(k, i, 0)
                    );
                }
            }
        }
    }

    #[test]
    fn harmonic_profile_is_ricci_flat() {
        let chart = PpWaveChart::new(4, "x3^2 - x4^2").unwrap();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let (ric, scal) = geometry::ricci_scalar(&chart, &p).unwrap();
            assert!(ric.iter().all(|r| r.abs() < 1e-10));
            assert!(scal.abs() < 1e-10);
        }
    }

    #[test]
    fn ppwave_ricci_uu_matches_transverse_laplacian() {
        // H = x3³ has Ric(∂_u,∂_u) = −3 x³.
        let chart = PpWaveChart::new(4, "x3^3").unwrap();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let (ric, _) = geometry::ricci_scalar(&chart, &p).unwrap();
            assert_relative_eq!(ric[1 * 4 + 1], -3.0 * p[2], max_relative = 1e-9, epsilon = 1e-12);
            // Every other coordinate component vanishes.
            for (idx, r) in ric.iter().enumerate() {
                if idx != 5 {
                    assert!(r.abs() < 1e-10, "Ric[{idx}] = {r}");
                }
            }
        }
    }

    #[test]
    fn plane_wave_detection() {
        assert!(PpWaveChart::new(4, "x3^2 + u*x4^2").unwrap().is_plane_wave());
        assert!(!PpWaveChart::new(4, "x3^3").unwrap().is_plane_wave());
        assert!(PpWaveChart::new(4, "sin(u)").unwrap().is_plane_wave());
    }

    #[test]
    fn dual_components_match_closed_matrix() {
        let d = dual(4, "0");
        let g = d.components(&[0.0; 4]).unwrap();
        assert_eq!(g.get(0, 0).value(), 2.0);
        assert_eq!(g.get(0, 1).value(), 0.0);
        assert_eq!(g.get(1, 1).value(), 0.5);
        assert_eq!(g.get(2, 2).value(), 1.0);
        assert_eq!(g.get(3, 3).value(), 1.0);
        let curv = geometry::riemann(&d, &[0.0; 4]).unwrap();
        assert_eq!(curv.max_abs_riemann(), 0.0);
    }

    #[test]
    fn dual_assembly_is_symbolic_in_h() {
        let d = dual(4, "sin(u)*x3");
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..50 {
            let p = sampling::point(&mut rng, 4, -2.0, 2.0);
            let h = d.profile_jet(&p).unwrap();
            let g = d.components(&p).unwrap();
            assert_eq!(g.get(0, 0).value().to_bits(), 2.0_f64.to_bits());
            assert_eq!(g.get(0, 1).value().to_bits(), h.value().to_bits());
            let huu = 0.5 * (1.0 + h.value() * h.value());
            assert_eq!(g.get(1, 1).value().to_bits(), huu.to_bits());
            assert_eq!(g.get(0, 2).value(), 0.0);
            assert_eq!(g.get(1, 3).value(), 0.0);
        }
    }

    #[test]
    fn dual_equals_wave_plus_squared_coform() {
        // g = h + 2 T♭ ⊗ T♭ with T♭ computed from the Lorentzian metric.
        let chart = PpWaveChart::new(5, "sin(u)*x3 + x4*x5").unwrap();
        let d = chart.dual();
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..30 {
            let p = sampling::point(&mut rng, 5, -1.5, 1.5);
            let h = chart.components(&p).unwrap().values();
            let g = d.components(&p).unwrap().values();
            let hv = chart.profile_jet(&p).unwrap().value();
            let n = 5;
            let mut t = vec![0.0; n];
            t[0] = 0.5 * (hv + 1.0);
            t[1] = -1.0;
            // T♭_i = h_ij T^j
            let tflat: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| h[i * n + j] * t[j]).sum::<f64>())
                .collect();
            for i in 0..n {
                for j in 0..n {
                    let want = h[i * n + j] + 2.0 * tflat[i] * tflat[j];
                    assert_relative_eq!(g[i * n + j], want, epsilon = 1e-12, max_relative = 1e-12);
                }
            }
            // T is h-unit-timelike, hence g-unit: g(T,T) = 1.
            assert_relative_eq!(d.inner(&p, &t, &t).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dual_upper_block_determinant_is_one() {
        let d = dual(4, "exp(x3)*cos(u)");
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let g = d.components(&p).unwrap().values();
            let det2 = g[0] * g[5] - g[1] * g[4];
            assert_relative_eq!(det2, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn frame_at_origin_for_flat_profile() {
        let d = dual(4, "0");
        let f = d.frame(&[0.0; 4]).unwrap();
        assert_eq!(f.t(), &[0.5, -1.0, 0.0, 0.0]);
        assert_eq!(f.z(), &[-0.5, -1.0, 0.0, 0.0]);
        assert_eq!(f.x(2), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn frame_is_orthonormal_and_differences_to_lightlike() {
        let d = dual(4, "sin(u)*x3");
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..100 {
            let p = sampling::point(&mut rng, 4, -2.0, 2.0);
            let f = d.frame(&p).unwrap();
            for a in 0..4 {
                for b in 0..4 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    let got = d.inner(&p, &f.columns()[a], &f.columns()[b]).unwrap();
                    assert!((got - want).abs() < 1e-12, "gram[{a}][{b}] = {got}");
                }
            }
            // T − Z = ∂_v: the u- and x-components agree bit-exactly by
            // construction; the v-component cancels to 1 up to one ulp of
            // the H evaluation.
            for i in 1..4 {
                assert_eq!(f.t()[i].to_bits(), f.z()[i].to_bits());
            }
            let hv = f.profile_jet().value();
            assert!((f.t()[0] - f.z()[0] - 1.0).abs() <= 4.0 * f64::EPSILON * (1.0 + hv.abs()));
        }
    }

    #[test]
    fn closed_form_ricci_examples() {
        let d = dual(4, "x3^2 + x4^2");
        let ric = d.ricci_closed_form(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        // Frame order [T, X3, X4, Z]: diagonal (2, −2, 0, −2), (T,Z) = −2.
        assert_eq!(ric[0], 2.0);
        assert_eq!(ric[5], -2.0);
        assert_eq!(ric[10], 0.0);
        assert_eq!(ric[15], -2.0);
        assert_eq!(ric[3], -2.0);
        assert_eq!(ric[7], 0.0); // (X3, Z) = −H_3u/2 = 0

        let d2 = dual(4, "u*x3");
        let ric2 = d2.ricci_closed_form(&[0.0; 4]).unwrap();
        assert_eq!(ric2[1], 0.5); // (T, X3) = ½ H_u3

        let d3 = dual(4, "5");
        let ric3 = d3.ricci_closed_form(&[0.3, 1.0, -2.0, 0.7]).unwrap();
        assert!(ric3.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn generic_ricci_in_frame_matches_closed_form() {
        let mut rng = StdRng::seed_from_u64(31);
        for dim in [4usize, 6] {
            for _ in 0..8 {
                let expr = sampling::random_polynomial(&mut rng, dim, 3, 4);
                let chart = PpWaveChart::from_expr(dim, expr).unwrap();
                let d = chart.dual();
                let p = sampling::point(&mut rng, dim, -1.0, 1.0);
                let generic = geometry::riemann(&d, &p).unwrap();
                let frame = d.frame(&p).unwrap();
                let got = rank2_to_frame(dim, &generic.ricci, frame.columns()).unwrap();
                let want = d.ricci_closed_form(&p).unwrap();
                for (g, w) in got.iter().zip(&want) {
                    let scale = 1.0 + w.abs();
                    assert!(
                        (g - w).abs() / scale < 1e-7,
                        "profile {} at {:?}: {} vs {}",
                        chart.profile_text(),
                        p,
                        g,
                        w
                    );
                }
            }
        }
    }

    #[test]
    fn generic_christoffel_matches_seven_families() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..10 {
            let expr = sampling::random_polynomial(&mut rng, 5, 3, 4);
            let d = PpWaveChart::from_expr(5, expr).unwrap().dual();
            let p = sampling::point(&mut rng, 5, -1.0, 1.0);
            let generic = geometry::christoffel(&d, &p).unwrap();
            let closed = d.christoffel_closed_form(&p).unwrap();
            for k in 0..5 {
                for i in 0..5 {
                    for j in 0..5 {
                        assert!(
                            (generic.get(k, i, j) - closed.get(k, i, j)).abs() < 1e-9,
                            "Γ^{k}_{i}{j}: {} vs {}",
                            generic.get(k, i, j),
                            closed.get(k, i, j)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn christoffel_closed_form_instantiated_at_linear_profile() {
        let d = dual(4, "x3");
        let p = [0.2, -0.4, 0.9, 0.1];
        let hv = 0.9;
        let gamma = d.christoffel_closed_form(&p).unwrap();
        assert_eq!(gamma.get(1, 0, 2), 1.0); // Γᵘ_v3 = H_3 = 1
        assert_eq!(gamma.get(0, 0, 2), -0.5 * hv); // Γᵛ_v3 = −½H
        assert_eq!(gamma.get(2, 0, 1), -0.5); // Γ³_vu = −½
        assert_eq!(gamma.get(2, 1, 1), -0.5 * hv); // Γ³_uu = −½H
        assert_eq!(gamma.get(1, 1, 2), 0.5 * hv); // Γᵘ_u3 = ½H
        assert_eq!(gamma.get(0, 1, 2), -0.25 * (hv * hv - 1.0)); // Γᵛ_u3
        assert_eq!(gamma.get(0, 1, 1), 0.0); // Γᵛ_uu = ½H_u = 0
        // A sample of entries outside the seven families.
        assert_eq!(gamma.get(3, 1, 1), 0.0);
        assert_eq!(gamma.get(2, 2, 2), 0.0);
        assert_eq!(gamma.get(0, 0, 0), 0.0);
    }

    #[test]
    fn scalar_curvature_closed_form() {
        let d = dual(4, "x3");
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..10 {
            let p = sampling::point(&mut rng, 4, -2.0, 2.0);
            assert_eq!(d.scalar_closed_form(&p).unwrap(), -0.5);
            let (_, scal) = geometry::ricci_scalar(&d, &p).unwrap();
            assert_relative_eq!(scal, -0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn dual_metric_killing_in_v() {
        // ∂_v of every g_ij vanishes identically: jets carry exact zeros.
        let d = dual(4, "exp(x3)*sin(u) + x4^2");
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 4, -1.0, 1.0);
            let g = d.components(&p).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(g.get(i, j).gradient()[0], 0.0);
                }
            }
        }
    }

    #[test]
    fn dual_is_positive_definite_at_samples() {
        let d = dual(6, "sin(u)*x3 + cos(x4)*x5 - x6");
        let mut rng = StdRng::seed_from_u64(47);
        for _ in 0..20 {
            let p = sampling::point(&mut rng, 6, -2.0, 2.0);
            assert!(geometry::signature_consistent_at(&d, &p).unwrap());
        }
    }

    #[test]
    fn torus_chart_validation() {
        assert!(TorusChart::new(1, "sin(x1)").is_ok());
        assert!(TorusChart::new(1, "cos(theta)").is_ok());
        assert!(matches!(
            TorusChart::new(1, "x1"),
            Err(ChartError::AperiodicProfile)
        ));
        assert!(matches!(
            TorusChart::new(1, "sin(phi)"),
            Err(ChartError::ProfileDependsOnLightlikeCoordinate { .. })
        ));
    }

    #[test]
    fn torus_flat_when_profile_zero() {
        let t = TorusChart::new(1, "0").unwrap();
        let curv = geometry::riemann(&t, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(curv.max_abs_riemann(), 0.0);
    }
}
