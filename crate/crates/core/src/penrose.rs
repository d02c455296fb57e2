//! The plane-wave scaling limit of a lightlike coordinate chart, its
//! homothety identity, and the hand-off into the dual construction.
//!
//! A lightlike chart has coordinates (x⁰, …, xⁿ) with the fixed block
//! h₀₀ = 0, h₀₁ = 1, h₀ⱼ = 0; the remaining components are free scalar
//! fields. Scaling the coordinates by (1, Ω⁻², Ω⁻¹, …, Ω⁻¹) and the metric
//! by Ω⁻² produces the family
//!
//! ```text
//! (g_Ω)₁₁(x̃) = Ω²·h₁₁(σ(x̃)),  (g_Ω)₁ⱼ = Ω·h₁ⱼ(σ(x̃)),  (g_Ω)ᵢⱼ = hᵢⱼ(σ(x̃)),
//! σ(x̃) = (x̃⁰, Ω²x̃¹, Ωx̃², …, Ωx̃ⁿ),
//! ```
//!
//! which satisfies the homothety (φ⁻¹)*h = Ω²·g_Ω. The Ω → 0 limit is taken
//! analytically by restricting the front components to the x̃⁰ axis; it is a
//! plane-wave metric whose parallel lightlike direction is ∂₁ (the
//! coordinate the limit matrix no longer depends on).

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::ParseError;
use crate::field::ScalarField;
use crate::geometry::{self, metric::{GeometryError, Metric, MetricComponents, Signature}};
use crate::jet::Jet2;
use crate::kahler::{self, ClassificationReport, KahlerError};
use crate::linalg;
use crate::ppwave::{ChartError, PpWaveChart};
use crate::sampling;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PenroseError {
    #[error("component parse error in {key}: {source}")]
    Parse {
        key: String,
        #[source]
        source: ParseError,
    },
    #[error("component {key} overrides a fixed entry of the lightlike block")]
    FixedEntryOverride { key: String },
    #[error("malformed component key {key:?}; expected h<i><j> with single-digit indices")]
    BadComponentKey { key: String },
    #[error("chart dimension {dim} is below the minimum {min}")]
    DimensionTooSmall { dim: usize, min: usize },
    #[error("metric is not Lorentzian at probe point {point:?}")]
    NonLorentzian { point: Vec<f64> },
    #[error("scaling parameter must be positive, got {omega}")]
    NonPositiveOmega { omega: f64 },
    #[error("dual pipeline requires even dimension ≥ 4, got {dim}")]
    OddDimension { dim: usize },
    #[error("front block depends on x̃⁰; Brinkmann conversion unsupported")]
    FrontNotConstant,
    #[error("front block is not positive definite; cannot normalize")]
    FrontNotPositiveDefinite,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Kahler(#[from] KahlerError),
    #[error(transparent)]
    Chart(#[from] ChartError),
}

/// Coordinate names x0, …, xn.
pub fn lightlike_coordinates(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

#[derive(Clone, Debug)]
struct Component {
    field: ScalarField,
    text: String,
}

/// A Lorentzian metric in lightlike form: fixed block h₀₀ = 0, h₀₁ = 1,
/// h₀ⱼ = 0, free components h₁₁, h₁ⱼ, hᵢⱼ (i, j ≥ 2).
#[derive(Clone, Debug)]
pub struct LightlikeChart {
    coords: Vec<String>,
    /// Free entries keyed (i, j) with 1 ≤ i ≤ j ≤ n; fully populated with
    /// Minkowski defaults for entries the caller did not supply.
    free: BTreeMap<(usize, usize), Component>,
}

impl LightlikeChart {
    /// Build from a component table keyed `h<i><j>` (single-digit indices,
    /// i ≤ j). Missing free entries default to Minkowski values. Keys that
    /// touch the fixed row 0 are rejected, as are charts that fail the
    /// Lorentzian-signature probe.
    pub fn new(n: usize, components: &BTreeMap<String, String>) -> Result<Self, PenroseError> {
        if n < 2 {
            return Err(PenroseError::DimensionTooSmall { dim: n + 1, min: 3 });
        }
        if n > 9 {
            return Err(PenroseError::BadComponentKey {
                key: format!("h1{n}"),
            });
        }
        let coords = lightlike_coordinates(n + 1);
        let mut free: BTreeMap<(usize, usize), Component> = BTreeMap::new();
        for i in 1..=n {
            for j in i..=n {
                let text = if i >= 2 && i == j { "1" } else { "0" };
                free.insert(
                    (i, j),
                    Component {
                        field: ScalarField::parse(text, &coords).expect("literal"),
                        text: text.to_owned(),
                    },
                );
            }
        }
        for (key, text) in components {
            let (i, j) = parse_component_key(key, n)?;
            if i == 0 {
                return Err(PenroseError::FixedEntryOverride { key: key.clone() });
            }
            let field =
                ScalarField::parse(text, &coords).map_err(|source| PenroseError::Parse {
                    key: key.clone(),
                    source,
                })?;
            free.insert(
                (i, j),
                Component {
                    field,
                    text: text.clone(),
                },
            );
        }
        let chart = LightlikeChart { coords, free };
        chart.probe_signature()?;
        Ok(chart)
    }

    fn probe_signature(&self) -> Result<(), PenroseError> {
        let n = self.dim();
        let mut rng = StdRng::seed_from_u64(0x6c69_6768_74);
        let mut points: Vec<Vec<f64>> = vec![vec![0.0; n]];
        points.extend((0..16).map(|_| sampling::point(&mut rng, n, -1.0, 1.0)));
        for p in points {
            let g = self.components(&p)?;
            let eig = linalg::sym_eigenvalues(n, &g.values());
            let negatives = eig.iter().filter(|e| **e < 0.0).count();
            let nonsingular = eig.iter().all(|e| e.abs() > linalg::SINGULARITY_TOL);
            if negatives != 1 || !nonsingular {
                return Err(PenroseError::NonLorentzian { point: p });
            }
        }
        Ok(())
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    /// Source text of every free component, keyed `h<i><j>`.
    pub fn component_texts(&self) -> BTreeMap<String, String> {
        self.free
            .iter()
            .map(|((i, j), c)| (format!("h{i}{j}"), c.text.clone()))
            .collect()
    }

}

fn parse_component_key(key: &str, n: usize) -> Result<(usize, usize), PenroseError> {
    let bad = || PenroseError::BadComponentKey {
        key: key.to_owned(),
    };
    let digits = key.strip_prefix('h').ok_or_else(bad)?;
    let bytes = digits.as_bytes();
    if bytes.len() != 2 || !bytes[0].is_ascii_digit() || !bytes[1].is_ascii_digit() {
        return Err(bad());
    }
    let i = (bytes[0] - b'0') as usize;
    let j = (bytes[1] - b'0') as usize;
    if i > j || j > n {
        return Err(bad());
    }
    Ok((i, j))
}

impl Metric for LightlikeChart {
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
        let mut g = MetricComponents::zeros(n);
        g.set(0, 1, Jet2::constant(n, 1.0));
        for ((i, j), c) in &self.free {
            g.set(*i, *j, c.field.eval_jet2(point)?);
        }
        Ok(g)
    }
}

/// Scaling vector D = diag(1, Ω², Ω, …, Ω) of the substitution σ.
fn scale_vector(dim: usize, omega: f64) -> Vec<f64> {
    let mut d = vec![omega; dim];
    d[0] = 1.0;
    d[1] = omega * omega;
    d
}

fn sigma(point: &[f64], omega: f64) -> Vec<f64> {
    let d = scale_vector(point.len(), omega);
    point.iter().zip(&d).map(|(x, s)| x * s).collect()
}

/// The Ω-indexed scaled metric g_Ω.
#[derive(Clone, Debug)]
pub struct PenroseFamily {
    source: LightlikeChart,
    omega: f64,
}

impl PenroseFamily {
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn source(&self) -> &LightlikeChart {
        &self.source
    }
}

/// Build g_Ω for Ω > 0.
pub fn scale_metric(chart: &LightlikeChart, omega: f64) -> Result<PenroseFamily, PenroseError> {
    if !(omega > 0.0) {
        return Err(PenroseError::NonPositiveOmega { omega });
    }
    Ok(PenroseFamily {
        source: chart.clone(),
        omega,
    })
}

impl Metric for PenroseFamily {
    fn dim(&self) -> usize {
        self.source.dim()
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
        let scaled = sigma(point, self.omega);
        let d = scale_vector(n, self.omega);
        let mut g = MetricComponents::zeros(n);
        g.set(0, 1, Jet2::constant(n, 1.0));
        for ((i, j), c) in &self.source.free {
            // Component prefactor: Ω² on (1,1), Ω on (1,j≥2), 1 on the front.
            let prefactor = if *i == 1 && *j == 1 {
                self.omega * self.omega
            } else if *i == 1 {
                self.omega
            } else {
                1.0
            };
            let jet = c.field.eval_jet2(&scaled)?.rescale_inputs(&d).scale(prefactor);
            g.set(*i, *j, jet);
        }
        Ok(g)
    }
}

/// The pullback h̃ = (φ⁻¹)*h in the scaled coordinates: h̃ = D·h(σ(x̃))·D
/// with D the constant Jacobian of σ. Computed independently of
/// [`PenroseFamily`] so the homothety h̃ = Ω²·g_Ω is a genuine cross-check.
#[derive(Clone, Debug)]
pub struct PullbackChart {
    source: LightlikeChart,
    omega: f64,
}

pub fn pullback_metric(chart: &LightlikeChart, omega: f64) -> Result<PullbackChart, PenroseError> {
    if !(omega > 0.0) {
        return Err(PenroseError::NonPositiveOmega { omega });
    }
    Ok(PullbackChart {
        source: chart.clone(),
        omega,
    })
}

impl Metric for PullbackChart {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn signature(&self) -> Signature {
        Signature::Lorentzian
    }

    fn components(&self, point: &[f64]) -> Result<MetricComponents, GeometryError> {
        let n = self.dim();
        let scaled = sigma(point, self.omega);
        let d = scale_vector(n, self.omega);
        let base = self.source.components(&scaled)?;
        let mut g = MetricComponents::zeros(n);
        for i in 0..n {
            for j in i..n {
                let jet = base
                    .get(i, j)
                    .rescale_inputs(&d)
                    .scale(d[i] * d[j]);
                g.set(i, j, jet);
            }
        }
        Ok(g)
    }
}

/// Max-abs residual of the homothety (φ⁻¹)*h = Ω²·g_Ω over sample points.
pub fn homothety_residual(
    chart: &LightlikeChart,
    omega: f64,
    points: &[Vec<f64>],
) -> Result<f64, PenroseError> {
    let family = scale_metric(chart, omega)?;
    let pullback = pullback_metric(chart, omega)?;
    let n = chart.dim();
    let mut worst = 0.0_f64;
    for p in points {
        let g = family.components(p)?.values();
        let h = pullback.components(p)?.values();
        for k in 0..n * n {
            worst = worst.max((h[k] - omega * omega * g[k]).abs());
        }
    }
    Ok(worst)
}

/// The Ω → 0 limit: front components restricted to the x̃⁰ axis, (1,·)
/// entries zeroed. Depends on x̃⁰ only.
#[derive(Clone, Debug)]
pub struct PlaneWaveLimit {
    coords: Vec<String>,
    front: BTreeMap<(usize, usize), Component>,
}

/// Assemble the limit analytically by argument restriction (the numeric
/// Ω-sequence serves only as a validation oracle for this).
pub fn take_limit(chart: &LightlikeChart) -> PlaneWaveLimit {
    let n = chart.dim();
    let mut front = BTreeMap::new();
    for ((i, j), c) in &chart.free {
        if *i < 2 {
            continue;
        }
        let mut expr = c.field.expr().clone();
        for coord in 1..n {
            expr = expr.substitute(coord, 0.0);
        }
        let text = expr.to_string();
        front.insert(
            (*i, *j),
            Component {
                field: ScalarField::new(expr, chart.coords.clone()),
                text,
            },
        );
    }
    PlaneWaveLimit {
        coords: chart.coords.clone(),
        front,
    }
}

impl PlaneWaveLimit {
    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    /// Restricted front components as expression strings, keyed `h<i><j>`.
    pub fn component_texts(&self) -> BTreeMap<String, String> {
        self.front
            .iter()
            .map(|((i, j), c)| (format!("h{i}{j}"), c.text.clone()))
            .collect()
    }
}

impl Metric for PlaneWaveLimit {
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
        let mut g = MetricComponents::zeros(n);
        g.set(0, 1, Jet2::constant(n, 1.0));
        for ((i, j), c) in &self.front {
            g.set(*i, *j, c.field.eval_jet2(point)?);
        }
        Ok(g)
    }
}

/// Result of the plane-wave checks on a computed limit.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PlaneWaveCertificate {
    pub passed: bool,
    /// max |Γᵏ_{a1}|: parallelism of the lightlike direction ∂₁.
    pub parallel_residual: f64,
    /// max Frobenius norm of the curvature endomorphism R(X,Y) over pairs
    /// from {∂₁, ∂₂, …, ∂ₙ}.
    pub curvature_residual: f64,
    pub failing: Option<String>,
}

const CERTIFICATE_TOL: f64 = 1e-9;

/// Verify the two checkable plane-wave properties of a limit metric: the
/// lightlike coordinate field V = ∂₁ is parallel, and the curvature
/// endomorphism vanishes on V-perp = span{V, ∂₂, …, ∂ₙ}.
pub fn limit_is_plane_wave(limit: &PlaneWaveLimit) -> Result<PlaneWaveCertificate, PenroseError> {
    let n = limit.dim();
    let mut rng = StdRng::seed_from_u64(0x636572_74);
    let mut parallel = 0.0_f64;
    let mut curvature = 0.0_f64;
    for _ in 0..12 {
        let p = sampling::point(&mut rng, n, -1.0, 1.0);
        let gamma = geometry::christoffel(limit, &p)?;
        for k in 0..n {
            for a in 0..n {
                parallel = parallel.max(gamma.get(k, a, 1).abs());
            }
        }
        let curv = geometry::riemann(limit, &p)?;
        let ginv = limit.components(&p)?.inverse_values()?;
        // Endomorphism R(∂_a, ∂_b)ᵐ_k = gᵐˡ R_abkl on V-perp pairs.
        for a in 1..n {
            for b in (a + 1)..n {
                let mut frob = 0.0;
                for k in 0..n {
                    for m in 0..n {
                        let mut e = 0.0;
                        for l in 0..n {
                            e += ginv[m * n + l] * curv.riemann(a, b, k, l);
                        }
                        frob += e * e;
                    }
                }
                curvature = curvature.max(frob.sqrt());
            }
        }
    }
    let failing = if parallel > CERTIFICATE_TOL {
        Some("lightlike direction is not parallel".to_owned())
    } else if curvature > CERTIFICATE_TOL {
        Some("curvature endomorphism does not vanish on V-perp".to_owned())
    } else {
        None
    };
    Ok(PlaneWaveCertificate {
        passed: failing.is_none(),
        parallel_residual: parallel,
        curvature_residual: curvature,
        failing,
    })
}

/// A limit re-expressed in Brinkmann coordinates (possible only for fronts
/// constant in x̃⁰): v = x̃¹, u = x̃⁰, y = Lᵀ·x̃_front with C = L·Lᵀ.
#[derive(Clone, Debug)]
pub struct BrinkmannConversion {
    pub chart: PpWaveChart,
    /// Constant front values C (row-major, (n−1)²).
    pub front_values: Vec<f64>,
    /// The front coordinate change y = Lᵀ x (row-major Lᵀ).
    pub front_transform: Vec<f64>,
}

impl BrinkmannConversion {
    /// Jacobian columns of the full map Φ(x̃) = (x̃¹, x̃⁰, Lᵀ x̃_front): entry
    /// (new_index, old_index).
    pub fn jacobian(&self) -> Vec<f64> {
        let m = self.front_transform.len();
        let f = (m as f64).sqrt() as usize;
        let n = f + 2;
        let mut jac = vec![0.0; n * n];
        jac[1] = 1.0; // v = x̃¹
        jac[n] = 1.0; // u = x̃⁰
        for r in 0..f {
            for c in 0..f {
                jac[(r + 2) * n + (c + 2)] = self.front_transform[r * f + c];
            }
        }
        jac
    }
}

/// Convert a constant-front limit into Brinkmann form, imposing the given
/// profile on the new chart (`None` leaves the flat profile "0").
pub fn to_brinkmann(
    limit: &PlaneWaveLimit,
    profile: Option<&str>,
) -> Result<BrinkmannConversion, PenroseError> {
    let n = limit.dim();
    let f = n - 2;
    let mut front_values = vec![0.0; f * f];
    for ((i, j), c) in &limit.front {
        if !c.field.expr().coordinates_used().is_empty() {
            return Err(PenroseError::FrontNotConstant);
        }
        let v = c
            .field
            .eval_value(&vec![0.0; n])
            .map_err(GeometryError::from)?;
        front_values[(i - 2) * f + (j - 2)] = v;
        front_values[(j - 2) * f + (i - 2)] = v;
    }
    let l = linalg::cholesky(f, &front_values).ok_or(PenroseError::FrontNotPositiveDefinite)?;
    let mut lt = vec![0.0; f * f];
    for r in 0..f {
        for c in 0..f {
            lt[r * f + c] = l[c * f + r];
        }
    }
    let chart = PpWaveChart::new(n, profile.unwrap_or("0"))?;
    Ok(BrinkmannConversion {
        chart,
        front_values,
        front_transform: lt,
    })
}

/// Outcome of feeding a limit into the dual construction.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DualPipelineOutcome {
    Converted {
        classification: ClassificationReport,
        max_d_omega_residual: f64,
    },
    ConversionUnsupported {
        reason: String,
    },
}

/// Convert the limit to Brinkmann form (when its front is constant), build
/// the standard dual, and run the full almost-Kähler verification. An
/// x̃⁰-dependent front reports the limit as computed but unconverted.
pub fn limit_to_dual_pipeline(
    limit: &PlaneWaveLimit,
    profile: Option<&str>,
) -> Result<DualPipelineOutcome, PenroseError> {
    let n = limit.dim();
    if n % 2 != 0 || n < 4 {
        return Err(PenroseError::OddDimension { dim: n });
    }
    let conversion = match to_brinkmann(limit, profile) {
        Ok(c) => c,
        Err(PenroseError::FrontNotConstant) => {
            return Ok(DualPipelineOutcome::ConversionUnsupported {
                reason: "limit computed; Brinkmann conversion unsupported for x0-dependent fronts"
                    .to_owned(),
            })
        }
        Err(e) => return Err(e),
    };
    let dual = conversion.chart.dual();
    let mut rng = StdRng::seed_from_u64(0x647561_6c);
    let points: Vec<Vec<f64>> = (0..64).map(|_| sampling::point(&mut rng, n, -2.0, 2.0)).collect();
    let mut residual = 0.0_f64;
    for p in &points {
        residual = residual.max(kahler::d_omega_residual(&dual, p)?);
    }
    let classification = kahler::classify(&dual, &points)?;
    Ok(DualPipelineOutcome::Converted {
        classification,
        max_d_omega_residual: residual,
    })
}

/// Full scaling-limit report: homothety residuals over an Ω sweep, the
/// component deviation |g_Ω − h_PW| per Ω, the restricted limit, its
/// plane-wave certificate, and the dual classification when conversion is
/// possible.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct PenroseReport {
    pub dimension: usize,
    pub source_components: BTreeMap<String, String>,
    pub omegas: Vec<f64>,
    pub max_homothety_residual: f64,
    pub deviation_by_omega: Vec<f64>,
    pub limit_components: BTreeMap<String, String>,
    pub certificate: PlaneWaveCertificate,
    pub dual: Option<DualPipelineOutcome>,
}

/// Max-abs component deviation |g_Ω − h_PW| over sample points.
pub fn limit_deviation(
    chart: &LightlikeChart,
    limit: &PlaneWaveLimit,
    omega: f64,
    points: &[Vec<f64>],
) -> Result<f64, PenroseError> {
    let family = scale_metric(chart, omega)?;
    let n = chart.dim();
    let mut worst = 0.0_f64;
    for p in points {
        let g = family.components(p)?.values();
        let l = limit.components(p)?.values();
        for k in 0..n * n {
            worst = worst.max((g[k] - l[k]).abs());
        }
    }
    Ok(worst)
}

/// Assemble the whole report for a chart. The dual classification runs only
/// for even dimensions; the post-conversion profile (if any) is imposed on
/// the Brinkmann chart.
pub fn penrose_report(
    chart: &LightlikeChart,
    omegas: &[f64],
    samples: usize,
    seed: u64,
    post_profile: Option<&str>,
) -> Result<PenroseReport, PenroseError> {
    let n = chart.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..samples.max(1))
        .map(|_| sampling::point(&mut rng, n, -1.0, 1.0))
        .collect();
    let mut max_homothety = 0.0_f64;
    for &omega in omegas {
        max_homothety = max_homothety.max(homothety_residual(chart, omega, &points)?);
    }
    let limit = take_limit(chart);
    let mut deviations = Vec::with_capacity(omegas.len());
    for &omega in omegas {
        deviations.push(limit_deviation(chart, &limit, omega, &points)?);
    }
    let certificate = limit_is_plane_wave(&limit)?;
    let dual = if n % 2 == 0 && n >= 4 {
        Some(limit_to_dual_pipeline(&limit, post_profile)?)
    } else {
        None
    };
    Ok(PenroseReport {
        dimension: n,
        source_components: chart.component_texts(),
        omegas: omegas.to_vec(),
        max_homothety_residual: max_homothety,
        deviation_by_omega: deviations,
        limit_components: limit.component_texts(),
        certificate,
        dual,
    })
}
