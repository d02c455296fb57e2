//! Geodesics of the Riemannian dual: the reduced second-order system, its
//! conserved quantities, adaptive integration, and long-horizon completeness
//! probes.
//!
//! With c := 2v̇ + u̇H (itself conserved), the dual geodesic equations are
//!
//! ```text
//! v̈  = ½ c H Σ H_i ẋⁱ − ½ (Σ H_i ẋⁱ) u̇ − ½ H_u u̇²
//! ü  = −c Σ H_i ẋⁱ
//! ẍⁱ = ½ c H_i u̇
//! ```
//!
//! The full system is what gets integrated — c is recomputed from the state,
//! so its conservation is a real check on the integrator rather than an
//! input. The second invariant is c₂ := Σ(ẋⁱ)² + ½u̇², which bounds every
//! transverse velocity and hence forces at most linear coordinate growth.

use std::io::{self, Write};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::metric::{GeometryError, Metric};
use crate::jet::EvalError;
use crate::ode::{self, OdeError};
pub use crate::ode::StepControl;
use crate::ppwave::DualChart;

/// Slack added to the theorem-level growth bound to absorb integrator error.
pub const GROWTH_BOUND_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeodesicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("integration failed: {0}")]
    Ode(#[from] OdeError<EvalError>),
    #[error(
        "growth bound violated on member {member}: |x^{coordinate}(t={t})| exceeds \
         |x₀| + √c₂·t by {excess}"
    )]
    GrowthBound {
        member: usize,
        coordinate: usize,
        t: f64,
        excess: f64,
    },
}

/// Phase-space point of a geodesic.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

/// The two constants of motion plus the squared speed g(γ̇, γ̇).
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
pub struct ConservedMonitors {
    pub c: f64,
    pub c2: f64,
    pub speed: f64,
}

/// Monitors recomputed from a state.
pub fn monitors(chart: &DualChart, state: &GeodesicState) -> Result<ConservedMonitors, GeodesicError> {
    let h = chart
        .profile()
        .eval_value(&state.position)
        .map_err(GeometryError::from)?;
    Ok(monitors_with_h(h, state))
}

fn monitors_with_h(h: f64, state: &GeodesicState) -> ConservedMonitors {
    let vdot = state.velocity[0];
    let udot = state.velocity[1];
    let xdot = &state.velocity[2..];
    let c = 2.0 * vdot + udot * h;
    let c2 = xdot.iter().map(|x| x * x).sum::<f64>() + 0.5 * udot * udot;
    let speed = 2.0 * vdot * vdot
        + 2.0 * h * vdot * udot
        + 0.5 * (1.0 + h * h) * udot * udot
        + xdot.iter().map(|x| x * x).sum::<f64>();
    ConservedMonitors { c, c2, speed }
}

/// Velocity and acceleration of the reduced system at a state.
pub fn geodesic_rhs(
    chart: &DualChart,
    state: &GeodesicState,
) -> Result<(Vec<f64>, Vec<f64>), GeodesicError> {
    let n = chart.dim();
    let h = chart
        .profile()
        .eval_jet1(&state.position)
        .map_err(GeometryError::from)?;
    Ok((
        state.velocity.clone(),
        acceleration(n, h.value(), h.gradient(), &state.velocity),
    ))
}

fn acceleration(n: usize, h: f64, grad_h: &[f64], vel: &[f64]) -> Vec<f64> {
    let vdot = vel[0];
    let udot = vel[1];
    let c = 2.0 * vdot + udot * h;
    let hu = grad_h[1];
    let hx_dot: f64 = (2..n).map(|i| grad_h[i] * vel[i]).sum();
    let mut acc = vec![0.0; n];
    acc[0] = 0.5 * c * h * hx_dot - 0.5 * hx_dot * udot - 0.5 * hu * udot * udot;
    acc[1] = -c * hx_dot;
    for i in 2..n {
        acc[i] = 0.5 * c * grad_h[i] * udot;
    }
    acc
}

/// One accepted integration step: state plus recomputed monitors.
#[derive(Clone, Debug)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub monitors: ConservedMonitors,
}

/// Maximum relative drift of each monitor over a trajectory, measured as
/// |m(t) − m(0)| / (1 + |m(0)|).
#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize)]
pub struct MonitorDrift {
    pub c: f64,
    pub c2: f64,
    pub speed: f64,
}

impl MonitorDrift {
    fn update(&mut self, initial: &ConservedMonitors, now: &ConservedMonitors) {
        self.c = self.c.max((now.c - initial.c).abs() / (1.0 + initial.c.abs()));
        self.c2 = self
            .c2
            .max((now.c2 - initial.c2).abs() / (1.0 + initial.c2.abs()));
        self.speed = self
            .speed
            .max((now.speed - initial.speed).abs() / (1.0 + initial.speed.abs()));
    }

    /// Largest of the three relative drifts.
    pub fn max(&self) -> f64 {
        self.c.max(self.c2).max(self.speed)
    }
}

/// A fully recorded geodesic.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub drift: MonitorDrift,
}

impl Trajectory {
    pub fn initial(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().unwrap()
    }

    /// CSV rows `t,v,u,x3,…,xn,c,c2,speed`, one per accepted step.
    pub fn write_csv<W: Write>(&self, coords: &[String], mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for c in coords {
            write!(w, ",{c}")?;
        }
        writeln!(w, ",c,c2,speed")?;
        for p in &self.points {
            write!(w, "{}", p.t)?;
            for x in &p.position {
                write!(w, ",{x}")?;
            }
            writeln!(w, ",{},{},{}", p.monitors.c, p.monitors.c2, p.monitors.speed)?;
        }
        Ok(())
    }
}

fn flatten(state: &GeodesicState) -> Vec<f64> {
    let mut y = state.position.clone();
    y.extend_from_slice(&state.velocity);
    y
}

fn rhs_flat(chart: &DualChart, n: usize, y: &[f64]) -> Result<Vec<f64>, EvalError> {
    let h = chart.profile().eval_jet1(&y[..n])?;
    let mut dy = Vec::with_capacity(2 * n);
    dy.extend_from_slice(&y[n..]);
    dy.extend_from_slice(&acceleration(n, h.value(), h.gradient(), &y[n..]));
    Ok(dy)
}

/// Integrate a geodesic of the dual metric to `t_end`, recording every
/// accepted step with its monitors.
pub fn integrate(
    chart: &DualChart,
    initial: &GeodesicState,
    t_end: f64,
    control: &StepControl,
) -> Result<Trajectory, GeodesicError> {
    let n = chart.dim();
    assert_eq!(initial.position.len(), n);
    assert_eq!(initial.velocity.len(), n);

    let initial_monitors = monitors(chart, initial)?;
    let mut points = Vec::new();
    let mut drift = MonitorDrift::default();
    let mut observer_error: Option<EvalError> = None;

    let result = ode::integrate_adaptive(
        |_t, y| rhs_flat(chart, n, y),
        initial.t,
        &flatten(initial),
        t_end,
        control,
        |t, y| {
            if observer_error.is_some() {
                return;
            }
            let state = GeodesicState {
                t,
                position: y[..n].to_vec(),
                velocity: y[n..].to_vec(),
            };
            match chart.profile().eval_value(&state.position) {
                Ok(h) => {
                    let m = monitors_with_h(h, &state);
                    drift.update(&initial_monitors, &m);
                    points.push(TrajectoryPoint {
                        t,
                        position: state.position,
                        velocity: state.velocity,
                        monitors: m,
                    });
                }
                Err(e) => observer_error = Some(e),
            }
        },
    );
    result?;
    if let Some(e) = observer_error {
        return Err(GeodesicError::Geometry(GeometryError::Eval(e)));
    }
    Ok(Trajectory { points, drift })
}

/// Random g-unit-speed state: position uniform in a box, velocity with
/// coefficients uniform on the unit sphere of the orthonormal frame.
pub fn random_unit_speed_state<R: Rng>(
    chart: &DualChart,
    rng: &mut R,
    position_range: (f64, f64),
) -> Result<GeodesicState, GeodesicError> {
    let n = chart.dim();
    let position: Vec<f64> = (0..n)
        .map(|_| rng.random_range(position_range.0..position_range.1))
        .collect();
    let frame = chart.frame(&position)?;
    // Box-Muller normals, normalized: uniform direction in frame coordinates.
    let mut coeffs: Vec<f64> = (0..n)
        .map(|_| {
            let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect();
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    for c in &mut coeffs {
        *c /= norm;
    }
    let mut velocity = vec![0.0; n];
    for (a, col) in frame.columns().iter().enumerate() {
        for i in 0..n {
            velocity[i] += coeffs[a] * col[i];
        }
    }
    Ok(GeodesicState {
        t: 0.0,
        position,
        velocity,
    })
}

/// Summary of one probe member.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ProbeMember {
    pub drift: MonitorDrift,
    /// Worst violation margin of |xⁱ(t)| ≤ |x₀ⁱ| + √c₂·t (negative when the
    /// bound holds with room to spare).
    pub growth_excess: f64,
    /// Worst violation margin of max|ẋⁱ| ≤ √c₂.
    pub velocity_excess: f64,
    pub max_abs_u: f64,
    pub steps: usize,
}

/// Ensemble completeness probe report (JSON-serializable).
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ProbeReport {
    pub profile: String,
    pub ensemble: usize,
    pub horizon: f64,
    pub max_drift: MonitorDrift,
    pub max_growth_excess: f64,
    pub max_velocity_excess: f64,
    pub max_abs_u: f64,
    pub total_steps: usize,
}

/// Integrate an ensemble of random unit-speed geodesics to the horizon,
/// asserting the linear growth bound on every accepted step. Members run
/// concurrently; each is seeded independently so the report is deterministic.
pub fn completeness_probe(
    chart: &DualChart,
    ensemble: usize,
    horizon: f64,
    control: &StepControl,
    seed: u64,
) -> Result<ProbeReport, GeodesicError> {
    let members: Vec<Result<ProbeMember, GeodesicError>> = (0..ensemble)
        .into_par_iter()
        .map(|member| {
            let mut rng =
                StdRng::seed_from_u64(seed ^ (member as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let initial = random_unit_speed_state(chart, &mut rng, (-1.0, 1.0))?;
            probe_member(chart, member, &initial, horizon, control)
        })
        .collect();

    let mut report = ProbeReport {
        profile: chart.profile_text().to_owned(),
        ensemble,
        horizon,
        max_drift: MonitorDrift::default(),
        max_growth_excess: f64::NEG_INFINITY,
        max_velocity_excess: f64::NEG_INFINITY,
        max_abs_u: 0.0,
        total_steps: 0,
    };
    for m in members {
        let m = m?;
        report.max_drift.c = report.max_drift.c.max(m.drift.c);
        report.max_drift.c2 = report.max_drift.c2.max(m.drift.c2);
        report.max_drift.speed = report.max_drift.speed.max(m.drift.speed);
        report.max_growth_excess = report.max_growth_excess.max(m.growth_excess);
        report.max_velocity_excess = report.max_velocity_excess.max(m.velocity_excess);
        report.max_abs_u = report.max_abs_u.max(m.max_abs_u);
        report.total_steps += m.steps;
    }
    Ok(report)
}

fn probe_member(
    chart: &DualChart,
    member: usize,
    initial: &GeodesicState,
    horizon: f64,
    control: &StepControl,
) -> Result<ProbeMember, GeodesicError> {
    let n = chart.dim();
    let initial_monitors = monitors(chart, initial)?;
    let sqrt_c2 = initial_monitors.c2.max(0.0).sqrt();
    let x0: Vec<f64> = initial.position[2..].to_vec();
    let t0 = initial.t;

    let mut drift = MonitorDrift::default();
    let mut growth_excess = f64::NEG_INFINITY;
    let mut velocity_excess = f64::NEG_INFINITY;
    let mut max_abs_u: f64 = 0.0;
    let mut steps = 0usize;
    let mut violation: Option<(usize, f64, f64)> = None;
    let mut observer_error: Option<EvalError> = None;

    ode::integrate_adaptive(
        |_t, y| rhs_flat(chart, n, y),
        t0,
        &flatten(initial),
        horizon,
        control,
        |t, y| {
            if violation.is_some() || observer_error.is_some() {
                return;
            }
            steps += 1;
            let state = GeodesicState {
                t,
                position: y[..n].to_vec(),
                velocity: y[n..].to_vec(),
            };
            let h = match chart.profile().eval_value(&state.position) {
                Ok(h) => h,
                Err(e) => {
                    observer_error = Some(e);
                    return;
                }
            };
            drift.update(&initial_monitors, &monitors_with_h(h, &state));
            max_abs_u = max_abs_u.max(state.position[1].abs());
            let allowed = sqrt_c2 * (t - t0);
            for i in 2..n {
                let excess = state.position[i].abs() - x0[i - 2].abs() - allowed;
                growth_excess = growth_excess.max(excess);
                if excess > GROWTH_BOUND_TOL {
                    violation = Some((i, t, excess));
                    return;
                }
                velocity_excess =
                    velocity_excess.max(state.velocity[i].abs() - sqrt_c2);
            }
        },
    )?;
    if let Some((coordinate, t, excess)) = violation {
        return Err(GeodesicError::GrowthBound {
            member,
            coordinate,
            t,
            excess,
        });
    }
    if let Some(e) = observer_error {
        return Err(GeodesicError::Geometry(GeometryError::Eval(e)));
    }
    Ok(ProbeMember {
        drift,
        growth_excess,
        velocity_excess,
        max_abs_u,
        steps,
    })
}
