//! Adaptive embedded Runge–Kutta 4(5) integration (Dormand–Prince pair)
//! with PI step-size control.
//!
//! The right-hand side may fail (partial profile functions); its error type
//! propagates out of the driver. Steps whose size underflows are reported,
//! never silently clipped.

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum OdeError<E> {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("right-hand side failed at t = {t}: {source}")]
    Rhs { t: f64, source: E },
}

/// Absolute/relative tolerances and step limits.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial step; chosen heuristically when `None`.
    pub initial_step: Option<f64>,
    pub max_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            initial_step: None,
            max_step: 1.0,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (the propagated solution).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Fourth-order embedded weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FACTOR_MIN: f64 = 0.2;
const FACTOR_MAX: f64 = 5.0;
// PI controller exponents for a 5th-order error estimate.
const ALPHA: f64 = 0.7 / 5.0;
const BETA: f64 = 0.4 / 5.0;

/// Integrate `y' = f(t, y)` from `t0` to `t_end`, invoking `observer` at the
/// initial point and after every accepted step.
pub fn integrate_adaptive<E, F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    control: &StepControl,
    mut observer: O,
) -> Result<(), OdeError<E>>
where
    F: FnMut(f64, &[f64]) -> Result<Vec<f64>, E>,
    O: FnMut(f64, &[f64]),
{
    let dim = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    observer(t, &y);
    if t_end <= t0 {
        return Ok(());
    }

    let rhs = |f: &mut F, t: f64, y: &[f64]| -> Result<Vec<f64>, OdeError<E>> {
        f(t, y).map_err(|source| OdeError::Rhs { t, source })
    };

    let mut h = control
        .initial_step
        .unwrap_or_else(|| (control.abs_tol.powf(0.2) * 0.1).min(control.max_step))
        .min(t_end - t0);
    let mut err_prev: f64 = 1.0;
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);

    while t < t_end {
        let h_min = 1e-14 * t.abs().max(1.0);
        if h < h_min {
            return Err(OdeError::StepUnderflow { t });
        }
        if t + h > t_end {
            h = t_end - t;
        }

        k.clear();
        k.push(rhs(&mut f, t, &y)?);
        for stage in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..dim {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k.push(rhs(&mut f, t + C[stage] * h, &ys)?);
        }

        let mut y5 = y.clone();
        let mut err_vec = vec![0.0; dim];
        for (j, kj) in k.iter().enumerate() {
            for i in 0..dim {
                y5[i] += h * B5[j] * kj[i];
                err_vec[i] += h * (B5[j] - B4[j]) * kj[i];
            }
        }

        // RMS norm of the error against the mixed tolerance scale.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let scale = control.abs_tol + control.rel_tol * y[i].abs().max(y5[i].abs());
            let e = err_vec[i] / scale;
            err_sq += e * e;
        }
        let err = (err_sq / dim as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
            observer(t, &y);
            let factor = if err == 0.0 {
                FACTOR_MAX
            } else {
                (SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)).clamp(FACTOR_MIN, FACTOR_MAX)
            };
            err_prev = err.max(1e-10);
            h = (h * factor).min(control.max_step);
        } else {
            let factor = (SAFETY * err.powf(-ALPHA)).clamp(FACTOR_MIN, 1.0);
            h *= factor;
        }
    }
    Ok(())
}
