//! Forward-mode truncated Taylor (jet) arithmetic of orders 1 and 2.
//!
//! A [`Jet2`] carries a value, its gradient, and its Hessian through every
//! arithmetic node, which is exactly the derivative depth the curvature
//! formulas need. The Hessian is stored as a packed upper triangle, so
//! `hessian(i, j) == hessian(j, i)` holds bit-exactly.

use thiserror::Error;

/// Evaluation failure of a partial operation.
#[derive(Clone, Copy, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {value}")]
    LogNonPositive { value: f64 },
    #[error("zero raised to negative power {exponent}")]
    ZeroToNegativePower { exponent: i32 },
}

#[inline]
fn tri_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Packed index of the (i, j) Hessian entry, i ≤ j.
#[inline]
fn tri_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n + 1 - i) / 2 + (j - i)
}

/// Second-order jet: value, gradient, and packed symmetric Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    n: usize,
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        Jet2 {
            n,
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; tri_len(n)],
        }
    }

    /// Seed jet for coordinate `index`: unit gradient entry, zero Hessian.
    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut j = Jet2::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hess[tri_index(self.n, i, j)]
    }

    /// Hessian expanded to a dense row-major n×n matrix.
    pub fn hessian_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.hessian(i, j);
            }
        }
        m
    }

    pub fn add(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.n, rhs.n);
        Jet2 {
            n: self.n,
            value: self.value + rhs.value,
            grad: zip_map(&self.grad, &rhs.grad, |a, b| a + b),
            hess: zip_map(&self.hess, &rhs.hess, |a, b| a + b),
        }
    }

    pub fn sub(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.n, rhs.n);
        Jet2 {
            n: self.n,
            value: self.value - rhs.value,
            grad: zip_map(&self.grad, &rhs.grad, |a, b| a - b),
            hess: zip_map(&self.hess, &rhs.hess, |a, b| a - b),
        }
    }

    pub fn neg(&self) -> Jet2 {
        Jet2 {
            n: self.n,
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Jet2 {
        Jet2 {
            n: self.n,
            value: k * self.value,
            grad: self.grad.iter().map(|g| k * g).collect(),
            hess: self.hess.iter().map(|h| k * h).collect(),
        }
    }

    pub fn mul(&self, rhs: &Jet2) -> Jet2 {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Jet2::constant(n, self.value * rhs.value);
        for i in 0..n {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                out.hess[idx] = self.hess[idx] * rhs.value
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i]
                    + self.value * rhs.hess[idx];
                idx += 1;
            }
        }
        out
    }

    pub fn div(&self, rhs: &Jet2) -> Result<Jet2, EvalError> {
        debug_assert_eq!(self.n, rhs.n);
        if rhs.value == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let n = self.n;
        let q = self.value / rhs.value;
        let mut out = Jet2::constant(n, q);
        for i in 0..n {
            out.grad[i] = (self.grad[i] - q * rhs.grad[i]) / rhs.value;
        }
        // q_ij = (f_ij − q_i g_j − q_j g_i − q g_ij) / g
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                out.hess[idx] = (self.hess[idx]
                    - out.grad[i] * rhs.grad[j]
                    - out.grad[j] * rhs.grad[i]
                    - q * rhs.hess[idx])
                    / rhs.value;
                idx += 1;
            }
        }
        Ok(out)
    }

    /// Chain rule through a scalar map with derivatives `(f, f', f'')` at the
    /// jet's value.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet2 {
        let n = self.n;
        let mut out = Jet2::constant(n, f);
        for i in 0..n {
            out.grad[i] = df * self.grad[i];
        }
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                out.hess[idx] = d2f * self.grad[i] * self.grad[j] + df * self.hess[idx];
                idx += 1;
            }
        }
        out
    }

    pub fn powi(&self, k: i32) -> Result<Jet2, EvalError> {
        if k == 0 {
            return Ok(Jet2::constant(self.n, 1.0));
        }
        if self.value == 0.0 && k < 0 {
            return Err(EvalError::ZeroToNegativePower { exponent: k });
        }
        let v = self.value;
        let f = v.powi(k);
        let df = f64::from(k) * v.powi(k - 1);
        let d2f = f64::from(k) * f64::from(k - 1) * v.powi(k - 2);
        Ok(self.chain(f, df, d2f))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Result<Jet2, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::LogNonPositive { value: self.value });
        }
        let inv = 1.0 / self.value;
        Ok(self.chain(self.value.ln(), inv, -inv * inv))
    }

    /// Drop the Hessian, keeping value and gradient.
    pub fn to_jet1(&self) -> Jet1 {
        Jet1::from_parts(self.value, self.grad.clone())
    }

    /// Chain rule through the diagonal substitution xᵢ ↦ sᵢ·xᵢ: the jet of
    /// `f(s ⊙ x)` given the jet of `f` at `s ⊙ x`.
    pub fn rescale_inputs(&self, scale: &[f64]) -> Jet2 {
        debug_assert_eq!(scale.len(), self.n);
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            out.grad[i] *= scale[i];
        }
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                out.hess[idx] *= scale[i] * scale[j];
                idx += 1;
            }
        }
        out
    }
}

/// First-order jet: value and gradient only. Used where Hessians are not
/// needed (geodesic right-hand sides, Lie brackets of frame fields).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    n: usize,
    value: f64,
    grad: Vec<f64>,
}

impl Jet1 {
    pub fn constant(n: usize, value: f64) -> Self {
        Jet1 {
            n,
            value,
            grad: vec![0.0; n],
        }
    }

    pub fn from_parts(value: f64, grad: Vec<f64>) -> Self {
        Jet1 {
            n: grad.len(),
            value,
            grad,
        }
    }

    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut j = Jet1::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    pub fn add(&self, rhs: &Jet1) -> Jet1 {
        Jet1 {
            n: self.n,
            value: self.value + rhs.value,
            grad: zip_map(&self.grad, &rhs.grad, |a, b| a + b),
        }
    }

    pub fn sub(&self, rhs: &Jet1) -> Jet1 {
        Jet1 {
            n: self.n,
            value: self.value - rhs.value,
            grad: zip_map(&self.grad, &rhs.grad, |a, b| a - b),
        }
    }

    pub fn neg(&self) -> Jet1 {
        Jet1 {
            n: self.n,
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Jet1 {
        Jet1 {
            n: self.n,
            value: k * self.value,
            grad: self.grad.iter().map(|g| k * g).collect(),
        }
    }

    pub fn mul(&self, rhs: &Jet1) -> Jet1 {
        let mut out = Jet1::constant(self.n, self.value * rhs.value);
        for i in 0..self.n {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        out
    }

    pub fn div(&self, rhs: &Jet1) -> Result<Jet1, EvalError> {
        if rhs.value == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let q = self.value / rhs.value;
        let mut out = Jet1::constant(self.n, q);
        for i in 0..self.n {
            out.grad[i] = (self.grad[i] - q * rhs.grad[i]) / rhs.value;
        }
        Ok(out)
    }

    fn chain(&self, f: f64, df: f64) -> Jet1 {
        let mut out = Jet1::constant(self.n, f);
        for i in 0..self.n {
            out.grad[i] = df * self.grad[i];
        }
        out
    }

    pub fn powi(&self, k: i32) -> Result<Jet1, EvalError> {
        if k == 0 {
            return Ok(Jet1::constant(self.n, 1.0));
        }
        if self.value == 0.0 && k < 0 {
            return Err(EvalError::ZeroToNegativePower { exponent: k });
        }
        let v = self.value;
        Ok(self.chain(v.powi(k), f64::from(k) * v.powi(k - 1)))
    }

    pub fn sin(&self) -> Jet1 {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c)
    }

    pub fn cos(&self) -> Jet1 {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s)
    }

    pub fn exp(&self) -> Jet1 {
        let e = self.value.exp();
        self.chain(e, e)
    }

    pub fn ln(&self) -> Result<Jet1, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::LogNonPositive { value: self.value });
        }
        Ok(self.chain(self.value.ln(), 1.0 / self.value))
    }
}

fn zip_map(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}
