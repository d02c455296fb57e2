//! Scalar fields: a parsed expression bound to an ordered coordinate list,
//! evaluated with exact first and second derivatives via jet arithmetic.

use crate::expr::{self, Expr, ParseError};
use crate::jet::{EvalError, Jet1, Jet2};

/// A wave profile (or metric component) as a function of chart coordinates.
///
/// Immutable after construction; evaluation is pure, so fields may be shared
/// across threads freely.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    coords: Vec<String>,
}

impl ScalarField {
    /// Bind an expression tree to coordinate names. The tree must only
    /// reference indices below `coords.len()`.
    pub fn new(expr: Expr, coords: Vec<String>) -> Self {
        debug_assert!(expr
            .coordinates_used()
            .iter()
            .all(|i| *i < coords.len()));
        ScalarField { expr, coords }
    }

    /// Parse `text` over the declared coordinate names.
    pub fn parse(text: &str, coords: &[String]) -> Result<Self, ParseError> {
        let expr = expr::parse(text, coords)?;
        Ok(ScalarField {
            expr,
            coords: coords.to_vec(),
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn coordinates(&self) -> &[String] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Value, gradient, and Hessian at `point`.
    pub fn eval_jet2(&self, point: &[f64]) -> Result<Jet2, EvalError> {
        assert_eq!(point.len(), self.coords.len(), "point dimension mismatch");
        eval2(&self.expr, point)
    }

    /// Value and gradient at `point`.
    pub fn eval_jet1(&self, point: &[f64]) -> Result<Jet1, EvalError> {
        assert_eq!(point.len(), self.coords.len(), "point dimension mismatch");
        eval1(&self.expr, point)
    }

    pub fn eval_value(&self, point: &[f64]) -> Result<f64, EvalError> {
        Ok(self.eval_jet1(point)?.value())
    }
}

fn eval2(e: &Expr, point: &[f64]) -> Result<Jet2, EvalError> {
    let n = point.len();
    Ok(match e {
        Expr::Const(c) => Jet2::constant(n, *c),
        Expr::Var { index, .. } => Jet2::variable(n, *index, point[*index]),
        Expr::Add(a, b) => eval2(a, point)?.add(&eval2(b, point)?),
        Expr::Sub(a, b) => eval2(a, point)?.sub(&eval2(b, point)?),
        Expr::Mul(a, b) => eval2(a, point)?.mul(&eval2(b, point)?),
        Expr::Div(a, b) => eval2(a, point)?.div(&eval2(b, point)?)?,
        Expr::Neg(a) => eval2(a, point)?.neg(),
        Expr::Pow(a, k) => eval2(a, point)?.powi(*k)?,
        Expr::Sin(a) => eval2(a, point)?.sin(),
        Expr::Cos(a) => eval2(a, point)?.cos(),
        Expr::Exp(a) => eval2(a, point)?.exp(),
        Expr::Log(a) => eval2(a, point)?.ln()?,
    })
}

fn eval1(e: &Expr, point: &[f64]) -> Result<Jet1, EvalError> {
    let n = point.len();
    Ok(match e {
        Expr::Const(c) => Jet1::constant(n, *c),
        Expr::Var { index, .. } => Jet1::variable(n, *index, point[*index]),
        Expr::Add(a, b) => eval1(a, point)?.add(&eval1(b, point)?),
        Expr::Sub(a, b) => eval1(a, point)?.sub(&eval1(b, point)?),
        Expr::Mul(a, b) => eval1(a, point)?.mul(&eval1(b, point)?),
        Expr::Div(a, b) => eval1(a, point)?.div(&eval1(b, point)?)?,
        Expr::Neg(a) => eval1(a, point)?.neg(),
        Expr::Pow(a, k) => eval1(a, point)?.powi(*k)?,
        Expr::Sin(a) => eval1(a, point)?.sin(),
        Expr::Cos(a) => eval1(a, point)?.cos(),
        Expr::Exp(a) => eval1(a, point)?.exp(),
        Expr::Log(a) => eval1(a, point)?.ln()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn coords4() -> Vec<String> {
        ["v", "u", "x3", "x4"].iter().map(|s| s.to_string()).collect()
    }

    fn field(text: &str) -> ScalarField {
        ScalarField::parse(text, &coords4()).unwrap()
    }

    #[test]
    fn quadratic_profile_jet() {
        let f = field("x3^2 + x4^2");
        let j = f.eval_jet2(&[0.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.gradient(), &[0.0, 0.0, 2.0, 4.0]);
        let h = j.hessian_matrix();
        let want = [
            0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 2.0, 0.0, //
            0.0, 0.0, 0.0, 2.0,
        ];
        assert_eq!(h, want);
    }

    #[test]
    fn constant_profile_has_no_derivatives() {
        let f = field("3.25");
        for p in [[0.0, 0.0, 0.0, 0.0], [1.0, -2.0, 0.5, 9.0]] {
            let j = f.eval_jet2(&p).unwrap();
            assert_eq!(j.value(), 3.25);
            assert!(j.gradient().iter().all(|g| *g == 0.0));
            assert!(j.hessian_matrix().iter().all(|h| *h == 0.0));
        }
    }

    #[test]
    fn mixed_partial() {
        let f = field("u*x3");
        let j = f.eval_jet2(&[0.0, 2.0, 3.0, 0.0]).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.gradient()[1], 3.0); // ∂/∂u
        assert_eq!(j.gradient()[2], 2.0); // ∂/∂x3
        assert_eq!(j.hessian(1, 2), 1.0);
    }

    #[test]
    fn domain_errors_surface() {
        let f = field("1/x3");
        assert!(f.eval_jet2(&[0.0, 0.0, 0.0, 0.0]).is_err());
        let g = field("log(x3)");
        assert!(g.eval_jet2(&[0.0, 0.0, -1.0, 0.0]).is_err());
    }

    /// Random polynomial in the given number of variables, max degree 4.
    fn random_poly(rng: &mut StdRng, nvars: usize) -> Expr {
        let terms = rng.random_range(1..=5);
        let mut acc: Option<Expr> = None;
        for _ in 0..terms {
            let coeff = Expr::Const(rng.random_range(-2.0..2.0));
            let mut term = coeff;
            let degree = rng.random_range(0..=4u32);
            for _ in 0..degree {
                let idx = rng.random_range(0..nvars);
                let var = Expr::Var {
                    index: idx,
                    name: format!("c{idx}"),
                };
                term = Expr::Mul(Box::new(term), Box::new(var));
            }
            acc = Some(match acc {
                None => term,
                Some(prev) => Expr::Add(Box::new(prev), Box::new(term)),
            });
        }
        acc.unwrap()
    }

    fn fd_gradient(f: &ScalarField, p: &[f64], h: f64) -> Vec<f64> {
        (0..p.len())
            .map(|i| {
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                pp[i] += h;
                pm[i] -= h;
                (f.eval_value(&pp).unwrap() - f.eval_value(&pm).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    fn fd_hessian(f: &ScalarField, p: &[f64], h: f64) -> Vec<f64> {
        let n = p.len();
        let mut out = vec![0.0; n * n];
        let f0 = f.eval_value(p).unwrap();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    let mut pp = p.to_vec();
                    let mut pm = p.to_vec();
                    pp[i] += h;
                    pm[i] -= h;
                    out[i * n + j] = (f.eval_value(&pp).unwrap() - 2.0 * f0
                        + f.eval_value(&pm).unwrap())
                        / (h * h);
                } else {
                    let eval = |di: f64, dj: f64| {
                        let mut q = p.to_vec();
                        q[i] += di;
                        q[j] += dj;
                        f.eval_value(&q).unwrap()
                    };
                    out[i * n + j] =
                        (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
                }
            }
        }
        out
    }

    #[test]
    fn jets_match_central_differences_on_random_polynomials() {
        let mut rng = StdRng::seed_from_u64(0x4a57);
        let names: Vec<String> = (0..3).map(|i| format!("c{i}")).collect();
        let step = 1e-4;
        let rel_tol = 1e-5;
        for _ in 0..1000 {
            let f = ScalarField::new(random_poly(&mut rng, 3), names.clone());
            let p: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let jet = f.eval_jet2(&p).unwrap();
            let fd_g = fd_gradient(&f, &p, step);
            for (a, b) in jet.gradient().iter().zip(&fd_g) {
                let scale = 1.0 + a.abs().max(b.abs());
                assert!((a - b).abs() / scale < rel_tol, "gradient {a} vs fd {b}");
            }
            let fd_h = fd_hessian(&f, &p, step);
            let h = jet.hessian_matrix();
            for (a, b) in h.iter().zip(&fd_h) {
                let scale = 1.0 + a.abs().max(b.abs());
                assert!((a - b).abs() / scale < rel_tol, "hessian {a} vs fd {b}");
            }
        }
    }

    #[test]
    fn degree_two_polynomials_have_point_independent_hessian() {
        let mut rng = StdRng::seed_from_u64(0x91f2);
        for text in ["x3^2 + u*2 - x4^2 + x3*x4", "u^2 + 3*x3", "x3*x4 - u*u"] {
            let f = ScalarField::parse(text, &coords4()).unwrap();
            let base = f.eval_jet2(&[0.0; 4]).unwrap().hessian_matrix();
            for _ in 0..16 {
                let p: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
                assert_eq!(f.eval_jet2(&p).unwrap().hessian_matrix(), base, "{text} at {p:?}");
            }
        }
    }
}
