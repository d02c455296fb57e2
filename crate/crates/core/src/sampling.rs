//! Seeded sampling helpers shared by tests, probes, and the CLI: random
//! chart points and random profile expressions over standard coordinates.

use rand::Rng;

use crate::expr::Expr;
use crate::ppwave::standard_coordinates;

/// Uniform random point in `[lo, hi]^dim`.
pub fn point<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..hi)).collect()
}

fn var(dim: usize, index: usize) -> Expr {
    let names = standard_coordinates(dim);
    Expr::Var {
        index,
        name: names[index].clone(),
    }
}

/// Random polynomial profile over (u, x³, …, xⁿ) — never v — with per-term
/// degree at most `max_degree` and coefficients in [−2, 2].
pub fn random_polynomial<R: Rng>(
    rng: &mut R,
    dim: usize,
    max_degree: u32,
    max_terms: usize,
) -> Expr {
    let terms = rng.random_range(1..=max_terms.max(1));
    let mut acc: Option<Expr> = None;
    for _ in 0..terms {
        let mut term = Expr::Const(rng.random_range(-2.0..2.0));
        for _ in 0..rng.random_range(0..=max_degree) {
            let index = rng.random_range(1..dim);
            term = Expr::Mul(Box::new(term), Box::new(var(dim, index)));
        }
        acc = Some(match acc {
            None => term,
            Some(prev) => Expr::Add(Box::new(prev), Box::new(term)),
        });
    }
    acc.unwrap()
}

/// Random smooth wave profile mixing low-degree monomials with trigonometric
/// factors of single coordinates. Coefficients stay in [−1, 1] so metric
/// entries remain well-scaled.
pub fn random_wave_profile<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    let terms = rng.random_range(1..=4);
    let mut acc: Option<Expr> = None;
    for _ in 0..terms {
        let mut term = Expr::Const(rng.random_range(-1.0..1.0));
        for _ in 0..rng.random_range(0..=2u32) {
            let index = rng.random_range(1..dim);
            let factor = match rng.random_range(0..4u8) {
                0 => Expr::Sin(Box::new(var(dim, index))),
                1 => Expr::Cos(Box::new(var(dim, index))),
                _ => var(dim, index),
            };
            term = Expr::Mul(Box::new(term), Box::new(factor));
        }
        acc = Some(match acc {
            None => term,
            Some(prev) => Expr::Add(Box::new(prev), Box::new(term)),
        });
    }
    acc.unwrap()
}
