//! Real-valued test functions with box bounds and known optima.
//!
//! Every function is written so that its minimum value is exactly 0 at the
//! documented optimum point. A shift translates the optimum point by a random
//! vector that keeps it inside the middle 80% of the box.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::Objective;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel12,
    Levy,
    Zakharov,
    StyblinskiTang,
    SchafferF7,
}

struct Entry {
    name: &'static str,
    kind: Kind,
    lo: f64,
    hi: f64,
    min_dim: usize,
    /// Coordinate of the unshifted optimum (same in every dimension).
    opt_coord: f64,
    formula: &'static str,
}

// Root of 4x^3 - 32x + 5 = 0 in [-5, -2].
const STYBLINSKI_TANG_ARGMIN: f64 = -2.903_534_027_771_178;

const REGISTRY: [Entry; 10] = [
    Entry { name: "sphere", kind: Kind::Sphere, lo: -100.0, hi: 100.0, min_dim: 1, opt_coord: 0.0, formula: "sum x_i^2" },
    Entry { name: "rosenbrock", kind: Kind::Rosenbrock, lo: -30.0, hi: 30.0, min_dim: 2, opt_coord: 1.0, formula: "sum 100(x_{i+1}-x_i^2)^2 + (1-x_i)^2" },
    Entry { name: "rastrigin", kind: Kind::Rastrigin, lo: -5.12, hi: 5.12, min_dim: 1, opt_coord: 0.0, formula: "10d + sum x_i^2 - 10cos(2 pi x_i)" },
    Entry { name: "ackley", kind: Kind::Ackley, lo: -32.768, hi: 32.768, min_dim: 1, opt_coord: 0.0, formula: "20(1-exp(-0.2 sqrt(mean x_i^2))) + e - exp(mean cos(2 pi x_i))" },
    Entry { name: "griewank", kind: Kind::Griewank, lo: -600.0, hi: 600.0, min_dim: 1, opt_coord: 0.0, formula: "1 + sum x_i^2/4000 - prod cos(x_i/sqrt(i))" },
    Entry { name: "schwefel_1_2", kind: Kind::Schwefel12, lo: -100.0, hi: 100.0, min_dim: 1, opt_coord: 0.0, formula: "sum_i (sum_{j<=i} x_j)^2" },
    Entry { name: "levy", kind: Kind::Levy, lo: -10.0, hi: 10.0, min_dim: 1, opt_coord: 1.0, formula: "sin^2(pi w_1) + sum (w_i-1)^2(1+10sin^2(pi w_i+1)) + (w_d-1)^2(1+sin^2(2 pi w_d)), w=1+(x-1)/4" },
    Entry { name: "zakharov", kind: Kind::Zakharov, lo: -5.0, hi: 10.0, min_dim: 1, opt_coord: 0.0, formula: "sum x_i^2 + (sum 0.5 i x_i)^2 + (sum 0.5 i x_i)^4" },
    Entry { name: "styblinski_tang", kind: Kind::StyblinskiTang, lo: -5.0, hi: 5.0, min_dim: 1, opt_coord: STYBLINSKI_TANG_ARGMIN, formula: "sum 0.5(x_i^4-16x_i^2+5x_i) - m, m = per-coordinate minimum" },
    Entry { name: "schaffer_f7", kind: Kind::SchafferF7, lo: -100.0, hi: 100.0, min_dim: 2, opt_coord: 0.0, formula: "(mean_i sqrt(s_i)(1+sin^2(50 s_i^0.2)))^2, s_i = sqrt(x_i^2+x_{i+1}^2)" },
];

/// Summary of a registered function, for listings.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionInfo {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub min_dim: usize,
    pub formula: &'static str,
}

/// All registered functions, in registry order.
pub fn registry() -> Vec<FunctionInfo> {
    REGISTRY
        .iter()
        .map(|e| FunctionInfo {
            name: e.name,
            lo: e.lo,
            hi: e.hi,
            min_dim: e.min_dim,
            formula: e.formula,
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RealFunction {
    name: &'static str,
    kind: Kind,
    dim: usize,
    lo: f64,
    hi: f64,
    optimum_point: Vec<f64>,
    /// Applied as `x - shift` before the base formula.
    shift: Option<Vec<f64>>,
}

/// Builds a function by registry name. With `shift_seed`, the optimum point is
/// moved to a uniform random point in the middle 80% of the box.
pub fn make_function(name: &str, dim: usize, shift_seed: Option<u64>) -> Result<RealFunction> {
    let entry = REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::Name(name.to_string()))?;
    if dim < entry.min_dim {
        return Err(Error::Dimension(format!(
            "{name} needs dim >= {}, got {dim}",
            entry.min_dim
        )));
    }
    let base_opt = vec![entry.opt_coord; dim];
    let (optimum_point, shift) = match shift_seed {
        None => (base_opt, None),
        Some(seed) => {
            let mut rng = RngStream::new(seed, crate::rng::streams::SHIFT);
            let margin = 0.1 * (entry.hi - entry.lo);
            let point: Vec<f64> = (0..dim)
                .map(|_| rng.uniform_in(entry.lo + margin, entry.hi - margin))
                .collect();
            let shift = point.iter().zip(&base_opt).map(|(p, o)| p - o).collect();
            (point, Some(shift))
        }
    };
    Ok(RealFunction {
        name: entry.name,
        kind: entry.kind,
        dim,
        lo: entry.lo,
        hi: entry.hi,
        optimum_point,
        shift,
    })
}

impl RealFunction {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Per-dimension bounds (identical across dimensions).
    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn optimum_value(&self) -> f64 {
        0.0
    }

    pub fn optimum_point(&self) -> &[f64] {
        &self.optimum_point
    }

    pub fn shift(&self) -> Option<&[f64]> {
        self.shift.as_deref()
    }

    /// Clamps a coordinate vector into the box in place.
    pub fn clamp(&self, x: &mut [f64]) {
        for v in x {
            *v = v.clamp(self.lo, self.hi);
        }
    }

    /// Evaluates at `x`, clamping out-of-box coordinates first.
    pub fn evaluate(&self, x: &[f64]) -> Result<Objective> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "{} expects {} coordinates, got {}",
                self.name,
                self.dim,
                x.len()
            )));
        }
        let z: Vec<f64> = match &self.shift {
            None => x.iter().map(|v| v.clamp(self.lo, self.hi)).collect(),
            Some(s) => x
                .iter()
                .zip(s)
                .map(|(v, s)| v.clamp(self.lo, self.hi) - s)
                .collect(),
        };
        Objective::new(base_value(self.kind, &z))
    }
}

fn base_value(kind: Kind, x: &[f64]) -> f64 {
    let d = x.len() as f64;
    match kind {
        Kind::Sphere => x.iter().map(|v| v * v).sum(),
        Kind::Rosenbrock => x
            .windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum(),
        Kind::Rastrigin => x
            .iter()
            .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
            .sum(),
        Kind::Ackley => {
            let sq = x.iter().map(|v| v * v).sum::<f64>() / d;
            let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
            20.0 * (1.0 - (-0.2 * sq.sqrt()).exp()) + (E - cs.exp())
        }
        Kind::Griewank => {
            let s = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
            let p: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                .product();
            1.0 - p + s
        }
        Kind::Schwefel12 => {
            let mut acc = 0.0;
            let mut total = 0.0;
            for v in x {
                acc += v;
                total += acc * acc;
            }
            total
        }
        Kind::Levy => {
            // sin(pi w) is evaluated as -sin(pi (w - 1)) so the optimum is exactly 0.
            let w: Vec<f64> = x.iter().map(|v| (v - 1.0) / 4.0).collect(); // w - 1
            let n = w.len();
            let mut total = (PI * w[0]).sin().powi(2);
            for wi in &w[..n - 1] {
                total += wi * wi * (1.0 + 10.0 * (PI * (wi + 1.0) + 1.0).sin().powi(2));
            }
            let last = w[n - 1];
            total + last * last * (1.0 + (2.0 * PI * last).sin().powi(2))
        }
        Kind::Zakharov => {
            let s1: f64 = x.iter().map(|v| v * v).sum();
            let s2: f64 = x
                .iter()
                .enumerate()
                .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
                .sum();
            s1 + s2 * s2 + s2.powi(4)
        }
        Kind::StyblinskiTang => {
            let m = styblinski_term(STYBLINSKI_TANG_ARGMIN);
            x.iter().map(|&v| styblinski_term(v) - m).sum()
        }
        Kind::SchafferF7 => {
            let n = x.len() - 1;
            let mean = x
                .windows(2)
                .map(|w| {
                    let s = (w[0] * w[0] + w[1] * w[1]).sqrt();
                    s.sqrt() * (1.0 + (50.0 * s.powf(0.2)).sin().powi(2))
                })
                .sum::<f64>()
                / n as f64;
            mean * mean
        }
    }
}

fn styblinski_term(v: f64) -> f64 {
    0.5 * (v.powi(4) - 16.0 * v * v + 5.0 * v)
}
