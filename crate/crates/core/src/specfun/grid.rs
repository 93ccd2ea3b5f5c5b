use std::fmt::Write;

use super::lambda_overlap;
use crate::error::{invalid, Result};
use crate::io::fmt_csv;

/// Λ sampled on a rectangular `(Δξ, Δx̄)` grid at fixed `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub q: f64,
    pub xi_samples: Vec<f64>,
    pub xbar_samples: Vec<f64>,
    /// Row-major, one row per Δξ sample.
    pub values: Vec<f64>,
}

fn sorted(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] <= w[1])
}

impl LambdaGrid {
    pub fn compute(q: f64, xi_samples: Vec<f64>, xbar_samples: Vec<f64>) -> Result<Self> {
        if !(q >= 0.0) {
            return Err(invalid(format!("q must be nonnegative, got {q}")));
        }
        if !sorted(&xi_samples) || !sorted(&xbar_samples) {
            return Err(invalid("grid samples must be sorted"));
        }
        if xbar_samples.first().is_some_and(|&x| x < 0.0) {
            return Err(invalid("transverse separations must be nonnegative"));
        }
        let mut values = Vec::with_capacity(xi_samples.len() * xbar_samples.len());
        for &xi in &xi_samples {
            for &xb in &xbar_samples {
                values.push(lambda_overlap(q, xi, xb));
            }
        }
        Ok(Self {
            q,
            xi_samples,
            xbar_samples,
            values,
        })
    }

    /// Uniform grid with `steps` samples on each inclusive range.
    pub fn uniform(
        q: f64,
        xi_range: (f64, f64),
        xbar_range: (f64, f64),
        steps: usize,
    ) -> Result<Self> {
        Self::compute(
            q,
            linspace(xi_range.0, xi_range.1, steps),
            linspace(xbar_range.0, xbar_range.1, steps),
        )
    }

    pub fn get(&self, i_xi: usize, i_xbar: usize) -> f64 {
        self.values[i_xi * self.xbar_samples.len() + i_xbar]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fraction of samples with `|Λ|` above `threshold`.
    pub fn support_fraction(&self, threshold: f64) -> f64 {
        let n = self.values.iter().filter(|v| v.abs() > threshold).count();
        n as f64 / self.values.len().max(1) as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,delta_xi,delta_xbar,lambda\n");
        for (i, &xi) in self.xi_samples.iter().enumerate() {
            for (k, &xb) in self.xbar_samples.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_csv(self.q),
                    fmt_csv(xi),
                    fmt_csv(xb),
                    fmt_csv(self.get(i, k))
                );
            }
        }
        out
    }
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    b
                } else {
                    a + (b - a) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
