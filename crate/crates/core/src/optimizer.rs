//! Maximizing the probability that both Bob and Charlie identify the state.
//!
//! With the constraints saturated the search space is three-dimensional:
//! `t ∈ [s, 1]`, `q1b ∈ [s²/t², 1]` with `q2b = s²/(t²·q1b)`, and
//! `q1c ∈ [t², 1]` with `q2c = t²/q1c`. The closed form has two regimes
//! separated at `s = 3 − 2√2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit, Result};
use crate::protocol::{joint_success_prob, ProtocolParams};
use crate::search::golden_section;

/// `3 − 2√2`, where the symmetric and symmetry-broken optima cross.
pub fn regime_boundary() -> f64 {
    3.0 - 2.0 * std::f64::consts::SQRT_2
}

/// `(1 − √s)²`, all four failure weights equal to `t = √s`.
pub fn symmetric_branch(s: f64) -> f64 {
    (1.0 - s.sqrt()).powi(2)
}

/// `½(1 − s)²`, one of the two states ignored by both observers.
pub fn broken_branch(s: f64) -> f64 {
    0.5 * (1.0 - s).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Symmetric,
    SymmetryBroken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumReport {
    pub s: f64,
    pub pbc_max: f64,
    pub argmax: ProtocolParams,
    pub regime: Regime,
    pub method: Method,
    /// Other maximizers: the label-swapped optimum for the closed form, grid
    /// cells tied with the best cell for the numeric search. Canonical
    /// ordering (`q1b ≤ q2b`) is applied before de-duplication.
    pub ties: Vec<ProtocolParams>,
}

fn canonical(p: ProtocolParams) -> ProtocolParams {
    if p.q1b() > p.q2b() {
        p.swapped()
    } else {
        p
    }
}

pub fn pbc_closed_max(s: f64) -> Result<OptimumReport> {
    check_unit("s", s)?;
    let t = s.sqrt();
    if s < regime_boundary() {
        Ok(OptimumReport {
            s,
            pbc_max: symmetric_branch(s),
            argmax: ProtocolParams::new(s, t, t, t, t, t)?,
            regime: Regime::Symmetric,
            method: Method::ClosedForm,
            ties: Vec::new(),
        })
    } else {
        let argmax = ProtocolParams::new(s, t, s, 1.0, s, 1.0)?;
        let ties = if s < 1.0 {
            vec![argmax.swapped()]
        } else {
            Vec::new()
        };
        Ok(OptimumReport {
            s,
            pbc_max: broken_branch(s),
            argmax,
            regime: Regime::SymmetryBroken,
            method: Method::ClosedForm,
            ties,
        })
    }
}

/// Grid and refinement settings for [`pbc_numeric_max`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericSearch {
    pub grid_density: usize,
    pub refine_iters: usize,
    /// Objective gain per pass below which refinement counts as converged.
    pub tolerance: f64,
}

impl Default for NumericSearch {
    fn default() -> Self {
        NumericSearch {
            grid_density: 64,
            refine_iters: 200,
            tolerance: 1e-9,
        }
    }
}

/// Unit-cube coordinates `(u_t, u_b, u_c)` mapped onto saturated parameters.
#[derive(Debug, Clone, Copy)]
struct Chart {
    s: f64,
}

impl Chart {
    fn weights(&self, u: [f64; 3]) -> (f64, [f64; 4]) {
        let s = self.s;
        let t = s + (1.0 - s) * u[0];
        let lo_b = if t > 0.0 {
            (s / t).powi(2).min(1.0)
        } else {
            0.0
        };
        let q1b = lo_b + (1.0 - lo_b) * u[1];
        let q2b = if q1b > 0.0 {
            (lo_b / q1b).min(1.0)
        } else {
            0.0
        };
        let lo_c = t * t;
        let q1c = lo_c + (1.0 - lo_c) * u[2];
        let q2c = if q1c > 0.0 {
            (lo_c / q1c).min(1.0)
        } else {
            0.0
        };
        (t, [q1b, q2b, q1c, q2c])
    }

    fn objective(&self, u: [f64; 3]) -> f64 {
        let (_, [q1b, q2b, q1c, q2c]) = self.weights(u);
        0.5 * ((1.0 - q1b) * (1.0 - q1c) + (1.0 - q2b) * (1.0 - q2c))
    }

    fn params(&self, u: [f64; 3]) -> Result<ProtocolParams> {
        let (t, [q1b, q2b, q1c, q2c]) = self.weights(u);
        ProtocolParams::new(self.s, t, q1b, q2b, q1c, q2c)
    }
}

/// Grid search over the saturated parameter box followed by coordinate-wise
/// golden-section refinement. Independent of the closed form.
pub fn pbc_numeric_max(s: f64, search: &NumericSearch) -> Result<OptimumReport> {
    check_unit("s", s)?;
    let chart = Chart { s };
    let n = search.grid_density.max(2);
    let step = 1.0 / (n - 1) as f64;
    let at = |k: usize| k as f64 * step;

    // cells in lexicographic index order; ties keep the lowest index
    let cells: Vec<([f64; 3], f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..n).flat_map(move |j| {
                (0..n).map(move |k| {
                    let u = [at(i), at(j), at(k)];
                    (u, chart.objective(u))
                })
            })
        })
        .collect();
    let grid_best = cells
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &(_, v)| acc.max(v));
    let mut tied: Vec<[f64; 3]> = cells
        .iter()
        .filter(|&&(_, v)| grid_best - v <= 1e-12)
        .map(|&(u, _)| u)
        .collect();
    let mut u = tied[0];
    let mut value = grid_best;

    for _ in 0..search.refine_iters {
        let before = value;
        for axis in 0..3 {
            let lo = (u[axis] - step).max(0.0);
            let hi = (u[axis] + step).min(1.0);
            let (x, neg) = golden_section(
                |x| {
                    let mut v = u;
                    v[axis] = x;
                    -chart.objective(v)
                },
                lo,
                hi,
            );
            if -neg > value {
                u[axis] = x;
                value = -neg;
            }
        }
        if value - before <= 1e-15 {
            break;
        }
    }

    let argmax = canonical(chart.params(u)?);
    let symmetric =
        (argmax.q1b() - argmax.q2b()).abs() < 1e-3 && (argmax.q1c() - argmax.q2c()).abs() < 1e-3;
    let regime = if symmetric {
        Regime::Symmetric
    } else {
        Regime::SymmetryBroken
    };

    tied.remove(0);
    let mut ties: Vec<ProtocolParams> = Vec::new();
    for cell in tied {
        let p = canonical(chart.params(cell)?);
        if !ties.contains(&p) {
            ties.push(p);
        }
    }

    Ok(OptimumReport {
        s,
        pbc_max: joint_success_prob(&argmax),
        argmax,
        regime,
        method: Method::Numeric,
        ties,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn boundary_value() {
        assert_abs_diff_eq!(regime_boundary(), 0.17157287525381, epsilon = 1e-13);
        let b = regime_boundary();
        assert!((symmetric_branch(b) - broken_branch(b)).abs() < 1e-12);
        assert_abs_diff_eq!(
            symmetric_branch(b),
            6.0 - 4.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert!(symmetric_branch(b - 0.01) > broken_branch(b - 0.01));
        assert!(symmetric_branch(b + 0.01) < broken_branch(b + 0.01));
    }

    #[test]
    fn closed_form_examples() {
        let r = pbc_closed_max(0.0).unwrap();
        assert_eq!(r.pbc_max, 1.0);
        assert_eq!(r.regime, Regime::Symmetric);

        let r = pbc_closed_max(0.04).unwrap();
        assert_abs_diff_eq!(r.pbc_max, 0.64, epsilon = 1e-15);
        assert_eq!(r.regime, Regime::Symmetric);
        assert_abs_diff_eq!(r.argmax.t(), 0.2, epsilon = 1e-15);

        let r = pbc_closed_max(0.5).unwrap();
        assert_abs_diff_eq!(r.pbc_max, 0.125, epsilon = 1e-15);
        assert_eq!(r.regime, Regime::SymmetryBroken);
        assert_eq!((r.argmax.q1b(), r.argmax.q2b()), (0.5, 1.0));
        assert_eq!(r.ties.len(), 1);

        let r = pbc_closed_max(regime_boundary()).unwrap();
        assert_abs_diff_eq!(r.pbc_max, 0.3431457505076194, epsilon = 1e-12);

        assert!(pbc_closed_max(1.2).is_err());
    }

    #[test]
    fn closed_argmax_attains_the_maximum() {
        for k in 0..=20 {
            let s = k as f64 / 20.0;
            let r = pbc_closed_max(s).unwrap();
            assert_abs_diff_eq!(joint_success_prob(&r.argmax), r.pbc_max, epsilon = 1e-9);
            for tie in &r.ties {
                assert_abs_diff_eq!(joint_success_prob(tie), r.pbc_max, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn numeric_matches_closed_form() {
        let search = NumericSearch::default();
        for (s, want) in [(0.04, 0.64), (0.5, 0.125), (0.9, 0.005)] {
            let r = pbc_numeric_max(s, &search).unwrap();
            assert_abs_diff_eq!(r.pbc_max, want, epsilon = 1e-5);
            assert_eq!(r.method, Method::Numeric);
        }
        let r = pbc_numeric_max(0.5, &search).unwrap();
        assert_eq!(r.regime, Regime::SymmetryBroken);
        assert_abs_diff_eq!(r.argmax.q2b(), 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(r.argmax.q2c(), 1.0, epsilon = 1e-4);
        assert_abs_diff_eq!(r.argmax.t(), 0.5f64.sqrt(), epsilon = 1e-4);
    }

    #[test]
    fn numeric_handles_orthogonal_states() {
        let r = pbc_numeric_max(0.0, &NumericSearch::default()).unwrap();
        assert_abs_diff_eq!(r.pbc_max, 1.0, epsilon = 1e-12);
    }
}
