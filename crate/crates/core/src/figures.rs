//! Curve data for the discord figures.
//!
//! With equal weights Bob succeeds with `P_b = 1 − r` and Charlie with
//! `P_c = 1 − t`, so fixing one success probability and sweeping the other
//! traces `D_Δ` along a line of the `(r, t)` square.

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{relative_difference, symmetrized_discord};
use crate::error::{check_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    /// `None` where the curve is undefined (both discords vanish).
    pub y: Option<f64>,
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(Error::Constraint(format!(
            "need at least 2 points, got {points}"
        )));
    }
    Ok(())
}

/// Midpoint grid on (0, 1): the classical corner is never sampled.
fn midpoints(points: usize) -> impl IndexedParallelIterator<Item = f64> {
    (0..points)
        .into_par_iter()
        .map(move |i| (i as f64 + 0.5) / points as f64)
}

/// `(P_b, D_Δ)` at fixed `P_c`.
pub fn relative_difference_vs_pb(pc: f64, points: usize) -> Result<Vec<CurvePoint>> {
    check_unit("pc", pc)?;
    check_points(points)?;
    let t = 1.0 - pc;
    midpoints(points)
        .map(|pb| {
            Ok(CurvePoint {
                x: pb,
                y: relative_difference(1.0 - pb, t)?,
            })
        })
        .collect()
}

/// `(P_c, D_Δ)` at fixed `P_b`.
pub fn relative_difference_vs_pc(pb: f64, points: usize) -> Result<Vec<CurvePoint>> {
    check_unit("pb", pb)?;
    check_points(points)?;
    let r = 1.0 - pb;
    midpoints(points)
        .map(|pc| {
            Ok(CurvePoint {
                x: pc,
                y: relative_difference(r, 1.0 - pc)?,
            })
        })
        .collect()
}

/// `(s, D_symm)` with `t = s^α`, `r = s^(1−α)` on an endpoint-inclusive grid.
pub fn symmetrized_vs_overlap(exponent: f64, points: usize) -> Result<Vec<CurvePoint>> {
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::OutOfRange {
            name: "exponent",
            value: exponent,
            lo: 0.0,
            hi: 1.0,
        });
    }
    check_points(points)?;
    (0..points)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / (points - 1) as f64;
            let d = symmetrized_discord(s.powf(1.0 - exponent), s.powf(exponent))?;
            Ok(CurvePoint { x: s, y: Some(d) })
        })
        .collect()
}
