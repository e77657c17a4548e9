//! Quantum correlations of the qubit–ancilla state left by Bob.
//!
//! For overlaps `t = ⟨φ₁|φ₂⟩` and `r = ⟨η₁|η₂⟩` the state is
//! `ρ_AB = ½(|φ₁⟩⟨φ₁| ⊗ |η₁⟩⟨η₁| + |φ₂⟩⟨φ₂| ⊗ |η₂⟩⟨η₂|)`, a rank-2 separable
//! state. Its discords follow in closed form from the Koashi–Winter relation
//! applied to the purification with a fictitious qubit `D`. Right discord
//! measures the ancilla `B`, left discord measures the qubit `A`.
//!
//! Independent checks live here too: [`discord_by_definition`] minimizes the
//! post-measurement conditional entropy directly, and [`concurrence_ef`]
//! evaluates Wootters' formula on `ρ_AD`.

use serde::Serialize;

use crate::error::{check_unit, Error, Result};
use crate::protocol::{ancilla_pair, prepare_pair};
use crate::qmath::{
    c, entropy_of_matrix, hermitian_eigen, hermitian_eigenvalues, partial_trace, tangle_entropy,
    von_neumann_entropy, CMatrix, CVector, DensityOperator, Kron, StateVector, C64, EIGEN_ZERO,
};
use crate::search::golden_section;

/// Below this, `D_left + D_right` is treated as zero and `D_Δ` is undefined.
pub const DISCORD_SUM_FLOOR: f64 = 1e-12;

/// Tangles of the purification `|Ψ⟩` on `A ⊗ B ⊗ D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleSet {
    /// residual three-tangle
    pub tau_abd: f64,
    /// tangle between `A` and `BD`
    pub tau_a: f64,
    pub tau_b: f64,
    pub tau_d: f64,
}

pub fn tangles(r: f64, t: f64) -> Result<TangleSet> {
    check_unit("r", r)?;
    check_unit("t", t)?;
    let tau_a = 1.0 - t * t;
    let tau_b = 1.0 - r * r;
    Ok(TangleSet {
        tau_abd: tau_a * tau_b,
        tau_a,
        tau_b,
        tau_d: 1.0 - t * t * r * r,
    })
}

/// `D(ρ_AB)`, measuring `B`: `𝓗(τ_B) − 𝓗(τ_D) + 𝓗(τ_A − τ_ABD)`.
pub fn right_discord_closed(r: f64, t: f64) -> Result<f64> {
    let tau = tangles(r, t)?;
    let d = tangle_entropy(tau.tau_b)? - tangle_entropy(tau.tau_d)?
        + tangle_entropy(tau.tau_a - tau.tau_abd)?;
    Ok(d.max(0.0))
}

/// `D(ρ_BA)`, measuring `A`: the right discord with `r` and `t` exchanged.
pub fn left_discord_closed(r: f64, t: f64) -> Result<f64> {
    right_discord_closed(t, r)
}

/// `D_Δ = (D_left − D_right)/(D_left + D_right)`; `None` where both vanish.
pub fn relative_difference(r: f64, t: f64) -> Result<Option<f64>> {
    let left = left_discord_closed(r, t)?;
    let right = right_discord_closed(r, t)?;
    Ok(relative_difference_of(left, right))
}

fn relative_difference_of(left: f64, right: f64) -> Option<f64> {
    let sum = left + right;
    (sum > DISCORD_SUM_FLOOR).then(|| (left - right) / sum)
}

/// `D_symm = √(D_left · D_right)`
pub fn symmetrized_discord(r: f64, t: f64) -> Result<f64> {
    Ok((left_discord_closed(r, t)? * right_discord_closed(r, t)?).sqrt())
}

/// `ρ_AB` for the equal-weight ancilla pair with overlap `r`.
pub fn family_state(r: f64, t: f64) -> Result<DensityOperator> {
    check_unit("r", r)?;
    let (phi1, phi2) = prepare_pair(t)?;
    let (eta1, eta2) = ancilla_pair(r, r)?;
    DensityOperator::mixture(&[(0.5, &phi1.kron(&eta1)), (0.5, &phi2.kron(&eta2))])
}

/// `|Ψ⟩ = (|φ₁⟩|η₁⟩|0⟩_d + |φ₂⟩|η₂⟩|1⟩_d)/√2` on dims `[2, 3, 2]`.
pub fn purification_tripartite(r: f64, t: f64) -> Result<StateVector> {
    check_unit("r", r)?;
    let (phi1, phi2) = prepare_pair(t)?;
    let (eta1, eta2) = ancilla_pair(r, r)?;
    let b1 = phi1.kron(&eta1).kron(&StateVector::basis(2, 0));
    let b2 = phi2.kron(&eta2).kron(&StateVector::basis(2, 1));
    StateVector::new(
        (b1.amplitudes() + b2.amplitudes()).unscale(std::f64::consts::SQRT_2),
        b1.dims().to_vec(),
    )
}

/// `I(ρ) = S(ρ_A) + S(ρ_B) − S(ρ)` for a bipartite state.
pub fn mutual_information(rho: &DensityOperator) -> Result<f64> {
    if rho.factors().len() != 2 {
        return Err(Error::UnsupportedDims(rho.factors().to_vec()));
    }
    let sa = von_neumann_entropy(&partial_trace(rho, &[0])?);
    let sb = von_neumann_entropy(&partial_trace(rho, &[1])?);
    Ok(sa + sb - von_neumann_entropy(rho))
}

/// Wootters concurrence and entanglement of formation (bits) of a two-qubit state.
pub fn concurrence_ef(rho: &DensityOperator) -> Result<(f64, f64)> {
    if rho.factors() != [2, 2] {
        return Err(Error::UnsupportedDims(rho.factors().to_vec()));
    }
    // σ_y ⊗ σ_y is real: anti-diagonal (−1, 1, 1, −1)
    let flip = CMatrix::from_fn(4, 4, |i, j| match (i, j) {
        (0, 3) | (3, 0) => c(-1.0),
        (1, 2) | (2, 1) => c(1.0),
        _ => c(0.0),
    });
    let tilde = &flip * rho.matrix().conjugate() * &flip;
    // Work inside the support of ρ: the kernel contributes exact zeros, and
    // rounding noise there would otherwise surface as √ε in the concurrence.
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let support: Vec<usize> = (0..4).filter(|&i| vals[i] > EIGEN_ZERO).collect();
    let k = support.len();
    let v = CMatrix::from_fn(4, k, |i, j| vecs[(i, support[j])]);
    let roots = CMatrix::from_diagonal(&CVector::from_iterator(
        k,
        support.iter().map(|&i| c(vals[i].sqrt())),
    ));
    let m = &roots * v.adjoint() * tilde * &v * &roots;
    let mut l: Vec<f64> = hermitian_eigenvalues(&m)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.resize(4, 0.0);
    let conc = (l[0] - l[1] - l[2] - l[3]).max(0.0);
    let eof = tangle_entropy((conc * conc).min(1.0))?;
    Ok((conc, eof))
}

/// Pieces of the Koashi–Winter route to the right discord, all evaluated
/// numerically from the purification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KoashiWinter {
    pub entropy_b: f64,
    pub entropy_d: f64,
    pub concurrence_ad: f64,
    pub eof_ad: f64,
}

impl KoashiWinter {
    /// `S(ρ_B) − S(ρ_D) + E(ρ_AD)`
    pub fn right_discord(&self) -> f64 {
        self.entropy_b - self.entropy_d + self.eof_ad
    }
}

pub fn koashi_winter(r: f64, t: f64) -> Result<KoashiWinter> {
    let psi = purification_tripartite(r, t)?.projector();
    let (concurrence_ad, eof_ad) = concurrence_ef(&partial_trace(&psi, &[0, 2])?)?;
    Ok(KoashiWinter {
        entropy_b: von_neumann_entropy(&partial_trace(&psi, &[1])?),
        entropy_d: von_neumann_entropy(&partial_trace(&psi, &[2])?),
        concurrence_ad,
        eof_ad,
    })
}

/// Subsystem on which the projective measurement acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

/// Angle search used by [`discord_by_definition`]: a `grid × grid` sweep over
/// `(θ, φ)` followed by coordinate-wise golden-section passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSchedule {
    pub grid: usize,
    pub refine_steps: usize,
    /// A refinement pass improving the conditional entropy by at most this
    /// much counts as converged.
    pub tolerance: f64,
}

impl Default for SearchSchedule {
    fn default() -> Self {
        SearchSchedule {
            grid: 64,
            refine_steps: 100,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub discord: f64,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    /// minimum of `Σ_k p_k S(ρ_{·|k})` over the searched measurements
    pub conditional_entropy: f64,
    pub theta: f64,
    pub phi: f64,
    pub converged: bool,
}

/// Rank-1 projective measurements on the measured factor, parametrized by
/// Bloch angles inside a fixed plane plus an optional kernel direction.
struct MeasurementFrame {
    e1: CVector,
    e2: CVector,
    kernel: Option<CVector>,
}

impl MeasurementFrame {
    fn projectors(&self, theta: f64, phi: f64) -> impl Iterator<Item = CVector> + '_ {
        let (s, co) = (0.5 * theta).sin_cos();
        let phase = C64::from_polar(1.0, phi);
        let m1 = &self.e1 * c(co) + &self.e2 * (phase * s);
        let m2 = &self.e1 * (-phase.conj() * s) + &self.e2 * c(co);
        [m1, m2].into_iter().chain(self.kernel.clone())
    }
}

struct ConditionalEntropy<'a> {
    rho: &'a CMatrix,
    measured: usize,
    dims: [usize; 2],
    frame: MeasurementFrame,
}

impl ConditionalEntropy<'_> {
    fn index(&self, other: usize, meas: usize) -> usize {
        if self.measured == 1 {
            other * self.dims[1] + meas
        } else {
            meas * self.dims[1] + other
        }
    }

    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let d_other = self.dims[1 - self.measured];
        let d_meas = self.dims[self.measured];
        let mut total = 0.0;
        for m in self.frame.projectors(theta, phi) {
            // (I ⊗ ⟨m|) ρ (I ⊗ |m⟩)
            let sigma = CMatrix::from_fn(d_other, d_other, |o, p| {
                let mut acc = c(0.0);
                for x in 0..d_meas {
                    for y in 0..d_meas {
                        acc += m[x].conj() * self.rho[(self.index(o, x), self.index(p, y))] * m[y];
                    }
                }
                acc
            });
            let prob = sigma.trace().re;
            if prob > 1e-14 {
                total += prob * entropy_of_matrix(&sigma.unscale(prob));
            }
        }
        total
    }
}

/// Discord `I(ρ) − J(ρ)` with the classical correlation `J` maximized over
/// rank-1 projective measurements on `side`.
///
/// A qubit side is searched over the full Bloch sphere. A qutrit side is
/// searched over projector pairs inside the two-dimensional support of its
/// reduced state, with the kernel direction as a third, never-firing outcome;
/// a full-rank qutrit marginal is rejected.
pub fn discord_by_definition(
    rho: &DensityOperator,
    side: Side,
    schedule: &SearchSchedule,
) -> Result<OracleOutcome> {
    let dims = match rho.factors() {
        &[a, b] if (a == 2 || a == 3) && (b == 2 || b == 3) => [a, b],
        other => return Err(Error::UnsupportedDims(other.to_vec())),
    };
    let measured = match side {
        Side::A => 0,
        Side::B => 1,
    };
    let reduced_measured = partial_trace(rho, &[measured])?;
    let reduced_other = partial_trace(rho, &[1 - measured])?;
    let frame = if dims[measured] == 2 {
        MeasurementFrame {
            e1: StateVector::basis(2, 0).into_amplitudes(),
            e2: StateVector::basis(2, 1).into_amplitudes(),
            kernel: None,
        }
    } else {
        let (vals, vecs) = hermitian_eigen(reduced_measured.matrix());
        if vals[2] > 1e-10 {
            return Err(Error::Constraint(format!(
                "measured qutrit marginal has full rank (smallest eigenvalue {:e})",
                vals[2]
            )));
        }
        MeasurementFrame {
            e1: vecs.column(0).into_owned(),
            e2: vecs.column(1).into_owned(),
            kernel: Some(vecs.column(2).into_owned()),
        }
    };
    let objective = ConditionalEntropy {
        rho: rho.matrix(),
        measured,
        dims,
        frame,
    };

    let grid = schedule.grid.max(2);
    let d_theta = std::f64::consts::PI / (grid - 1) as f64;
    let d_phi = 2.0 * std::f64::consts::PI / grid as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..grid {
        for j in 0..grid {
            let (theta, phi) = (i as f64 * d_theta, j as f64 * d_phi);
            let v = objective.eval(theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }

    let (mut value, mut theta, mut phi) = best;
    let mut converged = schedule.refine_steps == 0;
    for _ in 0..schedule.refine_steps {
        let before = value;
        let (th, v) = golden_section(|x| objective.eval(x, phi), theta - d_theta, theta + d_theta);
        if v < value {
            theta = th;
            value = v;
        }
        let (ph, v) = golden_section(|y| objective.eval(theta, y), phi - d_phi, phi + d_phi);
        if v < value {
            phi = ph;
            value = v;
        }
        let gain = before - value;
        converged = gain <= schedule.tolerance;
        if gain <= 1e-15 {
            break;
        }
    }

    let mutual = mutual_information(rho)?;
    let classical = von_neumann_entropy(&reduced_other) - value;
    Ok(OracleOutcome {
        discord: mutual - classical,
        mutual_information: mutual,
        classical_correlation: classical,
        conditional_entropy: value,
        theta,
        phi,
        converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Oracle,
}

/// Left/right discords and their combinations at one `(r, t)` point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscordReport {
    pub r: f64,
    pub t: f64,
    pub d_right: f64,
    pub d_left: f64,
    pub d_delta: Option<f64>,
    pub d_symm: f64,
    pub method: Method,
}

impl DiscordReport {
    fn from_pair(r: f64, t: f64, d_left: f64, d_right: f64, method: Method) -> Self {
        DiscordReport {
            r,
            t,
            d_right,
            d_left,
            d_delta: relative_difference_of(d_left, d_right),
            d_symm: (d_left.max(0.0) * d_right.max(0.0)).sqrt(),
            method,
        }
    }

    pub fn closed_form(r: f64, t: f64) -> Result<Self> {
        Ok(DiscordReport::from_pair(
            r,
            t,
            left_discord_closed(r, t)?,
            right_discord_closed(r, t)?,
            Method::ClosedForm,
        ))
    }

    pub fn oracle(r: f64, t: f64, schedule: &SearchSchedule) -> Result<Self> {
        let rho = family_state(r, t)?;
        let right = discord_by_definition(&rho, Side::B, schedule)?.discord;
        let left = discord_by_definition(&rho, Side::A, schedule)?.discord;
        Ok(DiscordReport::from_pair(r, t, left, right, Method::Oracle))
    }
}
