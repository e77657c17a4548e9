//! Two-observer sequential unambiguous discrimination of a qubit.
//!
//! Alice prepares `|ψ₁⟩` or `|ψ₂⟩` with equal priors. Bob couples the qubit to
//! a qutrit ancilla `B` through a unitary `U_b` and reads the ancilla in its
//! computational basis: outcome `i ∈ {1, 2}` identifies `|ψ_i⟩`, outcome `0`
//! is inconclusive. Whatever Bob sees, the qubit is left in `|φ_i⟩`, which
//! Charlie then discriminates with his own unitary `U_c` and ancilla `C`.
//!
//! All state pairs use the same real embedding, symmetric about `|0⟩`:
//! `(cos θ, ±sin θ)` with `cos 2θ` equal to the pair overlap.

use serde::Serialize;

use crate::error::{check_unit, Error, Result};
use crate::qmath::{
    c, complete_isometry_seeded, hermitian_defect, hermitian_eigenvalues, CMatrix, CVector,
    DensityOperator, Kron, StateVector, UnitaryOperator,
};

/// Tolerance on Bob's equality constraint `√(q1b·q2b)·t = s` and Charlie's
/// bound `√(q1c·q2c) ≥ t`.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Qubit ⊗ qutrit-ancilla factorization used by both observers.
pub const SYSTEM_ANCILLA: [usize; 2] = [2, 3];

/// Scalar knobs of one protocol run.
///
/// `s = ⟨ψ₁|ψ₂⟩` is the prior overlap, `t = ⟨φ₁|φ₂⟩` the overlap Bob leaves
/// for Charlie, and `q_i` the inconclusive-outcome weights of each observer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    s: f64,
    t: f64,
    q1b: f64,
    q2b: f64,
    q1c: f64,
    q2c: f64,
}

impl ProtocolParams {
    pub fn new(s: f64, t: f64, q1b: f64, q2b: f64, q1c: f64, q2c: f64) -> Result<Self> {
        check_unit("s", s)?;
        check_unit("t", t)?;
        check_unit("q1b", q1b)?;
        check_unit("q2b", q2b)?;
        check_unit("q1c", q1c)?;
        check_unit("q2c", q2c)?;
        if s > t + CONSTRAINT_TOL {
            return Err(Error::Constraint(format!("s = {s} exceeds t = {t}")));
        }
        let bob = (q1b * q2b).sqrt() * t;
        if (bob - s).abs() > CONSTRAINT_TOL {
            return Err(Error::Constraint(format!(
                "√(q1b·q2b)·t = {bob} but s = {s}"
            )));
        }
        let charlie = (q1c * q2c).sqrt();
        if charlie < t - CONSTRAINT_TOL {
            return Err(Error::Constraint(format!(
                "√(q1c·q2c) = {charlie} is below t = {t}"
            )));
        }
        Ok(ProtocolParams {
            s,
            t,
            q1b,
            q2b,
            q1c,
            q2c,
        })
    }

    /// Equal failure weights at each observer's individual optimum:
    /// `q^b = s/t` and `q^c = t`. With `s = t = 0` Bob's weight is 0.
    pub fn equal_weight(s: f64, t: f64) -> Result<Self> {
        check_unit("s", s)?;
        check_unit("t", t)?;
        if t == 0.0 && s > 0.0 || s > t {
            return Err(Error::Constraint(format!("s = {s} exceeds t = {t}")));
        }
        let r = if t > 0.0 { s / t } else { 0.0 };
        ProtocolParams::new(s, t, r, r, t, t)
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn q1b(&self) -> f64 {
        self.q1b
    }

    pub fn q2b(&self) -> f64 {
        self.q2b
    }

    pub fn q1c(&self) -> f64 {
        self.q1c
    }

    pub fn q2c(&self) -> f64 {
        self.q2c
    }

    /// `⟨η₁|η₂⟩ = √(q1b·q2b)`, which equals `s/t` for `t > 0`.
    pub fn r(&self) -> f64 {
        (self.q1b * self.q2b).sqrt()
    }

    /// The same run with the labels of the two prepared states exchanged.
    pub fn swapped(&self) -> Self {
        ProtocolParams {
            q1b: self.q2b,
            q2b: self.q1b,
            q1c: self.q2c,
            q2c: self.q1c,
            ..*self
        }
    }
}

/// `(cos θ, sin θ)` and `(cos θ, −sin θ)` with `cos 2θ = overlap`.
pub fn prepare_pair(overlap: f64) -> Result<(StateVector, StateVector)> {
    check_unit("overlap", overlap)?;
    let theta = 0.5 * overlap.acos();
    let (sin, cos) = theta.sin_cos();
    Ok((
        StateVector::from_real(&[cos, sin])?,
        StateVector::from_real(&[cos, -sin])?,
    ))
}

/// Ancilla kets `√q|0⟩ + √(1−q)|i⟩` for `i = 1, 2`.
pub fn ancilla_pair(q1: f64, q2: f64) -> Result<(StateVector, StateVector)> {
    check_unit("q1", q1)?;
    check_unit("q2", q2)?;
    Ok((
        StateVector::from_real(&[q1.sqrt(), (1.0 - q1).sqrt(), 0.0])?,
        StateVector::from_real(&[q2.sqrt(), 0.0, (1.0 - q2).sqrt()])?,
    ))
}

/// Unitary on qubit ⊗ qutrit mapping `|in_i⟩|0⟩ ↦ outputs[i]`, where the
/// inputs are `prepare_pair(overlap)`. The two constrained columns sit at
/// `|0⟩|0⟩` and `|1⟩|0⟩` (indices 0 and 3); the rest come from the completion.
fn two_state_unitary(
    overlap: f64,
    outputs: [CVector; 2],
    seeds: &[CVector],
) -> Result<UnitaryOperator> {
    let theta = 0.5 * overlap.acos();
    let [o1, o2] = outputs;
    // |0⟩ = (|in₁⟩ + |in₂⟩)/(2cos θ), |1⟩ = (|in₁⟩ − |in₂⟩)/(2sin θ)
    let even = (&o1 + &o2).unscale(2.0 * theta.cos());
    let mut columns = vec![StateVector::normalized(even, SYSTEM_ANCILLA.to_vec())?];
    if 1.0 - overlap > 1e-14 {
        let mut odd = (&o1 - &o2).unscale(2.0 * theta.sin());
        // absorb constraint slack (≤ CONSTRAINT_TOL) so the columns are exactly orthonormal
        let first = columns[0].amplitudes();
        odd -= first * first.dotc(&odd);
        columns.push(StateVector::normalized(odd, SYSTEM_ANCILLA.to_vec())?);
    }
    let completed = complete_isometry_seeded(&columns, 6, seeds)?;
    // completion column k → input-basis index: constrained columns to 0 and 3
    let order: &[usize] = if columns.len() == 2 {
        &[0, 2, 3, 1, 4, 5]
    } else {
        &[0, 1, 2, 3, 4, 5]
    };
    completed
        .reorder_columns(order)?
        .with_factors(SYSTEM_ANCILLA.to_vec())
}

/// Bob's unitary with the default (standard-basis) completion.
pub fn build_bob_unitary(params: &ProtocolParams) -> Result<UnitaryOperator> {
    build_bob_unitary_with(params, &[])
}

/// Bob's unitary: `U_b |ψ_i⟩|0⟩_b = |φ_i⟩|η_i⟩_b`. `seeds` selects an
/// alternative completion of the block acting outside `A ⊗ |0⟩_b`.
pub fn build_bob_unitary_with(
    params: &ProtocolParams,
    seeds: &[CVector],
) -> Result<UnitaryOperator> {
    let (phi1, phi2) = prepare_pair(params.t)?;
    let (eta1, eta2) = ancilla_pair(params.q1b, params.q2b)?;
    let outputs = [
        phi1.kron(&eta1).into_amplitudes(),
        phi2.kron(&eta2).into_amplitudes(),
    ];
    two_state_unitary(params.s, outputs, seeds)
}

/// Charlie's unitary with the default failure axis `(φ₁+φ₂)/‖·‖` and the
/// standard-basis completion.
pub fn build_charlie_unitary(params: &ProtocolParams) -> Result<UnitaryOperator> {
    let (phi1, phi2) = prepare_pair(params.t)?;
    let axis = StateVector::normalized(phi1.amplitudes() + phi2.amplitudes(), vec![2])?;
    build_charlie_unitary_with(params, &axis, &[])
}

/// Charlie's unitary:
/// `U_c |φ_i⟩|0⟩_c = √q_iᶜ |χ_i⟩|0⟩_c + √(1−q_iᶜ) |φ_i⟩|i⟩_c`.
///
/// The failure states `χ_i` have overlap `t/√(q1c·q2c)` and lie symmetric
/// about `failure_axis`; at `√(q1c·q2c) = t` both equal the axis.
pub fn build_charlie_unitary_with(
    params: &ProtocolParams,
    failure_axis: &StateVector,
    seeds: &[CVector],
) -> Result<UnitaryOperator> {
    if failure_axis.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: failure_axis.dim(),
        });
    }
    let (phi1, phi2) = prepare_pair(params.t)?;
    let weight = (params.q1c * params.q2c).sqrt();
    let failure_overlap = if weight > 0.0 {
        (params.t / weight).min(1.0)
    } else {
        0.0
    };
    let half = 0.5 * failure_overlap.acos();
    let a = failure_axis.amplitudes();
    let perp = CVector::from_vec(vec![-a[1].conj(), a[0].conj()]);
    let chi1 = a * c(half.cos()) + &perp * c(half.sin());
    let chi2 = a * c(half.cos()) - &perp * c(half.sin());

    let out = |chi: &CVector, phi: &StateVector, q: f64, k: usize| {
        let mut v = CVector::zeros(6);
        for a in 0..2 {
            v[3 * a] += chi[a] * q.sqrt();
            v[3 * a + k] += phi.amplitudes()[a] * (1.0 - q).sqrt();
        }
        v
    };
    let outputs = [
        out(&chi1, &phi1, params.q1c, 1),
        out(&chi2, &phi2, params.q2c, 2),
    ];
    two_state_unitary(params.t, outputs, seeds)
}

/// Three-outcome measurement induced on the qubit by reading the ancilla.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmSet {
    elements: [CMatrix; 3],
}

impl PovmSet {
    /// `Π₀` (inconclusive), `Π₁`, `Π₂`.
    pub fn elements(&self) -> &[CMatrix; 3] {
        &self.elements
    }

    pub fn element(&self, k: usize) -> &CMatrix {
        &self.elements[k]
    }

    /// `⟨ψ|Π_k|ψ⟩`
    pub fn probability(&self, k: usize, psi: &StateVector) -> f64 {
        let v = psi.amplitudes();
        v.dotc(&(&self.elements[k] * v)).re
    }

    /// Max entrywise deviation of `Σ_k Π_k` from the identity.
    pub fn completeness_defect(&self) -> f64 {
        let sum: CMatrix = self.elements.iter().sum();
        (sum - CMatrix::identity(2, 2))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Largest Hermiticity defect or negative eigenvalue among the elements.
    pub fn positivity_defect(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| {
                let neg = hermitian_eigenvalues(e)
                    .into_iter()
                    .fold(0.0f64, |acc, l| acc.max(-l));
                neg.max(hermitian_defect(e))
            })
            .fold(0.0, f64::max)
    }
}

/// Detection operators `A_k = ⟨k|U|0⟩` on the qubit, `k = 0, 1, 2`.
pub fn detection_operators(u: &UnitaryOperator) -> Result<[CMatrix; 3]> {
    if u.factors() != SYSTEM_ANCILLA {
        return Err(Error::UnsupportedDims(u.factors().to_vec()));
    }
    let m = u.matrix();
    Ok(std::array::from_fn(|k| {
        CMatrix::from_fn(2, 2, |out, inp| m[(3 * out + k, 3 * inp)])
    }))
}

/// `Π_k = A_k† A_k`
pub fn povm_elements(u: &UnitaryOperator) -> Result<PovmSet> {
    let ops = detection_operators(u)?;
    Ok(PovmSet {
        elements: ops.map(|a| a.adjoint() * a),
    })
}

/// Bob's success probability, `1 − (q1b + q2b)/2`; `1 − s/t` at the equal-weight optimum.
pub fn success_prob_bob(params: &ProtocolParams) -> f64 {
    1.0 - 0.5 * (params.q1b + params.q2b)
}

/// Charlie's success probability, `1 − (q1c + q2c)/2`; `1 − t` at his optimum.
pub fn success_prob_charlie(params: &ProtocolParams) -> f64 {
    1.0 - 0.5 * (params.q1c + params.q2c)
}

/// Probability that both observers identify the state:
/// `½[(1−q1b)(1−q1c) + (1−q2b)(1−q2c)]`.
pub fn joint_success_prob(params: &ProtocolParams) -> f64 {
    0.5 * ((1.0 - params.q1b) * (1.0 - params.q1c) + (1.0 - params.q2b) * (1.0 - params.q2c))
}

/// Qubit–ancilla state after Bob's unitary, averaged over the two preparations:
/// `½(|φ₁⟩⟨φ₁| ⊗ |η₁⟩⟨η₁| + |φ₂⟩⟨φ₂| ⊗ |η₂⟩⟨η₂|)`.
pub fn joint_state_rho_ab(params: &ProtocolParams) -> Result<DensityOperator> {
    let (phi1, phi2) = prepare_pair(params.t)?;
    let (eta1, eta2) = ancilla_pair(params.q1b, params.q2b)?;
    DensityOperator::mixture(&[(0.5, &phi1.kron(&eta1)), (0.5, &phi2.kron(&eta2))])
}

/// Prepared states and both observers' unitaries for one parameter set.
#[derive(Debug, Clone)]
pub struct SequentialProtocol {
    params: ProtocolParams,
    prepared: [StateVector; 2],
    relayed: [StateVector; 2],
    bob: UnitaryOperator,
    charlie: UnitaryOperator,
}

impl SequentialProtocol {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        let (psi1, psi2) = prepare_pair(params.s)?;
        let (phi1, phi2) = prepare_pair(params.t)?;
        Ok(SequentialProtocol {
            bob: build_bob_unitary(&params)?,
            charlie: build_charlie_unitary(&params)?,
            params,
            prepared: [psi1, psi2],
            relayed: [phi1, phi2],
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    /// `|ψ₁⟩, |ψ₂⟩`
    pub fn prepared(&self) -> &[StateVector; 2] {
        &self.prepared
    }

    /// `|φ₁⟩, |φ₂⟩`, the states Bob hands to Charlie.
    pub fn relayed(&self) -> &[StateVector; 2] {
        &self.relayed
    }

    pub fn bob(&self) -> &UnitaryOperator {
        &self.bob
    }

    pub fn charlie(&self) -> &UnitaryOperator {
        &self.charlie
    }
}
