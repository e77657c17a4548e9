//! Trial-by-trial simulation of the sequential protocol.
//!
//! Each trial prepares `|ψ_i⟩` with probability ½, applies Bob's unitary to
//! the qubit and a fresh ancilla, samples the ancilla readout, collapses the
//! qubit, and repeats the same for Charlie. Trials are split into fixed-size
//! blocks; block `b` draws from ChaCha8 stream `b` of the run seed, so the
//! counts do not depend on how many workers execute the blocks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocol::{ProtocolParams, SequentialProtocol};
use crate::qmath::{CVector, StateVector, UnitaryOperator};

/// Trials per RNG stream.
pub const BLOCK_TRIALS: u64 = 1 << 14;

/// Outcome probabilities below this are set to exactly zero before sampling.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Counts indexed by `(prepared − 1, bob_outcome, charlie_outcome)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialStats {
    counts: [[[u64; 3]; 3]; 2],
    n_trials: u64,
    seed: u64,
}

impl TrialStats {
    pub fn empty(seed: u64) -> Self {
        TrialStats {
            counts: [[[0; 3]; 3]; 2],
            n_trials: 0,
            seed,
        }
    }

    pub fn from_counts(counts: [[[u64; 3]; 3]; 2], seed: u64) -> Self {
        let n_trials = counts.iter().flatten().flatten().sum();
        TrialStats {
            counts,
            n_trials,
            seed,
        }
    }

    /// Count for prepared index `prepared ∈ {1, 2}`.
    pub fn count(&self, prepared: usize, bob: usize, charlie: usize) -> u64 {
        self.counts[prepared - 1][bob][charlie]
    }

    pub fn counts(&self) -> &[[[u64; 3]; 3]; 2] {
        &self.counts
    }

    pub fn n_trials(&self) -> u64 {
        self.n_trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn record(&mut self, trial: &Trial) {
        self.counts[trial.prepared - 1][trial.bob][trial.charlie] += 1;
        self.n_trials += 1;
    }

    fn merge(&mut self, other: &TrialStats) {
        for (a, b) in self
            .counts
            .iter_mut()
            .flatten()
            .flatten()
            .zip(other.counts.iter().flatten().flatten())
        {
            *a += b;
        }
        self.n_trials += other.n_trials;
    }
}

/// One simulated run of the protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    /// `1` or `2`
    pub prepared: usize,
    /// Bob's ancilla readout, `0` inconclusive
    pub bob: usize,
    pub charlie: usize,
    /// Qubit state handed from Bob to Charlie.
    pub after_bob: StateVector,
}

/// Prebuilt unitaries for repeated trials.
#[derive(Debug, Clone)]
pub struct Simulator {
    protocol: SequentialProtocol,
}

impl Simulator {
    pub fn new(params: ProtocolParams) -> Result<Self> {
        Ok(Simulator {
            protocol: SequentialProtocol::new(params)?,
        })
    }

    pub fn protocol(&self) -> &SequentialProtocol {
        &self.protocol
    }

    pub fn trial<R: Rng>(&self, rng: &mut R) -> Trial {
        let prepared = if rng.random_bool(0.5) { 1 } else { 2 };
        let psi = self.protocol.prepared()[prepared - 1].amplitudes();
        let (bob, after_bob) = measure(self.protocol.bob(), psi, rng);
        let (charlie, _) = measure(self.protocol.charlie(), &after_bob, rng);
        Trial {
            prepared,
            bob,
            charlie,
            after_bob: StateVector::new(after_bob, vec![2])
                .expect("collapsed state is renormalized"),
        }
    }

    fn run_block(&self, n: u64, seed: u64, block: u64) -> TrialStats {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut stats = TrialStats::empty(seed);
        for _ in 0..n {
            stats.record(&self.trial(&mut rng));
        }
        stats
    }

    fn run_all(&self, n_trials: u64, seed: u64) -> TrialStats {
        let blocks = n_trials.div_ceil(BLOCK_TRIALS);
        let parts: Vec<TrialStats> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let n = BLOCK_TRIALS.min(n_trials - b * BLOCK_TRIALS);
                self.run_block(n, seed, b)
            })
            .collect();
        parts.iter().fold(TrialStats::empty(seed), |mut acc, p| {
            acc.merge(p);
            acc
        })
    }
}

/// Couples `qubit` to `|0⟩` of a fresh qutrit, applies `u`, reads the qutrit
/// and returns the outcome with the renormalized post-measurement qubit.
fn measure<R: Rng>(u: &UnitaryOperator, qubit: &CVector, rng: &mut R) -> (usize, CVector) {
    let m = u.matrix();
    // only the ancilla-|0⟩ input columns (0 and 3) are populated
    let out: [[_; 2]; 3] = std::array::from_fn(|k| {
        std::array::from_fn(|a| m[(3 * a + k, 0)] * qubit[0] + m[(3 * a + k, 3)] * qubit[1])
    });
    let mut probs = out.map(|amp| amp[0].norm_sqr() + amp[1].norm_sqr());
    for p in probs.iter_mut() {
        if *p < PROBABILITY_FLOOR {
            *p = 0.0;
        }
    }
    let total: f64 = probs.iter().sum();
    let x = rng.random::<f64>() * total;
    let mut cumulative = 0.0;
    let mut outcome = None;
    for (k, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        cumulative += p;
        outcome = Some(k);
        if x < cumulative {
            break;
        }
    }
    let k = outcome.expect("a unitary leaves at least one outcome populated");
    let norm = probs[k].sqrt();
    (
        k,
        CVector::from_vec(vec![out[k][0] / norm, out[k][1] / norm]),
    )
}

/// Runs `n_trials` trials on the global worker pool.
pub fn run_trials(params: &ProtocolParams, n_trials: u64, seed: u64) -> Result<TrialStats> {
    Ok(Simulator::new(*params)?.run_all(n_trials, seed))
}

/// Same as [`run_trials`] on a dedicated pool of `workers` threads; the
/// result is identical for every worker count.
pub fn run_trials_with_workers(
    params: &ProtocolParams,
    n_trials: u64,
    seed: u64,
    workers: usize,
) -> Result<TrialStats> {
    let sim = Simulator::new(*params)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    Ok(pool.install(|| sim.run_all(n_trials, seed)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    fn from_count(hits: u64, n: u64) -> Self {
        let p = hits as f64 / n as f64;
        Estimate {
            value: p,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalProbs {
    pub p_b: Estimate,
    pub p_c: Estimate,
    pub p_bc: Estimate,
}

/// Frequencies of Bob, Charlie, and both naming the prepared state.
pub fn empirical_probs(stats: &TrialStats) -> Result<EmpiricalProbs> {
    let n = stats.n_trials();
    if n == 0 {
        return Err(Error::Constraint("no trials recorded".into()));
    }
    let (mut bob, mut charlie, mut both) = (0, 0, 0);
    for prepared in 1..=2 {
        for b in 0..3 {
            for c in 0..3 {
                let k = stats.count(prepared, b, c);
                bob += if b == prepared { k } else { 0 };
                charlie += if c == prepared { k } else { 0 };
                both += if b == prepared && c == prepared { k } else { 0 };
            }
        }
    }
    Ok(EmpiricalProbs {
        p_b: Estimate::from_count(bob, n),
        p_c: Estimate::from_count(charlie, n),
        p_bc: Estimate::from_count(both, n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Unambiguity {
    pub ok: bool,
    /// Trials in which either observer named the wrong state.
    pub violations: u64,
}

pub fn verify_unambiguity(stats: &TrialStats) -> Unambiguity {
    let mut violations = 0;
    for prepared in 1..=2 {
        let wrong = 3 - prepared;
        for b in 0..3 {
            for c in 0..3 {
                if b == wrong || c == wrong {
                    violations += stats.count(prepared, b, c);
                }
            }
        }
    }
    Unambiguity {
        ok: violations == 0,
        violations,
    }
}
