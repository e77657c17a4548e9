use serde::Serialize;
use serde_json::{Map, Value};

use seqdisc::correlations::DiscordReport;
use seqdisc::figures::{
    relative_difference_vs_pb, relative_difference_vs_pc, symmetrized_vs_overlap, CurvePoint,
};
use seqdisc::montecarlo::{
    empirical_probs, run_trials, run_trials_with_workers, verify_unambiguity, Estimate,
};
use seqdisc::optimizer::{pbc_closed_max, pbc_numeric_max, NumericSearch, OptimumReport};
use seqdisc::protocol::{
    joint_success_prob, povm_elements, success_prob_bob, success_prob_charlie, PovmSet,
    ProtocolParams, SequentialProtocol,
};
use seqdisc::{CMatrix, SearchSchedule, StateVector};

use crate::args::{CurveArgs, DiscordArgs, Figure, Format, OptimizeArgs, PovmArgs, SimulateArgs};
use crate::error::CliError;
use crate::format::{cell, csv_table, json, sig12};

/// Largest accepted gap between the closed-form and minimized discords.
pub const ORACLE_GAP_TOL: f64 = 1e-3;

/// Largest accepted POVM completeness defect or unambiguity residual.
pub const POVM_TOL: f64 = 1e-10;

/// Rendered output plus an optional tolerance breach (exit code 3).
pub struct Outcome {
    pub body: String,
    pub breach: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, breach: None }
    }
}

#[derive(Serialize)]
struct OptimizeOut {
    s: f64,
    closed: OptimumReport,
    numeric: OptimumReport,
    abs_diff: f64,
}

pub fn optimize(args: &OptimizeArgs, format: Format) -> Result<Outcome, CliError> {
    let closed = pbc_closed_max(args.s)?;
    let search = NumericSearch {
        grid_density: args.grid as usize,
        ..NumericSearch::default()
    };
    let numeric = pbc_numeric_max(args.s, &search)?;
    let out = OptimizeOut {
        s: args.s,
        abs_diff: (closed.pbc_max - numeric.pbc_max).abs(),
        closed,
        numeric,
    };
    let body = match format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let row = |method: &str, r: &OptimumReport| {
                let p = r.argmax;
                vec![
                    method.to_string(),
                    sig12(r.pbc_max),
                    regime_name(r),
                    sig12(p.t()),
                    sig12(p.q1b()),
                    sig12(p.q2b()),
                    sig12(p.q1c()),
                    sig12(p.q2c()),
                    sig12(out.abs_diff),
                ]
            };
            csv_table(
                &[
                    "method", "pbc_max", "regime", "t", "q1b", "q2b", "q1c", "q2c", "abs_diff",
                ],
                &[
                    row("closed-form", &out.closed),
                    row("numeric", &out.numeric),
                ],
            )?
        }
    };
    Ok(Outcome::ok(body))
}

fn regime_name(r: &OptimumReport) -> String {
    match serde_json::to_value(r.regime) {
        Ok(Value::String(s)) => s,
        _ => unreachable!("regime serializes as a string"),
    }
}

pub fn curve(args: &CurveArgs, format: Format) -> Result<Outcome, CliError> {
    let points = args.points as usize;
    let (columns, fixed, rows): ([&str; 2], Option<(&str, f64)>, Vec<CurvePoint>) =
        match args.figure {
            Figure::Fig2a => {
                let pc = args
                    .pc
                    .ok_or_else(|| CliError::Usage("figure 2a needs --pc".into()))?;
                (
                    ["p_b", "d_delta"],
                    Some(("p_c", pc)),
                    relative_difference_vs_pb(pc, points)?,
                )
            }
            Figure::Fig2b => {
                let pb = args
                    .pb
                    .ok_or_else(|| CliError::Usage("figure 2b needs --pb".into()))?;
                (
                    ["p_c", "d_delta"],
                    Some(("p_b", pb)),
                    relative_difference_vs_pc(pb, points)?,
                )
            }
            Figure::Fig3 => (
                ["s", "d_symm"],
                Some(("exponent", args.exponent)),
                symmetrized_vs_overlap(args.exponent, points)?,
            ),
        };
    let body = match format {
        Format::Csv => {
            let table: Vec<Vec<String>> =
                rows.iter().map(|p| vec![sig12(p.x), cell(p.y)]).collect();
            csv_table(&columns, &table)?
        }
        Format::Json => {
            let mut obj = Map::new();
            let figure = match args.figure {
                Figure::Fig2a => "2a",
                Figure::Fig2b => "2b",
                Figure::Fig3 => "3",
            };
            obj.insert("figure".into(), figure.into());
            if let Some((name, value)) = fixed {
                obj.insert(name.into(), value.into());
            }
            let list = rows
                .iter()
                .map(|p| {
                    let mut row = Map::new();
                    row.insert(columns[0].into(), p.x.into());
                    row.insert(columns[1].into(), p.y.map_or(Value::Null, Value::from));
                    Value::Object(row)
                })
                .collect();
            obj.insert("rows".into(), Value::Array(list));
            json(&Value::Object(obj))?
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct DiscordOut {
    r: f64,
    t: f64,
    closed: DiscordReport,
    oracle: DiscordReport,
    gap_right: f64,
    gap_left: f64,
    tolerance: f64,
}

pub fn discord(args: &DiscordArgs, format: Format) -> Result<Outcome, CliError> {
    let closed = DiscordReport::closed_form(args.r, args.t)?;
    let schedule = SearchSchedule {
        grid: args.grid as usize,
        ..SearchSchedule::default()
    };
    let oracle = DiscordReport::oracle(args.r, args.t, &schedule)?;
    let out = DiscordOut {
        r: args.r,
        t: args.t,
        gap_right: (closed.d_right - oracle.d_right).abs(),
        gap_left: (closed.d_left - oracle.d_left).abs(),
        closed,
        oracle,
        tolerance: ORACLE_GAP_TOL,
    };
    let worst = out.gap_right.max(out.gap_left);
    let breach = (worst > ORACLE_GAP_TOL)
        .then(|| format!("discord oracle gap {worst:e} exceeds {ORACLE_GAP_TOL:e}"));
    let body = match format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let row = |method: &str, d: &DiscordReport, gaps: [Option<f64>; 2]| {
                vec![
                    method.to_string(),
                    sig12(out.r),
                    sig12(out.t),
                    sig12(d.d_right),
                    sig12(d.d_left),
                    cell(d.d_delta),
                    sig12(d.d_symm),
                    cell(gaps[0]),
                    cell(gaps[1]),
                ]
            };
            csv_table(
                &[
                    "method",
                    "r",
                    "t",
                    "d_right",
                    "d_left",
                    "d_delta",
                    "d_symm",
                    "gap_right",
                    "gap_left",
                ],
                &[
                    row("closed-form", &out.closed, [None, None]),
                    row(
                        "oracle",
                        &out.oracle,
                        [Some(out.gap_right), Some(out.gap_left)],
                    ),
                ],
            )?
        }
    };
    Ok(Outcome { body, breach })
}

#[derive(Serialize)]
struct Quantity {
    analytic: f64,
    empirical: f64,
    std_err: f64,
    /// `None` when the estimate has zero variance but misses the analytic value.
    z: Option<f64>,
}

impl Quantity {
    fn new(analytic: f64, est: Estimate) -> Self {
        let diff = est.value - analytic;
        let z = if est.std_err > 0.0 {
            Some(diff / est.std_err)
        } else if diff.abs() < 1e-12 {
            Some(0.0)
        } else {
            None
        };
        Quantity {
            analytic,
            empirical: est.value,
            std_err: est.std_err,
            z,
        }
    }
}

#[derive(Serialize)]
struct SimulateOut {
    s: f64,
    t: f64,
    trials: u64,
    seed: u64,
    p_b: Quantity,
    p_c: Quantity,
    p_bc: Quantity,
    misidentifications: u64,
}

pub fn simulate(args: &SimulateArgs, format: Format) -> Result<Outcome, CliError> {
    let params = ProtocolParams::equal_weight(args.s, args.t)?;
    let stats = match args.workers {
        Some(w) => run_trials_with_workers(&params, args.trials, args.seed, w as usize)?,
        None => run_trials(&params, args.trials, args.seed)?,
    };
    let probs = empirical_probs(&stats)?;
    let check = verify_unambiguity(&stats);
    let out = SimulateOut {
        s: args.s,
        t: args.t,
        trials: stats.n_trials(),
        seed: stats.seed(),
        p_b: Quantity::new(success_prob_bob(&params), probs.p_b),
        p_c: Quantity::new(success_prob_charlie(&params), probs.p_c),
        p_bc: Quantity::new(joint_success_prob(&params), probs.p_bc),
        misidentifications: check.violations,
    };
    let breach = (!check.ok).then(|| format!("{} misidentified trials", check.violations));
    let body = match format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let row = |name: &str, q: &Quantity| {
                vec![
                    name.to_string(),
                    sig12(q.analytic),
                    sig12(q.empirical),
                    sig12(q.std_err),
                    cell(q.z),
                ]
            };
            csv_table(
                &["quantity", "analytic", "empirical", "std_err", "z"],
                &[
                    row("p_b", &out.p_b),
                    row("p_c", &out.p_c),
                    row("p_bc", &out.p_bc),
                ],
            )?
        }
    };
    Ok(Outcome { body, breach })
}

#[derive(Serialize)]
struct MatrixOut {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixOut {
    fn from(m: &CMatrix) -> Self {
        let part = |f: fn(&seqdisc::C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixOut {
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

#[derive(Serialize)]
struct ObserverPovm {
    /// `Π₀` (inconclusive), `Π₁`, `Π₂`
    elements: Vec<MatrixOut>,
    completeness_defect: f64,
    positivity_defect: f64,
    /// `⟨2|Π₁|2⟩` on the states this observer receives
    residual_1_on_2: f64,
    /// `⟨1|Π₂|1⟩`
    residual_2_on_1: f64,
}

impl ObserverPovm {
    fn new(povm: &PovmSet, inputs: &[StateVector; 2]) -> Self {
        ObserverPovm {
            elements: povm.elements().iter().map(MatrixOut::from).collect(),
            completeness_defect: povm.completeness_defect(),
            positivity_defect: povm.positivity_defect(),
            residual_1_on_2: povm.probability(1, &inputs[1]).abs(),
            residual_2_on_1: povm.probability(2, &inputs[0]).abs(),
        }
    }

    fn worst(&self) -> f64 {
        self.completeness_defect
            .max(self.residual_1_on_2)
            .max(self.residual_2_on_1)
    }
}

#[derive(Serialize)]
struct PovmOut {
    s: f64,
    t: f64,
    bob: ObserverPovm,
    charlie: ObserverPovm,
}

pub fn povm(args: &PovmArgs, format: Format) -> Result<Outcome, CliError> {
    let params = ProtocolParams::equal_weight(args.s, args.t)?;
    let protocol = SequentialProtocol::new(params)?;
    let out = PovmOut {
        s: args.s,
        t: args.t,
        bob: ObserverPovm::new(&povm_elements(protocol.bob())?, protocol.prepared()),
        charlie: ObserverPovm::new(&povm_elements(protocol.charlie())?, protocol.relayed()),
    };
    let worst = out.bob.worst().max(out.charlie.worst());
    let breach = (worst >= POVM_TOL).then(|| format!("POVM defect {worst:e} reaches {POVM_TOL:e}"));
    let body = match format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut rows = Vec::new();
            for (name, obs) in [("bob", &out.bob), ("charlie", &out.charlie)] {
                for (k, m) in obs.elements.iter().enumerate() {
                    for i in 0..2 {
                        for j in 0..2 {
                            rows.push(vec![
                                name.to_string(),
                                k.to_string(),
                                i.to_string(),
                                j.to_string(),
                                sig12(m.re[i][j]),
                                sig12(m.im[i][j]),
                            ]);
                        }
                    }
                }
            }
            csv_table(&["observer", "element", "row", "col", "re", "im"], &rows)?
        }
    };
    Ok(Outcome { body, breach })
}
