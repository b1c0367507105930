//! LP solving behind a solver-agnostic contract.
//!
//! The backend is an interior-point conic solver; this adapter scales the
//! time columns for conditioning, splits ranges and variable bounds into
//! nonnegative-cone facets, and re-verifies every claimed optimum
//! independently: primal residual, recomputed objective, and duality gap.
//!
//! Warm starts are point-level: the baseline timetable is mapped onto the
//! columns, checked for feasibility, and its objective becomes an incumbent
//! bound the solve must match or beat. The interior-point backend takes no
//! initial iterate, so both warm and cold runs reach the same optimum; the
//! incumbent check is what the warm start buys in correctness.

mod extract;

pub use extract::{extract_timetable, ExtractError};

use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use thiserror::Error;

use crate::fitting::FitBundle;
use crate::lp::{evaluate_sigma, phase_blocks, BuildError, LinearProgram};
use crate::model::{Instance, Timetable};
use crate::pairing::SyncEvents;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("MODEL_ERROR: {0}")]
    Model(String),
    #[error("solver terminated without a usable result: {0}")]
    Numerical(String),
    #[error("warm-start point violates the model by {violation}")]
    WarmStartInfeasible { violation: f64 },
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Acceptance tolerance for feasibility and relative duality gap.
    pub tol: f64,
    pub max_iters: u32,
    /// Recorded for reproducibility; the deterministic pipeline does not
    /// consume randomness.
    pub seed: u64,
    /// Seconds are scaled to units of this many seconds inside the backend.
    pub time_scale: f64,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            max_iters: 200,
            seed: 0,
            time_scale: 100.0,
            verbose: false,
        }
    }
}

/// A solve outcome. For `Optimal` status the values satisfy every row and
/// bound within the acceptance tolerance and the objective equals the
/// recomputed `c·x + offset`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub status: SolveStatus,
    /// Variable values in model units (seconds).
    pub values: Vec<f64>,
    /// `c·x + offset`, kWh.
    pub objective: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    /// Largest violation over rows and bounds, seconds.
    pub primal_residual: f64,
    /// `|primal - dual| / max(1, |objective|)`.
    pub duality_gap_rel: f64,
    /// Objective of the warm-start point, when one was supplied.
    pub warm_objective: Option<f64>,
}

/// Maps a timetable to a full-length variable vector: event times from the
/// timetable, each event triple from the phase blocks it induces (so the
/// point satisfies the hypograph rows with equality on the binding pieces).
pub fn warm_start_point(
    instance: &Instance,
    fits: &FitBundle<f64>,
    events: &SyncEvents,
    lp: &LinearProgram,
    tt: &Timetable,
) -> Result<Vec<f64>, BuildError> {
    let mut x = vec![0.0f64; lp.n_vars()];
    for (&(train, platform), &idx) in lp.vars.iter_arrivals() {
        let at = tt.arrival(train, platform).ok_or_else(|| BuildError::MissingEvent {
            key: format!(
                "arrival({},{})",
                instance.train_id(train),
                instance.network.platform_id(platform)
            ),
        })?;
        x[idx] = at.as_secs_f64();
    }
    for (&(train, platform), &idx) in lp.vars.iter_departures() {
        let at = tt
            .departure(train, platform)
            .ok_or_else(|| BuildError::MissingEvent {
                key: format!(
                    "departure({},{})",
                    instance.train_id(train),
                    instance.network.platform_id(platform)
                ),
            })?;
        x[idx] = at.as_secs_f64();
    }
    let _ = events;
    for (event, vars) in lp.vars.iter_event_vars() {
        let ((acc_start, acc_end), (brk_start, brk_end)) =
            phase_blocks(instance, tt, fits, event)?;
        let sigma = evaluate_sigma(instance, tt, fits, event)?;
        x[vars.ends_min] = brk_end.min(acc_end);
        x[vars.starts_min] = (-acc_start).min(-brk_start);
        x[vars.overlap] = sigma;
    }
    Ok(x)
}

/// Solves the LP to proven optimality. With a warm-start point the solved
/// objective must not be worse than the point's objective (the solve fails
/// loudly if it is, since that indicates a broken model).
pub fn solve_lp(
    lp: &LinearProgram,
    warm_start: Option<&[f64]>,
    options: &SolveOptions,
) -> Result<Solution, SolveError> {
    lp.check_well_formed().map_err(SolveError::Model)?;
    let started = Instant::now();

    let warm_objective = match warm_start {
        Some(point) => {
            if point.len() != lp.n_vars() {
                return Err(SolveError::Model(format!(
                    "warm-start point has {} values for {} variables",
                    point.len(),
                    lp.n_vars()
                )));
            }
            let violation = lp.max_violation(point);
            if violation > options.tol {
                return Err(SolveError::WarmStartInfeasible { violation });
            }
            Some(lp.objective_value(point))
        }
        None => None,
    };

    let n = lp.n_vars();
    let scale = options.time_scale.max(1e-9);

    // Facets: every finite row side and variable bound becomes one
    // nonnegative-cone row `a·x' ≤ b/scale` (lower sides negated).
    let mut tri_rows: Vec<usize> = Vec::new();
    let mut tri_cols: Vec<usize> = Vec::new();
    let mut tri_vals: Vec<f64> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut facet = 0usize;
    let mut push_facet = |terms: &[(usize, f64)], bound: f64, negate: bool| {
        for &(j, c) in terms {
            tri_rows.push(facet);
            tri_cols.push(j);
            tri_vals.push(if negate { -c } else { c });
        }
        rhs.push(if negate { -bound } else { bound });
        facet += 1;
    };
    for row in &lp.rows {
        if let Some(ub) = row.bound.ub() {
            push_facet(&row.terms, ub / scale, false);
        }
        if let Some(lb) = row.bound.lb() {
            push_facet(&row.terms, lb / scale, true);
        }
    }
    for (j, &(lb, ub)) in lp.var_bounds.iter().enumerate() {
        if ub.is_finite() {
            push_facet(&[(j, 1.0)], ub / scale, false);
        }
        if lb.is_finite() {
            push_facet(&[(j, 1.0)], lb / scale, true);
        }
    }
    let m = facet;

    let a = CscMatrix::new_from_triplets(m, n, tri_rows, tri_cols, tri_vals);
    let p = CscMatrix::<f64>::zeros((n, n));
    let q: Vec<f64> = lp.objective.iter().map(|c| c * scale).collect();
    let cones = [SupportedConeT::NonnegativeConeT(m)];

    let settings = DefaultSettings {
        verbose: options.verbose,
        max_iter: options.max_iters,
        tol_gap_abs: 1e-10,
        tol_gap_rel: 1e-10,
        tol_feas: 1e-10,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &q, &a, &rhs, &cones, settings);
    solver.solve();
    let wall_time_s = started.elapsed().as_secs_f64();
    let raw = &solver.solution;

    let status = match raw.status {
        SolverStatus::Solved | SolverStatus::AlmostSolved => SolveStatus::Optimal,
        SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
            SolveStatus::Infeasible
        }
        SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
            SolveStatus::Unbounded
        }
        SolverStatus::MaxIterations => SolveStatus::IterationLimit,
        other => {
            return Err(SolveError::Numerical(format!("backend status {other:?}")))
        }
    };

    if status != SolveStatus::Optimal {
        return Ok(Solution {
            status,
            values: Vec::new(),
            objective: f64::NAN,
            iterations: raw.iterations as usize,
            wall_time_s,
            primal_residual: f64::NAN,
            duality_gap_rel: f64::NAN,
            warm_objective,
        });
    }

    let values: Vec<f64> = raw.x.iter().map(|v| v * scale).collect();
    let objective = lp.objective_value(&values);
    let primal_residual = lp.max_violation(&values);
    let gap = (raw.obj_val - raw.obj_val_dual).abs();
    let duality_gap_rel = gap / f64::max(1.0, objective.abs());

    if primal_residual > options.tol {
        return Err(SolveError::Numerical(format!(
            "claimed optimum violates the model by {primal_residual}"
        )));
    }
    if duality_gap_rel > options.tol {
        return Err(SolveError::Numerical(format!(
            "duality gap {duality_gap_rel} above tolerance"
        )));
    }
    let backend_objective = raw.obj_val + lp.objective_offset;
    if (backend_objective - objective).abs() > options.tol * f64::max(1.0, objective.abs()) {
        return Err(SolveError::Numerical(format!(
            "backend objective {backend_objective} disagrees with recomputation {objective}"
        )));
    }
    if let Some(warm_obj) = warm_objective {
        if objective > warm_obj + options.tol * f64::max(1.0, warm_obj.abs()) {
            return Err(SolveError::Numerical(format!(
                "optimum {objective} worse than warm-start incumbent {warm_obj}"
            )));
        }
    }

    Ok(Solution {
        status,
        values,
        objective,
        iterations: raw.iterations as usize,
        wall_time_s,
        primal_residual,
        duality_gap_rel,
        warm_objective,
    })
}
