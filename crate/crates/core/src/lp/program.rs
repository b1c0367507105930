//! Solver-agnostic linear program representation.

use crate::model::ConstraintFamily;

use super::var::VarTable;

/// Bounds of one constraint row. Two-sided windows stay single rows here;
/// solver adapters split them into facets as needed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RowBound {
    /// `expr ≤ ub`
    Le(f64),
    /// `expr ≥ lb`
    Ge(f64),
    /// `lb ≤ expr ≤ ub`
    Range(f64, f64),
}

impl RowBound {
    pub fn lb(&self) -> Option<f64> {
        match *self {
            RowBound::Ge(lb) | RowBound::Range(lb, _) => Some(lb),
            RowBound::Le(_) => None,
        }
    }

    pub fn ub(&self) -> Option<f64> {
        match *self {
            RowBound::Le(ub) | RowBound::Range(_, ub) => Some(ub),
            RowBound::Ge(_) => None,
        }
    }

    /// Number of finite one-sided inequalities this row contributes.
    pub fn n_facets(&self) -> usize {
        match self {
            RowBound::Range(..) => 2,
            _ => 1,
        }
    }
}

/// One sparse constraint row.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub family: ConstraintFamily,
    pub terms: Vec<(usize, f64)>,
    pub bound: RowBound,
}

impl Row {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, c)| c * x[j]).sum()
    }

    /// Violation of this row at `x` (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let v = self.eval(x);
        let below = self.bound.lb().map_or(0.0, |lb| (lb - v).max(0.0));
        let above = self.bound.ub().map_or(0.0, |ub| (v - ub).max(0.0));
        below.max(above)
    }
}

/// The assembled LP: minimize `objective·x + objective_offset` subject to the
/// rows and per-variable bounds. Times are in seconds, energies in kWh, so
/// the objective value is the effective-energy surrogate directly.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub objective_offset: f64,
    pub rows: Vec<Row>,
    /// Per-variable (lb, ub); infinities mark free directions.
    pub var_bounds: Vec<(f64, f64)>,
    pub vars: VarTable,
}

impl LinearProgram {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Scalar inequality count: each finite side of every row. This is the
    /// headline constraint count (variable bounds are not rows).
    pub fn n_facets(&self) -> usize {
        self.rows.iter().map(|r| r.bound.n_facets()).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let dot: f64 = self
            .objective
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .sum();
        dot + self.objective_offset
    }

    /// Largest violation over rows and variable bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let row_max = self
            .rows
            .iter()
            .map(|r| r.violation(x))
            .fold(0.0f64, f64::max);
        let bound_max = self
            .var_bounds
            .iter()
            .zip(x)
            .map(|(&(lb, ub), &v)| (lb - v).max(v - ub).max(0.0))
            .fold(0.0f64, f64::max);
        row_max.max(bound_max)
    }

    pub fn rows_in_family(&self, family: ConstraintFamily) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    /// Structural soundness: finite coefficients, in-range indices, ordered
    /// bounds. Returns the first problem found.
    pub fn check_well_formed(&self) -> Result<(), String> {
        let n = self.n_vars();
        if self.var_bounds.len() != n {
            return Err(format!(
                "{} variable bounds for {} variables",
                self.var_bounds.len(),
                n
            ));
        }
        if !self.vars.is_empty() && self.vars.len() != n {
            return Err(format!(
                "{} variable names for {} variables",
                self.vars.len(),
                n
            ));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err("non-finite objective coefficient".into());
        }
        for (k, row) in self.rows.iter().enumerate() {
            for &(j, c) in &row.terms {
                if j >= n {
                    return Err(format!("row {k} references variable {j} of {n}"));
                }
                if !c.is_finite() {
                    return Err(format!("row {k} has non-finite coefficient"));
                }
            }
            if let RowBound::Range(lb, ub) = row.bound {
                if lb > ub {
                    return Err(format!("row {k} has crossed range bounds"));
                }
            }
        }
        for (j, &(lb, ub)) in self.var_bounds.iter().enumerate() {
            if lb > ub {
                return Err(format!("variable {j} has crossed bounds"));
            }
        }
        Ok(())
    }
}
