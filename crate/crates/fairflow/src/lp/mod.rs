//! Small linear-programming toolkit: a model container, a bounded-variable
//! two-phase revised simplex, and fixed-format MPS export/import.
//!
//! All problems are minimisations of `c'x` subject to rows `a'x {<=,=,>=} b`
//! and per-variable bounds `lo <= x <= hi`.  The toolkit is deliberately
//! dense-basis and deterministic: given the same model it performs the same
//! pivots and returns bitwise-identical solutions, which the rest of the
//! crate relies on for reproducible runs.

mod mps;
mod simplex;

pub use mps::{export_mps, import_mps, import_solution, write_solution_values, ImportReport};
pub use simplex::{solve_simplex, SimplexOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("invalid model: {0}")]
    ModelInvalid(String),
    #[error("cannot derive a unique 8-character name for `{0}` (too many collisions)")]
    NameCollisionAfterSanitize(String),
    #[error("solution references unknown variable `{0}`")]
    UnknownVariableName(String),
    #[error("MPS line {line}: {msg}")]
    MpsParse { line: usize, msg: String },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// One linear constraint: `sum(coeff * x[var]) relation rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    /// Sparse coefficients as `(variable index, value)`, ascending by index,
    /// no duplicates, no explicit zeros required.
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimisation LP with named variables, sparse rows and box bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    var_names: Vec<String>,
    /// `(lower, upper)` per variable; defaults to `[0, +inf)`.
    bounds: Vec<(f64, f64)>,
    /// Sparse objective, ascending by variable index.
    objective: Vec<(usize, f64)>,
    rows: Vec<Row>,
}

impl LpModel {
    /// Creates a model with `num_vars` variables named `x0..`, all bounded
    /// `[0, +inf)`, empty objective, no rows.
    pub fn new(num_vars: usize) -> Self {
        LpModel {
            var_names: (0..num_vars).map(|i| format!("x{i}")).collect(),
            bounds: vec![(0.0, f64::INFINITY); num_vars],
            objective: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn set_var_name(&mut self, var: usize, name: impl Into<String>) {
        self.var_names[var] = name.into();
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    /// Sparse objective, ascending by variable index.
    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    /// Adds `coeff` to the objective coefficient of `var`.
    pub fn add_objective(&mut self, var: usize, coeff: f64) {
        match self.objective.binary_search_by_key(&var, |&(v, _)| v) {
            Ok(i) => self.objective[i].1 += coeff,
            Err(i) => self.objective.insert(i, (var, coeff)),
        }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    /// Appends a row and returns its index.  Coefficients are sorted and
    /// merged; entries exactly zero are kept out.
    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row {
            name: name.into(),
            coeffs: merge_coeffs(coeffs),
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    /// Checks structural soundness: indices in range, sorted unique row and
    /// objective coefficients, finite values, consistent bounds, non-empty
    /// unique names.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let invalid = |msg: String| Err(LpError::ModelInvalid(msg));
        {
            let mut seen = std::collections::HashSet::new();
            for name in &self.var_names {
                if name.is_empty() {
                    return invalid("empty variable name".into());
                }
                if !seen.insert(name) {
                    return invalid(format!("duplicate variable name `{name}`"));
                }
            }
        }
        for (var, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return invalid(format!("variable {var}: bad bounds [{lo}, {hi}]"));
            }
            if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return invalid(format!("variable {var}: bad bounds [{lo}, {hi}]"));
            }
        }
        let check_sparse = |entries: &[(usize, f64)], what: &str| {
            let mut prev: Option<usize> = None;
            for &(var, value) in entries {
                if var >= n {
                    return invalid(format!("{what}: variable index {var} out of range"));
                }
                if !value.is_finite() {
                    return invalid(format!("{what}: non-finite coefficient on variable {var}"));
                }
                if prev.is_some_and(|p| p >= var) {
                    return invalid(format!("{what}: unsorted or duplicate variable {var}"));
                }
                prev = Some(var);
            }
            Ok(())
        };
        check_sparse(&self.objective, "objective")?;
        let mut names = std::collections::HashSet::new();
        for (i, row) in self.rows.iter().enumerate() {
            if row.name.is_empty() {
                return invalid(format!("row {i}: empty name"));
            }
            if !names.insert(&row.name) {
                return invalid(format!("duplicate row name `{}`", row.name));
            }
            if !row.rhs.is_finite() {
                return invalid(format!("row `{}`: non-finite rhs", row.name));
            }
            check_sparse(&row.coeffs, &format!("row `{}`", row.name))?;
        }
        Ok(())
    }

    /// Objective value `c'x` of an assignment.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v]).sum()
    }

    /// Largest constraint or bound violation of an assignment.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (var, &(lo, hi)) in self.bounds.iter().enumerate() {
            worst = worst.max(lo - x[var]).max(x[var] - hi);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(v, c)| c * x[v]).sum();
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }
}

fn merge_coeffs(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coeffs.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
    for (var, value) in coeffs {
        match merged.last_mut() {
            Some((last, acc)) if *last == var => *acc += value,
            _ => merged.push((var, value)),
        }
    }
    merged.retain(|&(_, v)| v != 0.0);
    merged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; meaningful only when `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}
