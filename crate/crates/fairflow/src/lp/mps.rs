//! Fixed-format MPS export/import and a plain `name value` solution format.
//!
//! Dialect notes (kept deliberately narrow and documented here):
//!
//! * sections NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA; RANGES and integer
//!   markers are rejected;
//! * names are sanitised to `[A-Za-z0-9_]`, at most 8 characters; colliding
//!   names keep their first 5 characters and get a `_NN` suffix, and more
//!   than 100 collisions on one stem is an error;
//! * numeric fields are written with the shortest decimal digits that
//!   parse back to the exact binary value (they may exceed the classic
//!   12-character field). Exporting, importing and exporting again yields
//!   byte-identical text;
//! * `UP` sets only the upper bound (no sign-dependent lower-bound rewrite),
//!   `LO`/`MI`/`PL`/`FX`/`FR`/`UP` are supported, one objective (`N`) row.

use super::{LpError, LpModel, LpSolution, LpStatus, Relation};
use std::collections::HashMap;

/// Maximum MPS name length.
const NAME_LEN: usize = 8;
/// Stem kept when suffixing colliding names.
const STEM_LEN: usize = 5;

fn clean_name(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .take(NAME_LEN)
        .collect();
    if out.is_empty() {
        out.push('X');
    }
    out
}

/// Maps each name to a unique sanitised name, first come first served.
/// `reserved` names (e.g. `OBJ`) are never produced.
fn sanitize_names<'a>(
    names: impl Iterator<Item = &'a str>,
    reserved: &[&str],
) -> Result<Vec<String>, LpError> {
    let mut used: std::collections::HashSet<String> =
        reserved.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    for name in names {
        let clean = clean_name(name);
        if used.insert(clean.clone()) {
            out.push(clean);
            continue;
        }
        let stem: String = clean.chars().take(STEM_LEN).collect();
        let mut chosen = None;
        for n in 0..100 {
            let candidate = format!("{stem}_{n:02}");
            if used.insert(candidate.clone()) {
                chosen = Some(candidate);
                break;
            }
        }
        match chosen {
            Some(c) => out.push(c),
            None => return Err(LpError::NameCollisionAfterSanitize(name.to_string())),
        }
    }
    Ok(out)
}

fn data_line(out: &mut String, field2: &str, field3: &str, value: Option<f64>) {
    match value {
        Some(v) => out.push_str(&format!("    {field2:<8}  {field3:<8}  {v}\n")),
        None => {
            let line = format!("    {field2:<8}  {field3:<8}");
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

/// Renders the model as fixed-format MPS.
pub fn export_mps(model: &LpModel) -> Result<String, LpError> {
    model.validate()?;
    let row_names = sanitize_names(model.rows().iter().map(|r| r.name.as_str()), &["OBJ", "RHS", "BND"])?;
    let col_names = sanitize_names(model.var_names().iter().map(|s| s.as_str()), &["OBJ", "RHS", "BND"])?;

    let mut out = String::new();
    out.push_str("NAME          FAIRFLOW\n");
    out.push_str("ROWS\n");
    out.push_str(" N  OBJ\n");
    for (row, name) in model.rows().iter().zip(&row_names) {
        let tag = match row.relation {
            Relation::Le => 'L',
            Relation::Ge => 'G',
            Relation::Eq => 'E',
        };
        out.push_str(&format!(" {tag}  {name}\n"));
    }

    // Column-wise entries: objective first, then rows ascending.
    let mut col_entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, row) in model.rows().iter().enumerate() {
        for &(var, value) in &row.coeffs {
            col_entries[var].push((i, value));
        }
    }
    out.push_str("COLUMNS\n");
    let objective: HashMap<usize, f64> = model.objective().iter().copied().collect();
    for var in 0..model.num_vars() {
        let name = &col_names[var];
        let mut wrote = false;
        if let Some(&c) = objective.get(&var) {
            if c != 0.0 {
                data_line(&mut out, name, "OBJ", Some(c));
                wrote = true;
            }
        }
        for &(row, value) in &col_entries[var] {
            data_line(&mut out, name, &row_names[row], Some(value));
            wrote = true;
        }
        if !wrote {
            // Keep otherwise-empty columns visible so import preserves the
            // variable set.
            data_line(&mut out, name, "OBJ", Some(0.0));
        }
    }

    out.push_str("RHS\n");
    for (i, row) in model.rows().iter().enumerate() {
        if row.rhs != 0.0 {
            data_line(&mut out, "RHS", &row_names[i], Some(row.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (var, &(lo, hi)) in model.bounds().iter().enumerate() {
        let name = &col_names[var];
        let bound_line = |out: &mut String, tag: &str, value: Option<f64>| match value {
            Some(v) => out.push_str(&format!(" {tag} {:<8}  {name:<8}  {v}\n", "BND")),
            None => {
                let line = format!(" {tag} {:<8}  {name:<8}", "BND");
                out.push_str(line.trim_end());
                out.push('\n');
            }
        };
        if lo == 0.0 && hi == f64::INFINITY {
            continue;
        }
        if lo == hi {
            bound_line(&mut out, "FX", Some(lo));
            continue;
        }
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            bound_line(&mut out, "FR", None);
            continue;
        }
        if lo == f64::NEG_INFINITY {
            bound_line(&mut out, "MI", None);
        } else if lo != 0.0 {
            bound_line(&mut out, "LO", Some(lo));
        }
        if hi != f64::INFINITY {
            bound_line(&mut out, "UP", Some(hi));
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

/// Parses fixed-format MPS produced by [`export_mps`] (or a compatible
/// writer) back into a model.
pub fn import_mps(text: &str) -> Result<LpModel, LpError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Bounds,
        Done,
    }
    let err = |line: usize, msg: &str| LpError::MpsParse {
        line,
        msg: msg.to_string(),
    };

    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    // name -> (index, relation); rows in declaration order
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut row_defs: Vec<(String, Relation)> = Vec::new();
    let mut row_coeffs: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut row_rhs: Vec<f64> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut col_names: Vec<String> = Vec::new();
    let mut objective: Vec<(usize, f64)> = Vec::new();
    let mut bounds: Vec<(f64, f64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let is_header = !raw.starts_with(' ');
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        if is_header {
            section = match tokens[0] {
                "NAME" => section,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => return Err(err(lineno, "RANGES section is not supported")),
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    section = Section::Done;
                    break;
                }
                other => return Err(err(lineno, &format!("unknown section `{other}`"))),
            };
            continue;
        }
        match section {
            Section::None | Section::Done => {
                return Err(err(lineno, "data before any section header"))
            }
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(err(lineno, "expected `<type> <name>`"));
                }
                let name = tokens[1].to_string();
                match tokens[0] {
                    "N" => {
                        if objective_row.is_some() {
                            return Err(err(lineno, "multiple objective rows"));
                        }
                        objective_row = Some(name);
                    }
                    t => {
                        let relation = match t {
                            "L" => Relation::Le,
                            "G" => Relation::Ge,
                            "E" => Relation::Eq,
                            _ => return Err(err(lineno, &format!("unknown row type `{t}`"))),
                        };
                        if row_index.insert(name.clone(), row_defs.len()).is_some() {
                            return Err(err(lineno, &format!("duplicate row `{name}`")));
                        }
                        row_defs.push((name, relation));
                        row_coeffs.push(Vec::new());
                        row_rhs.push(0.0);
                    }
                }
            }
            Section::Columns => {
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err(lineno, "expected `<col> <row> <value> [<row> <value>]`"));
                }
                if tokens[1] == "'MARKER'" || tokens.contains(&"'INTORG'") {
                    return Err(err(lineno, "integer markers are not supported"));
                }
                let col = *col_index.entry(tokens[0].to_string()).or_insert_with(|| {
                    col_names.push(tokens[0].to_string());
                    bounds.push((0.0, f64::INFINITY));
                    col_names.len() - 1
                });
                for pair in tokens[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| err(lineno, &format!("invalid number `{}`", pair[1])))?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        objective.push((col, value));
                    } else {
                        let &row = row_index
                            .get(pair[0])
                            .ok_or_else(|| err(lineno, &format!("unknown row `{}`", pair[0])))?;
                        row_coeffs[row].push((col, value));
                    }
                }
            }
            Section::Rhs => {
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(err(lineno, "expected `<set> <row> <value> [<row> <value>]`"));
                }
                for pair in tokens[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| err(lineno, &format!("invalid number `{}`", pair[1])))?;
                    if Some(pair[0]) == objective_row.as_deref() {
                        return Err(err(lineno, "rhs on the objective row is not supported"));
                    }
                    let &row = row_index
                        .get(pair[0])
                        .ok_or_else(|| err(lineno, &format!("unknown row `{}`", pair[0])))?;
                    row_rhs[row] = value;
                }
            }
            Section::Bounds => {
                let (tag, var_name, value) = match tokens.len() {
                    3 => (tokens[0], tokens[2], None),
                    4 => (tokens[0], tokens[2], Some(tokens[3])),
                    _ => return Err(err(lineno, "expected `<type> <set> <col> [<value>]`")),
                };
                let &var = col_index
                    .get(var_name)
                    .ok_or_else(|| err(lineno, &format!("unknown column `{var_name}`")))?;
                let parse = |v: Option<&str>| -> Result<f64, LpError> {
                    let v = v.ok_or_else(|| err(lineno, "missing bound value"))?;
                    v.parse()
                        .map_err(|_| err(lineno, &format!("invalid number `{v}`")))
                };
                match tag {
                    "UP" => bounds[var].1 = parse(value)?,
                    "LO" => bounds[var].0 = parse(value)?,
                    "FX" => {
                        let v = parse(value)?;
                        bounds[var] = (v, v);
                    }
                    "FR" => bounds[var] = (f64::NEG_INFINITY, f64::INFINITY),
                    "MI" => bounds[var].0 = f64::NEG_INFINITY,
                    "PL" => bounds[var].1 = f64::INFINITY,
                    other => return Err(err(lineno, &format!("unsupported bound type `{other}`"))),
                }
            }
        }
    }
    if section != Section::Done {
        return Err(err(text.lines().count(), "missing ENDATA"));
    }

    let mut model = LpModel::new(col_names.len());
    for (var, name) in col_names.iter().enumerate() {
        model.set_var_name(var, name.clone());
        model.set_bounds(var, bounds[var].0, bounds[var].1);
    }
    for (var, value) in objective {
        model.add_objective(var, value);
    }
    for (i, (name, relation)) in row_defs.into_iter().enumerate() {
        model.add_row(name, std::mem::take(&mut row_coeffs[i]), relation, row_rhs[i]);
    }
    model.validate()?;
    Ok(model)
}

/// Feasibility report attached to an imported solution.
#[derive(Debug, Clone, Copy)]
pub struct ImportReport {
    /// Largest bound or row violation of the imported point.
    pub max_violation: f64,
    /// Set when `max_violation` exceeds the tolerance the caller passed;
    /// importing still succeeds, the caller decides what to do.
    pub infeasible_import: bool,
}

/// Reads a `name value` solution file against `model`.
///
/// Names may be the model's own variable names or their MPS-sanitised
/// forms (so output from a solver fed by [`export_mps`] resolves).
/// Unmentioned variables sit at their lower bound (or the in-bounds value
/// closest to zero when the lower bound is infinite).  Feasibility is
/// checked against `feas_tol` and reported, not enforced.
pub fn import_solution(
    model: &LpModel,
    text: &str,
    feas_tol: f64,
) -> Result<(LpSolution, ImportReport), LpError> {
    let mut lookup: HashMap<String, usize> = HashMap::new();
    for (i, name) in model.var_names().iter().enumerate() {
        lookup.insert(name.clone(), i);
    }
    if let Ok(sanitized) = sanitize_names(
        model.var_names().iter().map(|s| s.as_str()),
        &["OBJ", "RHS", "BND"],
    ) {
        for (i, name) in sanitized.into_iter().enumerate() {
            lookup.entry(name).or_insert(i);
        }
    }

    let mut x: Vec<f64> = model
        .bounds()
        .iter()
        .map(|&(lo, hi)| {
            if lo.is_finite() {
                lo
            } else {
                0.0f64.min(hi)
            }
        })
        .collect();
    let mut assigned = vec![false; model.num_vars()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(name), Some(value), None) = (tokens.next(), tokens.next(), tokens.next())
        else {
            return Err(LpError::MpsParse {
                line: lineno + 1,
                msg: "expected `<variable> <value>`".to_string(),
            });
        };
        let &var = lookup
            .get(name)
            .ok_or_else(|| LpError::UnknownVariableName(name.to_string()))?;
        let value: f64 = value.parse().map_err(|_| LpError::MpsParse {
            line: lineno + 1,
            msg: format!("invalid number `{value}`"),
        })?;
        x[var] = value;
        assigned[var] = true;
    }

    let max_violation = model.max_violation(&x);
    let objective_value = model.objective_value(&x);
    Ok((
        LpSolution {
            status: LpStatus::Optimal,
            x,
            objective_value,
            iterations: 0,
        },
        ImportReport {
            max_violation,
            infeasible_import: max_violation > feas_tol,
        },
    ))
}

/// Renders an assignment as the `name value` solution format read by
/// [`import_solution`].
pub fn write_solution_values(model: &LpModel, x: &[f64]) -> String {
    let mut out = String::new();
    for (name, value) in model.var_names().iter().zip(x) {
        out.push_str(&format!("{name} {value}\n"));
    }
    out
}
