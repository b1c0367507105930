//! Text interchange for the assembled LP, in the common LP-file dialect
//! (named rows and columns, `Minimize`/`Subject To`/`Bounds`/`End`), so
//! third-party solvers can cross-check models.
//!
//! Two-sided rows are written as `_lo`/`_up` facet pairs for portability;
//! reading therefore yields one-sided rows. The objective's constant term
//! has no place in the LP dialect and travels in a structured comment.

use std::io::Write;

use thiserror::Error;

use crate::model::ConstraintFamily;
use crate::pairing::SyncEvents;

use super::program::{LinearProgram, Row, RowBound};
use super::var::VarTable;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn family_prefix(family: ConstraintFamily) -> &'static str {
    family.tag()
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    let mut first = true;
    for &(j, c) in terms {
        if c == 0.0 {
            continue;
        }
        let mag = c.abs();
        if first {
            if c < 0.0 {
                out.push_str("- ");
            }
            first = false;
        } else if c < 0.0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&format!("{} {}", mag, names[j]));
    }
    if first {
        out.push('0');
    }
}

pub fn write_lp<W: Write>(lp: &LinearProgram, mut w: W) -> Result<(), FormatError> {
    writeln!(w, "\\ effective-energy timetable model")?;
    writeln!(w, "\\ objective-offset: {}", lp.objective_offset)?;
    writeln!(w, "Minimize")?;
    {
        let mut line = String::from(" obj:");
        let terms: Vec<(usize, f64)> = lp
            .objective
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0.0)
            .map(|(j, &c)| (j, c))
            .collect();
        if terms.is_empty() {
            line.push_str(" 0");
            writeln!(w, "{line}")?;
        } else {
            let mut body = String::new();
            write_terms(&mut body, &terms, &lp.vars.names);
            // Wrap long objectives; continuation lines stay indented.
            let mut col = line.len();
            write!(w, "{line}")?;
            for piece in body.split(' ') {
                if col + piece.len() + 1 > 200 {
                    writeln!(w)?;
                    write!(w, "   {piece}")?;
                    col = 3 + piece.len();
                } else {
                    write!(w, " {piece}")?;
                    col += piece.len() + 1;
                }
            }
            writeln!(w)?;
        }
    }
    writeln!(w, "Subject To")?;
    let mut family_counters = std::collections::BTreeMap::new();
    for row in &lp.rows {
        let counter = family_counters.entry(row.family).or_insert(0usize);
        let name = format!("{}_{}", family_prefix(row.family), counter);
        *counter += 1;
        let mut body = String::new();
        write_terms(&mut body, &row.terms, &lp.vars.names);
        match row.bound {
            RowBound::Le(ub) => writeln!(w, " {name}: {body} <= {ub}")?,
            RowBound::Ge(lb) => writeln!(w, " {name}: {body} >= {lb}")?,
            RowBound::Range(lb, ub) => {
                writeln!(w, " {name}_lo: {body} >= {lb}")?;
                writeln!(w, " {name}_up: {body} <= {ub}")?;
            }
        }
    }
    writeln!(w, "Bounds")?;
    for (j, &(lb, ub)) in lp.var_bounds.iter().enumerate() {
        let name = &lp.vars.names[j];
        if lb.is_infinite() && ub.is_infinite() {
            writeln!(w, " {name} free")?;
        } else if ub.is_infinite() {
            writeln!(w, " {name} >= {lb}")?;
        } else if lb.is_infinite() {
            writeln!(w, " {name} <= {ub}")?;
        } else {
            writeln!(w, " {lb} <= {name} <= {ub}")?;
        }
    }
    writeln!(w, "End")?;
    Ok(())
}

fn parse_family(name: &str) -> Option<ConstraintFamily> {
    for family in [
        ConstraintFamily::HypoRight,
        ConstraintFamily::HypoLeft,
        ConstraintFamily::Track,
        ConstraintFamily::Cross,
        ConstraintFamily::Dwell,
        ConstraintFamily::Connect,
        ConstraintFamily::Headway,
        ConstraintFamily::Travel,
        ConstraintFamily::Domain,
    ] {
        if name.starts_with(family.tag()) {
            return Some(family);
        }
    }
    None
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Objective,
    Rows,
    Bounds,
    Done,
}

/// Parses the dialect produced by [`write_lp`]. Two-sided rows come back as
/// the two facet rows the writer emitted. Supplying the event sets the model
/// was built from re-associates event columns for warm starts; without them
/// only the named time columns are recoverable.
pub fn read_lp(text: &str, events: Option<&SyncEvents>) -> Result<LinearProgram, FormatError> {
    let mut offset = 0.0f64;
    let mut names: Vec<String> = Vec::new();
    let mut name_index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut objective_terms: Vec<(usize, f64)> = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    let mut bounds: Vec<(usize, f64, f64)> = Vec::new();
    let mut section = Section::Preamble;
    let mut obj_tokens: Vec<String> = Vec::new();

    let intern = |names: &mut Vec<String>,
                      name_index: &mut std::collections::HashMap<String, usize>,
                      token: &str| {
        if let Some(&idx) = name_index.get(token) {
            idx
        } else {
            let idx = names.len();
            names.push(token.to_string());
            name_index.insert(token.to_string(), idx);
            idx
        }
    };

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('\\') {
            if let Some(v) = rest.trim().strip_prefix("objective-offset:") {
                offset = v.trim().parse().map_err(|_| FormatError::Parse {
                    line: lineno + 1,
                    msg: "bad objective-offset".into(),
                })?;
            }
            continue;
        }
        match line {
            "Minimize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Rows;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                obj_tokens.extend(line.split_whitespace().map(str::to_string));
            }
            Section::Rows => {
                let (name, body) = line.split_once(':').ok_or_else(|| FormatError::Parse {
                    line: lineno + 1,
                    msg: "row without name".into(),
                })?;
                let family =
                    parse_family(name.trim()).ok_or_else(|| FormatError::Parse {
                        line: lineno + 1,
                        msg: format!("unknown row family in {name:?}"),
                    })?;
                let tokens: Vec<&str> = body.split_whitespace().collect();
                let sense_pos = tokens
                    .iter()
                    .position(|t| *t == "<=" || *t == ">=")
                    .ok_or_else(|| FormatError::Parse {
                        line: lineno + 1,
                        msg: "row without sense".into(),
                    })?;
                let rhs: f64 =
                    tokens[sense_pos + 1]
                        .parse()
                        .map_err(|_| FormatError::Parse {
                            line: lineno + 1,
                            msg: "bad rhs".into(),
                        })?;
                let terms = parse_terms(&tokens[..sense_pos], |t| {
                    intern(&mut names, &mut name_index, t)
                })
                .map_err(|msg| FormatError::Parse {
                    line: lineno + 1,
                    msg,
                })?;
                let bound = if tokens[sense_pos] == "<=" {
                    RowBound::Le(rhs)
                } else {
                    RowBound::Ge(rhs)
                };
                rows.push(Row {
                    family,
                    terms,
                    bound,
                });
            }
            Section::Bounds => {
                let tokens: Vec<&str> = line.split_whitespace().collect();
                match tokens.as_slice() {
                    [name, "free"] => {
                        let idx = intern(&mut names, &mut name_index, name);
                        bounds.push((idx, f64::NEG_INFINITY, f64::INFINITY));
                    }
                    [lb, "<=", name, "<=", ub] => {
                        let idx = intern(&mut names, &mut name_index, name);
                        let lb: f64 = lb.parse().map_err(|_| FormatError::Parse {
                            line: lineno + 1,
                            msg: "bad bound".into(),
                        })?;
                        let ub: f64 = ub.parse().map_err(|_| FormatError::Parse {
                            line: lineno + 1,
                            msg: "bad bound".into(),
                        })?;
                        bounds.push((idx, lb, ub));
                    }
                    [name, ">=", lb] => {
                        let idx = intern(&mut names, &mut name_index, name);
                        let lb: f64 = lb.parse().map_err(|_| FormatError::Parse {
                            line: lineno + 1,
                            msg: "bad bound".into(),
                        })?;
                        bounds.push((idx, lb, f64::INFINITY));
                    }
                    [name, "<=", ub] => {
                        let idx = intern(&mut names, &mut name_index, name);
                        let ub: f64 = ub.parse().map_err(|_| FormatError::Parse {
                            line: lineno + 1,
                            msg: "bad bound".into(),
                        })?;
                        bounds.push((idx, f64::NEG_INFINITY, ub));
                    }
                    _ => {
                        return Err(FormatError::Parse {
                            line: lineno + 1,
                            msg: "unrecognized bounds line".into(),
                        })
                    }
                }
            }
            Section::Preamble | Section::Done => {}
        }
    }

    // Objective tokens: "obj:" then signed terms.
    let obj_body: Vec<&str> = obj_tokens
        .iter()
        .map(String::as_str)
        .skip_while(|t| *t != "obj:")
        .skip(1)
        .collect();
    if !(obj_body.len() == 1 && obj_body[0] == "0") {
        objective_terms = parse_terms(&obj_body, |t| intern(&mut names, &mut name_index, t))
            .map_err(|msg| FormatError::Parse { line: 0, msg })?;
    }

    let n = names.len();
    let mut objective = vec![0.0; n];
    for (j, c) in objective_terms {
        objective[j] += c;
    }
    let mut var_bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); n];
    for (j, lb, ub) in bounds {
        var_bounds[j] = (lb, ub);
    }
    Ok(LinearProgram {
        objective,
        objective_offset: offset,
        rows,
        var_bounds,
        vars: VarTable::from_names(names, events),
    })
}

/// Parses `[-] coeff name [+/- coeff name ...]`; a missing coefficient
/// defaults to one.
fn parse_terms(
    tokens: &[&str],
    mut intern: impl FnMut(&str) -> usize,
) -> Result<Vec<(usize, f64)>, String> {
    let mut terms = Vec::new();
    let mut sign = 1.0f64;
    let mut pending: Option<f64> = None;
    for &token in tokens {
        match token {
            "+" => sign = 1.0,
            "-" => sign = -sign,
            _ => {
                if let Ok(v) = token.parse::<f64>() {
                    if pending.is_some() {
                        return Err(format!("two coefficients in a row near {token:?}"));
                    }
                    pending = Some(v);
                } else {
                    let coeff = sign * pending.take().unwrap_or(1.0);
                    terms.push((intern(token), coeff));
                    sign = 1.0;
                }
            }
        }
    }
    if pending.is_some() {
        return Err("dangling coefficient".into());
    }
    Ok(terms)
}
