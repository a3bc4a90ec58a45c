//! LP text export: Minimize / Subject To / Bounds / Binaries / End, one
//! tagged constraint per line, coefficients at full 17-significant-digit
//! precision, byte-deterministic for a given model.

use std::fmt::Write as _;
use std::path::Path;

use crate::model::{MilpModel, VarKind};

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], model: &MilpModel) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    for (i, &(id, coef)) in terms.iter().enumerate() {
        let name = &model.vars()[id].name;
        if i == 0 {
            if coef < 0.0 {
                let _ = write!(out, "- {} {}", num(-coef), name);
            } else {
                let _ = write!(out, "{} {}", num(coef), name);
            }
        } else if coef < 0.0 {
            let _ = write!(out, " - {} {}", num(-coef), name);
        } else {
            let _ = write!(out, " + {} {}", num(coef), name);
        }
    }
}

/// Renders the model as LP text.
pub fn write_lp_string(model: &MilpModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj: ");
    let mut objective = model.objective.clone();
    objective.sort_by_key(|&(id, _)| id);
    push_terms(&mut out, &objective, model);
    if model.objective_constant != 0.0 {
        if model.objective_constant < 0.0 {
            let _ = write!(out, " - {}", num(-model.objective_constant));
        } else {
            let _ = write!(out, " + {}", num(model.objective_constant));
        }
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for row in model.rows() {
        let _ = write!(out, " {}: ", row.tag);
        push_terms(&mut out, &row.terms, model);
        let _ = writeln!(out, " {} {}", row.sense.symbol(), num(row.rhs));
    }

    out.push_str("Bounds\n");
    for v in model.vars() {
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " {} free", v.name);
            }
            (true, true) if v.lower == v.upper => {
                let _ = writeln!(out, " {} = {}", v.name, num(v.lower));
            }
            (true, true) => {
                let _ = writeln!(out, " {} <= {} <= {}", num(v.lower), v.name, num(v.upper));
            }
            (true, false) => {
                let _ = writeln!(out, " {} >= {}", v.name, num(v.lower));
            }
            (false, true) => {
                let _ = writeln!(out, " {} <= {}", v.name, num(v.upper));
            }
        }
    }

    out.push_str("Binaries\n");
    let mut line = String::new();
    for v in model.vars().iter().filter(|v| v.kind == VarKind::Binary) {
        if line.len() + v.name.len() + 1 > 78 {
            let _ = writeln!(out, " {}", line);
            line.clear();
        }
        if !line.is_empty() {
            line.push(' ');
        }
        line.push_str(&v.name);
    }
    if !line.is_empty() {
        let _ = writeln!(out, " {}", line);
    }
    out.push_str("End\n");
    out
}

/// Writes the LP text to `path`.
pub fn export_lp(model: &MilpModel, path: impl AsRef<Path>) -> std::io::Result<()> {
    std::fs::write(path, write_lp_string(model))
}
