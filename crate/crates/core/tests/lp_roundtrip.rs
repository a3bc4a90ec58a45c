//! Re-imports exported LP text through a minimal test-only parser and
//! solves both sides: the file must carry the exact model. Stands in for
//! the optional external-solver round trip.

use ots_core::{
    assemble, solve, write_lp_string, AssembleOptions, BigMPolicy, Branch, Bus, ContingencySet,
    MilpModel, ModelVariant, Network, RowSense, SolveStatus, SolverOptions, SwitchConfig, VarKind,
};

fn demo_network() -> Network {
    let bus = |id: usize, p_d: f64, p_g_max: f64, c_g: f64| Bus {
        id,
        p_d,
        p_g_min: 0.0,
        p_g_max,
        c_g,
        theta_min: -1.0,
        theta_max: 1.0,
        r_up: 0.0,
        r_down: 0.0,
    };
    let branch = |id: usize, from: usize, to: usize, switchable: bool, c_b: f64| Branch {
        id,
        from,
        to,
        b: 100.0,
        p_b_max: 100.0,
        switchable,
        c_b,
    };
    Network::new(
        "roundtrip",
        vec![
            bus(1, 0.0, 200.0, 1.0),
            bus(2, 30.0, 0.0, 0.0),
            bus(3, 30.0, 0.0, 0.0),
            bus(4, 0.0, 200.0, 1.0),
            bus(5, 40.0, 0.0, 0.0),
            bus(6, 40.0, 0.0, 0.0),
        ],
        vec![
            branch(1, 1, 2, false, 0.0),
            branch(2, 2, 3, false, 0.0),
            branch(3, 1, 3, false, 0.0),
            branch(4, 4, 5, false, 0.0),
            branch(5, 5, 6, false, 0.0),
            branch(6, 4, 6, false, 0.0),
            branch(7, 1, 4, true, 5.0),
            branch(8, 2, 5, true, 5.0),
        ],
    )
    .unwrap()
}

/// Just enough LP-format parsing for files this crate writes.
fn parse_lp(text: &str) -> MilpModel {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Objective,
        Rows,
        Bounds,
        Binaries,
        Done,
    }
    struct PendingRow {
        tag: String,
        terms: Vec<(String, f64)>,
        sense: RowSense,
        rhs: f64,
    }

    fn parse_terms(body: &str) -> Vec<(String, f64)> {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        let mut terms = Vec::new();
        let mut sign = 1.0;
        let mut pending: Option<f64> = None;
        for token in tokens {
            match token {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                "0" if pending.is_none() => {}
                _ => {
                    if let Ok(value) = token.parse::<f64>() {
                        pending = Some(value);
                    } else {
                        let coefficient = sign * pending.take().unwrap_or(1.0);
                        terms.push((token.to_string(), coefficient));
                        sign = 1.0;
                    }
                }
            }
        }
        terms
    }

    let mut section = Section::Preamble;
    let mut objective: Vec<(String, f64)> = Vec::new();
    let mut rows: Vec<PendingRow> = Vec::new();
    let mut bounds: Vec<(String, f64, f64)> = Vec::new();
    let mut frees: Vec<String> = Vec::new();
    let mut binaries: Vec<String> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        match trimmed {
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
            "Binaries" => {
                section = Section::Binaries;
                continue;
            }
            "End" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        if trimmed.is_empty() {
            continue;
        }
        match section {
            Section::Objective => {
                let body = trimmed.split_once(':').map(|(_, b)| b).unwrap_or(trimmed);
                objective.extend(parse_terms(body));
            }
            Section::Rows => {
                let (tag, body) = trimmed.split_once(':').expect("tagged row");
                let (sense, symbol) = if body.contains("<=") {
                    (RowSense::Le, "<=")
                } else if body.contains(">=") {
                    (RowSense::Ge, ">=")
                } else {
                    (RowSense::Eq, "=")
                };
                let (lhs, rhs) = body.rsplit_once(symbol).expect("sense present");
                rows.push(PendingRow {
                    tag: tag.trim().to_string(),
                    terms: parse_terms(lhs),
                    sense,
                    rhs: rhs.trim().parse().expect("numeric rhs"),
                });
            }
            Section::Bounds => {
                let tokens: Vec<&str> = trimmed.split_whitespace().collect();
                match tokens.as_slice() {
                    [name, "free"] => frees.push(name.to_string()),
                    [name, "=", value] => {
                        let v: f64 = value.parse().unwrap();
                        bounds.push((name.to_string(), v, v));
                    }
                    [name, ">=", lo] => {
                        bounds.push((name.to_string(), lo.parse().unwrap(), f64::INFINITY));
                    }
                    [name, "<=", hi] => {
                        bounds.push((name.to_string(), f64::NEG_INFINITY, hi.parse().unwrap()));
                    }
                    [lo, "<=", name, "<=", hi] => {
                        bounds.push((name.to_string(), lo.parse().unwrap(), hi.parse().unwrap()));
                    }
                    other => panic!("unexpected bounds line {other:?}"),
                }
            }
            Section::Binaries => {
                binaries.extend(trimmed.split_whitespace().map(|s| s.to_string()));
            }
            Section::Preamble | Section::Done => {}
        }
    }

    let mut model = MilpModel::new("reimported");
    for (name, lo, hi) in &bounds {
        let kind = if binaries.contains(name) { VarKind::Binary } else { VarKind::Continuous };
        model.add_var(name.clone(), kind, *lo, *hi).unwrap();
    }
    for name in &frees {
        let kind = if binaries.contains(name) { VarKind::Binary } else { VarKind::Continuous };
        model.add_var(name.clone(), kind, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    }
    for (name, coefficient) in objective {
        let id = model.require_var(&name).unwrap();
        model.add_objective_term(id, coefficient);
    }
    for row in rows {
        let terms: Vec<(usize, f64)> = row
            .terms
            .iter()
            .map(|(name, c)| (model.require_var(name).unwrap(), *c))
            .collect();
        model.add_row(row.tag, terms, row.sense, row.rhs).unwrap();
    }
    model
}

#[test]
fn exported_model_reimports_to_the_same_optimum() {
    let network = demo_network();
    let config = SwitchConfig::from_flags(&network);
    let policy = BigMPolicy::derive(&network);
    let model = assemble(
        ModelVariant::M3,
        &network,
        &config,
        &ContingencySet::default(),
        &policy,
        &AssembleOptions::default(),
    )
    .unwrap();

    let text = write_lp_string(&model);
    let reimported = parse_lp(&text);
    assert_eq!(reimported.var_count(), model.var_count());
    assert_eq!(reimported.row_count(), model.row_count());

    let opts = SolverOptions::default();
    let original = solve(&model, &opts).unwrap();
    let replayed = solve(&reimported, &opts).unwrap();
    assert_eq!(original.status, SolveStatus::Optimal);
    assert_eq!(replayed.status, SolveStatus::Optimal);
    assert!(
        (original.objective - replayed.objective).abs() < 1e-6,
        "{} vs {}",
        original.objective,
        replayed.objective
    );
}
