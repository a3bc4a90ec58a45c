//! Aggregates a sweep CSV per (variant, alpha): connected-optimum counts
//! and average solution time over the solved rows, with capped or
//! infeasible rows reported separately.

use std::collections::BTreeMap;
use std::io::Read;

use crate::experiment::CSV_HEADER;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub variant: String,
    pub alpha: f64,
    pub runs: usize,
    pub optimal: usize,
    pub connected: usize,
    pub contingency_connected: usize,
    /// Rows excluded from the time average (not Optimal).
    pub excluded: usize,
    pub mean_seconds: f64,
    pub median_seconds: f64,
}

/// Parses a sweep CSV (comment lines start with `#`) into per-group rows,
/// ordered by (variant, alpha).
pub fn summarize(reader: impl Read) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    {
        let headers = csv.headers().map_err(|e| HarnessError::Csv(e.to_string()))?;
        let got: Vec<&str> = headers.iter().collect();
        if !got.is_empty() && got != CSV_HEADER {
            return Err(HarnessError::Csv(format!("unexpected header {got:?}")));
        }
    }

    #[derive(Default)]
    struct Group {
        runs: usize,
        optimal: usize,
        connected: usize,
        contingency_connected: usize,
        times: Vec<f64>,
    }
    let mut groups: BTreeMap<(String, String), Group> = BTreeMap::new();
    for record in csv.records() {
        let record = record.map_err(|e| HarnessError::Csv(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let key = (field(1), field(2));
        let group = groups.entry(key).or_default();
        group.runs += 1;
        if field(4) == "Optimal" {
            group.optimal += 1;
            let seconds: f64 = field(8)
                .parse()
                .map_err(|_| HarnessError::Csv(format!("bad wall_seconds `{}`", field(8))))?;
            group.times.push(seconds);
        }
        if field(6) == "true" {
            group.connected += 1;
        }
        if field(7) == "true" {
            group.contingency_connected += 1;
        }
    }

    let mut rows = Vec::new();
    for ((variant, alpha), group) in groups {
        let alpha: f64 = alpha
            .parse()
            .map_err(|_| HarnessError::Csv(format!("bad alpha `{alpha}`")))?;
        let mut times = group.times;
        times.sort_by(f64::total_cmp);
        let mean = if times.is_empty() { 0.0 } else { times.iter().sum::<f64>() / times.len() as f64 };
        let median = if times.is_empty() {
            0.0
        } else if times.len() % 2 == 1 {
            times[times.len() / 2]
        } else {
            (times[times.len() / 2 - 1] + times[times.len() / 2]) / 2.0
        };
        rows.push(SummaryRow {
            variant,
            alpha,
            runs: group.runs,
            optimal: group.optimal,
            connected: group.connected,
            contingency_connected: group.contingency_connected,
            excluded: group.runs - group.optimal,
            mean_seconds: mean,
            median_seconds: median,
        });
    }
    Ok(rows)
}

/// Renders the summary as an aligned text table.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8} {:>6} {:>6} {:>8} {:>10} {:>12} {:>9} {:>12} {:>12}\n",
        "variant", "alpha", "runs", "optimal", "connected", "conn_all_k", "excluded", "mean_s", "median_s"
    ));
    for row in rows {
        out.push_str(&format!(
            "{:<8} {:>6} {:>6} {:>8} {:>10} {:>12} {:>9} {:>12.6} {:>12.6}\n",
            row.variant,
            row.alpha,
            row.runs,
            row.optimal,
            row.connected,
            row.contingency_connected,
            row.excluded,
            row.mean_seconds,
            row.median_seconds,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "case,variant,alpha,sample,status,objective,connected,contingency_connected,wall_seconds,bb_nodes,lp_iterations\n";

    #[test]
    fn empty_csv_gives_empty_summary() {
        let rows = summarize("".as_bytes()).unwrap();
        assert!(rows.is_empty());
        let rows = summarize(HEADER.as_bytes()).unwrap();
        assert!(rows.is_empty());
    }

    #[test]
    fn groups_and_excludes_non_optimal() {
        let body = "\
# ots-run case=x seed=1 prng=chacha8
case,variant,alpha,sample,status,objective,connected,contingency_connected,wall_seconds,bb_nodes,lp_iterations
x,M3,0.3,0,Optimal,145,true,,0.100000,3,50
x,M3,0.3,1,Optimal,145,true,,0.300000,3,50
x,M3,0.3,2,CapHit,150,false,,9.000000,99,999
x,M1,0.3,0,Infeasible,,,,0.010000,1,5
";
        let rows = summarize(body.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        let m1 = &rows[0];
        assert_eq!(m1.variant, "M1");
        assert_eq!(m1.runs, 1);
        assert_eq!(m1.optimal, 0);
        assert_eq!(m1.excluded, 1);
        assert_eq!(m1.mean_seconds, 0.0);
        let m3 = &rows[1];
        assert_eq!(m3.runs, 3);
        assert_eq!(m3.optimal, 2);
        assert_eq!(m3.connected, 2);
        assert_eq!(m3.excluded, 1);
        assert!((m3.mean_seconds - 0.2).abs() < 1e-12);
        assert!((m3.median_seconds - 0.2).abs() < 1e-12);
    }

    #[test]
    fn bad_header_rejected() {
        let body = "a,b,c\n1,2,3\n";
        assert!(matches!(summarize(body.as_bytes()), Err(HarnessError::Csv(_))));
    }

    #[test]
    fn table_formatting_is_stable() {
        let rows = vec![SummaryRow {
            variant: "M4".into(),
            alpha: 0.5,
            runs: 10,
            optimal: 10,
            connected: 10,
            contingency_connected: 0,
            excluded: 0,
            mean_seconds: 0.025,
            median_seconds: 0.02,
        }];
        let text = format_summary(&rows);
        assert!(text.contains("M4"));
        assert_eq!(format_summary(&rows), text);
    }
}
