use serde::Serialize;

use crate::sugra::ResidualReport;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonRow {
    pub equation: String,
    pub block: String,
    pub max: f64,
    pub mean: f64,
    pub worst_point: Vec<f64>,
    pub worst_component: String,
}

/// Machine-readable report. `millis` is only filled with `--timing`, so
/// that repeated runs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JsonReport {
    pub version: String,
    pub id: String,
    pub seed: u64,
    pub points: usize,
    pub tolerance: f64,
    pub rows: Vec<JsonRow>,
    pub verdict: String,
    pub millis: Option<u64>,
}

impl JsonReport {
    pub fn new(r: &ResidualReport, millis: Option<u64>) -> JsonReport {
        JsonReport {
            version: REPORT_VERSION.to_string(),
            id: r.id.clone(),
            seed: r.seed,
            points: r.points,
            tolerance: r.tolerance,
            rows: r
                .rows
                .iter()
                .map(|row| JsonRow {
                    equation: row.equation.clone(),
                    block: row.block.clone(),
                    max: row.max,
                    mean: row.mean,
                    worst_point: row.worst_point.clone(),
                    worst_component: row.worst_component.clone(),
                })
                .collect(),
            verdict: if r.pass() { "pass" } else { "fail" }.to_string(),
            millis,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn render_text(r: &JsonReport) -> String {
    let mut s = format!(
        "sugra {}  {}  seed {}  points {}  tolerance {:e}\n\n",
        r.version, r.id, r.seed, r.points, r.tolerance
    );
    s.push_str(&format!(
        "{:<11} {:<7} {:>11} {:>11}  {:<34} {}\n",
        "equation", "block", "max", "mean", "worst component", "status"
    ));
    for row in &r.rows {
        let status = if row.max < r.tolerance { "pass" } else { "FAIL" };
        s.push_str(&format!(
            "{:<11} {:<7} {:>11.3e} {:>11.3e}  {:<34} {}\n",
            row.equation, row.block, row.max, row.mean, row.worst_component, status
        ));
    }
    s.push_str(&format!("\nverdict: {}\n", r.verdict.to_uppercase()));
    if let Some(ms) = r.millis {
        s.push_str(&format!("time: {ms} ms\n"));
    }
    s
}
