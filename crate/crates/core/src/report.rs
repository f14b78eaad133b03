//! The run report: serde types, a JSON writer with sorted keys and 17
//! significant digits, and a plain-text table.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::warped::EqualityReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub label: String,
    pub dim: usize,
    pub lambda: f64,
    pub cos_theta: f64,
    pub theta_deg: f64,
    /// Largest minus smallest λ over the samples.
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// (D^⊥, D^θ, D^T).
    pub dims: [usize; 3],
    pub blocks: Vec<BlockSummary>,
    pub order: usize,
    pub proper: bool,
    pub proper_order_one: bool,
    /// Letter (a)–(g) or `-`.
    pub special_case: String,
    pub special_case_name: String,
}

/// One row of the identity table. `residual` is `None` when the check does not
/// apply; such entries pass and carry a note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub id: String,
    pub check: String,
    pub residual: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub point: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub equality: Option<EqualityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub grid_per_axis: usize,
    pub grid_points: usize,
    pub random: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub manifest: String,
    pub seed: u64,
    pub tol_scale: f64,
    pub sampling: SampleInfo,
    pub classification: Option<Classification>,
    pub entries: Vec<IdentityEntry>,
    pub inequality: Vec<InequalityRow>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
    pub pass: bool,
    pub exit_code: i32,
    pub timings: Option<Timings>,
}

impl Report {
    pub fn entry(&self, id: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn to_json(&self) -> String {
        to_json(&serde_json::to_value(self).expect("report serializes"))
    }

    pub fn from_json(text: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The JSON text with the `timings` field cleared.
    pub fn to_json_without_timings(&self) -> String {
        Report { timings: None, ..self.clone() }.to_json()
    }
}

/// Floats with 17 significant digits, integers verbatim, keys sorted.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| x.is_number()) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, indent);
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &m[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

/// Human-readable summary.
pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}: {} ({} samples, seed {}, tol x{})", r.tool, r.command, r.manifest, r.sampling.total, r.seed, r.tol_scale);
    if let Some(c) = &r.classification {
        let _ = writeln!(
            s,
            "dims (D^perp, D^theta, D^T) = ({}, {}, {})  order {}  proper {}  case {} ({})",
            c.dims[0], c.dims[1], c.dims[2], c.order, c.proper, c.special_case, c.special_case_name
        );
        for b in &c.blocks {
            let _ = writeln!(
                s,
                "  {:<15} dim {}  lambda {:.9}  cos theta {:.9}  theta {:.6} deg",
                b.label, b.dim, b.lambda, b.cos_theta, b.theta_deg
            );
        }
    }
    if !r.entries.is_empty() {
        let width = r.entries.iter().map(|e| e.id.len()).max().unwrap_or(2).max(2);
        let _ = writeln!(s, "{:<width$}  {:<14}  {:>10}  {:>10}  result", "id", "check", "residual", "tolerance");
        for e in &r.entries {
            let res = e.residual.map(sci).unwrap_or_else(|| "n/a".into());
            let verdict = if e.pass { "pass" } else { "FAIL" };
            let _ = write!(s, "{:<width$}  {:<14}  {:>10}  {:>10}  {verdict}", e.id, e.check, res, sci(e.tolerance));
            if let Some(n) = &e.note {
                let _ = write!(s, "  ({n})");
            }
            s.push('\n');
        }
    }
    if !r.inequality.is_empty() {
        let _ = writeln!(s, "inequality over {} points:", r.inequality.len());
        let worst = r.inequality.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("non-empty");
        let _ = writeln!(s, "  worst margin {} at {:?} (lhs {}, rhs {})", sci(worst.margin), worst.point, sci(worst.lhs), sci(worst.rhs));
        let eq = r.inequality.iter().filter(|row| row.equality.is_some()).count();
        if eq > 0 {
            let _ = writeln!(s, "  equality case reached at {eq} points");
        }
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for e in &r.errors {
        let _ = writeln!(s, "error: {e}");
    }
    let _ = writeln!(s, "overall: {}", if r.pass { "PASS" } else { "FAIL" });
    s
}
