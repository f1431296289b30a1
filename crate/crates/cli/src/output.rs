//! Rendering of an [`Outcome`] as CSV, JSON or SVG. Every format embeds the
//! tool version, the seed and the resolved configuration.

use serde_json::{json, Map, Value};

use crate::commands::Outcome;
use crate::config::{Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn preamble(cfg: &RunConfig) -> Vec<String> {
    vec![
        format!("hpsym {VERSION}"),
        format!("command: {}", cfg.command),
        format!("seed: {}", cfg.seed),
        format!("config: {}", cfg.echo()),
    ]
}

/// Integers and finite floats become numbers; anything else stays a string.
fn typed_cell(cell: &str) -> Value {
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::from(cell),
    }
}

fn envelope(cfg: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("hpsym"));
    m.insert("version".into(), json!(VERSION));
    m.insert("command".into(), json!(cfg.command.to_string()));
    m.insert("seed".into(), json!(cfg.seed));
    m.insert("config".into(), serde_json::to_value(cfg).expect("config serializes"));
    m
}

pub fn render(cfg: &RunConfig, out: &Outcome) -> String {
    match cfg.format {
        Format::Csv => {
            let mut lines = preamble(cfg);
            lines.extend(out.notes.iter().cloned());
            out.table.to_string_with(&lines)
        }
        Format::Json => {
            let mut m = envelope(cfg);
            if let Some(report) = &out.report {
                m.insert("report".into(), serde_json::to_value(report).expect("report serializes"));
            } else {
                m.insert("columns".into(), json!(out.table.header));
                let rows: Vec<Value> = out
                    .table
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|c| typed_cell(c)).collect()))
                    .collect();
                m.insert("rows".into(), Value::Array(rows));
                if !out.fits.is_empty() {
                    m.insert("fits".into(), serde_json::to_value(&out.fits).expect("fits serialize"));
                }
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("json serializes");
            s.push('\n');
            s
        }
        Format::Svg => {
            let mut s = String::new();
            for line in preamble(cfg).iter().chain(&out.notes) {
                s.push_str(&format!("<!-- {} -->\n", line.replace("--", "- -")));
            }
            s.push_str(out.plot.as_deref().unwrap_or_default());
            s
        }
    }
}
