//! Table and JSON rendering helpers.

use causal_control::{format_rational, Distribution, Prob};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

pub fn decimal(p: &Prob) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// `x` rounded to 12 significant digits, as a JSON number.
pub fn float12(x: f64) -> Value {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    json!(if rounded == 0.0 { 0.0 } else { rounded })
}

pub fn bits(x: f64) -> String {
    // Avoid printing `-0.0000` for values that round to zero.
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// `{value: "p/q"}` for every value in the support.
pub fn distribution_json(d: &Distribution) -> Value {
    let map: Map<String, Value> = d
        .iter()
        .map(|(v, m)| (v.to_string(), Value::String(format_rational(m))))
        .collect();
    Value::Object(map)
}

/// Rows of `value  mass  decimal`.
pub fn distribution_rows(d: &Distribution) -> Vec<Vec<String>> {
    d.iter()
        .map(|(v, m)| vec![v.to_string(), format_rational(m), format!("{:.6}", decimal(m))])
        .collect()
}

/// Left-aligned columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

/// The JSON envelope shared by every command.
pub fn envelope(command: Value, results: Value, diagnostics: Vec<Value>) -> String {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "results": results,
        "diagnostics": diagnostics,
    });
    serde_json::to_string_pretty(&doc).expect("values serialise") + "\n"
}
