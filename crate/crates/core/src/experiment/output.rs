//! CSV and JSON renderings of a [`Report`].

use serde_json::{Map, Value as Json};

use super::{Cell, Report};

/// `%.12g`: 12 significant digits, trailing zeros dropped, scientific
/// notation outside [1e-5, 1e12).
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, v);
        trim_fraction(&fixed).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mant), exp.abs())
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Str(s) => s.clone(),
        Cell::Int(n) => n.to_string(),
        Cell::Float(v) => format_sig(*v),
        Cell::Bool(b) => b.to_string(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(c: &Cell) -> Json {
    match c {
        Cell::Str(s) => Json::String(s.clone()),
        Cell::Int(n) => Json::from(*n),
        // Same rounding as the CSV so the two formats carry identical values.
        Cell::Float(v) => format_sig(*v)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map_or(Json::Null, Json::Number),
        Cell::Bool(b) => Json::Bool(*b),
        Cell::Empty => Json::Null,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn to_csv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# cardylab {}\n", env!("CARGO_PKG_VERSION")));
    for (k, v) in &report.provenance {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str(&format!("# verdict: {}\n", report.verdict));
    for note in &report.notes {
        out.push_str(&format!("# note: {note}\n"));
    }
    out.push_str(&report.columns.join(","));
    out.push('\n');
    for row in &report.rows {
        let line: Vec<String> = row.iter().map(|c| csv_field(&cell_text(c))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(report: &Report) -> String {
    let provenance: Map<String, Json> = report
        .provenance
        .iter()
        .map(|(k, v)| (k.clone(), Json::String(v.clone())))
        .collect();
    let rows: Vec<Json> = report
        .rows
        .iter()
        .map(|row| {
            Json::Object(
                report
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, c)| (col.to_string(), cell_json(c)))
                    .collect(),
            )
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("tool".into(), Json::String(format!("cardylab {}", env!("CARGO_PKG_VERSION"))));
    doc.insert("provenance".into(), Json::Object(provenance));
    doc.insert("verdict".into(), Json::String(report.verdict.to_string()));
    doc.insert("notes".into(), Json::from(report.notes.clone()));
    doc.insert("columns".into(), Json::from(report.columns.clone()));
    doc.insert("rows".into(), Json::Array(rows));
    let mut s = serde_json::to_string_pretty(&Json::Object(doc)).expect("serializable");
    s.push('\n');
    s
}
