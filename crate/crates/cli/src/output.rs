use std::io::{self, Write};

use serde_json::{Number, Value};

pub enum Output {
    Json(Value),
    /// Header and rows.
    Csv(Vec<&'static str>, Vec<Vec<String>>),
    Human(String),
}

/// `x` rounded to 15 significant digits, as the shortest decimal that
/// round-trips that value.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Text form of a float for CSV and human output.
pub fn float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round15(x);
        if r != 0.0 && (r.abs() < 1e-5 || r.abs() >= 1e16) {
            format!("{r:e}")
        } else {
            r.to_string()
        }
    }
}

/// Rounds every float in a JSON tree; non-finite floats become `null`.
fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            *v = Number::from_f64(round15(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

impl Output {
    pub fn write(self, out: &mut dyn Write) -> io::Result<()> {
        match self {
            Output::Json(mut v) => {
                round_tree(&mut v);
                serde_json::to_writer_pretty(&mut *out, &v)?;
                writeln!(out)
            }
            Output::Csv(header, rows) => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&header)?;
                for r in rows {
                    w.write_record(&r)?;
                }
                w.flush()
            }
            Output::Human(text) => out.write_all(text.as_bytes()),
        }
    }
}
