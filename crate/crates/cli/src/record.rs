use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a command prints. Both the JSON and the human form are
/// rendered from this one value.
#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub schema: u32,
    pub command: String,
    pub inputs: Value,
    pub payload: Value,
    pub warnings: Vec<String>,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value, payload: Value, warnings: Vec<String>) -> Self {
        Self { schema: SCHEMA_VERSION, command: command.to_string(), inputs, payload, warnings }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("records serialize")
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("records serialize")
    }

    /// Indented `key: value` lines, numbers printed exactly as in the JSON.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        render(&self.to_value(), 0, &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".into()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(a.iter().map(|x| scalar(x).unwrap_or_default()).collect::<Vec<_>>().join(", "))
        }
        Value::Object(o) if o.is_empty() => Some("{}".into()),
        // serialized finite masses, {"finite": 1.0}
        Value::Object(o) if o.len() == 1 && o.contains_key("finite") => {
            scalar(&o["finite"]).map(|s| format!("{s} (finite)"))
        }
        _ => None,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        render(x, depth + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

/// CSV number format: 17 significant digits, `.` decimal point.
pub fn csv_num(v: f64) -> String {
    if v.is_infinite() && v > 0.0 {
        "inf".into()
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_preamble(command: &str, columns: &[&str]) -> String {
    format!("# schema={SCHEMA_VERSION}\n# command: {command}\n{}\n", columns.join(","))
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
pub fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

pub fn inputs<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
