//! Ordered key/value reports, rendered as indented text or as JSON with the same fields.

use serde_json::{Map, Value};

#[derive(Clone, Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&Value::Object(self.fields.clone())).expect("report serializes")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            write_value(&mut out, 0, k, v);
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        _ => None,
    }
}

fn write_value(out: &mut String, indent: usize, key: &str, v: &Value) {
    let pad = "  ".repeat(indent);
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}  - {s}\n")),
                    None => {
                        // nested object or list: print its fields under a bare dash
                        out.push_str(&format!("{pad}  -\n"));
                        if let Value::Object(m) = item {
                            for (k, v) in m {
                                write_value(out, indent + 2, k, v);
                            }
                        } else {
                            write_value(out, indent + 2, "", item);
                        }
                    }
                }
            }
        }
        Value::Object(m) => {
            for (k, v) in m {
                write_value(out, indent + 1, k, v);
            }
        }
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_layout() {
        let mut r = Report::new();
        r.set("a", "x").set("n", 2).set("list", json!(["p", "q"])).set("obj", json!({"k": true}));
        assert_eq!(r.text(), "a: x\nn: 2\nlist:\n  - p\n  - q\nobj:\n  k: true\n");
    }

    #[test]
    fn json_keeps_order() {
        let mut r = Report::new();
        r.set("z", 1).set("a", 2);
        assert!(r.json().find("\"z\"").unwrap() < r.json().find("\"a\"").unwrap());
    }
}
