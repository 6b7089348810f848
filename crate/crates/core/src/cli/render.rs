use serde_json::Value;

/// One `path: value` line per scalar leaf, in document order.
pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    walk(report, &mut String::new(), &mut out);
    out
}

fn walk(v: &Value, path: &mut String, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, child) in m {
                let len = path.len();
                if !path.is_empty() {
                    path.push('.');
                }
                path.push_str(k);
                walk(child, path, out);
                path.truncate(len);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_object() && !x.is_array()) {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                out.push_str(&format!("{path}: [{}]\n", parts.join(", ")));
                return;
            }
            for (i, child) in items.iter().enumerate() {
                let len = path.len();
                path.push_str(&format!("[{i}]"));
                walk(child, path, out);
                path.truncate(len);
            }
        }
        _ => out.push_str(&format!("{path}: {}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flattens_nested_values() {
        let v = serde_json::json!({"a": {"b": 1, "c": [1, 2]}, "d": [{"e": "x"}]});
        assert_eq!(render_text(&v), "a.b: 1\na.c: [1, 2]\nd[0].e: x\n");
    }
}
