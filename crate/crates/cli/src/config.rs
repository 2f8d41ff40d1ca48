use crate::report::CliError;
use serde_json::Value;

/// Removes `--config FILE` from `argv` and inserts the file's flags right after
/// the subcommand, so that flags given on the command line win.
pub fn merge(argv: &[String]) -> Result<Vec<String>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            match iter.next() {
                Some(p) => path = Some(p.clone()),
                None => return Err(CliError::validation("--config needs a file argument")),
            }
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(arg.clone());
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::validation(format!("reading config {path}: {e}")))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("config {path} is not JSON: {e}")))?;
    let flags = flags_from(&doc).map_err(|e| CliError::validation(format!("config {path}: {e}")))?;
    // argv[0] is the program, argv[1] the subcommand
    let at = rest.len().min(2);
    let mut out: Vec<String> = rest[..at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&rest[at..]);
    Ok(out)
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn flags_from(doc: &Value) -> Result<Vec<String>, String> {
    let Value::Object(map) = doc else {
        return Err("top level must be an object of flag values".into());
    };
    let mut flags = Vec::new();
    for (key, value) in map {
        let flag = format!("--{key}");
        match value {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
                let parts = parts.ok_or_else(|| format!("{key}: list entries must be scalars"))?;
                flags.push(flag);
                flags.push(parts.join(","));
            }
            Value::Object(_) => return Err(format!("{key}: nested objects are not flags")),
            other => {
                flags.push(flag);
                flags.push(scalar(other).expect("scalar"));
            }
        }
    }
    Ok(flags)
}
