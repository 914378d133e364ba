//! `--config` support: a JSON object whose keys are flag names.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use serde_json::Value;

use crate::error::{Error, Result};

const SUBCOMMANDS: [&str; 8] = [
    "encode",
    "decode",
    "fuse",
    "rd-gt",
    "losses",
    "metrics",
    "dataset",
    "subsample",
];
const GLOBAL_KEYS: [&str; 2] = ["threads", "seed"];

fn config_path(argv: &[OsString]) -> Option<PathBuf> {
    let mut found = None;
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
        }
    }
    found
}

fn value_token(key: &str, v: &Value) -> Result<Option<String>> {
    Ok(match v {
        Value::Null | Value::Bool(false) => None,
        Value::Bool(true) => Some(String::new()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Result<Vec<String>> = items
                .iter()
                .map(|i| match i {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err(Error::invalid(
                        "config",
                        format!("'{key}' holds a nested value"),
                    )),
                })
                .collect();
            Some(parts?.join(","))
        }
        Value::Object(_) => {
            return Err(Error::invalid(
                "config",
                format!("'{key}' holds a nested object"),
            ))
        }
    })
}

/// Rewrites `argv` so settings from the `--config` file appear before the
/// matching explicit flags. Since later occurrences of a flag override
/// earlier ones, explicit flags win.
pub fn inject_config(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)?;
    let json: Value =
        serde_json::from_str(&text).map_err(|e| Error::format("config JSON", e.to_string()))?;
    let Value::Object(map) = json else {
        return Err(Error::format("config JSON", "top level must be an object"));
    };

    let mut global = Vec::new();
    let mut local = Vec::new();
    for (key, v) in &map {
        let flag = key.replace('_', "-");
        if flag == "config" {
            continue;
        }
        let Some(token) = value_token(key, v)? else {
            continue;
        };
        let out = if GLOBAL_KEYS.contains(&flag.as_str()) {
            &mut global
        } else {
            &mut local
        };
        if token.is_empty() {
            out.push(OsString::from(format!("--{flag}")));
        } else {
            out.push(OsString::from(format!("--{flag}={token}")));
        }
    }

    let sub = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut out = Vec::with_capacity(argv.len() + global.len() + local.len());
    out.push(argv[0].clone());
    out.extend(global);
    match sub {
        Some(i) => {
            out.extend_from_slice(&argv[1..=i]);
            out.extend(local);
            out.extend_from_slice(&argv[i + 1..]);
        }
        None => out.extend_from_slice(&argv[1..]),
    }
    Ok(out)
}
