//! `--config` support: a JSON object whose keys are flag names is spliced into
//! the argument list ahead of the user's own flags, which therefore win.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use serde_json::Value;

const GLOBAL_KEYS: &[&str] = &["format", "out", "strict"];
const VALUED_GLOBALS: &[&str] = &["--config", "--format", "--out"];
const SUBCOMMANDS: &[&str] = &["beta", "couplings", "revival", "sweep", "ed"];

/// Finds `--config FILE` or `--config=FILE`.
fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return iter.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Position of the subcommand token, skipping values of global options.
fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if SUBCOMMANDS.contains(&s.as_ref()) {
            return Some(i);
        }
        if VALUED_GLOBALS.contains(&s.as_ref()) {
            i += 1;
        }
        i += 1;
    }
    None
}

fn tokens(key: &str, value: &Value) -> Result<Vec<OsString>, String> {
    let flag = format!("--{}", key.replace('_', "-"));
    match value {
        Value::Null | Value::Bool(false) => Ok(vec![]),
        Value::Bool(true) => Ok(vec![flag.into()]),
        Value::Number(n) => Ok(vec![flag.into(), n.to_string().into()]),
        Value::String(s) => Ok(vec![flag.into(), s.into()]),
        _ => Err(format!(
            "config key `{key}` must be a string, number or boolean"
        )),
    }
}

/// Returns `args` with the config file's flags inserted, or unchanged when no
/// config is given.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text =
        fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let json: Value =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let Value::Object(map) = json else {
        return Err(format!("{}: expected a JSON object", path.display()));
    };

    let mut global = Vec::new();
    let mut local = Vec::new();
    for (key, value) in &map {
        let key = key.replace('-', "_");
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        let t = tokens(&key, value)?;
        if GLOBAL_KEYS.contains(&key.as_str()) {
            global.extend(t);
        } else {
            local.extend(t);
        }
    }

    let mut out = Vec::with_capacity(args.len() + global.len() + local.len());
    out.push(args[0].clone());
    out.extend(global);
    match subcommand_index(&args) {
        Some(sub) => {
            out.extend_from_slice(&args[1..=sub]);
            out.extend(local);
            out.extend_from_slice(&args[sub + 1..]);
        }
        None => out.extend_from_slice(&args[1..]),
    }
    Ok(out)
}
