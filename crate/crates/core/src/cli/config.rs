//! Optional flat `key = value` configuration file.
//!
//! Keys mirror long flag names (`omega_min` and `omega-min` both work), `#`
//! starts a comment, and `true`/`false` toggle boolean flags. Entries are
//! turned into flags placed right after the subcommand, and dropped when the
//! same flag is given on the command line, so explicit flags always win.

use std::ffi::OsString;
use std::fs;

use crate::error::{domain, Result};

const SUBCOMMANDS: [&str; 5] = ["bounds", "bode", "sweep", "simulate", "verify"];
const VALUE_GLOBALS: [&str; 2] = ["--threads", "--config"];

/// Parses the file contents into `(flag, value)` pairs.
pub fn parse(text: &str) -> Result<Vec<(String, Option<String>)>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return domain(format!("config line {}: expected `key = value`", i + 1));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key == "config" {
            return domain(format!("config line {}: invalid key", i + 1));
        }
        let flag = format!("--{key}");
        match value {
            "true" => entries.push((flag, None)),
            "false" => {}
            v => entries.push((flag, Some(v.to_string()))),
        }
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if VALUE_GLOBALS.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&s.as_ref()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn given(args: &[OsString], flag: &str) -> bool {
    let eq = format!("{flag}=");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&eq)
    })
}

/// Expands `--config FILE` into explicit flags.
pub fn inject(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(at) = subcommand_index(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| {
        crate::Error::Domain(format!(
            "cannot read config {}: {e}",
            path.to_string_lossy()
        ))
    })?;
    let mut extra = Vec::new();
    for (flag, value) in parse(&text)? {
        if given(&args, &flag) {
            continue;
        }
        extra.push(OsString::from(flag));
        extra.extend(value.map(OsString::from));
    }
    let mut out = args;
    out.splice(at + 1..at + 1, extra);
    Ok(out)
}
