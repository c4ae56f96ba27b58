//! `key=value` config files. Each entry becomes a long flag; entries for the
//! global flags go before the subcommand and the rest right after it, so
//! flags given on the command line always come later and win.

use anyhow::{bail, Context, Result};
use std::ffi::OsString;
use std::fs;
use std::path::Path;

const GLOBAL_KEYS: [&str; 2] = ["out", "threads"];

fn parse(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("{}:{}: expected key=value, got `{line}`", path.display(), i + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("{}:{}: invalid key `{}`", path.display(), i + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn to_flag(key: &str, value: &str) -> Option<OsString> {
    match value {
        "true" => Some(format!("--{key}").into()),
        "false" => None,
        "" => Some(format!("--{key}").into()),
        v => Some(format!("--{key}={v}").into()),
    }
}

/// Removes `--config FILE` from `args` and splices the file's entries in.
pub fn expand(args: Vec<OsString>, subcommands: &[String]) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(args.len());
    let mut file = None;
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        match a.to_str() {
            Some("--config") => file = Some(it.next().context("--config needs a file")?),
            Some(s) if s.starts_with("--config=") => file = Some(OsString::from(&s["--config=".len()..])),
            _ => rest.push(a),
        }
    }
    let Some(file) = file else {
        return Ok(rest);
    };
    let path = Path::new(&file);
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let entries = parse(&text, path)?;
    let (global, local): (Vec<_>, Vec<_>) = entries.iter().partition(|(k, _)| GLOBAL_KEYS.contains(&k.as_str()));
    let sub = rest
        .iter()
        .position(|a| a.to_str().is_some_and(|s| subcommands.iter().any(|c| c == s)))
        .unwrap_or(rest.len());
    let mut out: Vec<OsString> = rest[..1.min(rest.len())].to_vec();
    out.extend(global.iter().filter_map(|(k, v)| to_flag(k, v)));
    out.extend(rest[1.min(rest.len())..sub.min(rest.len())].iter().cloned());
    if sub < rest.len() {
        out.push(rest[sub].clone());
        out.extend(local.iter().filter_map(|(k, v)| to_flag(k, v)));
        out.extend(rest[sub + 1..].iter().cloned());
    } else {
        out.extend(local.iter().filter_map(|(k, v)| to_flag(k, v)));
    }
    Ok(out)
}
