//! `--config FILE` support: `key=value` lines become flags inserted right after
//! the subcommand, unless the same flag is already on the command line.

use std::ffi::OsString;
use std::fs;

use crate::args::SUBCOMMANDS;

/// Parses `key=value` lines. Blank lines and `#` comments are skipped; keys
/// may be written `nmax`, `--nmax` or `min_weight`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value, got `{line}`", i + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Result<Option<(usize, String)>, String> {
    for (i, a) in args.iter().enumerate() {
        let a = a.to_string_lossy();
        if a == "--config" {
            let path = args.get(i + 1).ok_or("--config requires a file")?;
            return Ok(Some((i, path.to_string_lossy().into_owned())));
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some((i, p.to_string())));
        }
    }
    Ok(None)
}

fn has_flag(args: &[OsString], key: &str) -> bool {
    let long = format!("--{key}");
    let eq = format!("--{key}=");
    args.iter().any(|a| {
        let a = a.to_string_lossy();
        a == long || a.starts_with(&eq)
    })
}

/// Splices the config file's entries into `args`.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some((_, path)) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("config file {path}: {e}"))?;
    let entries = parse_config(&text).map_err(|e| format!("{path}: {e}"))?;
    let Some(sub) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if has_flag(&args, &key) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(format!("--{key}").into()),
            "false" => {}
            _ => extra.push(format!("--{key}={value}").into()),
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_lines() {
        let c = parse_config("# defaults\nnmax = 4\n\n--no_prune=true\nmin_weight=1.5\n").unwrap();
        assert_eq!(
            c,
            [
                ("nmax".to_string(), "4".to_string()),
                ("no-prune".into(), "true".into()),
                ("min-weight".into(), "1.5".into())
            ]
        );
        assert!(parse_config("nmax 4").is_err());
    }

    #[test]
    fn command_line_wins() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        fs::write(&cfg, "nmax=4\nno-prune=true\nout=a.tsv\nseed=false\n").unwrap();
        let cfg = cfg.to_string_lossy().into_owned();
        let args = os(&["bugidf", "--config", &cfg, "extract", "--out", "b.tsv"]);
        let got = expand(args).unwrap();
        assert_eq!(
            got,
            os(&[
                "bugidf",
                "--config",
                &cfg,
                "extract",
                "--nmax=4",
                "--no-prune",
                "--out",
                "b.tsv"
            ])
        );
    }

    #[test]
    fn missing_file_is_error() {
        assert!(expand(os(&["bugidf", "--config=/nonexistent/x", "extract"])).is_err());
        assert_eq!(expand(os(&["bugidf", "extract"])).unwrap(), os(&["bugidf", "extract"]));
    }
}
