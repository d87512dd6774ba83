//! Key-value config files: one `key = value` per line, `#` starts a comment.
//! Keys are flag names (`n-min`, `n_min` and `nMin` are all accepted); the
//! pairs are spliced in right after the subcommand, so explicit flags win.

use std::fs;
use std::path::Path;

pub fn flag_name(key: &str) -> String {
    let mut out = String::new();
    for ch in key.trim().chars() {
        match ch {
            '_' => out.push('-'),
            c if c.is_ascii_uppercase() => {
                out.push('-');
                out.push(c.to_ascii_lowercase());
            }
            c => out.push(c),
        }
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .or_else(|| line.split_once(':'))
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let v = v.trim().trim_matches('"');
        if k.trim().is_empty() || v.is_empty() {
            return Err(format!("config line {}: empty key or value", i + 1));
        }
        pairs.push((flag_name(k), v.to_string()));
    }
    Ok(pairs)
}

/// `argv` with the pairs of any `--config FILE` inserted after the
/// subcommand.
pub fn expand_args(args: Vec<String>, subcommands: &[&str]) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|e| format!("cannot read config {}: {}", path, e))?;
    let pairs = parse(&text)?;
    let Some(pos) = args.iter().skip(1).position(|a| subcommands.contains(&a.as_str())) else {
        return Ok(args);
    };
    let mut out = args[..pos + 2].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{}", k));
        out.push(v);
    }
    out.extend_from_slice(&args[pos + 2..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_spellings() {
        assert_eq!(flag_name("nMin"), "n-min");
        assert_eq!(flag_name("precision_digits"), "precision-digits");
        assert_eq!(flag_name("alpha-gate"), "alpha-gate");
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse("# header\nc = 2.5\n\neps: 1 # trailing\ntarget = \"golden\"\n").unwrap();
        assert_eq!(
            p,
            vec![
                ("c".to_string(), "2.5".to_string()),
                ("eps".to_string(), "1".to_string()),
                ("target".to_string(), "golden".to_string()),
            ]
        );
        assert!(parse("nonsense").is_err());
    }
}
