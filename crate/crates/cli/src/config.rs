//! `key = value` configuration files.
//!
//! Keys are long flag names of the subcommand. Settings from the file are
//! placed ahead of the command-line flags, and since every flag may be given
//! more than once with the last occurrence winning, the command line
//! overrides the file.

use std::fs;

use crate::CliError;

/// Parse a configuration file into `--key=value` arguments.
pub fn parse(text: &str, origin: &str) -> Result<Vec<String>, CliError> {
    let mut args = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("{origin}:{}", i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}: expected `key = value`, got {line:?}", at())))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(CliError::Usage(format!("{}: malformed key {key:?}", at())));
        }
        if key == "config" {
            return Err(CliError::Usage(format!("{}: configuration files cannot include others", at())));
        }
        args.push(format!("--{key}={value}"));
    }
    Ok(args)
}

/// Splice the settings of any `--config FILE` into `argv`, right after the
/// subcommand. The last `--config` wins.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    let mut iter = argv.iter().skip(2);
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            path = iter.next().cloned();
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Usage(format!("cannot read configuration file {path:?}: {e}")))?;
    let settings = parse(&text, &path)?;
    let mut out = Vec::with_capacity(argv.len() + settings.len());
    out.extend(argv[..2].iter().cloned());
    out.extend(settings);
    out.extend(argv[2..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let text = "# planning\nprior = point:-6  # analysis\n\nk=1/10\n";
        assert_eq!(parse(text, "f").unwrap(), ["--prior=point:-6", "--k=1/10"]);
        assert!(parse("prior point:-6", "f").is_err());
        assert!(parse("config = other", "f").is_err());
        assert!(parse("pr ior = 1", "f").is_err());
    }

    #[test]
    fn no_config_is_identity() {
        let argv: Vec<String> = ["bfdesign", "presets"].map(String::from).to_vec();
        assert_eq!(expand(argv.clone()).unwrap(), argv);
    }
}
