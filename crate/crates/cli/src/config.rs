//! Flat `key=value` config files spliced into the argument list.

use std::fs;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("--config: cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("--config: line {line}: expected key=value, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("--config: missing file path")]
    MissingPath,
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                pairs.push((k.trim().to_owned(), v.trim().to_owned()));
            }
            _ => {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    text: raw.to_owned(),
                })
            }
        }
    }
    Ok(pairs)
}

fn as_flags(pairs: Vec<(String, String)>) -> Vec<String> {
    let mut flags = Vec::new();
    for (key, value) in pairs {
        let flag = format!("--{}", key.replace('_', "-"));
        match value.as_str() {
            "true" => flags.push(flag),
            "false" => {}
            _ => flags.push(format!("{flag}={value}")),
        }
    }
    flags
}

/// Removes `--config PATH` from `argv` and inserts the file's settings right
/// after the subcommand, so explicit flags later on the line take precedence.
pub fn splice(argv: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            path = Some(iter.next().ok_or(ConfigError::MissingPath)?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            path = Some(p.to_owned());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(Path::new(&path)).map_err(|source| ConfigError::Read {
        path: path.clone(),
        source,
    })?;
    let flags = as_flags(parse(&text)?);
    // argv[0] is the program, argv[1] the subcommand when present
    let at = rest.len().min(2);
    rest.splice(at..at, flags);
    Ok(rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks() {
        let pairs = parse("# header\n\ngrid = 512  # fine\nmax_n=3\n").unwrap();
        assert_eq!(
            pairs,
            vec![("grid".into(), "512".into()), ("max_n".into(), "3".into())]
        );
    }

    #[test]
    fn rejects_bare_words() {
        assert!(matches!(
            parse("grid\n"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(parse("=3\n"), Err(ConfigError::Syntax { .. })));
    }

    #[test]
    fn booleans_become_switches() {
        let flags = as_flags(vec![
            ("vectors".into(), "true".into()),
            ("quiet".into(), "false".into()),
            ("max_n".into(), "4".into()),
        ]);
        assert_eq!(flags, vec!["--vectors", "--max-n=4"]);
    }

    #[test]
    fn splice_places_file_before_explicit_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "max_n = 4\n").unwrap();
        let argv = [
            "moebius",
            "spectrum-free",
            "--config",
            path.to_str().unwrap(),
            "--max-n",
            "2",
        ]
        .map(String::from)
        .to_vec();
        let out = splice(argv).unwrap();
        assert_eq!(
            out,
            vec!["moebius", "spectrum-free", "--max-n=4", "--max-n", "2"]
        );
    }
}
