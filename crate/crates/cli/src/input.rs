//! Cash-flow and discount-table files.
//!
//! CSV: one `time,amount` (or `time,factor`) pair per line, optional header,
//! `#` comments. JSON: `{"name": ..., "events": [{"t": ..., "c": ...}]}`.
//! Numbers are exact rational literals (`-100`, `0.1`, `1/3`).

use std::fs;
use std::path::{Path, PathBuf};

use payback_core::{parse_rational, DiscountFunction, Project, Rational};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectFile {
    pub name: String,
    pub events: Vec<(Rational, Rational)>,
}

impl ProjectFile {
    pub fn project(&self) -> Result<Project, CliError> {
        Ok(Project::new(self.events.iter().cloned())?)
    }
}

#[derive(Deserialize)]
struct JsonFile {
    name: Option<String>,
    events: Vec<JsonEvent>,
}

#[derive(Deserialize)]
struct JsonEvent {
    t: Literal,
    c: Literal,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Literal {
    Text(String),
    Number(serde_json::Number),
}

impl Literal {
    fn parse(&self) -> payback_core::Result<Rational> {
        match self {
            Literal::Text(s) => parse_rational(s),
            Literal::Number(n) => parse_rational(&n.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "project".into())
}

fn looks_like_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{')
}

pub fn parse_events(path: &Path) -> Result<ProjectFile, CliError> {
    let text = read(path)?;
    parse_events_str(&text, path)
}

pub fn parse_events_str(text: &str, path: &Path) -> Result<ProjectFile, CliError> {
    let events = if looks_like_json(path, text) {
        let file: JsonFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })?;
        let mut events = Vec::with_capacity(file.events.len());
        for (i, e) in file.events.iter().enumerate() {
            let pair = e.t.parse().and_then(|t| Ok((t, e.c.parse()?)));
            let pair = pair.map_err(|err| CliError::Format {
                path: path.to_path_buf(),
                message: format!("event {i}: {err}"),
            })?;
            events.push(pair);
        }
        let name = file.name.unwrap_or_else(|| stem(path));
        return check_times(ProjectFile { name, events }, path);
    } else {
        parse_pairs(text, path)?
    };
    check_times(ProjectFile { name: stem(path), events }, path)
}

fn check_times(file: ProjectFile, path: &Path) -> Result<ProjectFile, CliError> {
    if let Some((t, _)) = file.events.iter().find(|(t, _)| t < &Rational::default()) {
        return Err(CliError::Format { path: path.to_path_buf(), message: format!("negative time {t}") });
    }
    Ok(file)
}

/// Two-column rational CSV; a first line that does not parse is a header.
fn parse_pairs(text: &str, path: &Path) -> Result<Vec<(Rational, Rational)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| CliError::Parse { path: path.to_path_buf(), line, message };
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", record.len())));
        }
        let parsed = (parse_rational(&record[0]), parse_rational(&record[1]));
        let is_first = std::mem::replace(&mut first, false);
        match parsed {
            (Ok(a), Ok(b)) => out.push((a, b)),
            (Err(_), Err(_)) if is_first => continue,
            (Err(e), _) | (_, Err(e)) => return Err(bad(e.to_string())),
        }
    }
    Ok(out)
}

pub fn parse_discount_table(path: &Path) -> Result<DiscountFunction, CliError> {
    let text = read(path)?;
    let pairs = parse_pairs(&text, path)?;
    DiscountFunction::table(pairs).map_err(|e| match e {
        payback_core::Error::NegativeTime(_) | payback_core::Error::InvalidDiscount(_) => CliError::Format {
            path: PathBuf::from(path),
            message: e.to_string(),
        },
        other => other.into(),
    })
}
