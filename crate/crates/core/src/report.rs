//! Versioned structured-text reports.
//!
//! ```text
//! format = bcjump-report 1
//! invocation = bcjump cohomology --builtin iwasawa --kind dr
//! elapsed_ms = 3
//!
//! [dr]
//! b0 = 1
//! ```
//!
//! A header of `key = value` lines, then `[name]` sections of `key = value`
//! lines. Blank lines separate sections; `elapsed_ms` is optional. Emitting a
//! parsed report reproduces it byte for byte.

use std::fmt;

use thiserror::Error;

pub const FORMAT_LINE: &str = "bcjump-report 1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported report format `{0}`")]
    Format(String),
    #[error("missing section [{0}]")]
    MissingSection(String),
    #[error("missing key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: sanitize(&name.into()), entries: Vec::new() }
    }

    /// Appends an entry; newlines in either part become spaces.
    pub fn push(&mut self, key: impl AsRef<str>, value: impl fmt::Display) -> &mut Self {
        let mut key = sanitize(key.as_ref()).replace('=', "_");
        if key.starts_with('[') {
            key.replace_range(0..1, "_");
        }
        self.entries.push((key, sanitize(&value.to_string())));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ReportError> {
        self.get(key).ok_or_else(|| ReportError::MissingKey { section: self.name.clone(), key: key.to_string() })
    }
}

fn sanitize(s: &str) -> String {
    s.replace(['\n', '\r'], " ").trim().to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub invocation: String,
    pub elapsed_ms: Option<u64>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(invocation: impl Into<String>) -> Self {
        Self { invocation: sanitize(&invocation.into()), elapsed_ms: None, sections: Vec::new() }
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Section {
        self.sections.push(Section::new(name));
        self.sections.last_mut().unwrap()
    }

    pub fn get(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&Section, ReportError> {
        self.get(name).ok_or_else(|| ReportError::MissingSection(name.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        let mut report = Report::default();
        let mut seen_format = false;
        let mut current: Option<Section> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ReportError::Syntax { line: line_no, msg: "unterminated section header".into() })?;
                if let Some(s) = current.take() {
                    report.sections.push(s);
                }
                current = Some(Section::new(name));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| ReportError::Syntax { line: line_no, msg: format!("expected `key = value`, got `{line}`") })?;
            match current.as_mut() {
                Some(s) => {
                    s.entries.push((key.to_string(), value.to_string()));
                }
                None => match key {
                    "format" => {
                        if value != FORMAT_LINE {
                            return Err(ReportError::Format(value.to_string()));
                        }
                        seen_format = true;
                    }
                    "invocation" => report.invocation = value.to_string(),
                    "elapsed_ms" => {
                        report.elapsed_ms = Some(value.parse().map_err(|_| ReportError::Syntax {
                            line: line_no,
                            msg: format!("bad elapsed_ms `{value}`"),
                        })?)
                    }
                    other => {
                        return Err(ReportError::Syntax { line: line_no, msg: format!("unknown header key `{other}`") })
                    }
                },
            }
        }
        if let Some(s) = current {
            report.sections.push(s);
        }
        if !seen_format {
            return Err(ReportError::Format("<missing>".into()));
        }
        Ok(report)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "format = {FORMAT_LINE}")?;
        writeln!(f, "invocation = {}", self.invocation)?;
        if let Some(ms) = self.elapsed_ms {
            writeln!(f, "elapsed_ms = {ms}")?;
        }
        for s in &self.sections {
            writeln!(f)?;
            writeln!(f, "[{}]", s.name)?;
            for (k, v) in &s.entries {
                if v.is_empty() {
                    writeln!(f, "{k} =")?;
                } else {
                    writeln!(f, "{k} = {v}")?;
                }
            }
        }
        Ok(())
    }
}
