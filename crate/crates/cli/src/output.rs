use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use h4n_core::report::{Check, Status};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// What a command produced, in all three renderings.
pub struct Outcome {
    pub status: Status,
    pub text: String,
    pub json: Value,
    pub csv: Vec<Vec<String>>,
}

impl Outcome {
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        Ok(match format {
            Format::Text => self.text.clone().into_bytes(),
            Format::Json => {
                let mut v = self.json.clone();
                v["status"] = serde_json::to_value(self.status)?;
                let mut out = serde_json::to_vec_pretty(&v)?;
                out.push(b'\n');
                out
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
                for row in &self.csv {
                    w.write_record(row)?;
                }
                w.into_inner().context("flushing csv")?
            }
        })
    }

    pub fn emit(&self, format: Format, output: Option<&Path>) -> Result<()> {
        let bytes = self.render(format)?;
        match output {
            Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }
}

pub fn worst<'a>(checks: impl IntoIterator<Item = &'a Check>) -> Status {
    checks.into_iter().map(|c| c.status).max().unwrap_or(Status::Pass)
}

fn tag(status: Status) -> &'static str {
    match status {
        Status::Pass => "pass",
        Status::Deviation => "deviation",
        Status::Fail => "FAIL",
    }
}

pub fn status_word(status: Status) -> &'static str {
    match status {
        Status::Pass => "pass",
        Status::Deviation => "deviation",
        Status::Fail => "fail",
    }
}

/// Named groups of checks rendered as text, JSON and CSV.
pub struct Sections {
    pub title: String,
    pub groups: Vec<(String, Vec<Check>)>,
}

impl Sections {
    pub fn new(title: impl Into<String>) -> Sections {
        Sections { title: title.into(), groups: Vec::new() }
    }

    pub fn push(&mut self, name: &str, checks: Vec<Check>) {
        self.groups.push((name.to_owned(), checks));
    }

    pub fn status(&self) -> Status {
        worst(self.groups.iter().flat_map(|(_, c)| c))
    }

    pub fn text(&self) -> String {
        let mut s = format!("{}\n", self.title);
        for (name, checks) in &self.groups {
            s.push_str(&format!("\n{name}\n"));
            for c in checks {
                s.push_str(&format!("  [{}] {}", tag(c.status), c.axiom));
                if let Some(w) = &c.witness {
                    s.push_str(&format!(": {w}"));
                }
                s.push('\n');
            }
        }
        s.push_str(&format!("\noverall: {}\n", status_word(self.status())));
        s
    }

    pub fn json(&self) -> Value {
        let groups: serde_json::Map<String, Value> = self
            .groups
            .iter()
            .map(|(name, checks)| (name.clone(), serde_json::to_value(checks).expect("checks serialize")))
            .collect();
        Value::Object(groups)
    }

    pub fn csv(&self) -> Vec<Vec<String>> {
        let mut rows = vec![vec!["section".into(), "check".into(), "status".into(), "witness".into()]];
        for (name, checks) in &self.groups {
            for c in checks {
                rows.push(vec![
                    name.clone(),
                    c.axiom.clone(),
                    status_word(c.status).into(),
                    c.witness.clone().unwrap_or_default(),
                ]);
            }
        }
        rows
    }
}
