//! Reports are ordered `key=value` lines; the human format aligns the same
//! pairs. Values never contain newlines.

use std::fmt::{self, Display};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// `key=value` lines.
    Kv,
    /// Aligned `key  value` lines.
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Computed,
    Undecided,
    /// A self-check failed; reported with the error exit code.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Computed => 0,
            Status::Undecided => 1,
            Status::Failed => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    entries: Vec<(String, String)>,
    pub status: Status,
}

impl Default for Report {
    fn default() -> Self {
        Report { entries: Vec::new(), status: Status::Computed }
    }
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        let v = value.to_string().replace(['\n', '\r'], " ");
        self.entries.push((key.into(), v));
    }

    pub fn undecided(&mut self, reason: impl Display) {
        self.status = Status::Undecided;
        self.push("undecided", reason);
    }

    pub fn extend(&mut self, other: Report) {
        if other.status != Status::Computed && self.status != Status::Failed {
            self.status = other.status;
        }
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Kv => {
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Human => {
                let w = self.entries.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                for (k, v) in &self.entries {
                    out.push_str(&format!("{k:<w$}  {v}\n"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Kv))
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub fn join<T: Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}
