//! Named computations on a model file and the randomized verification suite,
//! producing deterministic reports.

mod commands;
mod identities;

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::model::ModelFile;

pub use identities::{identity_sections, CRITERIA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    VerifyMaster,
    Curvature,
    Torsion,
    KCurvature,
    KTorsion,
    CompareNaive,
    DiracCheck,
    Ricci,
    Scalar,
    VerifyAll,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::VerifyMaster,
        Command::Curvature,
        Command::Torsion,
        Command::KCurvature,
        Command::KTorsion,
        Command::CompareNaive,
        Command::DiracCheck,
        Command::Ricci,
        Command::Scalar,
        Command::VerifyAll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyMaster => "verify-master",
            Command::Curvature => "curvature",
            Command::Torsion => "torsion",
            Command::KCurvature => "k-curvature",
            Command::KTorsion => "k-torsion",
            Command::CompareNaive => "compare-naive",
            Command::DiracCheck => "dirac-check",
            Command::Ricci => "ricci",
            Command::Scalar => "scalar",
            Command::VerifyAll => "verify-all",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, samples: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Recorded outcome of an identity that is not asserted.
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// First offending component on failure, or the observation for `Info`.
    pub detail: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, detail: (!ok).then(detail) }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Pass, detail: None }
    }

    pub fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { name: name.into(), status: Status::Info, detail: Some(detail.into()) }
    }

    pub fn from_result(name: impl Into<String>, r: Result<()>) -> Self {
        match r {
            Ok(()) => Check::pass(name),
            Err(e) => Check { name: name.into(), status: Status::Fail, detail: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Section {
    pub title: String,
    pub components: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section { title: title.into(), ..Default::default() }
    }

    pub fn component(&mut self, name: impl Into<String>, value: impl ToString) {
        self.components.push((name.into(), value.to_string()));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: Command,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn first_failure(&self) -> Option<(&Section, &Check)> {
        self.sections
            .iter()
            .find_map(|s| s.checks.iter().find(|c| c.status == Status::Fail).map(|c| (s, c)))
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let _ = writeln!(out, "== {} ==", s.title);
            for (k, v) in &s.components {
                let _ = writeln!(out, "{k} = {v}");
            }
            for c in &s.checks {
                match &c.detail {
                    Some(d) => {
                        let _ = writeln!(out, "[{}] {}: {d}", c.status.label(), c.name);
                    }
                    None => {
                        let _ = writeln!(out, "[{}] {}", c.status.label(), c.name);
                    }
                }
            }
        }
        match self.first_failure() {
            None => {
                let _ = writeln!(out, "result: all identities hold");
            }
            Some((s, c)) => {
                let _ = writeln!(
                    out,
                    "result: FAILED in {}: {}: {}",
                    s.title,
                    c.name,
                    c.detail.as_deref().unwrap_or("")
                );
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let sections: Vec<_> = self
            .sections
            .iter()
            .map(|s| {
                json!({
                    "title": s.title,
                    "components": s.components.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
                    "checks": s.checks.iter().map(|c| json!({
                        "name": c.name,
                        "status": c.status.label(),
                        "detail": c.detail,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        let first = self.first_failure().map(|(s, c)| json!({"section": s.title, "check": c.name, "detail": c.detail}));
        let v = json!({
            "command": self.command.name(),
            "passed": self.passed(),
            "first_failure": first,
            "sections": sections,
        });
        let mut text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

/// Runs `command` on `model`. Errors are validation errors (missing blocks,
/// shapes the computation cannot accept).
pub fn run(command: Command, model: &ModelFile, opts: Options) -> Result<Report> {
    let sections = match command {
        Command::VerifyAll => verify_all(model, opts)?,
        c => vec![commands::section(c, model, opts)?],
    };
    Ok(Report { command, sections })
}

/// Every model command whose blocks are present, then the randomized identity
/// battery. Sections run concurrently and are assembled in a fixed order.
fn verify_all(model: &ModelFile, opts: Options) -> Result<Vec<Section>> {
    let applicable: Vec<Command> = Command::ALL
        .into_iter()
        .filter(|&c| c != Command::VerifyAll && commands::applicable(c, model))
        .collect();
    let model_sections: Vec<Result<Section>> =
        applicable.par_iter().map(|&c| commands::section(c, model, opts)).collect();
    let mut out = model_sections.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(a) = &model.algebroid {
        out.push(commands::algebroid_section(a)?);
    }
    out.extend(identity_sections(opts));
    if out.is_empty() {
        return Err(Error::Invalid("nothing to verify".into()));
    }
    Ok(out)
}
