use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected,
    Terminated,
    Diverges,
    BoundExceeded,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Accepted | Verdict::Terminated => 0,
            Verdict::Rejected | Verdict::Diverges => 1,
            Verdict::BoundExceeded => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Accepted => "Accepted",
            Verdict::Rejected => "Rejected",
            Verdict::Terminated => "Terminated",
            Verdict::Diverges => "Diverges",
            Verdict::BoundExceeded => "BoundExceeded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    pub location: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Lines,
}

/// Outcome of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub weight: Option<u32>,
    pub steps: Option<usize>,
    /// Free-form sections printed before the verdict, such as a graph dump
    /// or the encoded process.
    pub sections: Vec<(String, String)>,
    pub environment: Option<String>,
    pub measure_trace: Option<Vec<String>>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(command: String, verdict: Verdict) -> Report {
        Report {
            command,
            verdict,
            weight: None,
            steps: None,
            sections: Vec::new(),
            environment: None,
            measure_trace: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn section(&mut self, title: &str, body: impl Into<String>) {
        self.sections.push((title.to_string(), body.into()));
    }

    pub fn diagnose(&mut self, code: &str, message: impl Into<String>, location: Option<String>) {
        self.diagnostics.push(Diagnostic {
            code: code.to_string(),
            message: message.into(),
            location,
        });
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Lines => {
                let _ = writeln!(out, "VERDICT={}", self.verdict.as_str());
                if let Some(w) = self.weight {
                    let _ = writeln!(out, "WEIGHT={w}");
                }
                if let Some(s) = self.steps {
                    let _ = writeln!(out, "STEPS={s}");
                }
                if let Some(d) = self.diagnostics.first() {
                    let _ = writeln!(out, "CODE={}", d.code);
                }
            }
            Format::Human => {
                let _ = writeln!(out, "command: {}", self.command);
                for (title, body) in &self.sections {
                    let _ = writeln!(out, "{title}:");
                    for line in body.lines() {
                        let _ = writeln!(out, "  {line}");
                    }
                }
                if let Some(env) = &self.environment {
                    let _ = writeln!(out, "environment:");
                    for line in env.lines() {
                        let _ = writeln!(out, "  {line}");
                    }
                }
                if let Some(trace) = &self.measure_trace {
                    for line in trace {
                        let _ = writeln!(out, "{line}");
                    }
                }
                let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
                if let Some(w) = self.weight {
                    let _ = writeln!(out, "weight: {w}");
                }
                if let Some(s) = self.steps {
                    let _ = writeln!(out, "steps: {s}");
                }
                for d in &self.diagnostics {
                    match &d.location {
                        Some(loc) => {
                            let _ = writeln!(out, "error[{}]: {} in `{loc}`", d.code, d.message);
                        }
                        None => {
                            let _ = writeln!(out, "error[{}]: {}", d.code, d.message);
                        }
                    }
                }
            }
        }
        out
    }
}
