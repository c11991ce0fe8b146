use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Refuted,
    /// A budget ran out before the verdict was reached.
    Incomplete,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Verified => 0,
            Status::Refuted => 1,
            Status::Incomplete => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Refuted => "refuted",
            Status::Incomplete => "incomplete",
        }
    }

    pub fn worst(self, other: Status) -> Status {
        if other.exit_code() > self.exit_code() {
            other
        } else {
            self
        }
    }
}

/// What a subcommand produced: a human rendering and the structured body.
pub struct Outcome {
    pub status: Status,
    pub text: String,
    pub body: Value,
    pub witnesses: Vec<Value>,
}

impl Outcome {
    pub fn new(status: Status, text: String, body: impl Serialize) -> Self {
        Outcome {
            status,
            text,
            body: to_value(body),
            witnesses: Vec::new(),
        }
    }

    pub fn witness(mut self, w: impl Serialize) -> Self {
        self.witnesses.push(to_value(w));
        self
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// The JSON document written by `--json` and `--out`.
#[derive(Serialize)]
pub struct ReportDocument<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a [String],
    pub status: Status,
    pub report: &'a Value,
    pub witnesses: &'a [Value],
    pub timing_ms: u128,
}

impl<'a> ReportDocument<'a> {
    pub fn new(command: &'a [String], outcome: &'a Outcome, timing_ms: u128) -> Self {
        ReportDocument {
            tool: "moricone",
            version: env!("CARGO_PKG_VERSION"),
            command,
            status: outcome.status,
            report: &outcome.body,
            witnesses: &outcome.witnesses,
            timing_ms,
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}
