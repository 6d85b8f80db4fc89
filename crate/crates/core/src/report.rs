//! Run reports: JSON (full) and TSV (one summary row per check).

use serde::Serialize;
use serde_json::Value;

use crate::verifier::CheckReport;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct GroupEntry {
    pub name: String,
    /// Factored, e.g. `2^2*3*5`; absent when the input could not be loaded.
    pub order: Option<String>,
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub config: Value,
    pub groups: Vec<GroupEntry>,
}

impl Report {
    pub fn new(config: Value, groups: Vec<GroupEntry>) -> Self {
        Self {
            version: VERSION,
            config,
            groups,
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &CheckReport> {
        self.groups.iter().flat_map(|g| g.checks.iter())
    }

    /// 0 when every check passed (possibly uncertified), 1 on any failure,
    /// 2 when some input produced an error.
    pub fn exit_code(&self) -> i32 {
        if self.groups.iter().any(|g| g.error.is_some()) {
            2
        } else if self.checks().all(|c| c.verdict.is_success()) {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("group\tcheck\tp\tn\te\tlambda\tbound\tverdict\n");
        let cell = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        for g in &self.groups {
            if let Some(err) = &g.error {
                out.push_str(&format!(
                    "{}\t-\t-\t-\t-\t-\t-\terror: {}\n",
                    g.name,
                    err.replace('\t', " ")
                ));
            }
            for c in &g.checks {
                let m = |k: &str| c.measured.get(k).map(render_scalar);
                let row = [
                    c.group.clone(),
                    c.check.to_string(),
                    cell(c.params.p.map(|p| p.to_string())),
                    cell(c.params.n.map(|n| n.to_string())),
                    cell(m("e")),
                    cell(m("lambda")),
                    cell(m("bound")),
                    c.verdict.as_str().to_string(),
                ];
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        out
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
