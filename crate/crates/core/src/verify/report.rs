use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::exact::ExactReal;
use crate::measure::Mode;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "==")]
    Eq,
    /// Reported quantity, not a claim.
    #[serde(rename = "info")]
    Info,
}

impl Relation {
    /// Whether `lhs ? rhs` holds given `lhs.cmp(rhs)`.
    pub fn accepts(self, ord: Ordering) -> bool {
        match self {
            Relation::Le => ord != Ordering::Greater,
            Relation::Lt => ord == Ordering::Less,
            Relation::Ge => ord != Ordering::Less,
            Relation::Gt => ord == Ordering::Greater,
            Relation::Eq => ord == Ordering::Equal,
            Relation::Info => true,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "==",
            Relation::Info => "info",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Violated,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit code for the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One checked (or merely reported) inequality. `lhs`/`rhs` are display
/// values; `status` carries the decision made before rounding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportItem {
    pub desc: String,
    pub lhs: f64,
    pub rhs: f64,
    pub rel: Relation,
    pub mode: Mode,
    pub status: Status,
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x.is_nan() {
        0.0
    } else {
        x.signum() * f64::MAX
    }
}

impl ReportItem {
    pub fn new(
        desc: impl Into<String>,
        lhs: f64,
        rel: Relation,
        rhs: f64,
        mode: Mode,
        status: Status,
    ) -> Self {
        ReportItem {
            desc: desc.into(),
            lhs: finite(lhs),
            rhs: finite(rhs),
            rel,
            mode,
            status,
        }
    }

    /// Exact comparison; undecided only if the sign search runs out of precision.
    pub fn exact(desc: impl Into<String>, lhs: &ExactReal, rel: Relation, rhs: &ExactReal) -> Self {
        let status = match lhs.try_cmp(rhs) {
            Some(ord) if rel.accepts(ord) => Status::Holds,
            Some(_) => Status::Violated,
            None => Status::Undecided,
        };
        ReportItem::new(desc, lhs.to_f64(), rel, rhs.to_f64(), Mode::Exact, status)
    }

    /// `lhs ∈ [lo, hi]` against an exact right-hand side. Holds when the whole
    /// bracket satisfies the relation, violated when none of it does.
    pub fn bracketed(
        desc: impl Into<String>,
        lo: &ExactReal,
        hi: &ExactReal,
        rel: Relation,
        rhs: &ExactReal,
    ) -> Self {
        if lo == hi {
            return ReportItem::exact(desc, lo, rel, rhs);
        }
        let (safe, other) = match rel {
            Relation::Le | Relation::Lt => (hi, lo),
            _ => (lo, hi),
        };
        let status = match (safe.try_cmp(rhs), other.try_cmp(rhs)) {
            (Some(s), _) if rel.accepts(s) => Status::Holds,
            (_, Some(o)) if !rel.accepts(o) && rel != Relation::Eq => Status::Violated,
            _ => Status::Undecided,
        };
        ReportItem::new(
            desc,
            safe.to_f64(),
            rel,
            rhs.to_f64(),
            Mode::Bracketed,
            status,
        )
    }

    pub fn info(desc: impl Into<String>, lhs: f64, rhs: f64, mode: Mode) -> Self {
        ReportItem::new(desc, lhs, Relation::Info, rhs, mode, Status::Holds)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub verdict: Verdict,
    pub params: Map<String, Value>,
    pub items: Vec<ReportItem>,
    pub seed: Option<u64>,
    pub schema_version: u32,
}

/// Fail on any certified violation outside Monte Carlo; inconclusive on any
/// undecided item or Monte Carlo miss; pass otherwise.
pub fn verdict_of(items: &[ReportItem]) -> Verdict {
    let mut verdict = Verdict::Pass;
    for it in items {
        if it.rel == Relation::Info {
            continue;
        }
        match (it.status, it.mode) {
            (Status::Violated, Mode::Exact | Mode::Bracketed) => return Verdict::Fail,
            (Status::Violated, Mode::MonteCarlo) | (Status::Undecided, _) => {
                verdict = Verdict::Inconclusive
            }
            (Status::Holds, _) => {}
        }
    }
    verdict
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            verdict: Verdict::Pass,
            params: Map::new(),
            items: Vec::new(),
            seed: None,
            schema_version: REPORT_SCHEMA_VERSION,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, item: ReportItem) {
        self.items.push(item);
    }

    /// Appends another report's items under a description prefix.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut it in other.items {
            it.desc = format!("{prefix}{}", it.desc);
            self.items.push(it);
        }
    }

    /// Recomputes the verdict from the items and returns `self`.
    pub fn finish(mut self) -> Self {
        self.verdict = verdict_of(&self.items);
        self
    }

    pub fn recompute_verdict(&self) -> Verdict {
        verdict_of(&self.items)
    }

    pub fn checked_items(&self) -> impl Iterator<Item = &ReportItem> {
        self.items.iter().filter(|i| i.rel != Relation::Info)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checked_items().filter(|i| i.status == status).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        let r: VerificationReport = serde_json::from_str(s)?;
        if r.schema_version != REPORT_SCHEMA_VERSION {
            return Err(crate::Error::SchemaVersion(r.schema_version));
        }
        Ok(r)
    }
}
