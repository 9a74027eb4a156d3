//! Machine-readable reports. Every number is an exact rational string.

use indexmap::IndexMap;
use multiphase::bounds::BoundReport;
use multiphase::loopmodel::{NestedCondition, RankTuple};
use multiphase::polyhedra::FarkasCert;
use multiphase::Rational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Found,
    NotFound,
    Valid,
    Invalid,
}

impl Status {
    /// Negative analysis results exit with 1.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Found | Status::Valid => 0,
            Status::NotFound | Status::Invalid => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub coeffs: IndexMap<String, String>,
    #[serde(rename = "const")]
    pub constant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// The function shown nonnegative.
    pub condition: String,
    /// One weight per inequality row of the polyhedron, equalities counted
    /// twice.
    pub multipliers: Vec<String>,
    pub constant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bound {
    /// Weights of phases 2..=d.
    pub mu: Vec<Vec<String>>,
    pub c: Vec<String>,
    pub d: Vec<String>,
    pub coefficient: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    pub domain: String,
    pub hull_applied: bool,
    #[serde(default)]
    pub tuple: Vec<Component>,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Bound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<IndexMap<String, String>>,
    /// Which condition the witness violates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Constraints of a computed polyhedron.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
}

impl Report {
    pub fn new(status: Status, domain: &str, hull_applied: bool) -> Self {
        Report {
            status,
            depth: None,
            domain: domain.to_string(),
            hull_applied,
            tuple: Vec::new(),
            certificates: Vec::new(),
            bound: None,
            witness: None,
            failure: None,
            constraints: Vec::new(),
            hull_method: None,
            steps: None,
            outcome: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn rat(r: &Rational) -> String {
    r.to_string()
}

pub fn rats<'a>(rs: impl IntoIterator<Item = &'a Rational>) -> Vec<String> {
    rs.into_iter().map(rat).collect()
}

pub fn tuple(t: &RankTuple, names: &[String]) -> Vec<Component> {
    t.components
        .iter()
        .map(|f| Component {
            coeffs: names.iter().cloned().zip(rats(f.coeffs().iter())).collect(),
            constant: rat(f.constant()),
        })
        .collect()
}

pub fn point(names: &[String], values: &[Rational]) -> IndexMap<String, String> {
    names.iter().cloned().zip(rats(values)).collect()
}

pub fn certificate(condition: String, c: &FarkasCert) -> Certificate {
    Certificate {
        condition,
        multipliers: rats(c.multipliers.iter()),
        constant: rat(&c.constant),
    }
}

pub fn bound(b: &BoundReport) -> Bound {
    Bound {
        mu: b.multipliers.iter().map(|w| rats(&w.mus)).collect(),
        c: rats(&b.c),
        d: rats(&b.d),
        coefficient: rat(&b.coefficient),
        m: b.m.as_ref().map(rat),
        numeric: b.numeric.as_ref().map(rat),
        iterations: b.iterations.as_ref().and_then(|i| u64::try_from(i).ok()),
    }
}

pub fn nested_condition(c: NestedCondition) -> String {
    match c {
        NestedCondition::Decrease(i) => format!("decrease of component {i}"),
        NestedCondition::LastNonneg => "last component nonnegative".into(),
        NestedCondition::Empty => "empty tuple on a nonempty loop".into(),
    }
}
