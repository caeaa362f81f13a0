use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A computed or reference quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<f64> for Quantity {
    fn from(x: f64) -> Self {
        Quantity::Real(x)
    }
}

impl From<Complex64> for Quantity {
    fn from(z: Complex64) -> Self {
        Quantity::Complex { re: z.re, im: z.im }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Quantity::Real(x) => write!(f, "{x:.6}"),
            Quantity::Complex { re, im } => write!(f, "{re:.6}{im:+.6}i"),
        }
    }
}

impl Quantity {
    fn as_complex(&self) -> Complex64 {
        match *self {
            Quantity::Real(x) => Complex64::new(x, 0.0),
            Quantity::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    /// The formula or relation being checked.
    pub paper_ref: String,
    pub computed: Option<Quantity>,
    pub reference: Option<Quantity>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub pass: bool,
    /// Wall time in seconds.
    pub runtime: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    /// Comparison record; passes when `abs_diff <= abs_limit`.
    pub fn compare(
        name: impl Into<String>,
        paper_ref: impl Into<String>,
        computed: impl Into<Quantity>,
        reference: impl Into<Quantity>,
        abs_limit: f64,
        started: Instant,
    ) -> Self {
        let computed = computed.into();
        let reference = reference.into();
        let diff = (computed.as_complex() - reference.as_complex()).norm();
        let scale = reference.as_complex().norm();
        Self {
            name: name.into(),
            paper_ref: paper_ref.into(),
            computed: Some(computed),
            reference: Some(reference),
            abs_diff: Some(diff),
            rel_diff: (scale > 0.0).then(|| diff / scale),
            pass: diff <= abs_limit,
            runtime: started.elapsed().as_secs_f64(),
            error: None,
        }
    }

    /// Comparison record judged on relative difference.
    pub fn compare_rel(
        name: impl Into<String>,
        paper_ref: impl Into<String>,
        computed: impl Into<Quantity>,
        reference: impl Into<Quantity>,
        rel_limit: f64,
        started: Instant,
    ) -> Self {
        let mut r = Self::compare(name, paper_ref, computed, reference, f64::INFINITY, started);
        r.pass = r.rel_diff.is_some_and(|d| d <= rel_limit);
        r
    }

    /// Observation without a reference value.
    pub fn observe(
        name: impl Into<String>,
        paper_ref: impl Into<String>,
        computed: impl Into<Quantity>,
        started: Instant,
    ) -> Self {
        Self {
            name: name.into(),
            paper_ref: paper_ref.into(),
            computed: Some(computed.into()),
            reference: None,
            abs_diff: None,
            rel_diff: None,
            pass: true,
            runtime: started.elapsed().as_secs_f64(),
            error: None,
        }
    }

    /// A check that could not be computed.
    pub fn failed(
        name: impl Into<String>,
        paper_ref: impl Into<String>,
        error: impl ToString,
        started: Instant,
    ) -> Self {
        Self {
            name: name.into(),
            paper_ref: paper_ref.into(),
            computed: None,
            reference: None,
            abs_diff: None,
            rel_diff: None,
            pass: false,
            runtime: started.elapsed().as_secs_f64(),
            error: Some(error.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub records: Vec<Record>,
    pub pass: bool,
    pub runtime: f64,
}

impl Report {
    pub fn new(
        command: &str,
        config: BTreeMap<String, String>,
        records: Vec<Record>,
        runtime: f64,
    ) -> Self {
        Self {
            command: command.into(),
            config,
            pass: records.iter().all(|r| r.pass),
            records,
            runtime,
        }
    }
}
