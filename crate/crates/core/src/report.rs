//! JSON and CSV forms of search and consistency reports.
//!
//! Elements are written in their text form read as JSON: a number for prime
//! fields, a coordinate array (`[2,1]` for 2 + a) for extension fields.
//! Every top-level document carries `"schema": "cartier-report/1"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::curve::{Curve, CurveError, Invariants};
use crate::field::{Elem, Field, FieldError};
use crate::poly::Poly;
use crate::search::{Counts, Mode, SearchReport, SearchSpec, Witness};
use crate::verify::ConsistencyReport;

pub const SCHEMA: &str = "cartier-report/1";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("witness {index} does not re-validate: stored {stored:?}, recomputed {recomputed:?}")]
    Revalidation {
        index: usize,
        stored: Invariants,
        recomputed: Invariants,
    },
}

/// The per-curve report fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessWire {
    pub p: u32,
    pub k: u32,
    pub genus: usize,
    pub smooth: bool,
    #[serde(rename = "rank_A")]
    pub rank_a: usize,
    pub a_number: usize,
    pub p_rank: usize,
    pub coeffs: Vec<Value>,
}

impl WitnessWire {
    pub fn new(field: &Field, coeffs: &[Elem], inv: &Invariants) -> WitnessWire {
        WitnessWire {
            p: field.characteristic(),
            k: field.degree(),
            genus: inv.genus,
            smooth: inv.smooth,
            rank_a: inv.rank_a,
            a_number: inv.a_number,
            p_rank: inv.p_rank,
            coeffs: coeffs.iter().map(|&c| field.elem_to_json(c)).collect(),
        }
    }

    fn into_witness(self, field: &Field) -> Result<Witness, ReportError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|v| field.elem_from_json(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Witness {
            coeffs,
            invariants: Invariants {
                genus: self.genus,
                smooth: self.smooth,
                rank_a: self.rank_a,
                a_number: self.a_number,
                p_rank: self.p_rank,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecWire {
    pub field: String,
    pub degree: usize,
    pub factor: Option<Vec<Value>>,
    pub fixed: BTreeMap<usize, Value>,
    pub free: Vec<usize>,
    pub mode: String,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub target_a: Option<usize>,
    pub target_p_rank: Option<usize>,
    pub require_smooth: bool,
    pub collect_limit: usize,
    pub prefilter: bool,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsWire {
    pub enumerated: u64,
    pub squarefree: u64,
    pub rank_matched: u64,
    pub a_matched: u64,
    pub p_rank_matched: u64,
    pub by_p_rank: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReportWire {
    pub schema: String,
    pub kind: String,
    pub spec: SpecWire,
    pub counts: CountsWire,
    pub matched: u64,
    pub witnesses: Vec<WitnessWire>,
    pub seed: Option<u64>,
    pub shard_count: u64,
    pub elapsed_ms: Option<u64>,
}

fn spec_to_wire(spec: &SearchSpec) -> SpecWire {
    let field = &spec.field;
    let (mode, samples, seed) = match spec.mode {
        Mode::Exhaustive => ("exhaustive", None, None),
        Mode::Random { samples, seed } => ("random", Some(samples), Some(seed)),
    };
    SpecWire {
        field: field.to_string(),
        degree: spec.degree,
        factor: spec
            .factor
            .as_ref()
            .map(|f| f.coeffs().iter().map(|&c| field.elem_to_json(c)).collect()),
        fixed: spec
            .fixed
            .iter()
            .map(|(&i, &v)| (i, field.elem_to_json(v)))
            .collect(),
        free: spec.free.clone(),
        mode: mode.to_string(),
        samples,
        seed,
        target_a: spec.target_a,
        target_p_rank: spec.target_p_rank,
        require_smooth: spec.require_smooth,
        collect_limit: spec.collect_limit,
        prefilter: spec.prefilter,
        budget: spec.budget,
    }
}

fn spec_from_wire(w: SpecWire) -> Result<SearchSpec, ReportError> {
    let field = Field::parse_spec(&w.field)?;
    let mode = match (w.mode.as_str(), w.samples, w.seed) {
        ("exhaustive", _, _) => Mode::Exhaustive,
        ("random", Some(samples), Some(seed)) => Mode::Random { samples, seed },
        _ => return Err(ReportError::Malformed(format!("mode `{}`", w.mode))),
    };
    let factor = match w.factor {
        Some(vals) => Some(Poly::from_indices(
            &field,
            vals.iter()
                .map(|v| field.elem_from_json(v))
                .collect::<Result<_, _>>()?,
        )),
        None => None,
    };
    let fixed = w
        .fixed
        .iter()
        .map(|(&i, v)| Ok((i, field.elem_from_json(v)?)))
        .collect::<Result<_, FieldError>>()?;
    Ok(SearchSpec {
        field,
        degree: w.degree,
        factor,
        fixed,
        free: w.free,
        mode,
        target_a: w.target_a,
        target_p_rank: w.target_p_rank,
        require_smooth: w.require_smooth,
        collect_limit: w.collect_limit,
        prefilter: w.prefilter,
        budget: w.budget,
    })
}

impl SearchReport {
    pub fn to_wire(&self) -> SearchReportWire {
        let field = self.field();
        let c = &self.counts;
        SearchReportWire {
            schema: SCHEMA.to_string(),
            kind: "search".to_string(),
            spec: spec_to_wire(&self.spec),
            counts: CountsWire {
                enumerated: c.enumerated,
                squarefree: c.squarefree,
                rank_matched: c.rank_matched,
                a_matched: c.a_matched,
                p_rank_matched: c.p_rank_matched,
                by_p_rank: c.by_p_rank.clone(),
            },
            matched: c.matched(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessWire::new(field, &w.coeffs, &w.invariants))
                .collect(),
            seed: self.seed,
            shard_count: self.shard_count,
            elapsed_ms: self.elapsed_ms,
        }
    }

    pub fn from_wire(w: SearchReportWire) -> Result<SearchReport, ReportError> {
        if w.schema != SCHEMA {
            return Err(ReportError::Malformed(format!("schema `{}`", w.schema)));
        }
        let spec = spec_from_wire(w.spec)?;
        let witnesses = w
            .witnesses
            .into_iter()
            .map(|x| x.into_witness(&spec.field))
            .collect::<Result<_, _>>()?;
        let c = w.counts;
        Ok(SearchReport {
            spec,
            counts: Counts {
                enumerated: c.enumerated,
                squarefree: c.squarefree,
                rank_matched: c.rank_matched,
                a_matched: c.a_matched,
                p_rank_matched: c.p_rank_matched,
                by_p_rank: c.by_p_rank,
            },
            witnesses,
            seed: w.seed,
            shard_count: w.shard_count,
            elapsed_ms: w.elapsed_ms,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("report serializes")
    }

    /// Parses a report and re-validates every stored witness.
    pub fn from_json(s: &str) -> Result<SearchReport, ReportError> {
        let report = SearchReport::from_wire(serde_json::from_str(s)?)?;
        report.revalidate()?;
        Ok(report)
    }

    /// Recomputes the invariants of every witness from its coefficients.
    pub fn revalidate(&self) -> Result<(), ReportError> {
        revalidate_witnesses(self.field(), &self.witnesses)
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        witnesses_to_csv(self.field(), &self.witnesses)
    }
}

pub fn revalidate_witnesses(field: &Field, witnesses: &[Witness]) -> Result<(), ReportError> {
    for (index, w) in witnesses.iter().enumerate() {
        let recomputed = Curve::new(w.poly(field))?.invariants();
        if recomputed != w.invariants {
            return Err(ReportError::Revalidation {
                index,
                stored: w.invariants,
                recomputed,
            });
        }
    }
    Ok(())
}

/// Rows `p,k,genus,coeffs,a_number,p_rank,smooth`, coefficients joined by `;`.
pub fn witnesses_to_csv(field: &Field, witnesses: &[Witness]) -> Result<String, ReportError> {
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["p", "k", "genus", "coeffs", "a_number", "p_rank", "smooth"])?;
    for w in witnesses {
        let coeffs: Vec<String> = w.coeffs.iter().map(|&c| field.format_elem(c)).collect();
        out.write_record([
            field.characteristic().to_string(),
            field.degree().to_string(),
            w.invariants.genus.to_string(),
            coeffs.join(";"),
            w.invariants.a_number.to_string(),
            w.invariants.p_rank.to_string(),
            w.invariants.smooth.to_string(),
        ])?;
    }
    let bytes = out
        .into_inner()
        .map_err(|e| ReportError::Malformed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyWire {
    pub schema: String,
    pub kind: String,
    pub claim: String,
    pub field: String,
    pub p: u32,
    pub k: u32,
    pub genus: usize,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
    pub witnesses: Vec<WitnessWire>,
    pub searches: Vec<SearchReportWire>,
}

impl ConsistencyReport {
    pub fn to_wire(&self) -> ConsistencyWire {
        let field = &self.field;
        ConsistencyWire {
            schema: SCHEMA.to_string(),
            kind: "consistency".to_string(),
            claim: self.claim.clone(),
            field: field.to_string(),
            p: field.characteristic(),
            k: field.degree(),
            genus: self.genus,
            expected: self.expected.clone(),
            observed: self.observed.clone(),
            pass: self.pass,
            witnesses: self
                .witnesses
                .iter()
                .map(|w| WitnessWire::new(field, &w.coeffs, &w.invariants))
                .collect(),
            searches: self.searches.iter().map(SearchReport::to_wire).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("report serializes")
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        witnesses_to_csv(&self.field, &self.witnesses)
    }
}

/// Invariants of a single curve as a standalone JSON document.
pub fn invariants_json(f: &Poly, inv: &Invariants) -> String {
    let mut value = serde_json::to_value(WitnessWire::new(f.field(), f.coeffs(), inv))
        .expect("witness serializes");
    if let Value::Object(map) = &mut value {
        map.insert("schema".into(), Value::from(SCHEMA));
    }
    serde_json::to_string_pretty(&value).expect("value serializes")
}
