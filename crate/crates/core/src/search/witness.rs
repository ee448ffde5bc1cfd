//! Witnesses, exception reports and the line-delimited certificate format.
//!
//! A certificate is a header line followed by one line per witness (sorted by
//! a) and one per exception. Field elements are written as their index
//! `sum c_i p^i` (for F_q) or as base-p digit lists (for F_{q^3}, one list per
//! power-basis coordinate). A witness built from a family lives in
//! F_q[x]/(P_d), with P_d rebuilt from the header's g and the witness's d;
//! every other witness uses the header's cubic modulus.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::SearchError;

pub const CERT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Lemma,
    RandomTrace,
    BruteForce,
}

/// How primitivity of an element was established during construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Evidence {
    /// `x^{(q^3-1)/p} != 1` for each prime p of q^3 - 1, ascending.
    Powers { nonunit: Vec<bool> },
    /// Family element g^k xi0 whose norm g^{3k+d} has this exponent, prime to q - 1.
    Lemma { norm_exponent: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// Tr(xi) as computed during construction.
    pub trace: u64,
    pub xi: Evidence,
    pub sum: Evidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub q: u64,
    pub a: u64,
    pub xi_digits: Vec<Vec<u64>>,
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    pub checks: Checks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionReport {
    pub q: u64,
    pub failing_a: u64,
    pub exhaustive: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    /// Every a has a witness.
    Full,
    /// Some a were shown exhaustively to have no witness.
    Exceptions,
    /// Some a are neither witnessed nor excluded.
    BudgetExceeded,
    /// Only a sample of a values was attempted.
    Sample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertConfig {
    pub families: usize,
    pub attempt_cap: usize,
    pub brute_force_max_q: u64,
    pub brute_force_cap: u64,
    pub trace_budget: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertHeader {
    pub version: String,
    pub format: u32,
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub base_modulus: Vec<u64>,
    pub cubic_modulus: Vec<Vec<u64>>,
    /// Generator of F_q^× used by family witnesses; absent for q = 2.
    pub g: Option<u64>,
    pub seed: u64,
    pub families: usize,
    pub factors: Vec<(u128, u32)>,
    pub status: CertStatus,
    /// a values neither witnessed nor excluded.
    #[serde(default)]
    pub unresolved: Vec<u64>,
    pub config: CertConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
pub enum Record {
    Header(CertHeader),
    Witness(Witness),
    Exception(ExceptionReport),
}

#[derive(Deserialize)]
struct Tag {
    record: String,
}

impl Record {
    /// Parses one line. The tag is read first so that u128 fields are
    /// deserialized directly rather than through serde's buffered content.
    pub fn from_json(line: &str) -> Result<Self, String> {
        let tag: Tag = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let r = match tag.record.as_str() {
            "header" => serde_json::from_str(line).map(Record::Header),
            "witness" => serde_json::from_str(line).map(Record::Witness),
            "exception" => serde_json::from_str(line).map(Record::Exception),
            other => return Err(format!("unknown record {other:?}")),
        };
        r.map_err(|e| e.to_string())
    }
}

/// Counters describing how a certificate was produced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertStats {
    pub families: usize,
    /// k values for which every admissible family failed.
    pub fallback_ks: Vec<u64>,
    /// Randomized trace searches run (a = 0 included).
    pub trace_searches: u64,
    /// Runs of the exhaustive search.
    pub brute_force_runs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub header: CertHeader,
    pub witnesses: Vec<Witness>,
    pub exceptions: Vec<ExceptionReport>,
    pub stats: CertStats,
}

impl Certificate {
    pub fn is_full(&self) -> bool {
        self.header.status == CertStatus::Full
    }

    pub fn exceptional_as(&self) -> Vec<u64> {
        self.exceptions.iter().map(|e| e.failing_a).collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), SearchError> {
        let mut line = |r: &Record| -> Result<(), SearchError> {
            serde_json::to_writer(&mut w, r).map_err(|e| SearchError::Malformed(e.to_string()))?;
            w.write_all(b"\n")?;
            Ok(())
        };
        line(&Record::Header(self.header.clone()))?;
        for x in &self.witnesses {
            line(&Record::Witness(x.clone()))?;
        }
        for x in &self.exceptions {
            line(&Record::Exception(x.clone()))?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Parses a certificate; errors name the offending line.
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, SearchError> {
        let mut header = None;
        let mut witnesses = Vec::new();
        let mut exceptions = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = Record::from_json(&line)
                .map_err(|e| SearchError::Malformed(format!("line {}: {e}", i + 1)))?;
            match rec {
                Record::Header(h) if header.is_none() && i == 0 => header = Some(h),
                Record::Header(_) => {
                    return Err(SearchError::Malformed(format!(
                        "line {}: unexpected header",
                        i + 1
                    )))
                }
                Record::Witness(w) => witnesses.push(w),
                Record::Exception(e) => exceptions.push(e),
            }
        }
        let header = header.ok_or_else(|| SearchError::Malformed("missing header".into()))?;
        Ok(Certificate {
            header,
            witnesses,
            exceptions,
            stats: CertStats::default(),
        })
    }
}
