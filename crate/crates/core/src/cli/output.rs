//! Record formats for scans, certificates and exception tables.
//!
//! jsonl writes one object per line, tagged by `record`. csv writes the same
//! fields as columns, with the header and summary objects as `# ` comment
//! lines. Lists inside a cell are space separated; `p^e` encodes a factor,
//! `|` separates the coordinates of a field element and `-` marks an absent
//! split.

use std::io::{self, BufRead, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{CliError, ExceptionRow, Format};
use crate::search::{
    CertHeader, CertStats, Certificate, Checks, Construction, ExceptionReport, Record, SearchError,
    Witness,
};
use crate::sieve::{Criterion, ScanConfig, ScanRecord, ScanSummary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanHeader {
    pub version: String,
    pub from: u64,
    pub to: u64,
    pub criterion: Criterion,
    pub smooth_bound: u64,
    pub crossover: u64,
    pub window: u64,
}

impl ScanHeader {
    pub fn new(from: u64, to: u64, cfg: &ScanConfig) -> Self {
        ScanHeader {
            version: env!("CARGO_PKG_VERSION").to_string(),
            from,
            to,
            criterion: cfg.criterion,
            smooth_bound: cfg.smooth_bound,
            crossover: cfg.crossover,
            window: cfg.window,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanLine {
    pub q: u64,
    pub p: u64,
    pub e: u32,
    pub criterion: Criterion,
    pub ruled_out: bool,
    pub margin_num: Option<String>,
    pub margin_den: Option<String>,
    /// Known prime factors of q^3 - 1.
    pub factors: Vec<(u128, u32)>,
    /// Unfactored part of q^2 + q + 1, 1 when complete.
    pub unfactored: u128,
    pub split_k: Option<Vec<u128>>,
    pub split_p: Option<Vec<u128>>,
    pub split_l: Option<Vec<u128>>,
    /// Unknown primes counted in P at the winning split.
    pub unknown_in_p: u32,
}

impl ScanLine {
    pub fn from_record(r: &ScanRecord) -> Self {
        let v = &r.verdict;
        let s = v.winning_split.as_ref();
        ScanLine {
            q: r.q,
            p: r.p,
            e: r.e,
            criterion: v.criterion,
            ruled_out: v.ruled_out,
            margin_num: v.margin.as_ref().map(|m| m.numer().to_string()),
            margin_den: v.margin.as_ref().map(|m| m.denom().to_string()),
            factors: r.factors.known().factors().to_vec(),
            unfactored: r.factors.unfactored(),
            split_k: s.map(|s| s.k.clone()),
            split_p: s.map(|s| s.p.clone()),
            split_l: s.map(|s| s.l.clone()),
            unknown_in_p: s.map_or(0, |s| s.unknown_in_p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummaryLine {
    pub prime_powers: u64,
    pub composite: u64,
    pub survivors: u64,
    pub composite_survivors: u64,
    /// Survivors had only the simple criterion been used.
    pub psc_survivors: u64,
    /// Survivors under the modified criterion; absent for psc-only scans.
    pub mpsc_survivors: Option<u64>,
    pub ruled_psc: u64,
    pub ruled_mpsc: u64,
    pub ruled_psc_partial: u64,
}

impl ScanSummaryLine {
    pub fn new(s: &ScanSummary, criterion: Criterion) -> Self {
        ScanSummaryLine {
            prime_powers: s.prime_powers,
            composite: s.composite,
            survivors: s.survivors,
            composite_survivors: s.composite_survivors,
            psc_survivors: s.psc_survivors(),
            mpsc_survivors: (criterion != Criterion::Psc).then_some(s.survivors),
            ruled_psc: s.ruled_psc,
            ruled_mpsc: s.ruled_mpsc,
            ruled_psc_partial: s.ruled_psc_partial,
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum ScanOut {
    Header(ScanHeader),
    Scan(ScanLine),
    Summary(ScanSummaryLine),
}

const SCAN_COLUMNS: [&str; 13] = [
    "q",
    "p",
    "e",
    "criterion",
    "ruled_out",
    "margin_num",
    "margin_den",
    "factors",
    "unfactored",
    "split_k",
    "split_p",
    "split_l",
    "unknown_in_p",
];

fn json_line<T: Serialize>(w: &mut dyn Write, x: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *w, x).map_err(io::Error::other)?;
    w.write_all(b"\n")
}

fn comment_line<T: Serialize>(w: &mut dyn Write, x: &T) -> io::Result<()> {
    w.write_all(b"# ")?;
    json_line(w, x)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn split_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split_whitespace()
        .map(|x| x.parse().map_err(|_| format!("bad list entry {x:?}")))
        .collect()
}

fn opt_list(x: &Option<Vec<u128>>) -> String {
    x.as_ref().map_or_else(|| "-".to_string(), |v| join(v))
}

fn parse_opt_list(s: &str) -> Result<Option<Vec<u128>>, String> {
    if s == "-" {
        Ok(None)
    } else {
        split_list(s).map(Some)
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad value {s:?}"))
}

fn scan_row(l: &ScanLine) -> Vec<String> {
    vec![
        l.q.to_string(),
        l.p.to_string(),
        l.e.to_string(),
        l.criterion.to_string(),
        l.ruled_out.to_string(),
        l.margin_num.clone().unwrap_or_default(),
        l.margin_den.clone().unwrap_or_default(),
        l.factors
            .iter()
            .map(|(p, e)| format!("{p}^{e}"))
            .collect::<Vec<_>>()
            .join(" "),
        l.unfactored.to_string(),
        opt_list(&l.split_k),
        opt_list(&l.split_p),
        opt_list(&l.split_l),
        l.unknown_in_p.to_string(),
    ]
}

fn parse_scan_row(r: &csv::StringRecord) -> Result<ScanLine, String> {
    if r.len() != SCAN_COLUMNS.len() {
        return Err(format!(
            "expected {} columns, got {}",
            SCAN_COLUMNS.len(),
            r.len()
        ));
    }
    let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
    let factors = r[7]
        .split_whitespace()
        .map(|f| {
            let (p, e) = f
                .split_once('^')
                .ok_or_else(|| format!("bad factor {f:?}"))?;
            Ok((parse(p)?, parse(e)?))
        })
        .collect::<Result<_, String>>()?;
    Ok(ScanLine {
        q: parse(&r[0])?,
        p: parse(&r[1])?,
        e: parse(&r[2])?,
        criterion: parse(&r[3])?,
        ruled_out: parse(&r[4])?,
        margin_num: opt(&r[5]),
        margin_den: opt(&r[6]),
        factors,
        unfactored: parse(&r[8])?,
        split_k: parse_opt_list(&r[9])?,
        split_p: parse_opt_list(&r[10])?,
        split_l: parse_opt_list(&r[11])?,
        unknown_in_p: parse(&r[12])?,
    })
}

/// Streams scan records in either format.
pub(super) struct ScanWriter<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl<'a> ScanWriter<'a> {
    pub fn new(format: Format, out: &'a mut dyn Write, header: &ScanHeader) -> io::Result<Self> {
        match format {
            Format::Jsonl => json_line(out, &ScanOut::Header(header.clone()))?,
            Format::Csv => {
                comment_line(out, &ScanOut::Header(header.clone()))?;
                csv_line(out, SCAN_COLUMNS.iter().map(|s| s.to_string()).collect())?;
            }
        }
        Ok(ScanWriter { format, out })
    }

    pub fn record(&mut self, l: &ScanLine) -> io::Result<()> {
        match self.format {
            Format::Jsonl => json_line(self.out, &ScanOut::Scan(l.clone())),
            Format::Csv => csv_line(self.out, scan_row(l)),
        }
    }

    pub fn summary(self, s: &ScanSummaryLine) -> io::Result<()> {
        match self.format {
            Format::Jsonl => json_line(self.out, &ScanOut::Summary(s.clone())),
            Format::Csv => comment_line(self.out, &ScanOut::Summary(s.clone())),
        }
    }
}

fn csv_line(out: &mut dyn Write, fields: Vec<String>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&fields)?;
    w.flush()
}

/// Comment payloads and data rows of a csv stream.
fn read_csv<R: BufRead>(r: R) -> Result<(Vec<String>, Vec<csv::StringRecord>), String> {
    let mut comments = Vec::new();
    let mut body = String::new();
    for line in r.lines() {
        let line = line.map_err(|e| e.to_string())?;
        match line.strip_prefix("# ") {
            Some(c) => comments.push(c.to_string()),
            None if line.is_empty() => {}
            None => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }
    let rows = csv::Reader::from_reader(body.as_bytes())
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok((comments, rows))
}

fn from_json<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

#[derive(Deserialize)]
struct Tag {
    record: String,
}

/// Reads the tag first; u128 fields cannot pass through serde's buffered
/// content used for internally tagged enums.
fn scan_out(line: &str) -> Result<ScanOut, String> {
    let tag: Tag = from_json(line)?;
    match tag.record.as_str() {
        "header" => from_json(line).map(ScanOut::Header),
        "scan" => from_json(line).map(ScanOut::Scan),
        "summary" => from_json(line).map(ScanOut::Summary),
        other => Err(format!("unknown record {other:?}")),
    }
}

pub type ScanFile = (ScanHeader, Vec<ScanLine>, Option<ScanSummaryLine>);

pub fn read_scan_jsonl<R: BufRead>(r: R) -> Result<ScanFile, String> {
    let mut header = None;
    let mut lines = Vec::new();
    let mut summary = None;
    for line in r.lines() {
        let line = line.map_err(|e| e.to_string())?;
        if line.is_empty() {
            continue;
        }
        match scan_out(&line)? {
            ScanOut::Header(h) => header = Some(h),
            ScanOut::Scan(l) => lines.push(l),
            ScanOut::Summary(s) => summary = Some(s),
        }
    }
    Ok((header.ok_or("missing header")?, lines, summary))
}

pub fn read_scan_csv<R: BufRead>(r: R) -> Result<ScanFile, String> {
    let (comments, rows) = read_csv(r)?;
    let mut header = None;
    let mut summary = None;
    for c in &comments {
        match scan_out(c)? {
            ScanOut::Header(h) => header = Some(h),
            ScanOut::Summary(s) => summary = Some(s),
            ScanOut::Scan(_) => return Err("scan record in a comment".into()),
        }
    }
    let lines = rows.iter().map(parse_scan_row).collect::<Result<_, _>>()?;
    Ok((header.ok_or("missing header")?, lines, summary))
}

const CERT_COLUMNS: [&str; 9] = [
    "record",
    "q",
    "a",
    "xi_digits",
    "construction",
    "k",
    "d",
    "checks",
    "exhaustive",
];

fn digits_cell(xs: &[Vec<u64>]) -> String {
    xs.iter().map(|c| join(c)).collect::<Vec<_>>().join("|")
}

fn parse_digits(s: &str) -> Result<Vec<Vec<u64>>, String> {
    s.split('|').map(split_list).collect()
}

fn opt_cell(x: Option<u64>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn parse_opt(s: &str) -> Result<Option<u64>, String> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse(s).map(Some)
    }
}

fn enum_cell<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        _ => unreachable!("unit variant"),
    }
}

/// Writes a certificate; csv puts the header in a comment line.
pub fn write_certificate(
    cert: &Certificate,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => cert.write_jsonl(&mut *out)?,
        Format::Csv => {
            comment_line(out, &Record::Header(cert.header.clone()))?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CERT_COLUMNS)?;
            for x in &cert.witnesses {
                let checks = serde_json::to_string(&x.checks).map_err(io::Error::other)?;
                w.write_record([
                    "witness".to_string(),
                    x.q.to_string(),
                    x.a.to_string(),
                    digits_cell(&x.xi_digits),
                    enum_cell(&x.construction),
                    opt_cell(x.k),
                    opt_cell(x.d),
                    checks,
                    String::new(),
                ])?;
            }
            for x in &cert.exceptions {
                w.write_record([
                    "exception".to_string(),
                    x.q.to_string(),
                    x.failing_a.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    x.exhaustive.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

fn malformed(s: String) -> CliError {
    CliError::Search(SearchError::Malformed(s))
}

fn parse_cert_row(r: &csv::StringRecord) -> Result<Result<Witness, ExceptionReport>, String> {
    if r.len() != CERT_COLUMNS.len() {
        return Err(format!(
            "expected {} columns, got {}",
            CERT_COLUMNS.len(),
            r.len()
        ));
    }
    match &r[0] {
        "witness" => {
            let construction: Construction = from_json(&format!("\"{}\"", &r[4]))?;
            let checks: Checks = from_json(&r[7])?;
            Ok(Ok(Witness {
                q: parse(&r[1])?,
                a: parse(&r[2])?,
                xi_digits: parse_digits(&r[3])?,
                construction,
                k: parse_opt(&r[5])?,
                d: parse_opt(&r[6])?,
                checks,
            }))
        }
        "exception" => Ok(Err(ExceptionReport {
            q: parse(&r[1])?,
            failing_a: parse(&r[2])?,
            exhaustive: parse(&r[8])?,
        })),
        other => Err(format!("unknown record {other:?}")),
    }
}

/// Reads a certificate in either format; csv is recognized by its leading
/// comment line.
pub fn read_certificate<R: BufRead>(mut r: R) -> Result<Certificate, CliError> {
    let csv = r.fill_buf()?.starts_with(b"#");
    if !csv {
        return Ok(Certificate::read_jsonl(r)?);
    }
    let (comments, rows) = read_csv(r).map_err(malformed)?;
    let [c] = comments.as_slice() else {
        return Err(malformed("expected one header comment".into()));
    };
    let header: CertHeader = match Record::from_json(c).map_err(malformed)? {
        Record::Header(h) => h,
        _ => return Err(malformed("comment is not a header".into())),
    };
    let mut cert = Certificate {
        header,
        witnesses: Vec::new(),
        exceptions: Vec::new(),
        stats: CertStats::default(),
    };
    for (i, row) in rows.iter().enumerate() {
        match parse_cert_row(row).map_err(|e| malformed(format!("row {}: {e}", i + 1)))? {
            Ok(w) => cert.witnesses.push(w),
            Err(x) => cert.exceptions.push(x),
        }
    }
    Ok(cert)
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum ExceptionOut<'a> {
    Exceptions(&'a ExceptionRow),
}

pub(super) fn write_exception_rows(
    rows: &[ExceptionRow],
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format {
        Format::Jsonl => {
            for r in rows {
                json_line(out, &ExceptionOut::Exceptions(r))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "q",
                "p",
                "e",
                "status",
                "witnesses",
                "failing_a",
                "exhaustive",
            ])?;
            for r in rows {
                w.write_record([
                    r.q.to_string(),
                    r.p.to_string(),
                    r.e.to_string(),
                    enum_cell(&r.status),
                    r.witnesses.to_string(),
                    join(&r.failing_a),
                    r.exhaustive.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
