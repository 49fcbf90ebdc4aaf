//! CSV and JSON renderings of census records, sweeps and pattern censuses.

use serde::Serialize;

use crate::census::CensusRecord;
use crate::density::{PatternCensus, SweepResult};
use crate::error::{Error, Result};

/// Version of the CSV layouts; bumped whenever a column changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const SWEEP_COLUMNS: [&str; 9] =
    ["p", "residue_class", "d", "q", "genus", "k", "l", "parity_ok", "class_details"];

pub const CLASSIFY_COLUMNS: [&str; 12] =
    ["m", "n", "p", "d", "q", "genus", "index", "factor", "e", "s", "chi", "regularity"];

pub const PATTERN_COLUMNS: [&str; 5] = ["pattern", "count", "frequency", "predicted", "predicted_value"];

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

fn header(kind: &str, lines: &[String]) -> String {
    let mut out = format!("# macbeath {kind} csv schema={CSV_SCHEMA_VERSION}\n");
    for l in lines {
        out.push_str("# ");
        out.push_str(l);
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Format(e.to_string()))
}

pub fn record_from_json(s: &str) -> Result<CensusRecord> {
    serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
}

fn poly_text(coeffs: &[u64]) -> String {
    coeffs.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

/// One row per class.
pub fn classify_csv(r: &CensusRecord) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CLASSIFY_COLUMNS).map_err(csv_err)?;
    for (i, c) in r.classes.iter().enumerate() {
        w.write_record([
            r.m.to_string(),
            r.n.to_string(),
            r.p.to_string(),
            r.field.d.to_string(),
            r.field.q.to_string(),
            r.genus.to_string(),
            i.to_string(),
            poly_text(&c.factor),
            c.e.to_string(),
            c.describe_s(r.p),
            c.chi.to_string(),
            c.regularity.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let head = header("classify", &[format!("k={} l={} count_flag={}", r.k, r.l, r.count_flag)]);
    Ok(head + &finish(w)?)
}

/// One row per classified prime, then a commented summary block.
pub fn sweep_csv(res: &SweepResult) -> Result<String> {
    let t = &res.tally;
    let residues: Vec<String> = t.stream.residues.iter().map(u64::to_string).collect();
    let head = header(
        "sweep",
        &[
            format!("m={} n={} modulus={} residues={}", t.m, t.n, t.stream.modulus, residues.join(",")),
            format!("workers={} seed={}", res.workers, res.seed),
        ],
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for row in &res.rows {
        w.write_record([
            row.p.to_string(),
            row.residue_class.clone(),
            row.d.to_string(),
            row.q.to_string(),
            row.genus.to_string(),
            row.k.to_string(),
            row.l.to_string(),
            row.parity_ok.map_or(String::new(), |b| b.to_string()),
            row.class_details.clone(),
        ])
        .map_err(csv_err)?;
    }
    let mut out = head + &finish(w)?;
    let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    out.push_str(&format!("# summary total={} counts={}\n", t.total, join(&t.counts)));
    for (class, counts) in &t.split {
        out.push_str(&format!("# summary residue={class} counts={}\n", join(counts)));
    }
    if let Some(pred) = &t.predicted {
        let pred: Vec<String> = pred.iter().map(ToString::to_string).collect();
        out.push_str(&format!("# summary predicted={}\n", pred.join(",")));
    }
    if let Some(dev) = t.max_abs_deviation {
        out.push_str(&format!("# summary max_abs_deviation={dev:.6}\n"));
    }
    let skipped: Vec<String> = res.skipped.iter().map(|s| format!("{}:{}", s.p, s.code)).collect();
    out.push_str(&format!("# summary skipped={}\n", skipped.join(",")));
    Ok(out)
}

pub fn pattern_csv(c: &PatternCensus) -> Result<String> {
    let head = header(
        "pattern",
        &[
            format!("m={} n={} bound={} sampled={}", c.m, c.n, c.bound, c.sampled),
            format!("workers={}", c.workers),
        ],
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PATTERN_COLUMNS).map_err(csv_err)?;
    for r in &c.rows {
        w.write_record([
            r.label.clone(),
            r.count.to_string(),
            format!("{:.6}", r.frequency),
            r.predicted.as_ref().map_or(String::new(), ToString::to_string),
            r.predicted
                .as_ref()
                .map_or(String::new(), |q| format!("{:.6}", crate::density::rational_to_f64(q))),
        ])
        .map_err(csv_err)?;
    }
    let mut out = head + &finish(w)?;
    let bad: Vec<String> = c.bad_primes.iter().map(u64::to_string).collect();
    out.push_str(&format!("# summary bad_primes={}\n", bad.join(",")));
    out.push_str(&format!("# summary cross_check_failures={}\n", c.cross_check_failures.len()));
    if let Some(dev) = c.max_abs_deviation {
        out.push_str(&format!("# summary max_abs_deviation={dev:.6}\n"));
    }
    Ok(out)
}
