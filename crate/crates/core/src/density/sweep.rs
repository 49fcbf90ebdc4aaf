use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::PathBuf;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{galois_model, max_abs_deviation, predicted_sigma_densities, rational_to_f64};
use super::{GaloisModel, GaloisStructure};
use crate::census::{map_census_seeded, CensusRecord};
use crate::error::{Error, Result};
use crate::gf::factor::DEFAULT_SEED;
use crate::intpoly::{omega_squared, Rational};
use crate::numkit::{self, PrimeLimit, PrimeStream};
use crate::par::Exec;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub exec: Exec,
    /// Append-only JSONL cache of per-prime outcomes.
    pub cache: Option<PathBuf>,
    pub galois_override: Option<GaloisStructure>,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { exec: Exec::default(), cache: None, galois_override: None, seed: DEFAULT_SEED }
    }
}

/// Summary of one classified prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRow {
    pub p: u64,
    /// `+1` or `-1` for p ≡ ±1 mod N_n, otherwise the residue itself.
    pub residue_class: String,
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub q: BigUint,
    #[serde(with = "crate::decimal")]
    pub genus: BigInt,
    pub k: usize,
    pub l: usize,
    /// `None` when the parity prediction does not apply.
    pub parity_ok: Option<bool>,
    pub count_flag: bool,
    /// `s:regularity` per class, separated by `;`.
    pub class_details: String,
}

impl PrimeRow {
    pub fn from_record(r: &CensusRecord) -> Self {
        let class_details = r
            .classes
            .iter()
            .map(|c| format!("{}:{}", c.describe_s(r.p), c.regularity))
            .collect::<Vec<_>>()
            .join(";");
        PrimeRow {
            p: r.p,
            residue_class: residue_label(r.p, r.field.n_n),
            d: r.field.d,
            q: r.field.q.clone(),
            genus: r.genus.clone(),
            k: r.k,
            l: r.l,
            parity_ok: r.parity.as_ref().filter(|v| v.applicable).map(|v| v.consistent),
            count_flag: r.count_flag,
            class_details,
        }
    }
}

pub fn residue_label(p: u64, modulus: u64) -> String {
    match p % modulus {
        1 => "+1".into(),
        x if x == modulus - 1 => "-1".into(),
        x => x.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPrime {
    pub p: u64,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Outcome {
    Row(PrimeRow),
    Skipped(SkippedPrime),
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheLine {
    m: u64,
    n: u64,
    p: u64,
    outcome: Outcome,
}

/// Counts of primes per k, overall and per residue class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaTally {
    pub m: u64,
    pub n: u64,
    pub stream: PrimeStream,
    pub total: u64,
    pub counts: Vec<u64>,
    pub split: BTreeMap<String, Vec<u64>>,
    pub frequencies: Vec<f64>,
    #[serde(with = "crate::decimal::opt_seq")]
    pub predicted: Option<Vec<Rational>>,
    pub galois: Option<GaloisModel>,
    pub max_abs_deviation: Option<f64>,
}

impl SigmaTally {
    pub fn from_rows(
        m: u64,
        n: u64,
        stream: &PrimeStream,
        rows: &[PrimeRow],
        galois: Option<GaloisModel>,
    ) -> Self {
        let r = (numkit::totient(n) / 2) as usize;
        let mut counts = vec![0u64; r + 1];
        let mut split: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        for row in rows {
            counts[row.k] += 1;
            split.entry(row.residue_class.clone()).or_insert_with(|| vec![0; r + 1])[row.k] += 1;
        }
        let total = rows.len() as u64;
        let frequencies: Vec<f64> =
            counts.iter().map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 }).collect();
        let predicted = galois.as_ref().and_then(|g| predicted_sigma_densities(g).ok());
        let max_abs_deviation = predicted.as_ref().map(|pred| {
            let pred: Vec<f64> = pred.iter().map(rational_to_f64).collect();
            max_abs_deviation(&frequencies, &pred)
        });
        SigmaTally {
            m,
            n,
            stream: stream.clone(),
            total,
            counts,
            split,
            frequencies,
            predicted,
            galois,
            max_abs_deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub tally: SigmaTally,
    pub rows: Vec<PrimeRow>,
    pub skipped: Vec<SkippedPrime>,
    pub workers: usize,
    pub seed: u64,
}

impl SweepResult {
    /// Primes grouped by (k, residue class), each list ascending.
    pub fn sigma_lists(&self) -> BTreeMap<(usize, String), Vec<u64>> {
        let mut out: BTreeMap<(usize, String), Vec<u64>> = BTreeMap::new();
        for row in &self.rows {
            out.entry((row.k, row.residue_class.clone())).or_default().push(row.p);
        }
        out
    }
}

/// Primes p with p ≡ ±1 mod N_n and, for m ≠ 3, p ≡ ±1 mod N_m: the
/// primes over which every map is defined over F_p.
pub fn default_stream(m: u64, n: u64, limit: PrimeLimit) -> Result<PrimeStream> {
    omega_squared(m)?;
    let n_n = if n % 2 == 1 { n } else { 2 * n };
    if m == 3 {
        return Ok(PrimeStream::plus_minus_one(n_n, limit));
    }
    let n_m = if m == 4 { 8 } else { 12 };
    let modulus = n_n.lcm(&n_m);
    let pm = |x: u64, k: u64| x % k == 1 || x % k == k - 1;
    let residues = (1..modulus).filter(|&x| numkit::gcd(x, modulus) == 1 && pm(x, n_n) && pm(x, n_m));
    Ok(PrimeStream::new(modulus, residues, limit))
}

fn classify(m: u64, n: u64, p: u64, seed: u64) -> Result<Outcome> {
    match map_census_seeded(m, n, p, seed) {
        Ok(r) => Ok(Outcome::Row(PrimeRow::from_record(&r))),
        Err(e) if e.is_domain() => {
            Ok(Outcome::Skipped(SkippedPrime { p, code: e.code().into(), message: e.to_string() }))
        }
        Err(e) => Err(e),
    }
}

fn load_cache(path: &PathBuf, m: u64, n: u64) -> Result<HashMap<u64, Outcome>> {
    let mut out = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e.into()),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        // a torn final line from an interrupted run is dropped
        let Ok(entry) = serde_json::from_str::<CacheLine>(&line) else { continue };
        if entry.m == m && entry.n == n {
            out.insert(entry.p, entry.outcome);
        }
    }
    Ok(out)
}

fn ends_without_newline(path: &PathBuf) -> Result<bool> {
    let mut file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(false),
        Err(e) => return Err(e.into()),
    };
    let len = file.metadata()?.len();
    if len == 0 {
        return Ok(false);
    }
    file.seek(SeekFrom::Start(len - 1))?;
    let mut last = [0u8; 1];
    file.read_exact(&mut last)?;
    Ok(last[0] != b'\n')
}

fn append_cache(path: &PathBuf, m: u64, n: u64, fresh: &[(u64, Outcome)]) -> Result<()> {
    if fresh.is_empty() {
        return Ok(());
    }
    let torn = ends_without_newline(path)?;
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut buf = String::new();
    if torn {
        buf.push('\n');
    }
    for (p, outcome) in fresh {
        let line = CacheLine { m, n, p: *p, outcome: outcome.clone() };
        buf.push_str(&serde_json::to_string(&line).map_err(|e| Error::Format(e.to_string()))?);
        buf.push('\n');
    }
    file.write_all(buf.as_bytes())?;
    Ok(())
}

/// Classifies every prime of the stream and tallies them by k. Primes with
/// bad reduction or an inadmissible field are skipped and listed.
pub fn sweep(m: u64, n: u64, stream: &PrimeStream, opts: &SweepOptions) -> Result<SweepResult> {
    omega_squared(m)?;
    if m * n <= 2 * (m + n) {
        return Err(Error::NotHyperbolic { m, n });
    }
    let primes = numkit::primes_in_classes(stream)?;
    let mut cached = match &opts.cache {
        Some(path) => load_cache(path, m, n)?,
        None => HashMap::new(),
    };
    let todo: Vec<u64> = primes.iter().copied().filter(|p| !cached.contains_key(p)).collect();
    let computed = opts.exec.map(&todo, |&p| classify(m, n, p, opts.seed))?;
    let mut fresh = Vec::with_capacity(todo.len());
    for (p, outcome) in todo.into_iter().zip(computed) {
        fresh.push((p, outcome?));
    }
    if let Some(path) = &opts.cache {
        append_cache(path, m, n, &fresh)?;
    }
    cached.extend(fresh);

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for p in &primes {
        match cached.remove(p) {
            Some(Outcome::Row(r)) => rows.push(r),
            Some(Outcome::Skipped(s)) => skipped.push(s),
            None => unreachable!("every prime was classified"),
        }
    }
    let galois = galois_model(m, n, opts.galois_override).ok();
    Ok(SweepResult {
        tally: SigmaTally::from_rows(m, n, stream, &rows, galois),
        rows,
        skipped,
        workers: opts.exec.thread_count(),
        seed: opts.seed,
    })
}
