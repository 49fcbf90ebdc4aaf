//! Named verification suites reproducing published values and checking
//! the properties the census must satisfy.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::Serialize;

use crate::appendix::{self, APPENDIX_LISTS, ERRATA, PRINTED_TOTALS};
use crate::census::{map_census, matrix_oracle, route_equivalence, CensusRecord, Regularity};
use crate::density::sweep::default_stream;
use crate::density::{pattern_census, sweep, SweepOptions};
use crate::error::{Error, Result};
use crate::intpoly::psi_at_one;
use crate::numkit::{self, PrimeLimit};
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Table1,
    Examples,
    Appendix,
    Parity,
    Oracle,
    Patterns,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Table1, Suite::Examples, Suite::Appendix, Suite::Parity, Suite::Oracle, Suite::Patterns];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Table1 => "table1",
            Suite::Examples => "examples",
            Suite::Appendix => "appendix",
            Suite::Parity => "parity",
            Suite::Oracle => "oracle",
            Suite::Patterns => "patterns",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, expected: impl fmt::Debug, actual: impl fmt::Debug, pass: bool) -> Self {
        Check {
            name: name.into(),
            expected: format!("{expected:?}"),
            actual: format!("{actual:?}"),
            pass,
            note: None,
        }
    }

    fn eq<T: PartialEq + fmt::Debug>(name: impl Into<String>, expected: T, actual: T) -> Self {
        let pass = expected == actual;
        Self::new(name, expected, actual, pass)
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub exec: Exec,
    /// Upper bound on primes for the parity sweep.
    pub parity_bound: u64,
    /// Upper bound on primes for the pattern census.
    pub pattern_bound: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exec: Exec::default(), parity_bound: 10_000, pattern_bound: 1_000_000 }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Table1 => table1()?,
        Suite::Examples => examples()?,
        Suite::Appendix => appendix_suite(opts)?,
        Suite::Parity => parity(opts)?,
        Suite::Oracle => oracle(opts)?,
        Suite::Patterns => patterns(opts)?,
    };
    Ok(SuiteReport { suite, checks })
}

pub const TABLE1: [(u64, i64); 13] = [
    (7, -1),
    (8, -1),
    (9, -1),
    (10, -1),
    (11, -1),
    (12, -2),
    (13, 1),
    (14, -1),
    (15, 1),
    (16, -1),
    (17, 1),
    (18, -3),
    (19, -1),
];

fn table1() -> Result<Vec<Check>> {
    TABLE1
        .iter()
        .map(|&(n, v)| Ok(Check::eq(format!("Psi_{n}(1)"), BigInt::from(v), psi_at_one(n)?.direct)))
        .collect()
}

/// Expected facts about one worked example; `None` fields are not checked.
#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub m: u64,
    pub n: u64,
    pub p: u64,
    pub q: Option<u64>,
    pub classes: Option<usize>,
    pub k: Option<usize>,
    pub s: Option<&'static [i64]>,
    pub outer_s: Option<&'static [i64]>,
    pub genus: Option<u64>,
}

const fn ex(m: u64, n: u64, p: u64) -> Example {
    Example { m, n, p, q: None, classes: None, k: None, s: None, outer_s: None, genus: None }
}

pub const EXAMPLES: [Example; 26] = [
    Example { k: Some(1), s: Some(&[6, 4, 7]), ..ex(3, 7, 13) },
    Example { k: Some(2), s: Some(&[36, 25, 29]), ..ex(3, 7, 43) },
    Example { q: Some(8), classes: Some(1), k: Some(1), genus: Some(7), ..ex(3, 7, 2) },
    Example { classes: Some(3), k: Some(1), ..ex(3, 9, 17) },
    Example { k: Some(2), outer_s: Some(&[13]), ..ex(3, 9, 19) },
    Example { k: Some(1), ..ex(3, 9, 37) },
    Example { q: Some(32), classes: Some(1), k: Some(1), genus: Some(1241), ..ex(3, 11, 2) },
    Example { q: Some(25), classes: Some(3), k: Some(1), genus: Some(351), ..ex(3, 13, 5) },
    Example { q: Some(27), classes: Some(2), k: Some(0), ..ex(3, 13, 3) },
    Example { q: Some(16), classes: Some(1), k: Some(1), genus: Some(205), ..ex(3, 15, 2) },
    Example { classes: Some(4), k: Some(2), ..ex(3, 15, 31) },
    Example { q: Some(16), classes: Some(2), k: Some(2), genus: Some(221), ..ex(3, 17, 2) },
    Example { classes: Some(9), k: Some(5), genus: Some(1444), ..ex(3, 19, 37) },
    Example { k: Some(0), ..ex(3, 8, 17) },
    Example { k: Some(1), s: Some(&[9, -7]), ..ex(3, 8, 31) },
    Example { k: Some(1), genus: Some(115), ..ex(3, 10, 19) },
    Example { k: Some(0), ..ex(3, 10, 41) },
    Example { k: Some(1), ..ex(3, 12, 23) },
    Example { q: Some(25), classes: Some(1), k: Some(0), genus: Some(326), ..ex(3, 12, 5) },
    Example { classes: Some(3), k: Some(1), genus: Some(581), ..ex(3, 14, 29) },
    Example { q: Some(27), classes: Some(1), k: Some(0), ..ex(3, 14, 3) },
    Example { k: Some(1), s: Some(&[13, -12]), genus: Some(373), ..ex(4, 5, 31) },
    Example { k: Some(0), ..ex(4, 5, 41) },
    Example { k: Some(2), ..ex(4, 5, 89) },
    Example { q: Some(49), classes: Some(1), k: Some(0), ..ex(4, 5, 7) },
    Example { q: Some(289), classes: Some(1), k: Some(1), ..ex(4, 5, 17) },
];

fn residues(p: u64, v: &[i64]) -> Vec<u64> {
    let mut out: Vec<u64> = v.iter().map(|x| x.rem_euclid(p as i64) as u64).collect();
    out.sort_unstable();
    out
}

/// Checks one example against a census record.
pub fn check_example(e: &Example, r: &CensusRecord) -> Vec<Check> {
    let tag = format!("({},{},{})", e.m, e.n, e.p);
    let mut out = Vec::new();
    if let Some(q) = e.q {
        out.push(Check::eq(format!("{tag} q"), q.to_string(), r.field.q.to_string()));
    }
    if let Some(c) = e.classes {
        out.push(Check::eq(format!("{tag} classes"), c, r.classes.len()));
    }
    if let Some(k) = e.k {
        out.push(Check::eq(format!("{tag} k"), k, r.k));
    }
    if let Some(s) = e.s {
        let mut got = r.s_values();
        got.sort_unstable();
        out.push(Check::eq(format!("{tag} s-values"), residues(e.p, s), got));
    }
    if let Some(s) = e.outer_s {
        let mut got: Vec<u64> = r
            .classes
            .iter()
            .filter(|c| c.regularity == Regularity::Outer)
            .filter_map(|c| c.s_value())
            .collect();
        got.sort_unstable();
        out.push(Check::eq(format!("{tag} outer s-values"), residues(e.p, s), got));
    }
    if let Some(g) = e.genus {
        out.push(Check::eq(format!("{tag} genus"), BigInt::from(g), r.genus.clone()));
    }
    out
}

fn examples() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for e in &EXAMPLES {
        match map_census(e.m, e.n, e.p) {
            Ok(r) => out.extend(check_example(e, &r)),
            Err(err) => out.push(Check::new(
                format!("({},{},{}) census", e.m, e.n, e.p),
                "record",
                err.to_string(),
                false,
            )),
        }
    }
    Ok(out)
}

fn appendix_suite(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let stream = default_stream(3, 7, PrimeLimit::First(400))?;
    let res = sweep(3, 7, &stream, &SweepOptions { exec: opts.exec, ..Default::default() })?;
    let computed = res.sigma_lists();
    let corrected = appendix::corrected_lists();
    let mut out = Vec::new();
    out.push(Check::eq("primes swept", 400, res.rows.len()));
    out.push(Check::eq("last prime", 9871, res.rows.last().map_or(0, |r| r.p)));
    for e in ERRATA {
        let j = e.justify();
        let pass = j.is_ok();
        out.push(Check::new(format!("erratum {e:?}"), "justified", &j, pass));
    }
    for list in APPENDIX_LISTS {
        let got = computed.get(&list.key()).cloned().unwrap_or_default();
        let mut printed = list.primes.to_vec();
        printed.sort_unstable();
        let verbatim = Check::eq(format!("{} as printed", list.label()), printed.clone(), got.clone());
        let verbatim = if verbatim.pass {
            verbatim
        } else {
            verbatim.with_note("differs from the printed list; see the errata checks")
        };
        out.push(verbatim);
        out.push(Check::eq(
            format!("{} with errata applied", list.label()),
            corrected[&list.key()].clone(),
            got.clone(),
        ));
        out.push(Check::eq(format!("{} printed count", list.label()), list.printed_count, got.len()));
    }
    let totals: Vec<usize> = (0..4).map(|k| res.tally.counts[k] as usize).collect();
    out.push(Check::eq("aggregate counts", PRINTED_TOTALS.to_vec(), totals));
    Ok(out)
}

fn parity(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let primes = numkit::primes_up_to(opts.parity_bound);
    let mut out = Vec::new();
    for n in 7..=19u64 {
        let results = opts.exec.map(&primes, |&p| map_census(3, n, p))?;
        let mut applicable = 0u64;
        let mut violations = Vec::new();
        for (p, r) in primes.iter().zip(results) {
            match r {
                Ok(rec) => {
                    if rec.parity.as_ref().is_some_and(|v| v.applicable) {
                        applicable += 1;
                    }
                }
                Err(Error::ParityViolation { .. }) => violations.push(*p),
                Err(e) if e.is_domain() => {}
                Err(e) => return Err(e),
            }
        }
        out.push(
            Check::eq(format!("n={n} parity violations"), Vec::<u64>::new(), violations)
                .with_note(format!("{applicable} primes with odd d")),
        );
    }
    let heptagon: Vec<u64> = primes.iter().copied().filter(|p| p % 7 == 1 || p % 7 == 6).collect();
    let records = opts.exec.map(&heptagon, |&p| map_census(3, 7, p))?;
    let mut bad = Vec::new();
    for (p, r) in heptagon.iter().zip(records) {
        if (r?.k % 2 == 1) != (p % 4 == 1) {
            bad.push(*p);
        }
    }
    out.push(Check::eq("n=7: k odd iff p = 1 mod 4", Vec::<u64>::new(), bad));
    Ok(out)
}

fn oracle(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let odd: Vec<u64> = numkit::primes_up_to(500).into_iter().filter(|&p| p > 2).collect();
    let mut out = Vec::new();
    let mut degenerate = 0u64;
    for n in [7u64, 9, 11] {
        let per_prime = opts.exec.map(&odd, |&p| -> Result<(u64, u64, Vec<String>)> {
            let rec = match map_census(3, n, p) {
                Ok(r) => r,
                Err(e) if e.is_domain() => return Ok((0, 0, Vec::new())),
                Err(e) => return Err(e),
            };
            let mut classes = 0;
            let mut forced = 0;
            let mut bad = Vec::new();
            for i in 0..rec.classes.len() {
                classes += 1;
                let o = matrix_oracle(&rec, i, false)?;
                if !o.agrees || !o.w.inverts(&o.z) || !o.w.inverts(&o.x) {
                    bad.push(format!("p={p} class {i}"));
                }
                if let Ok(f) = matrix_oracle(&rec, i, true) {
                    forced += 1;
                    if !f.agrees || !f.degenerate {
                        bad.push(format!("p={p} class {i} (r = 1/2)"));
                    }
                }
            }
            Ok((classes, forced, bad))
        })?;
        let mut classes = 0;
        let mut bad = Vec::new();
        for r in per_prime {
            let (c, f, b) = r?;
            classes += c;
            degenerate += f;
            bad.extend(b);
        }
        out.push(
            Check::eq(format!("n={n} oracle disagreements"), Vec::<String>::new(), bad)
                .with_note(format!("{classes} classes")),
        );
    }
    out.push(Check::new("degenerate branch exercised", "> 0", degenerate, degenerate > 0));
    for n in 7..=16u64 {
        let results = opts.exec.map(&numkit::primes_up_to(500), |&p| (p, route_equivalence(3, n, p)))?;
        let mut bad = Vec::new();
        for (p, r) in results {
            match r {
                Ok(rc) if rc.equal => {}
                Ok(_) => bad.push(p),
                Err(e) if e.is_domain() => {}
                Err(e) => return Err(e),
            }
        }
        out.push(Check::eq(format!("n={n} route mismatches"), Vec::<u64>::new(), bad));
    }
    Ok(out)
}

fn patterns(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let c = pattern_census(3, 7, opts.pattern_bound, opts.exec, None)?;
    let mut out = Vec::new();
    out.push(Check::eq("bad primes", vec![2u64, 7], c.bad_primes.clone()));
    for row in &c.rows {
        let pred = row.predicted.as_ref().map_or(f64::NAN, crate::density::rational_to_f64);
        let dev = (row.frequency - pred).abs();
        out.push(Check::new(
            format!("pattern {}", row.label),
            format!("{pred:.4} +- 0.01"),
            format!("{:.4}", row.frequency),
            dev <= 0.01,
        ));
    }
    out.push(Check::eq("cross-check failures", Vec::<u64>::new(), c.cross_check_failures.clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_passes() {
        assert!(run_suite(Suite::Table1, &VerifyOptions::default()).unwrap().passed());
    }

    #[test]
    fn examples_pass() {
        let r = run_suite(Suite::Examples, &VerifyOptions::default()).unwrap();
        let failed: Vec<&Check> = r.checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
