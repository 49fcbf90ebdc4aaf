use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{galois_model, max_abs_deviation, partition_label, rational_to_f64};
use super::{structure_cycle_distribution, GaloisStructure, Partition};
use crate::census::map_census_seeded;
use crate::error::Result;
use crate::gf::factor::{reduce_and_factor_seeded, DEFAULT_SEED};
use crate::gf::legendre;
use crate::intpoly::{s_polynomial, Rational};
use crate::numkit;
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub pattern: Partition,
    pub label: String,
    pub count: u64,
    pub frequency: f64,
    #[serde(with = "crate::decimal::opt")]
    pub predicted: Option<Rational>,
}

/// Degree patterns of f₂ = f₁(x²) mod p over the good primes up to a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternCensus {
    pub m: u64,
    pub n: u64,
    pub bound: u64,
    pub sampled: u64,
    /// Primes where f₂ is not squarefree or the maps are not defined.
    pub bad_primes: Vec<u64>,
    pub rows: Vec<PatternRow>,
    pub structure: Option<GaloisStructure>,
    pub max_abs_deviation: Option<f64>,
    /// Primes where the linear-factor count of f₂ disagrees with the census.
    pub cross_check_failures: Vec<u64>,
    pub workers: usize,
}

enum Sample {
    Good { pattern: Partition, consistent: bool },
    Bad,
}

fn sample(m: u64, n: u64, f2: &crate::intpoly::IntPoly, p: u64, seed: u64) -> Result<Sample> {
    let fl = reduce_and_factor_seeded(f2, p, seed)?;
    if !fl.squarefree {
        return Ok(Sample::Bad);
    }
    let record = match map_census_seeded(m, n, p, seed) {
        Ok(r) => r,
        Err(e) if e.is_domain() => return Ok(Sample::Bad),
        Err(e) => return Err(e),
    };
    let pattern = fl.degree_pattern();
    let linear = pattern.iter().filter(|&&d| d == 1).count();
    // roots of f₂ in F_p are the square roots of the s-values that are
    // squares in F_p itself, whatever the ambient field of the maps
    let local_squares = record
        .classes
        .iter()
        .filter_map(|c| c.s_value())
        .filter(|&s| legendre(s, p) == 1)
        .count();
    let consistent =
        linear == 2 * local_squares && (record.field.d != 1 || linear == 2 * record.k);
    Ok(Sample::Good { pattern, consistent })
}

/// Tallies degree patterns of f₂ mod p for every good prime up to `bound`
/// and compares them with the cycle-type distribution of the tabled (or
/// overridden) Galois group.
pub fn pattern_census(
    m: u64,
    n: u64,
    bound: u64,
    exec: Exec,
    galois_override: Option<GaloisStructure>,
) -> Result<PatternCensus> {
    pattern_census_seeded(m, n, bound, exec, galois_override, DEFAULT_SEED)
}

pub fn pattern_census_seeded(
    m: u64,
    n: u64,
    bound: u64,
    exec: Exec,
    galois_override: Option<GaloisStructure>,
    seed: u64,
) -> Result<PatternCensus> {
    let f2 = s_polynomial(m, n)?.doubled();
    let primes = numkit::primes_up_to(bound);
    let samples = exec.map(&primes, |&p| sample(m, n, &f2, p, seed))?;

    let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
    let mut bad_primes = Vec::new();
    let mut cross_check_failures = Vec::new();
    for (p, s) in primes.iter().zip(samples) {
        match s? {
            Sample::Bad => bad_primes.push(*p),
            Sample::Good { pattern, consistent } => {
                if !consistent {
                    cross_check_failures.push(*p);
                }
                *counts.entry(pattern).or_default() += 1;
            }
        }
    }
    let sampled: u64 = counts.values().sum();

    let structure = galois_model(m, n, galois_override).ok().map(|g| g.structure);
    let predicted = structure.and_then(|s| structure_cycle_distribution(n, s).ok());
    let mut keys: Vec<Partition> = counts.keys().cloned().collect();
    if let Some(pred) = &predicted {
        keys.extend(pred.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let rows: Vec<PatternRow> = keys
        .into_iter()
        .map(|pattern| {
            let count = counts.get(&pattern).copied().unwrap_or(0);
            PatternRow {
                label: partition_label(&pattern),
                count,
                frequency: if sampled == 0 { 0.0 } else { count as f64 / sampled as f64 },
                predicted: predicted.as_ref().map(|d| d.get(&pattern).cloned().unwrap_or_else(num_traits::Zero::zero)),
                pattern,
            }
        })
        .collect();
    let max_abs_deviation = predicted.as_ref().map(|_| {
        let emp: Vec<f64> = rows.iter().map(|r| r.frequency).collect();
        let pred: Vec<f64> =
            rows.iter().map(|r| r.predicted.as_ref().map_or(0.0, rational_to_f64)).collect();
        max_abs_deviation(&emp, &pred)
    });
    Ok(PatternCensus {
        m,
        n,
        bound,
        sampled,
        bad_primes,
        rows,
        structure: predicted.as_ref().and(structure),
        max_abs_deviation,
        cross_check_failures,
        workers: exec.thread_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_prime_pattern() {
        let c = pattern_census(3, 7, 13, Exec::Sequential, None).unwrap();
        assert_eq!(c.bad_primes, vec![2, 7]);
        let f2 = s_polynomial(3, 7).unwrap().doubled();
        match sample(3, 7, &f2, 13, DEFAULT_SEED).unwrap() {
            Sample::Good { pattern, consistent } => {
                assert_eq!(pattern, vec![1, 1, 2, 2]);
                assert!(consistent);
            }
            Sample::Bad => panic!("13 is good"),
        }
    }

    #[test]
    fn heptagon_small_census() {
        let c = pattern_census(3, 7, 50_000, Exec::default(), None).unwrap();
        assert!(c.cross_check_failures.is_empty());
        assert_eq!(c.rows.len(), 6);
        assert!(c.max_abs_deviation.unwrap() < 0.02, "{:?}", c.max_abs_deviation);
        assert_eq!(c.sampled + c.bad_primes.len() as u64, numkit::primes_up_to(50_000).len() as u64);
    }

    #[test]
    fn cross_check_over_extension_primes() {
        for (m, n) in [(3u64, 8u64), (3, 9), (3, 13), (4, 5)] {
            let c = pattern_census(m, n, 3000, Exec::default(), None).unwrap();
            assert!(c.cross_check_failures.is_empty(), "({m},{n}): {:?}", c.cross_check_failures);
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = pattern_census(3, 9, 5000, Exec::Sequential, None).unwrap();
        let b = pattern_census(3, 9, 5000, Exec::Parallel(3), None).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.bad_primes, b.bad_primes);
    }
}
