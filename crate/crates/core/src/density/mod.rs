//! Distribution of primes over the sets Σ_k: sweeps, Galois-structure
//! predictions, and Frobenius degree-pattern statistics.

pub mod patterns;
pub mod sweep;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intpoly::{omega_squared, Rational};
use crate::numkit;

pub use patterns::{pattern_census, PatternCensus};
pub use sweep::{sweep, PrimeRow, SigmaTally, SkippedPrime, SweepOptions, SweepResult};

/// Largest r = φ(n)/2 for which the wreath product is enumerated.
pub const WREATH_RANK_BOUND: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GaloisStructure {
    /// The full wreath product C₂ ≀ (Z_n*/±1).
    FullWreath,
    /// Its subgroup with even sign vectors.
    EvenSubgroup,
    Unknown,
}

impl std::str::FromStr for GaloisStructure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" | "fullwreath" | "full-wreath" => Ok(GaloisStructure::FullWreath),
            "even" | "evensubgroup" | "even-subgroup" => Ok(GaloisStructure::EvenSubgroup),
            "unknown" => Ok(GaloisStructure::Unknown),
            _ => Err(Error::InvalidArgument(format!("unknown Galois structure {s:?}"))),
        }
    }
}

impl fmt::Display for GaloisStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GaloisStructure::FullWreath => "full-wreath",
            GaloisStructure::EvenSubgroup => "even-subgroup",
            GaloisStructure::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisModel {
    pub m: u64,
    pub n: u64,
    pub r: usize,
    pub structure: GaloisStructure,
    pub negative_roots: u64,
    pub overridden: bool,
}

/// Representatives j of the roots `2cos(2πj/N)` of Ψ_N modulo ±, with N = n
/// for odd n and 2n for even n.
fn root_indices(n: u64) -> (u64, Vec<u64>) {
    if n % 2 == 1 {
        (n, (1..=(n - 1) / 2).filter(|&j| numkit::gcd(j, n) == 1).collect())
    } else {
        (2 * n, (1..n.div_ceil(2)).filter(|&j| numkit::gcd(j, 2 * n) == 1).collect())
    }
}

/// Number of negative roots of f₁, from exact comparisons of angles: s < 0
/// iff `cos(4πj/N) > 1 − ω²/2`.
pub fn negative_root_count(m: u64, n: u64) -> Result<u64> {
    omega_squared(m)?;
    if m * n <= 2 * (m + n) {
        return Err(Error::NotHyperbolic { m, n });
    }
    // cos θ > 1 − ω²/2 iff θ lies within π·2/k of 0 (mod 2π)
    let k = match m {
        3 => 6,
        4 => 4,
        _ => 3,
    };
    let (big_n, js) = root_indices(n);
    Ok(js
        .into_iter()
        .filter(|&j| {
            let y = (2 * j) % big_n;
            k * y < big_n || k * y > (k - 1) * big_n
        })
        .count() as u64)
}

fn tabled_structure(m: u64, n: u64) -> GaloisStructure {
    match (m, n) {
        (3, 7..=12 | 14 | 16 | 18 | 19) => GaloisStructure::FullWreath,
        (3, 13 | 15) => GaloisStructure::EvenSubgroup,
        (4, 5) => GaloisStructure::FullWreath,
        _ => GaloisStructure::Unknown,
    }
}

pub fn galois_model(m: u64, n: u64, override_with: Option<GaloisStructure>) -> Result<GaloisModel> {
    if m != 3 && m != 4 {
        return Err(Error::UnsupportedM(m));
    }
    let negative_roots = negative_root_count(m, n)?;
    Ok(GaloisModel {
        m,
        n,
        r: (numkit::totient(n) / 2) as usize,
        structure: override_with.unwrap_or_else(|| tabled_structure(m, n)),
        negative_roots,
        overridden: override_with.is_some(),
    })
}

fn binomial(r: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (r - i) / (i + 1))
}

/// Relative densities of Σ_0, …, Σ_r among the primes ≡ ±1 mod N.
pub fn predicted_sigma_densities(model: &GaloisModel) -> Result<Vec<Rational>> {
    let r = model.r;
    let denom = |e: usize| BigInt::one() << e;
    match model.structure {
        GaloisStructure::FullWreath => {
            Ok((0..=r).map(|k| Rational::new(binomial(r, k), denom(r))).collect())
        }
        GaloisStructure::EvenSubgroup => Ok((0..=r)
            .map(|k| {
                if (r - k) % 2 == 0 {
                    Rational::new(binomial(r, k), denom(r - 1))
                } else {
                    Rational::zero()
                }
            })
            .collect()),
        GaloisStructure::Unknown => Err(Error::NoPrediction(model.n)),
    }
}

/// Cycle type as ascending part sizes.
pub type Partition = Vec<usize>;

/// Renders `[1, 1, 2, 2]` as `1^2 2^2`.
pub fn partition_label(p: &[usize]) -> String {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &x in p {
        match groups.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => groups.push((x, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(v, c)| if c == 1 { v.to_string() } else { format!("{v}^{c}") })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Cycle-type distribution of the wreath product C₂ ≀ (Z_n*/±1) on 2r
/// points, by enumerating every element.
pub fn wreath_cycle_distribution(n: u64) -> Result<BTreeMap<Partition, Rational>> {
    structure_cycle_distribution(n, GaloisStructure::FullWreath)
}

pub fn structure_cycle_distribution(
    n: u64,
    structure: GaloisStructure,
) -> Result<BTreeMap<Partition, Rational>> {
    let even_only = match structure {
        GaloisStructure::FullWreath => false,
        GaloisStructure::EvenSubgroup => true,
        GaloisStructure::Unknown => return Err(Error::NoPrediction(n)),
    };
    // the s-values lie in Q(cos 2π/n) whatever the parity of n, so the top
    // group is Z_n*/±1 acting on its own elements
    let (_, reps) = root_indices(n);
    let r = reps.len();
    if r > WREATH_RANK_BOUND {
        return Err(Error::BoundExceeded(format!(
            "wreath enumeration needs phi(n)/2 <= {WREATH_RANK_BOUND}, got {r}"
        )));
    }
    let canon = |x: u64| -> usize {
        let x = x % n;
        let x = x.min(n - x);
        reps.binary_search(&x).expect("unit representative")
    };
    // left multiplication by each group element, as a permutation of reps
    let actions: Vec<Vec<usize>> =
        reps.iter().map(|&a| reps.iter().map(|&b| canon(a * b)).collect()).collect();

    let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
    let mut total = 0u64;
    let mut seen = vec![false; 2 * r];
    for action in &actions {
        for v in 0u32..(1u32 << r) {
            if even_only && v.count_ones() % 2 == 1 {
                continue;
            }
            // point (i, ε) ↦ (a·i, ε ⊕ v_i)
            let image = |pt: usize| -> usize {
                let (i, eps) = (pt / 2, pt % 2);
                2 * action[i] + (eps ^ ((v >> i) & 1) as usize)
            };
            seen.iter_mut().for_each(|s| *s = false);
            let mut parts = Vec::new();
            for start in 0..2 * r {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut pt = start;
                while !seen[pt] {
                    seen[pt] = true;
                    pt = image(pt);
                    len += 1;
                }
                parts.push(len);
            }
            parts.sort_unstable();
            *counts.entry(parts).or_default() += 1;
            total += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(k, c)| (k, Rational::new(c.into(), total.into())))
        .collect())
}

/// Largest `|empirical − predicted|` over the entries of two equal-length
/// distributions.
pub fn max_abs_deviation(empirical: &[f64], predicted: &[f64]) -> f64 {
    empirical.iter().zip(predicted).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
