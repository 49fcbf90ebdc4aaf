//! Complete factorization over F_p: squarefree decomposition, distinct-degree
//! splitting, then Cantor–Zassenhaus (trace map in characteristic 2).

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::poly::FpPoly;
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::numkit;

/// Seed mixed into every equal-degree split unless a caller overrides it.
pub const DEFAULT_SEED: u64 = 0x4d61_6362_6574_6821;

/// Factorization of a monic reduction into pairwise distinct monic
/// irreducibles, sorted by degree then by coefficients from the top down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorList {
    pub p: u64,
    pub factors: Vec<(FpPoly, u32)>,
    pub squarefree: bool,
}

impl FactorList {
    /// Multiset of factor degrees, ascending, multiplicities expanded.
    pub fn degree_pattern(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(f, k)| std::iter::repeat_n(f.deg(), *k as usize))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn product(&self) -> FpPoly {
        self.factors.iter().fold(FpPoly::one(self.p), |acc, (f, k)| {
            (0..*k).fold(acc, |a, _| a.mul(f))
        })
    }

    /// Roots in F_p, ascending (from the linear factors).
    pub fn roots(&self) -> Vec<u64> {
        let mut r: Vec<u64> = self
            .factors
            .iter()
            .filter(|(f, _)| f.deg() == 1)
            .map(|(f, _)| (self.p - f.coeff(0)) % self.p)
            .collect();
        r.sort_unstable();
        r
    }

    pub fn to_serial(&self) -> SerialFactorList {
        SerialFactorList {
            p: self.p,
            factors: self.factors.iter().map(|(f, k)| (f.coeffs().to_vec(), *k)).collect(),
            squarefree: self.squarefree,
            degree_pattern: self.degree_pattern(),
        }
    }
}

/// Wire form: factors as ascending coefficient arrays with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerialFactorList {
    pub p: u64,
    pub factors: Vec<(Vec<u64>, u32)>,
    pub squarefree: bool,
    pub degree_pattern: Vec<usize>,
}

fn check_prime(p: u64) -> Result<()> {
    if !numkit::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p >= 1 << 32 {
        return Err(Error::InvalidArgument(format!("characteristic {p} exceeds 2^32")));
    }
    Ok(())
}

/// Reduces an integer polynomial mod p and factors it completely.
pub fn reduce_and_factor(f: &IntPoly, p: u64) -> Result<FactorList> {
    reduce_and_factor_seeded(f, p, DEFAULT_SEED)
}

pub fn reduce_and_factor_seeded(f: &IntPoly, p: u64, seed: u64) -> Result<FactorList> {
    check_prime(p)?;
    let g = FpPoly::from_int_poly(f, p);
    if g.degree() != f.degree() || g.is_zero() {
        return Err(Error::LeadingCoefficientVanishes(p));
    }
    Ok(factor_seeded(&g, seed))
}

pub fn degree_pattern(f: &IntPoly, p: u64) -> Result<Vec<usize>> {
    Ok(reduce_and_factor(f, p)?.degree_pattern())
}

/// Factors a nonzero polynomial over F_p (made monic first).
pub fn factor(f: &FpPoly) -> FactorList {
    factor_seeded(f, DEFAULT_SEED)
}

pub fn factor_seeded(f: &FpPoly, seed: u64) -> FactorList {
    assert!(!f.is_zero(), "cannot factor the zero polynomial");
    let p = f.p();
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(&monic, seed));
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (block, d) in distinct_degree(&part) {
            for irr in equal_degree(&block, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let squarefree = factors.iter().all(|(_, k)| *k == 1);
    let out = FactorList { p, factors, squarefree };
    #[cfg(any(test, debug_assertions))]
    assert_eq!(out.product(), monic, "factorization does not reconstruct its input");
    out
}

fn seed_for(f: &FpPoly, seed: u64) -> u64 {
    // splitmix64 fold over (seed, p, coefficients)
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    let mut h = mix(seed ^ f.p());
    for &c in f.coeffs() {
        h = mix(h ^ c);
    }
    h
}

/// `f = Π a_i^i` with each `a_i` squarefree and coprime; input must be monic.
pub fn squarefree_decomposition(f: &FpPoly) -> Vec<(FpPoly, u32)> {
    let p = f.p();
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let mut c = f.gcd(&f.derivative());
    let mut w = f.div(&c);
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div(&y);
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div(&w);
    }
    if !c.is_one() {
        let root = c.pth_root();
        for (g, k) in squarefree_decomposition(&root) {
            out.push((g, k * p as u32));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of irreducibles of
/// equal degree, returned as `(product, degree)`.
pub fn distinct_degree(f: &FpPoly) -> Vec<(FpPoly, usize)> {
    let p = f.p();
    let mut out = Vec::new();
    let mut g = f.clone();
    let x = FpPoly::x(p);
    let mut h = x.rem(&g);
    let mut i = 1;
    while g.deg() >= 2 * i {
        h = h.powmod(p, &g);
        let d = g.gcd(&h.sub(&x));
        if !d.is_one() {
            g = g.div(&d);
            h = h.rem(&g);
            out.push((d, i));
        }
        i += 1;
    }
    if g.deg() > 0 {
        let d = g.deg();
        out.push((g, d));
    }
    out
}

/// Splits a squarefree monic product of degree-`d` irreducibles.
pub fn equal_degree(f: &FpPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
    let n = f.deg();
    if n == 0 {
        return Vec::new();
    }
    if n == d {
        return vec![f.clone()];
    }
    let p = f.p();
    let half = (numkit::pow_big(p, d as u32) - 1u32) / 2u32;
    loop {
        let a = FpPoly::new(p, (0..n).map(|_| rng.gen_range(0..p)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if p == 2 { trace_map(&a, d, f) } else { split_probe(&a, &half, f) };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < n {
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&f.div(&g), d, rng));
            return out;
        }
    }
}

fn split_probe(a: &FpPoly, half: &BigUint, f: &FpPoly) -> FpPoly {
    a.powmod_big(half, f).sub(&FpPoly::one(f.p()))
}

fn trace_map(a: &FpPoly, d: usize, f: &FpPoly) -> FpPoly {
    let mut term = a.rem(f);
    let mut acc = term.clone();
    for _ in 1..d {
        term = term.mulmod(&term, f);
        acc = acc.add(&term);
    }
    acc
}

/// Rabin's test: g irreducible over F_p.
pub fn is_irreducible(g: &FpPoly) -> bool {
    let Some(n) = g.degree() else { return false };
    if n == 0 {
        return false;
    }
    let g = g.monic();
    let p = g.p();
    let x = FpPoly::x(p);
    let frob_iter = |k: usize| (0..k).fold(x.rem(&g), |h, _| h.powmod(p, &g));
    if frob_iter(n) != x.rem(&g) {
        return false;
    }
    numkit::factorize(n as u64)
        .into_iter()
        .all(|(r, _)| g.gcd(&frob_iter(n / r as usize).sub(&x)).is_one())
}
