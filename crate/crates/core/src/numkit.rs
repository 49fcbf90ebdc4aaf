//! Integer and prime utilities: primality, primes in residue classes, signed
//! multiplicative orders, Möbius/φ/divisors, and exact group orders and genera.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

// These twelve bases make Miller-Rabin deterministic below 3.3 * 10^24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for the full 64-bit range.
pub fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    for &b in &MR_BASES {
        if v == b {
            return true;
        }
        if v % b == 0 {
            return false;
        }
    }
    let mut d = v - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, v);
        if x == 1 || x == v - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, v);
            if x == v - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const SEGMENT: u64 = 1 << 16;

/// Unbounded, incremental segmented sieve of Eratosthenes. Serves both the
/// "first K" and the "all primes up to a bound" modes of [`PrimeStream`].
#[derive(Debug, Clone)]
pub struct Primes {
    base: Vec<u64>,
    base_limit: u64,
    lo: u64,
    buf: Vec<u64>,
    pos: usize,
}

impl Primes {
    pub fn new() -> Self {
        Primes { base: Vec::new(), base_limit: 1, lo: 0, buf: Vec::new(), pos: 0 }
    }

    fn fill(&mut self) {
        let hi = self.lo + SEGMENT;
        let root = hi.sqrt() + 1;
        if root > self.base_limit {
            self.base_limit = (root * 2).max(1024);
            self.base = simple_sieve(self.base_limit);
        }
        let mut composite = vec![false; SEGMENT as usize];
        for &q in &self.base {
            if q * q >= hi {
                break;
            }
            let mut start = (self.lo.div_ceil(q) * q).max(q * q);
            while start < hi {
                composite[(start - self.lo) as usize] = true;
                start += q;
            }
        }
        self.buf.clear();
        self.pos = 0;
        for (i, &c) in composite.iter().enumerate() {
            let v = self.lo + i as u64;
            if !c && v >= 2 {
                self.buf.push(v);
            }
        }
        self.lo = hi;
    }
}

impl Default for Primes {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for Primes {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        while self.pos >= self.buf.len() {
            self.fill();
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        Some(v)
    }
}

/// How many primes a [`PrimeStream`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeLimit {
    First(usize),
    UpTo(u64),
}

/// Primes restricted to a set of residue classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeStream {
    pub modulus: u64,
    pub residues: BTreeSet<u64>,
    pub limit: PrimeLimit,
}

impl PrimeStream {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>, limit: PrimeLimit) -> Self {
        PrimeStream { modulus, residues: residues.into_iter().collect(), limit }
    }

    /// Primes congruent to ±1 modulo `modulus`.
    pub fn plus_minus_one(modulus: u64, limit: PrimeLimit) -> Self {
        let residues = if modulus <= 2 { vec![1 % modulus.max(1)] } else { vec![1, modulus - 1] };
        Self::new(modulus, residues, limit)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if self.residues.is_empty() {
            return Err(Error::InvalidArgument("empty residue set".into()));
        }
        for &r in &self.residues {
            if r >= self.modulus {
                return Err(Error::InvalidArgument(format!(
                    "residue {r} not reduced mod {}",
                    self.modulus
                )));
            }
            if gcd(r, self.modulus) != 1 {
                return Err(Error::InvalidArgument(format!(
                    "residue {r} not coprime to {}",
                    self.modulus
                )));
            }
        }
        Ok(())
    }

    pub fn accepts(&self, p: u64) -> bool {
        self.residues.contains(&(p % self.modulus))
    }
}

/// Materializes a [`PrimeStream`] as an ascending list.
pub fn primes_in_classes(stream: &PrimeStream) -> Result<Vec<u64>> {
    stream.validate()?;
    let filtered = Primes::new().filter(|&p| stream.accepts(p));
    Ok(match stream.limit {
        PrimeLimit::First(k) => filtered.take(k).collect(),
        PrimeLimit::UpTo(bound) => filtered.take_while(|&p| p <= bound).collect(),
    })
}

/// All primes up to `bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    Primes::new().take_while(|&p| p <= bound).collect()
}

/// Multiplicative order of `a` modulo `modulus`.
pub fn mult_order(a: u64, modulus: u64) -> Result<u64> {
    if gcd(a, modulus) != 1 {
        return Err(Error::NotCoprime { p: a, modulus });
    }
    if modulus == 1 {
        return Ok(1);
    }
    let mut x = a % modulus;
    let mut e = 1;
    while x != 1 {
        x = mul_mod(x, a, modulus);
        e += 1;
    }
    Ok(e)
}

/// Least `e >= 1` with `p^e ≡ ±1 (mod modulus)`, i.e. the order of `p` in
/// the quotient of the unit group by `{±1}`.
pub fn mult_order_signed(p: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    if gcd(p, modulus) != 1 {
        return Err(Error::NotCoprime { p, modulus });
    }
    if modulus <= 2 {
        return Ok(1);
    }
    let mut x = p % modulus;
    let mut e = 1;
    while x != 1 && x != modulus - 1 {
        x = mul_mod(x, p, modulus);
        e += 1;
    }
    Ok(e)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            small.push(i);
            if i * i != n {
                large.push(n / i);
            }
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            let mut k = 0;
            while n % f == 0 {
                n /= f;
                k += 1;
            }
            out.push((f, k));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mobius(n: u64) -> i8 {
    let fs = factorize(n);
    if fs.iter().any(|&(_, k)| k > 1) {
        0
    } else if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn totient(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithTables {
    pub n: u64,
    pub divisors: Vec<u64>,
    /// `(e, μ(n/e))` for each divisor `e`, the exponents used in Möbius inversion.
    pub mobius_cofactor: Vec<(u64, i8)>,
    pub totient: u64,
}

pub fn arith_tables(n: u64) -> Result<ArithTables> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let divs = divisors(n);
    let mobius_cofactor = divs.iter().map(|&e| (e, mobius(n / e))).collect();
    Ok(ArithTables { n, divisors: divs, mobius_cofactor, totient: totient(n) })
}

/// Decomposes `q = p^d`; fails when `q` is not a prime power with `p < 2^64`.
pub fn prime_power(q: &BigUint) -> Result<(u64, u32)> {
    if q < &BigUint::from(2u32) {
        return Err(Error::NotPrimePower(q.to_string()));
    }
    let bits = q.bits() as u32;
    for d in 1..=bits {
        let root = q.nth_root(d);
        if root < BigUint::from(2u32) {
            break;
        }
        if num_traits::pow(root.clone(), d as usize) == *q {
            if let Some(r) = root.to_u64() {
                if is_prime(r) {
                    return Ok((r, d));
                }
            }
        }
    }
    Err(Error::NotPrimePower(q.to_string()))
}

pub fn pow_big(p: u64, d: u32) -> BigUint {
    num_traits::pow(BigUint::from(p), d as usize)
}

/// `|PSL(2, q)| = q(q²−1)/gcd(2, q−1)`.
pub fn psl2_order(q: &BigUint) -> Result<BigUint> {
    let (p, _) = prime_power(q)?;
    let full = q * (q * q - BigUint::one());
    Ok(if p == 2 { full } else { full / 2u32 })
}

/// Genus of an orientably regular map of type {m,n} with rotation group
/// PSL(2,q): `g = 1 + |G|(mn − 2m − 2n) / 4mn`.
pub fn genus(m: u64, n: u64, q: &BigUint) -> Result<BigInt> {
    let excess = (m * n) as i128 - 2 * m as i128 - 2 * n as i128;
    if m == 0 || n == 0 || excess <= 0 {
        return Err(Error::NotHyperbolic { m, n });
    }
    let order = BigInt::from(psl2_order(q)?);
    let num = order * BigInt::from(excess);
    let den = BigInt::from(4 * m * n);
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::NonIntegralGenus { m, n, q: q.to_string() });
    }
    Ok(quot + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn primality_examples() {
        assert!(is_prime(7));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(is_prime(9871));
        assert!(!is_prime(138));
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn sieve_matches_trial_division() {
        let sieved = primes_up_to(200_000);
        let naive: Vec<u64> = (0..=200_000).filter(|&v| is_prime(v)).collect();
        assert_eq!(sieved, naive);
    }

    #[test]
    fn residue_class_streams() {
        let s = PrimeStream::new(7, [1, 6], PrimeLimit::First(4));
        assert_eq!(primes_in_classes(&s).unwrap(), vec![13, 29, 41, 43]);
        let s = PrimeStream::new(4, [1], PrimeLimit::First(3));
        assert_eq!(primes_in_classes(&s).unwrap(), vec![5, 13, 17]);
        let s = PrimeStream::new(7, [1, 6], PrimeLimit::First(400));
        assert_eq!(*primes_in_classes(&s).unwrap().last().unwrap(), 9871);
    }

    #[test]
    fn residue_stream_errors() {
        let empty = PrimeStream::new(7, [], PrimeLimit::First(3));
        assert!(primes_in_classes(&empty).is_err());
        let shared = PrimeStream::new(8, [2], PrimeLimit::First(3));
        assert!(primes_in_classes(&shared).is_err());
    }

    #[test]
    fn residue_classes_partition_primes() {
        let bound = 50_000;
        let a = primes_in_classes(&PrimeStream::new(7, [1, 6], PrimeLimit::UpTo(bound))).unwrap();
        let b = primes_in_classes(&PrimeStream::new(7, [2, 3, 4, 5], PrimeLimit::UpTo(bound)))
            .unwrap();
        let mut merged: Vec<u64> = a.iter().chain(b.iter()).copied().collect();
        merged.sort_unstable();
        let all: Vec<u64> = primes_up_to(bound).into_iter().filter(|&p| p != 7).collect();
        assert_eq!(merged, all);
    }

    #[test]
    fn signed_orders() {
        assert_eq!(mult_order_signed(2, 7).unwrap(), 3);
        assert_eq!(mult_order_signed(13, 7).unwrap(), 1);
        assert_eq!(mult_order_signed(2, 15).unwrap(), 4);
        assert!(mult_order_signed(7, 14).is_err());
    }

    #[test]
    fn arithmetic_tables() {
        let t = arith_tables(9).unwrap();
        assert_eq!(t.divisors, vec![1, 3, 9]);
        assert_eq!(t.mobius_cofactor, vec![(1, 0), (3, -1), (9, 1)]);
        assert_eq!(t.totient, 6);
        assert_eq!(totient(7), 6);
        assert_eq!(mobius(7), -1);
        assert_eq!(totient(12), 4);
        assert_eq!(mobius(1), 1);
        assert!(arith_tables(0).is_err());
    }

    #[test]
    fn group_orders() {
        assert_eq!(psl2_order(&7u32.into()).unwrap(), 168u32.into());
        assert_eq!(psl2_order(&8u32.into()).unwrap(), 504u32.into());
        assert_eq!(psl2_order(&13u32.into()).unwrap(), 1092u32.into());
        assert!(psl2_order(&12u32.into()).is_err());
        assert_eq!(prime_power(&pow_big(19, 2)).unwrap(), (19, 2));
    }

    #[test]
    fn genus_examples() {
        let g = |m, n, q: u64| genus(m, n, &BigUint::from(q)).unwrap();
        assert_eq!(g(3, 7, 7), 3.into());
        assert_eq!(g(3, 9, 19), 96.into());
        assert_eq!(g(4, 5, 31), 373.into());
        assert_eq!(g(3, 13, 25), 351.into());
        assert!(matches!(genus(3, 6, &BigUint::from(7u32)), Err(Error::NotHyperbolic { .. })));
        assert!(matches!(
            genus(3, 7, &BigUint::from(11u32)),
            Err(Error::NonIntegralGenus { .. })
        ));
    }

    proptest! {
        #[test]
        fn signed_order_divides_order(p in 2u64..5000, n in 3u64..200) {
            prop_assume!(gcd(p, n) == 1);
            let full = mult_order(p, n).unwrap();
            let signed = mult_order_signed(p, n).unwrap();
            prop_assert_eq!(full % signed, 0);
            prop_assert!(full == signed || full == 2 * signed);
        }

        #[test]
        fn hurwitz_bound_is_attained(p in prop::sample::select(primes_up_to(2000))) {
            prop_assume!(p != 7);
            let d = mult_order_signed(p, 7).unwrap();
            let q = pow_big(p, d as u32);
            let g = genus(3, 7, &q).unwrap();
            let order = BigInt::from(psl2_order(&q).unwrap());
            prop_assert_eq!(order, (g - 1) * 84);
        }
    }
}
