//! Trace classes of Macbeath maps of type {m, n} over F_p and their
//! inner/outer regularity.

pub mod oracle;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::factor::{reduce_and_factor_seeded, DEFAULT_SEED};
use crate::gf::{legendre, FieldCtx, FieldCtxExt, FieldElem, FpPoly};
use crate::intpoly::{divisor_product_at_one, omega_squared, psi_at_one, s_polynomial};
use crate::numkit;

pub use oracle::{matrix_oracle, route_equivalence, Mat2, OracleOutcome, RouteCheck};

/// Field of definition of the maps for a given (m, n, p).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldData {
    pub n_n: u64,
    pub n_m: u64,
    pub d: u32,
    #[serde(with = "crate::decimal")]
    pub q: BigUint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regularity {
    Inner,
    Outer,
}

impl Regularity {
    pub fn from_chi(chi: i8) -> Self {
        if chi == 1 {
            Regularity::Inner
        } else {
            Regularity::Outer
        }
    }
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularity::Inner => "inner",
            Regularity::Outer => "outer",
        })
    }
}

/// One isomorphism class of maps: an irreducible factor of f₁ mod p together
/// with the Hall parameter s it defines. Field elements are stored as
/// ascending residue coefficients modulo `factor`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceClass {
    pub factor: Vec<u64>,
    pub e: u32,
    pub s: Vec<u64>,
    pub chi: i8,
    pub regularity: Regularity,
    /// A square root of `4 − ω² − s` in the same field, when one exists.
    pub t: Option<Vec<u64>>,
}

impl TraceClass {
    pub fn factor_poly(&self, p: u64) -> FpPoly {
        FpPoly::new(p, self.factor.clone())
    }

    /// F_p[x]/(factor) inside F_{p^d}.
    pub fn field(&self, p: u64, d: u32) -> Result<Arc<FieldCtx>> {
        FieldCtx::from_factor(self.factor_poly(p), d)
    }

    pub fn s_elem(&self, ctx: &Arc<FieldCtx>) -> FieldElem {
        ctx.elem(FpPoly::new(ctx.p(), self.s.clone()))
    }

    /// The s-value as a residue in [0, p), for classes of degree one.
    pub fn s_value(&self) -> Option<u64> {
        (self.e == 1).then(|| self.s.first().copied().unwrap_or(0))
    }

    pub fn describe_s(&self, p: u64) -> String {
        match self.s_value() {
            Some(v) => FpPoly::centered(v, p).to_string(),
            None => format!("root of {}", self.factor_poly(p)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(v: usize) -> Self {
        if v % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Parity of the number of outer classes against the prediction from the
/// character of Ψ_n(1) (m = 3, d odd).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityVerdict {
    pub applicable: bool,
    #[serde(with = "crate::decimal")]
    pub psi_at_one: BigInt,
    pub predicted: Option<Parity>,
    pub observed: Parity,
    pub consistent: bool,
    /// Agreement of the character computed from the divisor-product table,
    /// checked when q = p and every table entry is a unit mod p.
    pub shortcut_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    pub m: u64,
    pub n: u64,
    pub p: u64,
    #[serde(flatten)]
    pub field: FieldData,
    #[serde(with = "crate::decimal")]
    pub genus: BigInt,
    pub classes: Vec<TraceClass>,
    pub k: usize,
    pub l: usize,
    /// φ(n)/(2d)
    pub expected_classes: u64,
    /// Set when the factor count differs from `expected_classes`.
    pub count_flag: bool,
    pub parity: Option<ParityVerdict>,
}

impl CensusRecord {
    pub fn s_values(&self) -> Vec<u64> {
        self.classes.iter().filter_map(TraceClass::s_value).collect()
    }

    pub fn factor_degree(&self) -> u32 {
        self.classes.first().map_or(0, |c| c.e)
    }
}

fn check_type(m: u64, n: u64, p: u64) -> Result<i64> {
    let w2 = omega_squared(m)?;
    if m * n <= 2 * (m + n) {
        return Err(Error::NotHyperbolic { m, n });
    }
    if !numkit::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    Ok(w2)
}

pub fn field_data(m: u64, n: u64, p: u64) -> Result<FieldData> {
    check_type(m, n, p)?;
    let n_n = if n % 2 == 1 { n } else { 2 * n };
    let n_m = match m {
        3 => 3,
        4 => 8,
        _ => 12,
    };
    let inadmissible = |reason: &str| Error::Inadmissible { m, n, p, reason: reason.into() };
    match (m, p) {
        (4, 2) => return Err(inadmissible("order-4 elements need odd characteristic")),
        (6, 2) | (6, 3) => return Err(inadmissible("order-6 elements need p > 3")),
        _ => {}
    }
    if n_n % p == 0 {
        return Err(inadmissible(&format!("p divides {n_n}")));
    }
    let mut d = numkit::mult_order_signed(p, n_n)?;
    if !(m == 3 && p == 3) {
        d = d.lcm(&numkit::mult_order_signed(p, n_m)?);
    }
    let d = d as u32;
    Ok(FieldData { n_n, n_m, d, q: numkit::pow_big(p, d) })
}

pub fn map_census(m: u64, n: u64, p: u64) -> Result<CensusRecord> {
    map_census_seeded(m, n, p, DEFAULT_SEED)
}

/// As [`map_census`] with an explicit seed for the randomized factorization.
/// The record does not depend on the seed.
pub fn map_census_seeded(m: u64, n: u64, p: u64, seed: u64) -> Result<CensusRecord> {
    let w2 = check_type(m, n, p)?;
    let f1 = s_polynomial(m, n)?;
    let fl = reduce_and_factor_seeded(&f1, p, seed)?;
    if !fl.squarefree {
        return Err(Error::BadReduction { what: format!("f1 for type {{{m},{n}}}"), p });
    }
    let field = field_data(m, n, p)?;
    let genus = numkit::genus(m, n, &field.q)?;

    let mut classes = Vec::with_capacity(fl.factors.len());
    for (h, _) in &fl.factors {
        let ctx = FieldCtx::from_factor(h.clone(), field.d)?;
        let s = ctx.generator();
        if s.is_zero() {
            return Err(Error::DegenerateTrace { p });
        }
        let chi = s.chi();
        let t = (&ctx.from_i64(4 - w2) - &s).sqrt_opt().map(|r| r.to_coeffs());
        classes.push(TraceClass {
            factor: h.coeffs().to_vec(),
            e: h.deg() as u32,
            s: s.to_coeffs(),
            chi,
            regularity: Regularity::from_chi(chi),
            t,
        });
    }
    classes.sort_by(|a, b| {
        a.e.cmp(&b.e).then_with(|| match (a.s_value(), b.s_value()) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => Ordering::Equal,
        })
    });
    if classes.windows(2).any(|w| w[0].e != w[1].e) {
        return Err(Error::Inconsistent(format!(
            "factors of f1 mod {p} have unequal degrees for type {{{m},{n}}}"
        )));
    }

    let k = classes.iter().filter(|c| c.regularity == Regularity::Inner).count();
    let l = classes.len() - k;
    let expected_classes = numkit::totient(n) / (2 * field.d as u64);
    let mut record = CensusRecord {
        m,
        n,
        p,
        count_flag: classes.len() as u64 != expected_classes,
        field,
        genus,
        classes,
        k,
        l,
        expected_classes,
        parity: None,
    };
    record.parity = parity_verdict(&record)?;
    if let Some(v) = &record.parity {
        if v.applicable && !v.consistent {
            return Err(Error::ParityViolation { m, n, p });
        }
        if v.shortcut_agrees == Some(false) {
            return Err(Error::Inconsistent(format!(
                "character of Psi_{n}(1) mod {p} disagrees with the divisor-product table"
            )));
        }
    }
    Ok(record)
}

/// Parity check for m = 3; `None` for other m.
pub fn parity_verdict(record: &CensusRecord) -> Result<Option<ParityVerdict>> {
    if record.m != 3 {
        return Ok(None);
    }
    let p = record.p;
    let value = psi_at_one(record.n)?.direct;
    let observed = Parity::of(record.l);
    let applicable = record.field.d % 2 == 1;
    // with d odd, χ_q restricted to F_p is the Legendre symbol
    let chi = legendre(crate::gf::poly::reduce_bigint(&value, p), p);
    let predicted = match chi {
        1 => Some(Parity::Even),
        -1 => Some(Parity::Odd),
        _ => None,
    };
    let shortcut_agrees = if applicable && record.field.d == 1 && p > 2 {
        divisor_table_chi(record.n, p).map(|c| c == chi)
    } else {
        None
    };
    Ok(Some(ParityVerdict {
        applicable: applicable && predicted.is_some(),
        psi_at_one: value,
        predicted,
        observed,
        consistent: !applicable || predicted.is_none() || predicted == Some(observed),
        shortcut_agrees,
    }))
}

/// `Π χ(G(e))` over divisors e of n with μ(n/e) ≠ 0.
fn divisor_table_chi(n: u64, p: u64) -> Option<i8> {
    if n == 6 {
        return None;
    }
    let mut acc = 1i8;
    for e in numkit::divisors(n) {
        if numkit::mobius(n / e) == 0 {
            continue;
        }
        let g = divisor_product_at_one(e);
        let c = legendre(crate::gf::poly::reduce_bigint(g.numer(), p), p);
        if c == 0 {
            return None;
        }
        acc *= c;
    }
    Some(acc)
}

/// `−D = 4 + abc − a² − b² − c²` for a trace triple, with its character in
/// the ambient field.
pub fn cps_discriminant(a: &FieldElem, b: &FieldElem, c: &FieldElem) -> Result<(FieldElem, i8)> {
    if !a.same_field(b) || !a.same_field(c) {
        return Err(Error::MixedContexts);
    }
    let ctx = a.ctx();
    let v = &(&(&ctx.from_u64(4) + &(&(a * b) * c)) - &a.square()) - &(&b.square() + &c.square());
    let chi = v.chi();
    Ok((v, chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed(v: &[i64], p: u64) -> Vec<u64> {
        let mut out: Vec<u64> = v.iter().map(|x| x.rem_euclid(p as i64) as u64).collect();
        out.sort_unstable();
        out
    }

    fn sorted_s(r: &CensusRecord) -> Vec<u64> {
        let mut s = r.s_values();
        s.sort_unstable();
        s
    }

    #[test]
    fn field_data_examples() {
        let f = field_data(3, 7, 13).unwrap();
        assert_eq!((f.d, f.q.clone()), (1, 13u32.into()));
        assert_eq!(field_data(3, 7, 2).unwrap().q, 8u32.into());
        assert_eq!(field_data(4, 5, 7).unwrap().q, 49u32.into());
        assert_eq!(field_data(3, 14, 3).unwrap().q, 27u32.into());
        assert!(matches!(field_data(4, 5, 2), Err(Error::Inadmissible { .. })));
        assert!(matches!(field_data(6, 4, 3), Err(Error::Inadmissible { .. })));
        assert!(matches!(field_data(3, 7, 7), Err(Error::Inadmissible { .. })));
        assert!(matches!(field_data(3, 6, 5), Err(Error::NotHyperbolic { .. })));
        assert!(matches!(field_data(5, 7, 11), Err(Error::UnsupportedM(5))));
    }

    #[test]
    fn heptagon_13() {
        let r = map_census(3, 7, 13).unwrap();
        assert_eq!(r.classes.len(), 3);
        assert_eq!(sorted_s(&r), vec![4, 6, 7]);
        assert_eq!(r.k, 1);
        let inner: Vec<u64> = r
            .classes
            .iter()
            .filter(|c| c.regularity == Regularity::Inner)
            .filter_map(TraceClass::s_value)
            .collect();
        assert_eq!(inner, vec![4]);
        assert!(!r.count_flag);
    }

    #[test]
    fn heptagon_43() {
        let r = map_census(3, 7, 43).unwrap();
        assert_eq!(sorted_s(&r), vec![25, 29, 36]);
        assert_eq!(r.k, 2);
        let outer: Vec<u64> = r
            .classes
            .iter()
            .filter(|c| c.regularity == Regularity::Outer)
            .filter_map(TraceClass::s_value)
            .collect();
        assert_eq!(outer, vec![29]);
    }

    #[test]
    fn more_examples() {
        let r = map_census(3, 9, 17).unwrap();
        assert_eq!(sorted_s(&r), vec![4, 5, 11]);
        assert_eq!(r.k, 1);
        let r = map_census(3, 13, 3).unwrap();
        assert_eq!((r.classes.len(), r.k, r.field.d), (2, 0, 3));
        let r = map_census(4, 5, 41).unwrap();
        assert_eq!(sorted_s(&r), signed(&[7, -6], 41));
        assert_eq!(r.k, 0);
        let r = map_census(3, 19, 37).unwrap();
        assert_eq!((r.classes.len(), r.k, r.l), (9, 5, 4));
        let r = map_census(3, 8, 31).unwrap();
        assert_eq!(sorted_s(&r), signed(&[9, -7], 31));
        assert_eq!(r.k, 1);
    }

    #[test]
    fn bad_reduction() {
        assert!(matches!(map_census(3, 7, 7), Err(Error::BadReduction { p: 7, .. })));
    }

    #[test]
    fn classes_sorted_by_root() {
        let r = map_census(3, 7, 43).unwrap();
        let s = r.s_values();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn characteristic_two_is_all_inner() {
        for n in [7u64, 9, 11, 13, 15, 17] {
            let r = map_census(3, n, 2).unwrap();
            assert_eq!(r.l, 0, "n={n}");
        }
    }

    #[test]
    fn parity_examples() {
        let v = map_census(3, 7, 13).unwrap().parity.unwrap();
        assert_eq!(v.psi_at_one, BigInt::from(-1));
        assert_eq!((v.predicted, v.observed), (Some(Parity::Even), Parity::Even));
        let r = map_census(3, 12, 23).unwrap();
        let v = r.parity.clone().unwrap();
        assert_eq!(v.predicted, Some(Parity::Odd));
        assert_eq!(r.l, 1);
        let v = map_census(3, 9, 19).unwrap().parity.unwrap();
        assert_eq!(v.predicted, Some(Parity::Odd));
        assert_eq!(v.observed, Parity::Odd);
        assert!(map_census(4, 5, 31).unwrap().parity.is_none());
    }

    #[test]
    fn cps_examples() {
        let ctx = FieldCtx::prime(13, 1).unwrap();
        let t = ctx.from_u64(5);
        let zero = ctx.zero();
        let (v, _) = cps_discriminant(&t, &zero, &ctx.one()).unwrap();
        assert_eq!(v, &ctx.from_u64(3) - &t.square());
        let (v, chi) = cps_discriminant(&zero, &zero, &zero).unwrap();
        assert_eq!((v, chi), (ctx.from_u64(4), 1));
        let other = FieldCtx::prime(17, 1).unwrap();
        assert_eq!(
            cps_discriminant(&t, &zero, &other.one()).unwrap_err(),
            Error::MixedContexts
        );
    }

    #[test]
    fn class_s_matches_cps_of_trace() {
        for (m, n, p) in [(3u64, 7u64, 43u64), (3, 9, 19), (4, 5, 31), (3, 13, 5)] {
            let r = map_census(m, n, p).unwrap();
            let w = omega_squared(m).unwrap();
            for c in &r.classes {
                let ctx = c.field(p, r.field.d).unwrap();
                let Some(t) = &c.t else { continue };
                let t = ctx.elem(FpPoly::new(p, t.clone()));
                let (v, _) = match ctx.from_i64(w).sqrt_opt() {
                    Some(omega) => cps_discriminant(&t, &ctx.zero(), &omega).unwrap(),
                    None => continue,
                };
                assert_eq!(v, c.s_elem(&ctx));
            }
        }
    }

    #[test]
    fn heptagon_k_parity_follows_p_mod_4() {
        for p in numkit::primes_up_to(3000) {
            if p % 7 != 1 && p % 7 != 6 {
                continue;
            }
            let r = map_census(3, 7, p).unwrap();
            assert_eq!(r.k % 2 == 1, p % 4 == 1, "p={p}");
        }
    }

    #[test]
    fn heptagon_single_class_primes() {
        for p in numkit::primes_up_to(3000) {
            if p == 2 || p == 7 || matches!(p % 7, 1 | 6) {
                continue;
            }
            let r = map_census(3, 7, p).unwrap();
            assert_eq!(r.classes.len(), 1);
            assert_eq!(r.k == 1, p % 4 == 1, "p={p}");
        }
    }

    #[test]
    fn fuzz_equal_degrees_and_parity() {
        for n in 7..=20u64 {
            for p in numkit::primes_up_to(2000) {
                match map_census(3, n, p) {
                    Ok(r) => {
                        let e = r.factor_degree() as u64;
                        assert_eq!(r.classes.len() as u64 * e, numkit::totient(n) / 2);
                        assert!(r.genus > BigInt::from(1));
                    }
                    Err(e) => assert!(e.is_domain(), "({n}, {p}): {e}"),
                }
            }
        }
    }

    #[test]
    fn record_json_round_trip() {
        let r = map_census(3, 13, 5).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"q\":\"25\""));
        assert!(json.contains("\"genus\":\"351\""));
        let back: CensusRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
