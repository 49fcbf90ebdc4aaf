//! Exact integer polynomials: Vieta–Lucas polynomials, the minimal
//! polynomials Ψ_n of 2cos(2π/n), s-polynomials and discriminants.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numkit;

pub type Rational = BigRational;

/// Dense polynomial with arbitrary-precision integer coefficients, constant
/// term first. Trailing zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `x`
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_some_and(One::is_one)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + Rational::from_integer(c.clone()))
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    /// `self(inner(x))` by Horner's rule.
    pub fn compose(&self, inner: &IntPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(IntPoly::zero(), |acc, c| &(&acc * inner) + &IntPoly::constant(c.clone()))
    }

    /// Exact division; fails unless the remainder is zero and every quotient
    /// coefficient is integral.
    pub fn div_exact(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let dd = divisor
            .degree()
            .ok_or(Error::DivisionByZero("IntPoly::div_exact"))?;
        let lead = divisor.lead().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return if self.is_zero() {
                Ok(IntPoly::zero())
            } else {
                Err(Error::InexactDivision(format!("{self} / {divisor}")))
            };
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            let (q, r) = top.div_rem(lead);
            if !r.is_zero() {
                return Err(Error::InexactDivision(format!("{self} / {divisor}")));
            }
            if !q.is_zero() {
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[i + j] -= &q * c;
                }
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return Err(Error::InexactDivision(format!("{self} / {divisor}")));
        }
        Ok(IntPoly::new(quot))
    }

    /// `f(x²)`
    pub fn doubled(&self) -> IntPoly {
        let mut out = vec![BigInt::zero(); 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[2 * i] = c.clone();
        }
        IntPoly::new(out)
    }

    /// Renders with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let show_coeff = i == 0 || !abs.is_one();
            if show_coeff {
                out.push_str(&abs.to_string());
            }
            match i {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{i}")),
            }
        }
        out
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

// Coefficients travel as decimal strings: Ψ_n coefficients outgrow i64 long
// before the memo cap.
impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|s| s.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(IntPoly::new(coeffs))
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `V_m(y) = 2·T_m(y/2)`: `V_0 = 2`, `V_1 = y`, `V_{m+1} = y·V_m − V_{m−1}`.
pub fn vieta_lucas(m: u64) -> IntPoly {
    let mut prev = IntPoly::constant(2);
    if m == 0 {
        return prev;
    }
    let mut cur = IntPoly::x();
    let y = IntPoly::x();
    for _ in 1..m {
        let next = &(&y * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `Π_{e|n} Ψ_e`, as a difference of two Vieta–Lucas polynomials.
pub fn divisor_product(n: u64) -> IntPoly {
    let m = n / 2;
    if n % 2 == 1 {
        &vieta_lucas(m + 1) - &vieta_lucas(m)
    } else {
        &vieta_lucas(m + 1) - &vieta_lucas(m - 1)
    }
}

pub const DEFAULT_PSI_MEMO_CAP: u64 = 200;

static PSI_MEMO_CAP: AtomicU64 = AtomicU64::new(DEFAULT_PSI_MEMO_CAP);

fn psi_memo() -> &'static Mutex<HashMap<u64, IntPoly>> {
    static MEMO: OnceLock<Mutex<HashMap<u64, IntPoly>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Largest `n` whose Ψ_n is kept in the process-wide memo table. Larger
/// indices are still computed, just not retained.
pub fn set_psi_memo_cap(cap: u64) {
    PSI_MEMO_CAP.store(cap, Ordering::Relaxed);
}

/// Minimal polynomial of `2cos(2π/n)` over the rationals.
pub fn psi(n: u64) -> Result<IntPoly> {
    if n == 0 {
        return Err(Error::InvalidArgument("psi: n must be >= 1".into()));
    }
    if let Some(hit) = psi_memo().lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let mut poly = divisor_product(n);
    for e in numkit::divisors(n) {
        if e < n {
            poly = poly.div_exact(&psi(e)?)?;
        }
    }
    if !poly.is_monic() {
        return Err(Error::Inconsistent(format!("psi({n}) is not monic: {poly}")));
    }
    if n <= PSI_MEMO_CAP.load(Ordering::Relaxed) {
        psi_memo().lock().unwrap().insert(n, poly.clone());
    }
    Ok(poly)
}

/// `G(e) = Π_{d|e, d≠6} Ψ_d(1)` read off a mod-12 case table. For e not
/// divisible by 6 this is the value of the Vieta–Lucas combination at 1; the
/// factor Ψ_6(1) = 0 is dropped so that Möbius inversion stays defined.
pub fn divisor_product_at_one(e: u64) -> Rational {
    let v: i64 = if e % 2 == 1 {
        match e % 12 {
            1 | 5 => -1,
            3 => -2,
            7 | 11 => 1,
            9 => 2,
            _ => unreachable!(),
        }
    } else {
        match e % 12 {
            2 | 4 => -3,
            8 | 10 => 3,
            0 => e as i64,
            6 => -(e as i64),
            _ => unreachable!(),
        }
    };
    Rational::from_integer(v.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiAtOne {
    pub n: u64,
    /// Direct evaluation Ψ_n(1); authoritative.
    pub direct: BigInt,
    /// `Π_{e|n} G(e)^{μ(n/e)}`; undefined for n = 6 where Ψ_6(1) = 0.
    pub mobius: Option<Rational>,
}

/// Ψ_n(1) by direct evaluation, cross-checked by Möbius inversion over the
/// divisor products.
pub fn psi_at_one(n: u64) -> Result<PsiAtOne> {
    if n < 3 {
        return Err(Error::InvalidArgument("psi_at_one: n must be >= 3".into()));
    }
    let direct = psi(n)?.eval(&BigInt::one());
    let mobius = (n != 6).then(|| {
        let mut acc = Rational::one();
        for e in numkit::divisors(n) {
            let b = divisor_product_at_one(e);
            match numkit::mobius(n / e) {
                1 => acc *= b,
                -1 => acc /= b,
                _ => {}
            }
        }
        acc
    });
    if let Some(m) = &mobius {
        if *m != Rational::from_integer(direct.clone()) {
            return Err(Error::Inconsistent(format!(
                "Psi_{n}(1): direct {direct} != Möbius product {m}"
            )));
        }
    }
    Ok(PsiAtOne { n, direct, mobius })
}

/// Square of the trace of an order-m element of PSL(2,q), for the m whose
/// trace square is rational.
pub fn omega_squared(m: u64) -> Result<i64> {
    match m {
        3 => Ok(1),
        4 => Ok(2),
        6 => Ok(3),
        _ => Err(Error::UnsupportedM(m)),
    }
}

/// Monic polynomial whose roots are the Hall parameters `s = 4 − ω_m² − t²`
/// for the traces t of order-n rotations: `±Ψ_n(c − s)` with `c = 2 − ω_m²`.
pub fn s_polynomial(m: u64, n: u64) -> Result<IntPoly> {
    let w2 = omega_squared(m)?;
    if m * n <= 2 * m + 2 * n {
        return Err(Error::NotHyperbolic { m, n });
    }
    let shift = IntPoly::from_i64(&[2 - w2, -1]);
    let f = psi(n)?.compose(&shift);
    Ok(if f.lead().is_some_and(Signed::is_negative) { -&f } else { f })
}

/// Exact resultant via fraction-free (Bareiss) elimination of the Sylvester
/// matrix.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return BigInt::zero();
    };
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut a = vec![vec![BigInt::zero(); size]; size];
    for row in 0..n {
        for (j, c) in f.coeffs().iter().rev().enumerate() {
            a[row][row + j] = c.clone();
        }
    }
    for row in 0..m {
        for (j, c) in g.coeffs().iter().rev().enumerate() {
            a[n + row][row + j] = c.clone();
        }
    }
    bareiss_det(a)
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `disc(f) = (−1)^{d(d−1)/2} · Res(f, f′) / lc(f)`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt> {
    let d = f
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::InvalidArgument("discriminant needs degree >= 1".into()))?;
    let res = resultant(f, &f.derivative());
    let (q, r) = res.div_rem(f.lead().unwrap());
    if !r.is_zero() {
        return Err(Error::Inconsistent("resultant not divisible by leading coefficient".into()));
    }
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}
