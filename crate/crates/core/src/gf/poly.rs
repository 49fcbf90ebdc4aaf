use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::intpoly::IntPoly;

/// Reduces `v` into `[0, p)`.
pub fn reduce_bigint(v: &num_bigint::BigInt, p: u64) -> u64 {
    let r = v % num_bigint::BigInt::from(p);
    let r = if r < num_bigint::BigInt::zero() { r + p } else { r };
    r.to_u64().unwrap()
}

pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(crate::numkit::pow_mod(a, p - 2, p))
    }
}

/// Legendre symbol (a/p) for an odd prime p; 0 when p | a.
pub fn legendre(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if p == 2 {
        return 1;
    }
    if crate::numkit::pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Polynomial over the prime field F_p, constant term first. Coefficients
/// are reduced and trailing zeros stripped. Arithmetic assumes `p < 2^32`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut c: Vec<u64> = coeffs.into_iter().map(|a| a % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn from_signed(p: u64, coeffs: &[i64]) -> Self {
        let pi = p as i64;
        Self::new(p, coeffs.iter().map(|&a| a.rem_euclid(pi) as u64).collect())
    }

    pub fn from_int_poly(f: &IntPoly, p: u64) -> Self {
        Self::new(p, f.coeffs().iter().map(|c| reduce_bigint(c, p)).collect())
    }

    pub fn zero(p: u64) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        Self::new(p, vec![a])
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; for callers that have
    /// already excluded zero.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn monic(&self) -> Self {
        match inv_mod(self.lead(), self.p) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, a: u64) -> Self {
        let p = self.p;
        Self::new(p, self.c.iter().map(|&x| x * (a % p) % p).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let n = self.c.len().max(o.c.len());
        Self::new(self.p, (0..n).map(|i| (self.coeff(i) + o.coeff(i)) % self.p).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        let p = self.p;
        let n = self.c.len().max(o.c.len());
        Self::new(p, (0..n).map(|i| (self.coeff(i) + p - o.coeff(i)) % p).collect())
    }

    pub fn neg(&self) -> Self {
        Self::zero(self.p).sub(self)
    }

    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.p, o.p);
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Self::new(p, out)
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let dd = d.degree().expect("FpPoly division by zero");
        let inv = inv_mod(d.lead(), p).expect("leading coefficient invertible");
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let top = r[i + dd];
            if top == 0 {
                continue;
            }
            let f = top * inv % p;
            q[i] = f;
            for (j, &c) in d.c.iter().enumerate() {
                r[i + j] = (r[i + j] + p - f * c % p) % p;
            }
        }
        r.truncate(dd);
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn div(&self, d: &Self) -> Self {
        self.divrem(d).0
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g` and g monic.
    pub fn ext_gcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = inv_mod(r0.lead(), p).unwrap_or(1);
        (r0.scale(inv), s0.scale(inv), t0.scale(inv))
    }

    pub fn mulmod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, mut e: u64, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn powmod_big(&self, e: &BigUint, m: &Self) -> Self {
        if let Some(small) = e.to_u64() {
            return self.powmod(small, m);
        }
        let base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, m);
            if e.bit(i) {
                acc = acc.mulmod(&base, m);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c.iter().enumerate().skip(1).map(|(i, &a)| a * (i as u64 % p) % p).collect(),
        )
    }

    /// Inverse of the Frobenius on a polynomial whose exponents are all
    /// multiples of p.
    pub fn pth_root(&self) -> Self {
        let p = self.p as usize;
        Self::new(self.p, self.c.iter().step_by(p).copied().collect())
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        self.c.iter().rev().fold(0, |acc, &a| (acc * (x % p) + a) % p)
    }

    /// Substitutes a polynomial for the variable, reducing modulo `m`.
    pub fn compose_mod(&self, inner: &Self, m: &Self) -> Self {
        self.c.iter().rev().fold(Self::zero(self.p), |acc, &a| {
            acc.mulmod(inner, m).add(&Self::constant(self.p, a))
        })
    }

    /// Canonical order: degree first, then coefficients from the top down.
    pub fn canonical_cmp(&self, o: &Self) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| self.c.iter().rev().cmp(o.c.iter().rev()))
    }

    /// Signed representative in `(−p/2, p/2]`, for display.
    pub fn centered(a: u64, p: u64) -> i64 {
        if a > p / 2 {
            a as i64 - p as i64
        } else {
            a as i64
        }
    }

    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let v = Self::centered(a, self.p);
            let neg = v < 0;
            let abs = v.unsigned_abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if i == 0 || abs != 1 {
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

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

impl fmt::Debug for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FpPoly[{}]({self})", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let p = 13;
        let a = FpPoly::from_signed(p, &[1, 0, 3, 0, -4, 0, 1]);
        let b = FpPoly::from_signed(p, &[-6, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < 2);
    }

    #[test]
    fn gcd_and_bezout() {
        let p = 7;
        let a = FpPoly::from_signed(p, &[-1, 0, 1]); // (x−1)(x+1)
        let b = FpPoly::from_signed(p, &[1, 1]); // x+1
        assert_eq!(a.gcd(&b), b);
        let (g, s, t) = a.ext_gcd(&FpPoly::from_signed(p, &[2, 0, 1]));
        assert!(g.is_one());
        assert_eq!(s.mul(&a).add(&t.mul(&FpPoly::from_signed(p, &[2, 0, 1]))), g);
    }

    #[test]
    fn legendre_symbols() {
        assert_eq!(legendre(4, 13), 1);
        assert_eq!(legendre(6, 13), -1);
        assert_eq!(legendre(0, 13), 0);
        assert_eq!(legendre(29, 43), -1);
    }

    #[test]
    fn display_centers_coefficients() {
        let f = FpPoly::from_signed(13, &[-6, 0, 1]);
        assert_eq!(f.display_with("x"), "x^2 - 6");
    }
}
