use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::factor::is_irreducible;
use super::poly::{legendre, FpPoly};
use crate::error::{Error, Result};
use crate::numkit;

/// The field F_p[x]/(g), g monic irreducible of degree e, viewed inside an
/// ambient F_{p^d} (e | d) in which squareness is decided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    p: u64,
    modulus: FpPoly,
    ambient_d: u32,
}

impl FieldCtx {
    pub fn new(modulus: FpPoly, ambient_d: u32) -> Result<Arc<Self>> {
        let p = modulus.p();
        if !numkit::is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        let modulus = modulus.monic();
        if !is_irreducible(&modulus) {
            return Err(Error::InvalidArgument(format!("{modulus} is reducible mod {p}")));
        }
        let e = modulus.deg() as u32;
        if ambient_d == 0 || ambient_d % e != 0 {
            return Err(Error::InvalidArgument(format!(
                "field degree {e} does not divide ambient degree {ambient_d}"
            )));
        }
        Ok(Arc::new(FieldCtx { p, modulus, ambient_d }))
    }

    /// Skips the irreducibility test; for moduli taken from a factorization.
    pub(crate) fn from_factor(modulus: FpPoly, ambient_d: u32) -> Result<Arc<Self>> {
        let e = modulus.deg() as u32;
        if e == 0 || ambient_d % e != 0 {
            return Err(Error::Inconsistent(format!(
                "factor degree {e} does not divide field degree {ambient_d}"
            )));
        }
        Ok(Arc::new(FieldCtx { p: modulus.p(), modulus: modulus.monic(), ambient_d }))
    }

    /// The prime field F_p with ambient F_{p^d}.
    pub fn prime(p: u64, ambient_d: u32) -> Result<Arc<Self>> {
        Self::new(FpPoly::x(p), ambient_d)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    pub fn degree(&self) -> u32 {
        self.modulus.deg() as u32
    }

    pub fn ambient_d(&self) -> u32 {
        self.ambient_d
    }

    pub fn order(&self) -> BigUint {
        numkit::pow_big(self.p, self.degree())
    }
}

pub trait FieldCtxExt {
    fn elem(&self, residue: FpPoly) -> FieldElem;
    fn from_u64(&self, v: u64) -> FieldElem;
    fn from_i64(&self, v: i64) -> FieldElem;
    fn zero(&self) -> FieldElem;
    fn one(&self) -> FieldElem;
    /// Class of x, a root of the modulus.
    fn generator(&self) -> FieldElem;
    /// Element whose residue has base-p digits of `index`.
    fn nth_element(&self, index: u128) -> FieldElem;
}

impl FieldCtxExt for Arc<FieldCtx> {
    fn elem(&self, residue: FpPoly) -> FieldElem {
        debug_assert_eq!(residue.p(), self.p);
        FieldElem { ctx: Arc::clone(self), residue: residue.rem(&self.modulus) }
    }

    fn from_u64(&self, v: u64) -> FieldElem {
        self.elem(FpPoly::constant(self.p, v))
    }

    fn from_i64(&self, v: i64) -> FieldElem {
        self.elem(FpPoly::from_signed(self.p, &[v]))
    }

    fn zero(&self) -> FieldElem {
        self.from_u64(0)
    }

    fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    fn generator(&self) -> FieldElem {
        self.elem(FpPoly::x(self.p))
    }

    fn nth_element(&self, mut index: u128) -> FieldElem {
        let p = self.p as u128;
        let mut c = Vec::with_capacity(self.degree() as usize);
        for _ in 0..self.degree() {
            c.push((index % p) as u64);
            index /= p;
        }
        self.elem(FpPoly::new(self.p, c))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct FieldElem {
    ctx: Arc<FieldCtx>,
    residue: FpPoly,
}

/// Outcome of a square-root request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SqrtResult {
    /// `r` with `r² = a`; the other root is `−r`.
    Root(FieldElem),
    /// `a` is a square in the ambient field but not in its own field.
    AmbientOnly,
    NonSquare,
}

impl FieldElem {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn residue(&self) -> &FpPoly {
        &self.residue
    }

    pub fn same_field(&self, o: &FieldElem) -> bool {
        Arc::ptr_eq(&self.ctx, &o.ctx) || self.ctx == o.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.residue.is_one()
    }

    /// The value as an element of F_p, when it lies there.
    pub fn as_prime(&self) -> Option<u64> {
        match self.residue.degree() {
            None => Some(0),
            Some(0) => Some(self.residue.coeff(0)),
            _ => None,
        }
    }

    fn with(&self, residue: FpPoly) -> FieldElem {
        FieldElem { ctx: Arc::clone(&self.ctx), residue }
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        self.with(self.residue.powmod(e, &self.ctx.modulus))
    }

    pub fn pow_big(&self, e: &BigUint) -> FieldElem {
        self.with(self.residue.powmod_big(e, &self.ctx.modulus))
    }

    pub fn square(&self) -> FieldElem {
        self * self
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("FieldElem::inv"));
        }
        let (g, s, _) = self.residue.ext_gcd(&self.ctx.modulus);
        debug_assert!(g.is_one());
        Ok(self.with(s.rem(&self.ctx.modulus)))
    }

    pub fn div(&self, o: &FieldElem) -> Result<FieldElem> {
        Ok(self * &o.inv()?)
    }

    /// `a ↦ a^p`
    pub fn frobenius(&self) -> FieldElem {
        self.pow(self.ctx.p)
    }

    /// Norm down to F_p: the product of the Galois conjugates.
    pub fn norm(&self) -> u64 {
        let mut acc = self.clone();
        let mut conj = self.clone();
        for _ in 1..self.ctx.degree() {
            conj = conj.frobenius();
            acc = &acc * &conj;
        }
        acc.as_prime().expect("norm lies in the prime field")
    }

    /// Quadratic character of the element's own field F_{p^e}.
    pub fn chi_local(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.ctx.p == 2 {
            1
        } else {
            // a^{(p^e−1)/2} = N(a)^{(p−1)/2}
            legendre(self.norm(), self.ctx.p)
        }
    }

    /// Quadratic character of the ambient field F_q = F_{p^d}. Every element
    /// of F_{p^e} is a square in F_{p^d} when d/e is even.
    pub fn chi(&self) -> i8 {
        if self.is_zero() {
            0
        } else if (self.ctx.ambient_d / self.ctx.degree()) % 2 == 0 {
            1
        } else {
            self.chi_local()
        }
    }

    /// Square root in the element's own field.
    pub fn sqrt(&self) -> SqrtResult {
        if self.is_zero() {
            return SqrtResult::Root(self.clone());
        }
        match (self.chi_local(), self.chi()) {
            (1, _) => SqrtResult::Root(self.sqrt_local()),
            (_, 1) => SqrtResult::AmbientOnly,
            _ => SqrtResult::NonSquare,
        }
    }

    pub fn sqrt_opt(&self) -> Option<FieldElem> {
        match self.sqrt() {
            SqrtResult::Root(r) => Some(r),
            _ => None,
        }
    }

    fn sqrt_local(&self) -> FieldElem {
        let order = self.ctx.order();
        if self.ctx.p == 2 {
            // squaring is a bijection; its inverse is a ↦ a^{q/2}
            return self.pow_big(&(order >> 1));
        }
        // Tonelli–Shanks over F_Q with Q − 1 = 2^s · t, t odd.
        let qm1 = &order - 1u32;
        let s = qm1.trailing_zeros().unwrap_or(0);
        let t = &qm1 >> s;
        // in an even-degree extension every element of F_p is a square
        let mut idx = if self.ctx.degree() > 1 { self.ctx.p as u128 } else { 2 };
        let z = loop {
            let cand = self.ctx.nth_element(idx);
            if cand.chi_local() == -1 {
                break cand;
            }
            idx += 1;
        };
        let mut m = s;
        let mut c = z.pow_big(&t);
        let mut tt = self.pow_big(&t);
        let mut r = self.pow_big(&((&t + BigUint::one()) >> 1));
        while !tt.is_one() {
            let mut i = 0;
            let mut probe = tt.clone();
            while !probe.is_one() {
                probe = probe.square();
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = b.square();
            }
            m = i;
            c = b.square();
            tt = &tt * &c;
            r = &r * &b;
        }
        debug_assert_eq!(r.square(), *self);
        r
    }

    /// Coefficients of the residue, ascending.
    pub fn to_coeffs(&self) -> Vec<u64> {
        self.residue.coeffs().to_vec()
    }

    /// Renders prime-field values as centered integers and extension
    /// elements as polynomials in `a`, a root of the field modulus.
    pub fn display(&self) -> String {
        match self.as_prime() {
            Some(v) => FpPoly::centered(v, self.ctx.p).to_string(),
            None => self.residue.display_with("a"),
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({} in F_{}[a]/({}))", self.display(), self.ctx.p, self.ctx.modulus)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr for &FieldElem {
            type Output = FieldElem;
            fn $m(self, o: &FieldElem) -> FieldElem {
                assert!(self.same_field(o), "field elements from different contexts");
                let f: fn(&FieldElem, &FieldElem) -> FpPoly = $body;
                self.with(f(self, o))
            }
        }
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $m(self, o: FieldElem) -> FieldElem {
                (&self).$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.residue.add(&b.residue));
binop!(Sub, sub, |a, b| a.residue.sub(&b.residue));
binop!(Mul, mul, |a, b| a.residue.mulmod(&b.residue, &a.ctx.modulus));

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        self.with(self.residue.neg())
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}
