//! Independent checks of the census: explicit generating matrices with an
//! inverting involution, and the trace-polynomial route to the s-values.

use std::sync::Arc;

use serde::Serialize;

use super::{field_data, CensusRecord, Regularity, TraceClass};
use crate::error::{Error, Result};
use crate::gf::factor::reduce_and_factor;
use crate::gf::{FieldCtx, FieldCtxExt, FieldElem, FpPoly};
use crate::intpoly::{omega_squared, psi, s_polynomial};

/// 2×2 matrix `[[a, b], [c, d]]` over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub a: FieldElem,
    pub b: FieldElem,
    pub c: FieldElem,
    pub d: FieldElem,
}

impl Mat2 {
    pub fn new(a: FieldElem, b: FieldElem, c: FieldElem, d: FieldElem) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    pub fn det(&self) -> FieldElem {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> FieldElem {
        &self.a + &self.d
    }

    /// Adjugate; equals the inverse when the determinant is 1.
    pub fn adj(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn scale(&self, k: &FieldElem) -> Mat2 {
        Mat2 { a: &self.a * k, b: &self.b * k, c: &self.c * k, d: &self.d * k }
    }

    /// Whether conjugation by `self` sends `m` to `m⁻¹` in PSL₂, tested
    /// without division as `w·m·adj(w) = ±det(w)·adj(m)` for `det m = 1`.
    pub fn inverts(&self, m: &Mat2) -> bool {
        let lhs = self.mul(m).mul(&self.adj());
        let rhs = m.adj().scale(&self.det());
        lhs == rhs || lhs == rhs.scale(&-&self.a.ctx().one())
    }

    pub fn entries(&self) -> [String; 4] {
        [self.a.display(), self.b.display(), self.c.display(), self.d.display()]
    }
}

/// Matrices produced by the oracle: `z` of order 2, `x` of order 3 with
/// `tr(zx) = t`, and the involution `w` inverting both.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub regularity: Regularity,
    pub agrees: bool,
    pub t: FieldElem,
    pub z: Mat2,
    pub x: Mat2,
    pub w: Mat2,
    /// `r = v = 1/2`, forcing `β = 0`.
    pub degenerate: bool,
    /// +1 when `(α, β) = (b + c, v − r)` was the inverting choice, −1 for
    /// `(b + c, r − v)`.
    pub sign: i8,
    /// Elements of the trace field tried before x was found.
    pub attempts: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub t: String,
    pub t_field: String,
    pub x: [String; 4],
    pub w: [String; 4],
    pub det_w: String,
    pub degenerate: bool,
    pub sign: i8,
    pub regularity: Regularity,
    pub agrees: bool,
}

impl OracleOutcome {
    pub fn report(&self) -> OracleReport {
        OracleReport {
            t: self.t.display(),
            t_field: format!("F_{}[a]/({})", self.t.ctx().p(), self.t.ctx().modulus().display_with("a")),
            x: self.x.entries(),
            w: self.w.entries(),
            det_w: self.w.det().display(),
            degenerate: self.degenerate,
            sign: self.sign,
            regularity: self.regularity,
            agrees: self.agrees,
        }
    }
}

/// Field generated by a trace t of an order-n rotation whose Hall parameter
/// lies in the given class, with t as its generator.
fn trace_field(m: u64, n: u64, p: u64, d: u32, class: &TraceClass) -> Result<Arc<FieldCtx>> {
    let field = field_data(m, n, p)?;
    let c0 = 4 - omega_squared(m)?;
    let fl = reduce_and_factor(&psi(field.n_n)?, p)?;
    let y = FpPoly::x(p);
    let s_of_y = FpPoly::from_signed(p, &[c0]).sub(&y.mul(&y));
    let target = class.factor_poly(p);
    for (h, _) in &fl.factors {
        if target.compose_mod(&s_of_y, h).is_zero() {
            return FieldCtx::from_factor(h.clone(), d);
        }
    }
    Err(Error::Inconsistent(format!("no trace factor mod {p} maps to class {target}")))
}

/// Builds explicit matrices for class `index` of a type-{3, n} record and
/// decides regularity from the determinant of the inverting involution.
/// With `force_half` only `r = 1/2` is tried, which drives the construction
/// into the `β = 0` branch.
pub fn matrix_oracle(record: &CensusRecord, index: usize, force_half: bool) -> Result<OracleOutcome> {
    let (m, n, p, d) = (record.m, record.n, record.p, record.field.d);
    if m != 3 {
        return Err(Error::InvalidArgument("matrix oracle is defined for m = 3".into()));
    }
    if p == 2 {
        return Err(Error::InvalidArgument("matrix oracle needs odd characteristic".into()));
    }
    let class = record
        .classes
        .get(index)
        .ok_or_else(|| Error::InvalidArgument(format!("no class {index}")))?;
    let ctx = trace_field(m, n, p, d, class)?;
    let t = ctx.generator();
    let one = ctx.one();
    let two = ctx.from_u64(2);
    let half = one.div(&two)?;
    let nonsingular = &ctx.from_u64(3) - &t.square();
    if nonsingular.is_zero() {
        return Err(Error::DegenerateTrace { p });
    }

    let z = Mat2::new(ctx.zero(), one.clone(), -&one, ctx.zero());
    let size = ctx.order();
    let size: u128 = size.try_into().unwrap_or(u128::MAX);
    let candidates: Box<dyn Iterator<Item = FieldElem>> = if force_half {
        Box::new(std::iter::once(half.clone()))
    } else {
        Box::new((0..size).map(|i| ctx.nth_element(i)))
    };

    let mut attempts = 0;
    for r in candidates {
        attempts += 1;
        // b² + tb + (1 − r + r²) = 0
        let constant = &(&one - &r) + &r.square();
        let disc = &t.square() - &(&ctx.from_u64(4) * &constant);
        let Some(root) = disc.sqrt_opt() else { continue };
        let b = (&root - &t).div(&two)?;
        let c = &b + &t;
        let v = &one - &r;
        let x = Mat2::new(r.clone(), b.clone(), c.clone(), v.clone());
        if !x.det().is_one() || z.mul(&x).trace() != t || x.trace() != one {
            return Err(Error::Inconsistent("constructed x has wrong invariants".into()));
        }

        let sum = &b + &c;
        let diff = &r - &v;
        let degenerate = diff.is_zero();
        let choices: Vec<(i8, FieldElem, FieldElem)> = if degenerate {
            vec![(1, one.clone(), ctx.zero())]
        } else {
            vec![(1, sum.clone(), -&diff), (-1, sum.clone(), diff.clone())]
        };
        let Some((sign, alpha, beta)) = choices.into_iter().find(|(_, al, be)| {
            let w = Mat2::new(al.clone(), be.clone(), be.clone(), -al);
            !w.det().is_zero() && w.inverts(&z) && w.inverts(&x)
        }) else {
            return Err(Error::Inconsistent("neither sign choice inverts z and x".into()));
        };
        let w = Mat2::new(alpha.clone(), beta.clone(), beta.clone(), -&alpha);
        // (α² + β²)(r − v)² = β²(t² − 3)
        let lhs = &(&alpha.square() + &beta.square()) * &diff.square();
        let rhs = &beta.square() * &(-&nonsingular);
        if lhs != rhs {
            return Err(Error::Inconsistent("determinant identity fails for w".into()));
        }
        let regularity = Regularity::from_chi(w.det().chi());
        return Ok(OracleOutcome {
            agrees: regularity == class.regularity,
            regularity,
            t,
            z,
            x,
            w,
            degenerate,
            sign,
            attempts,
        });
    }
    Err(Error::OracleNoSolution(format!(
        "class {index} of ({m}, {n}, {p}){}",
        if force_half { " with r = 1/2" } else { "" }
    )))
}

/// The s-values reached from the roots of Ψ_N mod p, as a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteCheck {
    pub from_traces: FpPoly,
    pub f1: FpPoly,
    /// Each s arises from two traces ±t (even n).
    pub doubled: bool,
    pub equal: bool,
}

/// Multiplies together the minimal polynomials of `4 − ω² − t²` over the
/// roots t of Ψ_N mod p, and compares with f₁ (or f₁² for even n, where the
/// traces come in ± pairs).
pub fn route_equivalence(m: u64, n: u64, p: u64) -> Result<RouteCheck> {
    let field = field_data(m, n, p)?;
    let c0 = 4 - omega_squared(m)?;
    let trace_poly = reduce_and_factor(&psi(field.n_n)?, p)?;
    if !trace_poly.squarefree {
        return Err(Error::BadReduction { what: format!("Psi_{}", field.n_n), p });
    }
    let mut from_traces = FpPoly::one(p);
    for (h, _) in &trace_poly.factors {
        let ctx = FieldCtx::from_factor(h.clone(), h.deg() as u32)?;
        let t = ctx.generator();
        let s = &ctx.from_i64(c0) - &t.square();
        let mp = minimal_polynomial(&s)?;
        for _ in 0..h.deg() / mp.deg() {
            from_traces = from_traces.mul(&mp);
        }
    }
    let f1 = FpPoly::from_int_poly(&s_polynomial(m, n)?, p);
    let doubled = n % 2 == 0;
    let target = if doubled { f1.mul(&f1) } else { f1.clone() };
    Ok(RouteCheck { equal: from_traces == target, from_traces, f1, doubled })
}

/// Minimal polynomial over F_p, from the Frobenius orbit.
fn minimal_polynomial(a: &FieldElem) -> Result<FpPoly> {
    let ctx = a.ctx();
    let mut orbit = vec![a.clone()];
    loop {
        let next = orbit.last().unwrap().frobenius();
        if next == *a {
            break;
        }
        orbit.push(next);
    }
    // Π (X − a_i) with coefficients in the extension, ascending
    let mut coeffs = vec![ctx.one()];
    for root in &orbit {
        let mut next = vec![ctx.zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * root);
        }
        coeffs = next;
    }
    let flat: Option<Vec<u64>> = coeffs.iter().map(FieldElem::as_prime).collect();
    flat.map(|c| FpPoly::new(ctx.p(), c))
        .ok_or_else(|| Error::Inconsistent("minimal polynomial left the prime field".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::map_census;
    use crate::numkit;

    #[test]
    fn heptagon_13_verdicts() {
        let r = map_census(3, 7, 13).unwrap();
        for (i, c) in r.classes.iter().enumerate() {
            let out = matrix_oracle(&r, i, false).unwrap();
            assert!(out.agrees);
            match c.s_value() {
                Some(4) => assert_eq!(out.regularity, Regularity::Inner),
                Some(6) => assert_eq!(out.regularity, Regularity::Outer),
                _ => {}
            }
            assert!(out.w.inverts(&out.z) && out.w.inverts(&out.x));
        }
    }

    #[test]
    fn extension_classes() {
        for (n, p) in [(7u64, 5u64), (9, 5), (11, 3), (13, 5), (19, 37)] {
            let r = map_census(3, n, p).unwrap();
            for i in 0..r.classes.len() {
                assert!(matrix_oracle(&r, i, false).unwrap().agrees, "({n}, {p}) class {i}");
            }
        }
    }

    #[test]
    fn forced_degenerate_branch_matches_minus_one_rule() {
        let mut found = 0;
        for p in numkit::primes_up_to(200).into_iter().filter(|&p| p > 3) {
            let Ok(r) = map_census(3, 7, p) else { continue };
            for i in 0..r.classes.len() {
                let Ok(out) = matrix_oracle(&r, i, true) else { continue };
                assert!(out.degenerate);
                assert!(out.agrees);
                let minus_one = (-&out.t.ctx().one()).chi();
                let s = &out.t.ctx().from_u64(3) - &out.t.square();
                assert_eq!(s.chi(), minus_one);
                found += 1;
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn route_matches_f1() {
        for n in 7..=16u64 {
            for p in numkit::primes_up_to(120) {
                match route_equivalence(3, n, p) {
                    Ok(rc) => assert!(rc.equal, "n={n} p={p}"),
                    Err(e) => assert!(e.is_domain(), "n={n} p={p}: {e}"),
                }
            }
        }
        assert!(route_equivalence(4, 5, 31).unwrap().equal);
    }

    #[test]
    fn minimal_polynomial_of_generator_is_modulus() {
        let h = FpPoly::from_signed(5, &[2, 0, 0, 0, 1]);
        let ctx = FieldCtx::new(h.clone(), 4).unwrap();
        assert_eq!(minimal_polynomial(&ctx.generator()).unwrap(), h);
        assert_eq!(minimal_polynomial(&ctx.from_u64(3)).unwrap(), FpPoly::from_signed(5, &[-3, 1]));
    }
}
