//! Dense univariate polynomials over a [`Field`].
//!
//! The slice kernels at the bottom of this file (`mul_into`, `div_rem_in_place`,
//! `squarefree_raw`, ...) are what the search loop calls directly; the
//! [`Poly`] methods are thin wrappers around them.

use std::fmt;

use thiserror::Error;

use crate::field::{Elem, Field, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("polynomial is zero")]
    Zero,
    #[error("polynomial is constant")]
    Constant,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("invalid polynomial `{0}`")]
    Parse(String),
}

/// Coefficients in ascending powers with no trailing zeros; the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.field, self)
    }
}

/// Comma-separated ascending coefficients in the element text format.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(&self.field.format_elem(c))?;
        }
        Ok(())
    }
}

impl Poly {
    /// Builds a polynomial from raw element indices, trimming trailing zeros.
    pub fn from_indices(field: &Field, mut coeffs: Vec<Elem>) -> Poly {
        debug_assert!(coeffs.iter().all(|&c| field.contains(c)));
        trim(&mut coeffs);
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Integer coefficients mapped through the prime subfield.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Poly {
        Poly::from_indices(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn from_elements(coeffs: &[FieldElement]) -> Result<Poly, PolyError> {
        let field = coeffs.first().ok_or(PolyError::Zero)?.field().clone();
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.field() != &field {
                return Err(FieldError::Mismatch.into());
            }
            raw.push(c.value());
        }
        Ok(Poly::from_indices(&field, raw))
    }

    pub fn zero(field: &Field) -> Poly {
        Poly::from_indices(field, Vec::new())
    }

    pub fn one(field: &Field) -> Poly {
        Poly::from_indices(field, vec![Elem::ONE])
    }

    /// c * x^n
    pub fn monomial(field: &Field, c: Elem, n: usize) -> Poly {
        let mut coeffs = vec![Elem::ZERO; n + 1];
        coeffs[n] = c;
        Poly::from_indices(field, coeffs)
    }

    /// Parses the text format, e.g. `0,1,0,1` or `[1,0],[0,1]`.
    pub fn parse(field: &Field, s: &str) -> Result<Poly, PolyError> {
        if s.trim().is_empty() {
            return Ok(Poly::zero(field));
        }
        let coeffs = split_top_level(s)
            .into_iter()
            .map(|t| field.parse_elem(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PolyError::Parse(s.to_string()))?;
        Ok(Poly::from_indices(field, coeffs))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// Coefficient of x^i; zero beyond the degree.
    pub fn coeff(&self, i: usize) -> Elem {
        self.coeffs.get(i).copied().unwrap_or(Elem::ZERO)
    }

    /// `None` stands for the degree of the zero polynomial (minus infinity).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Elem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Elem::ONE)
    }

    fn check(&self, other: &Poly) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch.into());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let sum = (0..n)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Poly::from_indices(&self.field, sum))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let diff = (0..n)
            .map(|i| self.field.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Ok(Poly::from_indices(&self.field, diff))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        let mut out = Vec::new();
        mul_into(&self.field, &self.coeffs, &other.coeffs, &mut out);
        Ok(Poly::from_indices(&self.field, out))
    }

    pub fn scale(&self, c: Elem) -> Poly {
        let coeffs = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        Poly::from_indices(&self.field, coeffs)
    }

    pub fn pow(&self, n: u64) -> Poly {
        let mut out = Vec::new();
        pow_into(&self.field, &self.coeffs, n, &mut out, &mut Vec::new());
        Poly::from_indices(&self.field, out)
    }

    /// f^((p-1)/2). The coefficient of x^i is the quantity the Cartier-Manin
    /// matrix is read from.
    pub fn half_power(&self) -> Result<Poly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        Ok(self.pow(half_exponent(&self.field)))
    }

    pub fn derivative(&self) -> Poly {
        let mut out = Vec::new();
        derivative_into(&self.field, &self.coeffs, &mut out);
        Poly::from_indices(&self.field, out)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(lc) => self.scale(self.field.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(PolyError::Zero);
        }
        let mut rem = self.coeffs.clone();
        let mut quot = Vec::new();
        div_rem_in_place(&self.field, &mut rem, &divisor.coeffs, Some(&mut quot));
        Ok((
            Poly::from_indices(&self.field, quot),
            Poly::from_indices(&self.field, rem),
        ))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly, PolyError> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// Monic gcd by Euclid.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, PolyError> {
        self.check(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut scratch = PolyScratch::default();
        gcd_raw(&self.field, &self.coeffs, &other.coeffs, &mut scratch);
        Ok(Poly::from_indices(&self.field, scratch.a.clone()))
    }

    /// True iff f has no repeated factor: f' is nonzero and gcd(f, f') is
    /// constant.
    pub fn is_squarefree(&self) -> Result<bool, PolyError> {
        match self.degree() {
            None => Err(PolyError::Zero),
            Some(0) => Err(PolyError::Constant),
            Some(_) => Ok(squarefree_raw(
                &self.field,
                &self.coeffs,
                &mut PolyScratch::default(),
            )),
        }
    }

    /// Rabin's test over F_q: x^(q^d) = x mod f, and
    /// gcd(x^(q^(d/r)) - x, f) = 1 for every prime r dividing d.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let d = match self.degree() {
            None => return Err(PolyError::Zero),
            Some(0) => return Err(PolyError::Constant),
            Some(d) => d,
        };
        if !self.is_monic() {
            return Err(PolyError::NotMonic);
        }
        let q = self.field.order() as u64;
        let x = Poly::monomial(&self.field, Elem::ONE, 1);
        let x_mod = x.rem(self)?;
        // frob[i] = x^(q^i) mod f
        let mut frob = vec![x_mod.clone()];
        for i in 0..d {
            let next = frob[i].pow_mod(q, self)?;
            frob.push(next);
        }
        if frob[d] != x_mod {
            return Ok(false);
        }
        for r in prime_factors(d) {
            let h = frob[d / r].try_sub(&x_mod)?;
            if h.gcd(self)?.degree() != Some(0) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// self^n mod m.
    pub fn pow_mod(&self, mut n: u64, m: &Poly) -> Result<Poly, PolyError> {
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(&self.field).rem(m)?;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.try_mul(&base)?.rem(m)?;
            }
            base = base.try_mul(&base)?.rem(m)?;
            n >>= 1;
        }
        Ok(acc)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, PolyError> {
        if x.field() != &self.field {
            return Err(FieldError::Mismatch.into());
        }
        Ok(self.field.element(self.eval_elem(x.value())))
    }

    pub fn eval_elem(&self, x: Elem) -> Elem {
        self.coeffs.iter().rev().fold(Elem::ZERO, |acc, &c| {
            self.field.add(self.field.mul(acc, x), c)
        })
    }
}

/// (p-1)/2 for the field's characteristic.
pub fn half_exponent(field: &Field) -> u64 {
    (field.characteristic() as u64 - 1) / 2
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits on commas that are not inside brackets.
pub fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

#[inline]
pub(crate) fn trim(v: &mut Vec<Elem>) {
    while v.last() == Some(&Elem::ZERO) {
        v.pop();
    }
}

/// Reusable buffers for the slice kernels.
#[derive(Default, Clone, Debug)]
pub(crate) struct PolyScratch {
    pub a: Vec<Elem>,
    pub b: Vec<Elem>,
    pub t: Vec<Elem>,
}

/// out = a * b (schoolbook). Inputs must be trimmed.
pub(crate) fn mul_into(field: &Field, a: &[Elem], b: &[Elem], out: &mut Vec<Elem>) {
    out.clear();
    if a.is_empty() || b.is_empty() {
        return;
    }
    out.resize(a.len() + b.len() - 1, Elem::ZERO);
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(out);
}

/// out = base^n by square-and-multiply.
pub(crate) fn pow_into(
    field: &Field,
    base: &[Elem],
    n: u64,
    out: &mut Vec<Elem>,
    tmp: &mut Vec<Elem>,
) {
    out.clear();
    out.push(Elem::ONE);
    if n == 0 {
        return;
    }
    let top = 63 - n.leading_zeros();
    for bit in (0..=top).rev() {
        mul_into(field, out, out, tmp);
        std::mem::swap(out, tmp);
        if (n >> bit) & 1 == 1 {
            mul_into(field, out, base, tmp);
            std::mem::swap(out, tmp);
        }
    }
}

/// out = (a * b) mod x^len.
pub(crate) fn mul_trunc_into(
    field: &Field,
    a: &[Elem],
    b: &[Elem],
    len: usize,
    out: &mut Vec<Elem>,
) {
    out.clear();
    if a.is_empty() || b.is_empty() {
        return;
    }
    out.resize((a.len() + b.len() - 1).min(len), Elem::ZERO);
    for (i, &x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] = field.add(out[i + j], field.mul(x, y));
        }
    }
    trim(out);
}

/// out = base^n mod x^len.
pub(crate) fn pow_trunc_into(
    field: &Field,
    base: &[Elem],
    n: u64,
    len: usize,
    out: &mut Vec<Elem>,
    tmp: &mut Vec<Elem>,
) {
    out.clear();
    if len == 0 {
        return;
    }
    out.push(Elem::ONE);
    if n == 0 {
        return;
    }
    let top = 63 - n.leading_zeros();
    for bit in (0..=top).rev() {
        mul_trunc_into(field, out, out, len, tmp);
        std::mem::swap(out, tmp);
        if (n >> bit) & 1 == 1 {
            mul_trunc_into(field, out, base, len, tmp);
            std::mem::swap(out, tmp);
        }
    }
}

pub(crate) fn derivative_into(field: &Field, f: &[Elem], out: &mut Vec<Elem>) {
    out.clear();
    for (i, &c) in f.iter().enumerate().skip(1) {
        out.push(field.mul(field.from_int(i as i64), c));
    }
    trim(out);
}

/// a <- a mod b, optionally collecting the quotient. `b` must be nonzero
/// and trimmed.
pub(crate) fn div_rem_in_place(
    field: &Field,
    a: &mut Vec<Elem>,
    b: &[Elem],
    mut quot: Option<&mut Vec<Elem>>,
) {
    let db = b.len() - 1;
    let lead_inv = field.inv(b[db]).expect("divisor is trimmed");
    if let Some(q) = quot.as_deref_mut() {
        q.clear();
        q.resize(a.len().saturating_sub(db), Elem::ZERO);
    }
    while a.len() > db {
        let da = a.len() - 1;
        let c = field.mul(a[da], lead_inv);
        if let Some(q) = quot.as_deref_mut() {
            q[da - db] = c;
        }
        if !c.is_zero() {
            for (i, &bi) in b.iter().enumerate() {
                let idx = da - db + i;
                a[idx] = field.sub(a[idx], field.mul(c, bi));
            }
        }
        a.pop();
        trim(a);
    }
    if let Some(q) = quot {
        trim(q);
    }
}

/// scratch.a <- monic gcd(x, y). Not both empty.
pub(crate) fn gcd_raw(field: &Field, x: &[Elem], y: &[Elem], scratch: &mut PolyScratch) {
    let PolyScratch { a, b, .. } = scratch;
    a.clear();
    a.extend_from_slice(x);
    b.clear();
    b.extend_from_slice(y);
    while !b.is_empty() {
        div_rem_in_place(field, a, b, None);
        std::mem::swap(a, b);
    }
    if let Some(&lc) = a.last() {
        let inv = field.inv(lc).expect("nonzero leading coefficient");
        for c in a.iter_mut() {
            *c = field.mul(*c, inv);
        }
    }
}

/// Squarefree test for a trimmed polynomial of degree >= 1.
pub(crate) fn squarefree_raw(field: &Field, f: &[Elem], scratch: &mut PolyScratch) -> bool {
    let mut deriv = std::mem::take(&mut scratch.t);
    derivative_into(field, f, &mut deriv);
    let ok = if deriv.is_empty() {
        false
    } else {
        gcd_raw(field, f, &deriv, scratch);
        scratch.a.len() == 1
    };
    scratch.t = deriv;
    ok
}
