//! Prime fields F_p and extension fields F_{p^k} = F_p[a]/(m(a)).
//!
//! An element is stored as a single integer index: the coordinates of the
//! element in the power basis 1, a, ..., a^(k-1), read as a base-p number
//! with the constant coordinate as the lowest digit. Index order is therefore
//! the enumeration order, `0` is zero and `1` is one in every field.
//!
//! Small fields (order up to [`TABLE_LIMIT`]) precompute full addition and
//! multiplication tables; larger ones fall back to coordinate arithmetic.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::poly::Poly;

/// Fields of at most this many elements get lookup tables.
pub const TABLE_LIMIT: u32 = 1 << 10;

/// Largest field order accepted by [`Field::new`].
pub const MAX_ORDER: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{k} exceeds the supported size")]
    TooLarge { p: u64, k: u32 },
    #[error("modulus must have {expected} coefficients, got {got}")]
    ModulusLength { expected: usize, got: usize },
    #[error("modulus coefficient {0} is not a residue mod p")]
    ModulusRange(u32),
    #[error("modulus is not monic")]
    ModulusNotMonic,
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("elements belong to different fields")]
    Mismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("invalid field element `{0}`")]
    ParseElement(String),
    #[error("invalid field description `{0}`")]
    ParseSpec(String),
}

/// A field element index. Only meaningful together with the [`Field`] that
/// produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub(crate) u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// Handle to a finite field. Cloning is cheap; all clones compare equal.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self)
    }
}

/// Formats as `p=3,k=2,mod=[1,0,1]`.
impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={},k={},mod=[", self.inner.p, self.inner.k)?;
        for (i, c) in self.inner.modulus.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Field::new(p, 1, None)
    }

    /// Builds F_{p^k}. Without an explicit modulus, the lexicographically
    /// smallest monic irreducible of degree k is used (lower coefficients
    /// compared as a base-p integer, constant term lowest).
    pub fn new(p: u64, k: u32, modulus: Option<&[u32]>) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(FieldError::TooLarge { p, k })?;
        let p32 = p as u32;

        if k == 1 {
            if let Some(m) = modulus {
                check_modulus_shape(p32, 1, m)?;
            }
            return Ok(Field::from_parts(p32, 1, q as u32, vec![0, 1]));
        }

        let base = Field::prime(p)?;
        let modulus = match modulus {
            Some(m) => {
                check_modulus_shape(p32, k, m)?;
                let poly = Poly::from_indices(&base, m.iter().map(|&c| Elem(c)).collect());
                if !poly.is_irreducible().unwrap_or(false) {
                    return Err(FieldError::ReducibleModulus(p32));
                }
                m.to_vec()
            }
            None => smallest_irreducible(&base, k),
        };
        Ok(Field::from_parts(p32, k, q as u32, modulus))
    }

    fn from_parts(p: u32, k: u32, q: u32, modulus: Vec<u32>) -> Field {
        Field::build(p, k, q, modulus, q <= TABLE_LIMIT)
    }

    fn build(p: u32, k: u32, q: u32, modulus: Vec<u32>, with_tables: bool) -> Field {
        let mut inner = Inner {
            p,
            k,
            q,
            modulus,
            tables: None,
        };
        if with_tables {
            inner.tables = Some(build_tables(&inner));
        }
        Field {
            inner: Arc::new(inner),
        }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.inner.k
    }

    /// Number of elements, p^k.
    #[inline]
    pub fn order(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, ascending powers, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    #[inline]
    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.inner.q
    }

    /// Embeds an integer via the prime subfield.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Element with the given power-basis coordinates.
    pub fn from_coords(&self, coords: &[u32]) -> Result<Elem, FieldError> {
        let p = self.inner.p;
        if coords.len() != self.inner.k as usize || coords.iter().any(|&c| c >= p) {
            return Err(FieldError::ParseElement(format!("{coords:?}")));
        }
        Ok(Elem(compose(p, coords)))
    }

    pub fn coords(&self, a: Elem) -> Vec<u32> {
        decompose(self.inner.p, self.inner.k, a.0)
    }

    /// The generator `a` of the power basis (equal to 0 + 1a); for prime
    /// fields this is simply `1`.
    pub fn generator(&self) -> Elem {
        if self.inner.k == 1 {
            Elem::ONE
        } else {
            Elem(self.inner.p)
        }
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.add[a.0 as usize * self.inner.q as usize + b.0 as usize] as u32),
            None => self.add_coords(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.neg[a.0 as usize] as u32),
            None => self.neg_coords(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => Elem(t.mul[a.0 as usize * self.inner.q as usize + b.0 as usize] as u32),
            None => self.mul_coords(a, b),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a.is_zero() {
            return None;
        }
        Some(match &self.inner.tables {
            Some(t) => Elem(t.inv[a.0 as usize] as u32),
            None => self.pow(a, self.inner.q as u64 - 2),
        })
    }

    /// Square-and-multiply; `pow(0, 0) = 1`.
    pub fn pow(&self, a: Elem, mut n: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// a^(p^i).
    pub fn frobenius(&self, a: Elem, i: u64) -> Elem {
        let steps = i % self.inner.k as u64;
        let mut x = a;
        for _ in 0..steps {
            x = match &self.inner.tables {
                Some(t) => Elem(t.frob[x.0 as usize] as u32),
                None => self.pow(x, self.inner.p as u64),
            };
        }
        x
    }

    /// The unique b with b^p = a, namely a^(p^(k-1)).
    pub fn pth_root(&self, a: Elem) -> Elem {
        self.frobenius(a, self.inner.k as u64 - 1)
    }

    /// All elements in ascending index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.inner.q).map(Elem)
    }

    /// Uniform draw from the field.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.inner.q))
    }

    /// Wraps an index as a checked element.
    pub fn element(&self, a: Elem) -> FieldElement {
        debug_assert!(self.contains(a));
        FieldElement {
            field: self.clone(),
            value: a,
        }
    }

    /// Text form: decimal for prime fields, `[c0,c1,...]` otherwise.
    pub fn format_elem(&self, a: Elem) -> String {
        if self.inner.k == 1 {
            a.0.to_string()
        } else {
            let parts: Vec<String> = self.coords(a).iter().map(u32::to_string).collect();
            format!("[{}]", parts.join(","))
        }
    }

    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let bad = || FieldError::ParseElement(s.to_string());
        let t = s.trim();
        if self.inner.k == 1 {
            let v: u32 = t.parse().map_err(|_| bad())?;
            if v >= self.inner.p {
                return Err(bad());
            }
            return Ok(Elem(v));
        }
        let body = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(bad)?;
        let coords = body
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        self.from_coords(&coords).map_err(|_| bad())
    }

    /// JSON form matching the text form: a number, or an array of coordinates.
    pub fn elem_to_json(&self, a: Elem) -> serde_json::Value {
        if self.inner.k == 1 {
            serde_json::Value::from(a.0)
        } else {
            serde_json::Value::from(self.coords(a))
        }
    }

    pub fn elem_from_json(&self, v: &serde_json::Value) -> Result<Elem, FieldError> {
        let bad = || FieldError::ParseElement(v.to_string());
        match v {
            serde_json::Value::Number(n) if self.inner.k == 1 => {
                let x = n
                    .as_u64()
                    .filter(|&x| x < self.inner.p as u64)
                    .ok_or_else(bad)?;
                Ok(Elem(x as u32))
            }
            serde_json::Value::Array(items) if self.inner.k > 1 => {
                let coords = items
                    .iter()
                    .map(|c| c.as_u64().and_then(|x| u32::try_from(x).ok()))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(bad)?;
                self.from_coords(&coords).map_err(|_| bad())
            }
            _ => Err(bad()),
        }
    }

    fn add_coords(&self, a: Elem, b: Elem) -> Elem {
        let p = self.inner.p as u64;
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut acc, mut place) = (0u64, 1u64);
        for _ in 0..self.inner.k {
            acc += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        Elem(acc as u32)
    }

    fn neg_coords(&self, a: Elem) -> Elem {
        let p = self.inner.p as u64;
        let mut x = a.0 as u64;
        let (mut acc, mut place) = (0u64, 1u64);
        for _ in 0..self.inner.k {
            acc += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        Elem(acc as u32)
    }

    fn mul_coords(&self, a: Elem, b: Elem) -> Elem {
        let p = self.inner.p as u64;
        let k = self.inner.k as usize;
        let xa = decompose(self.inner.p, self.inner.k, a.0);
        let xb = decompose(self.inner.p, self.inner.k, b.0);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &u) in xa.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (j, &v) in xb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u as u64 * v as u64) % p;
            }
        }
        // a^k = -(m_0 + m_1 a + ... + m_{k-1} a^(k-1))
        let m = &self.inner.modulus;
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (t, &mt) in m[..k].iter().enumerate() {
                let sub = c * mt as u64 % p;
                prod[d - k + t] = (prod[d - k + t] + p - sub) % p;
            }
        }
        let coords: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        Elem(compose(self.inner.p, &coords))
    }

    /// Parses `p=3,k=2,mod=[1,0,1]`; `k` and `mod` are optional.
    pub fn parse_spec(s: &str) -> Result<Field, FieldError> {
        let bad = || FieldError::ParseSpec(s.to_string());
        let (mut p, mut k, mut modulus) = (None, 1u32, None);
        let mut rest = s.trim();
        while !rest.is_empty() {
            let (key, after) = rest.split_once('=').ok_or_else(bad)?;
            let (value, next) = if after.starts_with('[') {
                let end = after.find(']').ok_or_else(bad)?;
                (&after[..=end], after[end + 1..].trim_start_matches(','))
            } else {
                match after.split_once(',') {
                    Some((v, n)) => (v, n),
                    None => (after, ""),
                }
            };
            match key.trim() {
                "p" => p = Some(value.trim().parse::<u64>().map_err(|_| bad())?),
                "k" => k = value.trim().parse::<u32>().map_err(|_| bad())?,
                "mod" => modulus = Some(parse_u32_list(value).ok_or_else(bad)?),
                _ => return Err(bad()),
            }
            rest = next.trim();
        }
        Field::new(p.ok_or_else(bad)?, k, modulus.as_deref())
    }
}

/// Parses `[1,0,1]` into residues.
pub fn parse_u32_list(s: &str) -> Option<Vec<u32>> {
    let body = s.trim().strip_prefix('[')?.strip_suffix(']')?;
    if body.trim().is_empty() {
        return Some(Vec::new());
    }
    body.split(',').map(|c| c.trim().parse().ok()).collect()
}

fn check_modulus_shape(p: u32, k: u32, m: &[u32]) -> Result<(), FieldError> {
    if m.len() != k as usize + 1 {
        return Err(FieldError::ModulusLength {
            expected: k as usize + 1,
            got: m.len(),
        });
    }
    if let Some(&c) = m.iter().find(|&&c| c >= p) {
        return Err(FieldError::ModulusRange(c));
    }
    if m[k as usize] != 1 {
        return Err(FieldError::ModulusNotMonic);
    }
    Ok(())
}

fn smallest_irreducible(base: &Field, k: u32) -> Vec<u32> {
    let p = base.characteristic();
    let count = (p as u64).pow(k);
    for low in 0..count {
        let mut coeffs = decompose(p, k, low as u32);
        coeffs.push(1);
        let poly = Poly::from_indices(base, coeffs.iter().map(|&c| Elem(c)).collect());
        if poly.is_irreducible().unwrap_or(false) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn decompose(p: u32, k: u32, mut v: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        out.push(v % p);
        v /= p;
    }
    out
}

fn compose(p: u32, coords: &[u32]) -> u32 {
    coords.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn build_tables(inner: &Inner) -> Tables {
    // A table-less twin of the field computes the entries.
    let plain = Field::build(inner.p, inner.k, inner.q, inner.modulus.clone(), false);
    let q = inner.q as usize;
    let mut add = vec![0u16; q * q];
    let mut mul = vec![0u16; q * q];
    for a in 0..q {
        for b in 0..q {
            add[a * q + b] = plain.add_coords(Elem(a as u32), Elem(b as u32)).0 as u16;
            mul[a * q + b] = plain.mul_coords(Elem(a as u32), Elem(b as u32)).0 as u16;
        }
    }
    let neg = (0..q)
        .map(|a| plain.neg_coords(Elem(a as u32)).0 as u16)
        .collect();
    let mut inv = vec![0u16; q];
    for a in 1..q {
        if let Some(b) = (1..q).find(|&b| mul[a * q + b] == 1) {
            inv[a] = b as u16;
        }
    }
    let frob = (0..q)
        .map(|a| plain.pow(Elem(a as u32), inner.p as u64).0 as u16)
        .collect();
    Tables {
        add,
        mul,
        neg,
        inv,
        frob,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// An element bundled with its field; arithmetic checks that both operands
/// live in the same field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    value: Elem,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.value))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(self.value))
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn value(&self) -> Elem {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn arith(&self, other: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
        if self.field != other.field {
            return Err(FieldError::Mismatch);
        }
        let (a, b) = (self.value, other.value);
        let value = match op {
            ArithOp::Add => self.field.add(a, b),
            ArithOp::Sub => self.field.sub(a, b),
            ArithOp::Mul => self.field.mul(a, b),
        };
        Ok(self.field.element(value))
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(other, ArithOp::Add)
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(other, ArithOp::Sub)
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.arith(other, ArithOp::Mul)
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        let v = self.field.inv(self.value).ok_or(FieldError::ZeroInverse)?;
        Ok(self.field.element(v))
    }

    pub fn pow(&self, n: u64) -> FieldElement {
        self.field.element(self.field.pow(self.value, n))
    }

    pub fn frobenius(&self, i: u64) -> FieldElement {
        self.field.element(self.field.frobenius(self.value, i))
    }

    pub fn pth_root(&self) -> FieldElement {
        self.field.element(self.field.pth_root(self.value))
    }
}
