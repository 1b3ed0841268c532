//! Exact coefficient arithmetic.
//!
//! Two scalar types implement [`Scalar`]: [`GaussianRational`] (the field
//! ℚ(i), used for every central-fiber computation) and [`TruncatedPoly`]
//! (polynomials in deformation parameters and their conjugates, truncated
//! above a fixed total degree, used for families).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar literal `{0}`")]
    Parse(String),
    #[error("parameter ring mismatch")]
    RingMismatch,
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
}

/// Common interface of the exact coefficient types.
///
/// Arithmetic goes through the owned-value operator traits; callers clone
/// where they need to keep an operand.
/// A ℚ(i)-linear map on coefficient vectors, as used by [`Scalar::map_linear`].
pub type LinearMap<'a, E> = dyn FnMut(&[GaussianRational]) -> Result<Vec<GaussianRational>, E> + 'a;

pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn from_gaussian(c: GaussianRational) -> Self;
    fn scale(&self, c: &GaussianRational) -> Self;

    /// Applies a ℚ(i)-linear map coefficient-wise.
    ///
    /// For polynomial scalars the map is applied separately to the vector of
    /// coefficients of every monomial, and the results are recombined.
    fn map_linear<E>(v: &[Self], f: &mut LinearMap<'_, E>) -> Result<Vec<Self>, E>;

    /// Parses a coefficient as it appears in a form literal. Parenthesised
    /// groups arrive with their parentheses stripped.
    fn parse_coefficient(s: &str, ctx: &ParseContext) -> Result<Self, ScalarError>;

    /// Coefficient as printed in a form literal (parenthesised when needed).
    fn coefficient_literal(&self) -> String;
}

/// Extra context needed to parse polynomial coefficients.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    pub ring: Option<Arc<ParameterRing>>,
}

// ---------------------------------------------------------------------------
// Gaussian rationals

/// An element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn from_fraction(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn integer(n: i64) -> Self {
        Self::from_ints(n, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }

    /// Bit size of numerators and denominators; used to pick cheap pivots.
    pub fn height(&self) -> u64 {
        self.re.numer().bits() + self.re.denom().bits() + self.im.numer().bits() + self.im.denom().bits()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigRational| -> String {
            if im.is_one() {
                "i".to_string()
            } else if (-im).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rational(im))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "{}{}", fmt_rational(&self.re), im)
                } else {
                    write!(f, "{}+{}", fmt_rational(&self.re), im)
                }
            }
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    if num.is_empty() {
        return None;
    }
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = match den {
        Some(d) if !d.is_empty() && !d.starts_with(['-', '+']) => d.parse().ok()?,
        Some(_) => return None,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    /// Accepts `a/b`, `c/d i` and sums of one real and one imaginary term in
    /// either order (`1/2-3i`, `-i`, `i+2`). Whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        // split into signed terms at + / - that do not follow a '/'
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (idx, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && idx > 0 && !cur.ends_with('/') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        if terms.len() > 2 {
            return Err(err());
        }
        let mut re: Option<BigRational> = None;
        let mut im: Option<BigRational> = None;
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (value, imaginary) = if let Some(coef) = body.strip_suffix('i') {
                let coef = coef.strip_suffix('*').unwrap_or(coef);
                let v = if coef.is_empty() { Some(BigRational::one()) } else { parse_rational(coef) };
                (v.ok_or_else(err)?, true)
            } else {
                (parse_rational(body).ok_or_else(err)?, false)
            };
            let value = if neg { -value } else { value };
            let slot = if imaginary { &mut im } else { &mut re };
            if slot.is_some() {
                return Err(err());
            }
            *slot = Some(value);
        }
        Ok(Self::new(re.unwrap_or_else(BigRational::zero), im.unwrap_or_else(BigRational::zero)))
    }
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        -&self
    }
}

/// Panics on division by zero; use [`GaussianRational::checked_div`] for a
/// fallible variant.
impl Div for GaussianRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero")
    }
}

/// Field operations on Gaussian rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn arith(a: &GaussianRational, b: &GaussianRational, op: ArithOp) -> Result<GaussianRational, ScalarError> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.checked_div(b)?,
    })
}

pub fn conj_scalar(a: &GaussianRational) -> GaussianRational {
    GaussianRational::new(a.re.clone(), -&a.im)
}

impl Scalar for GaussianRational {
    fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    fn one() -> Self {
        Self::from_ints(1, 0)
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn conj(&self) -> Self {
        conj_scalar(self)
    }

    fn from_gaussian(c: GaussianRational) -> Self {
        c
    }

    fn scale(&self, c: &GaussianRational) -> Self {
        self * c
    }
    fn map_linear<E>(v: &[Self], f: &mut LinearMap<'_, E>) -> Result<Vec<Self>, E> {
        f(v)
    }

    fn parse_coefficient(s: &str, _ctx: &ParseContext) -> Result<Self, ScalarError> {
        s.parse()
    }

    fn coefficient_literal(&self) -> String {
        if !self.re.is_zero() && !self.im.is_zero() {
            format!("({self})")
        } else {
            self.to_string()
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter ring

/// Generators of the truncated parameter ring: base parameters followed by
/// their conjugates, plus the truncation order.
///
/// Generator `k < m` is the base parameter `names[k]`; generator `m + k` is
/// its conjugate, printed as `~name`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterRing {
    names: Vec<String>,
    order: u32,
}

impl ParameterRing {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, order: u32) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        Arc::new(Self { names, order })
    }

    /// Base parameter names in order.
    pub fn base_names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_base(&self) -> usize {
        self.names.len()
    }

    pub fn num_generators(&self) -> usize {
        2 * self.names.len()
    }

    pub fn generator_name(&self, g: usize) -> String {
        let m = self.names.len();
        if g < m {
            self.names[g].clone()
        } else {
            format!("~{}", self.names[g - m])
        }
    }

    pub fn conjugate_generator(&self, g: usize) -> usize {
        let m = self.names.len();
        if g < m {
            g + m
        } else {
            g - m
        }
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        match name.strip_prefix('~') {
            Some(base) => self.names.iter().position(|n| n == base).map(|k| k + self.names.len()),
            None => self.names.iter().position(|n| n == name),
        }
    }
}

/// Exponent vector over the ring generators, trailing zeros trimmed so the
/// constant monomial is the empty vector in every ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u8>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        let mut v = vec![0u8; g + 1];
        v[g] = 1;
        Monomial(v)
    }

    pub fn from_exponents(mut v: Vec<u8>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn exponent(&self, g: usize) -> u8 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len).map(|g| self.exponent(g) + other.exponent(g)).collect();
        Monomial::from_exponents(v)
    }

    fn conj(&self, ring: &ParameterRing) -> Monomial {
        let mut v = vec![0u8; ring.num_generators()];
        for (g, &e) in self.0.iter().enumerate() {
            v[ring.conjugate_generator(g)] = e;
        }
        Monomial::from_exponents(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // graded, then reverse-lexicographic on exponents so t11 < t12 < ...
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.0.len().max(other.0.len());
            for g in 0..len {
                let c = other.exponent(g).cmp(&self.exponent(g));
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
            std::cmp::Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// ---------------------------------------------------------------------------
// Truncated polynomials

/// A polynomial over ℚ(i) in the generators of a [`ParameterRing`], with all
/// monomials of total degree above the ring's order discarded.
///
/// Constants may carry no ring; they combine with polynomials of any ring.
#[derive(Clone, Debug)]
pub struct TruncatedPoly {
    ring: Option<Arc<ParameterRing>>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl PartialEq for TruncatedPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl TruncatedPoly {
    pub fn constant(c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Self { ring: None, terms }
    }

    pub fn zero_in(ring: &Arc<ParameterRing>) -> Self {
        Self { ring: Some(ring.clone()), terms: BTreeMap::new() }
    }

    pub fn constant_in(ring: &Arc<ParameterRing>, c: GaussianRational) -> Self {
        let mut p = Self::constant(c);
        p.ring = Some(ring.clone());
        p
    }

    /// The generator with the given name (`t21` or `~t21`).
    pub fn generator(ring: &Arc<ParameterRing>, name: &str) -> Result<Self, ScalarError> {
        let g = ring.generator_index(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        Ok(Self::monomial(ring, Monomial::generator(g), GaussianRational::one()))
    }

    pub fn monomial(ring: &Arc<ParameterRing>, m: Monomial, c: GaussianRational) -> Self {
        let mut p = Self::zero_in(ring);
        if !c.is_zero() && m.degree() <= ring.order() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn ring(&self) -> Option<&Arc<ParameterRing>> {
        self.ring.as_ref()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coefficient(&Monomial::one())
    }

    /// Part of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Self {
        Self {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    fn merge_ring(&self, other: &Self) -> Result<Option<Arc<ParameterRing>>, ScalarError> {
        match (&self.ring, &other.ring) {
            (Some(a), Some(b)) if !Arc::ptr_eq(a, b) && a != b => Err(ScalarError::RingMismatch),
            (Some(a), _) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    fn insert_term(&mut self, m: Monomial, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(v) => &v + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let mut out = Self { ring: self.merge_ring(other)?, terms: self.terms.clone() };
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let ring = self.merge_ring(other)?;
        let order = ring.as_ref().map(|r| r.order());
        let mut out = Self { ring, terms: BTreeMap::new() };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if order.is_some_and(|n| m.degree() > n) {
                    continue;
                }
                out.insert_term(m, ca * cb);
            }
        }
        Ok(out)
    }

    /// Substitutes values for the base parameters; conjugate generators get
    /// the conjugated values.
    pub fn evaluate(&self, values: &[GaussianRational]) -> GaussianRational {
        let Some(ring) = &self.ring else {
            return self.constant_term();
        };
        let m = ring.num_base();
        let mut acc = GaussianRational::zero();
        for (mono, c) in &self.terms {
            let mut term = c.clone();
            for (g, &e) in mono.exponents().iter().enumerate() {
                let base = if g < m { values[g].clone() } else { values[g - m].conj() };
                for _ in 0..e {
                    term = &term * &base;
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    pub fn parse(s: &str, ring: &Arc<ParameterRing>) -> Result<Self, ScalarError> {
        parse_poly(s, ring)
    }
}

pub fn poly_mul(f: &TruncatedPoly, g: &TruncatedPoly) -> Result<TruncatedPoly, ScalarError> {
    f.try_mul(g)
}

/// Swaps every generator with its conjugate partner and conjugates the
/// coefficients.
pub fn conj_poly(f: &TruncatedPoly) -> TruncatedPoly {
    let mut out = TruncatedPoly { ring: f.ring.clone(), terms: BTreeMap::new() };
    for (m, c) in &f.terms {
        let cm = match &f.ring {
            Some(r) => m.conj(r),
            None => m.clone(),
        };
        out.insert_term(cm, c.conj());
    }
    out
}

impl Add for TruncatedPoly {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("parameter ring mismatch")
    }
}

impl Neg for TruncatedPoly {
    type Output = Self;
    fn neg(self) -> Self {
        Self { ring: self.ring, terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Sub for TruncatedPoly {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for TruncatedPoly {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("parameter ring mismatch")
    }
}

fn monomial_literal(m: &Monomial, ring: Option<&ParameterRing>) -> String {
    let mut parts = Vec::new();
    for (g, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = match ring {
            Some(r) => r.generator_name(g),
            None => format!("g{g}"),
        };
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

impl fmt::Display for TruncatedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let ring = self.ring.as_deref();
        let mut first = true;
        for (m, c) in &self.terms {
            let complex = !c.re().is_zero() && !c.im().is_zero();
            let mut term = if m.degree() == 0 {
                if complex { format!("({c})") } else { c.to_string() }
            } else {
                let mono = monomial_literal(m, ring);
                if c.is_one() {
                    mono
                } else if (-c).is_one() {
                    format!("-{mono}")
                } else if complex {
                    format!("({c})*{mono}")
                } else {
                    format!("{c}*{mono}")
                }
            };
            if first {
                write!(f, "{term}")?;
                first = false;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {}", std::mem::take(&mut term))?;
            }
        }
        Ok(())
    }
}

trait IsOne {
    fn is_one(&self) -> bool;
}

impl IsOne for GaussianRational {
    fn is_one(&self) -> bool {
        self.re().is_one() && self.im().is_zero()
    }
}

fn parse_poly(s: &str, ring: &Arc<ParameterRing>) -> Result<TruncatedPoly, ScalarError> {
    let err = || ScalarError::Parse(s.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err());
    }
    // split at top-level + / - (outside parentheses, not after '/', '(' or '^')
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in compact.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if (ch == '+' || ch == '-') && depth == 0 && !cur.is_empty() && !cur.ends_with(['/', '*', '^']) {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut out = TruncatedPoly::zero_in(ring);
    for term in terms {
        let (neg, body) = match term.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, term.strip_prefix('+').unwrap_or(&term).to_string()),
        };
        if body.is_empty() {
            return Err(err());
        }
        let mut coef = GaussianRational::one();
        let mut mono = Monomial::one();
        for factor in split_factors(&body).ok_or_else(err)? {
            if let Some(inner) = factor.strip_prefix('(').and_then(|f| f.strip_suffix(')')) {
                coef = &coef * &inner.parse::<GaussianRational>()?;
            } else if let Ok(c) = factor.parse::<GaussianRational>() {
                coef = &coef * &c;
            } else {
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<u8>().map_err(|_| err())?),
                    None => (factor.as_str(), 1),
                };
                let g = ring.generator_index(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
                let mut v = vec![0u8; g + 1];
                v[g] = exp;
                mono = mono.mul(&Monomial::from_exponents(v));
            }
        }
        if neg {
            coef = -coef;
        }
        if mono.degree() <= ring.order() {
            out.insert_term(mono, coef);
        }
    }
    Ok(out)
}

fn split_factors(body: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for ch in body.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                if cur.is_empty() {
                    return None;
                }
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if cur.is_empty() || depth != 0 {
        return None;
    }
    out.push(cur);
    Some(out)
}

impl Scalar for TruncatedPoly {
    fn zero() -> Self {
        Self::constant(GaussianRational::zero())
    }

    fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn conj(&self) -> Self {
        conj_poly(self)
    }

    fn from_gaussian(c: GaussianRational) -> Self {
        Self::constant(c)
    }

    fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = Self { ring: self.ring.clone(), terms: BTreeMap::new() };
        for (m, v) in &self.terms {
            out.insert_term(m.clone(), v * c);
        }
        out
    }
    fn map_linear<E>(v: &[Self], f: &mut LinearMap<'_, E>) -> Result<Vec<Self>, E> {
        let ring = v.iter().find_map(|p| p.ring.clone());
        let mut monomials: Vec<Monomial> = v.iter().flat_map(|p| p.terms.keys().cloned()).collect();
        monomials.sort();
        monomials.dedup();
        let zero_in = |r: &Option<Arc<ParameterRing>>| Self { ring: r.clone(), terms: BTreeMap::new() };
        if monomials.is_empty() {
            let zeros = vec![GaussianRational::zero(); v.len()];
            let len = f(&zeros)?.len();
            return Ok(vec![zero_in(&ring); len]);
        }
        let mut out: Vec<Self> = Vec::new();
        for m in monomials {
            let coeffs: Vec<GaussianRational> = v.iter().map(|p| p.coefficient(&m)).collect();
            let image = f(&coeffs)?;
            if out.is_empty() {
                out = vec![zero_in(&ring); image.len()];
            }
            for (slot, c) in out.iter_mut().zip(image) {
                slot.insert_term(m.clone(), c);
            }
        }
        Ok(out)
    }

    fn parse_coefficient(s: &str, ctx: &ParseContext) -> Result<Self, ScalarError> {
        match &ctx.ring {
            Some(r) => parse_poly(s, r),
            None => Ok(Self::constant(s.parse()?)),
        }
    }

    fn coefficient_literal(&self) -> String {
        format!("({self})")
    }
}
