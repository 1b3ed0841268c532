//! Invariant forms: the bigraded exterior algebra on φ¹..φⁿ, φ̄¹..φ̄ⁿ.
//!
//! Generators are ordered holomorphic first (φ¹ < … < φⁿ) and then
//! anti-holomorphic (φ̄¹ < … < φ̄ⁿ). A monomial is stored as a pair of
//! bitmasks and always means the wedge of its factors in that order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalars::{GaussianRational, ParseContext, Scalar, ScalarError};

/// Largest supported complex dimension (masks are `u16`).
pub const MAX_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("bad form literal `{0}`")]
    Syntax(String),
    #[error("coframe index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn total(self) -> usize {
        self.p + self.q
    }

    pub fn conj(self) -> Self {
        Self::new(self.q, self.p)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// A coframe monomial: bit `i` of `hol` is φ^{i+1}, bit `j` of `antihol` is φ̄^{j+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub hol: u16,
    pub antihol: u16,
}

fn bits(mask: u16) -> impl Iterator<Item = usize> {
    (0..16).filter(move |i| mask & (1 << i) != 0)
}

fn cmp_lex(a: u16, b: u16) -> Ordering {
    bits(a).cmp(bits(b))
}

impl BasisIndex {
    pub const ONE: BasisIndex = BasisIndex { hol: 0, antihol: 0 };

    pub fn new(hol: u16, antihol: u16) -> Self {
        Self { hol, antihol }
    }

    /// From 1-based factor lists.
    pub fn from_indices(hol: &[usize], antihol: &[usize]) -> Self {
        let mask = |v: &[usize]| v.iter().fold(0u16, |m, &i| m | (1 << (i - 1)));
        Self::new(mask(hol), mask(antihol))
    }

    pub fn bidegree(self) -> Bidegree {
        Bidegree::new(self.hol.count_ones() as usize, self.antihol.count_ones() as usize)
    }

    pub fn degree(self) -> usize {
        self.bidegree().total()
    }

    /// 1-based holomorphic factor indices, ascending.
    pub fn hol_indices(self) -> Vec<usize> {
        bits(self.hol).map(|i| i + 1).collect()
    }

    pub fn antihol_indices(self) -> Vec<usize> {
        bits(self.antihol).map(|i| i + 1).collect()
    }

    /// Generator positions in canonical order (hol `i` at `i`, antihol `j` at `n + j`).
    fn positions(self, n: usize) -> Vec<usize> {
        bits(self.hol).chain(bits(self.antihol).map(|j| n + j)).collect()
    }

    fn from_positions(positions: &[usize], n: usize) -> Self {
        let mut idx = Self::ONE;
        for &g in positions {
            if g < n {
                idx.hol |= 1 << g;
            } else {
                idx.antihol |= 1 << (g - n);
            }
        }
        idx
    }
}

/// Monomials compare by total degree, then holomorphic degree descending,
/// then lexicographically on the holomorphic and anti-holomorphic tuples.
impl Ord for BasisIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.hol.count_ones().cmp(&self.hol.count_ones()))
            .then_with(|| cmp_lex(self.hol, other.hol))
            .then_with(|| cmp_lex(self.antihol, other.antihol))
    }
}

impl PartialOrd for BasisIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .hol_indices()
            .into_iter()
            .map(|i| format!("phi[{i}]"))
            .chain(self.antihol_indices().into_iter().map(|j| format!("phibar[{j}]")))
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("^"))
        }
    }
}

/// Sign of the permutation sorting `seq` ascending, or `None` on a repeat.
pub fn sort_sign(seq: &[usize]) -> Option<i32> {
    let mut inversions = 0usize;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            match seq[a].cmp(&seq[b]) {
                Ordering::Equal => return None,
                Ordering::Greater => inversions += 1,
                Ordering::Less => {}
            }
        }
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

fn k_subsets(n: usize, k: usize) -> Vec<u16> {
    fn rec(start: usize, n: usize, k: usize, mask: u16, out: &mut Vec<u16>) {
        if k == 0 {
            out.push(mask);
            return;
        }
        for i in start..n {
            if n - i >= k {
                rec(i + 1, n, k - 1, mask | (1 << i), out);
            }
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

/// All monomials of a bidegree: holomorphic part in the outer loop, both in
/// lexicographic order of their index tuples. This is the coordinate order
/// of every matrix in the crate.
pub fn basis(n: usize, bd: Bidegree) -> Vec<BasisIndex> {
    let holo = k_subsets(n, bd.p);
    let anti = k_subsets(n, bd.q);
    holo.iter().flat_map(|&h| anti.iter().map(move |&a| BasisIndex::new(h, a))).collect()
}

/// θ_i (holomorphic) or θ̄_i, dual to the coframe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FrameVector {
    pub index: usize,
    pub holomorphic: bool,
}

impl FrameVector {
    pub fn theta(index: usize) -> Self {
        Self { index, holomorphic: true }
    }

    pub fn theta_bar(index: usize) -> Self {
        Self { index, holomorphic: false }
    }
}

/// An invariant form with coefficients in `S`. Components of several
/// bidegrees may coexist; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<S> {
    n: usize,
    terms: BTreeMap<BasisIndex, S>,
}

pub type ConstForm = Form<GaussianRational>;

impl<S: Scalar> Form<S> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dimension {n} exceeds {MAX_DIM}");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn monomial(n: usize, idx: BasisIndex, c: S) -> Self {
        let mut f = Self::zero(n);
        f.add_term(idx, c);
        f
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self::monomial(n, BasisIndex::ONE, c)
    }

    /// φ^k, 1-based.
    pub fn phi(n: usize, k: usize) -> Self {
        Self::monomial(n, BasisIndex::from_indices(&[k], &[]), S::one())
    }

    /// φ̄^k, 1-based.
    pub fn phibar(n: usize, k: usize) -> Self {
        Self::monomial(n, BasisIndex::from_indices(&[], &[k]), S::one())
    }

    /// Wedge of coframe generators given by 1-based indices, in the order
    /// holomorphic then anti-holomorphic.
    pub fn basis_form(n: usize, hol: &[usize], antihol: &[usize]) -> Self {
        let mut f = Self::constant(n, S::one());
        for &i in hol {
            f = f.wedge(&Self::phi(n, i));
        }
        for &j in antihol {
            f = f.wedge(&Self::phibar(n, j));
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisIndex, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &BasisIndex) -> S {
        self.terms.get(idx).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The unique bidegree of a nonzero homogeneous form.
    pub fn bidegree(&self) -> Option<Bidegree> {
        let mut it = self.terms.keys().map(|k| k.bidegree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn bidegrees(&self) -> Vec<Bidegree> {
        let mut v: Vec<Bidegree> = self.terms.keys().map(|k| k.bidegree()).collect();
        v.dedup();
        v.sort_by(|a, b| a.total().cmp(&b.total()).then(b.p.cmp(&a.p)));
        v.dedup();
        v
    }

    pub fn add_term(&mut self, idx: BasisIndex, c: S) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&idx) {
            Some(v) => v + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(idx, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(*k, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coeffs(|v| c.clone() * v.clone())
    }

    pub fn scale_gaussian(&self, c: &GaussianRational) -> Self {
        self.map_coeffs(|v| v.scale(c))
    }

    pub fn map_coeffs<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Form<T> {
        let mut out = Form::<T>::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(*k, f(v));
        }
        out
    }

    /// The (p,q)-component.
    pub fn component(&self, bd: Bidegree) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(k, _)| k.bidegree() == bd).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn degree_component(&self, k: usize) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().filter(|(i, _)| i.degree() == k).map(|(i, v)| (*i, v.clone())).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "wedge of forms in different dimensions");
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((idx, sign)) = wedge_monomials(self.n, *a, *b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(idx, if sign < 0 { -c } else { c });
                }
            }
        }
        out
    }

    pub fn interior(&self, v: FrameVector) -> Self {
        let mut out = Self::zero(self.n);
        for (idx, c) in &self.terms {
            if let Some((rest, sign)) = interior_monomial(self.n, v, *idx) {
                out.add_term(rest, if sign < 0 { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (idx, c) in &self.terms {
            let (cidx, sign) = conjugate_monomial(self.n, *idx);
            let cc = c.conj();
            out.add_term(cidx, if sign < 0 { -cc } else { cc });
        }
        out
    }

    /// Parses a form literal such as `-1 phi[1]^phi[2] + (1+i) phi[1]^phibar[1]`.
    pub fn parse(s: &str, n: usize, ctx: &ParseContext) -> Result<Self, FormError> {
        parse_form(s, n, ctx)
    }
}

fn wedge_monomials(n: usize, a: BasisIndex, b: BasisIndex) -> Option<(BasisIndex, i32)> {
    if a.hol & b.hol != 0 || a.antihol & b.antihol != 0 {
        return None;
    }
    let mut seq = a.positions(n);
    seq.extend(b.positions(n));
    let sign = sort_sign(&seq)?;
    Some((BasisIndex::new(a.hol | b.hol, a.antihol | b.antihol), sign))
}

fn interior_monomial(n: usize, v: FrameVector, idx: BasisIndex) -> Option<(BasisIndex, i32)> {
    assert!(v.index >= 1 && v.index <= n, "frame vector index out of range");
    let target = if v.holomorphic { v.index - 1 } else { n + v.index - 1 };
    let positions = idx.positions(n);
    let at = positions.iter().position(|&g| g == target)?;
    let rest: Vec<usize> = positions.iter().copied().filter(|&g| g != target).collect();
    let sign = if at % 2 == 0 { 1 } else { -1 };
    Some((BasisIndex::from_positions(&rest, n), sign))
}

/// Conjugate of a canonical monomial: every φ^i becomes φ̄^i and vice versa,
/// keeping the factor order, then the result is sorted back into canonical
/// order with the corresponding sign.
fn conjugate_monomial(n: usize, idx: BasisIndex) -> (BasisIndex, i32) {
    let swapped: Vec<usize> = idx.positions(n).into_iter().map(|g| if g < n { g + n } else { g - n }).collect();
    let sign = sort_sign(&swapped).expect("conjugation cannot repeat a factor");
    (BasisIndex::new(idx.antihol, idx.hol), sign)
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                if *idx == BasisIndex::ONE {
                    c.coefficient_literal()
                } else {
                    format!("{} {}", c.coefficient_literal(), idx)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Splits at top-level ` + ` / ` - ` separators; the flag marks negation.
fn split_terms(s: &str) -> Vec<(bool, String)> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0i32;
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let is_sep = depth == 0
            && (ch == '+' || ch == '-')
            && i > 0
            && chars[i - 1].is_whitespace()
            && chars.get(i + 1).is_some_and(|c| c.is_whitespace())
            && !cur.trim().is_empty();
        if is_sep {
            out.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        i += 1;
    }
    out.push((neg, cur));
    out
}

fn parse_monomial(s: &str, n: usize) -> Result<(BasisIndex, i32), FormError> {
    let err = || FormError::Syntax(s.to_string());
    let mut positions = Vec::new();
    for factor in s.split('^') {
        let (hol, rest) = if let Some(r) = factor.strip_prefix("phibar[") {
            (false, r)
        } else if let Some(r) = factor.strip_prefix("phi[") {
            (true, r)
        } else {
            return Err(err());
        };
        let index: usize = rest.strip_suffix(']').ok_or_else(err)?.parse().map_err(|_| err())?;
        if index == 0 || index > n {
            return Err(FormError::IndexOutOfRange { index, n });
        }
        positions.push(if hol { index - 1 } else { n + index - 1 });
    }
    // a repeated factor makes the monomial vanish
    match sort_sign(&positions) {
        Some(sign) => Ok((BasisIndex::from_positions(&positions, n), sign)),
        None => Ok((BasisIndex::ONE, 0)),
    }
}

fn parse_form<S: Scalar>(s: &str, n: usize, ctx: &ParseContext) -> Result<Form<S>, FormError> {
    let err = || FormError::Syntax(s.to_string());
    let mut out = Form::<S>::zero(n);
    if s.trim() == "0" {
        return Ok(out);
    }
    for (neg, term) in split_terms(s) {
        let term = term.trim();
        if term.is_empty() {
            return Err(err());
        }
        // the monomial starts at the first top-level "phi"
        let mut depth = 0i32;
        let mut split_at = None;
        for (i, ch) in term.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                'p' if depth == 0 && term[i..].starts_with("phi") => {
                    split_at = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let (coef_str, mono_str) = match split_at {
            Some(i) => (term[..i].trim(), Some(&term[i..])),
            None => (term, None),
        };
        let coef_str = coef_str.strip_suffix('*').unwrap_or(coef_str).trim();
        let (minus, coef_str) = match coef_str.strip_prefix('-') {
            Some(rest) if rest.trim_start().starts_with('(') || rest.trim().is_empty() => (true, rest.trim()),
            _ => (false, coef_str),
        };
        let mut coef = if coef_str.is_empty() {
            if mono_str.is_none() {
                return Err(err());
            }
            S::one()
        } else if let Some(inner) = coef_str.strip_prefix('(').and_then(|c| c.strip_suffix(')')) {
            S::parse_coefficient(inner, ctx)?
        } else {
            S::parse_coefficient(coef_str, ctx)?
        };
        if minus != neg {
            coef = -coef;
        }
        let (idx, sign) = match mono_str {
            Some(m) => {
                let compact: String = m.chars().filter(|c| !c.is_whitespace()).collect();
                parse_monomial(&compact, n)?
            }
            None => (BasisIndex::ONE, 1),
        };
        match sign {
            0 => {}
            1 => out.add_term(idx, coef),
            _ => out.add_term(idx, -coef),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type F = ConstForm;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn lit(s: &str) -> F {
        F::parse(s, 3, &ParseContext::default()).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let p1 = F::phi(3, 1);
        let p2 = F::phi(3, 2);
        assert!(p1.wedge(&p1).is_zero());
        assert_eq!(p2.wedge(&p1), p1.wedge(&p2).neg());
        let m = p1.wedge(&p2).wedge(&F::phibar(3, 1));
        assert_eq!(m, F::monomial(3, BasisIndex::from_indices(&[1, 2], &[1]), g("1")));
        // anti-holomorphic factor moved past a holomorphic one
        assert_eq!(F::phibar(3, 1).wedge(&p1), p1.wedge(&F::phibar(3, 1)).neg());
    }

    #[test]
    fn interior_examples() {
        let p23 = F::basis_form(3, &[2, 3], &[]);
        assert_eq!(p23.interior(FrameVector::theta(2)), F::phi(3, 3));
        assert_eq!(p23.interior(FrameVector::theta(3)), F::phi(3, 2).neg());
        assert!(F::phibar(3, 1).interior(FrameVector::theta(1)).is_zero());
        assert_eq!(F::phibar(3, 1).interior(FrameVector::theta_bar(1)), F::constant(3, g("1")));
        // θ̄₁ ⌟ (φ¹∧φ̄¹) passes one holomorphic factor
        let m = F::basis_form(3, &[1], &[1]);
        assert_eq!(m.interior(FrameVector::theta_bar(1)), F::phi(3, 1).neg());
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(F::phi(3, 3).conjugate(), F::phibar(3, 3));
        // conj(i φ¹∧φ̄²) = -i φ̄¹∧φ² = i φ²∧φ̄¹
        let a = F::basis_form(3, &[1], &[2]).scale(&g("i"));
        assert_eq!(a.conjugate(), F::basis_form(3, &[2], &[1]).scale(&g("i")));
        let b = F::basis_form(3, &[1, 2], &[1]);
        assert_eq!(b.conjugate().conjugate(), b);
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(
            basis(3, Bidegree::new(1, 0)),
            vec![
                BasisIndex::from_indices(&[1], &[]),
                BasisIndex::from_indices(&[2], &[]),
                BasisIndex::from_indices(&[3], &[])
            ]
        );
        assert_eq!(basis(3, Bidegree::new(2, 2)).len(), 9);
        assert_eq!(basis(3, Bidegree::new(3, 3)).len(), 1);
        let b = basis(4, Bidegree::new(2, 1));
        assert_eq!(b[0], BasisIndex::from_indices(&[1, 2], &[1]));
        assert_eq!(b[4], BasisIndex::from_indices(&[1, 3], &[1]));
        // (1,4) precedes (2,3) lexicographically
        let h = basis(4, Bidegree::new(2, 0));
        assert_eq!(h[2], BasisIndex::from_indices(&[1, 4], &[]));
        assert_eq!(h[3], BasisIndex::from_indices(&[2, 3], &[]));
        // basis order agrees with BasisIndex ordering
        let mut sorted = b.clone();
        sorted.sort();
        assert_eq!(sorted, b);
    }

    #[test]
    fn literal_round_trip() {
        for s in [
            "0",
            "-1 phi[1]^phi[2]",
            "-1 phi[1]^phi[2] + 1 phi[1]^phibar[1]",
            "(1+i) phi[3] + -1/2 phibar[2]",
            "2",
            "i phi[1]^phi[2]^phibar[1]",
        ] {
            assert_eq!(lit(s).to_string(), s);
        }
        assert_eq!(lit("phi[2]^phi[1]"), lit("-1 phi[1]^phi[2]"));
        assert_eq!(lit("phi[1] - 2 phi[2]"), lit("1 phi[1] + -2 phi[2]"));
        assert_eq!(lit("-phi[1]"), lit("-1 phi[1]"));
        assert!(lit("phi[1]^phi[1]").is_zero());
        assert!(F::parse("phi[4]", 3, &ParseContext::default()).is_err());
        assert!(F::parse("psi[1]", 3, &ParseContext::default()).is_err());
        assert!(F::parse("1 + ", 3, &ParseContext::default()).is_err());
    }

    fn arb_monomial(n: usize) -> impl Strategy<Value = BasisIndex> {
        let full = (1u16 << n) - 1;
        (0..=full, 0..=full).prop_map(|(h, a)| BasisIndex::new(h, a))
    }

    fn arb_form(n: usize) -> impl Strategy<Value = F> {
        prop::collection::vec((arb_monomial(n), -3i64..=3, -3i64..=3), 0..4).prop_map(move |terms| {
            let mut f = F::zero(n);
            for (idx, re, im) in terms {
                f.add_term(idx, GaussianRational::from_ints(re, im));
            }
            f
        })
    }

    fn parity(idx: BasisIndex) -> bool {
        idx.degree() % 2 == 1
    }

    proptest! {
        #[test]
        fn wedge_is_associative_and_graded_commutative(
            a in arb_monomial(4), b in arb_monomial(4), c in arb_monomial(4)
        ) {
            let fa = F::monomial(4, a, g("1"));
            let fb = F::monomial(4, b, g("2"));
            let fc = F::monomial(4, c, g("i"));
            prop_assert_eq!(fa.wedge(&fb).wedge(&fc), fa.wedge(&fb.wedge(&fc)));
            let ab = fa.wedge(&fb);
            let ba = fb.wedge(&fa);
            if parity(a) && parity(b) {
                prop_assert_eq!(ab, ba.neg());
            } else {
                prop_assert_eq!(ab, ba);
            }
        }

        #[test]
        fn interior_is_an_antiderivation(a in arb_monomial(3), b in arb_form(3), k in 1usize..=3, hol in any::<bool>()) {
            let v = FrameVector { index: k, holomorphic: hol };
            let fa = F::monomial(3, a, g("1"));
            let lhs = fa.wedge(&b).interior(v);
            let second = fa.wedge(&b.interior(v));
            let second = if parity(a) { second.neg() } else { second };
            prop_assert_eq!(lhs, fa.interior(v).wedge(&b).add(&second));
            prop_assert!(b.interior(v).interior(v).is_zero());
        }

        #[test]
        fn conjugation_is_multiplicative_involution(a in arb_form(3), b in arb_form(3)) {
            prop_assert_eq!(a.wedge(&b).conjugate(), a.conjugate().wedge(&b.conjugate()));
            prop_assert_eq!(a.conjugate().conjugate(), a);
        }

        #[test]
        fn printed_forms_parse_back(a in arb_form(3)) {
            prop_assert_eq!(lit(&a.to_string()), a);
        }
    }

    #[test]
    fn basis_sizes_are_binomial() {
        fn binom(n: usize, k: usize) -> usize {
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        for n in 1..=5 {
            for p in 0..=n {
                for q in 0..=n {
                    assert_eq!(basis(n, Bidegree::new(p, q)).len(), binom(n, p) * binom(n, q));
                }
            }
        }
    }
}
