//! de Rham, Dolbeault, Bott-Chern and Aeppli cohomology of invariant forms,
//! the L-complexes whose cohomology realises Bott-Chern and Aeppli groups,
//! and the natural maps between them.

use std::fmt;

use thiserror::Error;

use crate::exterior::{Bidegree, ConstForm, Form};
use crate::linalg::{image, kernel, quotient, rank, ExactMatrix, LinalgError, Matrix, Reducer, Vector};
use crate::scalars::{GaussianRational, Scalar};
use crate::structure::{Ambient, ManifoldSpec, Operator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("form {0} does not lie in the cochain space of the group")]
    NotInAmbient(String),
    #[error("L-complex shape ({p},{q}) out of range for dimension {n}")]
    ShapeOutOfRange { p: usize, q: usize, n: usize },
    #[error("L-complex position {k} out of range")]
    PositionOutOfRange { k: usize },
    #[error("bidegree {0} out of range")]
    BidegreeOutOfRange(Bidegree),
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CohomologyKind {
    DeRham,
    Dolbeault,
    AntiDolbeault,
    BottChern,
    Aeppli,
    LComplex,
}

impl CohomologyKind {
    pub fn short_name(self) -> &'static str {
        match self {
            CohomologyKind::DeRham => "dr",
            CohomologyKind::Dolbeault => "dolbeault",
            CohomologyKind::AntiDolbeault => "antidolbeault",
            CohomologyKind::BottChern => "bc",
            CohomologyKind::Aeppli => "a",
            CohomologyKind::LComplex => "l",
        }
    }
}

impl fmt::Display for CohomologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Degree {
    Total(usize),
    Bi(Bidegree),
    /// Position `k` of the L-complex of shape `shape`.
    L { shape: Bidegree, k: usize },
}

/// A finite-dimensional cohomology group of invariant forms: representatives
/// plus a reducer computing class coordinates.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub kind: CohomologyKind,
    pub degree: Degree,
    pub ambient: Ambient,
    pub dim: usize,
    pub representatives: Vec<ConstForm>,
    reducer: Reducer,
}

impl CohomologyGroup {
    fn from_maps(
        kind: CohomologyKind,
        degree: Degree,
        ambient: Ambient,
        incoming: &ExactMatrix,
        outgoing: &ExactMatrix,
    ) -> Result<Self, CohomologyError> {
        debug_assert_eq!(incoming.rows(), ambient.dim());
        debug_assert_eq!(outgoing.cols(), ambient.dim());
        if incoming.cols() > 0 && outgoing.rows() > 0 && !outgoing.mul(incoming).is_zero() {
            return Err(CohomologyError::InvariantViolation(format!(
                "consecutive differentials do not compose to zero for {kind} at {degree:?}"
            )));
        }
        let q = quotient(&kernel(outgoing), &image(incoming)).map_err(|e| match e {
            LinalgError::NotContained => CohomologyError::InvariantViolation(format!(
                "coboundaries escape cocycles for {kind} at {degree:?}"
            )),
            other => other.into(),
        })?;
        let representatives = q.representatives.iter().map(|v| ambient.to_form(v)).collect();
        Ok(Self { kind, degree, ambient, dim: q.dim, representatives, reducer: q.reducer })
    }

    /// Class coordinates of a cocycle.
    pub fn reduce(&self, f: &ConstForm) -> Result<Vector, CohomologyError> {
        let (v, rest) = self.ambient.project(f);
        if !rest.is_zero() {
            return Err(CohomologyError::NotInAmbient(f.to_string()));
        }
        Ok(self.reducer.reduce(&v)?)
    }

    pub fn is_cocycle(&self, f: &ConstForm) -> bool {
        let (v, rest) = self.ambient.project(f);
        rest.is_zero() && self.reducer.in_numerator(&v)
    }

    pub fn is_zero_class(&self, f: &ConstForm) -> Result<bool, CohomologyError> {
        Ok(self.reduce(f)?.iter().all(Scalar::is_zero))
    }

    /// Class coordinates of a cocycle with polynomial coefficients, reduced
    /// monomial by monomial.
    pub fn reduce_poly<S: Scalar>(&self, f: &Form<S>) -> Result<Vec<S>, CohomologyError> {
        let (v, rest) = self.ambient.project(f);
        if !rest.is_zero() {
            return Err(CohomologyError::NotInAmbient(f.to_string()));
        }
        Ok(self.reducer.reduce_scalars(&v)?)
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }
}

fn check_bidegree(n: usize, bd: Bidegree) -> Result<(), CohomologyError> {
    if bd.p > n || bd.q > n {
        return Err(CohomologyError::BidegreeOutOfRange(bd));
    }
    Ok(())
}

/// Matrix of `op` from `src` (possibly out of range, giving an empty source)
/// into the ambient `target`.
fn op_into<S: Scalar>(spec: &ManifoldSpec<S>, op: Operator, src: Option<Bidegree>, target: &Ambient) -> Matrix<S> {
    let n = spec.dim();
    match src {
        Some(b) if b.p <= n && b.q <= n => Ambient::new(n, vec![b]).matrix_of(target, false, |f| spec.apply(op, f)),
        _ => Matrix::zeros(target.dim(), 0),
    }
}

fn op_from<S: Scalar>(spec: &ManifoldSpec<S>, op: Operator, src: &Ambient) -> Matrix<S> {
    let n = spec.dim();
    let b = src.blocks()[0];
    let target = Ambient::new(n, op.targets(n, b));
    src.matrix_of(&target, false, |f| spec.apply(op, f))
}

fn prev(b: Bidegree, dp: usize, dq: usize) -> Option<Bidegree> {
    Some(Bidegree::new(b.p.checked_sub(dp)?, b.q.checked_sub(dq)?))
}

pub fn de_rham(spec: &ManifoldSpec<GaussianRational>, k: usize) -> Result<CohomologyGroup, CohomologyError> {
    let n = spec.dim();
    if k > 2 * n {
        return Err(CohomologyError::PositionOutOfRange { k });
    }
    let ambient = Ambient::total_degree(n, k);
    let incoming = match k.checked_sub(1) {
        Some(j) => Ambient::total_degree(n, j).matrix_of(&ambient, false, |f| spec.d(f)),
        None => Matrix::zeros(ambient.dim(), 0),
    };
    let outgoing = ambient.matrix_of(&Ambient::total_degree(n, k + 1), false, |f| spec.d(f));
    CohomologyGroup::from_maps(CohomologyKind::DeRham, Degree::Total(k), ambient, &incoming, &outgoing)
}

pub fn dolbeault(spec: &ManifoldSpec<GaussianRational>, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    let bd = Bidegree::new(p, q);
    check_bidegree(spec.dim(), bd)?;
    let ambient = Ambient::new(spec.dim(), vec![bd]);
    let incoming = op_into(spec, Operator::Dbar, prev(bd, 0, 1), &ambient);
    let outgoing = op_from(spec, Operator::Dbar, &ambient);
    CohomologyGroup::from_maps(CohomologyKind::Dolbeault, Degree::Bi(bd), ambient, &incoming, &outgoing)
}

/// Cohomology of ∂.
pub fn anti_dolbeault(spec: &ManifoldSpec<GaussianRational>, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    let bd = Bidegree::new(p, q);
    check_bidegree(spec.dim(), bd)?;
    let ambient = Ambient::new(spec.dim(), vec![bd]);
    let incoming = op_into(spec, Operator::Partial, prev(bd, 1, 0), &ambient);
    let outgoing = op_from(spec, Operator::Partial, &ambient);
    CohomologyGroup::from_maps(CohomologyKind::AntiDolbeault, Degree::Bi(bd), ambient, &incoming, &outgoing)
}

/// ker d / im ∂∂̄ at (p,q).
pub fn bott_chern(spec: &ManifoldSpec<GaussianRational>, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    let bd = Bidegree::new(p, q);
    check_bidegree(spec.dim(), bd)?;
    let ambient = Ambient::new(spec.dim(), vec![bd]);
    let incoming = op_into(spec, Operator::DDbar, prev(bd, 1, 1), &ambient);
    let outgoing = op_from(spec, Operator::D, &ambient);
    CohomologyGroup::from_maps(CohomologyKind::BottChern, Degree::Bi(bd), ambient, &incoming, &outgoing)
}

/// ker ∂∂̄ / (im ∂ + im ∂̄) at (p,q).
pub fn aeppli(spec: &ManifoldSpec<GaussianRational>, p: usize, q: usize) -> Result<CohomologyGroup, CohomologyError> {
    let bd = Bidegree::new(p, q);
    check_bidegree(spec.dim(), bd)?;
    let ambient = Ambient::new(spec.dim(), vec![bd]);
    let from_del = op_into(spec, Operator::Partial, prev(bd, 1, 0), &ambient);
    let from_dbar = op_into(spec, Operator::Dbar, prev(bd, 0, 1), &ambient);
    let incoming = Matrix::from_blocks(&[vec![from_del, from_dbar]]);
    let outgoing = op_from(spec, Operator::DDbar, &ambient);
    CohomologyGroup::from_maps(CohomologyKind::Aeppli, Degree::Bi(bd), ambient, &incoming, &outgoing)
}

/// The global invariant L-complex of shape (P,Q).
///
/// Below the junction `L^k` collects the (r,s) with r+s = k, r < P, s < Q and
/// the differential is d followed by projection; at position P+Q−2 the
/// differential is ∂∂̄; from position P+Q−1 on `L^k` collects the (r,s) with
/// r+s = k+1, r ≥ P, s ≥ Q and the differential is d.
#[derive(Debug, Clone)]
pub struct LComplex<S: Scalar> {
    pub shape: Bidegree,
    spaces: Vec<Ambient>,
    differentials: Vec<Matrix<S>>,
}

impl<S: Scalar> LComplex<S> {
    /// Shapes with 0 ≤ P,Q ≤ n+1 are accepted.
    pub fn build(spec: &ManifoldSpec<S>, shape: Bidegree) -> Result<Self, CohomologyError> {
        let n = spec.dim();
        let (pp, qq) = (shape.p, shape.q);
        if pp > n + 1 || qq > n + 1 {
            return Err(CohomologyError::ShapeOutOfRange { p: pp, q: qq, n });
        }
        let top = 2 * n + 1;
        let spaces: Vec<Ambient> = (0..=top).map(|k| Ambient::new(n, l_bidegrees(n, shape, k))).collect();
        let junction = (pp + qq).checked_sub(2);
        let mut differentials = Vec::with_capacity(top);
        for k in 0..top {
            let (src, dst) = (&spaces[k], &spaces[k + 1]);
            let m = if Some(k) == junction {
                src.matrix_of(dst, true, |f| spec.apply(Operator::DDbar, f))
            } else if junction.is_some_and(|j| k < j) {
                src.matrix_of(dst, true, |f| spec.d(f))
            } else {
                src.matrix_of(dst, false, |f| spec.d(f))
            };
            differentials.push(m);
        }
        for k in 1..differentials.len() {
            let (a, b) = (&differentials[k - 1], &differentials[k]);
            if a.cols() > 0 && b.rows() > 0 && !b.mul(a).is_zero() {
                return Err(CohomologyError::InvariantViolation(format!(
                    "L-complex of shape {shape}: differentials at positions {} and {k} do not compose to zero",
                    k - 1
                )));
            }
        }
        Ok(Self { shape, spaces, differentials })
    }

    pub fn len(&self) -> usize {
        self.spaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spaces.is_empty()
    }

    pub fn space(&self, k: usize) -> &Ambient {
        &self.spaces[k]
    }

    /// δ_k : L^k → L^(k+1); the zero map past the top.
    pub fn differential(&self, k: usize) -> Matrix<S> {
        match self.differentials.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(0, self.spaces.get(k).map_or(0, Ambient::dim)),
        }
    }

    /// δ_k applied to a form of `L^k`.
    pub fn apply(&self, k: usize, f: &Form<S>) -> Form<S> {
        let v = self.spaces[k].to_vector(f);
        match self.differentials.get(k) {
            Some(m) => self.spaces[k + 1].to_form(&m.mul_vec(&v)),
            None => Form::zero(f.dim()),
        }
    }

    /// Position of the junction ∂∂̄, if the shape has one.
    pub fn junction(&self) -> Option<usize> {
        (self.shape.p + self.shape.q).checked_sub(2)
    }
}

/// Bidegrees making up `L^k` of the given shape.
pub fn l_bidegrees(n: usize, shape: Bidegree, k: usize) -> Vec<Bidegree> {
    let (pp, qq) = (shape.p, shape.q);
    let low = k + 2 <= pp + qq;
    let total = if low { k } else { k + 1 };
    (0..=total)
        .rev()
        .map(|r| Bidegree::new(r, total - r))
        .filter(|b| b.p <= n && b.q <= n)
        .filter(|b| if low { b.p < pp && b.q < qq } else { b.p >= pp && b.q >= qq })
        .collect()
}

pub fn l_cohomology(
    spec: &ManifoldSpec<GaussianRational>,
    p: usize,
    q: usize,
    k: usize,
) -> Result<CohomologyGroup, CohomologyError> {
    let lc = LComplex::build(spec, Bidegree::new(p, q))?;
    l_cohomology_of(&lc, k)
}

pub fn l_cohomology_of(lc: &LComplex<GaussianRational>, k: usize) -> Result<CohomologyGroup, CohomologyError> {
    if k >= lc.len() {
        return Err(CohomologyError::PositionOutOfRange { k });
    }
    let ambient = lc.space(k).clone();
    let incoming = match k.checked_sub(1) {
        Some(j) => lc.differential(j),
        None => Matrix::zeros(ambient.dim(), 0),
    };
    let outgoing = lc.differential(k);
    CohomologyGroup::from_maps(CohomologyKind::LComplex, Degree::L { shape: lc.shape, k }, ambient, &incoming, &outgoing)
}

/// Any group by kind and bidegree (de Rham uses the total degree).
pub fn group(
    spec: &ManifoldSpec<GaussianRational>,
    kind: CohomologyKind,
    bd: Bidegree,
) -> Result<CohomologyGroup, CohomologyError> {
    match kind {
        CohomologyKind::DeRham => de_rham(spec, bd.total()),
        CohomologyKind::Dolbeault => dolbeault(spec, bd.p, bd.q),
        CohomologyKind::AntiDolbeault => anti_dolbeault(spec, bd.p, bd.q),
        CohomologyKind::BottChern => bott_chern(spec, bd.p, bd.q),
        CohomologyKind::Aeppli => aeppli(spec, bd.p, bd.q),
        CohomologyKind::LComplex => Err(CohomologyError::InvariantViolation("L-complex groups need a shape".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NaturalMapKind {
    BcToDolbeault,
    BcToAntiDolbeault,
    DolbeaultToAeppli,
    AntiDolbeaultToAeppli,
    BcToDeRham,
    DeRhamToAeppli,
}

#[derive(Debug, Clone)]
pub struct NaturalMap {
    pub kind: NaturalMapKind,
    pub bidegree: Bidegree,
    /// Column `j` holds the target coordinates of source representative `j`.
    pub matrix: ExactMatrix,
    pub rank: usize,
}

/// Induced map on cohomology: the identity on forms (for de Rham to Aeppli,
/// the (p,q)-component) followed by reduction in the target group.
pub fn natural_map(
    spec: &ManifoldSpec<GaussianRational>,
    which: NaturalMapKind,
    p: usize,
    q: usize,
) -> Result<NaturalMap, CohomologyError> {
    use NaturalMapKind::*;
    let bd = Bidegree::new(p, q);
    let (source, target) = match which {
        BcToDolbeault => (bott_chern(spec, p, q)?, dolbeault(spec, p, q)?),
        BcToAntiDolbeault => (bott_chern(spec, p, q)?, anti_dolbeault(spec, p, q)?),
        DolbeaultToAeppli => (dolbeault(spec, p, q)?, aeppli(spec, p, q)?),
        AntiDolbeaultToAeppli => (anti_dolbeault(spec, p, q)?, aeppli(spec, p, q)?),
        BcToDeRham => (bott_chern(spec, p, q)?, de_rham(spec, p + q)?),
        DeRhamToAeppli => (de_rham(spec, p + q)?, aeppli(spec, p, q)?),
    };
    let cols = source
        .representatives
        .iter()
        .map(|r| {
            let f = if which == DeRhamToAeppli { r.component(bd) } else { r.clone() };
            target.reduce(&f)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let matrix = ExactMatrix::from_columns(target.dim, cols);
    let rank = rank(&matrix);
    Ok(NaturalMap { kind: which, bidegree: bd, matrix, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SubspaceBasis;
    use crate::structure::{parse_spec, SpecFile};
    use proptest::prelude::*;

    type F = ConstForm;

    fn fixed(text: &str) -> ManifoldSpec<GaussianRational> {
        match parse_spec(text).unwrap() {
            SpecFile::Fixed(s) => s,
            SpecFile::Family(_) => panic!("expected a fixed spec"),
        }
    }

    fn iwasawa() -> ManifoldSpec<GaussianRational> {
        fixed("dim = 3\ndphi[3] = -1 phi[1]^phi[2]\n")
    }

    fn torus() -> ManifoldSpec<GaussianRational> {
        fixed("dim = 3\n")
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn de_rham_examples() {
        let s = iwasawa();
        let b: Vec<usize> = (0..=6).map(|k| de_rham(&s, k).unwrap().dim).collect();
        assert_eq!(b, vec![1, 4, 8, 10, 8, 4, 1]);
        let t = torus();
        for k in 0..=6 {
            assert_eq!(de_rham(&t, k).unwrap().dim, binom(6, k));
        }
    }

    #[test]
    fn dolbeault_examples() {
        let s = iwasawa();
        assert_eq!(dolbeault(&s, 1, 0).unwrap().dim, 3);
        let h01 = dolbeault(&s, 0, 1).unwrap();
        assert_eq!(h01.dim, 2);
        assert!(!h01.is_zero_class(&F::phibar(3, 1)).unwrap());
        assert!(!h01.is_zero_class(&F::phibar(3, 2)).unwrap());
        // φ̄³ is not ∂̄-closed
        assert!(!h01.is_cocycle(&F::phibar(3, 3)));
    }

    #[test]
    fn bott_chern_examples() {
        let s = iwasawa();
        let h20 = bott_chern(&s, 2, 0).unwrap();
        assert_eq!(h20.dim, 3);
        let span = SubspaceBasis::span(3, &h20.representatives.iter().map(|r| h20.ambient.to_vector(r)).collect::<Vec<_>>());
        for pair in [[1, 2], [2, 3], [1, 3]] {
            assert!(span.contains(&h20.ambient.to_vector(&F::basis_form(3, &pair, &[]))));
        }
        assert_eq!(bott_chern(&s, 2, 2).unwrap().dim, 8);
        assert_eq!(bott_chern(&s, 1, 1).unwrap().dim, 4);
        let t = torus();
        for p in 0..=3 {
            for q in 0..=3 {
                assert_eq!(bott_chern(&t, p, q).unwrap().dim, binom(3, p) * binom(3, q));
            }
        }
    }

    #[test]
    fn aeppli_examples() {
        let s = iwasawa();
        assert_eq!(aeppli(&s, 1, 1).unwrap().dim, 8);
        assert_eq!(aeppli(&s, 3, 1).unwrap().dim, 3);
    }

    #[test]
    fn reducer_representatives_are_unit_vectors() {
        let s = iwasawa();
        let g = aeppli(&s, 1, 1).unwrap();
        for (i, r) in g.representatives.iter().enumerate() {
            let c = g.reduce(r).unwrap();
            for (j, x) in c.iter().enumerate() {
                assert_eq!(x.is_zero(), i != j);
            }
        }
    }

    #[test]
    fn l_complex_examples() {
        let s = iwasawa();
        assert_eq!(l_cohomology(&s, 2, 2, 3).unwrap().dim, 8);
        // the Aeppli group (1,1) sits at position p+q = 2 of shape (2,2)
        assert_eq!(l_cohomology(&s, 2, 2, 2).unwrap().dim, 8);
        assert_eq!(l_cohomology(&s, 2, 2, 4).unwrap().dim, 6);
        let h1 = l_cohomology(&s, 2, 2, 1).unwrap();
        // φ₃ and φ̄₃ give independent classes; φ₁, φ₂ and their conjugates add four more
        assert_eq!(h1.dim, 6);
        let a = h1.reduce(&F::phi(3, 3)).unwrap();
        let b = h1.reduce(&F::phibar(3, 3)).unwrap();
        let m = ExactMatrix::from_columns(6, vec![a, b]);
        assert_eq!(rank(&m), 2);
        assert!(matches!(l_cohomology(&s, 5, 1, 1), Err(CohomologyError::ShapeOutOfRange { .. })));
    }

    #[test]
    fn l_complex_terms() {
        // shape (2,2) in dimension 3
        let bds = |k| l_bidegrees(3, Bidegree::new(2, 2), k);
        assert_eq!(bds(0), vec![Bidegree::new(0, 0)]);
        assert_eq!(bds(1), vec![Bidegree::new(1, 0), Bidegree::new(0, 1)]);
        assert_eq!(bds(2), vec![Bidegree::new(1, 1)]);
        assert_eq!(bds(3), vec![Bidegree::new(2, 2)]);
        assert_eq!(bds(4), vec![Bidegree::new(3, 2), Bidegree::new(2, 3)]);
        assert_eq!(bds(5), vec![Bidegree::new(3, 3)]);
        assert!(bds(6).is_empty());
    }

    #[test]
    fn natural_map_examples() {
        let t = torus();
        for p in 0..=3 {
            for q in 0..=3 {
                let m = natural_map(&t, NaturalMapKind::BcToDolbeault, p, q).unwrap();
                assert_eq!(m.rank, binom(3, p) * binom(3, q));
            }
        }
        let s = iwasawa();
        let m = natural_map(&s, NaturalMapKind::BcToDolbeault, 1, 0).unwrap();
        assert_eq!((m.matrix.cols(), m.matrix.rows(), m.rank), (2, 3, 2));
        let m = natural_map(&s, NaturalMapKind::DolbeaultToAeppli, 1, 1).unwrap();
        assert!(m.rank <= 6);
        // BC → dR → A composes to BC → A through the forms themselves
        for which in [NaturalMapKind::BcToDeRham, NaturalMapKind::DeRhamToAeppli, NaturalMapKind::AntiDolbeaultToAeppli, NaturalMapKind::BcToAntiDolbeault] {
            natural_map(&s, which, 1, 1).unwrap();
        }
    }

    #[test]
    fn bc_to_dolbeault_rank_by_brute_force() {
        // φ₁, φ₂ are ∂̄-independent modulo im ∂̄ = 0 on (1,0)
        let s = iwasawa();
        let h = dolbeault(&s, 1, 0).unwrap();
        let a = h.reduce(&F::phi(3, 1)).unwrap();
        let b = h.reduce(&F::phi(3, 2)).unwrap();
        assert_eq!(rank(&ExactMatrix::from_columns(3, vec![a, b])), 2);
    }

    fn sigma_spec(s: [(i64, i64); 5]) -> ManifoldSpec<GaussianRational> {
        let c = |(a, b): (i64, i64)| GaussianRational::from_ints(a, b);
        let dphi3 = F::basis_form(3, &[1, 2], &[])
            .scale(&c(s[0]))
            .add(&F::basis_form(3, &[1], &[1]).scale(&c(s[1])))
            .add(&F::basis_form(3, &[1], &[2]).scale(&c(s[2])))
            .add(&F::basis_form(3, &[2], &[1]).scale(&c(s[3])))
            .add(&F::basis_form(3, &[2], &[2]).scale(&c(s[4])));
        ManifoldSpec::new(3, vec![F::zero(3), F::zero(3), dphi3]).unwrap()
    }

    fn arb_sigma() -> impl Strategy<Value = [(i64, i64); 5]> {
        prop::array::uniform5((-2i64..=2, -1i64..=1))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn duality_symmetry_and_l_consistency(sig in arb_sigma()) {
            let s = sigma_spec(sig);
            for p in 0..=3 {
                for q in 0..=3 {
                    let bc = bott_chern(&s, p, q).unwrap().dim;
                    let a = aeppli(&s, p, q).unwrap().dim;
                    prop_assert_eq!(a, bott_chern(&s, 3 - q, 3 - p).unwrap().dim);
                    prop_assert_eq!(bc, bott_chern(&s, q, p).unwrap().dim);
                    prop_assert_eq!(a, aeppli(&s, q, p).unwrap().dim);
                    if p >= 1 && q >= 1 {
                        prop_assert_eq!(bc, l_cohomology(&s, p, q, p + q - 1).unwrap().dim);
                    }
                    prop_assert_eq!(a, l_cohomology(&s, p + 1, q + 1, p + q).unwrap().dim);
                }
            }
        }

        #[test]
        fn reducer_kills_coboundaries(sig in arb_sigma(), coeffs in prop::collection::vec(-3i64..=3, 9)) {
            let s = sigma_spec(sig);
            let g = bott_chern(&s, 2, 2).unwrap();
            // a random ∂∂̄-exact (2,2)-form added to each representative
            let amb = Ambient::new(3, vec![Bidegree::new(1, 1)]);
            let beta = amb.to_form(&coeffs.iter().map(|&c| GaussianRational::integer(c)).collect::<Vec<_>>());
            let exact = s.partial(&s.dbar(&beta));
            prop_assert!(g.is_zero_class(&exact).unwrap());
            for r in &g.representatives {
                prop_assert_eq!(g.reduce(&r.add(&exact)).unwrap(), g.reduce(r).unwrap());
            }
        }
    }
}
