//! Structure equations of an invariant complex structure and the induced
//! operators ∂, ∂̄ and d on invariant forms.

use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::exterior::{basis, BasisIndex, Bidegree, Form, FormError, MAX_DIM};
use crate::linalg::Matrix;
use crate::scalars::{GaussianRational, ParameterRing, ParseContext, Scalar, TruncatedPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("dphi[{k}] has a nonzero (0,2) part: {residue}")]
    NonIntegrable { k: usize, residue: String },
    #[error("d^2 does not vanish on {generator}: {residue}")]
    NotClosed { k: usize, generator: String, residue: String },
    #[error("dphi[{k}] is not a 2-form")]
    NotTwoForm { k: usize },
    #[error("dimension {0} is not supported")]
    BadDimension(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A complex structure given by `dφ^k` for each holomorphic coframe element.
/// The conjugate equations are derived, never supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec<S> {
    n: usize,
    dphi: Vec<Form<S>>,
    dphibar: Vec<Form<S>>,
    ring: Option<Arc<ParameterRing>>,
}

impl<S: Scalar> ManifoldSpec<S> {
    /// Validates integrability and d² = 0. `dphi[k-1]` is dφ^k.
    pub fn new(n: usize, dphi: Vec<Form<S>>) -> Result<Self, StructureError> {
        if n == 0 || n > MAX_DIM || dphi.len() != n {
            return Err(StructureError::BadDimension(n));
        }
        let dphibar = dphi.iter().map(Form::conjugate).collect();
        let spec = Self { n, dphi, dphibar, ring: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_ring(mut self, ring: Arc<ParameterRing>) -> Self {
        self.ring = Some(ring);
        self
    }

    fn validate(&self) -> Result<(), StructureError> {
        for (i, f) in self.dphi.iter().enumerate() {
            if f.terms().any(|(idx, _)| idx.degree() != 2) {
                return Err(StructureError::NotTwoForm { k: i + 1 });
            }
            let residue = f.component(Bidegree::new(0, 2));
            if !residue.is_zero() {
                return Err(StructureError::NonIntegrable { k: i + 1, residue: residue.to_string() });
            }
        }
        for k in 1..=self.n {
            for (hol, dg) in [(true, &self.dphi[k - 1]), (false, &self.dphibar[k - 1])] {
                let dd = self.d(dg);
                if !dd.is_zero() {
                    let generator = if hol { format!("phi[{k}]") } else { format!("phibar[{k}]") };
                    return Err(StructureError::NotClosed { k, generator, residue: dd.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> Option<&Arc<ParameterRing>> {
        self.ring.as_ref()
    }

    /// dφ^k, 1-based.
    pub fn dphi(&self, k: usize) -> &Form<S> {
        &self.dphi[k - 1]
    }

    /// dφ̄^k, 1-based.
    pub fn dphibar(&self, k: usize) -> &Form<S> {
        &self.dphibar[k - 1]
    }

    /// d of a single coframe monomial, by the Leibniz rule with sign
    /// (−1)^(number of factors to the left).
    pub fn d_monomial(&self, idx: BasisIndex) -> Form<S> {
        let n = self.n;
        let hol = idx.hol_indices();
        let anti = idx.antihol_indices();
        let factors: Vec<(bool, usize)> =
            hol.iter().map(|&i| (true, i)).chain(anti.iter().map(|&j| (false, j))).collect();
        let mut out = Form::zero(n);
        for (pos, &(is_hol, k)) in factors.iter().enumerate() {
            let dg = if is_hol { &self.dphi[k - 1] } else { &self.dphibar[k - 1] };
            if dg.is_zero() {
                continue;
            }
            let (lh, la) = split_factors(&factors[..pos]);
            let (rh, ra) = split_factors(&factors[pos + 1..]);
            let left = Form::<S>::monomial(n, BasisIndex::from_indices(&lh, &la), S::one());
            let right = Form::<S>::monomial(n, BasisIndex::from_indices(&rh, &ra), S::one());
            let term = left.wedge(dg).wedge(&right);
            out = if pos % 2 == 0 { out.add(&term) } else { out.sub(&term) };
        }
        out
    }

    pub fn d(&self, f: &Form<S>) -> Form<S> {
        let mut out = Form::zero(self.n);
        for (idx, c) in f.terms() {
            out = out.add(&self.d_monomial(*idx).scale(c));
        }
        out
    }

    /// The part of d raising the holomorphic degree.
    pub fn partial(&self, f: &Form<S>) -> Form<S> {
        self.split_d(f).0
    }

    pub fn dbar(&self, f: &Form<S>) -> Form<S> {
        self.split_d(f).1
    }

    fn split_d(&self, f: &Form<S>) -> (Form<S>, Form<S>) {
        let mut del = Form::zero(self.n);
        let mut delbar = Form::zero(self.n);
        for (idx, c) in f.terms() {
            let p = idx.bidegree().p;
            for (j, v) in self.d_monomial(*idx).terms() {
                let v = c.clone() * v.clone();
                if j.bidegree().p > p {
                    del.add_term(*j, v);
                } else {
                    delbar.add_term(*j, v);
                }
            }
        }
        (del, delbar)
    }

    pub fn apply(&self, op: Operator, f: &Form<S>) -> Form<S> {
        match op {
            Operator::Partial => self.partial(f),
            Operator::Dbar => self.dbar(f),
            Operator::D => self.d(f),
            Operator::DDbar => self.partial(&self.dbar(f)),
        }
    }

    /// Canonical text form: `dim`, optional `params`/`order`, then the
    /// nonzero `dphi[k]` lines.
    pub fn to_spec_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "dim = {}", self.n).unwrap();
        if let Some(r) = &self.ring {
            writeln!(s, "params = [{}]", r.base_names().join(", ")).unwrap();
            writeln!(s, "order = {}", r.order()).unwrap();
        }
        for (i, f) in self.dphi.iter().enumerate() {
            if !f.is_zero() {
                writeln!(s, "dphi[{}] = {}", i + 1, f).unwrap();
            }
        }
        s
    }
}

fn split_factors(factors: &[(bool, usize)]) -> (Vec<usize>, Vec<usize>) {
    let hol = factors.iter().filter(|f| f.0).map(|f| f.1).collect();
    let anti = factors.iter().filter(|f| !f.0).map(|f| f.1).collect();
    (hol, anti)
}

impl ManifoldSpec<GaussianRational> {
    /// The same structure with coefficients read in another scalar type.
    pub fn lift<T: Scalar>(&self) -> ManifoldSpec<T> {
        let lift = |f: &Form<GaussianRational>| f.map_coeffs(|c| T::from_gaussian(c.clone()));
        ManifoldSpec {
            n: self.n,
            dphi: self.dphi.iter().map(lift).collect(),
            dphibar: self.dphibar.iter().map(lift).collect(),
            ring: None,
        }
    }
}

impl ManifoldSpec<TruncatedPoly> {
    /// Degree-0 part: the central structure.
    pub fn central(&self) -> Result<ManifoldSpec<GaussianRational>, StructureError> {
        let dphi = self.dphi.iter().map(|f| f.map_coeffs(TruncatedPoly::constant_term)).collect();
        ManifoldSpec::new(self.n, dphi)
    }

    /// Specialises every parameter to a value (conjugates get conjugated values).
    pub fn evaluate(&self, values: &[GaussianRational]) -> Result<ManifoldSpec<GaussianRational>, StructureError> {
        let dphi = self.dphi.iter().map(|f| f.map_coeffs(|c| c.evaluate(values))).collect();
        ManifoldSpec::new(self.n, dphi)
    }
}

/// The operators whose matrices are assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    Partial,
    Dbar,
    D,
    DDbar,
}

impl Operator {
    /// Target bidegrees for a homogeneous source.
    pub fn targets(self, n: usize, src: Bidegree) -> Vec<Bidegree> {
        let cands = match self {
            Operator::Partial => vec![Bidegree::new(src.p + 1, src.q)],
            Operator::Dbar => vec![Bidegree::new(src.p, src.q + 1)],
            Operator::D => vec![Bidegree::new(src.p + 1, src.q), Bidegree::new(src.p, src.q + 1)],
            Operator::DDbar => vec![Bidegree::new(src.p + 1, src.q + 1)],
        };
        cands.into_iter().filter(|b| b.p <= n && b.q <= n).collect()
    }
}

/// Ordered direct sum of bidegree blocks; converts between forms and
/// coordinate vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambient {
    n: usize,
    blocks: Vec<Bidegree>,
    indices: Vec<BasisIndex>,
}

impl Ambient {
    pub fn new(n: usize, blocks: Vec<Bidegree>) -> Self {
        let blocks: Vec<Bidegree> = blocks.into_iter().filter(|b| b.p <= n && b.q <= n).collect();
        let indices = blocks.iter().flat_map(|&b| basis(n, b)).collect();
        Self { n, blocks, indices }
    }

    /// All bidegrees of total degree `k`, holomorphic degree descending.
    pub fn total_degree(n: usize, k: usize) -> Self {
        Self::new(n, (0..=k).rev().map(|p| Bidegree::new(p, k - p)).collect())
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn blocks(&self) -> &[Bidegree] {
        &self.blocks
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.indices
    }

    pub fn position(&self, idx: &BasisIndex) -> Option<usize> {
        self.indices.iter().position(|i| i == idx)
    }

    /// Coordinates of `f`; components outside the ambient are dropped and
    /// reported in the second value.
    pub fn project<S: Scalar>(&self, f: &Form<S>) -> (Vec<S>, Form<S>) {
        let mut v = vec![S::zero(); self.dim()];
        let mut rest = Form::zero(self.n);
        for (idx, c) in f.terms() {
            match self.position(idx) {
                Some(p) => v[p] = c.clone(),
                None => rest.add_term(*idx, c.clone()),
            }
        }
        (v, rest)
    }

    /// Coordinates of a form that must lie in the ambient.
    pub fn to_vector<S: Scalar>(&self, f: &Form<S>) -> Vec<S> {
        let (v, rest) = self.project(f);
        assert!(rest.is_zero(), "form {rest} escapes ambient {:?}", self.blocks);
        v
    }

    pub fn to_form<S: Scalar>(&self, v: &[S]) -> Form<S> {
        assert_eq!(v.len(), self.dim(), "vector length does not match ambient");
        let mut f = Form::zero(self.n);
        for (idx, c) in self.indices.iter().zip(v) {
            f.add_term(*idx, c.clone());
        }
        f
    }

    pub fn basis_form<S: Scalar>(&self, i: usize) -> Form<S> {
        Form::monomial(self.n, self.indices[i], S::one())
    }

    /// Matrix of a linear map on forms between two ambients. With `project`
    /// set, components of the image outside the target are discarded;
    /// otherwise they are a bug and panic.
    pub fn matrix_of<S: Scalar>(&self, target: &Ambient, project: bool, f: impl Fn(&Form<S>) -> Form<S>) -> Matrix<S> {
        let cols = (0..self.dim())
            .map(|j| {
                let image = f(&self.basis_form(j));
                if project {
                    target.project(&image).0
                } else {
                    target.to_vector(&image)
                }
            })
            .collect();
        Matrix::from_columns(target.dim(), cols)
    }
}

/// An operator in coordinates.
#[derive(Clone, Debug)]
pub struct DifferentialMatrix<S: Scalar> {
    pub source: Ambient,
    pub target: Ambient,
    pub matrix: Matrix<S>,
}

/// Column `j` is the operator applied to basis monomial `j` of `src`.
pub fn differential_matrix<S: Scalar>(spec: &ManifoldSpec<S>, op: Operator, src: Bidegree) -> DifferentialMatrix<S> {
    let n = spec.dim();
    let source = Ambient::new(n, vec![src]);
    let target = Ambient::new(n, op.targets(n, src));
    let matrix = source.matrix_of(&target, false, |f| spec.apply(op, f));
    DifferentialMatrix { source, target, matrix }
}

/// d from total degree `k` to `k + 1`, blocks ordered by holomorphic degree
/// descending.
pub fn d_total_matrix<S: Scalar>(spec: &ManifoldSpec<S>, k: usize) -> DifferentialMatrix<S> {
    let n = spec.dim();
    let source = Ambient::total_degree(n, k);
    let target = Ambient::total_degree(n, k + 1);
    let matrix = source.matrix_of(&target, false, |f| spec.d(f));
    DifferentialMatrix { source, target, matrix }
}

/// A parsed spec file: a fixed structure or a parameter family.
#[derive(Clone, Debug)]
pub enum SpecFile {
    Fixed(ManifoldSpec<GaussianRational>),
    Family(ManifoldSpec<TruncatedPoly>),
}

impl SpecFile {
    pub fn to_spec_text(&self) -> String {
        match self {
            SpecFile::Fixed(s) => s.to_spec_text(),
            SpecFile::Family(s) => s.to_spec_text(),
        }
    }
}

/// Parses the line-based spec format. `#` starts a comment.
pub fn parse_spec(text: &str) -> Result<SpecFile, StructureError> {
    let mut n: Option<usize> = None;
    let mut params: Option<Vec<String>> = None;
    let mut order: Option<u32> = None;
    let mut lines: Vec<(usize, usize, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let perr = |msg: &str| StructureError::Parse { line: line_no, msg: msg.to_string() };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| perr("expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "dim" => n = Some(value.parse().map_err(|_| perr("bad dimension"))?),
            "params" => {
                let inner = value
                    .strip_prefix('[')
                    .and_then(|v| v.strip_suffix(']'))
                    .ok_or_else(|| perr("params must be a bracketed list"))?;
                let names: Vec<String> =
                    inner.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                if names.iter().any(|s| !s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')) {
                    return Err(perr("parameter names must be alphanumeric"));
                }
                params = Some(names);
            }
            "order" => order = Some(value.parse().map_err(|_| perr("bad order"))?),
            _ => {
                let k: usize = key
                    .strip_prefix("dphi[")
                    .and_then(|k| k.strip_suffix(']'))
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| perr(&format!("unknown key `{key}`")))?;
                lines.push((line_no, k, value.to_string()));
            }
        }
    }
    let n = n.ok_or(StructureError::Parse { line: 0, msg: "missing `dim`".into() })?;
    if n == 0 || n > MAX_DIM {
        return Err(StructureError::BadDimension(n));
    }
    match params {
        None => {
            if order.is_some() {
                return Err(StructureError::Parse { line: 0, msg: "`order` requires `params`".into() });
            }
            let dphi = collect_dphi::<GaussianRational>(n, &lines, &ParseContext::default())?;
            Ok(SpecFile::Fixed(ManifoldSpec::new(n, dphi)?))
        }
        Some(names) => {
            let ring = ParameterRing::new(names, order.unwrap_or(1));
            let ctx = ParseContext { ring: Some(ring.clone()) };
            let dphi = collect_dphi::<TruncatedPoly>(n, &lines, &ctx)?;
            let dphi = dphi.into_iter().map(|f| attach_ring(f, &ring)).collect();
            Ok(SpecFile::Family(ManifoldSpec::new(n, dphi)?.with_ring(ring)))
        }
    }
}

fn attach_ring(f: Form<TruncatedPoly>, ring: &Arc<ParameterRing>) -> Form<TruncatedPoly> {
    f.map_coeffs(|c| TruncatedPoly::zero_in(ring) + c.clone())
}

fn collect_dphi<S: Scalar>(
    n: usize,
    lines: &[(usize, usize, String)],
    ctx: &ParseContext,
) -> Result<Vec<Form<S>>, StructureError> {
    let mut dphi = vec![Form::<S>::zero(n); n];
    let mut seen = vec![false; n];
    for (line, k, value) in lines {
        if *k == 0 || *k > n {
            return Err(StructureError::Parse { line: *line, msg: format!("dphi index {k} out of range") });
        }
        if std::mem::replace(&mut seen[k - 1], true) {
            return Err(StructureError::Parse { line: *line, msg: format!("dphi[{k}] given twice") });
        }
        dphi[k - 1] = Form::parse(value, n, ctx)
            .map_err(|e| StructureError::Parse { line: *line, msg: e.to_string() })?;
    }
    Ok(dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::ConstForm;
    use proptest::prelude::*;

    type F = ConstForm;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn iwasawa() -> ManifoldSpec<GaussianRational> {
        let mut dphi = vec![F::zero(3); 3];
        dphi[2] = F::basis_form(3, &[1, 2], &[]).neg();
        ManifoldSpec::new(3, dphi).unwrap()
    }

    #[test]
    fn iwasawa_differentials() {
        let s = iwasawa();
        let p12 = F::basis_form(3, &[1, 2], &[]);
        assert_eq!(s.partial(&F::phi(3, 3)), p12.neg());
        assert!(s.dbar(&F::phi(3, 3)).is_zero());
        assert_eq!(s.dbar(&F::phibar(3, 3)), F::basis_form(3, &[], &[1, 2]).neg());
        assert!(s.d(&F::phi(3, 1)).is_zero() && s.d(&F::phi(3, 2)).is_zero());
        // d(φ³∧φ̄³) = dφ³∧φ̄³ − φ³∧dφ̄³
        let m = F::basis_form(3, &[3], &[3]);
        let expected = p12.wedge(&F::phibar(3, 3)).neg().add(&F::phi(3, 3).wedge(&F::basis_form(3, &[], &[1, 2])));
        assert_eq!(s.d(&m), expected);
    }

    #[test]
    fn validation_errors() {
        let mut dphi = vec![F::zero(3); 3];
        dphi[2] = F::basis_form(3, &[], &[1, 2]);
        assert!(matches!(ManifoldSpec::new(3, dphi), Err(StructureError::NonIntegrable { k: 3, .. })));
        // dφ¹ = φ²∧φ³ with dφ² = φ¹∧φ̄¹ gives d²φ¹ = φ¹∧φ̄¹∧φ³ ≠ 0
        let mut dphi = vec![F::zero(3); 3];
        dphi[0] = F::basis_form(3, &[2, 3], &[]);
        dphi[1] = F::basis_form(3, &[1], &[1]);
        assert!(matches!(ManifoldSpec::new(3, dphi), Err(StructureError::NotClosed { k: 1, .. })));
        let mut dphi = vec![F::zero(3); 3];
        dphi[0] = F::phi(3, 2);
        assert!(matches!(ManifoldSpec::new(3, dphi), Err(StructureError::NotTwoForm { k: 1 })));
    }

    #[test]
    fn differential_matrix_examples() {
        let s = iwasawa();
        let m = differential_matrix(&s, Operator::Partial, Bidegree::new(1, 0));
        assert_eq!((m.matrix.rows(), m.matrix.cols()), (3, 3));
        assert!(m.matrix.column(0).iter().all(Scalar::is_zero));
        assert!(m.matrix.column(1).iter().all(Scalar::is_zero));
        assert_eq!(m.matrix.column(2), vec![g("-1"), g("0"), g("0")]);
        assert!(differential_matrix(&s, Operator::DDbar, Bidegree::new(0, 0)).matrix.is_zero());
        let torus = ManifoldSpec::new(3, vec![F::zero(3); 3]).unwrap();
        for k in 0..6 {
            assert!(d_total_matrix(&torus, k).matrix.is_zero());
        }
    }

    #[test]
    fn spec_text_round_trip() {
        let text = "dim = 3\ndphi[3] = -1 phi[1]^phi[2]\n";
        let parsed = parse_spec(text).unwrap();
        assert_eq!(parsed.to_spec_text(), text);
        let SpecFile::Fixed(s) = parsed else { panic!("expected fixed spec") };
        assert_eq!(s, iwasawa());
        let fam = "dim = 3\nparams = [t11, t12, t21, t22]\norder = 1\ndphi[3] = (-1) phi[1]^phi[2] + (t21) phi[1]^phibar[1] + (t22) phi[1]^phibar[2] + (-t11) phi[2]^phibar[1] + (-t12) phi[2]^phibar[2]\n";
        let parsed = parse_spec(fam).unwrap();
        assert_eq!(parsed.to_spec_text(), fam);
        assert!(matches!(parsed, SpecFile::Family(_)));
        let commented = "# the Iwasawa manifold\ndim = 3\n\ndphi[3] = -phi[1]^phi[2]   # structure equation\n";
        assert_eq!(parse_spec(commented).unwrap().to_spec_text(), text);
        assert!(parse_spec("dim = 3\ndphi[4] = phi[1]^phi[2]\n").is_err());
        assert!(parse_spec("dphi[1] = 0\n").is_err());
        assert!(parse_spec("dim = 3\ndphi[3] = 1 phibar[1]^phibar[2]\n").is_err());
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
        prop::array::uniform5((-2i64..=2, -2i64..=2))
    }

    proptest! {
        #[test]
        fn operator_identities(s in arb_sigma(), p in 0usize..=3, q in 0usize..=3) {
            let spec = sigma_spec(s);
            let src = Bidegree::new(p, q);
            let amb = Ambient::new(3, vec![src]);
            for i in 0..amb.dim() {
                let a: F = amb.basis_form(i);
                prop_assert!(spec.partial(&spec.partial(&a)).is_zero());
                prop_assert!(spec.dbar(&spec.dbar(&a)).is_zero());
                prop_assert!(spec.partial(&spec.dbar(&a)).add(&spec.dbar(&spec.partial(&a))).is_zero());
                prop_assert_eq!(spec.dbar(&a.conjugate()), spec.partial(&a).conjugate());
            }
        }

        #[test]
        fn matrices_compose_to_zero(s in arb_sigma(), k in 0usize..5) {
            let spec = sigma_spec(s);
            let a = d_total_matrix(&spec, k).matrix;
            let b = d_total_matrix(&spec, k + 1).matrix;
            prop_assert!(b.mul(&a).is_zero());
        }
    }
}
