//! Kodaira-Spencer directions, first-order obstructions to extending
//! cohomology classes, order-by-order extension over a parameter family, and
//! the jump scans built on them.
//!
//! Every source group is a position `j` of some L-complex; its obstructions
//! live in position `j + 1` of the same complex on the central fiber. The
//! first-order variation of d in the deformed frame is the commutator
//! `[d, κ⌟ + κ̄⌟]`, so the family residual of a cocycle at first order is
//! expressible through contractions alone.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cohomology::{
    l_cohomology_of, natural_map, CohomologyError, CohomologyGroup, LComplex, NaturalMapKind,
};
use crate::exterior::{Bidegree, ConstForm, Form, FrameVector};
use crate::linalg::{graded_solve, rank, ExactMatrix};
use crate::scalars::{GaussianRational, Monomial, ParameterRing, Scalar, TruncatedPoly};
use crate::structure::{ManifoldSpec, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformationError {
    #[error("{form} is not a cocycle of the source group {source_kind}")]
    RepresentativeInvalid { form: String, source_kind: String },
    #[error("Kodaira-Spencer direction is not dbar-closed: {0}")]
    NotClosed(String),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("bad direction `{0}`")]
    BadDirection(String),
    #[error("unsupported source {0}")]
    Unsupported(String),
    #[error("requested order {requested} exceeds the family's truncation order {available}")]
    OrderTooHigh { requested: u32, available: u32 },
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A constant T^{1,0}-valued (0,1) element Σ t_{iλ} θ_i ⊗ φ̄^λ.
#[derive(Clone, Debug, PartialEq)]
pub struct KodairaSpencerClass<S> {
    n: usize,
    t: Vec<S>,
}

impl<S: Scalar> KodairaSpencerClass<S> {
    pub fn zero(n: usize) -> Self {
        Self { n, t: vec![S::zero(); n * n] }
    }

    /// `rows[i-1][λ-1] = t_{iλ}`.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "Kodaira-Spencer matrix must be square");
        Self { n, t: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// t_{iλ}, 1-based.
    pub fn entry(&self, i: usize, lambda: usize) -> &S {
        &self.t[(i - 1) * self.n + lambda - 1]
    }

    pub fn set(&mut self, i: usize, lambda: usize, v: S) {
        self.t[(i - 1) * self.n + lambda - 1] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.t.iter().all(S::is_zero)
    }

    /// κ⌟α = Σ t_{iλ} φ̄^λ ∧ (θ_i ⌟ α), of bidegree (p−1, q+1).
    pub fn contract(&self, alpha: &Form<S>) -> Form<S> {
        self.contract_with(alpha, true)
    }

    /// κ̄⌟α = Σ t̄_{iλ} φ^λ ∧ (θ̄_i ⌟ α), of bidegree (p+1, q−1).
    pub fn conj_contract(&self, alpha: &Form<S>) -> Form<S> {
        self.contract_with(alpha, false)
    }

    fn contract_with(&self, alpha: &Form<S>, holomorphic: bool) -> Form<S> {
        let n = self.n;
        let mut out = Form::zero(n);
        for i in 1..=n {
            let inner = alpha.interior(FrameVector { index: i, holomorphic });
            if inner.is_zero() {
                continue;
            }
            for lambda in 1..=n {
                let t = self.entry(i, lambda);
                if t.is_zero() {
                    continue;
                }
                let (coef, gen) = if holomorphic {
                    (t.clone(), Form::<S>::phibar(n, lambda))
                } else {
                    (t.conj(), Form::<S>::phi(n, lambda))
                };
                out = out.add(&gen.wedge(&inner).scale(&coef));
            }
        }
        out
    }
}

impl KodairaSpencerClass<GaussianRational> {
    /// Parses `t21=1,t22=i`; unnamed entries are zero. Indices are single
    /// digits.
    pub fn parse_direction(s: &str, n: usize) -> Result<Self, DeformationError> {
        let err = || DeformationError::BadDirection(s.to_string());
        let mut k = Self::zero(n);
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = pair.split_once('=').ok_or_else(err)?;
            let digits: Vec<usize> = name
                .trim()
                .strip_prefix('t')
                .ok_or_else(err)?
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(err)?;
            let [i, lambda] = digits[..] else { return Err(err()) };
            if i == 0 || lambda == 0 || i > n || lambda > n {
                return Err(err());
            }
            let v: GaussianRational = value.trim().parse().map_err(|_| err())?;
            k.set(i, lambda, v);
        }
        Ok(k)
    }

    /// `s·κ` over a ring containing the generator `s`.
    pub fn along(&self, ring: &Arc<ParameterRing>, generator: &str) -> Result<KodairaSpencerClass<TruncatedPoly>, DeformationError> {
        let s = TruncatedPoly::generator(ring, generator).map_err(|e| DeformationError::BadDirection(e.to_string()))?;
        Ok(KodairaSpencerClass { n: self.n, t: self.t.iter().map(|c| s.scale(c)).collect() })
    }

    /// Checks ∂̄∘κ⌟ = κ⌟∘∂̄ on every coframe monomial.
    pub fn check_closed(&self, spec: &ManifoldSpec<GaussianRational>) -> Result<(), DeformationError> {
        let n = spec.dim();
        for p in 0..=n {
            for q in 0..=n {
                for idx in crate::exterior::basis(n, Bidegree::new(p, q)) {
                    let a = ConstForm::monomial(n, idx, GaussianRational::one());
                    let lhs = spec.dbar(&self.contract(&a));
                    let rhs = self.contract(&spec.dbar(&a));
                    if lhs != rhs {
                        return Err(DeformationError::NotClosed(format!(
                            "on {a}: dbar(k.a) - k.(dbar a) = {}",
                            lhs.sub(&rhs)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The direction as `t21=1,t22=i`, entries in index order.
    pub fn to_direction_string(&self) -> String {
        let mut parts = Vec::new();
        for i in 1..=self.n {
            for l in 1..=self.n {
                let v = self.entry(i, l);
                if !v.is_zero() {
                    parts.push(format!("t{i}{l}={v}"));
                }
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(",")
        }
    }
}

impl KodairaSpencerClass<TruncatedPoly> {
    /// Constant coefficient matrices, one per monomial appearing in the entries.
    pub fn coefficient_matrices(&self) -> Vec<(Monomial, KodairaSpencerClass<GaussianRational>)> {
        let mut monomials: Vec<Monomial> = self.t.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
        monomials.sort();
        monomials.dedup();
        monomials
            .into_iter()
            .map(|m| {
                let t = self.t.iter().map(|p| p.coefficient(&m)).collect();
                (m, KodairaSpencerClass { n: self.n, t })
            })
            .collect()
    }

    pub fn check_closed(&self, spec: &ManifoldSpec<GaussianRational>) -> Result<(), DeformationError> {
        self.coefficient_matrices().iter().try_for_each(|(_, k)| k.check_closed(spec))
    }
}

/// Where a class lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SourceKind {
    BottChern(Bidegree),
    Aeppli(Bidegree),
    /// Level `l` of the B-complex of shape (P,Q), realised at position l−1
    /// of the L-complex.
    BClass { shape: Bidegree, level: usize },
}

impl SourceKind {
    pub fn shape(self) -> Bidegree {
        match self {
            SourceKind::BottChern(b) => b,
            SourceKind::Aeppli(b) => Bidegree::new(b.p + 1, b.q + 1),
            SourceKind::BClass { shape, .. } => shape,
        }
    }

    /// L-complex position of the source group.
    pub fn position(self) -> Option<usize> {
        match self {
            SourceKind::BottChern(b) => b.total().checked_sub(1),
            SourceKind::Aeppli(b) => Some(b.total()),
            SourceKind::BClass { level, .. } => level.checked_sub(1),
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::BottChern(b) => write!(f, "bc {} {}", b.p, b.q),
            SourceKind::Aeppli(b) => write!(f, "aeppli {} {}", b.p, b.q),
            SourceKind::BClass { shape, level } => write!(f, "bclass {} {} {}", shape.p, shape.q, level),
        }
    }
}

/// Which formula applies at a position of an L-complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    /// Below the ∂∂̄ junction: differential is projected d.
    Low,
    /// The junction itself: differential is ∂∂̄.
    Junction,
    /// From the Bott-Chern position on: differential is d.
    High,
}

fn regime(shape: Bidegree, j: usize) -> Regime {
    match shape.total().checked_sub(2) {
        Some(jn) if j < jn => Regime::Low,
        Some(jn) if j == jn => Regime::Junction,
        _ => Regime::High,
    }
}

/// A first-order obstruction: two branches, the central target group and
/// the class coordinates of `u + v` there.
#[derive(Debug, Clone)]
pub struct ObstructionClass<S: Scalar> {
    pub source: SourceKind,
    pub theta: ConstForm,
    /// The κ-branch.
    pub u: Form<S>,
    /// The κ̄-branch.
    pub v: Form<S>,
    pub target: CohomologyGroup,
    pub coordinates: Vec<S>,
    pub vanishes: bool,
}

impl<S: Scalar> ObstructionClass<S> {
    pub fn form(&self) -> Form<S> {
        self.u.add(&self.v)
    }
}

/// Central L-complex, source and target groups for one source kind, reused
/// across classes and directions.
#[derive(Debug, Clone)]
pub struct ObstructionContext {
    pub source: SourceKind,
    spec: ManifoldSpec<GaussianRational>,
    position: usize,
    pub source_group: CohomologyGroup,
    pub target: CohomologyGroup,
}

impl ObstructionContext {
    pub fn new(spec: &ManifoldSpec<GaussianRational>, source: SourceKind) -> Result<Self, DeformationError> {
        let position = source.position().ok_or_else(|| DeformationError::Unsupported(source.to_string()))?;
        let lc = LComplex::build(spec, source.shape())?;
        if position + 1 >= lc.len() {
            return Err(DeformationError::Unsupported(source.to_string()));
        }
        let source_group = l_cohomology_of(&lc, position)?;
        let target = l_cohomology_of(&lc, position + 1)?;
        Ok(Self { source, spec: spec.clone(), position, source_group, target })
    }

    pub fn position(&self) -> usize {
        self.position
    }

    fn check_representative(&self, theta: &ConstForm) -> Result<(), DeformationError> {
        if self.source_group.is_cocycle(theta) {
            Ok(())
        } else {
            Err(DeformationError::RepresentativeInvalid { form: theta.to_string(), source_kind: self.source.to_string() })
        }
    }

    /// First-order obstruction of `[θ]` in the direction `κ`.
    ///
    /// Below the junction: u = −pr(κ⌟dθ), v = −pr(κ̄⌟dθ). At the junction
    /// (Aeppli sources): u = −∂(κ⌟∂θ), v = ∂̄(κ̄⌟∂̄θ). From the Bott-Chern
    /// position on: u = −d(κ⌟θ), v = −d(κ̄⌟θ), which for a Bott-Chern class
    /// is −∂(κ⌟θ) and −∂̄(κ̄⌟θ).
    pub fn obstruction<S: Scalar>(
        &self,
        kappa: &KodairaSpencerClass<S>,
        theta: &ConstForm,
    ) -> Result<ObstructionClass<S>, DeformationError> {
        self.check_representative(theta)?;
        let spec: ManifoldSpec<S> = self.spec.lift();
        let th: Form<S> = theta.map_coeffs(|c| S::from_gaussian(c.clone()));
        let amb = &self.target.ambient;
        let pr = |f: Form<S>| amb.to_form(&amb.project(&f).0);
        let (u, v) = match regime(self.source.shape(), self.position) {
            Regime::Low => {
                let dth = spec.d(&th);
                (pr(kappa.contract(&dth)).neg(), pr(kappa.conj_contract(&dth)).neg())
            }
            Regime::Junction => (
                spec.partial(&kappa.contract(&spec.partial(&th))).neg(),
                spec.dbar(&kappa.conj_contract(&spec.dbar(&th))),
            ),
            Regime::High => (spec.d(&kappa.contract(&th)).neg(), spec.d(&kappa.conj_contract(&th)).neg()),
        };
        let total = u.add(&v);
        let (_, rest) = amb.project(&total);
        if !rest.is_zero() {
            return Err(DeformationError::InvariantViolation(format!(
                "obstruction of {theta} for {} leaves the target cochain space: {rest}",
                self.source
            )));
        }
        let coordinates = self.target.reduce_poly(&total).map_err(|e| {
            DeformationError::InvariantViolation(format!("obstruction of {theta} for {} is not a cocycle: {e}", self.source))
        })?;
        let vanishes = coordinates.iter().all(S::is_zero);
        Ok(ObstructionClass { source: self.source, theta: theta.clone(), u, v, target: self.target.clone(), coordinates, vanishes })
    }
}

pub fn obstruction_first_order<S: Scalar>(
    spec: &ManifoldSpec<GaussianRational>,
    kappa: &KodairaSpencerClass<S>,
    source: SourceKind,
    theta: &ConstForm,
) -> Result<ObstructionClass<S>, DeformationError> {
    ObstructionContext::new(spec, source)?.obstruction(kappa, theta)
}

/// Deformed structure equations over a truncated parameter ring.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub base: ManifoldSpec<GaussianRational>,
    pub spec: ManifoldSpec<TruncatedPoly>,
    pub kappa: Option<KodairaSpencerClass<TruncatedPoly>>,
}

impl FamilySpec {
    /// A family given by its structure equations; the base is the degree-0 part.
    pub fn new(spec: ManifoldSpec<TruncatedPoly>) -> Result<Self, DeformationError> {
        if spec.ring().is_none() {
            return Err(DeformationError::PreconditionNotMet("a family needs a parameter ring".into()));
        }
        let base = spec.central()?;
        Ok(Self { base, spec, kappa: None })
    }

    pub fn with_kappa(mut self, kappa: KodairaSpencerClass<TruncatedPoly>) -> Self {
        self.kappa = Some(kappa);
        self
    }

    /// The family obtained from the frame change φ_t^k = φ^k + κ⌟φ^k, exact
    /// to first order: dφ_t^k = dφ^k + Σ t_{kλ} dφ̄^λ − (κ⌟ + κ̄⌟)(dφ^k).
    pub fn first_order(
        base: &ManifoldSpec<GaussianRational>,
        ring: &Arc<ParameterRing>,
        kappa: KodairaSpencerClass<TruncatedPoly>,
    ) -> Result<Self, DeformationError> {
        kappa.check_closed(base)?;
        let n = base.dim();
        let lifted: ManifoldSpec<TruncatedPoly> = base.lift();
        let mut dphi = Vec::with_capacity(n);
        for k in 1..=n {
            let dk = lifted.dphi(k);
            let mut f = dk.clone();
            for lambda in 1..=n {
                f = f.add(&lifted.dphibar(lambda).scale(kappa.entry(k, lambda)));
            }
            f = f.sub(&kappa.contract(dk)).sub(&kappa.conj_contract(dk));
            dphi.push(f.map_coeffs(|c| TruncatedPoly::zero_in(ring) + c.clone()));
        }
        let spec = ManifoldSpec::new(n, dphi)?.with_ring(ring.clone());
        Ok(Self { base: base.clone(), spec, kappa: Some(kappa) })
    }

    /// First-order family along one direction, over the line ring `[s]`.
    pub fn along_direction(
        base: &ManifoldSpec<GaussianRational>,
        direction: &KodairaSpencerClass<GaussianRational>,
    ) -> Result<Self, DeformationError> {
        Self::along_line(base, direction, 1)
    }

    /// As [`FamilySpec::along_direction`] but truncated at `order`. The
    /// equations are still the first-order ones; if they fail to be
    /// integrable at higher order the structure check reports it.
    pub fn along_line(
        base: &ManifoldSpec<GaussianRational>,
        direction: &KodairaSpencerClass<GaussianRational>,
        order: u32,
    ) -> Result<Self, DeformationError> {
        let ring = ParameterRing::new(["s"], order);
        let kappa = direction.along(&ring, "s")?;
        Self::first_order(base, &ring, kappa)
    }

    pub fn ring(&self) -> &Arc<ParameterRing> {
        self.spec.ring().expect("family specs always carry a ring")
    }

    pub fn evaluate(&self, values: &[GaussianRational]) -> Result<ManifoldSpec<GaussianRational>, DeformationError> {
        Ok(self.spec.evaluate(values)?)
    }
}

#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub requested: u32,
    pub achieved: u32,
    /// θ plus its corrections, when every requested order was reached.
    pub extended: Option<Form<TruncatedPoly>>,
    /// The first nonvanishing obstruction otherwise; the whole residual is
    /// reported in the `u` branch.
    pub obstruction: Option<ObstructionClass<TruncatedPoly>>,
}

/// Lifts the cocycle condition for `[θ]` order by order over the family's
/// L-complex.
pub fn extend_class(
    family: &FamilySpec,
    source: SourceKind,
    theta: &ConstForm,
    order: u32,
) -> Result<ExtensionResult, DeformationError> {
    let available = family.ring().order();
    if order > available {
        return Err(DeformationError::OrderTooHigh { requested: order, available });
    }
    let ctx = ObstructionContext::new(&family.base, source)?;
    ctx.check_representative(theta)?;
    let j = ctx.position();
    let lc = LComplex::build(&family.spec, source.shape())?;
    let space = lc.space(j);
    let m = lc.differential(j);
    let th: Vec<TruncatedPoly> = space.to_vector(&theta.map_coeffs(|c| TruncatedPoly::constant_in(family.ring(), c.clone())));
    let b: Vec<TruncatedPoly> = m.mul_vec(&th).into_iter().map(|x| -x).collect();
    match graded_solve(&m, &b, order) {
        Ok(x) => {
            let total: Vec<TruncatedPoly> = th.iter().zip(&x).map(|(a, c)| a.clone() + c.clone()).collect();
            Ok(ExtensionResult { requested: order, achieved: order, extended: Some(space.to_form(&total)), obstruction: None })
        }
        Err(fail) => {
            let target_space = lc.space(j + 1);
            let residue: Vec<TruncatedPoly> = fail.residual.into_iter().map(|x| -x).collect();
            let u = target_space.to_form(&residue);
            let coordinates = ctx.target.reduce_poly(&u).map_err(|e| {
                DeformationError::InvariantViolation(format!("extension residual of {theta} is not a cocycle: {e}"))
            })?;
            let vanishes = coordinates.iter().all(Scalar::is_zero);
            if vanishes {
                return Err(DeformationError::InvariantViolation(format!(
                    "extension of {theta} failed at order {} with an exact residual",
                    fail.order
                )));
            }
            let obstruction = ObstructionClass {
                source,
                theta: theta.clone(),
                u,
                v: Form::zero(theta.dim()),
                target: ctx.target.clone(),
                coordinates,
                vanishes,
            };
            Ok(ExtensionResult { requested: order, achieved: fail.order - 1, extended: None, obstruction: Some(obstruction) })
        }
    }
}

/// The invariant a jump scan watches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grid {
    BottChern,
    Aeppli,
}

impl Grid {
    /// L-complex shape and position realising the invariant at (p,q).
    pub fn realisation(self, bd: Bidegree) -> Option<(Bidegree, usize)> {
        match self {
            Grid::BottChern => Some((bd, bd.total().checked_sub(1)?)),
            Grid::Aeppli => Some((Bidegree::new(bd.p + 1, bd.q + 1), bd.total())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Grid::BottChern => "bc",
            Grid::Aeppli => "a",
        }
    }

    pub fn group(self, spec: &ManifoldSpec<GaussianRational>, bd: Bidegree) -> Result<CohomologyGroup, CohomologyError> {
        match self {
            Grid::BottChern => crate::cohomology::bott_chern(spec, bd.p, bd.q),
            Grid::Aeppli => crate::cohomology::aeppli(spec, bd.p, bd.q),
        }
    }
}

/// Source kind of position `j` of the L-complex of `shape`, named after the
/// group it realises when there is one.
pub fn source_at(shape: Bidegree, j: usize) -> SourceKind {
    if shape.p >= 1 && shape.q >= 1 && j + 2 == shape.total() {
        SourceKind::Aeppli(Bidegree::new(shape.p - 1, shape.q - 1))
    } else if j + 1 == shape.total() {
        SourceKind::BottChern(shape)
    } else {
        SourceKind::BClass { shape, level: j + 1 }
    }
}

/// A basis class with a nonvanishing first-order obstruction.
#[derive(Debug, Clone)]
pub struct Witness {
    pub source: SourceKind,
    pub class: ConstForm,
    pub obstruction: Form<TruncatedPoly>,
}

#[derive(Debug, Clone)]
pub struct JumpEntry {
    pub grid: Grid,
    pub bidegree: Bidegree,
    pub jumps: bool,
    pub witnesses: Vec<Witness>,
    /// rank(H^{j−1} → H^j) + rank(H^j → H^{j+1}) for the combined obstruction
    /// at the sample direction.
    pub rank_bound: usize,
    pub central_dim: usize,
    pub sample_dim: usize,
}

impl JumpEntry {
    pub fn observed_drop(&self) -> isize {
        self.central_dim as isize - self.sample_dim as isize
    }
}

#[derive(Debug, Clone)]
pub struct JumpReport {
    pub entries: Vec<JumpEntry>,
}

impl JumpReport {
    pub fn flagged(&self, grid: Grid) -> Vec<Bidegree> {
        self.entries.iter().filter(|e| e.grid == grid && e.jumps).map(|e| e.bidegree).collect()
    }
}

/// Scans first-order obstructions of both source groups for each requested
/// invariant, monomial by monomial in the family's parameters, and compares
/// with dimensions recomputed at `sample`.
///
/// A missing flag means no first-order evidence, not absence of a jump.
pub fn jump_scan(
    family: &FamilySpec,
    sample: &[GaussianRational],
    grids: &[Grid],
    bidegrees: &[Bidegree],
) -> Result<JumpReport, DeformationError> {
    let kappa = family
        .kappa
        .as_ref()
        .ok_or_else(|| DeformationError::PreconditionNotMet("jump scans need the family's Kodaira-Spencer class".into()))?;
    let at_sample = family.evaluate(sample)?;
    let kappa_at: KodairaSpencerClass<GaussianRational> =
        KodairaSpencerClass { n: kappa.n, t: kappa.t.iter().map(|p| p.evaluate(sample)).collect() };
    let mut entries = Vec::new();
    for &grid in grids {
        for &bd in bidegrees {
            let Some((shape, j)) = grid.realisation(bd) else { continue };
            let mut witnesses = Vec::new();
            let mut rank_bound = 0;
            for pos in [j.checked_sub(1), Some(j)].into_iter().flatten() {
                let ctx = ObstructionContext::new(&family.base, source_at(shape, pos))?;
                let mut columns = Vec::new();
                for theta in &ctx.source_group.representatives {
                    let o = ctx.obstruction(kappa, theta)?;
                    if !o.vanishes {
                        witnesses.push(Witness { source: ctx.source, class: theta.clone(), obstruction: o.form() });
                    }
                    columns.push(ctx.obstruction(&kappa_at, theta)?.coordinates);
                }
                if !columns.is_empty() {
                    rank_bound += rank(&ExactMatrix::from_columns(ctx.target.dim, columns));
                }
            }
            let central_dim = grid.group(&family.base, bd)?.dim;
            let sample_dim = grid.group(&at_sample, bd)?.dim;
            entries.push(JumpEntry { grid, bidegree: bd, jumps: !witnesses.is_empty(), witnesses, rank_bound, central_dim, sample_dim });
        }
    }
    Ok(JumpReport { entries })
}

#[derive(Debug, Clone)]
pub struct CorollaryReport {
    pub grid: Grid,
    pub bidegree: Bidegree,
    pub group_dim: usize,
    /// Rank of the map to Dolbeault (∂̄) cohomology, or from it for Aeppli.
    pub rank_dbar: usize,
    /// Rank of the map to ∂-cohomology, or from it for Aeppli.
    pub rank_del: usize,
    pub applicable: bool,
    /// When applicable: whether every basis class reached order 1.
    pub verified: Option<bool>,
}

/// Checks the vanishing-of-natural-maps criterion for unobstructedness at
/// (p,q) on the central fiber and, when it applies, confirms it with
/// [`extend_class`] along `direction`.
pub fn corollary_condition(
    spec: &ManifoldSpec<GaussianRational>,
    direction: &KodairaSpencerClass<GaussianRational>,
    grid: Grid,
    bd: Bidegree,
) -> Result<CorollaryReport, DeformationError> {
    let (to_dbar, to_del, source) = match grid {
        Grid::BottChern => (NaturalMapKind::BcToDolbeault, NaturalMapKind::BcToAntiDolbeault, SourceKind::BottChern(bd)),
        Grid::Aeppli => (NaturalMapKind::DolbeaultToAeppli, NaturalMapKind::AntiDolbeaultToAeppli, SourceKind::Aeppli(bd)),
    };
    let rank_dbar = natural_map(spec, to_dbar, bd.p, bd.q)?.rank;
    let rank_del = natural_map(spec, to_del, bd.p, bd.q)?.rank;
    let group = grid.group(spec, bd)?;
    let applicable = rank_dbar == 0 && rank_del == 0;
    let verified = if applicable && source.position().is_some() {
        let family = FamilySpec::along_direction(spec, direction)?;
        let mut all = true;
        for theta in &group.representatives {
            all &= extend_class(&family, source, theta, 1)?.achieved >= 1;
        }
        Some(all)
    } else {
        None
    };
    Ok(CorollaryReport { grid, bidegree: bd, group_dim: group.dim, rank_dbar, rank_del, applicable, verified })
}

#[derive(Debug, Clone)]
pub struct ParallelisableReport {
    pub witness: Option<(ConstForm, KodairaSpencerClass<GaussianRational>, ConstForm)>,
    pub searched: usize,
}

/// Searches holomorphic coframe 1-forms θ and directions κ for a
/// nonvanishing first-order obstruction of the level-2 B-class of shape
/// (2,2), which forces h_A^{1,1} to jump. The default direction set is every
/// dbar-closed unit θ_i ⊗ φ̄^λ.
pub fn parallelisable_jump_check(
    spec: &ManifoldSpec<GaussianRational>,
    directions: Option<&[KodairaSpencerClass<GaussianRational>]>,
) -> Result<ParallelisableReport, DeformationError> {
    let n = spec.dim();
    if n < 3 {
        return Err(DeformationError::PreconditionNotMet(format!("dimension {n} < 3")));
    }
    for k in 1..=n {
        if !spec.dbar(&ConstForm::phi(n, k)).is_zero() {
            return Err(DeformationError::PreconditionNotMet(format!("dphi[{k}] has a (1,1) part")));
        }
    }
    if (1..=n).all(|k| spec.dphi(k).is_zero()) {
        return Err(DeformationError::PreconditionNotMet("all dphi vanish".into()));
    }
    let defaults: Vec<KodairaSpencerClass<GaussianRational>>;
    let directions = match directions {
        Some(d) => d,
        None => {
            let mut v = Vec::new();
            for i in 1..=n {
                for l in 1..=n {
                    let mut k = KodairaSpencerClass::zero(n);
                    k.set(i, l, GaussianRational::one());
                    if k.check_closed(spec).is_ok() {
                        v.push(k);
                    }
                }
            }
            defaults = v;
            &defaults
        }
    };
    let ctx = ObstructionContext::new(spec, SourceKind::BClass { shape: Bidegree::new(2, 2), level: 2 })?;
    let mut searched = 0;
    for k in 1..=n {
        let theta = ConstForm::phi(n, k);
        for dir in directions {
            dir.check_closed(spec)?;
            searched += 1;
            let o = ctx.obstruction(dir, &theta)?;
            if !o.vanishes {
                return Ok(ParallelisableReport { witness: Some((theta, dir.clone(), o.form())), searched });
            }
        }
    }
    Ok(ParallelisableReport { witness: None, searched })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{parse_spec, SpecFile};
    use proptest::prelude::*;

    type F = ConstForm;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn iwasawa() -> ManifoldSpec<GaussianRational> {
        match parse_spec("dim = 3\ndphi[3] = -1 phi[1]^phi[2]\n").unwrap() {
            SpecFile::Fixed(s) => s,
            SpecFile::Family(_) => unreachable!(),
        }
    }

    fn dir(s: &str) -> KodairaSpencerClass<GaussianRational> {
        KodairaSpencerClass::parse_direction(s, 3).unwrap()
    }

    #[test]
    fn contraction_examples() {
        let k = dir("t21=1");
        let a = F::basis_form(3, &[2, 3], &[]);
        assert_eq!(k.contract(&a), F::basis_form(3, &[3], &[1]).neg());
        assert!(dir("t11=2,t32=i").contract(&F::constant(3, g("1"))).is_zero());
        assert!(dir("t11=1").contract(&F::phibar(3, 2)).is_zero());
        // the conjugate branch lowers the anti-holomorphic degree
        assert_eq!(dir("t21=i").conj_contract(&F::phibar(3, 2)), F::phi(3, 1).scale(&g("-i")));
    }

    #[test]
    fn closedness_of_directions() {
        let s = iwasawa();
        assert!(dir("t11=1,t22=1,t31=1").check_closed(&s).is_ok());
        assert!(matches!(dir("t13=1").check_closed(&s), Err(DeformationError::NotClosed(_))));
        assert!(KodairaSpencerClass::parse_direction("t41=1", 3).is_err());
        assert!(KodairaSpencerClass::parse_direction("x21=1", 3).is_err());
        assert_eq!(dir("t22=i, t21=1").to_direction_string(), "t21=1,t22=i");
    }

    #[test]
    fn along_direction_family_matches_sigma_model() {
        let fam = FamilySpec::along_direction(&iwasawa(), &dir("t11=1,t22=1")).unwrap();
        let at = fam.evaluate(&[g("1")]).unwrap();
        let expected = F::basis_form(3, &[1, 2], &[])
            .neg()
            .add(&F::basis_form(3, &[1], &[2]))
            .add(&F::basis_form(3, &[2], &[1]).neg());
        assert_eq!(at.dphi(3), &expected);
        assert!(at.dphi(1).is_zero() && at.dphi(2).is_zero());
    }

    #[test]
    fn worked_obstructions() {
        let s = iwasawa();
        let k = dir("t21=1");
        let bc20 = SourceKind::BottChern(Bidegree::new(2, 0));
        let o = obstruction_first_order(&s, &k, bc20, &F::basis_form(3, &[1, 2], &[])).unwrap();
        assert!(o.vanishes);
        let o = obstruction_first_order(&s, &k, bc20, &F::basis_form(3, &[2, 3], &[])).unwrap();
        assert!(!o.vanishes);
        assert_eq!(o.form(), F::basis_form(3, &[1, 2], &[1]).neg());
        let bclass = SourceKind::BClass { shape: Bidegree::new(2, 2), level: 2 };
        let o = obstruction_first_order(&s, &k, bclass, &F::phi(3, 3)).unwrap();
        assert_eq!(o.form(), F::basis_form(3, &[1], &[1]));
        assert!(!o.vanishes);
        let err = obstruction_first_order(&s, &k, bc20, &F::phi(3, 3)).unwrap_err();
        assert!(matches!(err, DeformationError::RepresentativeInvalid { .. }));
    }

    #[test]
    fn extension_examples() {
        let s = iwasawa();
        let bc20 = SourceKind::BottChern(Bidegree::new(2, 0));
        let fam = FamilySpec::along_direction(&s, &dir("t21=1")).unwrap();
        let r = extend_class(&fam, bc20, &F::basis_form(3, &[2, 3], &[]), 1).unwrap();
        assert_eq!(r.achieved, 0);
        assert!(!r.obstruction.unwrap().vanishes);
        // t11 φ2∧φ3 − t21 φ1∧φ3 at t21 = 1 is −φ1∧φ3
        let r = extend_class(&fam, bc20, &F::basis_form(3, &[1, 3], &[]).neg(), 1).unwrap();
        assert_eq!(r.achieved, 1);
        assert!(extend_class(&fam, bc20, &F::basis_form(3, &[1, 3], &[]), 2).is_err());
    }

    #[test]
    fn parallelisable_examples() {
        let s = iwasawa();
        let r = parallelisable_jump_check(&s, None).unwrap();
        let (theta, _, _) = r.witness.unwrap();
        assert_eq!(theta, F::phi(3, 3));
        let dirs = [dir("t31=1"), dir("t32=1")];
        let r = parallelisable_jump_check(&s, Some(&dirs)).unwrap();
        assert!(r.witness.is_none());
        assert_eq!(r.searched, 6);
        let torus = match parse_spec("dim = 3\n").unwrap() {
            SpecFile::Fixed(t) => t,
            SpecFile::Family(_) => unreachable!(),
        };
        assert!(matches!(parallelisable_jump_check(&torus, None), Err(DeformationError::PreconditionNotMet(_))));
    }

    #[test]
    fn class_one_directions_extend_to_second_order() {
        let s = iwasawa();
        let fam = FamilySpec::along_line(&s, &dir("t31=1"), 2).unwrap();
        for p in 0..=3 {
            for q in 0..=3 {
                if p + q == 0 {
                    continue;
                }
                let src = SourceKind::BottChern(Bidegree::new(p, q));
                let ctx = ObstructionContext::new(&s, src).unwrap();
                for theta in &ctx.source_group.representatives {
                    let r = extend_class(&fam, src, theta, 2).unwrap();
                    assert_eq!(r.achieved, 2, "{src} {theta}");
                    let ext = r.extended.unwrap();
                    let central = ext.map_coeffs(|c| TruncatedPoly::constant(c.constant_term()));
                    assert_eq!(central, theta.map_coeffs(|c| TruncatedPoly::constant(c.clone())));
                }
            }
        }
    }

    #[test]
    fn corollary_examples() {
        let torus = match parse_spec("dim = 3\n").unwrap() {
            SpecFile::Fixed(t) => t,
            SpecFile::Family(_) => unreachable!(),
        };
        let r = corollary_condition(&torus, &dir("t11=1"), Grid::BottChern, Bidegree::new(1, 1)).unwrap();
        assert_eq!((r.group_dim, r.rank_dbar, r.rank_del, r.applicable), (9, 9, 9, false));
        let s = iwasawa();
        let r = corollary_condition(&s, &dir("t21=1"), Grid::BottChern, Bidegree::new(3, 0)).unwrap();
        assert_eq!((r.group_dim, r.rank_dbar, r.applicable), (1, 1, false));
        for p in 0..=3 {
            for q in 0..=3 {
                for g in [Grid::BottChern, Grid::Aeppli] {
                    let r = corollary_condition(&s, &dir("t21=1"), g, Bidegree::new(p, q)).unwrap();
                    if r.applicable {
                        assert_ne!(r.verified, Some(false), "{} {}", g.name(), r.bidegree);
                    }
                }
            }
        }
    }

    fn small() -> impl Strategy<Value = GaussianRational> {
        (-3i64..=3, -3i64..=3, 1i64..=2).prop_map(|(a, b, d)| {
            &GaussianRational::from_ints(a, b) * &GaussianRational::from_fraction(1, d)
        })
    }

    fn direction() -> impl Strategy<Value = KodairaSpencerClass<GaussianRational>> {
        proptest::collection::vec(small(), 6).prop_map(|v| {
            let mut k = KodairaSpencerClass::zero(3);
            for (j, c) in v.into_iter().enumerate() {
                k.set(j / 2 + 1, j % 2 + 1, c);
            }
            k
        })
    }

    fn sources() -> Vec<SourceKind> {
        let mut v = vec![SourceKind::BClass { shape: Bidegree::new(2, 2), level: 2 }];
        for p in 0..=3 {
            for q in 0..=3 {
                if p + q > 0 {
                    v.push(SourceKind::BottChern(Bidegree::new(p, q)));
                }
                v.push(SourceKind::Aeppli(Bidegree::new(p, q)));
            }
        }
        v
    }

    fn combination(g: &CohomologyGroup, c: &[GaussianRational]) -> ConstForm {
        g.representatives.iter().zip(c.iter().cycle()).fold(ConstForm::zero(3), |acc, (r, c)| acc.add(&r.scale(c)))
    }

    fn conj_source(s: SourceKind) -> SourceKind {
        match s {
            SourceKind::BottChern(b) => SourceKind::BottChern(b.conj()),
            SourceKind::Aeppli(b) => SourceKind::Aeppli(b.conj()),
            SourceKind::BClass { shape, level } => SourceKind::BClass { shape: shape.conj(), level },
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn obstructions_are_linear(
            si in 0usize..32, a in small(), b in small(), r in -3i64..=3,
            c1 in proptest::collection::vec(small(), 8), c2 in proptest::collection::vec(small(), 8),
            k1 in direction(), k2 in direction(),
        ) {
            let s = iwasawa();
            let ctx = ObstructionContext::new(&s, sources()[si]).unwrap();
            let (x, y) = (combination(&ctx.source_group, &c1), combination(&ctx.source_group, &c2));
            let o = |k: &KodairaSpencerClass<GaussianRational>, t: &ConstForm| ctx.obstruction(k, t).unwrap();
            // in the class, complex-linear
            let lhs = o(&k1, &x.scale(&a).add(&y.scale(&b)));
            let (ox, oy) = (o(&k1, &x), o(&k1, &y));
            prop_assert_eq!(lhs.form(), ox.form().scale(&a).add(&oy.form().scale(&b)));
            // in the direction, additive; the u branch is complex-linear, v conjugate-linear
            let mut sum = KodairaSpencerClass::zero(3);
            let mut scaled = KodairaSpencerClass::zero(3);
            for i in 1..=3 {
                for l in 1..=3 {
                    sum.set(i, l, k1.entry(i, l) + k2.entry(i, l));
                    scaled.set(i, l, k1.entry(i, l) * &a);
                }
            }
            prop_assert_eq!(o(&sum, &x).form(), ox.form().add(&o(&k2, &x).form()));
            let os = o(&scaled, &x);
            prop_assert_eq!(&os.u, &ox.u.scale(&a));
            prop_assert_eq!(&os.v, &ox.v.scale(&a.conj()));
            let real = GaussianRational::integer(r);
            let mut kr = KodairaSpencerClass::zero(3);
            for i in 1..=3 {
                for l in 1..=3 {
                    kr.set(i, l, k1.entry(i, l) * &real);
                }
            }
            prop_assert_eq!(o(&kr, &x).coordinates, ox.coordinates.iter().map(|c| c * &real).collect::<Vec<_>>());
        }

        #[test]
        fn obstructions_ignore_the_representative(
            si in 0usize..32, c in proptest::collection::vec(small(), 8), g in proptest::collection::vec(small(), 40), k in direction(),
        ) {
            let s = iwasawa();
            let src = sources()[si];
            let ctx = ObstructionContext::new(&s, src).unwrap();
            let theta = combination(&ctx.source_group, &c);
            let random = |b: Bidegree| {
                let mut f = ConstForm::zero(3);
                for (idx, c) in crate::exterior::basis(3, b).into_iter().zip(g.iter()) {
                    f.add_term(idx, c.clone());
                }
                f
            };
            let shift = match src {
                SourceKind::BottChern(b) if b.p > 0 && b.q > 0 => s.partial(&s.dbar(&random(Bidegree::new(b.p - 1, b.q - 1)))),
                SourceKind::Aeppli(b) => {
                    let mut f = ConstForm::zero(3);
                    if b.p > 0 {
                        f = f.add(&s.partial(&random(Bidegree::new(b.p - 1, b.q))));
                    }
                    if b.q > 0 {
                        f = f.add(&s.dbar(&random(Bidegree::new(b.p, b.q - 1))).scale(&GaussianRational::i()));
                    }
                    f
                }
                SourceKind::BClass { .. } => ConstForm::zero(3),
                SourceKind::BottChern(_) => ConstForm::zero(3),
            };
            let a = ctx.obstruction(&k, &theta).unwrap();
            let b = ctx.obstruction(&k, &theta.add(&shift)).unwrap();
            prop_assert_eq!(a.coordinates, b.coordinates);
            prop_assert_eq!(a.vanishes, b.vanishes);
        }

        #[test]
        fn conjugation_preserves_verdicts(si in 0usize..32, c in proptest::collection::vec(small(), 8), k in direction()) {
            let s = iwasawa();
            let src = sources()[si];
            let ctx = ObstructionContext::new(&s, src).unwrap();
            let cctx = ObstructionContext::new(&s, conj_source(src)).unwrap();
            let theta = combination(&ctx.source_group, &c);
            let o = ctx.obstruction(&k, &theta).unwrap();
            let oc = cctx.obstruction(&k, &theta.conjugate()).unwrap();
            prop_assert_eq!(o.vanishes, oc.vanishes);
            let conj = o.form().conjugate();
            prop_assert!(oc.form() == conj || oc.form() == conj.neg());
        }
    }

    #[test]
    fn source_positions() {
        let b = Bidegree::new;
        assert_eq!(source_at(b(2, 2), 1), SourceKind::BClass { shape: b(2, 2), level: 2 });
        assert_eq!(source_at(b(2, 2), 2), SourceKind::Aeppli(b(1, 1)));
        assert_eq!(source_at(b(2, 2), 3), SourceKind::BottChern(b(2, 2)));
        assert_eq!(source_at(b(2, 0), 1), SourceKind::BottChern(b(2, 0)));
        assert_eq!(SourceKind::Aeppli(b(1, 1)).shape(), b(2, 2));
        assert_eq!(SourceKind::BottChern(b(0, 0)).position(), None);
    }
}
