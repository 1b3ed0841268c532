//! Built-in structures: the Iwasawa manifold, flat tori, the first-order
//! σ-model deformations of Iwasawa with their classifier, and the reference
//! dimension tables shipped in `data/iwasawa_tables.txt`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::cohomology::{aeppli, bott_chern, de_rham, dolbeault, CohomologyError};
use crate::deformation::{DeformationError, FamilySpec, KodairaSpencerClass};
use crate::exterior::{Bidegree, ConstForm, Form};
use crate::linalg::{rank, ExactMatrix};
use crate::report::{Report, ReportError};
use crate::scalars::{GaussianRational, ParameterRing, Scalar, TruncatedPoly};
use crate::structure::ManifoldSpec;

const TABLES: &str = include_str!("../data/iwasawa_tables.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown builtin `{0}` (expected iwasawa, torusN or sample-<label>)")]
    UnknownBuiltin(String),
    #[error("unknown subclass `{0}` (expected i, ii.a, ii.b, iii.a or iii.b)")]
    UnknownLabel(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("reference tables: {0}")]
    Tables(#[from] ReportError),
    #[error("reference tables: bad row `{0}`")]
    BadRow(String),
}

/// dφ³ = −φ¹∧φ², the other two closed.
pub fn iwasawa() -> ManifoldSpec<GaussianRational> {
    let dphi3 = ConstForm::basis_form(3, &[1, 2], &[]).neg();
    ManifoldSpec::new(3, vec![Form::zero(3), Form::zero(3), dphi3]).expect("Iwasawa equations are valid")
}

pub fn torus(n: usize) -> ManifoldSpec<GaussianRational> {
    ManifoldSpec::new(n, vec![Form::zero(n); n]).expect("flat structure is valid")
}

/// Coefficients of dφ³ = σ₁₂ φ¹∧φ² + σ₁₁̄ φ¹∧φ̄¹ + σ₁₂̄ φ¹∧φ̄² + σ₂₁̄ φ²∧φ̄¹ + σ₂₂̄ φ²∧φ̄².
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaTuple<S> {
    pub s12: S,
    pub s11b: S,
    pub s12b: S,
    pub s21b: S,
    pub s22b: S,
}

impl<S: Scalar> SigmaTuple<S> {
    /// First-order values: σ = (−1, t₂₁, t₂₂, −t₁₁, −t₁₂).
    pub fn first_order(t11: S, t12: S, t21: S, t22: S, minus_one: S) -> Self {
        Self { s12: minus_one, s11b: t21, s12b: t22, s21b: t11.neg(), s22b: t12.neg() }
    }

    pub fn dphi3(&self) -> Form<S> {
        let m = |h: &[usize], a: &[usize], c: &S| {
            Form::<S>::basis_form(3, h, a).scale(c)
        };
        m(&[1, 2], &[], &self.s12)
            .add(&m(&[1], &[1], &self.s11b))
            .add(&m(&[1], &[2], &self.s12b))
            .add(&m(&[2], &[1], &self.s21b))
            .add(&m(&[2], &[2], &self.s22b))
    }
}

/// The σ-model structure at a point t = (t₁₁, t₁₂, t₂₁, t₂₂).
pub fn sigma_point(t: [GaussianRational; 4]) -> ManifoldSpec<GaussianRational> {
    let [t11, t12, t21, t22] = t;
    let sigma = SigmaTuple::first_order(t11, t12, t21, t22, GaussianRational::integer(-1));
    ManifoldSpec::new(3, vec![Form::zero(3), Form::zero(3), sigma.dphi3()]).expect("any σ gives a valid structure")
}

/// The σ-model over a ring, with (t₁₁, t₁₂, t₂₁, t₂₂) given as ring elements.
pub fn sigma_family(ring: &Arc<ParameterRing>, t: [TruncatedPoly; 4]) -> Result<FamilySpec, DeformationError> {
    let [t11, t12, t21, t22] = t;
    let minus_one = TruncatedPoly::constant_in(ring, GaussianRational::integer(-1));
    let sigma = SigmaTuple::first_order(t11, t12, t21, t22, minus_one);
    let zero = Form::zero(3);
    let spec = ManifoldSpec::new(3, vec![zero.clone(), zero, sigma.dphi3()])?.with_ring(ring.clone());
    FamilySpec::new(spec)
}

/// Parameters of the generic first-order Iwasawa family.
pub const IWASAWA_PARAMETERS: [&str; 6] = ["t11", "t12", "t21", "t22", "t31", "t32"];

/// The ∂̄-closed Kodaira-Spencer class Σ t_{iλ} θ_i ⊗ φ̄^λ (λ ≤ 2) with
/// symbolic entries, over the order-1 ring of [`IWASAWA_PARAMETERS`].
pub fn iwasawa_kappa() -> KodairaSpencerClass<TruncatedPoly> {
    let ring = ParameterRing::new(IWASAWA_PARAMETERS, 1);
    let mut k = KodairaSpencerClass::zero(3);
    for i in 1..=3 {
        for l in 1..=3 {
            let v = if l <= 2 {
                TruncatedPoly::generator(&ring, &format!("t{i}{l}")).expect("parameter exists")
            } else {
                TruncatedPoly::zero_in(&ring)
            };
            k.set(i, l, v);
        }
    }
    k
}

/// The frame-change family of Iwasawa with a fully symbolic direction.
pub fn iwasawa_family() -> FamilySpec {
    let kappa = iwasawa_kappa();
    let ring = kappa.entry(1, 1).ring().expect("symbolic entry").clone();
    FamilySpec::first_order(&iwasawa(), &ring, kappa).expect("Iwasawa directions are closed")
}

/// Deformation strata of the Iwasawa manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subclass {
    I,
    IIa,
    IIb,
    IIIa,
    IIIb,
}

impl Subclass {
    pub const ALL: [Subclass; 5] = [Subclass::I, Subclass::IIa, Subclass::IIb, Subclass::IIIa, Subclass::IIIb];

    pub fn label(self) -> &'static str {
        match self {
            Subclass::I => "i",
            Subclass::IIa => "ii.a",
            Subclass::IIb => "ii.b",
            Subclass::IIIa => "iii.a",
            Subclass::IIIb => "iii.b",
        }
    }

    /// Row key of the Dolbeault table, which does not split subclasses.
    pub fn dolbeault_key(self) -> &'static str {
        match self {
            Subclass::I => "i",
            Subclass::IIa | Subclass::IIb => "ii",
            Subclass::IIIa | Subclass::IIIb => "iii",
        }
    }

    /// Fixed representative direction. Class (i) uses t₃₁ = 1, which does
    /// not change the structure equations.
    ///
    /// The σ-model is only first order, so the point has to stay near the
    /// origin: at t₂₁ = 1, t₂₂ = i the form dφ³∧dφ̄³ vanishes and the
    /// underlying real Lie algebra changes (b₂ = 9), and t₁₁ = t₂₂ = 1 lies on
    /// a locus where h_BC^{1,1} rises to 6. Halving or quartering removes both.
    pub fn sample_direction(self) -> KodairaSpencerClass<GaussianRational> {
        let s = match self {
            Subclass::I => "t31=1",
            Subclass::IIa => "t21=1",
            Subclass::IIb => "t21=1/2,t22=1/2i",
            Subclass::IIIa => "t11=1/2,t22=1/2",
            Subclass::IIIb => "t11=1/4,t22=1/2",
        };
        KodairaSpencerClass::parse_direction(s, 3).expect("catalog directions parse")
    }

    /// (t₁₁, t₁₂, t₂₁, t₂₂) of the sample direction.
    pub fn sample_t(self) -> [GaussianRational; 4] {
        let k = self.sample_direction();
        [k.entry(1, 1).clone(), k.entry(1, 2).clone(), k.entry(2, 1).clone(), k.entry(2, 2).clone()]
    }

    pub fn sample_point(self) -> ManifoldSpec<GaussianRational> {
        sigma_point(self.sample_t())
    }
}

impl fmt::Display for Subclass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Subclass {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Subclass::ALL
            .into_iter()
            .find(|c| c.label() == s.trim())
            .ok_or_else(|| CatalogError::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: Subclass,
    pub d: GaussianRational,
    pub rank_s: usize,
}

/// D = σ₁₁̄σ₂₂̄ − σ₁₂̄σ₂₁̄ (which is t₁₁t₂₂ − t₂₁t₁₂ on first-order tuples) and
/// the rank of S = [[σ̄₁₁̄, σ̄₂₂̄, σ̄₁₂̄, σ̄₂₁̄], [σ₁₁̄, σ₂₂̄, σ₂₁̄, σ₁₂̄]].
pub fn classify_sigma(s: &SigmaTuple<GaussianRational>) -> Classification {
    let d = &s.s11b * &s.s22b - &s.s12b * &s.s21b;
    let m = ExactMatrix::from_rows(vec![
        vec![s.s11b.conj(), s.s22b.conj(), s.s12b.conj(), s.s21b.conj()],
        vec![s.s11b.clone(), s.s22b.clone(), s.s21b.clone(), s.s12b.clone()],
    ]);
    let rank_s = rank(&m);
    let label = match (d.is_zero(), rank_s) {
        (_, 0) => Subclass::I,
        (true, 1) => Subclass::IIa,
        (true, _) => Subclass::IIb,
        (false, 1) => Subclass::IIIa,
        (false, _) => Subclass::IIIb,
    };
    Classification { label, d, rank_s }
}

pub fn classify(t: [GaussianRational; 4]) -> Classification {
    let [t11, t12, t21, t22] = t;
    classify_sigma(&SigmaTuple::first_order(t11, t12, t21, t22, GaussianRational::integer(-1)))
}

/// Resolves `iwasawa`, `torusN` and `sample-<label>`.
pub fn builtin(name: &str) -> Result<ManifoldSpec<GaussianRational>, CatalogError> {
    if name == "iwasawa" {
        return Ok(iwasawa());
    }
    if let Some(n) = name.strip_prefix("torus").and_then(|n| n.parse::<usize>().ok()) {
        if (1..=crate::exterior::MAX_DIM).contains(&n) {
            return Ok(torus(n));
        }
    }
    if let Some(label) = name.strip_prefix("sample-") {
        return Ok(label.parse::<Subclass>()?.sample_point());
    }
    Err(CatalogError::UnknownBuiltin(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Table {
    DeRham,
    Dolbeault,
    BottChern,
    Aeppli,
}

impl Table {
    pub const ALL: [Table; 4] = [Table::DeRham, Table::Dolbeault, Table::BottChern, Table::Aeppli];

    pub fn key(self) -> &'static str {
        match self {
            Table::DeRham => "dr",
            Table::Dolbeault => "dolbeault",
            Table::BottChern => "bc",
            Table::Aeppli => "a",
        }
    }

    /// Column headers: total degrees for de Rham, bidegrees otherwise.
    pub fn columns(self) -> Vec<String> {
        match self {
            Table::DeRham => (1..=5).map(|k| format!("b{k}")).collect(),
            _ => table_bidegrees().iter().map(|b| b.to_string()).collect(),
        }
    }

    /// Dimensions of the table's columns on `spec`.
    pub fn compute(self, spec: &ManifoldSpec<GaussianRational>) -> Result<Vec<usize>, CohomologyError> {
        match self {
            Table::DeRham => (1..=5).map(|k| de_rham(spec, k).map(|g| g.dim)).collect(),
            _ => table_bidegrees()
                .into_iter()
                .map(|b| {
                    let g = match self {
                        Table::Dolbeault => dolbeault(spec, b.p, b.q),
                        Table::BottChern => bott_chern(spec, b.p, b.q),
                        _ => aeppli(spec, b.p, b.q),
                    };
                    g.map(|g| g.dim)
                })
                .collect(),
        }
    }
}

impl FromStr for Table {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Table::ALL.into_iter().find(|t| t.key() == s).ok_or_else(|| CatalogError::UnknownTable(s.to_string()))
    }
}

/// Bidegrees listed in the reference tables, in column order.
pub fn table_bidegrees() -> Vec<Bidegree> {
    [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3), (3, 1), (2, 2), (1, 3), (3, 2), (2, 3)]
        .into_iter()
        .map(|(p, q)| Bidegree::new(p, q))
        .collect()
}

/// The raw reference data file.
pub fn reference_tables_text() -> &'static str {
    TABLES
}

/// Reference row for a subclass.
pub fn expected_dims(label: Subclass, table: Table) -> Result<Vec<usize>, CatalogError> {
    let report = Report::parse(TABLES)?;
    let section = report.require(table.key())?;
    let key = match table {
        Table::DeRham => "all",
        Table::Dolbeault => label.dolbeault_key(),
        _ => label.label(),
    };
    let row = section.require(key)?;
    let dims: Vec<usize> =
        row.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|_| CatalogError::BadRow(row.into()))?;
    if dims.len() != table.columns().len() {
        return Err(CatalogError::BadRow(row.into()));
    }
    Ok(dims)
}
