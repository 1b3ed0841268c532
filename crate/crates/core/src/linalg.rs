//! Exact linear algebra over ℚ(i), plus degree-by-degree solving over the
//! truncated parameter ring.

use std::fmt;

use thiserror::Error;

use crate::scalars::{GaussianRational, Scalar, TruncatedPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("subspace is not contained in the numerator (differential convention mismatch?)")]
    NotContained,
    #[error("vector does not lie in the numerator subspace")]
    NotInNumerator,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type ExactMatrix = Matrix<GaussianRational>;
pub type Vector = Vec<GaussianRational>;

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Self { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a `rows × cols` matrix from its columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<S>>) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl FnMut(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Places `blocks[i][j]` at block row `i`, block column `j`. Every block
    /// row must agree on heights and every block column on widths.
    pub fn from_blocks(blocks: &[Vec<Matrix<S>>]) -> Self {
        let heights: Vec<usize> = blocks.iter().map(|r| r.first().map_or(0, |m| m.rows)).collect();
        let widths: Vec<usize> = blocks.first().map_or_else(Vec::new, |r| r.iter().map(|m| m.cols).collect());
        let mut out = Self::zeros(heights.iter().sum(), widths.iter().sum());
        let mut r0 = 0;
        for (bi, brow) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, m) in brow.iter().enumerate() {
                assert_eq!((m.rows, m.cols), (heights[bi], widths[bj]), "inconsistent block shapes");
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        out.set(r0 + i, c0 + j, m.get(i, j).clone());
                    }
                }
                c0 += m.cols;
            }
            r0 += heights[bi];
        }
        out
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form of `m` with the pivot columns.
///
/// Pivots are chosen among the candidate rows by smallest coefficient height,
/// which keeps intermediate fractions small.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let best = (r..a.rows).filter(|&i| !a.get(i, c).is_zero()).min_by_key(|&i| a.get(i, c).height());
        let Some(p) = best else { continue };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = a.get(r, c).inv().expect("nonzero pivot");
        for j in c..a.cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let f = a.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..a.cols {
                let rv = a.get(r, j);
                if rv.is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &(&f * rv);
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &ExactMatrix) -> usize {
    rref(m).1.len()
}

/// A subspace of `ambient`-dimensional coordinate space, stored as the rows
/// of a reduced echelon matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vector>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, vectors: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &ExactMatrix::identity(ambient).data.chunks(ambient.max(1)).map(<[_]>::to_vec).collect::<Vec<_>>())
    }

    /// Span of arbitrary vectors.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        if vectors.is_empty() || ambient == 0 {
            return Self::zero(ambient);
        }
        let (r, pivots) = rref(&ExactMatrix::from_rows(vectors.to_vec()));
        let vectors = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Self { ambient, vectors, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    /// Residual of `v` after eliminating against the echelon basis; zero
    /// exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &[GaussianRational]) -> Vector {
        let mut w = v.to_vec();
        for (b, &p) in self.vectors.iter().zip(&self.pivots) {
            let f = w[p].clone();
            if f.is_zero() {
                continue;
            }
            for (wj, bj) in w.iter_mut().zip(b) {
                if !bj.is_zero() {
                    *wj = &*wj - &(&f * bj);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[GaussianRational]) -> bool {
        self.reduce(v).iter().all(Scalar::is_zero)
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        other.vectors.iter().all(|v| self.contains(v))
    }

    pub fn intersect(&self, other: &SubspaceBasis) -> SubspaceBasis {
        // v = Σ a_i x_i = Σ b_j y_j  ⇔  [X^T | -Y^T] (a, b) = 0
        let mut cols: Vec<Vector> = self.vectors.clone();
        cols.extend(other.vectors.iter().map(|y| y.iter().map(|c| -c).collect()));
        if cols.is_empty() {
            return Self::zero(self.ambient);
        }
        let m = ExactMatrix::from_columns(self.ambient, cols);
        let k = kernel(&m);
        let vs: Vec<Vector> = k
            .vectors
            .iter()
            .map(|coeffs| {
                let mut v = vec![GaussianRational::zero(); self.ambient];
                for (a, x) in coeffs.iter().zip(&self.vectors) {
                    for (vi, xi) in v.iter_mut().zip(x) {
                        *vi = &*vi + &(a * xi);
                    }
                }
                v
            })
            .collect();
        Self::span(self.ambient, &vs)
    }
}

pub fn kernel(m: &ExactMatrix) -> SubspaceBasis {
    let (r, pivots) = rref(m);
    let mut vectors = Vec::new();
    for free in (0..m.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![GaussianRational::zero(); m.cols];
        v[free] = GaussianRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r.get(i, free);
        }
        vectors.push(v);
    }
    SubspaceBasis::span(m.cols, &vectors)
}

/// Column space.
pub fn image(m: &ExactMatrix) -> SubspaceBasis {
    let cols: Vec<Vector> = (0..m.cols).map(|j| m.column(j)).collect();
    SubspaceBasis::span(m.rows, &cols)
}

/// Some `x` with `m x = b`, or `None` when inconsistent.
pub fn solve(m: &ExactMatrix, b: &[GaussianRational]) -> Option<Vector> {
    assert_eq!(m.rows, b.len(), "right-hand side length mismatch");
    let mut aug = ExactMatrix::zeros(m.rows, m.cols + 1);
    for (i, bi) in b.iter().enumerate() {
        for j in 0..m.cols {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, m.cols, bi.clone());
    }
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return None;
    }
    let mut x = vec![GaussianRational::zero(); m.cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r.get(i, m.cols).clone();
    }
    Some(x)
}

/// Coordinates modulo a subspace: a left inverse of the basis
/// `[denominator | representatives]` together with rows annihilating the
/// numerator.
#[derive(Clone, Debug, PartialEq)]
pub struct Reducer {
    ambient: usize,
    den_dim: usize,
    dim: usize,
    left_inverse: ExactMatrix,
    annihilator: ExactMatrix,
}

impl Reducer {
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn in_numerator(&self, v: &[GaussianRational]) -> bool {
        self.annihilator.mul_vec(v).iter().all(Scalar::is_zero)
    }

    /// Quotient coordinates of a numerator vector.
    pub fn reduce(&self, v: &[GaussianRational]) -> Result<Vector, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::DimensionMismatch { expected: self.ambient, got: v.len() });
        }
        if !self.in_numerator(v) {
            return Err(LinalgError::NotInNumerator);
        }
        let full = self.left_inverse.mul_vec(v);
        Ok(full[self.den_dim..self.den_dim + self.dim].to_vec())
    }

    /// Coordinates of `v` along the denominator basis (the chosen primitive).
    pub fn denominator_coordinates(&self, v: &[GaussianRational]) -> Result<Vector, LinalgError> {
        if !self.in_numerator(v) {
            return Err(LinalgError::NotInNumerator);
        }
        Ok(self.left_inverse.mul_vec(v)[..self.den_dim].to_vec())
    }

    /// Applies [`Reducer::reduce`] monomial by monomial for polynomial vectors.
    pub fn reduce_scalars<S: Scalar>(&self, v: &[S]) -> Result<Vec<S>, LinalgError> {
        S::map_linear(v, &mut |c| self.reduce(c))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientReport {
    pub dim: usize,
    /// Lifts of a basis of the quotient, as ambient vectors.
    pub representatives: Vec<Vector>,
    pub reducer: Reducer,
}

/// `numerator / denominator`. Containment is checked.
pub fn quotient(numerator: &SubspaceBasis, denominator: &SubspaceBasis) -> Result<QuotientReport, LinalgError> {
    if numerator.ambient != denominator.ambient {
        return Err(LinalgError::DimensionMismatch { expected: numerator.ambient, got: denominator.ambient });
    }
    if !numerator.contains_subspace(denominator) {
        return Err(LinalgError::NotContained);
    }
    let ambient = numerator.ambient;
    // extend the denominator basis by numerator vectors, greedily
    let mut basis: Vec<Vector> = denominator.vectors.clone();
    let mut span = denominator.clone();
    let mut reps = Vec::new();
    for v in &numerator.vectors {
        if !span.contains(v) {
            basis.push(v.clone());
            reps.push(v.clone());
            span = SubspaceBasis::span(ambient, &basis);
        }
    }
    // row reduce [B | I]: E B = [I; 0]
    let k = basis.len();
    let b = if k == 0 { ExactMatrix::zeros(ambient, 0) } else { ExactMatrix::from_columns(ambient, basis) };
    let mut aug = ExactMatrix::zeros(ambient, k + ambient);
    for i in 0..ambient {
        for j in 0..k {
            aug.set(i, j, b.get(i, j).clone());
        }
        aug.set(i, k + i, GaussianRational::one());
    }
    let (r, pivots) = rref(&aug);
    debug_assert_eq!(&pivots[..k.min(pivots.len())], &(0..k).collect::<Vec<_>>()[..]);
    let mut left_inverse = ExactMatrix::zeros(k, ambient);
    let mut annihilator = ExactMatrix::zeros(ambient - k, ambient);
    for i in 0..ambient {
        for j in 0..ambient {
            let v = r.get(i, k + j).clone();
            if i < k {
                left_inverse.set(i, j, v);
            } else {
                annihilator.set(i - k, j, v);
            }
        }
    }
    let dim = reps.len();
    Ok(QuotientReport {
        dim,
        representatives: reps,
        reducer: Reducer { ambient, den_dim: denominator.dim(), dim, left_inverse, annihilator },
    })
}

/// Degree-by-degree failure of [`graded_solve`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradedFailure {
    /// First order at which the residual cannot be absorbed.
    pub order: u32,
    /// The homogeneous degree-`order` part of `b - M x`.
    pub residual: Vec<TruncatedPoly>,
    /// The solution accumulated through order `order - 1`.
    pub partial: Vec<TruncatedPoly>,
}

/// Solves `M x = b` over the truncated ring up to total degree `order`,
/// absorbing each homogeneous residual with the constant part of `M`.
pub fn graded_solve(
    m: &Matrix<TruncatedPoly>,
    b: &[TruncatedPoly],
    order: u32,
) -> Result<Vec<TruncatedPoly>, GradedFailure> {
    let ring = b.iter().chain(m.data.iter()).find_map(|p| p.ring().cloned());
    let zero = || match &ring {
        Some(r) => TruncatedPoly::zero_in(r),
        None => TruncatedPoly::zero(),
    };
    let m0 = m.map(TruncatedPoly::constant_term);
    let mut x: Vec<TruncatedPoly> = vec![zero(); m.cols];
    for k in 0..=order {
        let mx = m.mul_vec(&x);
        let residual: Vec<TruncatedPoly> =
            b.iter().zip(&mx).map(|(bi, ai)| (bi.clone() - ai.clone()).homogeneous_part(k)).collect();
        let mut monomials: Vec<_> = residual.iter().flat_map(|p| p.terms().map(|(mono, _)| mono.clone())).collect();
        monomials.sort();
        monomials.dedup();
        for mono in monomials {
            let rhs: Vector = residual.iter().map(|p| p.coefficient(&mono)).collect();
            match solve(&m0, &rhs) {
                Some(y) => {
                    for (xi, yi) in x.iter_mut().zip(y) {
                        if yi.is_zero() {
                            continue;
                        }
                        let term = match &ring {
                            Some(r) => TruncatedPoly::monomial(r, mono.clone(), yi),
                            None => TruncatedPoly::constant(yi),
                        };
                        *xi = xi.clone() + term;
                    }
                }
                None => {
                    let partial = x.iter().map(|p| truncate_below(p, k)).collect();
                    return Err(GradedFailure { order: k, residual, partial });
                }
            }
        }
    }
    Ok(x)
}

fn truncate_below(p: &TruncatedPoly, k: u32) -> TruncatedPoly {
    let mut out = match p.ring() {
        Some(r) => TruncatedPoly::zero_in(r),
        None => TruncatedPoly::zero(),
    };
    for d in 0..k {
        out = out + p.homogeneous_part(d);
    }
    out
}
