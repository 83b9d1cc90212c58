//! Algebraic families of Lie algebras over the line.
//!
//! A family is a free module of rank `d` over the coordinate ring of an affine
//! chart, with the bracket of basis sections given by structure constants that
//! are rational functions of the chart coordinate. Fibers are obtained by
//! evaluating the constants at a point. Families over the projective line are
//! glued from a `z`-chart and a `w = 1/z` chart (see [`TwoChartFamily`]).

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{
    coordinates_in, rank_of, ExactError, Field, GaussianRational, LaurentPoly, Matrix, Point,
    RationalFunction,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("not a Lie algebra: {0}")]
    NotALieAlgebra(String),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("not a subalgebra: bracket of {0} and {1} leaves the span")]
    NotASubalgebra(usize, usize),
    #[error("structure constants are not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("invalid base change: {0}")]
    InvalidBaseChange(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k` over a field `F`.
///
/// With `F = GaussianRational` this is a single Lie algebra (a fiber); with
/// `F = RationalFunction` it is the generic fiber of a family.
#[derive(Clone, PartialEq)]
pub struct LieAlgebra<F = GaussianRational> {
    labels: Vec<String>,
    constants: Vec<F>,
}

impl<F: Field> LieAlgebra<F> {
    /// Builds from a dense `d x d x d` array; antisymmetry is enforced.
    pub fn new(labels: Vec<String>, constants: Vec<F>) -> Result<Self, LieError> {
        let d = labels.len();
        if constants.len() != d * d * d {
            return Err(LieError::DimensionMismatch(format!(
                "{} constants for rank {d}",
                constants.len()
            )));
        }
        let alg = Self { labels, constants };
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    if alg.c(i, j, k).clone() + alg.c(j, i, k).clone() != F::zero() {
                        return Err(LieError::NotAntisymmetric(i, j));
                    }
                }
            }
        }
        Ok(alg)
    }

    /// Builds from the brackets `[e_i, e_j]` for `i < j`.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, Vec<F>)]) -> Result<Self, LieError> {
        let d = labels.len();
        let mut constants = vec![F::zero(); d * d * d];
        for (i, j, v) in brackets {
            if v.len() != d || *i >= d || *j >= d {
                return Err(LieError::DimensionMismatch("bracket entry".into()));
            }
            for (k, x) in v.iter().enumerate() {
                constants[(i * d + j) * d + k] = x.clone();
                constants[(j * d + i) * d + k] = -x.clone();
            }
        }
        Self::new(labels, constants)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn c(&self, i: usize, j: usize, k: usize) -> &F {
        let d = self.dim();
        &self.constants[(i * d + j) * d + k]
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<F> {
        (0..self.dim()).map(|k| self.c(i, j, k).clone()).collect()
    }

    pub fn bracket(&self, x: &[F], y: &[F]) -> Vec<F> {
        let d = self.dim();
        let mut out = vec![F::zero(); d];
        for i in 0..d {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if y[j].is_zero() || i == j {
                    continue;
                }
                let s = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.c(i, j, k);
                    if !c.is_zero() {
                        *o = o.clone() + s.clone() * c.clone();
                    }
                }
            }
        }
        out
    }

    pub fn unit(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[i] = F::one();
        v
    }

    /// First basis triple (in lexicographic order) where the Jacobi identity
    /// fails, with the nonzero residual.
    pub fn jacobi_violation(&self) -> Option<JacobiFailure<F>> {
        let d = self.dim();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let (ei, ej, ek) = (self.unit(i), self.unit(j), self.unit(k));
                    let t1 = self.bracket(&ei, &self.bracket(&ej, &ek));
                    let t2 = self.bracket(&ej, &self.bracket(&ek, &ei));
                    let t3 = self.bracket(&ek, &self.bracket(&ei, &ej));
                    let residual: Vec<F> = t1
                        .into_iter()
                        .zip(t2)
                        .zip(t3)
                        .map(|((a, b), c)| a + b + c)
                        .collect();
                    if residual.iter().any(|x| !x.is_zero()) {
                        return Some(JacobiFailure {
                            triple: [self.labels[i].clone(), self.labels[j].clone(), self.labels[k].clone()],
                            indices: [i, j, k],
                            residual,
                        });
                    }
                }
            }
        }
        None
    }

    /// Matrix of `ad x` in the basis; column `j` is `[x, e_j]`.
    pub fn ad(&self, x: &[F]) -> Matrix<F> {
        let cols: Vec<Vec<F>> = (0..self.dim()).map(|j| self.bracket(x, &self.unit(j))).collect();
        Matrix::from_columns(self.dim(), &cols)
    }

    /// Structure constants in a new basis (given as coordinate vectors).
    pub fn change_basis(&self, basis: &[Vec<F>], labels: Vec<String>) -> Result<Self, LieError> {
        let d = self.dim();
        if basis.len() != d || rank_of(basis) != d {
            return Err(LieError::DimensionMismatch("change of basis is not invertible".into()));
        }
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let b = self.bracket(&basis[i], &basis[j]);
                let coords = coordinates_in(basis, &b).expect("basis spans");
                brackets.push((i, j, coords));
            }
        }
        Self::from_brackets(labels, &brackets)
    }

    /// Brackets of a subspace basis, if the subspace is closed.
    pub fn subalgebra_violation(&self, basis: &[Vec<F>]) -> Option<(usize, usize)> {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let b = self.bracket(&basis[i], &basis[j]);
                if coordinates_in(basis, &b).is_none() {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn map_constants<G: Field>(&self, f: impl Fn(&F) -> G) -> LieAlgebra<G> {
        LieAlgebra { labels: self.labels.clone(), constants: self.constants.iter().map(f).collect() }
    }

    /// Spanning vectors of `[a, b]` for `a`, `b` ranging over two subspaces.
    fn bracket_span(&self, a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
        let mut out = Vec::new();
        for x in a {
            for y in b {
                let v = self.bracket(x, y);
                if v.iter().any(|c| !c.is_zero()) {
                    out.push(v);
                }
            }
        }
        independent_subset(out)
    }

    /// Basis of the derived algebra `[g, g]`.
    pub fn derived_basis(&self) -> Vec<Vec<F>> {
        let all: Vec<Vec<F>> = (0..self.dim()).map(|i| self.unit(i)).collect();
        self.bracket_span(&all, &all)
    }

    pub fn fiber_invariants(&self) -> FiberInvariants {
        let d = self.dim();
        let derived = self.derived_basis();
        // x is central iff sum_i x_i c[i][j][k] = 0 for all j, k.
        let mut rows = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                rows.push((0..d).map(|i| self.c(i, j, k).clone()).collect::<Vec<F>>());
            }
        }
        let center_dim = if d == 0 { 0 } else { Matrix::from_rows(rows).kernel().len() };
        let mut current = derived.clone();
        let mut prev_dim = d;
        let solvable = loop {
            if current.is_empty() {
                break true;
            }
            if current.len() == prev_dim {
                break false;
            }
            prev_dim = current.len();
            current = self.bracket_span(&current, &current);
        };
        FiberInvariants { derived_dim: derived.len(), center_dim, solvable }
    }
}

/// Keeps a maximal linearly independent subfamily.
pub(crate) fn independent_subset<F: Field>(vectors: Vec<Vec<F>>) -> Vec<Vec<F>> {
    let mut kept: Vec<Vec<F>> = Vec::new();
    for v in vectors {
        kept.push(v);
        if rank_of(&kept) < kept.len() {
            kept.pop();
        }
    }
    kept
}

impl<F: Field + fmt::Display> fmt::Debug for LieAlgebra<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        let mut s = f.debug_map();
        for i in 0..d {
            for j in i + 1..d {
                let v = self.bracket_basis(i, j);
                if v.iter().any(|x| !x.is_zero()) {
                    let terms: Vec<String> = v
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| format!("({c}) {}", self.labels[k]))
                        .collect();
                    s.entry(&format!("[{}, {}]", self.labels[i], self.labels[j]), &terms.join(" + "));
                }
            }
        }
        s.finish()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFailure<F> {
    pub triple: [String; 3],
    pub indices: [usize; 3],
    pub residual: Vec<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberInvariants {
    pub derived_dim: usize,
    pub center_dim: usize,
    pub solvable: bool,
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn gq(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

impl LieAlgebra<GaussianRational> {
    /// `sl(2)` in the basis `H, X, Y`.
    pub fn sl2() -> Self {
        let v = |a: i64, b: i64, c: i64| vec![gq(a), gq(b), gq(c)];
        Self::from_brackets(
            labels(&["H", "X", "Y"]),
            &[(0, 1, v(0, 2, 0)), (0, 2, v(0, 0, -2)), (1, 2, v(1, 0, 0))],
        )
        .unwrap()
    }

    /// `gl(n)` in the basis of matrix units `E_ij` (row-major).
    pub fn gl(n: usize) -> Self {
        let basis: Vec<Matrix<GaussianRational>> = (0..n * n).map(|idx| matrix_unit(n, idx / n, idx % n)).collect();
        let names = (0..n * n).map(|idx| format!("E{}{}", idx / n + 1, idx % n + 1)).collect();
        Self::from_matrices(&basis, names).unwrap()
    }

    pub fn abelian(d: usize) -> Self {
        let names = (0..d).map(|i| format!("e{}", i + 1)).collect();
        Self::new(names, vec![GaussianRational::zero(); d * d * d]).unwrap()
    }

    /// Structure constants of a linearly independent set of square matrices
    /// closed under commutators.
    pub fn from_matrices(basis: &[Matrix<GaussianRational>], names: Vec<String>) -> Result<Self, LieError> {
        let flat: Vec<Vec<GaussianRational>> = basis.iter().map(flatten).collect();
        let d = basis.len();
        let mut brackets = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                let c = flatten(&basis[i].commutator(&basis[j]));
                let coords = coordinates_in(&flat, &c).ok_or(LieError::NotASubalgebra(i, j))?;
                brackets.push((i, j, coords));
            }
        }
        Self::from_brackets(names, &brackets)
    }
}

pub(crate) fn matrix_unit(n: usize, i: usize, j: usize) -> Matrix<GaussianRational> {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = GaussianRational::one();
    m
}

pub(crate) fn flatten<F: Field>(m: &Matrix<F>) -> Vec<F> {
    m.to_rows().into_iter().flatten().collect()
}

/// Fiber invariants of a Lie algebra.
pub fn fiber_invariants(l: &LieAlgebra) -> FiberInvariants {
    l.fiber_invariants()
}

/// An involutive automorphism, acting on coordinate vectors (`theta * v`).
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    matrix: Matrix<GaussianRational>,
}

impl Involution {
    pub fn new(matrix: Matrix<GaussianRational>) -> Self {
        Self { matrix }
    }

    /// The involution that multiplies basis vector `i` by `signs[i]`.
    pub fn diagonal(signs: &[i64]) -> Self {
        let mut m = Matrix::zeros(signs.len(), signs.len());
        for (i, &s) in signs.iter().enumerate() {
            m[(i, i)] = gq(s);
        }
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix<GaussianRational> {
        &self.matrix
    }

    pub fn validate(&self, l: &LieAlgebra) -> Result<(), LieError> {
        let d = l.dim();
        if self.matrix.rows() != d || self.matrix.cols() != d {
            return Err(LieError::InvalidInvolution("size does not match the algebra".into()));
        }
        if self.matrix.mul_mat(&self.matrix) != Matrix::identity(d) {
            return Err(LieError::InvalidInvolution("theta^2 != 1".into()));
        }
        for i in 0..d {
            for j in i + 1..d {
                let lhs = self.matrix.mul_vec(&l.bracket_basis(i, j));
                let rhs = l.bracket(&self.matrix.column(i), &self.matrix.column(j));
                if lhs != rhs {
                    return Err(LieError::InvalidInvolution(format!(
                        "not an automorphism on ({}, {})",
                        l.labels()[i],
                        l.labels()[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bases of the `+1` and `-1` eigenspaces.
    pub fn eigenspaces(&self) -> (Vec<Vec<GaussianRational>>, Vec<Vec<GaussianRational>>) {
        let d = self.matrix.rows();
        let id = Matrix::identity(d);
        let plus = self.matrix.sub_mat(&id).kernel();
        let minus = self.matrix.add_mat(&id).kernel();
        (plus, minus)
    }
}

/// Which affine chart of the projective line a family lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    /// Coordinate `z`, covering every point except `inf`.
    AffineZ,
    /// Coordinate `w = 1/z`, covering every point except `0`.
    AffineW,
}

/// A family of Lie algebras on one chart.
#[derive(Clone, PartialEq)]
pub struct LieFamily {
    algebra: LieAlgebra<RationalFunction>,
    chart: Chart,
}

impl fmt::Debug for LieFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieFamily").field("chart", &self.chart).field("brackets", &self.algebra).finish()
    }
}

impl LieFamily {
    pub fn new(algebra: LieAlgebra<RationalFunction>, chart: Chart) -> Self {
        Self { algebra, chart }
    }

    pub fn algebra(&self) -> &LieAlgebra<RationalFunction> {
        &self.algebra
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn rank(&self) -> usize {
        self.algebra.dim()
    }

    pub fn labels(&self) -> &[String] {
        self.algebra.labels()
    }

    /// Points of the chart where some structure constant has a pole, among
    /// the chart origin and the roots of denominators over `Q(i)`.
    pub fn is_regular_at(&self, p: &Point) -> bool {
        let coord = self.coordinate_of(p);
        self.algebra.constants.iter().all(|c| c.ord_at(&coord) >= crate::exactalg::Order::Finite(0))
    }

    /// The chart coordinate of a point given in the `z` coordinate.
    fn coordinate_of(&self, p: &Point) -> Point {
        match self.chart {
            Chart::AffineZ => p.clone(),
            Chart::AffineW => p.inverted(),
        }
    }

    /// The same family written in the other coordinate (`z <-> 1/z`).
    pub fn in_other_coordinate(&self) -> LieFamily {
        let chart = match self.chart {
            Chart::AffineZ => Chart::AffineW,
            Chart::AffineW => Chart::AffineZ,
        };
        LieFamily { algebra: self.algebra.map_constants(RationalFunction::invert_variable), chart }
    }
}

fn to_family(l: &LieAlgebra, scale: impl Fn(usize, usize, usize) -> RationalFunction) -> LieFamily {
    let d = l.dim();
    let mut constants = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let c = l.c(i, j, k);
                constants.push(if c.is_zero() { RationalFunction::zero() } else { scale(i, j, k).scale(c) });
            }
        }
    }
    LieFamily::new(LieAlgebra { labels: l.labels.clone(), constants }, Chart::AffineZ)
}

fn require_lie(l: &LieAlgebra) -> Result<(), LieError> {
    match l.jacobi_violation() {
        None => Ok(()),
        Some(w) => Err(LieError::NotALieAlgebra(format!(
            "Jacobi fails on ({}, {}, {}) with residual {:?}",
            w.triple[0], w.triple[1], w.triple[2], w.residual
        ))),
    }
}

/// `O_X (x) g` with `z`-independent brackets.
pub fn constant_family(l: &LieAlgebra) -> Result<LieFamily, LieError> {
    require_lie(l)?;
    Ok(to_family(l, |_, _, _| RationalFunction::one()))
}

/// Every bracket multiplied by `z^m`; the fiber at `0` is abelian.
pub fn scaled_bracket_family(l: &LieAlgebra, m: u32) -> Result<LieFamily, LieError> {
    require_lie(l)?;
    if m == 0 {
        return Err(LieError::InvalidBaseChange("exponent must be positive".into()));
    }
    Ok(to_family(l, |_, _, _| RationalFunction::z_pow(m as i64)))
}

fn is_unit_vector(v: &[GaussianRational]) -> Option<usize> {
    let nonzero: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    match nonzero.as_slice() {
        [i] if v[*i].is_one() => Some(*i),
        _ => None,
    }
}

/// Rewrites `l` in the basis `first ++ second`, keeping the old labels when
/// the new basis is a permutation of the old one. Returns the new algebra and
/// the number of leading vectors (those of `first`).
fn adapted(l: &LieAlgebra, first: &[Vec<GaussianRational>], second: &[Vec<GaussianRational>], tags: (&str, &str)) -> Result<(LieAlgebra, usize), LieError> {
    let basis: Vec<Vec<GaussianRational>> = first.iter().chain(second).cloned().collect();
    let units: Option<Vec<usize>> = basis.iter().map(|v| is_unit_vector(v)).collect();
    let names = match units {
        Some(idx) => idx.iter().map(|&i| l.labels()[i].clone()).collect(),
        None => (0..first.len())
            .map(|i| format!("{}{}", tags.0, i + 1))
            .chain((0..second.len()).map(|i| format!("{}{}", tags.1, i + 1)))
            .collect(),
    };
    Ok((l.change_basis(&basis, names)?, first.len()))
}

/// The contraction family of a symmetric pair: the bracket is multiplied by
/// `z` on `p (x) p`, where `g = k + p` is the eigenspace split of `theta`.
///
/// If `theta` is diagonal in the given basis the basis is kept; otherwise the
/// family is written in an eigenbasis labelled `k1.., p1..`.
pub fn contraction_family(l: &LieAlgebra, theta: &Involution) -> Result<LieFamily, LieError> {
    require_lie(l)?;
    theta.validate(l)?;
    let (k, p) = theta.eigenspaces();
    let in_p: Vec<bool>;
    let base;
    if let Some(signs) = diagonal_signs(theta) {
        in_p = signs.iter().map(|&s| s < 0).collect();
        base = l.clone();
    } else {
        let (alg, nk) = adapted(l, &k, &p, ("k", "p"))?;
        in_p = (0..alg.dim()).map(|i| i >= nk).collect();
        base = alg;
    }
    Ok(to_family(&base, |i, j, _| {
        if in_p[i] && in_p[j] {
            RationalFunction::z()
        } else {
            RationalFunction::one()
        }
    }))
}

fn diagonal_signs(theta: &Involution) -> Option<Vec<i64>> {
    let m = theta.matrix();
    let d = m.rows();
    let mut signs = Vec::with_capacity(d);
    for i in 0..d {
        for j in 0..d {
            if i != j && !m[(i, j)].is_zero() {
                return None;
            }
        }
        signs.push(m[(i, i)].to_i64()?);
    }
    Some(signs)
}

/// The deformation to the normal cone of a subalgebra `k`, in its free
/// normal form on the basis `k ++ p` for a complement `p`:
/// `c'[i][j][l] = c[i][j][l] * z^(#{i, j in p} - [l in p])`.
///
/// For a symmetric pair this multiplies the bracket by `z^2` on `p (x) p`
/// and leaves everything else unchanged. The fiber at `0` is `k |x g/k`.
/// Without an explicit complement, the missing standard basis vectors are used.
pub fn deformation_family(
    l: &LieAlgebra,
    subalgebra: &[Vec<GaussianRational>],
    complement: Option<&[Vec<GaussianRational>]>,
) -> Result<LieFamily, LieError> {
    require_lie(l)?;
    if let Some((i, j)) = l.subalgebra_violation(subalgebra) {
        return Err(LieError::NotASubalgebra(i, j));
    }
    let p = complement_of(l, subalgebra, complement)?;
    let (base, nk) = adapted(l, subalgebra, &p, ("k", "p"))?;
    Ok(to_family(&base, |i, j, target| {
        let exp = (i >= nk) as i64 + (j >= nk) as i64 - (target >= nk) as i64;
        debug_assert!(exp >= 0);
        RationalFunction::z_pow(exp)
    }))
}

fn complement_of(
    l: &LieAlgebra,
    subalgebra: &[Vec<GaussianRational>],
    complement: Option<&[Vec<GaussianRational>]>,
) -> Result<Vec<Vec<GaussianRational>>, LieError> {
    let p: Vec<Vec<GaussianRational>> = match complement {
        Some(c) => c.to_vec(),
        None => {
            let mut chosen = subalgebra.to_vec();
            let mut extra = Vec::new();
            for i in 0..l.dim() {
                chosen.push(l.unit(i));
                if rank_of(&chosen) < chosen.len() {
                    chosen.pop();
                } else {
                    extra.push(l.unit(i));
                }
            }
            extra
        }
    };
    if subalgebra.len() + p.len() != l.dim() {
        return Err(LieError::DimensionMismatch("subalgebra and complement do not span".into()));
    }
    Ok(p)
}

/// The deformation family as the subsheaf of `O (x) g` of sections whose value
/// at `0` lies in `k`: the map sends basis sections of `k` to themselves and
/// those of the complement `p` to `z p`. Target is `constant_family(l)`.
pub fn deformation_embedding(
    l: &LieAlgebra,
    subalgebra: &[Vec<GaussianRational>],
    complement: Option<&[Vec<GaussianRational>]>,
) -> Result<FamilyMorphism, LieError> {
    let p = complement_of(l, subalgebra, complement)?;
    let lift = |v: &Vec<GaussianRational>, f: &RationalFunction| -> Vec<RationalFunction> {
        v.iter().map(|c| f.scale(c)).collect()
    };
    let (one, z) = (RationalFunction::one(), RationalFunction::z());
    let cols: Vec<Vec<RationalFunction>> =
        subalgebra.iter().map(|v| lift(v, &one)).chain(p.iter().map(|v| lift(v, &z))).collect();
    Ok(FamilyMorphism { matrix: Matrix::from_columns(l.dim(), &cols) })
}

/// Pull back along `z -> psi(z)` for a nonconstant polynomial `psi`.
pub fn base_change(f: &LieFamily, psi: &LaurentPoly) -> Result<LieFamily, LieError> {
    if !psi.is_polynomial() || psi.is_constant() {
        return Err(LieError::InvalidBaseChange(format!("{psi} is not a nonconstant polynomial")));
    }
    let psi: RationalFunction = psi.clone().into();
    let mut constants = Vec::with_capacity(f.algebra.constants.len());
    for c in &f.algebra.constants {
        constants.push(c.compose(&psi)?);
    }
    Ok(LieFamily::new(LieAlgebra { labels: f.algebra.labels.clone(), constants }, f.chart))
}

/// Symbolic Jacobi identity over the function field.
pub fn jacobi_check(f: &LieFamily) -> Result<(), JacobiFailure<RationalFunction>> {
    match f.algebra.jacobi_violation() {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

/// The fiber at a point of the projective line (given in the `z` coordinate).
pub fn fiber(f: &LieFamily, p: &Point) -> Result<LieAlgebra, LieError> {
    let coord = f.coordinate_of(p);
    let mut constants = Vec::with_capacity(f.algebra.constants.len());
    for c in &f.algebra.constants {
        constants.push(c.value_at(&coord).map_err(|_| ExactError::PoleAtPoint(p.to_string()))?);
    }
    LieAlgebra::new(f.algebra.labels.clone(), constants)
}

/// A morphism of families: column `i` of `matrix` holds the image of the
/// `i`-th source basis section in target coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMorphism {
    pub matrix: Matrix<RationalFunction>,
}

impl FamilyMorphism {
    pub fn identity(d: usize) -> Self {
        Self { matrix: Matrix::identity(d) }
    }

    /// Diagonal map multiplying basis section `i` by `factors[i]`.
    pub fn diagonal(factors: Vec<RationalFunction>) -> Self {
        let d = factors.len();
        let mut m = Matrix::zeros(d, d);
        for (i, f) in factors.into_iter().enumerate() {
            m[(i, i)] = f;
        }
        Self { matrix: m }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphismFailure {
    pub pair: (String, String),
    pub image_of_bracket: Vec<RationalFunction>,
    pub bracket_of_images: Vec<RationalFunction>,
}

/// Verifies `phi([a, b]) = [phi a, phi b]` on all basis pairs.
pub fn check_morphism(phi: &FamilyMorphism, source: &LieFamily, target: &LieFamily) -> Result<(), MorphismFailure> {
    let d = source.rank();
    assert_eq!(phi.matrix.cols(), d, "morphism/source rank mismatch");
    assert_eq!(phi.matrix.rows(), target.rank(), "morphism/target rank mismatch");
    for i in 0..d {
        for j in i + 1..d {
            let lhs = phi.matrix.mul_vec(&source.algebra.bracket_basis(i, j));
            let rhs = target.algebra.bracket(&phi.matrix.column(i), &phi.matrix.column(j));
            if lhs != rhs {
                return Err(MorphismFailure {
                    pair: (source.labels()[i].clone(), source.labels()[j].clone()),
                    image_of_bracket: lhs,
                    bracket_of_images: rhs,
                });
            }
        }
    }
    Ok(())
}

/// A family over the projective line given by two charts and the gluing
/// isomorphism from the `z`-chart family to the `w`-chart family on the
/// overlap (entries are functions of `z`).
#[derive(Debug, Clone, PartialEq)]
pub struct TwoChartFamily {
    pub z_chart: LieFamily,
    pub w_chart: LieFamily,
    pub gluing: FamilyMorphism,
}

impl TwoChartFamily {
    /// Checks both charts and that the gluing map is an isomorphism of
    /// families over `C^x`.
    pub fn verify(&self) -> Result<(), String> {
        if self.z_chart.chart != Chart::AffineZ || self.w_chart.chart != Chart::AffineW {
            return Err("charts are mislabelled".into());
        }
        jacobi_check(&self.z_chart).map_err(|w| format!("z-chart Jacobi fails on {:?}", w.triple))?;
        jacobi_check(&self.w_chart).map_err(|w| format!("w-chart Jacobi fails on {:?}", w.triple))?;
        let w_in_z = self.w_chart.in_other_coordinate();
        check_morphism(&self.gluing, &self.z_chart, &w_in_z)
            .map_err(|w| format!("gluing is not a morphism on {:?}", w.pair))?;
        if self.gluing.matrix.inverse().is_none() {
            return Err("gluing is not invertible".into());
        }
        Ok(())
    }

    /// Fiber at any point, using the `w` chart only at `inf`.
    pub fn fiber(&self, p: &Point) -> Result<LieAlgebra, LieError> {
        match p {
            Point::Infinity => fiber(&self.w_chart, p),
            _ => fiber(&self.z_chart, p),
        }
    }
}

/// The contraction family of a symmetric pair over the projective line. The
/// `w`-chart has bracket `w [., .]` on `p (x) p`, and the gluing multiplies
/// sections of `p` by `z`.
pub fn contraction_family_projective(l: &LieAlgebra, theta: &Involution) -> Result<TwoChartFamily, LieError> {
    let z_chart = contraction_family(l, theta)?;
    let w_chart = LieFamily { chart: Chart::AffineW, ..z_chart.clone() };
    let signs = diagonal_signs(theta);
    let in_p: Vec<bool> = match signs {
        Some(s) => s.iter().map(|&x| x < 0).collect(),
        None => z_chart.labels().iter().map(|l| l.starts_with('p')).collect(),
    };
    let factors = in_p
        .iter()
        .map(|&p| if p { RationalFunction::z() } else { RationalFunction::one() })
        .collect();
    Ok(TwoChartFamily { z_chart, w_chart, gluing: FamilyMorphism::diagonal(factors) })
}

#[derive(Serialize, Deserialize)]
struct ConstantEntry {
    i: usize,
    j: usize,
    k: usize,
    c: RationalFunction,
}

#[derive(Serialize, Deserialize)]
struct LieFamilyRepr {
    rank: usize,
    labels: Vec<String>,
    chart: Chart,
    constants: Vec<ConstantEntry>,
}

/// JSON: `{rank, labels, chart, constants: [{i, j, k, c}]}` listing the
/// nonzero constants with `i < j`.
impl Serialize for LieFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = self.rank();
        let mut constants = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in 0..d {
                    let c = self.algebra.c(i, j, k);
                    if !c.is_zero() {
                        constants.push(ConstantEntry { i, j, k, c: c.clone() });
                    }
                }
            }
        }
        LieFamilyRepr { rank: d, labels: self.labels().to_vec(), chart: self.chart, constants }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LieFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = LieFamilyRepr::deserialize(deserializer)?;
        if repr.labels.len() != repr.rank {
            return Err(D::Error::custom("rank does not match the number of labels"));
        }
        let d = repr.rank;
        let mut brackets: Vec<(usize, usize, Vec<RationalFunction>)> = Vec::new();
        for e in repr.constants {
            if e.i >= e.j || e.j >= d || e.k >= d {
                return Err(D::Error::custom(format!("bad constant index ({}, {}, {})", e.i, e.j, e.k)));
            }
            match brackets.iter_mut().find(|(i, j, _)| (*i, *j) == (e.i, e.j)) {
                Some((_, _, v)) => v[e.k] = e.c,
                None => {
                    let mut v = vec![RationalFunction::zero(); d];
                    v[e.k] = e.c;
                    brackets.push((e.i, e.j, v));
                }
            }
        }
        let algebra = LieAlgebra::from_brackets(repr.labels, &brackets).map_err(D::Error::custom)?;
        Ok(LieFamily::new(algebra, repr.chart))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2_theta() -> Involution {
        Involution::diagonal(&[1, -1, -1])
    }

    fn span_h() -> Vec<Vec<GaussianRational>> {
        vec![vec![gq(1), gq(0), gq(0)]]
    }

    const SL2: FiberInvariants = FiberInvariants { derived_dim: 3, center_dim: 0, solvable: false };
    const MOTION: FiberInvariants = FiberInvariants { derived_dim: 2, center_dim: 0, solvable: true };

    #[test]
    fn constant_families() {
        let f = constant_family(&LieAlgebra::sl2()).unwrap();
        assert!(jacobi_check(&f).is_ok());
        let ab = constant_family(&LieAlgebra::abelian(2)).unwrap();
        assert!(ab.algebra().constants.iter().all(Zero::is_zero));
    }

    #[test]
    fn broken_algebra_is_rejected() {
        // [X, Y] = X instead of H: Jacobi on (H, X, Y) leaves 2X.
        let v = |a: i64, b: i64, c: i64| vec![gq(a), gq(b), gq(c)];
        let broken = LieAlgebra::from_brackets(
            labels(&["H", "X", "Y"]),
            &[(0, 1, v(0, 2, 0)), (0, 2, v(0, 0, -2)), (1, 2, v(0, 1, 0))],
        )
        .unwrap();
        let w = broken.jacobi_violation().unwrap();
        assert_eq!(w.residual, v(0, 2, 0));
        assert!(matches!(constant_family(&broken), Err(LieError::NotALieAlgebra(_))));
    }

    #[test]
    fn scaled_bracket_fibers() {
        let f = scaled_bracket_family(&LieAlgebra::sl2(), 1).unwrap();
        assert_eq!(fiber(&f, &Point::zero()).unwrap().fiber_invariants().derived_dim, 0);
        assert_eq!(fiber(&f, &Point::int(1)).unwrap(), LieAlgebra::sl2());
        assert!(jacobi_check(&scaled_bracket_family(&LieAlgebra::sl2(), 2).unwrap()).is_ok());
        let shifted = base_change(&f, &LaurentPoly::from_ints(&[1, 1])).unwrap();
        assert_eq!(fiber(&shifted, &Point::zero()).unwrap(), LieAlgebra::sl2());
    }

    #[test]
    fn contraction_of_sl2() {
        let f = contraction_family(&LieAlgebra::sl2(), &sl2_theta()).unwrap();
        assert!(jacobi_check(&f).is_ok());
        let f0 = fiber(&f, &Point::zero()).unwrap();
        assert_eq!(f0.fiber_invariants(), MOTION);
        assert_eq!(f0.derived_basis().len(), 2);
        assert_eq!(fiber(&f, &Point::int(1)).unwrap(), LieAlgebra::sl2());
        // Regular at infinity only in the other chart.
        assert!(fiber(&f, &Point::Infinity).is_err());
        let proj = contraction_family_projective(&LieAlgebra::sl2(), &sl2_theta()).unwrap();
        proj.verify().unwrap();
        assert_eq!(proj.fiber(&Point::Infinity).unwrap().fiber_invariants(), MOTION);
    }

    #[test]
    fn trivial_involution_gives_constant_family() {
        let f = contraction_family(&LieAlgebra::sl2(), &Involution::diagonal(&[1, 1, 1])).unwrap();
        assert_eq!(f, constant_family(&LieAlgebra::sl2()).unwrap());
        assert!(matches!(
            contraction_family(&LieAlgebra::sl2(), &Involution::diagonal(&[1, 1, -1])),
            Err(LieError::InvalidInvolution(_))
        ));
    }

    #[test]
    fn nondiagonal_involution_uses_eigenbasis() {
        // theta swaps X and Y and negates H: an automorphism of sl2.
        let m = Matrix::from_rows(vec![
            vec![gq(-1), gq(0), gq(0)],
            vec![gq(0), gq(0), gq(1)],
            vec![gq(0), gq(1), gq(0)],
        ]);
        let f = contraction_family(&LieAlgebra::sl2(), &Involution::new(m)).unwrap();
        assert_eq!(f.labels(), ["k1", "p1", "p2"]);
        assert!(jacobi_check(&f).is_ok());
        assert_eq!(fiber(&f, &Point::zero()).unwrap().fiber_invariants(), MOTION);
    }

    #[test]
    fn deformation_of_sl2() {
        let d = deformation_family(&LieAlgebra::sl2(), &span_h(), None).unwrap();
        assert!(jacobi_check(&d).is_ok());
        assert_eq!(fiber(&d, &Point::zero()).unwrap().fiber_invariants(), MOTION);
        assert_eq!(fiber(&d, &Point::int(1)).unwrap(), LieAlgebra::sl2());
        let bad = vec![vec![gq(0), gq(1), gq(0)], vec![gq(0), gq(0), gq(1)]];
        assert!(matches!(
            deformation_family(&LieAlgebra::sl2(), &bad, None),
            Err(LieError::NotASubalgebra(0, 1))
        ));
    }

    #[test]
    fn deformation_of_non_symmetric_subalgebra() {
        // Borel subalgebra span{H, X} of sl2.
        let b = vec![vec![gq(1), gq(0), gq(0)], vec![gq(0), gq(1), gq(0)]];
        let d = deformation_family(&LieAlgebra::sl2(), &b, None).unwrap();
        assert!(jacobi_check(&d).is_ok());
        let f0 = fiber(&d, &Point::zero()).unwrap();
        // b |x sl2/b: [H, Y] = -2Y survives, [X, Y] = H dies.
        assert_eq!(f0.fiber_invariants(), FiberInvariants { derived_dim: 2, center_dim: 0, solvable: true });
    }

    #[test]
    fn base_change_by_square_matches_deformation() {
        let c = contraction_family(&LieAlgebra::sl2(), &sl2_theta()).unwrap();
        let d = deformation_family(&LieAlgebra::sl2(), &span_h(), None).unwrap();
        let pulled = base_change(&c, &LaurentPoly::from_ints(&[0, 0, 1])).unwrap();
        assert!(check_morphism(&FamilyMorphism::identity(3), &d, &pulled).is_ok());
        assert!(check_morphism(&FamilyMorphism::identity(3), &c, &d).is_err());
        assert_eq!(base_change(&c, &LaurentPoly::z()).unwrap(), c);
        // Inside O (x) sl2 the deformation family is the subsheaf reached by
        // multiplying sections of p by z.
        let embed = deformation_embedding(&LieAlgebra::sl2(), &span_h(), None).unwrap();
        let z = RationalFunction::z();
        let one = RationalFunction::one();
        assert_eq!(embed, FamilyMorphism::diagonal(vec![one, z.clone(), z]));
        let constant = constant_family(&LieAlgebra::sl2()).unwrap();
        assert!(check_morphism(&embed, &pulled, &constant).is_ok());
        assert!(check_morphism(&embed, &pulled, &d).is_err());
    }

    #[test]
    fn fiber_invariants_examples() {
        assert_eq!(LieAlgebra::sl2().fiber_invariants(), SL2);
        assert_eq!(
            LieAlgebra::abelian(3).fiber_invariants(),
            FiberInvariants { derived_dim: 0, center_dim: 3, solvable: true }
        );
        assert_eq!(
            LieAlgebra::gl(2).fiber_invariants(),
            FiberInvariants { derived_dim: 3, center_dim: 1, solvable: false }
        );
    }

    #[test]
    fn morphism_witness() {
        let c = constant_family(&LieAlgebra::sl2()).unwrap();
        assert!(check_morphism(&FamilyMorphism::identity(3), &c, &c).is_ok());
        let phi = FamilyMorphism::diagonal(vec![RationalFunction::one(), RationalFunction::z(), RationalFunction::one()]);
        let w = check_morphism(&phi, &c, &c).unwrap_err();
        assert_eq!(w.pair, ("X".to_string(), "Y".to_string()));
    }

    #[test]
    fn json_round_trip() {
        let f = contraction_family(&LieAlgebra::gl(2), &Involution::diagonal(&[1, -1, -1, 1])).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: LieFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn coeff() -> impl Strategy<Value = GaussianRational> {
        (-4i64..=4, 1i64..=3, -2i64..=2).prop_map(|(a, b, c)| GaussianRational::complex((a, b), (c, 1)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Pulling back along a polynomial keeps Jacobi and commutes with taking fibers.
        #[test]
        fn base_change_commutes_with_fibers(
            cs in prop::collection::vec(coeff(), 2..4),
            z0 in coeff(),
        ) {
            let psi = LaurentPoly::from_terms(cs.into_iter().enumerate().map(|(e, c)| (e as i64, c)));
            prop_assume!(!psi.is_constant());
            let f = contraction_family(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1])).unwrap();
            let g = base_change(&f, &psi).unwrap();
            prop_assert!(jacobi_check(&g).is_ok());
            let image = Point::Finite(psi.eval(&z0).unwrap());
            prop_assert!(fiber(&g, &Point::Finite(z0)).unwrap() == fiber(&f, &image).unwrap());
        }
    }
}
