//! The degenerating family of diagonal subalgebras in `gl(q+p) x gl(q+p)`.
//!
//! For `t = mu^2 / nu^2` the fiber is the image of `gl(q+p)` under
//! `X -> (Ad_z X, Ad_{z^-1} X)` with `z = diag(mu I_q, nu I_p)`, rescaled so
//! that it is spanned by the block-diagonal pairs `(k, k)` together with
//!
//! ```text
//! ((0, tB; 0, 0), (0, B; 0, 0))   and   ((0, 0; C, 0), (0, 0; tC, 0)).
//! ```
//!
//! At `t = 0` and `t = inf` the subspace degenerates to `k + p_0` and
//! `k + p_inf`, where the off-diagonal part squares to zero.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exactalg::{
    coordinates_in, inertia, rank_of, Field, GaussianRational, Matrix, Order, Point, RationalFunction,
};
use crate::liefam::{
    check_morphism, contraction_family, Chart, FamilyMorphism, FiberInvariants, Involution, LieAlgebra, LieError,
    LieFamily, TwoChartFamily,
};

type GR = GaussianRational;
type RF = RationalFunction;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrassError {
    #[error("limit at {boundary} has rank {got}, expected {expected}")]
    RankDropAtLimit { boundary: Boundary, expected: usize, got: usize },
    #[error("no isomorphism found: {0}")]
    NoIsomorphismFound(String),
    #[error("the fiber over {0} is not preserved by the real structure")]
    NotRealPoint(String),
    #[error("unsupported pencil: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

/// Complex conjugation of coefficients (the parameter `t` is real).
pub trait Conjugate {
    fn conjugate(&self) -> Self;
}

impl Conjugate for GR {
    fn conjugate(&self) -> Self {
        self.conj()
    }
}

impl Conjugate for RF {
    fn conjugate(&self) -> Self {
        self.conj_coeffs()
    }
}

/// An element of `gl(n) x gl(n)`.
#[derive(Clone, PartialEq, Debug)]
pub struct MatrixPair<F> {
    pub first: Matrix<F>,
    pub second: Matrix<F>,
}

impl<F: Field> MatrixPair<F> {
    pub fn new(first: Matrix<F>, second: Matrix<F>) -> Self {
        assert_eq!(first.rows(), second.rows());
        Self { first, second }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(Matrix::zeros(n, n), Matrix::zeros(n, n))
    }

    pub fn size(&self) -> usize {
        self.first.rows()
    }

    pub fn bracket(&self, other: &Self) -> Self {
        Self::new(self.first.commutator(&other.first), self.second.commutator(&other.second))
    }

    /// Componentwise matrix product.
    pub fn product(&self, other: &Self) -> Self {
        Self::new(self.first.mul_mat(&other.first), self.second.mul_mat(&other.second))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.first.add_mat(&other.first), self.second.add_mat(&other.second))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.first.scale(c), self.second.scale(c))
    }

    pub fn is_zero(&self) -> bool {
        self.first.is_zero() && self.second.is_zero()
    }

    pub fn flatten(&self) -> Vec<F> {
        let mut v: Vec<F> = self.first.to_rows().into_iter().flatten().collect();
        v.extend(self.second.to_rows().into_iter().flatten());
        v
    }

    pub fn from_flat(n: usize, v: &[F]) -> Self {
        assert_eq!(v.len(), 2 * n * n);
        let block = |off: usize| Matrix::from_rows((0..n).map(|i| v[off + i * n..off + (i + 1) * n].to_vec()).collect());
        Self::new(block(0), block(n * n))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> MatrixPair<G> {
        MatrixPair::new(self.first.map(&f), self.second.map(&f))
    }
}

/// JSON: `[rows of the first matrix, rows of the second]`.
impl<F: Field + Serialize> Serialize for MatrixPair<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (self.first.to_rows(), self.second.to_rows()).serialize(serializer)
    }
}

fn unit<F: Field>(n: usize, i: usize, j: usize) -> Matrix<F> {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = F::one();
    m
}

fn span_contains<F: Field>(basis: &[Vec<F>], v: &[F]) -> bool {
    v.iter().all(Zero::is_zero) || coordinates_in(basis, v).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Zero,
    Infinity,
}

impl Boundary {
    pub fn point(self) -> Point {
        match self {
            Boundary::Zero => Point::zero(),
            Boundary::Infinity => Point::Infinity,
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Zero => "0",
            Boundary::Infinity => "inf",
        })
    }
}

impl FromStr for Boundary {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "0" | "zero" => Ok(Boundary::Zero),
            "inf" | "infinity" | "oo" => Ok(Boundary::Infinity),
            other => Err(format!("boundary must be 0 or inf, got {other:?}")),
        }
    }
}

/// The pencil for `(GL(q+p), GL(q) x GL(p))`, optionally with determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrassmannPencil {
    pub p: usize,
    pub q: usize,
    pub det_one: bool,
}

/// Parameter of [`pencil_basis`].
#[derive(Debug, Clone, PartialEq)]
pub enum PencilParam {
    Symbolic,
    Value(GR),
}

impl GrassmannPencil {
    pub fn new(p: usize, q: usize, det_one: bool) -> Self {
        assert!(p >= 1 && q >= 1, "block sizes must be positive");
        Self { p, q, det_one }
    }

    /// Matrix size `q + p`.
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// Dimension of every fiber: `dim g`.
    pub fn dim(&self) -> usize {
        self.n() * self.n() - usize::from(self.det_one)
    }

    fn same_block(&self, i: usize, j: usize) -> bool {
        (i < self.q) == (j < self.q)
    }

    /// `(label, matrix)` for a basis of the block-diagonal algebra.
    fn k_matrices(&self) -> Vec<(String, Matrix<GR>)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.same_block(i, j) {
                    continue;
                }
                if i != j {
                    out.push((format!("K{}{}", i + 1, j + 1), unit(n, i, j)));
                } else if !self.det_one {
                    out.push((format!("K{}{}", i + 1, i + 1), unit(n, i, i)));
                } else if i + 1 < n {
                    out.push((format!("H{}", i + 1), unit(n, i, i).sub_mat(&unit(n, i + 1, i + 1))));
                }
            }
        }
        out
    }

    /// Basis of `k`, embedded diagonally.
    pub fn k_basis(&self) -> Vec<MatrixPair<GR>> {
        self.k_matrices().into_iter().map(|(_, m)| MatrixPair::new(m.clone(), m)).collect()
    }

    /// Index pairs `(row, col)` of the upper-right block.
    fn b_positions(&self) -> Vec<(usize, usize)> {
        (0..self.q).flat_map(|i| (0..self.p).map(move |j| (i, self.q + j))).collect()
    }

    /// Basis of `p_t` over the function field of `t`: the B-type pairs, then
    /// the C-type pairs.
    pub fn p_basis_symbolic(&self) -> Vec<MatrixPair<RF>> {
        let n = self.n();
        let t = RF::z();
        let mut out = Vec::new();
        for &(i, j) in &self.b_positions() {
            let b: Matrix<RF> = unit(n, i, j);
            out.push(MatrixPair::new(b.scale(&t), b));
        }
        for &(i, j) in &self.b_positions() {
            let c: Matrix<RF> = unit(n, j, i);
            out.push(MatrixPair::new(c.clone(), c.scale(&t)));
        }
        out
    }

    pub fn basis_symbolic(&self) -> Vec<MatrixPair<RF>> {
        let mut out: Vec<MatrixPair<RF>> = self.k_basis().iter().map(|x| x.map(|c| RF::constant(c.clone()))).collect();
        out.extend(self.p_basis_symbolic());
        out
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = self.k_matrices().into_iter().map(|(l, _)| l).collect();
        for (prefix, swap) in [("B", false), ("C", true)] {
            for &(i, j) in &self.b_positions() {
                let (r, c) = if swap { (j, i) } else { (i, j) };
                out.push(format!("{prefix}{}{}", r + 1, c + 1));
            }
        }
        out
    }

    /// The fiber at a nonzero finite `t`.
    pub fn basis_at(&self, t: &GR) -> Vec<MatrixPair<GR>> {
        assert!(!t.is_zero(), "use limit_subspace at the boundary");
        self.basis_symbolic()
            .iter()
            .map(|x| x.map(|c| c.eval(t).expect("pencil entries are polynomial")))
            .collect()
    }
}

/// Basis of `k + p_t`, either symbolic in `t` or at a nonzero value.
pub fn pencil_basis(pencil: &GrassmannPencil, t: &PencilParam) -> Vec<MatrixPair<RF>> {
    match t {
        PencilParam::Symbolic => pencil.basis_symbolic(),
        PencilParam::Value(v) => pencil.basis_at(v).iter().map(|x| x.map(|c| RF::constant(c.clone()))).collect(),
    }
}

/// A boundary fiber `k + p_b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitFiber {
    pub boundary: Boundary,
    pub k: Vec<MatrixPair<GR>>,
    pub p: Vec<MatrixPair<GR>>,
}

impl LimitFiber {
    pub fn basis(&self) -> Vec<MatrixPair<GR>> {
        self.k.iter().chain(&self.p).cloned().collect()
    }
}

fn min_order(v: &[RF]) -> Order {
    v.iter().map(|c| c.ord_at(&Point::zero())).min().unwrap_or(Order::Infinite)
}

/// Limit at `t = 0` of the span of `vectors` in the Grassmannian. Each vector
/// is divided by its lowest power of `t` and evaluated; when the leading
/// vectors are dependent, one of them is replaced by the combination that
/// cancels its leading term and the step repeats.
pub(crate) fn limit_at_zero(mut vectors: Vec<Vec<RF>>) -> Result<Vec<Vec<GR>>, usize> {
    let d = vectors.len();
    let mut best = 0;
    for _ in 0..(4 * d + 8) {
        let mut leads = Vec::with_capacity(d);
        for v in vectors.iter_mut() {
            let Order::Finite(k) = min_order(v) else { return Err(best) };
            if k != 0 {
                let s = RF::z_pow(-k);
                v.iter_mut().for_each(|c| *c = &*c * &s);
            }
            leads.push(v.iter().map(|c| c.eval(&GR::zero()).expect("normalized")).collect::<Vec<GR>>());
        }
        let r = rank_of(&leads);
        best = best.max(r);
        if r == d {
            return Ok(leads);
        }
        let relation = Matrix::from_columns(leads[0].len(), &leads).kernel().remove(0);
        let j = relation.iter().rposition(|c| !c.is_zero()).expect("nonzero relation");
        let len = vectors[j].len();
        let combo = (0..len)
            .map(|e| {
                relation
                    .iter()
                    .zip(&vectors)
                    .fold(RF::zero(), |acc, (c, v)| acc + v[e].scale(c))
            })
            .collect();
        vectors[j] = combo;
    }
    Err(best)
}

/// The limit fiber at `t = 0` or `t = inf`.
pub fn limit_subspace(pencil: &GrassmannPencil, boundary: Boundary) -> Result<LimitFiber, GrassError> {
    limit_of(pencil, &pencil.p_basis_symbolic(), boundary)
}

fn limit_of(pencil: &GrassmannPencil, p_basis: &[MatrixPair<RF>], boundary: Boundary) -> Result<LimitFiber, GrassError> {
    let n = pencil.n();
    let vectors: Vec<Vec<RF>> = p_basis
        .iter()
        .map(|x| {
            let v = x.flatten();
            match boundary {
                Boundary::Zero => v,
                Boundary::Infinity => v.iter().map(RF::invert_variable).collect(),
            }
        })
        .collect();
    let expected = pencil.dim();
    let k = pencil.k_basis();
    let p_lim = limit_at_zero(vectors)
        .map_err(|got| GrassError::RankDropAtLimit { boundary, expected, got: got + k.len() })?;
    let p: Vec<MatrixPair<GR>> = p_lim.iter().map(|v| MatrixPair::from_flat(n, v)).collect();
    let all: Vec<Vec<GR>> = k.iter().chain(&p).map(MatrixPair::flatten).collect();
    let got = rank_of(&all);
    if got != expected {
        return Err(GrassError::RankDropAtLimit { boundary, expected, got });
    }
    Ok(LimitFiber { boundary, k, p })
}

/// A pair of basis elements whose bracket leaves the span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubalgebraWitness<F: Field + Serialize> {
    pub i: usize,
    pub j: usize,
    pub bracket: MatrixPair<F>,
}

/// Checks that the span of `basis` is closed under the bracket.
pub fn verify_subalgebra<F: Field + Serialize>(basis: &[MatrixPair<F>]) -> Result<(), SubalgebraWitness<F>> {
    let flat: Vec<Vec<F>> = basis.iter().map(MatrixPair::flatten).collect();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let b = basis[i].bracket(&basis[j]);
            if !span_contains(&flat, &b.flatten()) {
                return Err(SubalgebraWitness { i, j, bracket: b });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosureFailure {
    /// `X_i X_j != 0` for two elements of the off-diagonal part.
    ProductNonzero { i: usize, j: usize },
    /// `k X_j` or `X_j k` leaves the off-diagonal part.
    NotNormalized { k: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub passed: bool,
    pub failures: Vec<ClosureFailure>,
}

/// Multiplicative closure of `{k + X : k in K, X in span(p_part)}` inside the
/// pair algebra. Everything is bilinear, so checking basis products covers
/// generic parameters: `X X' = 0` and `K` normalizes the span from both sides.
pub fn closure_check_subspace(pencil: &GrassmannPencil, p_part: &[MatrixPair<GR>]) -> ClosureReport {
    let n = pencil.n();
    // K acts through all block-diagonal matrices, determinant condition aside.
    let k_assoc: Vec<MatrixPair<GR>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| pencil.same_block(i, j))
        .map(|(i, j)| MatrixPair::new(unit(n, i, j), unit(n, i, j)))
        .collect();
    let flat: Vec<Vec<GR>> = p_part.iter().map(MatrixPair::flatten).collect();
    let mut failures = Vec::new();
    for (i, x) in p_part.iter().enumerate() {
        for (j, y) in p_part.iter().enumerate() {
            if !x.product(y).is_zero() {
                failures.push(ClosureFailure::ProductNonzero { i, j });
            }
        }
    }
    for (k, a) in k_assoc.iter().enumerate() {
        for (j, x) in p_part.iter().enumerate() {
            if !span_contains(&flat, &a.product(x).flatten()) || !span_contains(&flat, &x.product(a).flatten()) {
                failures.push(ClosureFailure::NotNormalized { k, j });
            }
        }
    }
    ClosureReport { passed: failures.is_empty(), failures }
}

/// Closure check of the group fiber `K + p_b` at a boundary.
pub fn fiber_group_closure_check(pencil: &GrassmannPencil, boundary: Boundary) -> Result<ClosureReport, GrassError> {
    let lim = limit_subspace(pencil, boundary)?;
    Ok(closure_check_subspace(pencil, &lim.p))
}

/// Structure constants of `basis` (over `F`), which must span a subalgebra.
fn algebra_of<F: Field + Serialize>(basis: &[MatrixPair<F>], labels: Vec<String>) -> Result<LieAlgebra<F>, LieError> {
    let flat: Vec<Vec<F>> = basis.iter().map(MatrixPair::flatten).collect();
    let mut brackets = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let b = basis[i].bracket(&basis[j]).flatten();
            let coords = if b.iter().all(Zero::is_zero) {
                vec![F::zero(); basis.len()]
            } else {
                coordinates_in(&flat, &b).ok_or(LieError::NotASubalgebra(i, j))?
            };
            brackets.push((i, j, coords));
        }
    }
    LieAlgebra::from_brackets(labels, &brackets)
}

/// The pencil as a family of Lie algebras in the coordinate `t`.
pub fn pencil_family(pencil: &GrassmannPencil) -> Result<LieFamily, GrassError> {
    let alg = algebra_of(&pencil.basis_symbolic(), pencil.labels())?;
    Ok(LieFamily::new(alg, Chart::AffineZ))
}

/// The pencil over the whole line: the `w = 1/t` chart uses the basis with
/// `p_t` divided by `t`, and the gluing expresses one basis in the other.
pub fn pencil_two_chart(pencil: &GrassmannPencil) -> Result<TwoChartFamily, GrassError> {
    let z_basis = pencil.basis_symbolic();
    let kdim = pencil.k_basis().len();
    let inv_t = RF::z_pow(-1);
    let w_basis: Vec<MatrixPair<RF>> =
        z_basis.iter().enumerate().map(|(i, x)| if i < kdim { x.clone() } else { x.scale(&inv_t) }).collect();
    let z_chart = LieFamily::new(algebra_of(&z_basis, pencil.labels())?, Chart::AffineZ);
    let w_alg = algebra_of(&w_basis, pencil.labels())?.map_constants(RF::invert_variable);
    let w_chart = LieFamily::new(w_alg, Chart::AffineW);
    let w_flat: Vec<Vec<RF>> = w_basis.iter().map(MatrixPair::flatten).collect();
    let cols: Vec<Vec<RF>> = z_basis
        .iter()
        .map(|x| coordinates_in(&w_flat, &x.flatten()).expect("same span on the overlap"))
        .collect();
    let gluing = FamilyMorphism { matrix: Matrix::from_columns(z_basis.len(), &cols) };
    Ok(TwoChartFamily { z_chart, w_chart, gluing })
}

/// Result of comparing the rank-3 pencil with the contraction of `sl(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionComparison {
    pub pencil_family: LieFamily,
    pub contraction: LieFamily,
    pub morphism: FamilyMorphism,
}

/// For `p = q = 1` with determinant one, the pencil basis `(H, B, C)` maps to
/// `(H, X, Y)` in the contraction of `sl(2)` along `diag(1, -1, -1)`.
pub fn contraction_comparison(pencil: &GrassmannPencil) -> Result<ContractionComparison, GrassError> {
    if (pencil.p, pencil.q, pencil.det_one) != (1, 1, true) {
        return Err(GrassError::Unsupported("comparison needs p = q = 1 with determinant one".into()));
    }
    let pencil_family = pencil_family(pencil)?;
    let contraction = contraction_family(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1]))?;
    let morphism = FamilyMorphism::identity(3);
    check_morphism(&morphism, &pencil_family, &contraction)
        .map_err(|w| GrassError::NoIsomorphismFound(format!("bracket of {:?} not preserved", w.pair)))?;
    Ok(ContractionComparison { pencil_family, contraction, morphism })
}

/// The real structure `sigma(g) = J (g^*)^{-1} J` with `J = diag(I_q, -I_p)`,
/// on pairs `(g1, g2) -> (sigma g2, sigma g1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealStructureSpec {
    pub p: usize,
    pub q: usize,
}

impl RealStructureSpec {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    fn sign(&self, i: usize) -> bool {
        i < self.q
    }

    pub fn j(&self) -> Matrix<GR> {
        let n = self.p + self.q;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = if self.sign(i) { GR::one() } else { -GR::one() };
        }
        m
    }

    /// Differential of `sigma` on one factor: `X -> -J X^* J`.
    pub fn sigma_matrix<F: Field + Conjugate>(&self, x: &Matrix<F>) -> Matrix<F> {
        let n = x.rows();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let c = x[(k, i)].conjugate();
                out[(i, k)] = if self.sign(i) == self.sign(k) { -c } else { c };
            }
        }
        out
    }

    pub fn sigma<F: Field + Conjugate>(&self, x: &MatrixPair<F>) -> MatrixPair<F> {
        MatrixPair::new(self.sigma_matrix(&x.second), self.sigma_matrix(&x.first))
    }

    /// `theta = Ad(J)` on both factors.
    pub fn theta<F: Field>(&self, x: &MatrixPair<F>) -> MatrixPair<F> {
        let conj = |m: &Matrix<F>| {
            let n = m.rows();
            let mut out = m.clone();
            for i in 0..n {
                for k in 0..n {
                    if self.sign(i) != self.sign(k) {
                        out[(i, k)] = -m[(i, k)].clone();
                    }
                }
            }
            out
        };
        MatrixPair::new(conj(&x.first), conj(&x.second))
    }
}

/// A real form of one fiber.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealForm {
    pub point: Point,
    pub dim: usize,
    /// Basis of the fixed points of `sigma`, as complex matrix pairs.
    pub basis: Vec<MatrixPair<GR>>,
    /// Sylvester signature `(n_plus, n_zero, n_minus)` of the Killing form.
    pub killing_signature: (usize, usize, usize),
    pub invariants: FiberInvariants,
    #[serde(skip)]
    pub algebra: LieAlgebra,
}

/// `B(x, y) = tr(ad x ad y)` on a Lie algebra with real structure constants.
pub fn killing_form(l: &LieAlgebra) -> Matrix<BigRational> {
    let d = l.dim();
    let ads: Vec<Matrix<GR>> = (0..d).map(|i| l.ad(&l.unit(i))).collect();
    let mut out = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let v = ads[i].mul_mat(&ads[j]).trace();
            assert!(v.is_real(), "Killing form of a real algebra");
            out[(i, j)] = v.re().clone();
        }
    }
    out
}

pub fn killing_signature(l: &LieAlgebra) -> (usize, usize, usize) {
    inertia(&killing_form(l))
}

/// The real form cut out by `sigma` on the fiber over a real point `x`
/// (with `x = t`; `0` and `inf` use the limit fibers).
pub fn real_form_at(pencil: &GrassmannPencil, x: &Point) -> Result<RealForm, GrassError> {
    let fiber = match x {
        Point::Infinity => limit_subspace(pencil, Boundary::Infinity)?.basis(),
        Point::Finite(v) if v.is_zero() => limit_subspace(pencil, Boundary::Zero)?.basis(),
        Point::Finite(v) if v.is_real() => pencil.basis_at(v),
        _ => return Err(GrassError::NotRealPoint(x.to_string())),
    };
    let rs = RealStructureSpec::new(pencil.p, pencil.q);
    let d = fiber.len();
    let flat: Vec<Vec<GR>> = fiber.iter().map(MatrixPair::flatten).collect();
    // Column i: coordinates of sigma(b_i); fixed points satisfy c = S conj(c).
    let s_cols = fiber
        .iter()
        .map(|b| coordinates_in(&flat, &rs.sigma(b).flatten()).ok_or_else(|| GrassError::NotRealPoint(x.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let s = Matrix::from_columns(d, &s_cols);
    // c = a + ib with a, b real: (S_r - I) a + S_i b = 0 and S_i a - (S_r + I) b = 0.
    let mut sys = Matrix::zeros(2 * d, 2 * d);
    for r in 0..d {
        for c in 0..d {
            let re = GR::real(s[(r, c)].re().clone());
            let im = GR::real(s[(r, c)].im().clone());
            let delta = if r == c { GR::one() } else { GR::zero() };
            sys[(r, c)] = &re - &delta;
            sys[(r, d + c)] = im.clone();
            sys[(d + r, c)] = im;
            sys[(d + r, d + c)] = -(&re + &delta);
        }
    }
    let sols = sys.kernel();
    if sols.len() != d {
        return Err(GrassError::NotRealPoint(x.to_string()));
    }
    let n = pencil.n();
    let basis: Vec<MatrixPair<GR>> = sols
        .iter()
        .map(|ab| {
            let v: Vec<GR> = (0..flat[0].len())
                .map(|e| (0..d).fold(GR::zero(), |acc, i| acc + &flat[i][e] * &(&ab[i] + &(&ab[d + i] * &GR::i()))))
                .collect();
            MatrixPair::from_flat(n, &v)
        })
        .collect();
    let labels = (1..=d).map(|i| format!("r{i}")).collect();
    let algebra = algebra_of(&basis, labels)?;
    let killing_signature = killing_signature(&algebra);
    Ok(RealForm { point: x.clone(), dim: d, killing_signature, invariants: algebra.fiber_invariants(), basis, algebra })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liefam::jacobi_check;

    fn g(s: &str) -> GR {
        s.parse().unwrap()
    }

    fn pair(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> MatrixPair<GR> {
        let m = |x: [[i64; 2]; 2]| Matrix::from_rows(x.iter().map(|r| r.iter().map(|&c| GR::from_int(c)).collect()).collect());
        MatrixPair::new(m(a), m(b))
    }

    fn spans(a: &[MatrixPair<GR>], b: &[MatrixPair<GR>]) -> bool {
        let f = |v: &[MatrixPair<GR>]| v.iter().map(MatrixPair::flatten).collect::<Vec<_>>();
        crate::exactalg::same_span(&f(a), &f(b))
    }

    #[test]
    fn dimensions_and_diagonal_copy() {
        let small = GrassmannPencil::new(1, 1, false);
        let at_one = small.basis_at(&g("1"));
        assert!(at_one.iter().all(|x| x.first == x.second));
        assert_eq!(at_one.len(), 4);
        let big = GrassmannPencil::new(2, 1, false);
        assert_eq!((big.k_basis().len(), big.p_basis_symbolic().len()), (5, 4));
        assert_eq!(GrassmannPencil::new(2, 1, true).k_basis().len(), 4);
        assert_eq!(GrassmannPencil::new(2, 1, true).labels().len(), 8);
    }

    /// The span at `t` equals the conjugated diagonal `(Ad_z X, Ad_{z^-1} X)`
    /// for `z = diag(mu, nu)`, `t = mu^2/nu^2`, sampled at several `(mu, nu)`.
    #[test]
    fn conjugated_diagonal_oracle() {
        let pencil = GrassmannPencil::new(1, 2, false);
        for (mu, nu) in [("2", "1"), ("1", "3"), ("i", "2"), ("3/2", "-1")] {
            let (mu, nu) = (g(mu), g(nu));
            let n = pencil.n();
            let mut z = Matrix::zeros(n, n);
            for i in 0..n {
                z[(i, i)] = if i < pencil.q { mu.clone() } else { nu.clone() };
            }
            let zi = z.inverse().unwrap();
            let conj: Vec<MatrixPair<GR>> = (0..n * n)
                .map(|e| {
                    let x: Matrix<GR> = unit(n, e / n, e % n);
                    MatrixPair::new(z.mul_mat(&x).mul_mat(&zi), zi.mul_mat(&x).mul_mat(&z))
                })
                .collect();
            let t = &(&mu * &mu) / &(&nu * &nu);
            assert!(spans(&conj, &pencil.basis_at(&t)));
        }
    }

    #[test]
    fn limits_match_the_displays() {
        let pencil = GrassmannPencil::new(1, 1, true);
        let zero = limit_subspace(&pencil, Boundary::Zero).unwrap();
        let expect0 = [pair([[0, 0], [0, 0]], [[0, 1], [0, 0]]), pair([[0, 0], [1, 0]], [[0, 0], [0, 0]])];
        assert!(spans(&zero.p, &expect0));
        let inf = limit_subspace(&pencil, Boundary::Infinity).unwrap();
        let expect_inf = [pair([[0, 1], [0, 0]], [[0, 0], [0, 0]]), pair([[0, 0], [0, 0]], [[0, 0], [1, 0]])];
        assert!(spans(&inf.p, &expect_inf));
        for b in [Boundary::Zero, Boundary::Infinity] {
            let lim = limit_subspace(&GrassmannPencil::new(2, 1, false), b).unwrap();
            assert_eq!(lim.p.len(), 4);
            assert!(lim.p.iter().all(|x| lim.p.iter().all(|y| x.bracket(y).is_zero())));
            assert!(verify_subalgebra(&lim.basis()).is_ok());
        }
    }

    #[test]
    fn limit_is_independent_of_basis_order() {
        let pencil = GrassmannPencil::new(2, 1, true);
        let mut p = pencil.p_basis_symbolic();
        let base = limit_of(&pencil, &p, Boundary::Zero).unwrap();
        p.reverse();
        p.swap(0, 2);
        // Mix in a combination so that leading terms collide.
        p[1] = p[1].add(&p[0].scale(&RF::z()));
        let other = limit_of(&pencil, &p, Boundary::Zero).unwrap();
        assert!(spans(&base.p, &other.p));
    }

    #[test]
    fn correction_loop_recovers_the_limit() {
        // span{(1, t), (1, 0)} -> leading vectors collide; the limit is everything.
        let v = vec![vec![RF::one(), RF::z()], vec![RF::one(), RF::zero()]];
        let lim = limit_at_zero(v).unwrap();
        assert_eq!(rank_of(&lim), 2);
        assert_eq!(limit_at_zero(vec![vec![RF::one(), RF::z()], vec![RF::one(), RF::z()]]), Err(1));
    }

    #[test]
    fn subalgebra_checks() {
        for pencil in [GrassmannPencil::new(1, 1, true), GrassmannPencil::new(2, 1, false)] {
            assert!(verify_subalgebra(&pencil.basis_symbolic()).is_ok());
            let mut bad = pencil.basis_at(&g("2"));
            let last = bad.len() - 1;
            let n = pencil.n();
            bad[last] = MatrixPair::new(unit(n, n - 1, 0), unit(n, 0, n - 1));
            assert!(verify_subalgebra(&bad).is_err());
        }
    }

    #[test]
    fn derived_algebra_on_sampled_fibers() {
        for pencil in [GrassmannPencil::new(1, 1, false), GrassmannPencil::new(2, 1, true)] {
            let family = pencil_family(&pencil).unwrap();
            assert!(jacobi_check(&family).is_ok());
            let n = pencil.n();
            for t in ["2", "-3/2", "i", "1+i"] {
                let l = crate::liefam::fiber(&family, &Point::Finite(g(t))).unwrap();
                assert_eq!(l.fiber_invariants().derived_dim, n * n - 1);
            }
        }
    }

    #[test]
    fn closure_at_boundaries() {
        for pencil in [GrassmannPencil::new(1, 1, true), GrassmannPencil::new(2, 1, false)] {
            for b in [Boundary::Zero, Boundary::Infinity] {
                assert!(fiber_group_closure_check(&pencil, b).unwrap().passed);
            }
            let k = pencil.k_basis().len();
            let generic = pencil.basis_at(&g("1"));
            let report = closure_check_subspace(&pencil, &generic[k..]);
            assert!(!report.passed);
            assert!(report.failures.iter().any(|f| matches!(f, ClosureFailure::ProductNonzero { .. })));
        }
    }

    #[test]
    fn comparison_with_the_contraction() {
        let pencil = GrassmannPencil::new(1, 1, true);
        let cmp = contraction_comparison(&pencil).unwrap();
        for t in ["0", "1", "-1"] {
            let p = Point::Finite(g(t));
            let a = crate::liefam::fiber(&cmp.pencil_family, &p).unwrap().fiber_invariants();
            let b = crate::liefam::fiber(&cmp.contraction, &p).unwrap().fiber_invariants();
            assert_eq!(a, b);
        }
        let two = pencil_two_chart(&pencil).unwrap();
        assert!(two.verify().is_ok());
        let proj = crate::liefam::contraction_family_projective(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1]))
            .unwrap();
        assert_eq!(two.gluing, proj.gluing);
        assert_eq!(two.w_chart.algebra().map_constants(|c| c.clone()).c(1, 2, 0), proj.w_chart.algebra().c(1, 2, 0));
        assert!(matches!(contraction_comparison(&GrassmannPencil::new(2, 1, true)), Err(GrassError::Unsupported(_))));
    }

    #[test]
    fn real_structure_is_an_involution_commuting_with_theta() {
        for (p, q) in [(1, 1), (2, 1), (1, 3)] {
            let rs = RealStructureSpec::new(p, q);
            let pencil = GrassmannPencil::new(p, q, false);
            for x in pencil.basis_at(&g("2+3i")).iter().map(|x| x.scale(&g("1/2-i"))) {
                assert_eq!(rs.sigma(&rs.sigma(&x)), x);
                assert_eq!(rs.sigma(&rs.theta(&x)), rs.theta(&rs.sigma(&x)));
            }
            let sym = pencil.basis_symbolic();
            assert!(sym.iter().all(|x| rs.sigma(&rs.sigma(x)) == *x));
            // The fiber at x goes to the fiber at conj(x).
            let x = g("1+2i");
            let image: Vec<MatrixPair<GR>> = pencil.basis_at(&x).iter().map(|b| rs.sigma(b)).collect();
            assert!(spans(&image, &pencil.basis_at(&x.conj())));
        }
    }

    #[test]
    fn real_forms_of_the_rank_three_pencil() {
        let pencil = GrassmannPencil::new(1, 1, true);
        let at = |s: &str| real_form_at(&pencil, &s.parse().unwrap()).unwrap();
        assert_eq!(at("1").killing_signature, (2, 0, 1));
        assert_eq!(at("3").killing_signature, (2, 0, 1));
        assert_eq!(at("-1").killing_signature, (0, 0, 3));
        assert_eq!(at("-1/5").killing_signature, (0, 0, 3));
        for b in ["0", "inf"] {
            let r = at(b);
            assert_eq!(r.dim, 3);
            assert!(r.invariants.solvable);
            assert!(r.killing_signature.1 > 0);
        }
        assert!(matches!(real_form_at(&pencil, &"i".parse().unwrap()), Err(GrassError::NotRealPoint(_))));
    }

    #[test]
    fn real_forms_for_two_one() {
        let pencil = GrassmannPencil::new(2, 1, true);
        let plus = real_form_at(&pencil, &Point::int(1)).unwrap();
        let minus = real_form_at(&pencil, &Point::int(-1)).unwrap();
        assert_eq!(plus.killing_signature, (4, 0, 4));
        assert_eq!(minus.killing_signature, (0, 0, 8));
    }

    #[test]
    fn killing_signature_survives_a_change_of_basis() {
        let pencil = GrassmannPencil::new(1, 1, true);
        let r = real_form_at(&pencil, &Point::int(2)).unwrap();
        let new_basis = vec![
            vec![g("2"), g("1"), g("0")],
            vec![g("-1/3"), g("1"), g("5")],
            vec![g("1"), g("0"), g("1/2")],
        ];
        let l2 = r.algebra.change_basis(&new_basis, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        assert_eq!(killing_signature(&l2), r.killing_signature);
    }
}
