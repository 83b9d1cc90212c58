//! Algebraic families of Harish-Chandra modules for the `SL(2)` contraction
//! pair, stored in the canonical weight basis.
//!
//! A module is described by its weight set, the degrees of the weight line
//! bundles `F_n`, and transition polynomials with
//!
//! ```text
//! H f_n = n f_n,   X f_n = A_n f_{n+2},   Y f_{n+2} = z^-1 B_n f_n.
//! ```
//!
//! Infinite weight sets are stored lazily: finitely many explicit overrides
//! plus a tail rule on each side of a split index.

mod fiber;
mod iso;

pub use fiber::{fiber_irreducible, fiber_module, reducible_locus, FiberModule, FiberTransition, FiberVerdict, ReducibleLocus, Unsplit, Vanishing};
pub use iso::{iso_check, picard_twist, swap_transitions, IsoVerdict, IsoWitness, Obstruction};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{parity, rational_sqrt, ExactError, GaussianRational, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HcError {
    #[error("module failed validation with {} violation(s)", .0.violations.len())]
    NotValidated(Box<ValidationReport>),
    #[error("weight {0} is not present")]
    WeightNotPresent(i64),
    #[error("{0} is not a transition index")]
    NotATransition(i64),
    #[error("swapping at {0} violates the degree bounds")]
    DegreeBoundViolated(i64),
    #[error("an infinite weight set needs an explicit window")]
    WindowRequired,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The weights of an admissible irreducible `(sl(2), H)`-module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightSet {
    AllEven,
    AllOdd,
    /// `l, l+2, l+4, ...` with `l >= 1`.
    LowestWeight(i64),
    /// `l, l-2, l-4, ...` with `l <= -1`.
    HighestWeight(i64),
    /// `-k, -k+2, ..., k`.
    FiniteDim(i64),
}

impl WeightSet {
    pub fn check(&self) -> Result<(), String> {
        match *self {
            WeightSet::LowestWeight(l) if l < 1 => Err(format!("lowest weight {l} must be >= 1")),
            WeightSet::HighestWeight(l) if l > -1 => Err(format!("highest weight {l} must be <= -1")),
            WeightSet::FiniteDim(k) if k < 0 => Err(format!("k = {k} must be >= 0")),
            _ => Ok(()),
        }
    }

    pub fn parity(&self) -> i64 {
        match *self {
            WeightSet::AllEven => 0,
            WeightSet::AllOdd => 1,
            WeightSet::LowestWeight(l) | WeightSet::HighestWeight(l) | WeightSet::FiniteDim(l) => parity(l),
        }
    }

    pub fn min(&self) -> Option<i64> {
        match *self {
            WeightSet::LowestWeight(l) => Some(l),
            WeightSet::FiniteDim(k) => Some(-k),
            _ => None,
        }
    }

    pub fn max(&self) -> Option<i64> {
        match *self {
            WeightSet::HighestWeight(l) => Some(l),
            WeightSet::FiniteDim(k) => Some(k),
            _ => None,
        }
    }

    pub fn is_principal(&self) -> bool {
        matches!(self, WeightSet::AllEven | WeightSet::AllOdd)
    }

    pub fn is_finite(&self) -> bool {
        self.min().is_some() && self.max().is_some()
    }

    pub fn contains(&self, n: i64) -> bool {
        parity(n) == self.parity() && self.min().is_none_or(|m| n >= m) && self.max().is_none_or(|m| n <= m)
    }

    /// Whether both `n` and `n + 2` are weights.
    pub fn is_transition(&self, n: i64) -> bool {
        self.contains(n) && self.contains(n + 2)
    }

    pub fn weights_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&n| self.contains(n)).collect()
    }

    pub fn transitions_in(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).filter(|&n| self.is_transition(n)).collect()
    }

    /// The constant by which the Casimir must act when there is an extreme
    /// weight: `l^2 - 2|l|` for discrete series, `k^2 + 2k` for `FiniteDim(k)`.
    pub fn forced_casimir(&self) -> Option<i64> {
        match *self {
            WeightSet::LowestWeight(l) | WeightSet::HighestWeight(l) => Some(l * l - 2 * l.abs()),
            WeightSet::FiniteDim(k) => Some(k * k + 2 * k),
            _ => None,
        }
    }
}

impl fmt::Display for WeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSet::AllEven => write!(f, "even"),
            WeightSet::AllOdd => write!(f, "odd"),
            WeightSet::LowestWeight(l) => write!(f, "lowest:{l}"),
            WeightSet::HighestWeight(l) => write!(f, "highest:{l}"),
            WeightSet::FiniteDim(k) => write!(f, "finite:{k}"),
        }
    }
}

/// Parses `even`, `odd`, `lowest:L`, `highest:L`, `finite:K`.
impl FromStr for WeightSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let w = match s.split_once(':') {
            None if s == "even" => WeightSet::AllEven,
            None if s == "odd" => WeightSet::AllOdd,
            Some((kind, v)) => {
                let v: i64 = v.trim().parse().map_err(|_| format!("bad integer in {s:?}"))?;
                match kind {
                    "lowest" => WeightSet::LowestWeight(v),
                    "highest" => WeightSet::HighestWeight(v),
                    "finite" => WeightSet::FiniteDim(v),
                    _ => return Err(format!("unknown weight type {kind:?}")),
                }
            }
            None => return Err(format!("unknown weight type {s:?}")),
        };
        w.check()?;
        Ok(w)
    }
}

/// The Casimir acts by `c1 z + c0 + cm1 z^-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[GaussianRational; 3]", into = "[GaussianRational; 3]")]
pub struct CasimirTriple {
    pub c1: GaussianRational,
    pub c0: GaussianRational,
    pub cm1: GaussianRational,
}

impl From<[GaussianRational; 3]> for CasimirTriple {
    fn from([c1, c0, cm1]: [GaussianRational; 3]) -> Self {
        Self { c1, c0, cm1 }
    }
}

impl From<CasimirTriple> for [GaussianRational; 3] {
    fn from(c: CasimirTriple) -> Self {
        [c.c1, c.c0, c.cm1]
    }
}

impl CasimirTriple {
    pub fn new(c1: GaussianRational, c0: GaussianRational, cm1: GaussianRational) -> Self {
        Self { c1, c0, cm1 }
    }

    pub fn ints(c1: i64, c0: i64, cm1: i64) -> Self {
        Self::new(c1.into(), c0.into(), cm1.into())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(GaussianRational::zero(), c, GaussianRational::zero())
    }

    pub fn as_constant(&self) -> Option<&GaussianRational> {
        (self.c1.is_zero() && self.cm1.is_zero()).then_some(&self.c0)
    }

    /// `c1 z + c0 + cm1 z^-1`.
    pub fn acting_function(&self) -> LaurentPoly {
        LaurentPoly::from_terms([(1, self.c1.clone()), (0, self.c0.clone()), (-1, self.cm1.clone())])
    }

    /// `q_n = c1 z^2 + (c0 - n(n+2)) z + cm1`, so that `4 A_n B_n = q_n`.
    pub fn q(&self, n: i64) -> LaurentPoly {
        let mid = &self.c0 - &GaussianRational::from_int(n * (n + 2));
        LaurentPoly::from_terms([(2, self.c1.clone()), (1, mid), (0, self.cm1.clone())])
    }

    /// Integers `n` with `n(n+2) = c0`, where the middle coefficient of
    /// `q_n` vanishes.
    pub fn exceptional_indices(&self) -> Vec<i64> {
        if !self.c0.is_real() {
            return vec![];
        }
        // n(n+2) = c0  <=>  (n+1)^2 = c0 + 1
        let Some(r) = rational_sqrt(&(self.c0.re() + num_rational::BigRational::one())) else {
            return vec![];
        };
        if !r.is_integer() {
            return vec![];
        }
        let r: i64 = match r.to_integer().try_into() {
            Ok(r) => r,
            Err(_) => return vec![],
        };
        let mut out = vec![-1 - r, -1 + r];
        out.dedup();
        out
    }

    /// Degree of `q_n` for all but finitely many `n`.
    pub fn generic_q_degree(&self) -> i64 {
        if self.c1.is_zero() {
            1
        } else {
            2
        }
    }
}

impl fmt::Display for CasimirTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.c1, self.c0, self.cm1)
    }
}

/// Parses `c1,c0,cm1`.
impl FromStr for CasimirTriple {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated scalars, got {s:?}"));
        }
        let p = |x: &str| x.parse::<GaussianRational>().map_err(|e| e.to_string());
        Ok(Self::new(p(parts[0])?, p(parts[1])?, p(parts[2])?))
    }
}

/// `n -> deg F_n`: linear on either side of an anchor weight, with finitely
/// many explicit exceptions. `step_above` is `deg F_{n+2} - deg F_n` for
/// `n >= anchor`; `step_below` is the same difference for `n + 2 <= anchor`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DegreeProfile {
    pub anchor: i64,
    pub anchor_degree: i64,
    pub step_above: i64,
    pub step_below: i64,
    pub explicit: BTreeMap<i64, i64>,
}

impl DegreeProfile {
    pub fn linear(anchor: i64, anchor_degree: i64, step_above: i64, step_below: i64) -> Self {
        Self { anchor, anchor_degree, step_above, step_below, explicit: BTreeMap::new() }
    }

    pub fn constant(d: i64) -> Self {
        Self::linear(0, d, 0, 0)
    }

    pub fn degree(&self, n: i64) -> i64 {
        if let Some(&d) = self.explicit.get(&n) {
            return d;
        }
        let steps = (n - self.anchor).div_euclid(2);
        if steps >= 0 {
            self.anchor_degree + self.step_above * steps
        } else {
            self.anchor_degree + self.step_below * steps
        }
    }

    pub fn twisted(&self, d: i64) -> Self {
        Self {
            anchor_degree: self.anchor_degree + d,
            explicit: self.explicit.iter().map(|(&n, &v)| (n, v + d)).collect(),
            ..self.clone()
        }
    }
}

/// How a tail of transitions factors `q_n / 4`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailRule {
    /// `A_n = u`, `B_n = q_n / 4u`.
    AscUnit(GaussianRational),
    /// `B_n = u`, `A_n = q_n / 4u`.
    DescUnit(GaussianRational),
}

impl TailRule {
    pub fn unit(&self) -> &GaussianRational {
        match self {
            TailRule::AscUnit(u) | TailRule::DescUnit(u) => u,
        }
    }

    pub fn same_kind(&self, other: &TailRule) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }

    pub fn apply(&self, q: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        let u = self.unit();
        let Some(inv) = (u * &GaussianRational::from_int(4)).inv() else {
            return (LaurentPoly::zero(), LaurentPoly::zero());
        };
        let unit = LaurentPoly::constant(u.clone());
        match self {
            TailRule::AscUnit(_) => (unit, q.scale(&inv)),
            TailRule::DescUnit(_) => (q.scale(&inv), unit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionData {
    /// Explicit `(A_n, B_n)`.
    pub overrides: BTreeMap<i64, (LaurentPoly, LaurentPoly)>,
    /// Transitions `n >= split` follow `upper`, the rest follow `lower`.
    pub split: i64,
    pub upper: TailRule,
    pub lower: TailRule,
}

impl TransitionData {
    pub fn uniform(rule: TailRule) -> Self {
        Self { overrides: BTreeMap::new(), split: 0, upper: rule.clone(), lower: rule }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HCModuleFamily {
    pub weights: WeightSet,
    pub degrees: DegreeProfile,
    pub transitions: TransitionData,
    pub casimir: CasimirTriple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Poly {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tail {
    Upper,
    Lower,
}

/// Operator orderings of the Casimir `H^2 + 2H + 4YX = H^2 - 2H + 4XY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    YX,
    XY,
}

impl HCModuleFamily {
    pub fn new(weights: WeightSet, degrees: DegreeProfile, transitions: TransitionData, casimir: CasimirTriple) -> Self {
        Self { weights, degrees, transitions, casimir }
    }

    pub fn q(&self, n: i64) -> LaurentPoly {
        self.casimir.q(n)
    }

    pub fn degree(&self, n: i64) -> i64 {
        self.degrees.degree(n)
    }

    /// `deg F_{n+2} - deg F_n`.
    pub fn delta(&self, n: i64) -> i64 {
        self.degree(n + 2) - self.degree(n)
    }

    pub fn tail_rule(&self, n: i64) -> &TailRule {
        if n >= self.transitions.split {
            &self.transitions.upper
        } else {
            &self.transitions.lower
        }
    }

    /// `(A_n, B_n)`, or `None` if `n` is not a transition index.
    pub fn transition(&self, n: i64) -> Option<(LaurentPoly, LaurentPoly)> {
        if !self.weights.is_transition(n) {
            return None;
        }
        Some(match self.transitions.overrides.get(&n) {
            Some(ab) => ab.clone(),
            None => self.tail_rule(n).apply(&self.q(n)),
        })
    }

    /// The step of the degree profile on an infinite tail.
    pub fn tail_step(&self, tail: Tail) -> i64 {
        match tail {
            Tail::Upper => self.degrees.step_above,
            Tail::Lower => self.degrees.step_below,
        }
    }

    pub fn tail_rule_of(&self, tail: Tail) -> &TailRule {
        match tail {
            Tail::Upper => &self.transitions.upper,
            Tail::Lower => &self.transitions.lower,
        }
    }

    /// Tails that contain infinitely many transitions.
    pub fn infinite_tails(&self) -> Vec<Tail> {
        let mut out = Vec::new();
        if self.weights.max().is_none() {
            out.push(Tail::Upper);
        }
        if self.weights.min().is_none() {
            out.push(Tail::Lower);
        }
        out
    }

    /// Indices where the data is not described by the tail rules: the anchor,
    /// split, overrides, explicit degrees and exceptional Casimir indices.
    fn key_indices(&self) -> Vec<i64> {
        let mut keys = vec![self.degrees.anchor, self.transitions.split];
        keys.extend(self.degrees.explicit.keys());
        keys.extend(self.transitions.overrides.keys());
        keys.extend(self.casimir.exceptional_indices());
        keys
    }

    /// A window outside of which every transition is governed by a tail rule
    /// with a constant degree step, clamped to the weight set.
    pub fn key_window(&self) -> (i64, i64) {
        key_window_of(&[self])
    }

    /// Acting function of the Casimir on `f_n` in the given ordering.
    pub fn acting_function(&self, n: i64, ordering: Ordering) -> Result<LaurentPoly, HcError> {
        if !self.weights.contains(n) {
            return Err(HcError::WeightNotPresent(n));
        }
        let four_over_z = LaurentPoly::monomial(GaussianRational::from_int(4), -1);
        let (base, neighbour) = match ordering {
            Ordering::YX => (n * n + 2 * n, self.transition(n)),
            Ordering::XY => (n * n - 2 * n, self.transition(n - 2)),
        };
        let mut f = LaurentPoly::constant(GaussianRational::from_int(base));
        if let Some((a, b)) = neighbour {
            f = f + &(&a * &b) * &four_over_z;
        }
        Ok(f)
    }
}

pub(crate) fn key_window_of(modules: &[&HCModuleFamily]) -> (i64, i64) {
    let keys: Vec<i64> = modules.iter().flat_map(|m| m.key_indices()).collect();
    let mut lo = keys.iter().copied().min().unwrap_or(0) - 4;
    let mut hi = keys.iter().copied().max().unwrap_or(0) + 4;
    let w = modules[0].weights;
    if let Some(m) = w.min() {
        lo = m;
        hi = hi.max(m);
    }
    if let Some(m) = w.max() {
        hi = m;
        lo = lo.min(m);
    }
    (lo, hi)
}

fn poly_degree(p: &LaurentPoly) -> i64 {
    p.degree().unwrap_or(i64::MIN)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    InvalidWeightSet { reason: String },
    /// `|deg F_{n+2} - deg F_n| > 1`.
    DegreeJump { n: i64, delta: i64 },
    NonPolynomial { n: i64, poly: Poly },
    /// A transition polynomial vanishes identically: not generically irreducible.
    ZeroTransition { n: i64, poly: Poly },
    CasimirEquation { n: i64 },
    /// `q_n` is identically zero.
    DegenerateCasimir { n: i64 },
    DegreeBound { n: i64, poly: Poly, degree: i64, bound: i64 },
    /// At an extreme weight the Casimir is forced to a constant.
    ExtremeWeightCasimir { n: i64, expected: GaussianRational },
    TailStep { tail: Tail, step: i64 },
    ZeroUnit { tail: Tail },
    TailDegreeBound { tail: Tail, poly: Poly, degree: i64, bound: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Transition indices checked one by one; beyond them tails are checked
    /// symbolically in `n`.
    pub window: (i64, i64),
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant of a module family.
pub fn validate(m: &HCModuleFamily) -> ValidationReport {
    let mut v = Vec::new();
    let (lo, hi) = m.key_window();
    if let Err(reason) = m.weights.check() {
        v.push(Violation::InvalidWeightSet { reason });
        return ValidationReport { window: (lo, hi), violations: v };
    }
    for n in m.weights.transitions_in(lo, hi) {
        let delta = m.delta(n);
        if delta.abs() > 1 {
            v.push(Violation::DegreeJump { n, delta });
        }
        let (a, b) = m.transition(n).expect("transition index");
        let q = m.q(n);
        if q.is_zero() {
            v.push(Violation::DegenerateCasimir { n });
        }
        for (poly, p, bound) in [(Poly::A, &a, 1 + delta), (Poly::B, &b, 1 - delta)] {
            if !p.is_polynomial() {
                v.push(Violation::NonPolynomial { n, poly });
            }
            if p.is_zero() {
                v.push(Violation::ZeroTransition { n, poly });
            } else if poly_degree(p) > bound {
                v.push(Violation::DegreeBound { n, poly, degree: poly_degree(p), bound });
            }
        }
        if (&a * &b).scale(&GaussianRational::from_int(4)) != q {
            v.push(Violation::CasimirEquation { n });
        }
    }
    let acting = m.casimir.acting_function();
    if let Some(n) = m.weights.min() {
        let expected = GaussianRational::from_int(n * n - 2 * n);
        if acting != LaurentPoly::constant(expected.clone()) {
            v.push(Violation::ExtremeWeightCasimir { n, expected });
        }
    }
    if let Some(n) = m.weights.max() {
        let expected = GaussianRational::from_int(n * n + 2 * n);
        if acting != LaurentPoly::constant(expected.clone()) {
            v.push(Violation::ExtremeWeightCasimir { n, expected });
        }
    }
    for tail in m.infinite_tails() {
        let step = m.tail_step(tail);
        if step.abs() > 1 {
            v.push(Violation::TailStep { tail, step });
        }
        let rule = m.tail_rule_of(tail);
        if rule.unit().is_zero() {
            v.push(Violation::ZeroUnit { tail });
        }
        // Beyond the key window q_n has its generic degree.
        let g = m.casimir.generic_q_degree();
        let (poly, bound) = match rule {
            TailRule::AscUnit(_) => (Poly::B, 1 - step),
            TailRule::DescUnit(_) => (Poly::A, 1 + step),
        };
        if g > bound {
            v.push(Violation::TailDegreeBound { tail, poly, degree: g, bound });
        }
    }
    ValidationReport { window: (lo, hi), violations: v }
}

pub(crate) fn require_valid(m: &HCModuleFamily) -> Result<(), HcError> {
    let r = validate(m);
    if r.passed() {
        Ok(())
    } else {
        Err(HcError::NotValidated(Box::new(r)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "kebab-case")]
pub enum LemmaFailure {
    Transition { n: i64, poly: Poly },
    Tail { tail: Tail, poly: Poly },
}

/// Where the degree drops by one `A_n` must be a nonzero constant; where it
/// rises by one `B_n` must be. Returns every failure (empty means pass).
pub fn degrees_lemma_check(m: &HCModuleFamily) -> Vec<LemmaFailure> {
    let mut out = Vec::new();
    let (lo, hi) = m.key_window();
    let nonzero_constant = |p: &LaurentPoly| p.as_constant().is_some_and(|c| !c.is_zero());
    for n in m.weights.transitions_in(lo, hi) {
        let (a, b) = m.transition(n).expect("transition index");
        match m.delta(n) {
            -1 if !nonzero_constant(&a) => out.push(LemmaFailure::Transition { n, poly: Poly::A }),
            1 if !nonzero_constant(&b) => out.push(LemmaFailure::Transition { n, poly: Poly::B }),
            _ => {}
        }
    }
    for tail in m.infinite_tails() {
        let rule = m.tail_rule_of(tail);
        match (m.tail_step(tail), rule) {
            (-1, TailRule::DescUnit(_)) => out.push(LemmaFailure::Tail { tail, poly: Poly::A }),
            (1, TailRule::AscUnit(_)) => out.push(LemmaFailure::Tail { tail, poly: Poly::B }),
            _ => {}
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct Anchor {
    n: i64,
    degree: i64,
}

#[derive(Serialize, Deserialize)]
struct ExplicitDegree {
    n: i64,
    degree: i64,
}

#[derive(Serialize, Deserialize)]
struct DegreeRule {
    above: i64,
    below: i64,
    #[serde(default)]
    explicit: Vec<ExplicitDegree>,
}

#[derive(Serialize, Deserialize)]
struct Override {
    n: i64,
    #[serde(rename = "A")]
    a: LaurentPoly,
    #[serde(rename = "B")]
    b: LaurentPoly,
}

#[derive(Serialize, Deserialize)]
struct TailSpec {
    split: i64,
    upper: TailRule,
    lower: TailRule,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleRepr {
    weights: WeightSet,
    anchor: Anchor,
    degree_rule: DegreeRule,
    casimir: CasimirTriple,
    #[serde(default)]
    overrides: Vec<Override>,
    tail: TailSpec,
}

/// JSON: `{weights, anchor, degree_rule, casimir, overrides, tail}`.
impl Serialize for HCModuleFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let d = &self.degrees;
        let t = &self.transitions;
        ModuleRepr {
            weights: self.weights,
            anchor: Anchor { n: d.anchor, degree: d.anchor_degree },
            degree_rule: DegreeRule {
                above: d.step_above,
                below: d.step_below,
                explicit: d.explicit.iter().map(|(&n, &degree)| ExplicitDegree { n, degree }).collect(),
            },
            casimir: self.casimir.clone(),
            overrides: t.overrides.iter().map(|(&n, (a, b))| Override { n, a: a.clone(), b: b.clone() }).collect(),
            tail: TailSpec { split: t.split, upper: t.upper.clone(), lower: t.lower.clone() },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HCModuleFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = ModuleRepr::deserialize(deserializer)?;
        Ok(HCModuleFamily {
            weights: r.weights,
            degrees: DegreeProfile {
                anchor: r.anchor.n,
                anchor_degree: r.anchor.degree,
                step_above: r.degree_rule.above,
                step_below: r.degree_rule.below,
                explicit: r.degree_rule.explicit.into_iter().map(|e| (e.n, e.degree)).collect(),
            },
            transitions: TransitionData {
                overrides: r.overrides.into_iter().map(|o| (o.n, (o.a, o.b))).collect(),
                split: r.tail.split,
                upper: r.tail.upper,
                lower: r.tail.lower,
            },
            casimir: r.casimir,
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    /// Class III, all even weights, Casimir `1/z`: `B_n = 1`, `A_n = q_n / 4`.
    pub(crate) fn class_three() -> HCModuleFamily {
        HCModuleFamily::new(
            WeightSet::AllEven,
            DegreeProfile::linear(0, 0, 1, 1),
            TransitionData::uniform(TailRule::DescUnit(g("1"))),
            CasimirTriple::ints(0, 0, 1),
        )
    }

    /// `FiniteDim(2)` with descending degrees: `A_n = 1`.
    pub(crate) fn finite_two() -> HCModuleFamily {
        HCModuleFamily::new(
            WeightSet::FiniteDim(2),
            DegreeProfile::linear(0, 0, -1, -1),
            TransitionData::uniform(TailRule::AscUnit(g("1"))),
            CasimirTriple::ints(0, 8, 0),
        )
    }

    #[test]
    fn weight_sets() {
        assert!(WeightSet::LowestWeight(3).contains(5));
        assert!(!WeightSet::LowestWeight(3).contains(1));
        assert!(WeightSet::HighestWeight(-1).contains(-7));
        assert_eq!(WeightSet::FiniteDim(2).transitions_in(-10, 10), vec![-2, 0]);
        assert_eq!(WeightSet::FiniteDim(0).transitions_in(-10, 10), Vec::<i64>::new());
        assert_eq!("lowest:3".parse::<WeightSet>().unwrap(), WeightSet::LowestWeight(3));
        assert!("lowest:0".parse::<WeightSet>().is_err());
        for w in [WeightSet::AllOdd, WeightSet::HighestWeight(-4), WeightSet::FiniteDim(5)] {
            assert_eq!(w.to_string().parse::<WeightSet>().unwrap(), w);
        }
    }

    #[test]
    fn casimir_polynomials() {
        let c = CasimirTriple::ints(0, 0, 1);
        assert_eq!(c.q(2), LaurentPoly::from_ints(&[1, -8]));
        assert_eq!(c.exceptional_indices(), vec![-2, 0]);
        assert_eq!(CasimirTriple::ints(0, 8, 0).exceptional_indices(), vec![-4, 2]);
        assert_eq!(CasimirTriple::ints(0, 3, 0).exceptional_indices(), vec![-3, 1]);
        assert!(CasimirTriple::ints(0, 5, 0).exceptional_indices().is_empty());
        assert_eq!("0,-1/2,1+i".parse::<CasimirTriple>().unwrap().cm1, g("1+i"));
    }

    #[test]
    fn degree_profiles() {
        let floor = DegreeProfile::linear(0, 0, 1, 1);
        for n in [-5i64, -4, -1, 0, 3, 8] {
            assert_eq!(floor.degree(n), n.div_euclid(2));
        }
        let peak = DegreeProfile::linear(2, 0, -1, 1);
        assert_eq!(peak.degree(6), -2);
        assert_eq!(peak.degree(-2), -2);
        assert_eq!(peak.twisted(5).degree(-2), 3);
    }

    #[test]
    fn class_three_validates() {
        let m = class_three();
        let r = validate(&m);
        assert!(r.passed(), "{r:?}");
        assert!(degrees_lemma_check(&m).is_empty());
        assert_eq!(m.transition(2).unwrap().0, LaurentPoly::from_terms([(0, g("1/4")), (1, g("-2"))]));
    }

    #[test]
    fn zero_transition_is_reported() {
        let mut m = class_three();
        m.transitions.overrides.insert(2, (LaurentPoly::zero(), LaurentPoly::one()));
        let r = validate(&m);
        assert!(r.violations.contains(&Violation::ZeroTransition { n: 2, poly: Poly::A }));
        assert!(r.violations.contains(&Violation::CasimirEquation { n: 2 }));
    }

    #[test]
    fn degree_bound_is_reported() {
        let mut m = class_three();
        m.transitions.overrides.insert(0, (LaurentPoly::from_terms([(-1, g("1/4"))]), LaurentPoly::z()));
        let r = validate(&m);
        assert!(r.violations.contains(&Violation::DegreeBound { n: 0, poly: Poly::B, degree: 1, bound: 0 }));
        assert!(r.violations.contains(&Violation::NonPolynomial { n: 0, poly: Poly::A }));
    }

    #[test]
    fn tails_are_checked_symbolically() {
        // Ascending degrees with A_n = 1 would force deg B_n = 1 <= 0.
        let mut m = class_three();
        m.transitions.upper = TailRule::AscUnit(g("1"));
        let r = validate(&m);
        assert!(r.violations.contains(&Violation::TailDegreeBound { tail: Tail::Upper, poly: Poly::B, degree: 1, bound: 0 }));
        let mut m = class_three();
        m.degrees.step_below = 2;
        assert!(validate(&m).violations.contains(&Violation::TailStep { tail: Tail::Lower, step: 2 }));
    }

    #[test]
    fn degenerate_casimir_is_rejected() {
        // c = 8 = 2 * 4 kills q_2 and q_{-4}.
        let mut m = class_three();
        m.casimir = CasimirTriple::ints(0, 8, 0);
        let r = validate(&m);
        assert!(r.violations.contains(&Violation::DegenerateCasimir { n: 2 }));
        assert!(r.violations.contains(&Violation::DegenerateCasimir { n: -4 }));
    }

    #[test]
    fn extreme_weights_force_the_casimir() {
        let m = finite_two();
        assert!(validate(&m).passed());
        let mut bad = m.clone();
        bad.casimir = CasimirTriple::ints(1, 8, 0);
        assert!(validate(&bad).violations.iter().any(|v| matches!(v, Violation::ExtremeWeightCasimir { .. })));
    }

    #[test]
    fn acting_functions() {
        let m = class_three();
        assert_eq!(m.acting_function(0, Ordering::YX).unwrap(), LaurentPoly::z_pow(-1));
        for n in (-8..=8).step_by(2) {
            let yx = m.acting_function(n, Ordering::YX).unwrap();
            assert_eq!(yx, m.casimir.acting_function());
            assert_eq!(m.acting_function(n, Ordering::XY).unwrap(), yx);
        }
        assert_eq!(m.acting_function(1, Ordering::YX), Err(HcError::WeightNotPresent(1)));
    }

    #[test]
    fn json_round_trip() {
        let mut m = class_three();
        m.transitions.overrides.insert(4, (LaurentPoly::from_ints(&[1, -24]).scale(&g("1/8")), LaurentPoly::constant(g("2"))));
        m.degrees.explicit.insert(100, 50);
        let s = serde_json::to_string(&m).unwrap();
        let back: HCModuleFamily = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
