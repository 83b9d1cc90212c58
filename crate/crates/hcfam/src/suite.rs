//! Acceptance checks shared by the `acceptance` test target and `hcfam verify`.
//!
//! Each check returns a [`CriterionReport`]; none of them panic on failure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{admissible_casimir, construct, uniqueness_probe, ClassSpec, ClassifyError, ProbeReport};
use crate::exactalg::{same_span, GaussianRational, LaurentPoly, Matrix, Point, RationalFunction};
use crate::grassfam::{
    contraction_comparison, fiber_group_closure_check, limit_subspace, pencil_two_chart, real_form_at,
    verify_subalgebra, Boundary, GrassmannPencil, MatrixPair,
};
use crate::hcmod::{
    fiber_module, iso_check, reducible_locus, swap_transitions, validate, CasimirTriple, HCModuleFamily, IsoVerdict,
    Ordering, Violation, WeightSet,
};
use crate::liefam::{
    base_change, check_morphism, constant_family, contraction_family, contraction_family_projective,
    deformation_embedding, deformation_family, jacobi_check, scaled_bracket_family, Chart, FamilyMorphism,
    FiberInvariants, Involution, LieAlgebra, LieFamily,
};
use crate::sl2fam::{build_sl2_contraction, casimir_acting_function};

type GR = GaussianRational;
type RF = RationalFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Lie-family, section and Casimir checks.
    Quick,
    /// Everything, including probes, brute-force fibers and the pencil.
    Full,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            other => Err(format!("profile must be quick or full, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

type Check = fn() -> Result<String, String>;

/// All checks in order, with whether the quick profile includes them.
pub const CRITERIA: [(&str, Check, bool); 11] = [
    ("jacobi-suite", jacobi_suite, true),
    ("base-change-vs-deformation", base_change_vs_deformation, true),
    ("sl2-section-degrees", sl2_section_degrees, true),
    ("casimir-structure", casimir_structure, true),
    ("excluded-casimir-values", excluded_casimir_values, true),
    ("extreme-weight-casimir", extreme_weight_casimir, true),
    ("uniqueness-probes", uniqueness_probes, false),
    ("equal-degrees", equal_degrees, false),
    ("fiber-oracle", fiber_oracle, false),
    ("grassmann-limits", grassmann_limits, false),
    ("real-forms", real_forms, false),
];

pub fn run_check(name: &str) -> Option<CriterionReport> {
    let &(name, f, _) = CRITERIA.iter().find(|(n, _, _)| *n == name)?;
    Some(report(name, f))
}

fn report(name: &str, f: Check) -> CriterionReport {
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionReport { name: name.to_string(), passed, detail }
}

/// Runs the selected checks in parallel; reports come back in order.
pub fn run(profile: Profile) -> Vec<CriterionReport> {
    CRITERIA
        .par_iter()
        .filter(|(_, _, quick)| profile == Profile::Full || *quick)
        .map(|&(name, f, _)| report(name, f))
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(s: &str) -> GR {
    s.parse().expect("literal")
}

fn units(d: usize, idx: &[usize]) -> Vec<Vec<GR>> {
    idx.iter()
        .map(|&i| (0..d).map(|j| GR::from_int(i64::from(i == j))).collect())
        .collect()
}

fn jacobi_suite() -> Result<String, String> {
    let cases = [
        ("sl2", LieAlgebra::sl2(), Involution::diagonal(&[1, -1, -1]), units(3, &[0])),
        ("gl2", LieAlgebra::gl(2), Involution::diagonal(&[1, -1, -1, 1]), units(4, &[0, 3])),
    ];
    let mut count = 0;
    for (name, l, theta, k) in cases {
        theta.validate(&l).map_err(|e| format!("{name}: involution rejected: {e}"))?;
        let families: Vec<(&str, LieFamily)> = vec![
            ("constant", constant_family(&l).map_err(|e| e.to_string())?),
            ("scaled", scaled_bracket_family(&l, 1).map_err(|e| e.to_string())?),
            ("contraction", contraction_family(&l, &theta).map_err(|e| e.to_string())?),
            ("deformation", deformation_family(&l, &k, None).map_err(|e| e.to_string())?),
        ];
        for (kind, f) in families {
            jacobi_check(&f).map_err(|w| format!("{kind}({name}) fails on {:?}", w.triple))?;
            count += 1;
        }
    }
    // [X, Y] = zH + zX breaks Jacobi on (H, X, Y).
    let (z, zero) = (RF::z(), RF::zero());
    let i = |n: i64| RF::from_int(n);
    let corrupt = LieAlgebra::from_brackets(
        vec!["H".into(), "X".into(), "Y".into()],
        &[
            (0, 1, vec![zero.clone(), i(2), zero.clone()]),
            (0, 2, vec![zero.clone(), zero.clone(), i(-2)]),
            (1, 2, vec![z.clone(), z, zero]),
        ],
    )
    .map_err(|e| e.to_string())?;
    let witness = jacobi_check(&LieFamily::new(corrupt, Chart::AffineZ))
        .err()
        .ok_or("corrupted family passed Jacobi")?;
    Ok(format!("{count} families pass; corrupted family fails on {:?}", witness.triple))
}

fn base_change_vs_deformation() -> Result<String, String> {
    let sl2 = LieAlgebra::sl2();
    let k = units(3, &[0]);
    let c = contraction_family(&sl2, &Involution::diagonal(&[1, -1, -1])).map_err(|e| e.to_string())?;
    let pulled = base_change(&c, &LaurentPoly::from_ints(&[0, 0, 1])).map_err(|e| e.to_string())?;
    let normal = deformation_family(&sl2, &k, None).map_err(|e| e.to_string())?;
    let constant = constant_family(&sl2).map_err(|e| e.to_string())?;
    let embed = deformation_embedding(&sl2, &k, None).map_err(|e| e.to_string())?;
    let (one, z) = (RF::one(), RF::z());
    ensure(embed == FamilyMorphism::diagonal(vec![one, z.clone(), z]), || "embedding is not eta -> z eta on p".into())?;
    check_morphism(&embed, &pulled, &constant).map_err(|w| format!("eta -> z eta breaks {:?}", w.pair))?;
    ensure(embed.matrix.inverse().is_some(), || "eta -> z eta is not generically invertible".into())?;
    // The image at 0 is k: the subsheaf condition.
    let at_zero: Vec<Vec<GR>> = (0..3)
        .map(|j| embed.matrix.column(j).iter().map(|f| f.eval(&GR::from_int(0)).expect("polynomial")).collect())
        .filter(|v: &Vec<GR>| v.iter().any(|x| *x != GR::from_int(0)))
        .collect();
    ensure(same_span(&at_zero, &k), || "image at 0 is not k".into())?;
    check_morphism(&FamilyMorphism::identity(3), &pulled, &normal)
        .map_err(|w| format!("identity to the z^2 normal form breaks {:?}", w.pair))?;
    ensure(check_morphism(&FamilyMorphism::identity(3), &c, &normal).is_err(), || {
        "identity is a morphism from the contraction to the deformation family".into()
    })?;
    Ok("eta -> z eta maps the pulled-back contraction onto the deformation subsheaf; identity fails between contraction and deformation".into())
}

fn sl2_section_degrees() -> Result<String, String> {
    let pair = build_sl2_contraction();
    let degrees: Vec<i64> = pair.components.iter().map(|c| c.ledger.values().sum()).collect();
    ensure(degrees == [-1, 0, -1], || format!("degrees of X, H, Y are {degrees:?}"))?;
    let generic = FiberInvariants { derived_dim: 3, center_dim: 0, solvable: false };
    let special = FiberInvariants { derived_dim: 2, center_dim: 0, solvable: true };
    for p in ["1", "-1", "2", "1/3", "i"] {
        let inv = pair.family.fiber(&p.parse().expect("point")).map_err(|e| e.to_string())?.fiber_invariants();
        ensure(inv == generic, || format!("fiber at {p}: {inv:?}"))?;
    }
    for p in [Point::zero(), Point::Infinity] {
        let inv = pair.family.fiber(&p).map_err(|e| e.to_string())?.fiber_invariants();
        ensure(inv == special, || format!("fiber at {p}: {inv:?}"))?;
    }
    Ok("degrees (-1, 0, -1); generic fibers {3,0,false}, 0 and inf {2,0,true}".into())
}

/// Weight sets of every type and classes to try on them.
fn weight_catalogue() -> Vec<WeightSet> {
    let mut out = vec![WeightSet::AllEven, WeightSet::AllOdd];
    for l in 1..=4 {
        out.push(WeightSet::LowestWeight(l));
        out.push(WeightSet::HighestWeight(-l));
    }
    out.extend((0..=4).map(WeightSet::FiniteDim));
    out
}

fn casimirs_for(w: WeightSet) -> Vec<CasimirTriple> {
    match w.forced_casimir() {
        Some(c) => vec![CasimirTriple::constant(c.into())],
        None => vec![
            CasimirTriple::ints(0, 0, 1),
            CasimirTriple::ints(1, 0, 0),
            CasimirTriple::ints(1, 2, 3),
            CasimirTriple::constant(g("1/2")),
            CasimirTriple::new(g("i"), g("-3"), g("2")),
        ],
    }
}

fn classes_for(w: WeightSet) -> Vec<ClassSpec> {
    let ks: Vec<i64> = w.weights_in(-4, 4);
    let mut out = vec![ClassSpec::III, ClassSpec::IV];
    for k in ks {
        out.push(ClassSpec::I(k));
        out.push(ClassSpec::II(k));
    }
    out
}

fn type_name(w: WeightSet) -> &'static str {
    match w {
        WeightSet::AllEven => "even",
        WeightSet::AllOdd => "odd",
        WeightSet::LowestWeight(_) => "lowest",
        WeightSet::HighestWeight(_) => "highest",
        WeightSet::FiniteDim(_) => "finite",
    }
}

fn class_name(c: ClassSpec) -> &'static str {
    match c {
        ClassSpec::I(_) => "I",
        ClassSpec::II(_) => "II",
        ClassSpec::III => "III",
        ClassSpec::IV => "IV",
        ClassSpec::EqualDegrees => "equal",
    }
}

fn casimir_structure() -> Result<String, String> {
    let jobs: Vec<(WeightSet, ClassSpec, CasimirTriple)> = weight_catalogue()
        .into_iter()
        .flat_map(|w| {
            classes_for(w)
                .into_iter()
                .flat_map(move |cls| casimirs_for(w).into_iter().map(move |c| (w, cls, c)))
        })
        .collect();
    let results: Vec<Result<Option<(WeightSet, ClassSpec)>, String>> = jobs
        .par_iter()
        .map(|(w, cls, c)| {
            let m = match construct(*w, *cls, c) {
                Ok(m) => m,
                Err(ClassifyError::IncompatibleClass(..)) => return Ok(None),
                Err(e) => return Err(format!("{w} {cls}: {e}")),
            };
            let expected: RF = LaurentPoly::from_terms([(1, c.c1.clone()), (0, c.c0.clone()), (-1, c.cm1.clone())]).into();
            for n in m.weights.weights_in(-20, 20) {
                let f = casimir_acting_function(&m, n).map_err(|e| e.to_string())?;
                if f != expected {
                    return Err(format!("{w} {cls} ({c}): C acts on f_{n} by {f}"));
                }
                let yx = m.acting_function(n, Ordering::YX).map_err(|e| e.to_string())?;
                let xy = m.acting_function(n, Ordering::XY).map_err(|e| e.to_string())?;
                if yx != xy {
                    return Err(format!("{w} {cls} ({c}): orderings differ at {n}"));
                }
            }
            Ok(Some((*w, *cls)))
        })
        .collect();
    let built: Vec<(WeightSet, ClassSpec)> = results.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
    let types: BTreeSet<&str> = built.iter().map(|(w, _)| type_name(*w)).collect();
    let classes: BTreeSet<&str> = built.iter().map(|(_, c)| class_name(*c)).collect();
    ensure(types.len() == 5, || format!("weight types covered: {types:?}"))?;
    ensure(classes.len() == 4, || format!("classes covered: {classes:?}"))?;
    Ok(format!("{} modules over {} weight types and {} classes; C acts by c1 z + c0 + cm1/z, orderings agree", built.len(), types.len(), classes.len()))
}

fn excluded_casimir_values() -> Result<String, String> {
    let mut checked = 0;
    for w in [WeightSet::AllEven, WeightSet::AllOdd] {
        for m in -10i64..=10 {
            let c = CasimirTriple::constant((m * (m + 2)).into());
            let matching = m.rem_euclid(2) == w.parity();
            let admissible = admissible_casimir(w, &c).is_ok();
            ensure(admissible != matching, || format!("{w}, m = {m}: admissible = {admissible}"))?;
            let built = construct(w, ClassSpec::III, &c);
            ensure(built.is_ok() == admissible, || format!("{w}, m = {m}: construct disagrees"))?;
            if matching {
                // Independently: q_m = (c0 - m(m+2)) z vanishes identically.
                ensure(c.q(m).is_zero(), || format!("q_{m} does not vanish"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} values: rejected exactly when m has the weights' parity"))
}

/// A module with the given weights and Casimir but no Casimir constraint from
/// the construction, for validation to judge.
fn extreme_module(w: WeightSet, c: i64) -> Option<HCModuleFamily> {
    let forced = CasimirTriple::constant(w.forced_casimir()?.into());
    let classes = classes_for(w);
    let m = classes.into_iter().find_map(|cls| construct(w, cls, &forced).ok())?;
    Some(HCModuleFamily { casimir: CasimirTriple::constant(c.into()), ..m })
}

fn extreme_weight_casimir() -> Result<String, String> {
    let mut cases: Vec<(WeightSet, i64)> = Vec::new();
    for l in 1..=10i64 {
        cases.push((WeightSet::LowestWeight(l), l * l - 2 * l));
        cases.push((WeightSet::HighestWeight(-l), l * l - 2 * l));
    }
    for k in 0..=10i64 {
        cases.push((WeightSet::FiniteDim(k), k * k + 2 * k));
    }
    for &(w, expected) in &cases {
        ensure(w.forced_casimir() == Some(expected), || format!("{w}: forced {:?}", w.forced_casimir()))?;
        let good = extreme_module(w, expected).ok_or_else(|| format!("{w}: no class constructs"))?;
        ensure(validate(&good).passed(), || format!("{w}: forced constant rejected"))?;
        for wrong in [expected - 1, expected + 1] {
            let bad = extreme_module(w, wrong).expect("constructed above");
            let report = validate(&bad);
            ensure(
                report.violations.iter().any(|v| matches!(v, Violation::ExtremeWeightCasimir { .. })),
                || format!("{w}: constant {wrong} not rejected by the extreme-weight rule"),
            )?;
        }
    }
    for k in 0..=10i64 {
        let l = k + 2;
        ensure(l * l - 2 * l == k * (k + 2), || format!("identity fails at k = {k}"))?;
        ensure(WeightSet::LowestWeight(l).forced_casimir() == WeightSet::FiniteDim(k).forced_casimir(), || {
            format!("lowest:{l} and finite:{k} disagree")
        })?;
    }
    Ok(format!("{} extreme-weight types force l^2 - 2|l| and k^2 + 2k; identity holds for |l| = k + 2", cases.len()))
}

fn uniqueness_probes() -> Result<String, String> {
    let principal = [
        CasimirTriple::ints(0, 0, 1),
        CasimirTriple::ints(1, 0, 0),
        CasimirTriple::ints(1, 2, 3),
        CasimirTriple::constant(g("1/2")),
        CasimirTriple::new(g("i"), g("-3"), g("2")),
    ];
    let cases = [
        (WeightSet::AllEven, ClassSpec::III),
        (WeightSet::AllOdd, ClassSpec::IV),
        (WeightSet::AllEven, ClassSpec::I(0)),
        (WeightSet::LowestWeight(1), ClassSpec::I(1)),
    ];
    let mut runs: Vec<(WeightSet, ClassSpec, CasimirTriple, u64)> = Vec::new();
    for (w, cls) in cases {
        match w.forced_casimir() {
            // Only one admissible triple exists here; vary the seed instead.
            Some(c) => runs.extend((0..5).map(|s| (w, cls, CasimirTriple::constant(c.into()), s))),
            None => runs.extend(principal.iter().map(|c| (w, cls, c.clone(), 0))),
        }
    }
    let mut checks = 0;
    for (w, cls, c, seed) in &runs {
        match uniqueness_probe(*w, *cls, c, 10, *seed).map_err(|e| format!("{w} {cls} ({c}): {e}"))? {
            ProbeReport::Pass { trials, .. } => checks += trials,
            other => return Err(format!("{w} {cls} ({c}), seed {seed}: {other:?}")),
        }
    }
    Ok(format!("{} probes, {checks} iso checks; lowest:1 has the single admissible triple (-1) and runs 5 seeds", runs.len()))
}

fn equal_degrees() -> Result<String, String> {
    let c = CasimirTriple::ints(0, 0, 1);
    let m = construct(WeightSet::AllEven, ClassSpec::EqualDegrees, &c).map_err(|e| e.to_string())?;
    let three = swap_transitions(&m, &[2, 4, 6]).map_err(|e| e.to_string())?;
    for k in [2, 4, 6] {
        let (a, b) = m.transition(k).expect("transition");
        let proportional = a.leading_coeff() != GR::from_int(0) && b.scale(&(&a.leading_coeff() / &b.leading_coeff())) == a;
        ensure(!proportional, || format!("(A_{k}, B_{k}) is proportional"))?;
    }
    ensure(validate(&three).passed(), || "swapped module does not validate".into())?;
    let (lo, hi) = m.key_window();
    ensure(
        three.weights == m.weights
            && three.casimir == m.casimir
            && (lo - 10..=hi + 10).all(|n| three.degree(n) == m.degree(n)),
        || "invariants changed".into(),
    )?;
    let verdict = iso_check(&m, &three).map_err(|e| e.to_string())?;
    ensure(!verdict.is_isomorphic(), || "three swaps gave an isomorphic module".into())?;
    let one = swap_transitions(&m, &[0]).map_err(|e| e.to_string())?;
    let IsoVerdict::Isomorphic(w) = iso_check(&m, &one).map_err(|e| e.to_string())? else {
        return Err("swap at 0 gave a non-isomorphic module".into());
    };
    Ok(format!("swap at 2, 4, 6: {verdict:?}; swap at 0: isomorphic with mu_0 = {}", w.mu[&0]))
}

/// Reducibility of a fiber by enumerating all weight-spanned subspaces of the
/// explicit matrices of `X` and `Y` (H has distinct eigenvalues, so every
/// invariant subspace is weight-spanned).
fn brute_force_irreducible(m: &HCModuleFamily, p: &Point) -> Result<bool, String> {
    let f = fiber_module(m, p, None).map_err(|e| e.to_string())?;
    let (lo, hi) = (m.weights.min().expect("finite"), m.weights.max().expect("finite"));
    let weights = m.weights.weights_in(lo, hi);
    let d = weights.len();
    let idx = |n: i64| weights.iter().position(|&w| w == n).expect("weight");
    let mut x = Matrix::zeros(d, d);
    let mut y = Matrix::zeros(d, d);
    for t in &f.transitions {
        x[(idx(t.n + 2), idx(t.n))] = t.a.clone();
        y[(idx(t.n), idx(t.n + 2))] = t.b.clone();
    }
    let mut invariant = 0;
    for mask in 1u32..(1 << d) - 1 {
        let inside = |i: usize| mask & (1 << i) != 0;
        let closed = [&x, &y].iter().all(|op| {
            (0..d).filter(|&j| inside(j)).all(|j| (0..d).all(|i| inside(i) || op[(i, j)] == GR::from_int(0)))
        });
        invariant += usize::from(closed);
    }
    Ok(invariant == 0)
}

fn fiber_oracle() -> Result<String, String> {
    let f2 = WeightSet::FiniteDim(2);
    let m = construct(f2, ClassSpec::IV, &CasimirTriple::constant(8.into())).map_err(|e| e.to_string())?;
    let points = ["0", "inf", "1", "-1", "2", "1/2", "i", "1+i", "-1/3", "5"];
    let mut reducible = 0;
    for p in points {
        let p: Point = p.parse().expect("point");
        let fast = crate::hcmod::fiber_irreducible(&m, &p, None).map_err(|e| e.to_string())?.irreducible;
        let slow = brute_force_irreducible(&m, &p)?;
        ensure(fast == slow, || format!("at {p}: criterion {fast}, enumeration {slow}"))?;
        reducible += usize::from(!slow);
    }
    let c3 = construct(WeightSet::AllEven, ClassSpec::III, &CasimirTriple::ints(0, 0, 1)).map_err(|e| e.to_string())?;
    let locus = reducible_locus(&c3, (-10, 10)).map_err(|e| e.to_string())?;
    let got: BTreeSet<GR> = locus.interior.iter().cloned().collect();
    let expected: BTreeSet<GR> = (-10i64..=10)
        .filter(|n| n % 2 == 0 && *n != 0 && *n != -2)
        .map(|n| GR::ratio(1, n * (n + 2)))
        .collect();
    ensure(got == expected, || format!("locus {got:?}, expected {expected:?}"))?;
    ensure(locus.unsplit.is_empty(), || "unsplit transitions in the class III locus".into())?;
    Ok(format!(
        "finite:2 agrees with enumeration at {} points ({reducible} reducible); class III locus has the {} points 1/(n(n+2))",
        points.len(),
        expected.len()
    ))
}

fn expected_limit(pencil: &GrassmannPencil, boundary: Boundary) -> Vec<MatrixPair<GR>> {
    let n = pencil.n();
    let e = |i: usize, j: usize| {
        let mut m = Matrix::zeros(n, n);
        m[(i, j)] = GR::from_int(1);
        m
    };
    let z = Matrix::zeros(n, n);
    let mut out = Vec::new();
    for i in 0..pencil.q {
        for j in pencil.q..n {
            let (b, c) = (e(i, j), e(j, i));
            match boundary {
                Boundary::Zero => {
                    out.push(MatrixPair::new(z.clone(), b));
                    out.push(MatrixPair::new(c, z.clone()));
                }
                Boundary::Infinity => {
                    out.push(MatrixPair::new(b, z.clone()));
                    out.push(MatrixPair::new(z.clone(), c));
                }
            }
        }
    }
    out
}

fn grassmann_limits() -> Result<String, String> {
    let flat = |v: &[MatrixPair<GR>]| v.iter().map(MatrixPair::flatten).collect::<Vec<_>>();
    for (p, q) in [(1, 1), (2, 1)] {
        for det_one in [true, false] {
            let pencil = GrassmannPencil::new(p, q, det_one);
            verify_subalgebra(&pencil.basis_symbolic()).map_err(|w| format!("({p},{q}) pencil: bracket {} {}", w.i, w.j))?;
            for b in [Boundary::Zero, Boundary::Infinity] {
                let lim = limit_subspace(&pencil, b).map_err(|e| e.to_string())?;
                ensure(same_span(&flat(&lim.p), &flat(&expected_limit(&pencil, b))), || {
                    format!("({p},{q}) limit at {b} differs from the display")
                })?;
                ensure(lim.p.iter().all(|x| lim.p.iter().all(|y| x.bracket(y).is_zero())), || {
                    format!("({p},{q}) [p_{b}, p_{b}] != 0")
                })?;
                verify_subalgebra(&lim.basis()).map_err(|w| format!("({p},{q}) limit at {b}: bracket {} {}", w.i, w.j))?;
                let closure = fiber_group_closure_check(&pencil, b).map_err(|e| e.to_string())?;
                ensure(closure.passed, || format!("({p},{q}) closure at {b}: {:?}", closure.failures))?;
            }
        }
    }
    let small = GrassmannPencil::new(1, 1, true);
    contraction_comparison(&small).map_err(|e| e.to_string())?;
    let two = pencil_two_chart(&small).map_err(|e| e.to_string())?;
    two.verify()?;
    let proj = contraction_family_projective(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1]))
        .map_err(|e| e.to_string())?;
    ensure(two.gluing == proj.gluing, || "pencil gluing differs from the contraction gluing".into())?;
    Ok("limits match p_0 and p_inf for (1,1), (2,1); subalgebras, [p_b, p_b] = 0, closure at 0 and inf; (1,1) pencil is the sl2 contraction".into())
}

fn real_forms() -> Result<String, String> {
    let small = GrassmannPencil::new(1, 1, true);
    let sig = |pencil: &GrassmannPencil, x: &str| -> Result<(usize, usize, usize), String> {
        Ok(real_form_at(pencil, &x.parse().expect("point")).map_err(|e| e.to_string())?.killing_signature)
    };
    ensure(sig(&small, "1")? == (2, 0, 1), || "x = 1 is not su(1,1)".into())?;
    ensure(sig(&small, "-1")? == (0, 0, 3), || "x = -1 is not su(2)".into())?;
    for b in ["0", "inf"] {
        let r = real_form_at(&small, &b.parse().expect("point")).map_err(|e| e.to_string())?;
        ensure(r.dim == 3 && r.invariants.solvable && r.killing_signature.1 > 0, || {
            format!("boundary {b}: {:?} {:?}", r.killing_signature, r.invariants)
        })?;
    }
    let big = GrassmannPencil::new(2, 1, true);
    let (plus, minus) = (sig(&big, "1")?, sig(&big, "-1")?);
    ensure(plus == (4, 0, 4) && minus == (0, 0, 8), || format!("(2,1): {plus:?} at 1, {minus:?} at -1"))?;
    Ok(format!("(1,1): (2,0,1) at 1, (0,0,3) at -1, degenerate solvable at 0 and inf; (2,1): {plus:?} vs {minus:?}"))
}
