//! Fibers of module families and their reducibility.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require_valid, HCModuleFamily, HcError, Poly};
use crate::exactalg::{GaussianRational, LaurentPoly, Point};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTransition {
    pub n: i64,
    pub a: GaussianRational,
    pub b: GaussianRational,
}

/// Transition scalars of the fiber at a point, in local bases adapted to the
/// point (`X`, `zY` at `0`; `z^{d_n} f_n` and `wX`, `Y` at `inf`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberModule {
    pub point: Point,
    pub transitions: Vec<FiberTransition>,
    /// The fiber algebra at `0` and `inf` is not reductive; verdicts there
    /// rest on the weight-subspace criterion alone.
    pub criterion_based: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vanishing {
    pub n: i64,
    pub poly: Poly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberVerdict {
    pub irreducible: bool,
    pub vanishing: Vec<Vanishing>,
    pub criterion_based: bool,
}

/// Transition indices in a window, or all of them for a finite weight set.
fn transitions(m: &HCModuleFamily, window: Option<(i64, i64)>) -> Result<Vec<i64>, HcError> {
    match window {
        Some((lo, hi)) => Ok(m.weights.transitions_in(lo, hi)),
        None if m.weights.is_finite() => {
            let (lo, hi) = (m.weights.min().unwrap(), m.weights.max().unwrap());
            Ok(m.weights.transitions_in(lo, hi))
        }
        None => Err(HcError::WindowRequired),
    }
}

/// Value at infinity of a transition polynomial whose degree is bounded by
/// `bound`: the leading coefficient if the bound is attained, else zero.
fn at_infinity(p: &LaurentPoly, bound: i64) -> GaussianRational {
    if p.degree() == Some(bound) {
        p.leading_coeff()
    } else {
        GaussianRational::zero()
    }
}

fn scalars(m: &HCModuleFamily, n: i64, p: &Point) -> Result<FiberTransition, HcError> {
    let (a, b) = m.transition(n).ok_or(HcError::NotATransition(n))?;
    let (a, b) = match p {
        Point::Finite(x) => (a.eval(x)?, b.eval(x)?),
        Point::Infinity => {
            let delta = m.delta(n);
            (at_infinity(&a, 1 + delta), at_infinity(&b, 1 - delta))
        }
    };
    Ok(FiberTransition { n, a, b })
}

pub fn fiber_module(m: &HCModuleFamily, p: &Point, window: Option<(i64, i64)>) -> Result<FiberModule, HcError> {
    require_valid(m)?;
    let transitions = transitions(m, window)?
        .into_iter()
        .map(|n| scalars(m, n, p))
        .collect::<Result<_, _>>()?;
    Ok(FiberModule { point: p.clone(), transitions, criterion_based: p.is_boundary() })
}

fn vanishing(f: &FiberModule) -> Vec<Vanishing> {
    let mut out = Vec::new();
    for t in &f.transitions {
        if t.a.is_zero() {
            out.push(Vanishing { n: t.n, poly: Poly::A });
        }
        if t.b.is_zero() {
            out.push(Vanishing { n: t.n, poly: Poly::B });
        }
    }
    out
}

/// A weight-spanned subspace is invariant exactly when its boundary
/// transitions vanish, so the fiber is irreducible iff no scalar vanishes.
pub fn fiber_irreducible(m: &HCModuleFamily, p: &Point, window: Option<(i64, i64)>) -> Result<FiberVerdict, HcError> {
    let f = fiber_module(m, p, window)?;
    let vanishing = vanishing(&f);
    Ok(FiberVerdict { irreducible: vanishing.is_empty(), vanishing, criterion_based: f.criterion_based })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unsplit {
    pub n: i64,
    pub poly: Poly,
    pub polynomial: LaurentPoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReducibleLocus {
    /// Points of `C^x` with a reducible fiber.
    pub interior: Vec<GaussianRational>,
    /// Which of `0`, `inf` have a reducible fiber.
    pub boundary: Vec<Point>,
    /// Transition polynomials whose roots are not in `Q(i)`.
    pub unsplit: Vec<Unsplit>,
}

/// Reducible fibers coming from transitions `n` with `lo <= n <= hi`.
pub fn reducible_locus(m: &HCModuleFamily, window: (i64, i64)) -> Result<ReducibleLocus, HcError> {
    require_valid(m)?;
    let ns = m.weights.transitions_in(window.0, window.1);
    let parts: Vec<ReducibleLocus> = ns
        .par_iter()
        .map(|&n| -> Result<ReducibleLocus, HcError> {
            let (a, b) = m.transition(n).expect("transition index");
            let mut part = ReducibleLocus::default();
            for (poly, p) in [(Poly::A, &a), (Poly::B, &b)] {
                match p.roots() {
                    Ok(roots) => part.interior.extend(roots.into_iter().map(|(r, _)| r).filter(|r| !r.is_zero())),
                    Err(_) => part.unsplit.push(Unsplit { n, poly, polynomial: p.clone() }),
                }
            }
            for point in [Point::zero(), Point::Infinity] {
                let s = scalars(m, n, &point)?;
                if s.a.is_zero() || s.b.is_zero() {
                    part.boundary.push(point);
                }
            }
            Ok(part)
        })
        .collect::<Result<_, _>>()?;
    let mut out = ReducibleLocus::default();
    for p in parts {
        out.interior.extend(p.interior);
        out.boundary.extend(p.boundary);
        out.unsplit.extend(p.unsplit);
    }
    out.interior.sort();
    out.interior.dedup();
    out.boundary.sort();
    out.boundary.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{class_three, finite_two, g};
    use super::super::*;
    use super::*;
    use crate::exactalg::Matrix;

    #[test]
    fn class_three_fibers() {
        let m = class_three();
        let one = fiber_module(&m, &Point::int(1), Some((-6, 6))).unwrap();
        for t in &one.transitions {
            assert_eq!(t.a, GaussianRational::ratio(1 - t.n * (t.n + 2), 4));
            assert_eq!(t.b, g("1"));
        }
        assert!(fiber_irreducible(&m, &Point::int(1), Some((-6, 6))).unwrap().irreducible);
        let v = fiber_irreducible(&m, &Point::Finite(g("1/8")), Some((-6, 6))).unwrap();
        assert!(!v.irreducible);
        // q_2 = 1 - 8z and q_{-4} = 1 - 8z.
        assert_eq!(v.vanishing, vec![Vanishing { n: -4, poly: Poly::A }, Vanishing { n: 2, poly: Poly::A }]);
        assert!(matches!(fiber_module(&m, &Point::int(1), None), Err(HcError::WindowRequired)));
    }

    #[test]
    fn boundary_fibers() {
        let m = class_three();
        let zero = fiber_irreducible(&m, &Point::zero(), Some((-6, 6))).unwrap();
        assert!(zero.irreducible && zero.criterion_based);
        // deg A_n = 1 never reaches the bound 2.
        assert!(!fiber_irreducible(&m, &Point::Infinity, Some((-6, 6))).unwrap().irreducible);
        let f = fiber_module(&finite_two(), &Point::zero(), None).unwrap();
        assert!(f.transitions.iter().all(|t| t.a == g("1") && t.b.is_zero()));
    }

    #[test]
    fn locus_of_class_three() {
        let l = reducible_locus(&class_three(), (-6, 6)).unwrap();
        let mut expected: Vec<GaussianRational> = [-6i64, -4, 2, 4, 6]
            .iter()
            .map(|&n| GaussianRational::ratio(1, n * (n + 2)))
            .collect();
        expected.sort();
        expected.dedup();
        assert_eq!(l.interior, expected);
        assert_eq!(l.boundary, vec![Point::Infinity]);
        assert!(l.unsplit.is_empty());
    }

    #[test]
    fn discrete_series_locus_is_on_the_boundary() {
        let m = HCModuleFamily::new(
            WeightSet::LowestWeight(1),
            DegreeProfile::linear(1, 0, -1, 1),
            TransitionData::uniform(TailRule::AscUnit(g("1"))),
            CasimirTriple::ints(0, -1, 0),
        );
        let l = reducible_locus(&m, (1, 21)).unwrap();
        assert!(l.interior.is_empty());
        assert_eq!(l.boundary, vec![Point::zero(), Point::Infinity]);
        assert!(reducible_locus(&finite_two(), (-2, 2)).unwrap().interior.is_empty());
    }

    #[test]
    fn unsplit_quadratics_are_reported() {
        // q_0 = z^2 - 2 does not split over Q(i).
        let m = HCModuleFamily::new(
            WeightSet::AllEven,
            DegreeProfile::linear(0, 0, -1, 1),
            TransitionData {
                overrides: Default::default(),
                split: 0,
                upper: TailRule::AscUnit(g("1")),
                lower: TailRule::DescUnit(g("1")),
            },
            CasimirTriple::ints(1, 0, -2),
        );
        assert!(validate(&m).passed());
        let l = reducible_locus(&m, (0, 0)).unwrap();
        assert_eq!(l.unsplit.len(), 1);
        assert_eq!(l.unsplit[0].n, 0);
    }

    /// Action matrices of `H`, `X` and `zY` on the fiber of a finite module,
    /// in the basis of weights in increasing order.
    fn fiber_matrices(m: &HCModuleFamily, p: &GaussianRational) -> (Vec<i64>, [Matrix<GaussianRational>; 3]) {
        let ws = m.weights.weights_in(m.weights.min().unwrap(), m.weights.max().unwrap());
        let d = ws.len();
        let (mut h, mut x, mut y) = (Matrix::zeros(d, d), Matrix::zeros(d, d), Matrix::zeros(d, d));
        for (i, &n) in ws.iter().enumerate() {
            h[(i, i)] = GaussianRational::from_int(n);
            if let Some((a, b)) = m.transition(n) {
                x[(i + 1, i)] = a.eval(p).unwrap();
                y[(i, i + 1)] = b.eval(p).unwrap();
            }
        }
        (ws, [h, x, y])
    }

    /// Brute force: a subset of weights spans an invariant subspace iff each
    /// action matrix maps it into itself.
    fn has_invariant_weight_subspace(mats: &[Matrix<GaussianRational>], d: usize) -> bool {
        (1..(1u32 << d) - 1).any(|mask| {
            mats.iter().all(|mat| {
                (0..d).filter(|&j| mask & (1 << j) != 0).all(|j| {
                    (0..d).all(|i| mask & (1 << i) != 0 || mat[(i, j)].is_zero())
                })
            })
        })
    }

    #[test]
    fn fiber_verdict_matches_brute_force() {
        let m = finite_two();
        for s in ["1", "-1", "2", "1/3", "i", "1+i", "-5/2", "7", "1/8", "0"] {
            let p = g(s);
            let (ws, mats) = fiber_matrices(&m, &p);
            let brute = !has_invariant_weight_subspace(&mats, ws.len());
            let verdict = fiber_irreducible(&m, &Point::Finite(p), None).unwrap().irreducible;
            assert_eq!(verdict, brute, "at {s}");
        }
    }

    #[test]
    fn fiber_matrices_satisfy_the_family_relations() {
        // [X, zY] = zH and [H, X] = 2X on every fiber.
        let m = finite_two();
        for s in ["1", "-3", "2/5", "i"] {
            let p = g(s);
            let (_, [h, x, y]) = fiber_matrices(&m, &p);
            assert_eq!(x.commutator(&y), h.scale(&p));
            assert_eq!(h.commutator(&x), x.scale(&g("2")));
            assert_eq!(h.commutator(&y), y.scale(&g("-2")));
        }
    }
}
