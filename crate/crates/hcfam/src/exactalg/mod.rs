//! Exact scalars and linear algebra.
//!
//! Three scalar levels are provided: [`GaussianRational`] (the base field
//! `Q(i)`), [`LaurentPoly`] (the ring `Q(i)[z, 1/z]`) and
//! [`RationalFunction`] (the function field `Q(i)(z)`), together with dense
//! [`Matrix`] routines that work over any of them.

mod gaussian;
mod laurent;
mod matrix;
mod ratfunc;

pub use gaussian::GaussianRational;
pub(crate) use gaussian::{parity, rational_sqrt};
pub use laurent::LaurentPoly;
pub use matrix::{coordinates_in, inertia, rank_of, same_span, Field, Matrix};
pub use ratfunc::{Order, Point, RationalFunction};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("pole at z = {0}")]
    PoleAtPoint(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("polynomial does not split over Q(i): {0}")]
    Unsplit(String),
}

/// Order of `f` at `p`, or `Order::Infinite` for the zero function.
pub fn ord_at(f: &RationalFunction, p: &Point) -> Order {
    f.ord_at(p)
}

/// Value of `f` at a finite point.
pub fn evaluate(f: &RationalFunction, z0: &GaussianRational) -> Result<GaussianRational, ExactError> {
    f.eval(z0)
}

/// Kernel basis of an exact matrix.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    m.kernel()
}

#[cfg(test)]
mod proptests {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn scalar() -> impl Strategy<Value = GaussianRational> {
        (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
            .prop_map(|(a, b, c, d)| GaussianRational::complex((a, b), (c, d)))
    }

    fn laurent() -> impl Strategy<Value = LaurentPoly> {
        (-2i64..=1, prop::collection::vec(scalar(), 0..4)).prop_map(|(start, coeffs)| {
            LaurentPoly::from_terms(coeffs.into_iter().enumerate().map(|(k, c)| (start + k as i64, c)))
        })
    }

    fn small_int_scalar() -> impl Strategy<Value = GaussianRational> {
        (-3i64..=3, -2i64..=2).prop_map(|(a, b)| GaussianRational::complex((a, 1), (b, 1)))
    }

    /// `c * z^k * prod (z - a_j)^{e_j}` with known zeros and poles.
    fn factored() -> impl Strategy<Value = (RationalFunction, Vec<GaussianRational>)> {
        (
            scalar().prop_filter("nonzero", |c| !c.is_zero()),
            -3i64..=3,
            prop::collection::vec((small_int_scalar().prop_filter("nonzero", |a| !a.is_zero()), -2i64..=2), 0..4),
        )
            .prop_map(|(c, k, factors)| {
                let mut f = RationalFunction::z_pow(k).scale(&c);
                let mut points = Vec::new();
                for (a, e) in factors {
                    let lin: RationalFunction =
                        LaurentPoly::from_terms([(1, GaussianRational::one()), (0, -a.clone())]).into();
                    if e != 0 {
                        f = &f * &lin.pow(e);
                    }
                    points.push(a);
                }
                (f, points)
            })
    }

    proptest! {
        #[test]
        fn gaussian_ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
            prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            prop_assert_eq!(a.conj().conj(), a.clone());
            let s = a.to_string();
            prop_assert_eq!(s.parse::<GaussianRational>().unwrap(), a);
        }

        #[test]
        fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            let json = serde_json::to_string(&a).unwrap();
            prop_assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), a);
        }

        #[test]
        fn rational_function_field_axioms(a in laurent(), b in laurent(), c in laurent(), d in laurent()) {
            prop_assume!(!b.is_zero() && !d.is_zero());
            let f = RationalFunction::new(a.clone(), b.clone()).unwrap();
            let g = RationalFunction::new(c.clone(), d.clone()).unwrap();
            let h: RationalFunction = a.clone().into();
            prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
            prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
            if !g.is_zero() {
                prop_assert_eq!(&(&f / &g) * &g, f.clone());
            }
            let json = serde_json::to_string(&f).unwrap();
            prop_assert_eq!(serde_json::from_str::<RationalFunction>(&json).unwrap(), f);
        }

        #[test]
        fn order_is_additive((f, pf) in factored(), (g, pg) in factored()) {
            let mut points: Vec<Point> = pf.into_iter().chain(pg).map(Point::Finite).collect();
            points.push(Point::zero());
            points.push(Point::Infinity);
            points.push(Point::Finite(GaussianRational::complex((1, 3), (1, 5))));
            let fg = &f * &g;
            for p in &points {
                prop_assert_eq!(fg.ord_at(p), f.ord_at(p) + g.ord_at(p));
            }
        }

        #[test]
        fn principal_divisor_has_degree_zero((f, pts) in factored()) {
            let mut points: Vec<Point> = pts.into_iter().map(Point::Finite).collect();
            points.push(Point::zero());
            points.sort();
            points.dedup();
            let finite: i64 = points.iter().map(|p| f.ord_at(p).finite().unwrap()).sum();
            let at_inf = f.ord_at(&Point::Infinity).finite().unwrap();
            prop_assert_eq!(finite + at_inf, 0);
        }
    }

    #[test]
    fn zero_function_has_infinite_order() {
        assert_eq!(ord_at(&RationalFunction::zero(), &Point::zero()), Order::Infinite);
        assert!(RationalFunction::zero().is_zero());
    }
}
