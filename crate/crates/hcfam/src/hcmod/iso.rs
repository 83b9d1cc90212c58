//! Isomorphism of module families, Picard twists and transition swaps.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{key_window_of, require_valid, HCModuleFamily, HcError, Tail, TailRule};
use crate::exactalg::{GaussianRational, LaurentPoly};

/// Rescaling data: `f'_n = lambda_n f_n`, so that `A'_n = mu_n A_n` and
/// `B'_n = B_n / mu_n` with `mu_n = lambda_{n+2} / lambda_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoWitness {
    pub anchor: i64,
    pub window: (i64, i64),
    pub mu: BTreeMap<i64, GaussianRational>,
    pub lambda: BTreeMap<i64, GaussianRational>,
    /// Constant `mu_n` on each infinite tail beyond the window.
    pub tail_mu: BTreeMap<Tail, GaussianRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Obstruction {
    WeightsDiffer,
    CasimirDiffers,
    DegreesDiffer { n: i64 },
    DegreeStepDiffers { tail: Tail },
    NotProportional { n: i64 },
    TailRuleMismatch { tail: Tail },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum IsoVerdict {
    Isomorphic(IsoWitness),
    NotIsomorphic(Obstruction),
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }
}

/// `mu` with `a' = mu a`, if it exists (and is nonzero).
fn ratio(a: &LaurentPoly, a2: &LaurentPoly) -> Option<GaussianRational> {
    if a.is_zero() || a2.is_zero() {
        return None;
    }
    let mu = &a2.leading_coeff() / &a.leading_coeff();
    (a.scale(&mu) == *a2).then_some(mu)
}

fn tail_ratio(r: &TailRule, r2: &TailRule) -> Option<GaussianRational> {
    if !r.same_kind(r2) || r.unit().is_zero() || r2.unit().is_zero() {
        return None;
    }
    Some(match r {
        TailRule::AscUnit(u) => r2.unit() / u,
        TailRule::DescUnit(u) => u / r2.unit(),
    })
}

/// Decides whether two validated families are isomorphic by rescaling the
/// canonical sections, matching scalars outward from the weight of smallest
/// absolute value.
pub fn iso_check(m: &HCModuleFamily, n: &HCModuleFamily) -> Result<IsoVerdict, HcError> {
    require_valid(m)?;
    require_valid(n)?;
    use IsoVerdict::NotIsomorphic as No;
    if m.weights != n.weights {
        return Ok(No(Obstruction::WeightsDiffer));
    }
    if m.casimir != n.casimir {
        return Ok(No(Obstruction::CasimirDiffers));
    }
    let (lo, hi) = key_window_of(&[m, n]);
    let weights = m.weights.weights_in(lo, hi);
    if let Some(&k) = weights.iter().find(|&&k| m.degree(k) != n.degree(k)) {
        return Ok(No(Obstruction::DegreesDiffer { n: k }));
    }
    for tail in m.infinite_tails() {
        if m.tail_step(tail) != n.tail_step(tail) {
            return Ok(No(Obstruction::DegreeStepDiffers { tail }));
        }
    }
    let mut mu = BTreeMap::new();
    for k in m.weights.transitions_in(lo, hi) {
        let (a, b) = m.transition(k).expect("transition index");
        let (a2, b2) = n.transition(k).expect("transition index");
        match ratio(&a, &a2) {
            Some(x) if b2.scale(&x) == b => {
                mu.insert(k, x);
            }
            _ => return Ok(No(Obstruction::NotProportional { n: k })),
        }
    }
    let mut tail_mu = BTreeMap::new();
    for tail in m.infinite_tails() {
        match tail_ratio(m.tail_rule_of(tail), n.tail_rule_of(tail)) {
            Some(x) => {
                tail_mu.insert(tail, x);
            }
            None => return Ok(No(Obstruction::TailRuleMismatch { tail })),
        }
    }
    let anchor = *weights.iter().min_by_key(|&&k| (k.abs(), k)).expect("nonempty window");
    let mut lambda = BTreeMap::new();
    lambda.insert(anchor, GaussianRational::one());
    let mut k = anchor;
    while let Some(x) = mu.get(&k) {
        let next = &lambda[&k] * x;
        lambda.insert(k + 2, next);
        k += 2;
    }
    k = anchor;
    while let Some(x) = mu.get(&(k - 2)) {
        let prev = &lambda[&k] / x;
        lambda.insert(k - 2, prev);
        k -= 2;
    }
    Ok(IsoVerdict::Isomorphic(IsoWitness { anchor, window: (lo, hi), mu, lambda, tail_mu }))
}

/// Tensor with `O(d)`: every degree shifts by `d`.
pub fn picard_twist(m: &HCModuleFamily, d: i64) -> Result<HCModuleFamily, HcError> {
    require_valid(m)?;
    Ok(HCModuleFamily { degrees: m.degrees.twisted(d), ..m.clone() })
}

/// Exchanges `A_n` and `B_n` at each index of `indices`; allowed where the
/// degree does not change.
pub fn swap_transitions(m: &HCModuleFamily, indices: &[i64]) -> Result<HCModuleFamily, HcError> {
    require_valid(m)?;
    let mut out = m.clone();
    for &k in indices {
        let (a, b) = m.transition(k).ok_or(HcError::NotATransition(k))?;
        if m.delta(k) != 0 {
            return Err(HcError::DegreeBoundViolated(k));
        }
        out.transitions.overrides.insert(k, (b, a));
    }
    require_valid(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{class_three, g};
    use super::super::*;
    use super::*;
    use proptest::prelude::*;

    /// All weights in degree zero, `B_n = 1`.
    fn equal_degrees() -> HCModuleFamily {
        HCModuleFamily::new(
            WeightSet::AllEven,
            DegreeProfile::constant(0),
            TransitionData::uniform(TailRule::DescUnit(g("1"))),
            CasimirTriple::ints(0, 0, 1),
        )
    }

    fn rescaled(m: &HCModuleFamily, mu: &GaussianRational) -> HCModuleFamily {
        let mut out = m.clone();
        let inv = mu.inv().unwrap();
        let (lo, hi) = m.key_window();
        for k in m.weights.transitions_in(lo, hi) {
            let (a, b) = m.transition(k).unwrap();
            out.transitions.overrides.insert(k, (a.scale(mu), b.scale(&inv)));
        }
        let scale_rule = |r: &TailRule| match r {
            TailRule::AscUnit(u) => TailRule::AscUnit(u * mu),
            TailRule::DescUnit(u) => TailRule::DescUnit(u * &inv),
        };
        out.transitions.upper = scale_rule(&m.transitions.upper);
        out.transitions.lower = scale_rule(&m.transitions.lower);
        out
    }

    #[test]
    fn uniform_rescaling_is_an_isomorphism() {
        let m = class_three();
        let two = rescaled(&m, &g("2"));
        let IsoVerdict::Isomorphic(w) = iso_check(&m, &two).unwrap() else { panic!() };
        assert!(w.mu.values().all(|x| *x == g("2")));
        assert_eq!(w.tail_mu[&Tail::Upper], g("2"));
        assert_eq!(w.lambda[&4], g("4"));
        assert_eq!(w.lambda[&-2], g("1/2"));
    }

    #[test]
    fn twists_change_the_isomorphism_class() {
        let m = class_three();
        assert_eq!(picard_twist(&m, 0).unwrap(), m);
        assert_eq!(picard_twist(&picard_twist(&m, -1).unwrap(), 1).unwrap(), m);
        assert_eq!(
            iso_check(&m, &picard_twist(&m, 1).unwrap()).unwrap(),
            IsoVerdict::NotIsomorphic(Obstruction::DegreesDiffer { n: m.key_window().0 })
        );
        let five = picard_twist(&m, 5).unwrap();
        assert_eq!(five.degree(7), 3 + 5);
    }

    #[test]
    fn swaps() {
        let m = equal_degrees();
        assert!(validate(&m).passed());
        assert_eq!(swap_transitions(&m, &[]).unwrap(), m);
        // q_0 = 1: (A_0, B_0) = (1/4, 1) is a proportional pair.
        let one = swap_transitions(&m, &[0]).unwrap();
        let IsoVerdict::Isomorphic(w) = iso_check(&m, &one).unwrap() else { panic!() };
        assert_eq!(w.mu[&0], g("4"));
        let three = swap_transitions(&m, &[2, 4, 6]).unwrap();
        assert!(validate(&three).passed());
        assert_eq!(
            iso_check(&m, &three).unwrap(),
            IsoVerdict::NotIsomorphic(Obstruction::NotProportional { n: 2 })
        );
        assert!(matches!(swap_transitions(&class_three(), &[0]), Err(HcError::DegreeBoundViolated(0))));
        assert!(matches!(swap_transitions(&m, &[1]), Err(HcError::NotATransition(1))));
    }

    #[test]
    fn tail_kind_mismatch() {
        let m = equal_degrees();
        let mut n = m.clone();
        n.transitions.upper = TailRule::AscUnit(g("1"));
        // Agree on the window so that only the tails differ.
        let (lo, hi) = m.key_window();
        for k in m.weights.transitions_in(lo, hi) {
            n.transitions.overrides.insert(k, m.transition(k).unwrap());
        }
        assert!(validate(&n).passed());
        // The joint window reaches past both modules' overrides, so the
        // mismatch surfaces as the first tail transition outside them.
        let (_, hi) = key_window_of(&[&m, &n]);
        let IsoVerdict::NotIsomorphic(Obstruction::NotProportional { n: k }) = iso_check(&m, &n).unwrap() else { panic!() };
        assert!(k > m.key_window().1 && k <= hi);
    }

    fn unit() -> impl Strategy<Value = GaussianRational> {
        (-5i64..=5, 1i64..=3, -2i64..=2)
            .prop_filter("nonzero", |(a, _, c)| *a != 0 || *c != 0)
            .prop_map(|(a, b, c)| GaussianRational::complex((a, b), (c, 1)))
    }

    /// A module from the equal-degree family: either the base module or a
    /// swap of it, rescaled.
    fn module() -> impl Strategy<Value = HCModuleFamily> {
        (unit(), prop::bool::ANY).prop_map(|(mu, swap)| {
            let base = equal_degrees();
            let m = if swap { swap_transitions(&base, &[2]).unwrap() } else { base };
            rescaled(&m, &mu)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn isomorphism_is_an_equivalence(a in module(), b in module(), c in module()) {
            let iso = |x: &HCModuleFamily, y: &HCModuleFamily| iso_check(x, y).unwrap().is_isomorphic();
            prop_assert!(iso(&a, &a));
            prop_assert_eq!(iso(&a, &b), iso(&b, &a));
            if iso(&a, &b) && iso(&b, &c) {
                prop_assert!(iso(&a, &c));
            }
        }
    }
}
