//! The `SL(2)` contraction pair over the projective line.
//!
//! In the `z`-chart the family is free on `H`, `e_X = X`, `e_Y = zY` with
//! `[e_X, e_Y] = zH`; in the `w`-chart it is free on `H`, `wX`, `Y`. The
//! canonical rational sections `X`, `H`, `Y` carry the `K`-weights `2, 0, -2`
//! and span invertible sheaves of degrees `-1, 0, -1`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{GaussianRational, Order, Point, RationalFunction};
use crate::hcmod::{HCModuleFamily, HcError, Ordering};
use crate::liefam::{contraction_family_projective, Involution, LieAlgebra, TwoChartFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sl2Error {
    #[error("section is not homogeneous for the weight action")]
    NotHomogeneous,
}

/// A rational section of the family, stored in both charts.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSection {
    /// Coordinates in the `z`-chart basis, as functions of `z`.
    pub z_coords: Vec<RationalFunction>,
    /// Coordinates in the `w`-chart basis, as functions of `w`.
    pub w_coords: Vec<RationalFunction>,
}

impl RationalSection {
    /// Builds the `w`-chart coordinates through the gluing map.
    pub fn from_z_coords(family: &TwoChartFamily, z_coords: Vec<RationalFunction>) -> Self {
        let w_coords = family.gluing.matrix.mul_vec(&z_coords).iter().map(RationalFunction::invert_variable).collect();
        Self { z_coords, w_coords }
    }

    pub fn is_zero(&self) -> bool {
        self.z_coords.iter().all(Zero::is_zero)
    }

    /// Order of vanishing at a point: the minimum over the local coordinates.
    pub fn ord_at(&self, p: &Point) -> Order {
        let (coords, at) = match p {
            Point::Infinity => (&self.w_coords, Point::zero()),
            _ => (&self.z_coords, p.clone()),
        };
        coords.iter().map(|c| c.ord_at(&at)).min().unwrap_or(Order::Infinite)
    }

    /// Every point with nonzero order. Candidates are `0`, `inf` and the
    /// roots over `Q(i)` of the coordinates' numerators and denominators.
    pub fn ledger(&self) -> BTreeMap<Point, i64> {
        let mut candidates = vec![Point::zero(), Point::Infinity];
        for c in &self.z_coords {
            for p in [c.numerator(), c.denominator()] {
                if p.is_zero() {
                    continue;
                }
                if let Ok(roots) = p.split_z_power().1.roots() {
                    candidates.extend(roots.into_iter().map(|(r, _)| Point::Finite(r)));
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        candidates
            .into_iter()
            .filter_map(|p| match self.ord_at(&p).finite() {
                Some(0) | None => None,
                Some(k) => Some((p, k)),
            })
            .collect()
    }

    /// Degree of the line bundle this section trivializes generically.
    pub fn degree(&self) -> i64 {
        self.ledger().values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedComponent {
    pub weight: i64,
    pub degree: i64,
    pub ledger: BTreeMap<Point, i64>,
}

/// A noncommutative polynomial in basis sections of one chart.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WordExpr {
    pub terms: BTreeMap<Vec<usize>, RationalFunction>,
}

impl WordExpr {
    fn linear(coords: &[RationalFunction]) -> Self {
        let terms = coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (vec![i], c.clone()))
            .collect();
        Self { terms }
    }

    fn add(&self, other: &WordExpr) -> WordExpr {
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            let sum = terms.get(w).cloned().unwrap_or_else(RationalFunction::zero) + c.clone();
            if sum.is_zero() {
                terms.remove(w);
            } else {
                terms.insert(w.clone(), sum);
            }
        }
        WordExpr { terms }
    }

    fn mul(&self, other: &WordExpr) -> WordExpr {
        let mut out = WordExpr::default();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let w: Vec<usize> = w1.iter().chain(w2).copied().collect();
                out = out.add(&WordExpr { terms: [(w, c1 * c2)].into() });
            }
        }
        out
    }

    fn scale(&self, c: i64) -> WordExpr {
        WordExpr { terms: self.terms.iter().map(|(w, x)| (w.clone(), x.scale(&GaussianRational::from_int(c)))).collect() }
    }

    /// Minimum order of the coefficients at a chart point.
    pub fn ord_at(&self, p: &Point) -> Order {
        self.terms.values().map(|c| c.ord_at(p)).min().unwrap_or(Order::Infinite)
    }
}

/// The Casimir `C = H^2 + 2H + 4YX = H^2 - 2H + 4XY` expanded in the basis
/// sections of each chart.
#[derive(Debug, Clone, PartialEq)]
pub struct CasimirSection {
    pub yx_z: WordExpr,
    pub yx_w: WordExpr,
    pub xy_z: WordExpr,
    pub xy_w: WordExpr,
    pub ord_zero: Order,
    pub ord_inf: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sl2ContractionPair {
    pub family: TwoChartFamily,
    pub x: RationalSection,
    pub h: RationalSection,
    pub y: RationalSection,
    /// `g_2`, `g_0`, `g_-2` with degrees recomputed from the sections.
    pub components: [GradedComponent; 3],
    pub casimir: CasimirSection,
}

fn casimir_in(h: &[RationalFunction], x: &[RationalFunction], y: &[RationalFunction], ordering: Ordering) -> WordExpr {
    let (h, x, y) = (WordExpr::linear(h), WordExpr::linear(x), WordExpr::linear(y));
    let h2 = h.mul(&h);
    match ordering {
        Ordering::YX => h2.add(&h.scale(2)).add(&y.mul(&x).scale(4)),
        Ordering::XY => h2.add(&h.scale(-2)).add(&x.mul(&y).scale(4)),
    }
}

impl Sl2ContractionPair {
    /// Bracket of two sections, computed in the `z`-chart.
    pub fn bracket(&self, s: &RationalSection, t: &RationalSection) -> RationalSection {
        let z = self.family.z_chart.algebra().bracket(&s.z_coords, &t.z_coords);
        RationalSection::from_z_coords(&self.family, z)
    }

    pub fn scaled(&self, s: &RationalSection, c: i64) -> RationalSection {
        let f = RationalFunction::from_int(c);
        RationalSection::from_z_coords(&self.family, s.z_coords.iter().map(|x| x * &f).collect())
    }

    /// Checks every defining property; called at construction.
    pub fn verify(&self) -> Result<(), String> {
        self.family.verify()?;
        let rels = [
            (self.bracket(&self.h, &self.x), self.scaled(&self.x, 2), "[H, X] = 2X"),
            (self.bracket(&self.h, &self.y), self.scaled(&self.y, -2), "[H, Y] = -2Y"),
            (self.bracket(&self.x, &self.y), self.h.clone(), "[X, Y] = H"),
        ];
        for (lhs, rhs, name) in rels {
            if lhs != rhs {
                return Err(format!("{name} fails"));
            }
        }
        let declared = [(2, -1), (0, 0), (-2, -1)];
        for (c, (w, d)) in self.components.iter().zip(declared) {
            if (c.weight, c.degree) != (w, d) {
                return Err(format!("component of weight {w} has degree {}", c.degree));
            }
        }
        let c = &self.casimir;
        if c.xy_z.ord_at(&Point::zero()) != c.ord_zero || c.xy_w.ord_at(&Point::zero()) != c.ord_inf {
            return Err("the two Casimir orderings have different orders".into());
        }
        Ok(())
    }
}

/// The contraction family of `(sl(2), diag(1, -1, -1))` over the projective
/// line, with its canonical sections and Casimir.
pub fn build_sl2_contraction() -> Sl2ContractionPair {
    let family = contraction_family_projective(&LieAlgebra::sl2(), &Involution::diagonal(&[1, -1, -1]))
        .expect("sl2 with a diagonal involution");
    let (one, zero) = (RationalFunction::from_int(1), RationalFunction::zero());
    let h = RationalSection::from_z_coords(&family, vec![one.clone(), zero.clone(), zero.clone()]);
    let x = RationalSection::from_z_coords(&family, vec![zero.clone(), one, zero.clone()]);
    let y = RationalSection::from_z_coords(&family, vec![zero.clone(), zero, RationalFunction::z_pow(-1)]);
    let component = |weight, s: &RationalSection| GradedComponent { weight, degree: s.degree(), ledger: s.ledger() };
    let components = [component(2, &x), component(0, &h), component(-2, &y)];
    let expr = |chart_w: bool, ordering| {
        let pick = |s: &RationalSection| if chart_w { s.w_coords.clone() } else { s.z_coords.clone() };
        casimir_in(&pick(&h), &pick(&x), &pick(&y), ordering)
    };
    let (yx_z, yx_w) = (expr(false, Ordering::YX), expr(true, Ordering::YX));
    let (xy_z, xy_w) = (expr(false, Ordering::XY), expr(true, Ordering::XY));
    let ord_zero = yx_z.ord_at(&Point::zero());
    let ord_inf = yx_w.ord_at(&Point::zero());
    let casimir = CasimirSection { yx_z, yx_w, xy_z, xy_w, ord_zero, ord_inf };
    let pair = Sl2ContractionPair { family, x, h, y, components, casimir };
    if let Err(e) = pair.verify() {
        panic!("contraction pair failed its own checks: {e}");
    }
    pair
}

/// Weight of a homogeneous section under `ad H`.
pub fn weight_of_section(pair: &Sl2ContractionPair, s: &RationalSection) -> Result<i64, Sl2Error> {
    if s.is_zero() {
        return Err(Sl2Error::NotHomogeneous);
    }
    let hs = pair.bracket(&pair.h, s);
    [2, 0, -2]
        .into_iter()
        .find(|&n| pair.scaled(s, n) == hs)
        .ok_or(Sl2Error::NotHomogeneous)
}

/// The function by which the Casimir acts on `f_n`. The ordering `YX` is
/// used unless `n` is a lowest weight, where `XY` applies.
pub fn casimir_acting_function(m: &HCModuleFamily, n: i64) -> Result<RationalFunction, HcError> {
    let ordering = if m.weights.contains(n - 2) || !m.weights.contains(n) { Ordering::YX } else { Ordering::XY };
    Ok(m.acting_function(n, ordering)?.into())
}

#[derive(Serialize)]
struct PairSummary<'a> {
    z_chart: &'a crate::liefam::LieFamily,
    w_chart: &'a crate::liefam::LieFamily,
    gluing: Vec<Vec<RationalFunction>>,
    components: &'a [GradedComponent; 3],
    casimir_ord: BTreeMap<Point, String>,
}

impl Serialize for Sl2ContractionPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PairSummary {
            z_chart: &self.family.z_chart,
            w_chart: &self.family.w_chart,
            gluing: self.family.gluing.matrix.to_rows(),
            components: &self.components,
            casimir_ord: [(Point::zero(), self.casimir.ord_zero.to_string()), (Point::Infinity, self.casimir.ord_inf.to_string())].into(),
        }
        .serialize(serializer)
    }
}
