//! Laurent polynomials in one variable over `Q(i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, GaussianRational, Order};

/// A finite sum `sum_e c_e z^e` with `e` in `Z`.
///
/// Zero coefficients are never stored, so the empty map is the zero polynomial
/// and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, GaussianRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: GaussianRational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Self::monomial(GaussianRational::one(), 1)
    }

    /// `z^exp`.
    pub fn z_pow(exp: i64) -> Self {
        Self::monomial(GaussianRational::one(), exp)
    }

    /// Builds from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, GaussianRational)>,
    {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, &c);
        }
        out
    }

    /// Polynomial with integer coefficients, lowest degree first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_terms(
            coeffs.iter().enumerate().map(|(e, &c)| (e as i64, GaussianRational::from_int(c))),
        )
    }

    fn add_term(&mut self, exp: i64, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussianRational)> + '_ {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> GaussianRational {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of the highest power present.
    pub fn leading_coeff(&self) -> GaussianRational {
        self.terms.values().next_back().cloned().unwrap_or_default()
    }

    /// Coefficient of the lowest power present.
    pub fn trailing_coeff(&self) -> GaussianRational {
        self.terms.values().next().cloned().unwrap_or_default()
    }

    /// True when no negative powers occur (the zero polynomial included).
    pub fn is_polynomial(&self) -> bool {
        self.min_exp().map_or(true, |e| e >= 0)
    }

    /// Degree as an ordinary polynomial, `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        self.max_exp()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        self.is_constant().then(|| self.coeff(0))
    }

    pub fn ord0(&self) -> Order {
        self.min_exp().map_or(Order::Infinite, Order::Finite)
    }

    pub fn ord_inf(&self) -> Order {
        self.max_exp().map_or(Order::Infinite, |e| Order::Finite(-e))
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&e, a)| (e, a * c)).collect() }
    }

    /// Substitute `z -> 1/z`.
    pub fn invert_variable(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect() }
    }

    /// Complex-conjugate every coefficient.
    pub fn conj_coeffs(&self) -> Self {
        Self { terms: self.terms.iter().map(|(&e, c)| (e, c.conj())).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact value at `z0`.
    pub fn eval(&self, z0: &GaussianRational) -> Result<GaussianRational, ExactError> {
        if z0.is_zero() {
            return match self.min_exp() {
                Some(e) if e < 0 => Err(ExactError::PoleAtPoint(z0.to_string())),
                _ => Ok(self.coeff(0)),
            };
        }
        let inv = z0.inv().expect("nonzero");
        let mut acc = GaussianRational::zero();
        for (&e, c) in &self.terms {
            let p = if e >= 0 { z0.pow(e as u32) } else { inv.pow((-e) as u32) };
            acc += &(c * &p);
        }
        Ok(acc)
    }

    /// Splits off the largest power of `z`: returns `(k, p)` with
    /// `self = z^k p` and `p(0) != 0`. Zero maps to `(0, 0)`.
    pub fn split_z_power(&self) -> (i64, LaurentPoly) {
        match self.min_exp() {
            Some(k) => (k, self.shift(-k)),
            None => (0, Self::zero()),
        }
    }

    /// Dense coefficients `[c_0, c_1, ..]`; only valid for polynomials.
    pub(crate) fn to_dense(&self) -> Vec<GaussianRational> {
        debug_assert!(self.is_polynomial());
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        (0..=deg).map(|e| self.coeff(e)).collect()
    }

    pub(crate) fn from_dense(coeffs: Vec<GaussianRational>) -> Self {
        Self::from_terms(coeffs.into_iter().enumerate().map(|(e, c)| (e as i64, c)))
    }

    /// Polynomial long division; both operands must be polynomials.
    pub fn div_rem(&self, divisor: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
        assert!(self.is_polynomial() && divisor.is_polynomial());
        let d = divisor.to_dense();
        assert!(!d.is_empty(), "polynomial division by zero");
        let lead_inv = d.last().unwrap().inv().unwrap();
        let mut rem = self.to_dense();
        let mut quot = vec![GaussianRational::zero(); rem.len().saturating_sub(d.len() - 1)];
        while rem.len() >= d.len() {
            let shift = rem.len() - d.len();
            let factor = rem.last().unwrap() * &lead_inv;
            if !factor.is_zero() {
                for (k, dc) in d.iter().enumerate() {
                    rem[shift + k] -= &(&factor * dc);
                }
                quot[shift] = factor;
            }
            rem.pop();
        }
        (Self::from_dense(quot), Self::from_dense(rem))
    }

    /// Monic greatest common divisor of two polynomials.
    pub fn gcd(&self, other: &LaurentPoly) -> LaurentPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading_coeff().inv().unwrap();
        a.scale(&lc)
    }

    /// Multiplicity of `a` as a root. `self` must be a nonzero polynomial.
    pub fn root_multiplicity(&self, a: &GaussianRational) -> u32 {
        let linear = LaurentPoly::from_terms([(1, GaussianRational::one()), (0, -a)]);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_rem(&linear);
            if !r.is_zero() || p.is_zero() {
                return m;
            }
            p = q;
            m += 1;
        }
    }

    /// The roots in `Q(i)` of a nonzero polynomial, with multiplicities.
    ///
    /// Powers of `z` contribute the root `0`; the remaining factor must have
    /// degree at most two. A quadratic without roots in `Q(i)`, or any higher
    /// degree remainder, is reported as unsplit.
    pub fn roots(&self) -> Result<Vec<(GaussianRational, u32)>, ExactError> {
        assert!(self.is_polynomial() && !self.is_zero());
        let (k, rest) = self.split_z_power();
        let mut roots = Vec::new();
        if k > 0 {
            roots.push((GaussianRational::zero(), k as u32));
        }
        let c = rest.to_dense();
        match c.len() {
            1 => {}
            2 => roots.push((-(&c[0] / &c[1]), 1)),
            3 => {
                let two = GaussianRational::from_int(2);
                let four = GaussianRational::from_int(4);
                let disc = &(&c[1] * &c[1]) - &(&four * &(&c[0] * &c[2]));
                let s = disc.sqrt().ok_or_else(|| ExactError::Unsplit(rest.to_string()))?;
                let denom = &two * &c[2];
                let r1 = &(&-c[1].clone() + &s) / &denom;
                let r2 = &(&-c[1].clone() - &s) / &denom;
                if r1 == r2 {
                    roots.push((r1, 2));
                } else {
                    roots.push((r1, 1));
                    roots.push((r2, 1));
                }
            }
            _ => return Err(ExactError::Unsplit(rest.to_string())),
        }
        roots.sort();
        Ok(roots)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (&e, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            let coeff = if c.is_real() { c.to_string() } else { format!("({c})") };
            match e {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}*z")?,
                _ => write!(f, "{coeff}*z^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a JSON object mapping exponent strings to scalar strings.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> =
            self.terms.iter().map(|(e, c)| (e.to_string(), c.to_string())).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, GaussianRational>::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(map.len());
        for (e, c) in map {
            let e: i64 = e.parse().map_err(|_| D::Error::custom(format!("bad exponent {e:?}")))?;
            terms.push((e, c));
        }
        Ok(Self::from_terms(terms))
    }
}

impl From<GaussianRational> for LaurentPoly {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, &-c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

super::gaussian::forward_owned_binop!(LaurentPoly, Add, add);
super::gaussian::forward_owned_binop!(LaurentPoly, Sub, sub);
super::gaussian::forward_owned_binop!(LaurentPoly, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn orders_at_zero_and_infinity() {
        // z^-1 (3 + z) = 3 z^-1 + 1
        let f = LaurentPoly::from_terms([(-1, g("3")), (0, g("1"))]);
        assert_eq!(f.ord0(), Order::Finite(-1));
        let p = LaurentPoly::from_ints(&[0, 2, 1]);
        assert_eq!(p.ord_inf(), Order::Finite(-2));
        assert_eq!(LaurentPoly::zero().ord0(), Order::Infinite);
    }

    #[test]
    fn evaluation() {
        let f = LaurentPoly::from_terms([(1, g("1")), (-1, g("1"))]);
        assert_eq!(f.eval(&GaussianRational::i()).unwrap(), g("0"));
        assert!(f.eval(&g("0")).is_err());
        assert_eq!(LaurentPoly::z_pow(-1).eval(&g("2")).unwrap(), g("1/2"));
    }

    #[test]
    fn division_and_gcd() {
        let a = LaurentPoly::from_ints(&[-1, 0, 1]); // z^2 - 1
        let b = LaurentPoly::from_ints(&[1, 1]); // z + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, LaurentPoly::from_ints(&[-1, 1]));
        assert!(r.is_zero());
        let c = LaurentPoly::from_ints(&[2, 2]);
        assert_eq!(a.gcd(&c), b);
    }

    #[test]
    fn roots_over_gaussian_rationals() {
        let p = LaurentPoly::from_ints(&[1, 0, 1]);
        assert_eq!(p.roots().unwrap(), vec![(g("-1*i"), 1), (g("1*i"), 1)]);
        let p = LaurentPoly::from_ints(&[0, 0, 1, -2, 1]); // z^2 (z-1)^2
        assert_eq!(p.roots().unwrap(), vec![(g("0"), 2), (g("1"), 2)]);
        assert!(LaurentPoly::from_ints(&[-2, 0, 1]).roots().is_err());
        assert_eq!(LaurentPoly::from_ints(&[1, -2, 1]).root_multiplicity(&g("1")), 2);
    }

    #[test]
    fn json_round_trip() {
        let f = LaurentPoly::from_terms([(-1, g("3/2")), (2, g("1-1*i"))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"-1":"3/2","2":"1-1*i"}"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
