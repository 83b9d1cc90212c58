//! Rational functions on the projective line, in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, GaussianRational, LaurentPoly};

/// A point of the projective line, in the affine coordinate `z`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Point {
    Finite(GaussianRational),
    Infinity,
}

impl Point {
    pub fn zero() -> Self {
        Point::Finite(GaussianRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Point::Finite(GaussianRational::from_int(n))
    }

    pub fn is_boundary(&self) -> bool {
        match self {
            Point::Finite(a) => a.is_zero(),
            Point::Infinity => true,
        }
    }

    /// The same point in the coordinate `w = 1/z`.
    pub fn inverted(&self) -> Point {
        match self {
            Point::Finite(a) if a.is_zero() => Point::Infinity,
            Point::Finite(a) => Point::Finite(a.inv().unwrap()),
            Point::Infinity => Point::zero(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(a) => write!(f, "{a}"),
            Point::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Point {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "oo" => Ok(Point::Infinity),
            other => Ok(Point::Finite(other.parse()?)),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Vanishing order at a point; `Infinite` is the order of the zero function.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Order {
    Finite(i64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => a.cmp(b),
            (Order::Finite(_), Order::Infinite) => Ordering::Less,
            (Order::Infinite, Order::Finite(_)) => Ordering::Greater,
            (Order::Infinite, Order::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("+inf"),
        }
    }
}

/// A rational function `z^k P(z) / Q(z)` over `Q(i)`.
///
/// Canonical form: `Q` is a monic ordinary polynomial with `Q(0) != 0`, the
/// numerator carries every power of `z` (so it may be a Laurent polynomial),
/// and `gcd(P, Q) = 1`. Two rational functions are equal iff their canonical
/// forms are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl RationalFunction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (kn, p) = num.split_z_power();
        let (kd, q) = den.split_z_power();
        let g = p.gcd(&q);
        let (p, _) = p.div_rem(&g);
        let (q, _) = q.div_rem(&g);
        let lc = q.leading_coeff().inv().unwrap();
        Ok(Self { num: p.scale(&lc).shift(kn - kd), den: q.scale(&lc) })
    }

    /// `z^exp`.
    pub fn z_pow(exp: i64) -> Self {
        LaurentPoly::z_pow(exp).into()
    }

    pub fn z() -> Self {
        Self::z_pow(1)
    }

    pub fn constant(c: GaussianRational) -> Self {
        LaurentPoly::constant(c).into()
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_laurent(&self) -> Option<&LaurentPoly> {
        self.is_laurent().then_some(&self.num)
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_laurent() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()).unwrap())
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        Self { num: base.num.pow(e.unsigned_abs() as u32), den: base.den.pow(e.unsigned_abs() as u32) }
    }

    /// Vanishing order at `p`; negative for poles.
    pub fn ord_at(&self, p: &Point) -> Order {
        if self.is_zero() {
            return Order::Infinite;
        }
        let n = match p {
            Point::Finite(a) if a.is_zero() => self.num.min_exp().unwrap(),
            Point::Finite(a) => {
                let (_, poly) = self.num.split_z_power();
                poly.root_multiplicity(a) as i64 - self.den.root_multiplicity(a) as i64
            }
            Point::Infinity => self.den.degree().unwrap() - self.num.max_exp().unwrap(),
        };
        Order::Finite(n)
    }

    /// Exact value at a finite point.
    pub fn eval(&self, z0: &GaussianRational) -> Result<GaussianRational, ExactError> {
        let d = self.den.eval(z0)?;
        if d.is_zero() {
            return Err(ExactError::PoleAtPoint(z0.to_string()));
        }
        Ok(&self.num.eval(z0)? / &d)
    }

    /// Value at any point of the projective line, including `inf`.
    pub fn value_at(&self, p: &Point) -> Result<GaussianRational, ExactError> {
        match p {
            Point::Finite(a) => self.eval(a),
            Point::Infinity => match self.ord_at(p) {
                Order::Infinite => Ok(GaussianRational::zero()),
                Order::Finite(n) if n > 0 => Ok(GaussianRational::zero()),
                Order::Finite(0) => Ok(&self.num.leading_coeff() / &self.den.leading_coeff()),
                Order::Finite(_) => Err(ExactError::PoleAtPoint("inf".into())),
            },
        }
    }

    /// Substitute `z -> 1/z`.
    pub fn invert_variable(&self) -> Self {
        let num = self.num.invert_variable();
        let den = self.den.invert_variable();
        Self::new(num, den).unwrap()
    }

    /// The composite `f(psi(z))`.
    pub fn compose(&self, psi: &RationalFunction) -> Result<Self, ExactError> {
        let eval_laurent = |p: &LaurentPoly| -> Result<RationalFunction, ExactError> {
            let mut acc = RationalFunction::zero();
            for (e, c) in p.terms() {
                if e < 0 && psi.is_zero() {
                    return Err(ExactError::PoleAtPoint("0".into()));
                }
                acc = &acc + &psi.pow(e).scale(c);
            }
            Ok(acc)
        };
        let num = eval_laurent(&self.num)?;
        let den = eval_laurent(&self.den)?;
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(&num / &den)
    }

    /// Conjugate every coefficient (the real structure `z -> conj(z)` on functions).
    pub fn conj_coeffs(&self) -> Self {
        Self { num: self.num.conj_coeffs(), den: self.den.conj_coeffs() }
    }
}

impl Zero for RationalFunction {
    fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFunction {
    fn one() -> Self {
        Self { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }
}

impl From<LaurentPoly> for RationalFunction {
    fn from(p: LaurentPoly) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }
}

impl From<GaussianRational> for RationalFunction {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        RationalFunction::new(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
            .unwrap()
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.is_laurent() && rhs.is_laurent() {
            return RationalFunction { num: &self.num * &rhs.num, den: LaurentPoly::one() };
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self * &rhs.inv().expect("division by the zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

super::gaussian::forward_owned_binop!(RationalFunction, Add, add);
super::gaussian::forward_owned_binop!(RationalFunction, Sub, sub);
super::gaussian::forward_owned_binop!(RationalFunction, Mul, mul);
super::gaussian::forward_owned_binop!(RationalFunction, Div, div);

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_laurent() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionRepr {
    num: LaurentPoly,
    den: LaurentPoly,
}

/// Serialized as `{"num": {..}, "den": {..}}` in canonical form.
impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RationalFunctionRepr { num: self.num.clone(), den: self.den.clone() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RationalFunctionRepr::deserialize(deserializer)?;
        RationalFunction::new(repr.num, repr.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn poly(c: &[i64]) -> LaurentPoly {
        LaurentPoly::from_ints(c)
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn canonical_form() {
        // (z^2 - 1) / (2z + 2) = (z - 1)/2
        let f = rf(&[-1, 0, 1], &[2, 2]);
        assert!(f.is_laurent());
        assert_eq!(f, RationalFunction::from(poly(&[-1, 1]).scale(&g("1/2"))));
        // z / (z^2) = z^-1 carried in the numerator
        let f = rf(&[0, 1], &[0, 0, 1]);
        assert_eq!(f.numerator(), &LaurentPoly::z_pow(-1));
        assert_eq!(f.denominator(), &LaurentPoly::one());
        assert!(RationalFunction::new(poly(&[1]), LaurentPoly::zero()).is_err());
    }

    #[test]
    fn ord_at_examples() {
        let f: RationalFunction = LaurentPoly::from_terms([(-1, g("3")), (0, g("1"))]).into();
        assert_eq!(f.ord_at(&Point::zero()), Order::Finite(-1));
        let f: RationalFunction = poly(&[0, 2, 1]).into();
        assert_eq!(f.ord_at(&Point::Infinity), Order::Finite(-2));
        // (z-1)^2 / z
        let f = rf(&[1, -2, 1], &[0, 1]);
        assert_eq!(f.ord_at(&Point::int(1)), Order::Finite(2));
        assert_eq!(f.ord_at(&Point::zero()), Order::Finite(-1));
        assert_eq!(f.ord_at(&Point::Infinity), Order::Finite(-1));
        assert_eq!(RationalFunction::zero().ord_at(&Point::int(3)), Order::Infinite);
    }

    #[test]
    fn evaluate_examples() {
        let f = rf(&[1, 0, 1], &[0, 1]);
        assert_eq!(f.eval(&GaussianRational::i()).unwrap(), g("0"));
        assert_eq!(RationalFunction::z_pow(-1).eval(&g("2")).unwrap(), g("1/2"));
        let f = rf(&[1], &[-1, 1]);
        assert!(matches!(f.eval(&g("1")), Err(ExactError::PoleAtPoint(_))));
        assert_eq!(rf(&[1, 3], &[2, 1]).value_at(&Point::Infinity).unwrap(), g("3"));
    }

    #[test]
    fn composition_and_inversion() {
        let f = rf(&[1], &[-1, 1]); // 1/(z-1)
        let sq: RationalFunction = poly(&[0, 0, 1]).into();
        assert_eq!(f.compose(&sq).unwrap(), rf(&[1], &[-1, 0, 1]));
        assert_eq!(f.invert_variable().invert_variable(), f);
        assert_eq!(RationalFunction::z().invert_variable(), RationalFunction::z_pow(-1));
    }

    #[test]
    fn json_round_trip() {
        let f = rf(&[0, 3, 1], &[5, 1]).scale(&g("1/2+1*i"));
        let s = serde_json::to_string(&f).unwrap();
        let back: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
