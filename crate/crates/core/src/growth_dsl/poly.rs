//! Exact rational polynomials in the grading index `q`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational used for every symbolic coefficient.
pub type Rational = Ratio<i128>;

/// Grades `0..=SIGN_WINDOW` are checked exhaustively; beyond the window the
/// sign is read off the leading coefficient when a root bound allows it.
pub const SIGN_WINDOW: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(value: &Rational) -> Sign {
        match value.cmp(&Rational::zero()) {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }
}

/// A grade at which a symbolic statement is evaluated: a concrete `q` inside
/// the exhaustive window, or the whole tail `q > SIGN_WINDOW`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradePoint {
    At(u64),
    Tail,
}

impl GradePoint {
    /// Every point needed to cover all of `q ∈ ℕ₀`.
    pub fn all() -> impl Iterator<Item = GradePoint> {
        (0..=SIGN_WINDOW).map(GradePoint::At).chain(std::iter::once(GradePoint::Tail))
    }

    /// A concrete representative grade. For the tail this is the first grade
    /// past the window, where the tail sign is already in force.
    pub fn representative(self) -> u64 {
        match self {
            GradePoint::At(q) => q,
            GradePoint::Tail => SIGN_WINDOW + 1,
        }
    }
}

/// Polynomial `Σ c_i q^i` with rational coefficients, lowest degree first.
/// Trailing zeros are always trimmed, so the zero polynomial has no
/// coefficients and structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoefficientPoly {
    coefficients: Vec<Rational>,
}

impl CoefficientPoly {
    pub fn new(coefficients: Vec<Rational>) -> Self {
        let mut p = CoefficientPoly { coefficients };
        p.trim();
        p
    }

    pub fn zero() -> Self {
        CoefficientPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        CoefficientPoly::new(vec![c])
    }

    pub fn from_ints(coefficients: &[i64]) -> Self {
        CoefficientPoly::new(coefficients.iter().map(|&c| Rational::from_integer(c as i128)).collect())
    }

    /// The polynomial `q`.
    pub fn q() -> Self {
        CoefficientPoly::from_ints(&[0, 1])
    }

    /// `q^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        CoefficientPoly::new(c)
    }

    fn trim(&mut self) {
        while self.coefficients.last().is_some_and(|c| c.is_zero()) {
            self.coefficients.pop();
        }
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree ≤ 0, including the zero polynomial.
    pub fn is_constant(&self) -> bool {
        self.coefficients.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coefficients.last()
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficients.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * q + c)
    }

    pub fn eval_at(&self, q: u64) -> Rational {
        self.eval(&Rational::from_integer(q as i128))
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * q + rational_to_f64(c))
    }

    pub fn scale(&self, k: &Rational) -> Self {
        CoefficientPoly::new(self.coefficients.iter().map(|c| c * k).collect())
    }

    /// `p(a·q + b)`.
    pub fn compose_affine(&self, a: u64, b: u64) -> Self {
        let lin = CoefficientPoly::new(vec![
            Rational::from_integer(b as i128),
            Rational::from_integer(a as i128),
        ]);
        let mut out = CoefficientPoly::zero();
        for c in self.coefficients.iter().rev() {
            out = &(&out * &lin) + &CoefficientPoly::constant(*c);
        }
        out
    }

    /// `p(q+1) − p(q)`.
    pub fn forward_difference(&self) -> Self {
        &self.compose_affine(1, 1) - self
    }

    /// Cauchy bound `1 + max |c_i / c_n|`; every real root has modulus at
    /// most this value.
    pub fn cauchy_root_bound(&self) -> Option<Rational> {
        let lead = self.leading()?;
        let n = self.coefficients.len() - 1;
        let m = self.coefficients[..n]
            .iter()
            .map(|c| (c / lead).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        Some(m + Rational::one())
    }

    /// Sign for all sufficiently large `q`.
    pub fn eventual_sign(&self) -> Sign {
        self.leading().map(Sign::of).unwrap_or(Sign::Zero)
    }

    /// Sign uniform over every grade past the window, if it can be certified.
    pub fn tail_sign(&self) -> Option<Sign> {
        let Some(bound) = self.cauchy_root_bound() else {
            return Some(Sign::Zero);
        };
        if bound < Rational::from_integer(SIGN_WINDOW as i128 + 1) {
            Some(self.eventual_sign())
        } else {
            None
        }
    }

    pub fn sign_at(&self, point: GradePoint) -> Option<Sign> {
        match point {
            GradePoint::At(q) => Some(Sign::of(&self.eval_at(q))),
            GradePoint::Tail => self.tail_sign(),
        }
    }

    /// `Some(true)` when `p(q) ≤ 0` for all `q ∈ ℕ₀`, `Some(false)` when some
    /// grade is positive, `None` when a sign change past the window cannot
    /// be excluded.
    pub fn nonpositive_everywhere(&self) -> Option<bool> {
        self.holds_everywhere(|s| s != Sign::Positive)
    }

    pub fn nonnegative_everywhere(&self) -> Option<bool> {
        self.holds_everywhere(|s| s != Sign::Negative)
    }

    fn holds_everywhere(&self, ok: impl Fn(Sign) -> bool) -> Option<bool> {
        if (0..=SIGN_WINDOW).any(|q| !ok(Sign::of(&self.eval_at(q)))) {
            return Some(false);
        }
        if !ok(self.eventual_sign()) {
            return Some(false);
        }
        self.tail_sign().map(ok)
    }
}

impl std::ops::Add for &CoefficientPoly {
    type Output = CoefficientPoly;
    fn add(self, rhs: &CoefficientPoly) -> CoefficientPoly {
        let n = self.coefficients.len().max(rhs.coefficients.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coefficients.get(i).cloned().unwrap_or_else(Rational::zero);
                let b = rhs.coefficients.get(i).cloned().unwrap_or_else(Rational::zero);
                a + b
            })
            .collect();
        CoefficientPoly::new(c)
    }
}

impl std::ops::Neg for &CoefficientPoly {
    type Output = CoefficientPoly;
    fn neg(self) -> CoefficientPoly {
        CoefficientPoly::new(self.coefficients.iter().map(|c| -c).collect())
    }
}

impl std::ops::Sub for &CoefficientPoly {
    type Output = CoefficientPoly;
    fn sub(self, rhs: &CoefficientPoly) -> CoefficientPoly {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &CoefficientPoly {
    type Output = CoefficientPoly;
    fn mul(self, rhs: &CoefficientPoly) -> CoefficientPoly {
        if self.is_zero() || rhs.is_zero() {
            return CoefficientPoly::zero();
        }
        let mut c = vec![Rational::zero(); self.coefficients.len() + rhs.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (k, b) in rhs.coefficients.iter().enumerate() {
                c[i + k] += a * b;
            }
        }
        CoefficientPoly::new(c)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Prints in the DSL's coefficient syntax, e.g. `(2*q^2 - 1/2*q + 3)`.
/// Single-monomial polynomials are printed without parentheses.
impl fmt::Display for CoefficientPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<(bool, String)> = self
            .coefficients
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mag = fmt_rational(&c.abs());
                let body = match (i, mag.as_str()) {
                    (0, _) => mag,
                    (1, "1") => "q".to_string(),
                    (1, _) => format!("{mag}*q"),
                    (_, "1") => format!("q^{i}"),
                    _ => format!("{mag}*q^{i}"),
                };
                (c.is_negative(), body)
            })
            .collect();
        let mut s = String::new();
        for (k, (neg, body)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(body);
        }
        if parts.len() > 1 {
            write!(f, "({s})")
        } else {
            write!(f, "{s}")
        }
    }
}
