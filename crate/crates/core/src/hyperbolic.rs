//! Upper half-plane primitives: points, Möbius action, `2 cosh d`, areas.
//!
//! Distances are carried around as `2 cosh d` rather than `d`. For points
//! with rational coordinates that value is rational, so equality of
//! distances can be decided exactly; `d` itself is only produced on demand.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, ParseError, Result};
use crate::exact::{self, ExactKey, Rational};
use crate::group::ModularElement;

/// Relative tolerance for comparing floating `2 cosh d` values.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// `FLOAT_TOLERANCE * max(1, |value|)`.
pub fn tolerance(value: f64) -> f64 {
    FLOAT_TOLERANCE * value.abs().max(1.0)
}

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Debug, PartialEq)]
pub enum UHPoint {
    Exact { x: Rational, y: Rational },
    Float { x: f64, y: f64 },
}

impl UHPoint {
    pub fn exact(x: Rational, y: Rational) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::NotInUpperHalfPlane(exact::format_rational(&y)));
        }
        Ok(UHPoint::Exact { x, y })
    }

    pub fn float(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(Error::NotInUpperHalfPlane(y.to_string()));
        }
        Ok(UHPoint::Float { x, y })
    }

    /// `(xn/xd) + i (yn/yd)`; panics if the result is not in H².
    pub fn ratio(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Self::exact(exact::rat(xn, xd), exact::rat(yn, yd)).expect("point in upper half-plane")
    }

    /// `x + iy` with integer coordinates; panics unless `y > 0`.
    pub fn ints(x: i64, y: i64) -> Self {
        Self::ratio(x, 1, y, 1)
    }

    pub fn i() -> Self {
        Self::ints(0, 1)
    }

    /// The corner `(-1 + i√3)/2` of the standard domain (not rational).
    pub fn rho() -> Self {
        UHPoint::Float {
            x: -0.5,
            y: 3f64.sqrt() / 2.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, UHPoint::Exact { .. })
    }

    pub fn x_f64(&self) -> f64 {
        match self {
            UHPoint::Exact { x, .. } => exact::to_f64(x),
            UHPoint::Float { x, .. } => *x,
        }
    }

    pub fn y_f64(&self) -> f64 {
        match self {
            UHPoint::Exact { y, .. } => exact::to_f64(y),
            UHPoint::Float { y, .. } => *y,
        }
    }

    pub fn to_float(&self) -> UHPoint {
        UHPoint::Float {
            x: self.x_f64(),
            y: self.y_f64(),
        }
    }

    /// Exact coordinates, converting floats exactly (every finite `f64` is a
    /// dyadic rational).
    pub fn exact_coords(&self) -> (Rational, Rational) {
        match self {
            UHPoint::Exact { x, y } => (x.clone(), y.clone()),
            UHPoint::Float { x, y } => (
                exact::from_f64(*x).expect("finite coordinate"),
                exact::from_f64(*y).expect("finite coordinate"),
            ),
        }
    }
}

impl fmt::Display for UHPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UHPoint::Exact { x, y } => write!(
                f,
                "{},{}",
                exact::format_rational(x),
                exact::format_rational(y)
            ),
            UHPoint::Float { x, y } => write!(f, "{x:?},{y:?}"),
        }
    }
}

impl FromStr for UHPoint {
    type Err = Error;

    /// `x,y` where each coordinate is `p/q` or a decimal literal. Both are
    /// read exactly.
    fn from_str(s: &str) -> Result<Self> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| ParseError::Point(s.to_string()))?;
        let x = exact::parse_rational(x)?;
        let y = exact::parse_rational(y)?;
        UHPoint::exact(x, y)
    }
}

impl Serialize for UHPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// A real 2×2 matrix of determinant 1 acting by Möbius transformations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealMatrix2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RealMatrix2 {
    pub const IDENTITY: RealMatrix2 = RealMatrix2 {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det - 1.0).abs().le(&1e-12) {
            return Err(Error::InvalidArgument(format!(
                "determinant {det} is not 1"
            )));
        }
        Ok(RealMatrix2 { a, b, c, d })
    }

    pub fn inverse(&self) -> Self {
        RealMatrix2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, o: &Self) -> Self {
        RealMatrix2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

impl From<&ModularElement> for RealMatrix2 {
    fn from(g: &ModularElement) -> Self {
        RealMatrix2 {
            a: g.a as f64,
            b: g.b as f64,
            c: g.c as f64,
            d: g.d as f64,
        }
    }
}

/// `(az + b)/(cz + d)`. Exact points stay exact: the matrix entries are
/// converted to rationals without rounding.
pub fn mobius_apply(m: &RealMatrix2, z: &UHPoint) -> UHPoint {
    match z {
        UHPoint::Exact { x, y } => {
            let conv = |v: f64| exact::from_f64(v).expect("finite matrix entry");
            let (a, b, c, d) = (conv(m.a), conv(m.b), conv(m.c), conv(m.d));
            let det = &a * &d - &b * &c;
            apply_exact(&a, &b, &c, &d, &det, x, y)
        }
        UHPoint::Float { x, y } => {
            let (x, y) = (*x, *y);
            let cx = m.c * x + m.d;
            let den = cx * cx + m.c * m.c * y * y;
            let det = m.a * m.d - m.b * m.c;
            UHPoint::Float {
                x: ((m.a * x + m.b) * cx + m.a * m.c * y * y) / den,
                y: det * y / den,
            }
        }
    }
}

pub(crate) fn apply_exact(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    det: &Rational,
    x: &Rational,
    y: &Rational,
) -> UHPoint {
    let cx = c * x + d;
    let y2 = y * y;
    let den = &cx * &cx + c * c * &y2;
    let nx = (a * x + b) * &cx + a * c * &y2;
    UHPoint::Exact {
        x: nx / &den,
        y: det * y / den,
    }
}

/// A distance represented by its `2 cosh d` value.
#[derive(Clone, Debug)]
pub enum DistanceKey {
    Exact(ExactKey),
    Float(f64),
}

impl DistanceKey {
    pub fn two_cosh(&self) -> f64 {
        match self {
            DistanceKey::Exact(k) => k.to_f64(),
            DistanceKey::Float(v) => *v,
        }
    }

    pub fn cosh(&self) -> f64 {
        self.two_cosh() / 2.0
    }

    /// `d = arccosh(value / 2)`, clamped at 0 against rounding.
    pub fn distance(&self) -> f64 {
        self.cosh().max(1.0).acosh()
    }

    pub fn exact(&self) -> Option<&ExactKey> {
        match self {
            DistanceKey::Exact(k) => Some(k),
            DistanceKey::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DistanceKey::Exact(_))
    }

    /// True for a zero distance (`2 cosh d = 2`); floats use the tolerance.
    pub fn is_zero(&self) -> bool {
        match self {
            DistanceKey::Exact(ExactKey::Small { num, den }) => *num == 2 * *den,
            DistanceKey::Exact(k) => k.to_big() == exact::int(2),
            DistanceKey::Float(v) => (v - 2.0).abs() <= tolerance(*v),
        }
    }

    /// Exact equality for two exact keys, tolerance equality otherwise.
    pub fn same_distance(&self, other: &Self) -> bool {
        match (self, other) {
            (DistanceKey::Exact(a), DistanceKey::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.two_cosh(), other.two_cosh());
                (a - b).abs() <= tolerance(a.max(b))
            }
        }
    }
}

impl PartialEq for DistanceKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for DistanceKey {}

impl Ord for DistanceKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DistanceKey::Exact(a), DistanceKey::Exact(b)) => a.cmp(b),
            _ => self.two_cosh().total_cmp(&other.two_cosh()),
        }
    }
}

impl PartialOrd for DistanceKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DistanceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceKey::Exact(k) => write!(f, "{k}"),
            DistanceKey::Float(v) => write!(f, "{v:?}"),
        }
    }
}

impl Serialize for DistanceKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            two_cosh: f64,
            exact: Option<String>,
            distance: f64,
        }
        Repr {
            two_cosh: self.two_cosh(),
            exact: self.exact().map(|k| k.to_string()),
            distance: self.distance(),
        }
        .serialize(serializer)
    }
}

/// `2 cosh d(z1, z2) = 2 + ((x1 - x2)² + (y1 - y2)²) / (y1 y2)`; exact when
/// both points are exact.
pub fn cosh_distance(z1: &UHPoint, z2: &UHPoint) -> DistanceKey {
    match (z1, z2) {
        (UHPoint::Exact { x: x1, y: y1 }, UHPoint::Exact { x: x2, y: y2 }) => {
            let dx = x1 - x2;
            let dy = y1 - y2;
            let v = exact::int(2) + (&dx * &dx + &dy * &dy) / (y1 * y2);
            DistanceKey::Exact(ExactKey::from_big(v))
        }
        _ => DistanceKey::Float(two_cosh_f64(z1.x_f64(), z1.y_f64(), z2.x_f64(), z2.y_f64())),
    }
}

pub fn two_cosh_f64(x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let dx = x1 - x2;
    let dy = y1 - y2;
    2.0 + (dx * dx + dy * dy) / (y1 * y2)
}

/// Hyperbolic distance `d(z1, z2)`.
pub fn distance(z1: &UHPoint, z2: &UHPoint) -> f64 {
    cosh_distance(z1, z2).distance()
}

/// Area `2π(cosh R − 1)` of a hyperbolic disc of radius `R`.
pub fn disc_area(radius: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(Error::NegativeRadius(radius));
    }
    Ok(2.0 * PI * (radius.cosh() - 1.0))
}

/// Same as [`disc_area`] but from `cosh R`, which avoids an arccosh round trip.
pub fn disc_area_from_cosh(cosh_radius: f64) -> Result<f64> {
    if !(cosh_radius >= 1.0) {
        return Err(Error::Threshold(cosh_radius));
    }
    Ok(2.0 * PI * (cosh_radius - 1.0))
}

/// `cosh(a + b)` from `cosh a` and `cosh b`.
pub fn cosh_of_sum(cosh_a: f64, cosh_b: f64) -> f64 {
    let sinh = |c: f64| (c * c - 1.0).max(0.0).sqrt();
    cosh_a * cosh_b + sinh(cosh_a) * sinh(cosh_b)
}

/// A polygon vertex: a point of H², a point of the real line, or ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Vertex {
    Finite(f64, f64),
    Ideal(f64),
    Infinity,
}

impl Vertex {
    pub fn image(&self, m: &RealMatrix2) -> Vertex {
        match *self {
            Vertex::Finite(x, y) => {
                let p = mobius_apply(m, &UHPoint::Float { x, y });
                Vertex::Finite(p.x_f64(), p.y_f64())
            }
            Vertex::Ideal(r) => {
                let den = m.c * r + m.d;
                if den.abs() < 1e-300 {
                    Vertex::Infinity
                } else {
                    Vertex::Ideal((m.a * r + m.b) / den)
                }
            }
            Vertex::Infinity => {
                if m.c.abs() < 1e-300 {
                    Vertex::Infinity
                } else {
                    Vertex::Ideal(m.a / m.c)
                }
            }
        }
    }
}

/// Unit tangent at the finite point `(vx, vy)` of the geodesic running to `w`.
fn geodesic_tangent(vx: f64, vy: f64, w: Vertex) -> (f64, f64) {
    let (wx, wy) = match w {
        Vertex::Infinity => return (0.0, 1.0),
        Vertex::Finite(x, y) => (x, y),
        Vertex::Ideal(r) => (r, 0.0),
    };
    if (wx - vx).abs() <= 1e-14 * (1.0 + vx.abs()) {
        return (0.0, (wy - vy).signum());
    }
    let center = (vx * vx + vy * vy - wx * wx - wy * wy) / (2.0 * (vx - wx));
    let (mut tx, mut ty) = (-vy, vx - center);
    if tx * (wx - vx) + ty * (wy - vy) < 0.0 {
        tx = -tx;
        ty = -ty;
    }
    let n = (tx * tx + ty * ty).sqrt();
    (tx / n, ty / n)
}

/// Area of a geodesic polygon by Gauss–Bonnet: `(n − 2)π − Σ angles`, with
/// ideal vertices contributing angle 0. Vertices must be listed in order.
pub fn polygon_area(vertices: &[Vertex]) -> f64 {
    let n = vertices.len();
    let mut angle_sum = 0.0;
    for i in 0..n {
        if let Vertex::Finite(vx, vy) = vertices[i] {
            let prev = vertices[(i + n - 1) % n];
            let next = vertices[(i + 1) % n];
            let (ax, ay) = geodesic_tangent(vx, vy, prev);
            let (bx, by) = geodesic_tangent(vx, vy, next);
            angle_sum += (ax * bx + ay * by).clamp(-1.0, 1.0).acos();
        }
    }
    (n as f64 - 2.0) * PI - angle_sum
}

/// A point prepared for repeated evaluation of `2 cosh d(z, g w)`.
///
/// Keeps float coordinates plus, for exact points, an integer projective form
/// `x = X/D, y = Y/D` so the exact value can usually be computed in `i128`.
#[derive(Clone, Debug)]
pub struct PreparedPoint {
    pub x: f64,
    pub y: f64,
    small: Option<[i128; 3]>,
    big: Option<[BigInt; 3]>,
}

impl PreparedPoint {
    pub fn new(p: &UHPoint) -> Self {
        match p {
            UHPoint::Float { x, y } => PreparedPoint {
                x: *x,
                y: *y,
                small: None,
                big: None,
            },
            UHPoint::Exact { x, y } => {
                let den = x.denom().lcm(y.denom());
                let xn = x.numer() * (&den / x.denom());
                let yn = y.numer() * (&den / y.denom());
                let small = match (xn.to_i128(), yn.to_i128(), den.to_i128()) {
                    (Some(a), Some(b), Some(c)) => Some([a, b, c]),
                    _ => None,
                };
                PreparedPoint {
                    x: exact::to_f64(x),
                    y: exact::to_f64(y),
                    small,
                    big: Some([xn, yn, den]),
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.big.is_some()
    }

    /// `2 cosh d(self, g w)` in floating point.
    #[inline]
    pub fn two_cosh_f64(&self, g: &ModularElement, w: &PreparedPoint) -> f64 {
        let (a, b, c, d) = (g.a as f64, g.b as f64, g.c as f64, g.d as f64);
        let (x1, y1, x2, y2) = (self.x, self.y, w.x, w.y);
        let re = c * (x1 * x2 - y1 * y2) + d * x1 - a * x2 - b;
        let im = c * (x1 * y2 + y1 * x2) + d * y1 - a * y2;
        2.0 + (re * re + im * im) / (y1 * y2)
    }

    /// `2 cosh d(self, g w)`, exact when both points are exact.
    ///
    /// Uses `|z(cw + d) − (aw + b)|² / (Im z · Im w) = 2 cosh d(z, gw) − 2`.
    pub fn two_cosh(&self, g: &ModularElement, w: &PreparedPoint) -> DistanceKey {
        match (&self.big, &w.big) {
            (Some(p), Some(q)) => {
                if let (Some(p), Some(q)) = (&self.small, &w.small) {
                    if let Some(key) = small_two_cosh(p, g, q) {
                        return DistanceKey::Exact(key);
                    }
                }
                DistanceKey::Exact(big_two_cosh(p, g, q))
            }
            _ => DistanceKey::Float(self.two_cosh_f64(g, w)),
        }
    }
}

fn small_two_cosh(p: &[i128; 3], g: &ModularElement, q: &[i128; 3]) -> Option<ExactKey> {
    let [x1, y1, d1] = *p;
    let [x2, y2, d2] = *q;
    let (a, b, c, d) = (g.a as i128, g.b as i128, g.c as i128, g.d as i128);
    let dd = d1.checked_mul(d2)?;
    let re = c
        .checked_mul(x1.checked_mul(x2)?.checked_sub(y1.checked_mul(y2)?)?)?
        .checked_add(d.checked_mul(x1)?.checked_mul(d2)?)?
        .checked_sub(a.checked_mul(x2)?.checked_mul(d1)?)?
        .checked_sub(b.checked_mul(dd)?)?;
    let im = c
        .checked_mul(x1.checked_mul(y2)?.checked_add(y1.checked_mul(x2)?)?)?
        .checked_add(d.checked_mul(y1)?.checked_mul(d2)?)?
        .checked_sub(a.checked_mul(y2)?.checked_mul(d1)?)?;
    let num = re.checked_mul(re)?.checked_add(im.checked_mul(im)?)?;
    let den = dd.checked_mul(y1)?.checked_mul(y2)?;
    ExactKey::from_parts(num.checked_add(den.checked_mul(2)?)?, den)
}

fn big_two_cosh(p: &[BigInt; 3], g: &ModularElement, q: &[BigInt; 3]) -> ExactKey {
    let [x1, y1, d1] = p;
    let [x2, y2, d2] = q;
    let (a, b, c, d) = (
        BigInt::from(g.a),
        BigInt::from(g.b),
        BigInt::from(g.c),
        BigInt::from(g.d),
    );
    let dd = d1 * d2;
    let re = &c * (x1 * x2 - y1 * y2) + &d * x1 * d2 - &a * x2 * d1 - &b * &dd;
    let im = &c * (x1 * y2 + y1 * x2) + &d * y1 * d2 - &a * y2 * d1;
    let den = dd * y1 * y2;
    let num = &re * &re + &im * &im + &den * 2;
    ExactKey::from_big(Rational::new(num, den))
}

/// `2 cosh d` as an exact rational, if the key is exact.
pub fn key_to_rational(key: &DistanceKey) -> Option<Rational> {
    key.exact().map(ExactKey::to_big)
}

/// True if `value <= bound` up to the float tolerance.
pub fn within(value: f64, bound: f64) -> bool {
    value <= bound + tolerance(bound)
}
