//! Planar points, exact orientation / in-circle predicates and grid quantization.
//!
//! Predicates are evaluated in two stages: a floating-point determinant with a
//! static forward error bound, and, when the sign is not certified by that
//! bound, an exact evaluation on big integers built from the binary
//! representation of the inputs.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};

/// A point in the plane. Coordinates are finite.
#[derive(Copy, Clone, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Squared euclidean distance. All distance comparisons in the crate go
    /// through this function so that ties are judged identically everywhere.
    #[inline]
    pub fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Position of a point in the insertion order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of_f64(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    fn of_bigint(v: &BigInt) -> Sign {
        if v.is_positive() {
            Sign::Positive
        } else if v.is_negative() {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn reversed(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

// Half an ulp of 1.0.
const EPSILON: f64 = f64::EPSILON / 2.0;
const CCW_ERR_BOUND: f64 = (3.0 + 16.0 * EPSILON) * EPSILON;
const ICC_ERR_BOUND: f64 = (10.0 + 96.0 * EPSILON) * EPSILON;
// Below this magnitude intermediate products may have underflowed and the
// relative error bounds above no longer hold.
const MIN_FILTER_MAGNITUDE: f64 = 1e-250;

/// Sign of the orientation determinant of `(a, b, c)`.
///
/// `Positive` iff `c` lies strictly to the left of the directed line `a -> b`.
pub fn orient2d(a: Point, b: Point, c: Point) -> Sign {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let detsum = detleft.abs() + detright.abs();
    let bound = CCW_ERR_BOUND * detsum;
    if detsum.is_finite() && detsum >= MIN_FILTER_MAGNITUDE && det.abs() > bound {
        return Sign::of_f64(det);
    }
    // With gradual underflow `x - y == 0.0` iff `x == y`, so a zero factor
    // here is an exact zero.
    if exact_zero_products(a, b, c) {
        return Sign::Zero;
    }
    orient2d_exact(a, b, c)
}

fn exact_zero_products(a: Point, b: Point, c: Point) -> bool {
    ((a.x - c.x) == 0.0 || (b.y - c.y) == 0.0) && ((a.y - c.y) == 0.0 || (b.x - c.x) == 0.0)
}

/// Sign of the in-circle determinant. `(a, b, c)` must be counter-clockwise.
///
/// `Positive` iff `p` lies strictly inside the circle through `a`, `b`, `c`.
pub fn in_circle(a: Point, b: Point, c: Point, p: Point) -> Result<Sign> {
    if orient2d(a, b, c) != Sign::Positive {
        return Err(Error::NotCounterClockwise);
    }
    Ok(in_circle_ccw(a, b, c, p))
}

/// In-circle test without the orientation check. Callers guarantee that
/// `(a, b, c)` is counter-clockwise.
pub(crate) fn in_circle_ccw(a: Point, b: Point, c: Point, p: Point) -> Sign {
    let adx = a.x - p.x;
    let bdx = b.x - p.x;
    let cdx = c.x - p.x;
    let ady = a.y - p.y;
    let bdy = b.y - p.y;
    let cdy = c.y - p.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;

    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;

    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    let bound = ICC_ERR_BOUND * permanent;
    if permanent.is_finite() && permanent >= MIN_FILTER_MAGNITUDE && det.abs() > bound {
        return Sign::of_f64(det);
    }
    in_circle_exact(a, b, c, p)
}

/// Splits a finite double into `mantissa * 2^exponent` with an integer mantissa.
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mant, exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1i64 << 52), raw_exp - 1075)
    };
    if v < 0.0 {
        (-mant, exp)
    } else {
        (mant, exp)
    }
}

/// Converts the coordinates to integers sharing one power-of-two scale.
/// Every predicate determinant is homogeneous, so the common positive scale
/// does not change its sign.
fn to_common_scale<const N: usize>(values: [f64; N]) -> [BigInt; N] {
    let parts = values.map(decompose);
    let min_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts.map(|(m, e)| {
        if m == 0 {
            BigInt::from(0)
        } else {
            BigInt::from(m) << ((e - min_exp) as usize)
        }
    })
}

fn orient2d_exact(a: Point, b: Point, c: Point) -> Sign {
    let [ax, ay, bx, by, cx, cy] = to_common_scale([a.x, a.y, b.x, b.y, c.x, c.y]);
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    Sign::of_bigint(&det)
}

fn in_circle_exact(a: Point, b: Point, c: Point, p: Point) -> Sign {
    let [ax, ay, bx, by, cx, cy, px, py] =
        to_common_scale([a.x, a.y, b.x, b.y, c.x, c.y, p.x, p.y]);
    let adx = &ax - &px;
    let ady = &ay - &py;
    let bdx = &bx - &px;
    let bdy = &by - &py;
    let cdx = &cx - &px;
    let cdy = &cy - &py;
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    Sign::of_bigint(&det)
}

/// One edge of a triangle `(a, b, c)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Edge {
    AB,
    BC,
    CA,
}

impl Edge {
    /// Index (0, 1, 2 for a, b, c) of the vertex not on this edge.
    pub fn opposite_vertex(self) -> usize {
        match self {
            Edge::AB => 2,
            Edge::BC => 0,
            Edge::CA => 1,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Containment {
    Inside,
    OnEdge(Edge),
    /// Index 0, 1 or 2 of the coinciding vertex.
    AtVertex(usize),
    Outside,
}

/// Classifies `p` against the counter-clockwise triangle `(a, b, c)`.
pub fn point_in_triangle(p: Point, a: Point, b: Point, c: Point) -> Containment {
    debug_assert_eq!(orient2d(a, b, c), Sign::Positive);
    let ab = orient2d(a, b, p);
    if ab == Sign::Negative {
        return Containment::Outside;
    }
    let bc = orient2d(b, c, p);
    if bc == Sign::Negative {
        return Containment::Outside;
    }
    let ca = orient2d(c, a, p);
    if ca == Sign::Negative {
        return Containment::Outside;
    }
    match (ab == Sign::Zero, bc == Sign::Zero, ca == Sign::Zero) {
        (false, false, false) => Containment::Inside,
        (true, false, false) => Containment::OnEdge(Edge::AB),
        (false, true, false) => Containment::OnEdge(Edge::BC),
        (false, false, true) => Containment::OnEdge(Edge::CA),
        (true, true, _) => Containment::AtVertex(1),
        (false, true, true) => Containment::AtVertex(2),
        (true, false, true) => Containment::AtVertex(0),
    }
}

/// Grid cells of a point set after an affine map of its bounding square onto
/// `[0, 2^bits - 1]^2`.
#[derive(Clone, Debug)]
pub struct Quantized {
    pub cells: Vec<(u32, u32)>,
    pub bits: u32,
    pub origin: Point,
    /// Grid cells per unit length.
    pub scale: f64,
}

pub const MAX_QUANTIZE_BITS: u32 = 32;

/// Maps points onto the integer grid `[0, 2^bits - 1]^2` with `floor`.
///
/// The bounding box is scaled uniformly by its longer side so that grid cells
/// stay square; coordinates on the upper boundary clamp to the last cell.
pub fn quantize(points: &[Point], bits: u32) -> Result<Quantized> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bits == 0 || bits > MAX_QUANTIZE_BITS {
        return Err(Error::InvalidParameter(format!(
            "quantization bits must be in 1..={MAX_QUANTIZE_BITS}, got {bits}"
        )));
    }
    let (lo, hi) = bounding_box(points);
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let side = (1u64 << bits) as f64;
    let scale = if extent > 0.0 { side / extent } else { 0.0 };
    let max_cell = ((1u64 << bits) - 1) as f64;
    let cell = |v: f64, origin: f64| -> u32 { ((v - origin) * scale).floor().clamp(0.0, max_cell) as u32 };
    let cells = points.iter().map(|p| (cell(p.x, lo.x), cell(p.y, lo.y))).collect();
    Ok(Quantized {
        cells,
        bits,
        origin: lo,
        scale,
    })
}

/// Lower-left and upper-right corners of the bounding box. `points` must be
/// nonempty.
pub fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}
