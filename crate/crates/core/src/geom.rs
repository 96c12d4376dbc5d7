//! Exact rational planar geometry: points, orientation, open-segment predicates and the
//! line structure of a finite point set.
//!
//! Every coordinate is a `BigRational` in lowest terms; no predicate uses a tolerance.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Build a rational from an integer numerator and denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Parse `"num/den"` or a bare integer. Zero denominators are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| Error::ParseRational(s.to_string()))?;
    let den = BigInt::from_str(den).map_err(|_| Error::ParseRational(s.to_string()))?;
    if den.is_zero() {
        return Err(Error::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Always `num/den`, even for integers.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        // BigRational::new already reduces and fixes the sign of the denominator.
        RationalPoint { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint::new(int(x), int(y))
    }

    pub fn from_bigints(x: BigInt, y: BigInt) -> Self {
        RationalPoint::new(BigRational::from_integer(x), BigRational::from_integer(y))
    }

    pub fn origin() -> Self {
        RationalPoint::new(BigRational::zero(), BigRational::zero())
    }

    pub fn add(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x + &other.x, &self.y + &other.y)
    }

    pub fn sub(&self, other: &RationalPoint) -> RationalPoint {
        RationalPoint::new(&self.x - &other.x, &self.y - &other.y)
    }

    pub fn scale(&self, s: &BigRational) -> RationalPoint {
        RationalPoint::new(&self.x * s, &self.y * s)
    }

    pub fn midpoint(&self, other: &RationalPoint) -> RationalPoint {
        let half = rat(1, 2);
        self.add(other).scale(&half)
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &RationalPoint, t: &BigRational) -> RationalPoint {
        self.add(&other.sub(self).scale(t))
    }

    pub fn dot(&self, other: &RationalPoint) -> BigRational {
        &self.x * &other.x + &self.y * &other.y
    }

    pub fn cross(&self, other: &RationalPoint) -> BigRational {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rational_to_f64(&self.x), rational_to_f64(&self.y))
    }

    fn to_strings(&self) -> [String; 2] {
        [format_rational(&self.x), format_rational(&self.y)]
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [x, y] = <[String; 2]>::deserialize(deserializer)?;
        let x = parse_rational(&x).map_err(serde::de::Error::custom)?;
        let y = parse_rational(&y).map_err(serde::de::Error::custom)?;
        Ok(RationalPoint::new(x, y))
    }
}

/// Sign of the determinant of `(q - p, r - p)`: `+1` counter-clockwise, `-1` clockwise,
/// `0` collinear.
pub fn orientation(p: &RationalPoint, q: &RationalPoint, r: &RationalPoint) -> i8 {
    let det = (&q.x - &p.x) * (&r.y - &p.y) - (&q.y - &p.y) * (&r.x - &p.x);
    sign(&det)
}

pub(crate) fn sign(v: &BigRational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// True iff `x` lies strictly between `a` and `b` on the segment `ab`.
pub fn on_open_segment(x: &RationalPoint, a: &RationalPoint, b: &RationalPoint) -> Result<bool> {
    if a == b {
        return Err(Error::DegenerateSegment(a.clone()));
    }
    Ok(strictly_between(x, a, b))
}

/// `on_open_segment` without the degeneracy check, for hot loops over known-good segments.
#[inline]
pub(crate) fn strictly_between(x: &RationalPoint, a: &RationalPoint, b: &RationalPoint) -> bool {
    if orientation(a, b, x) != 0 || x == a || x == b {
        return false;
    }
    // Collinear: x is inside iff (x - a) . (x - b) < 0.
    let d = x.sub(a).dot(&x.sub(b));
    d.is_negative()
}

/// Parameter `t` with `x = a + t (b - a)`, assuming `x` is on the line `ab`.
pub(crate) fn parameter_on(x: &RationalPoint, a: &RationalPoint, b: &RationalPoint) -> BigRational {
    let d = b.sub(a);
    x.sub(a).dot(&d) / d.dot(&d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentIntersection {
    Empty,
    Point(RationalPoint),
    /// Collinear segments sharing an open subsegment.
    Overlap,
}

/// Intersection of the open segments `a1b1` and `a2b2`.
///
/// Endpoints belong to neither open segment, so an endpoint of one touching the other is
/// reported as `Empty`; `Point` always means an interior-interior crossing.
pub fn segment_intersection(
    a1: &RationalPoint,
    b1: &RationalPoint,
    a2: &RationalPoint,
    b2: &RationalPoint,
) -> Result<SegmentIntersection> {
    if a1 == b1 {
        return Err(Error::DegenerateSegment(a1.clone()));
    }
    if a2 == b2 {
        return Err(Error::DegenerateSegment(a2.clone()));
    }
    Ok(intersect_unchecked(a1, b1, a2, b2))
}

pub(crate) fn intersect_unchecked(
    a1: &RationalPoint,
    b1: &RationalPoint,
    a2: &RationalPoint,
    b2: &RationalPoint,
) -> SegmentIntersection {
    let d1 = orientation(a1, b1, a2);
    let d2 = orientation(a1, b1, b2);
    if d1 == 0 && d2 == 0 {
        // Collinear: compare parameter intervals along the first segment.
        let s = parameter_on(a2, a1, b1);
        let e = parameter_on(b2, a1, b1);
        let (lo, hi) = if s < e { (s, e) } else { (e, s) };
        let zero = BigRational::zero();
        let one = BigRational::one();
        let lo = if lo > zero { lo } else { zero };
        let hi = if hi < one { hi } else { one };
        return if lo < hi {
            SegmentIntersection::Overlap
        } else {
            SegmentIntersection::Empty
        };
    }
    let d3 = orientation(a2, b2, a1);
    let d4 = orientation(a2, b2, b1);
    if d1 * d2 < 0 && d3 * d4 < 0 {
        let r = b1.sub(a1);
        let s = b2.sub(a2);
        let t = a2.sub(a1).cross(&s) / r.cross(&s);
        SegmentIntersection::Point(a1.lerp(b1, &t))
    } else {
        SegmentIntersection::Empty
    }
}

/// A maximal collinear subset of a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRecord {
    pub members: Vec<usize>,
    /// Primitive integer direction, first non-zero component positive.
    #[serde(with = "bigint_pair")]
    pub direction: (BigInt, BigInt),
    pub anchor: RationalPoint,
}

impl LineRecord {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

mod bigint_pair {
    use std::str::FromStr;

    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &(BigInt, BigInt), s: S) -> Result<S::Ok, S::Error> {
        [v.0.to_string(), v.1.to_string()].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(BigInt, BigInt), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let parse = |t: &str| BigInt::from_str(t).map_err(serde::de::Error::custom);
        Ok((parse(&a)?, parse(&b)?))
    }
}

/// Serde adapter writing a rational as its `"n/d"` string.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        super::format_rational(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let t = String::deserialize(d)?;
        super::parse_rational(&t).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn primitive_direction(d: &RationalPoint) -> (BigInt, BigInt) {
    let l = d.x.denom().lcm(d.y.denom());
    let mut dx = (&d.x * BigRational::from_integer(l.clone())).to_integer();
    let mut dy = (&d.y * BigRational::from_integer(l)).to_integer();
    let g = dx.gcd(&dy);
    if !g.is_zero() {
        dx /= &g;
        dy /= &g;
    }
    if dx.is_negative() || (dx.is_zero() && dy.is_negative()) {
        dx = -dx;
        dy = -dy;
    }
    (dx, dy)
}

#[derive(Serialize, Deserialize)]
struct RawPointSet {
    name: String,
    points: Vec<RationalPoint>,
}

/// Ordered, duplicate-free list of points. Index `i` names the same point for the life of
/// the value.
#[derive(Debug)]
pub struct PointSet {
    name: String,
    points: Vec<RationalPoint>,
    lines: OnceLock<Vec<LineRecord>>,
}

impl Clone for PointSet {
    fn clone(&self) -> Self {
        PointSet {
            name: self.name.clone(),
            points: self.points.clone(),
            lines: self.lines.clone(),
        }
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.points == other.points
    }
}

impl Eq for PointSet {}

impl PointSet {
    pub fn new(name: impl Into<String>, points: Vec<RationalPoint>) -> Result<Self> {
        let mut seen = std::collections::HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if let Some(&first) = seen.get(p) {
                return Err(Error::DuplicatePoint {
                    point: p.clone(),
                    first,
                    second: i,
                });
            }
            seen.insert(p, i);
        }
        Ok(PointSet {
            name: name.into(),
            points,
            lines: OnceLock::new(),
        })
    }

    pub fn from_ints(name: impl Into<String>, coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            name,
            coords.iter().map(|&(x, y)| RationalPoint::from_ints(x, y)).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn points(&self) -> &[RationalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &RationalPoint {
        &self.points[i]
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        self.points.contains(p)
    }

    /// Sub-point-set on the given indices, in the given order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> PointSet {
        PointSet {
            name: name.into(),
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            lines: OnceLock::new(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawPointSet = serde_json::from_str(s)?;
        Self::new(raw.name, raw.points)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawPointSet {
            name: self.name.clone(),
            points: self.points.clone(),
        })
        .expect("point sets always serialize")
    }

    /// Cached maximal lines; empty for fewer than two points.
    pub fn lines(&self) -> &[LineRecord] {
        self.lines.get_or_init(|| compute_lines(&self.points))
    }

    pub fn is_collinear(&self) -> bool {
        self.lines().len() <= 1
    }

    /// A collinear triple, if any.
    pub fn collinear_triple(&self) -> Option<(usize, usize, usize)> {
        self.lines()
            .iter()
            .find(|l| l.len() >= 3)
            .map(|l| (l.members[0], l.members[1], l.members[2]))
    }

    pub fn is_general_position(&self) -> bool {
        self.collinear_triple().is_none()
    }

    pub fn require_general_position(&self) -> Result<()> {
        match self.collinear_triple() {
            Some((a, b, c)) => Err(Error::NotGeneralPosition(a, b, c)),
            None => Ok(()),
        }
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawPointSet {
            name: self.name.clone(),
            points: self.points.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPointSet::deserialize(deserializer)?;
        PointSet::new(raw.name, raw.points).map_err(serde::de::Error::custom)
    }
}

fn compute_lines(points: &[RationalPoint]) -> Vec<LineRecord> {
    let n = points.len();
    let mut covered = vec![false; n * n];
    let mut lines = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if covered[i * n + j] {
                continue;
            }
            let mut members = vec![i, j];
            members.extend(
                ((j + 1)..n).filter(|&k| orientation(&points[i], &points[j], &points[k]) == 0),
            );
            // Maximality also needs points before j; any such point k < j with k > i would
            // have made (i, k) and (k, j) covered already, and k < i is impossible because
            // (k, i) would have produced this line first.
            for (ai, &a) in members.iter().enumerate() {
                for &b in &members[ai + 1..] {
                    covered[a * n + b] = true;
                }
            }
            lines.push(LineRecord {
                direction: primitive_direction(&points[j].sub(&points[i])),
                anchor: points[i].clone(),
                members,
            });
        }
    }
    lines
}

/// All maximal collinear subsets with at least two points, ordered by smallest member.
pub fn lines_of(p: &PointSet) -> Result<Vec<LineRecord>> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: p.len(),
        });
    }
    Ok(p.lines().to_vec())
}

pub fn max_collinear(p: &PointSet) -> Result<usize> {
    if p.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: p.len(),
        });
    }
    Ok(p.lines().iter().map(LineRecord::len).max().unwrap_or(0))
}

/// Strict hull vertices in counter-clockwise order, starting from the lexicographically
/// smallest point (Andrew's monotone chain).
pub fn hull_vertices(p: &PointSet) -> Result<Vec<usize>> {
    if p.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: p.len(),
        });
    }
    if p.is_collinear() {
        return Err(Error::DegenerateHull);
    }
    let pts = p.points();
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a].cmp(&pts[b]));
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2
            && orientation(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= 0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2
            && orientation(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= 0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    Ok(lower)
}

/// Number of points on the hull boundary, counting points interior to hull edges.
pub fn convex_hull_size(p: &PointSet) -> Result<usize> {
    let hull = hull_vertices(p)?;
    let pts = p.points();
    let h = hull.len();
    let on_boundary = |x: &RationalPoint| {
        (0..h).any(|e| {
            let a = &pts[hull[e]];
            let b = &pts[hull[(e + 1) % h]];
            x == a || strictly_between(x, a, b)
        })
    };
    Ok(pts.iter().filter(|x| on_boundary(x)).count())
}

/// True iff every point is a strict hull vertex.
pub fn is_convex_position(p: &PointSet) -> bool {
    hull_vertices(p).map(|h| h.len() == p.len()).unwrap_or(false)
}
