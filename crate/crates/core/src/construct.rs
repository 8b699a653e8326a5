//! Comparison triangles, hinges and four-point configurations in L²(K).
//!
//! Everything is placed canonically: the first vertex sits at the chart base
//! point, the long side (or the segment `ŷx̂`) runs up the vertical axis and the
//! remaining vertex goes to the left (`ẑ2` of a four-point configuration to the right).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, Chart, Curvature, ModelError, ModelPoint, Orientation};

/// Tolerance for snapping nearly degenerate triangles onto the axis.
pub const DEGENERATE_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("side lengths violate the reverse triangle inequality")]
    ReverseTriangleViolation,
    #[error("configuration exceeds the finite diameter of the model space")]
    SizeBound,
    #[error("distance {d} exceeds the side length {len}")]
    OutOfRange { d: f64, len: f64 },
    #[error("vertex is adjacent to a side of zero length")]
    DegenerateVertex,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `max(taus) < D_K`.
pub fn satisfies_size_bounds(k: Curvature, taus: &[f64]) -> bool {
    taus.iter().all(|&t| t < k.diameter())
}

/// Side lengths `a = τ(x,y)`, `b = τ(y,z)`, `c = τ(x,z)` of a triangle `x ≤ y ≤ z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TriangleSides {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        TriangleSides { a, b, c }
    }

    pub fn is_timelike(&self) -> bool {
        self.a > 0.0 && self.b > 0.0
    }

    fn validate(&self, k: Curvature) -> Result<(), ConstructError> {
        let TriangleSides { a, b, c } = *self;
        if ![a, b, c].iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(ConstructError::InvalidInput("side lengths must be finite and nonnegative".into()));
        }
        if c < a + b - DEGENERATE_TOL * c.max(1.0) {
            return Err(ConstructError::ReverseTriangleViolation);
        }
        if !satisfies_size_bounds(k, &[c]) {
            return Err(ConstructError::SizeBound);
        }
        Ok(())
    }

    fn degenerate(&self) -> bool {
        self.c - (self.a + self.b) <= DEGENERATE_TOL * self.c.max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizedTriangle {
    pub x: ModelPoint,
    pub y: ModelPoint,
    pub z: ModelPoint,
    pub k: Curvature,
    pub sides: TriangleSides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Side {
    XY,
    YZ,
    XZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Vertex {
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedAngle {
    pub magnitude: f64,
    pub sign: i8,
}

impl SignedAngle {
    pub fn value(&self) -> f64 {
        self.sign as f64 * self.magnitude
    }
}

/// Unit timelike and spacelike tangents at the chart base point.
fn base_frame(chart: Chart) -> ([f64; 3], [f64; 3]) {
    match chart {
        Chart::Minkowski => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        Chart::DeSitter => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        Chart::AntiDeSitter => ([0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
    }
}

/// Follow the geodesic from the base point with unit tangent `u` for normalized length `d`.
fn shoot_from_base(k: Curvature, u: &[f64; 3], d: f64) -> ModelPoint {
    let chart = k.chart();
    let base = k.base().coords;
    let (wb, wu) = match chart {
        Chart::Minkowski => (1.0, d),
        Chart::DeSitter => (d.cosh(), d.sinh()),
        Chart::AntiDeSitter => (d.cos(), d.sin()),
    };
    let mut coords = [0.0; 3];
    for (i, c) in coords.iter_mut().enumerate() {
        *c = wb * base[i] + wu * u[i];
    }
    ModelPoint::new(chart, coords, k.scale())
}

fn rapidity_direction(chart: Chart, forward: f64, psi: f64) -> [f64; 3] {
    let (e0, e1) = base_frame(chart);
    let mut u = [0.0; 3];
    for i in 0..3 {
        u[i] = forward * psi.cosh() * e0[i] + psi.sinh() * e1[i];
    }
    u
}

/// Normalized time separation between two points, in whichever direction they are related.
fn separation(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<f64, ModelError> {
    let forward = model::model_tau(k, p, q)?;
    let backward = model::model_tau(k, q, p)?;
    Ok(forward.max(backward) / k.scale())
}

/// Point `w` with separation `d0` from the base point and `d1` from `axis(h)`,
/// on the given side (−1 left, +1 right). Inputs are physical lengths.
fn axis_intersection(k: Curvature, h: f64, d0: f64, d1: f64, side: f64) -> Result<ModelPoint, ConstructError> {
    let s = k.scale();
    let (h, d0, d1) = (h / s, d0 / s, d1 / s);
    let chart = k.chart();
    let (coords, disc) = match chart {
        Chart::Minkowski => {
            let t = (h * h + d0 * d0 - d1 * d1) / (2.0 * h);
            ([t, 0.0, 0.0], t * t - d0 * d0)
        }
        Chart::DeSitter => {
            let y = d0.cosh();
            let t = (y * h.cosh() - d1.cosh()) / h.sinh();
            ([t, 0.0, y], 1.0 + t * t - y * y)
        }
        Chart::AntiDeSitter => {
            let sc = d0.cos();
            let t = (d1.cos() - sc * h.cos()) / h.sin();
            ([sc, t, 0.0], sc * sc + t * t - 1.0)
        }
    };
    let mut coords = coords;
    coords[chart.lateral_index()] = side * disc.max(0.0).sqrt();
    let w = ModelPoint::new(chart, coords, s);
    let axis = k.axis_point(h * s);
    let residual = (separation(k, &k.base(), &w)? - d0).abs() + (separation(k, &w, &axis)? - d1).abs();
    if residual <= RESIDUAL_TOL * (1.0 + h) || d0 == 0.0 {
        return Ok(w);
    }
    transverse_bisection(k, h, d0, d1, side)
}

/// Fallback: move along the locus at separation `d0` from the base point and
/// bisect the rapidity until the separation from `axis(h)` equals `d1`.
fn transverse_bisection(k: Curvature, h: f64, d0: f64, d1: f64, side: f64) -> Result<ModelPoint, ConstructError> {
    let chart = k.chart();
    let axis = k.axis_point(h * k.scale());
    let at = |psi: f64| shoot_from_base(k, &rapidity_direction(chart, 1.0, side * psi), d0);
    let gap = |psi: f64| -> Result<f64, ConstructError> { Ok(separation(k, &at(psi), &axis)? - d1) };
    let mut lo = 0.0;
    let mut hi = 1.0;
    while gap(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 64.0 {
            return Err(ConstructError::ReverseTriangleViolation);
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(at(0.5 * (lo + hi)))
}

/// Canonically placed comparison triangle with the given side lengths.
pub fn realize_triangle(k: Curvature, sides: TriangleSides) -> Result<RealizedTriangle, ConstructError> {
    sides.validate(k)?;
    let x = k.base();
    let z = k.axis_point(sides.c);
    let y = if sides.degenerate() {
        k.axis_point(sides.a.min(sides.c))
    } else {
        axis_intersection(k, sides.c, sides.a, sides.b, -1.0)?
    };
    Ok(RealizedTriangle { x, y, z, k, sides })
}

/// Point on a side of a realized triangle at separation `d` from the side's first vertex.
pub fn comparison_point(k: Curvature, tri: &RealizedTriangle, side: Side, d: f64) -> Result<ModelPoint, ConstructError> {
    let (from, to, len) = match side {
        Side::XY => (&tri.x, &tri.y, tri.sides.a),
        Side::YZ => (&tri.y, &tri.z, tri.sides.b),
        Side::XZ => (&tri.x, &tri.z, tri.sides.c),
    };
    if d < 0.0 || d > len * (1.0 + 1e-12) + 1e-12 {
        return Err(ConstructError::OutOfRange { d, len });
    }
    if d <= 0.0 {
        return Ok(*from);
    }
    if d >= len {
        return Ok(*to);
    }
    Ok(model::model_geodesic(k, from, to, d / len)?)
}

/// Signed K-comparison angle at a vertex of the comparison triangle.
pub fn comparison_angle(k: Curvature, sides: TriangleSides, vertex: Vertex) -> Result<SignedAngle, ConstructError> {
    let (l1, l2) = match vertex {
        Vertex::X => (sides.a, sides.c),
        Vertex::Y => (sides.a, sides.b),
        Vertex::Z => (sides.b, sides.c),
    };
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(ConstructError::DegenerateVertex);
    }
    let tri = realize_triangle(k, sides)?;
    if sides.degenerate() {
        let sign = if vertex == Vertex::Y { 1 } else { -1 };
        return Ok(SignedAngle { magnitude: 0.0, sign });
    }
    let (magnitude, sign) = match vertex {
        Vertex::X => (model::angle_at(k, &tri.x, &tri.y, &tri.z)?, -1),
        Vertex::Y => (model::angle_at(k, &tri.y, &tri.x, &tri.z)?, 1),
        Vertex::Z => (model::angle_at(k, &tri.z, &tri.y, &tri.x)?, -1),
    };
    Ok(SignedAngle { magnitude, sign })
}

/// Comparison hinge: two geodesics leaving a common vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizedHinge {
    pub vertex: ModelPoint,
    pub a_end: ModelPoint,
    pub b_end: ModelPoint,
}

impl RealizedHinge {
    /// Time separation between the two endpoints in the direction `a → b`.
    pub fn tau_ab(&self, k: Curvature) -> Result<f64, ModelError> {
        model::model_tau(k, &self.a_end, &self.b_end)
    }

    pub fn tau_ba(&self, k: Curvature) -> Result<f64, ModelError> {
        model::model_tau(k, &self.b_end, &self.a_end)
    }
}

/// Hinge with legs of the given lengths and orientations meeting at the given signed angle.
/// The first leg runs along the axis, the second leans to the left.
pub fn realize_hinge(
    k: Curvature,
    len_a: f64,
    len_b: f64,
    angle: SignedAngle,
    orientations: (Orientation, Orientation),
) -> Result<RealizedHinge, ConstructError> {
    if !(len_a > 0.0 && len_b > 0.0 && angle.magnitude >= 0.0 && angle.magnitude.is_finite()) {
        return Err(ConstructError::InvalidInput("hinge legs must be positive and the angle finite".into()));
    }
    if angle.sign != model::sign_of(orientations.0, orientations.1) {
        return Err(ConstructError::InvalidInput("angle sign disagrees with the leg orientations".into()));
    }
    let mut spans = vec![len_a, len_b];
    if orientations.0 != orientations.1 {
        spans.push(len_a + len_b);
    }
    if !satisfies_size_bounds(k, &spans) {
        return Err(ConstructError::SizeBound);
    }
    let chart = k.chart();
    let dir = |o: Orientation| if o == Orientation::Future { 1.0 } else { -1.0 };
    let ua = rapidity_direction(chart, dir(orientations.0), 0.0);
    let ub = rapidity_direction(chart, dir(orientations.1), -angle.magnitude);
    let s = k.scale();
    Ok(RealizedHinge {
        vertex: k.base(),
        a_end: shoot_from_base(k, &ua, len_a / s),
        b_end: shoot_from_base(k, &ub, len_b / s),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum TimeSense {
    Future,
    Past,
}

/// Separations of a four-point configuration `(y, x, z1, z2)`:
/// `c0 = τ(y,x)`, `a_i = τ(y,z_i)`, `b_i = τ(x,z_i)` (all reversed for the past sense).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourPointSides {
    pub c0: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
    pub sense: TimeSense,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealizedFourPoint {
    pub y: ModelPoint,
    pub x: ModelPoint,
    pub z1: ModelPoint,
    pub z2: ModelPoint,
}

/// Point at separations `a` from the base point and `b` from `axis(c0)` on the
/// given side, for the future sense; collinear when `a = c0 + b`.
pub(crate) fn four_point_wing(k: Curvature, c0: f64, a: f64, b: f64, side: f64) -> Result<ModelPoint, ConstructError> {
    if !(c0 > 0.0) || ![a, b].iter().all(|v| v.is_finite() && *v >= 0.0) {
        return Err(ConstructError::InvalidInput("four-point separations must be nonnegative with c0 > 0".into()));
    }
    if a < c0 + b - DEGENERATE_TOL * a.max(1.0) {
        return Err(ConstructError::ReverseTriangleViolation);
    }
    if !satisfies_size_bounds(k, &[a]) {
        return Err(ConstructError::SizeBound);
    }
    if a - (c0 + b) <= DEGENERATE_TOL * a.max(1.0) {
        return Ok(k.axis_point(a));
    }
    axis_intersection(k, c0, a, b, side)
}

/// Comparison configuration with `ẑ1` left and `ẑ2` right of the line through `ŷ, x̂`.
pub fn realize_four_point(k: Curvature, sides: FourPointSides) -> Result<RealizedFourPoint, ConstructError> {
    let z1 = four_point_wing(k, sides.c0, sides.a1, sides.b1, -1.0)?;
    let z2 = four_point_wing(k, sides.c0, sides.a2, sides.b2, 1.0)?;
    let out = RealizedFourPoint { y: k.base(), x: k.axis_point(sides.c0), z1, z2 };
    Ok(match sides.sense {
        TimeSense::Future => out,
        TimeSense::Past => RealizedFourPoint {
            y: model::reflect_time(&out.y),
            x: model::reflect_time(&out.x),
            z1: model::reflect_time(&out.z1),
            z2: model::reflect_time(&out.z2),
        },
    })
}
