//! Two-dimensional Lorentzian model spaces of constant curvature.
//!
//! Points live in a normalized chart (Minkowski plane, de Sitter or
//! anti-de Sitter quadric) and carry the scale `1/sqrt|K|`; every time
//! separation is the normalized value multiplied by that scale.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for deciding that a separation is null.
pub const NULL_TOL: f64 = 1e-10;
/// Inner-product drift tolerated before clamping into arcosh/arccos domains.
pub const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("points belong to different charts or scales")]
    ChartMismatch,
    #[error("points are not chronologically related")]
    NotChronological,
    #[error("time separation {tau} reaches the finite diameter {diameter}")]
    SizeBound { tau: f64, diameter: f64 },
    #[error("point pair lies outside the anti-de Sitter fundamental domain")]
    OutsideDomain,
}

/// Sectional curvature of a model space.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature(pub f64);

impl Curvature {
    pub fn new(k: f64) -> Self {
        assert!(k.is_finite(), "curvature must be finite");
        Curvature(k)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn chart(self) -> Chart {
        if self.0 > 0.0 {
            Chart::DeSitter
        } else if self.0 < 0.0 {
            Chart::AntiDeSitter
        } else {
            Chart::Minkowski
        }
    }

    /// Factor mapping normalized chart lengths to lengths in L²(K).
    pub fn scale(self) -> f64 {
        if self.0 == 0.0 {
            1.0
        } else {
            1.0 / self.0.abs().sqrt()
        }
    }

    pub fn diameter(self) -> f64 {
        finite_diameter(self)
    }

    /// Base point of the chart; every canonical construction starts here.
    pub fn base(self) -> ModelPoint {
        ModelPoint::new(self.chart(), self.chart().base(), self.scale())
    }

    /// Point at time separation `tau` along the canonical future axis from the base point
    /// (negative values go to the past).
    pub fn axis_point(self, tau: f64) -> ModelPoint {
        let s = tau / self.scale();
        let coords = match self.chart() {
            Chart::Minkowski => [s, 0.0, 0.0],
            Chart::DeSitter => [s.sinh(), 0.0, s.cosh()],
            Chart::AntiDeSitter => [s.cos(), s.sin(), 0.0],
        };
        ModelPoint::new(self.chart(), coords, self.scale())
    }

    pub(crate) fn owns(self, p: &ModelPoint) -> bool {
        p.chart == self.chart() && (p.scale - self.scale()).abs() <= 1e-12 * self.scale()
    }
}

impl fmt::Display for Curvature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Supremum of finite time separations in L²(K).
pub fn finite_diameter(k: Curvature) -> f64 {
    if k.0 >= 0.0 {
        f64::INFINITY
    } else {
        PI / (-k.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Minkowski,
    #[serde(rename = "desitter")]
    DeSitter,
    #[serde(rename = "antidesitter")]
    AntiDeSitter,
}

impl Chart {
    pub fn dim(self) -> usize {
        match self {
            Chart::Minkowski => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Chart::Minkowski => "minkowski",
            Chart::DeSitter => "desitter",
            Chart::AntiDeSitter => "antidesitter",
        }
    }

    pub fn from_name(name: &str) -> Option<Chart> {
        match name {
            "minkowski" => Some(Chart::Minkowski),
            "desitter" => Some(Chart::DeSitter),
            "antidesitter" => Some(Chart::AntiDeSitter),
            _ => None,
        }
    }

    fn base(self) -> [f64; 3] {
        match self {
            Chart::Minkowski => [0.0, 0.0, 0.0],
            Chart::DeSitter => [0.0, 0.0, 1.0],
            Chart::AntiDeSitter => [1.0, 0.0, 0.0],
        }
    }

    /// Ambient inner product: (−,+) on the plane, (−,+,+) for de Sitter, (−,−,+) for anti-de Sitter.
    pub(crate) fn ip(self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        match self {
            Chart::Minkowski => -a[0] * b[0] + a[1] * b[1],
            Chart::DeSitter => -a[0] * b[0] + a[1] * b[1] + a[2] * b[2],
            Chart::AntiDeSitter => -a[0] * b[0] - a[1] * b[1] + a[2] * b[2],
        }
    }

    /// Index of the coordinate whose sign tells left (negative) from right.
    pub(crate) fn lateral_index(self) -> usize {
        match self {
            Chart::Minkowski | Chart::DeSitter => 1,
            Chart::AntiDeSitter => 2,
        }
    }

    /// Sign of the curvature modelled by the chart.
    pub fn curvature_sign(self) -> f64 {
        self.quadric()
    }

    /// Value of the quadric form on the chart (0 marks the flat plane).
    fn quadric(self) -> f64 {
        match self {
            Chart::Minkowski => 0.0,
            Chart::DeSitter => 1.0,
            Chart::AntiDeSitter => -1.0,
        }
    }
}

/// A point of a model space in normalized embedding coordinates.
///
/// Minkowski points use `(t, x)` (the third slot stays 0), de Sitter points
/// `(t, x, y)` and anti-de Sitter points `(s, t, x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelPoint {
    pub chart: Chart,
    pub coords: [f64; 3],
    pub scale: f64,
}

impl ModelPoint {
    pub fn new(chart: Chart, coords: [f64; 3], scale: f64) -> Self {
        ModelPoint { chart, coords, scale }
    }

    pub fn coord_slice(&self) -> &[f64] {
        &self.coords[..self.chart.dim()]
    }

    /// Deviation from the defining quadric (0 for the plane).
    pub fn quadric_residual(&self) -> f64 {
        match self.chart {
            Chart::Minkowski => 0.0,
            c => c.ip(&self.coords, &self.coords) - c.quadric(),
        }
    }

    /// Signed lateral coordinate: negative on the left of the canonical axis.
    pub fn lateral(&self) -> f64 {
        self.coords[self.chart.lateral_index()]
    }

    /// Global time function of the chart (normalized units).
    pub fn phase(&self) -> f64 {
        match self.chart {
            Chart::Minkowski | Chart::DeSitter => self.coords[0],
            Chart::AntiDeSitter => self.coords[1].atan2(self.coords[0]),
        }
    }
}

pub fn minkowski_embed(k: Curvature, t: f64, x: f64) -> ModelPoint {
    assert_eq!(k.chart(), Chart::Minkowski, "minkowski chart needs K = 0");
    ModelPoint::new(Chart::Minkowski, [t, x, 0.0], 1.0)
}

/// De Sitter point at proper time `u` along the comoving observer with angle `theta`.
pub fn ds_embed(k: Curvature, u: f64, theta: f64) -> ModelPoint {
    assert_eq!(k.chart(), Chart::DeSitter, "de Sitter chart needs K > 0");
    let u = u / k.scale();
    ModelPoint::new(
        Chart::DeSitter,
        [u.sinh(), u.cosh() * theta.sin(), u.cosh() * theta.cos()],
        k.scale(),
    )
}

/// Anti-de Sitter point at global time `time` (proper time on the central
/// geodesic) and radial parameter `rho`.
pub fn ads_embed(k: Curvature, time: f64, rho: f64) -> ModelPoint {
    assert_eq!(k.chart(), Chart::AntiDeSitter, "anti-de Sitter chart needs K < 0");
    let phi = time / k.scale();
    ModelPoint::new(
        Chart::AntiDeSitter,
        [rho.cosh() * phi.cos(), rho.cosh() * phi.sin(), rho.sinh()],
        k.scale(),
    )
}

/// Chart point from the time/space parameters used by each embedding above.
pub fn embed(k: Curvature, time: f64, space: f64) -> ModelPoint {
    match k.chart() {
        Chart::Minkowski => minkowski_embed(k, time, space),
        Chart::DeSitter => ds_embed(k, time, space),
        Chart::AntiDeSitter => ads_embed(k, time, space),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    Chronological,
    NullCausal,
    Unrelated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Forward,
    Backward,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CausalClass {
    pub value: Relation,
    pub direction: Direction,
}

impl CausalClass {
    const UNRELATED: CausalClass = CausalClass { value: Relation::Unrelated, direction: Direction::None };

    fn new(value: Relation, forward: bool) -> Self {
        let direction = if forward { Direction::Forward } else { Direction::Backward };
        CausalClass { value, direction }
    }

    pub fn is_chronological_forward(self) -> bool {
        self.value == Relation::Chronological && self.direction == Direction::Forward
    }

    /// `p ≤ q` (coincident points count as causally related).
    pub fn is_causal_forward(self) -> bool {
        self.value != Relation::Unrelated && self.direction == Direction::Forward
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Future,
    Past,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Future => Orientation::Past,
            Orientation::Past => Orientation::Future,
        }
    }
}

fn check_pair(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<(), ModelError> {
    if k.owns(p) && k.owns(q) {
        Ok(())
    } else {
        Err(ModelError::ChartMismatch)
    }
}

fn coincident(p: &ModelPoint, q: &ModelPoint) -> bool {
    p.coords
        .iter()
        .zip(&q.coords)
        .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())))
}

/// Causal relation of `q` as seen from `p`.
pub fn model_relation(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<CausalClass, ModelError> {
    check_pair(k, p, q)?;
    if coincident(p, q) {
        return Ok(CausalClass::new(Relation::NullCausal, true));
    }
    let chart = k.chart();
    let (excess, forward) = match chart {
        Chart::Minkowski => {
            let dt = q.coords[0] - p.coords[0];
            let dx = q.coords[1] - p.coords[1];
            (dt.abs() - dx.abs(), dt > 0.0)
        }
        Chart::DeSitter => {
            let g = chart.ip(&p.coords, &q.coords);
            (g - 1.0, q.coords[0] > p.coords[0])
        }
        Chart::AntiDeSitter => {
            let dphi = q.phase() - p.phase();
            if dphi.abs() >= PI {
                return Err(ModelError::OutsideDomain);
            }
            let g = -chart.ip(&p.coords, &q.coords);
            // beyond the first conjugate point: no geodesic joins the pair
            if g < -1.0 - CLAMP_TOL {
                return Err(ModelError::OutsideDomain);
            }
            (1.0 - g, dphi > 0.0)
        }
    };
    Ok(if excess > NULL_TOL {
        CausalClass::new(Relation::Chronological, forward)
    } else if excess >= -NULL_TOL {
        CausalClass::new(Relation::NullCausal, forward)
    } else {
        CausalClass::UNRELATED
    })
}

/// Normalized separation of a chronologically related pair, in either direction.
fn normalized_separation(chart: Chart, p: &ModelPoint, q: &ModelPoint) -> Result<f64, ModelError> {
    Ok(match chart {
        Chart::Minkowski => {
            let dt = q.coords[0] - p.coords[0];
            let dx = q.coords[1] - p.coords[1];
            (dt * dt - dx * dx).max(0.0).sqrt()
        }
        Chart::DeSitter => chart.ip(&p.coords, &q.coords).max(1.0).acosh(),
        Chart::AntiDeSitter => {
            let g = -chart.ip(&p.coords, &q.coords);
            if g < -1.0 - CLAMP_TOL {
                return Err(ModelError::OutsideDomain);
            }
            g.clamp(-1.0, 1.0).acos()
        }
    })
}

/// Time separation τ(p, q) in L²(K).
pub fn model_tau(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<f64, ModelError> {
    let rel = model_relation(k, p, q)?;
    if !rel.is_chronological_forward() {
        return Ok(0.0);
    }
    Ok(k.scale() * normalized_separation(k.chart(), p, q)?)
}

/// `p ≤ q` in L²(K).
pub fn model_leq(k: Curvature, p: &ModelPoint, q: &ModelPoint) -> Result<bool, ModelError> {
    Ok(model_relation(k, p, q)?.is_causal_forward())
}

/// Point `γ(s)` on the geodesic from `p` to `q`, parametrized proportionally to τ.
pub fn model_geodesic(k: Curvature, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint, ModelError> {
    let rel = model_relation(k, p, q)?;
    if !rel.is_chronological_forward() {
        return Err(ModelError::NotChronological);
    }
    let len = normalized_separation(k.chart(), p, q)?;
    if len * k.scale() >= k.diameter() {
        return Err(ModelError::SizeBound { tau: len * k.scale(), diameter: k.diameter() });
    }
    let (wp, wq) = match k.chart() {
        Chart::Minkowski => (1.0 - s, s),
        Chart::DeSitter => (((1.0 - s) * len).sinh() / len.sinh(), (s * len).sinh() / len.sinh()),
        Chart::AntiDeSitter => (((1.0 - s) * len).sin() / len.sin(), (s * len).sin() / len.sin()),
    };
    let mut coords = [0.0; 3];
    for (i, c) in coords.iter_mut().enumerate() {
        *c = wp * p.coords[i] + wq * q.coords[i];
    }
    Ok(ModelPoint::new(p.chart, coords, p.scale))
}

/// Unit tangent at `v` of the geodesic towards `a` (a may lie in the past or future of v).
pub(crate) fn unit_tangent(k: Curvature, v: &ModelPoint, a: &ModelPoint) -> Result<[f64; 3], ModelError> {
    let rel = model_relation(k, v, a)?;
    if rel.value != Relation::Chronological {
        return Err(ModelError::NotChronological);
    }
    let len = normalized_separation(k.chart(), v, a)?;
    if len * k.scale() >= k.diameter() {
        return Err(ModelError::SizeBound { tau: len * k.scale(), diameter: k.diameter() });
    }
    let (base_weight, norm) = match k.chart() {
        Chart::Minkowski => (1.0, len),
        Chart::DeSitter => (len.cosh(), len.sinh()),
        Chart::AntiDeSitter => (len.cos(), len.sin()),
    };
    let mut u = [0.0; 3];
    for (i, c) in u.iter_mut().enumerate() {
        *c = (a.coords[i] - base_weight * v.coords[i]) / norm;
    }
    Ok(u)
}

/// `sinh` of the hyperbolic angle between two unit tangents at `v`.
pub(crate) fn angle_between(chart: Chart, v: &[f64; 3], ua: &[f64; 3], ub: &[f64; 3]) -> f64 {
    let wedge = match chart {
        Chart::Minkowski => ua[0] * ub[1] - ua[1] * ub[0],
        _ => det3(v, ua, ub),
    };
    wedge.abs().asinh()
}

fn det3(a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Hyperbolic angle at `v` between the geodesics towards `a` and `b`.
///
/// Evaluated as `asinh |u_a ∧ u_b|`, which equals `arcosh |⟨u_a, u_b⟩|` for unit
/// timelike tangents and stays well conditioned near zero.
pub fn angle_at(k: Curvature, v: &ModelPoint, a: &ModelPoint, b: &ModelPoint) -> Result<f64, ModelError> {
    let ua = unit_tangent(k, v, a)?;
    let ub = unit_tangent(k, v, b)?;
    Ok(angle_between(k.chart(), &v.coords, &ua, &ub))
}

/// Sign of a hyperbolic angle: −1 for curves of equal time orientation, +1 otherwise.
pub fn sign_of(first: Orientation, second: Orientation) -> i8 {
    if first == second {
        -1
    } else {
        1
    }
}

/// Time-orientation reversing reflection fixing the base point and the axis.
pub fn reflect_time(p: &ModelPoint) -> ModelPoint {
    let mut coords = p.coords;
    match p.chart {
        Chart::Minkowski | Chart::DeSitter => coords[0] = -coords[0],
        Chart::AntiDeSitter => coords[1] = -coords[1],
    }
    ModelPoint::new(p.chart, coords, p.scale)
}

/// Time-orientation preserving isometry acting linearly on the embedding
/// coordinates, plus a translation for the flat chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    linear: [[f64; 3]; 3],
    shift: [f64; 3],
}

impl Default for Isometry {
    fn default() -> Self {
        Self::identity()
    }
}

impl Isometry {
    pub fn identity() -> Self {
        let mut linear = [[0.0; 3]; 3];
        for (i, row) in linear.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Isometry { linear, shift: [0.0; 3] }
    }

    fn plane(i: usize, j: usize, block: [[f64; 2]; 2]) -> Self {
        let mut g = Self::identity();
        g.linear[i][i] = block[0][0];
        g.linear[i][j] = block[0][1];
        g.linear[j][i] = block[1][0];
        g.linear[j][j] = block[1][1];
        g
    }

    fn hyperbolic(i: usize, j: usize, r: f64) -> Self {
        Self::plane(i, j, [[r.cosh(), r.sinh()], [r.sinh(), r.cosh()]])
    }

    fn circular(i: usize, j: usize, a: f64) -> Self {
        Self::plane(i, j, [[a.cos(), -a.sin()], [a.sin(), a.cos()]])
    }

    /// Boost mixing the time coordinate with the lateral coordinate.
    pub fn boost(chart: Chart, rapidity: f64) -> Self {
        match chart {
            Chart::Minkowski | Chart::DeSitter => Self::hyperbolic(0, 1, rapidity),
            Chart::AntiDeSitter => Self::hyperbolic(1, 2, rapidity),
        }
    }

    /// Second one-parameter subgroup: spatial rotation (de Sitter), boost in the
    /// (s, x) plane (anti-de Sitter); the identity on the plane.
    pub fn turn(chart: Chart, parameter: f64) -> Self {
        match chart {
            Chart::Minkowski => Self::identity(),
            Chart::DeSitter => Self::circular(1, 2, parameter),
            Chart::AntiDeSitter => Self::hyperbolic(0, 2, parameter),
        }
    }

    /// Time translation: an ordinary shift on the plane, a rotation of the
    /// (s, t) plane in anti-de Sitter, a boost along the y-axis in de Sitter.
    pub fn time_shift(chart: Chart, amount: f64) -> Self {
        match chart {
            Chart::Minkowski => Isometry { shift: [amount, 0.0, 0.0], ..Self::identity() },
            Chart::DeSitter => Self::hyperbolic(0, 2, amount),
            Chart::AntiDeSitter => Self::circular(0, 1, amount),
        }
    }

    /// Spatial translation of the plane (identity on the curved charts).
    pub fn space_shift(chart: Chart, amount: f64) -> Self {
        match chart {
            Chart::Minkowski => Isometry { shift: [0.0, amount, 0.0], ..Self::identity() },
            _ => Self::identity(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let mut linear = [[0.0; 3]; 3];
        let mut shift = self.shift;
        for i in 0..3 {
            for j in 0..3 {
                linear[i][j] = (0..3).map(|m| self.linear[i][m] * other.linear[m][j]).sum();
                shift[i] += self.linear[i][j] * other.shift[j];
            }
        }
        Isometry { linear, shift }
    }

    pub fn apply(&self, p: &ModelPoint) -> ModelPoint {
        let mut coords = [0.0; 3];
        for (i, c) in coords.iter_mut().enumerate() {
            *c = (0..3).map(|j| self.linear[i][j] * p.coords[j]).sum::<f64>() + self.shift[i];
        }
        if p.chart == Chart::Minkowski {
            coords[2] = 0.0;
        }
        ModelPoint::new(p.chart, coords, p.scale)
    }
}

pub fn apply_isometry(k: Curvature, g: &Isometry, p: &ModelPoint) -> Result<ModelPoint, ModelError> {
    if !k.owns(p) {
        return Err(ModelError::ChartMismatch);
    }
    Ok(g.apply(p))
}
