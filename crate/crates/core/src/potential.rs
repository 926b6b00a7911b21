//! The two-pole Aharonov–Bohm potential with circulation 1/2 at each pole.
//!
//! With poles `a- = (-a, 0)` and `a+ = (a, 0)` the potential is
//! `A = -A(a-) + A(a+)`, where `A(p)(x) = (-(x2 - p2), x1 - p1) / (2 |x - p|^2)`.
//! It is curl-free away from the poles and equals the gradient of the phase
//! `psi = (theta+ - theta-) / 2`, which jumps by `pi` across the segment
//! joining the poles. `exp(2 i psi)` is continuous there and serves as the
//! gauge of the antiunitary conjugation `K u = exp(2 i psi) conj(u)`.

use std::f64::consts::PI;

use crate::{Complex64, Error, Point, Result};

/// Poles at `(-a, 0)` and `(a, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PoleConfig {
    a: f64,
}

impl PoleConfig {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pole half-distance a = {a} must be positive"
            )));
        }
        Ok(PoleConfig { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn minus(&self) -> Point {
        [-self.a, 0.0]
    }

    pub fn plus(&self) -> Point {
        [self.a, 0.0]
    }

    pub fn poles(&self) -> [Point; 2] {
        [self.minus(), self.plus()]
    }
}

/// A vector potential that is curl-free away from finitely many poles.
///
/// Assembly only needs exact line integrals along straight edges, which
/// every potential here has in closed form.
pub trait VectorPotential: Sync {
    fn eval(&self, x: Point) -> Result<Point>;

    /// `integral of A . ds` along the straight segment from `p` to `q`.
    fn edge_circulation(&self, p: Point, q: Point) -> f64;

    fn poles(&self) -> Vec<Point>;
}

impl VectorPotential for PoleConfig {
    fn eval(&self, x: Point) -> Result<Point> {
        eval_a(self, x)
    }

    fn edge_circulation(&self, p: Point, q: Point) -> f64 {
        single_pole_circulation(self.plus(), p, q) - single_pole_circulation(self.minus(), p, q)
    }

    fn poles(&self) -> Vec<Point> {
        self.poles().to_vec()
    }
}

/// One pole of circulation 1/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinglePole {
    pub center: Point,
}

impl VectorPotential for SinglePole {
    fn eval(&self, x: Point) -> Result<Point> {
        eval_single_a(self.center, x)
    }

    fn edge_circulation(&self, p: Point, q: Point) -> f64 {
        single_pole_circulation(self.center, p, q)
    }

    fn poles(&self) -> Vec<Point> {
        vec![self.center]
    }
}

/// `A = 0`; assembling with it reproduces the Dirichlet Laplacian.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ZeroPotential;

impl VectorPotential for ZeroPotential {
    fn eval(&self, _x: Point) -> Result<Point> {
        Ok([0.0, 0.0])
    }

    fn edge_circulation(&self, _p: Point, _q: Point) -> f64 {
        0.0
    }

    fn poles(&self) -> Vec<Point> {
        Vec::new()
    }
}

/// Aharonov–Bohm potential of a single pole with circulation 1/2.
pub fn eval_single_a(pole: Point, x: Point) -> Result<Point> {
    let (dx, dy) = (x[0] - pole[0], x[1] - pole[1]);
    let r2 = dx * dx + dy * dy;
    if r2 == 0.0 {
        return Err(Error::AtPole(x[0], x[1]));
    }
    Ok([-0.5 * dy / r2, 0.5 * dx / r2])
}

pub fn eval_a(config: &PoleConfig, x: Point) -> Result<Point> {
    let m = eval_single_a(config.minus(), x)?;
    let p = eval_single_a(config.plus(), x)?;
    Ok([p[0] - m[0], p[1] - m[1]])
}

/// Principal angle of `x - pole` in `(-pi, pi]`.
fn principal_angle(pole: Point, x: Point) -> f64 {
    let t = (x[1] - pole[1]).atan2(x[0] - pole[0]);
    if t == -PI {
        PI
    } else {
        t
    }
}

/// `psi = (theta+ - theta-) / 2`; discontinuous only across the segment
/// between the poles, where it jumps by `pi`.
pub fn phase_psi(config: &PoleConfig, x: Point) -> Result<f64> {
    let a = config.a;
    if x[1].abs() <= 1e-12 && x[0].abs() <= a + 1e-12 {
        return Err(Error::OnCut(x[0], x[1]));
    }
    Ok(0.5 * (principal_angle(config.plus(), x) - principal_angle(config.minus(), x)))
}

/// `exp(2 i psi)`, continuous across the cut.
pub fn gauge_double(config: &PoleConfig, x: Point) -> Result<Complex64> {
    for p in config.poles() {
        if x == p {
            return Err(Error::AtPole(x[0], x[1]));
        }
    }
    let t = principal_angle(config.plus(), x) - principal_angle(config.minus(), x);
    Ok(Complex64::from_polar(1.0, t))
}

/// Exact line integral of a single circulation-1/2 potential along the
/// segment `p -> q`: half the signed angle subtended at the pole.
pub fn single_pole_circulation(pole: Point, p: Point, q: Point) -> f64 {
    let u = [p[0] - pole[0], p[1] - pole[1]];
    let v = [q[0] - pole[0], q[1] - pole[1]];
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    0.5 * cross.atan2(dot)
}

const GAUSS8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GAUSS8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

fn gauss8_segment(config: &PoleConfig, p: Point, q: Point) -> Result<f64> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let mut s = 0.0;
    for (x, w) in GAUSS8_NODES.iter().zip(GAUSS8_WEIGHTS) {
        let t = 0.5 * (1.0 + x);
        let a = eval_a(config, [p[0] + t * d[0], p[1] + t * d[1]])?;
        s += w * 0.5 * (a[0] * d[0] + a[1] * d[1]);
    }
    Ok(s)
}

fn pole_distance(config: &PoleConfig, p: Point, q: Point) -> f64 {
    config
        .poles()
        .iter()
        .map(|c| crate::geometry::point_segment_distance(*c, p, q))
        .fold(f64::INFINITY, f64::min)
}

fn adaptive_segment(
    config: &PoleConfig,
    p: Point,
    q: Point,
    whole: f64,
    depth: usize,
) -> Result<f64> {
    let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let left = gauss8_segment(config, p, m)?;
    let right = gauss8_segment(config, m, q)?;
    if depth == 0 || (left + right - whole).abs() <= 1e-14 {
        return Ok(left + right);
    }
    Ok(adaptive_segment(config, p, m, left, depth - 1)?
        + adaptive_segment(config, m, q, right, depth - 1)?)
}

/// `(1 / 2 pi)` times the circulation of `A` around a closed polyline.
///
/// Each segment is integrated by bisection with an 8-point Gauss rule until
/// the halves agree with the whole.
pub fn winding_integral(config: &PoleConfig, path: &[Point]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParameter(
            "path needs at least two points".into(),
        ));
    }
    let n = path.len();
    let closed = path[0] == path[n - 1];
    let segs = if closed { n - 1 } else { n };
    let mut total = 0.0;
    for i in 0..segs {
        let (p, q) = (path[i], path[(i + 1) % n]);
        let d = pole_distance(config, p, q);
        if d < 1e-9 {
            return Err(Error::AtPole(p[0], p[1]));
        }
        let whole = gauss8_segment(config, p, q)?;
        total += adaptive_segment(config, p, q, whole, 40)?;
    }
    Ok(total / (2.0 * PI))
}
