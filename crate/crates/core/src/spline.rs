//! Closed C² cubic spline through ordered points, parameterized by cumulative
//! chord length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{polyline_signed_area, Point2};
use crate::ordering::OrderedBoundary;

/// Shortest admissible chord between consecutive control points.
pub const MIN_CHORD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSpline {
    /// `s_0 = 0 < s_1 < ... < s_k`, where `s_k` is the period.
    knots: Vec<f64>,
    /// Per segment `[a, b, c, d]` for `a + b u + c u² + d u³`, `u = t - s_j`.
    coeffs_x: Vec<[f64; 4]>,
    coeffs_y: Vec<[f64; 4]>,
}

pub fn fit_periodic_cubic(ordered: &OrderedBoundary) -> Result<PeriodicSpline> {
    PeriodicSpline::through(&ordered.ordered_points())
}

impl PeriodicSpline {
    /// Fits the closed spline through `points` taken in the given order.
    pub fn through(points: &[Point2]) -> Result<Self> {
        let k = points.len();
        if k < 3 {
            return Err(Error::TooFewPoints { required: 3, got: k });
        }
        crate::geometry::check_finite(points)?;
        let chords: Vec<f64> = (0..k).map(|j| points[j].distance(points[(j + 1) % k])).collect();
        if let Some(j) = chords.iter().position(|&h| h < MIN_CHORD) {
            return Err(Error::SingularSystem(format!("chord {j} is shorter than {MIN_CHORD:e}")));
        }
        let diameter: f64 = chords.iter().sum();
        let area = polyline_signed_area(points)?;
        if area.abs() < 1e-12 * diameter * diameter {
            return Err(Error::SingularSystem("control polygon encloses no area (collinear points)".into()));
        }

        let mut knots = Vec::with_capacity(k + 1);
        knots.push(0.0);
        for h in &chords {
            knots.push(knots.last().unwrap() + h);
        }

        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let coeffs_x = periodic_coefficients(&xs, &chords);
        let coeffs_y = periodic_coefficients(&ys, &chords);
        Ok(Self { knots, coeffs_x, coeffs_y })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn knot(&self, j: usize) -> f64 {
        self.knots[j]
    }

    pub fn period(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.coeffs_x.len()
    }

    pub fn coeffs_x(&self) -> &[[f64; 4]] {
        &self.coeffs_x
    }

    pub fn coeffs_y(&self) -> &[[f64; 4]] {
        &self.coeffs_y
    }

    /// The interpolated points `x'_j = γ(s_j)`.
    pub fn control_points(&self) -> Vec<Point2> {
        (0..self.segment_count()).map(|j| Point2::new(self.coeffs_x[j][0], self.coeffs_y[j][0])).collect()
    }

    pub fn wrap(&self, t: f64) -> f64 {
        let w = t.rem_euclid(self.period());
        if w >= self.period() {
            0.0
        } else {
            w
        }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let t = self.wrap(t);
        let seg = self.knots[1..].partition_point(|&s| s <= t).min(self.segment_count() - 1);
        (seg, t - self.knots[seg])
    }

    pub fn eval(&self, t: f64) -> Point2 {
        let (j, u) = self.locate(t);
        Point2::new(horner(&self.coeffs_x[j], u), horner(&self.coeffs_y[j], u))
    }

    /// First (`order = 1`) or second (`order = 2`) derivative at `t`. Any
    /// other order yields the zero vector for `order >= 4` and the constant
    /// third derivative for `order = 3`.
    pub fn eval_derivative(&self, t: f64, order: u8) -> Point2 {
        let (j, u) = self.locate(t);
        Point2::new(derivative(&self.coeffs_x[j], u, order), derivative(&self.coeffs_y[j], u, order))
    }

    pub fn tangent(&self, t: f64) -> Point2 {
        self.eval_derivative(t, 1)
    }

    pub fn second_derivative(&self, t: f64) -> Point2 {
        self.eval_derivative(t, 2)
    }

    fn speed(&self, t: f64) -> f64 {
        self.eval_derivative(t, 1).norm()
    }

    /// Curve length between `t0` and `t1 >= t0` (at most one period apart).
    pub fn arc_length(&self, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let period = self.period();
        let full = ((t1 - t0) / period).floor();
        let mut total = if full >= 1.0 { full * self.total_length() } else { 0.0 };
        let mut a = t0 + full * period;
        let end = t1;
        // Integrate piecewise between knots so each piece is polynomial.
        while a < end {
            let (seg, u) = self.locate(a);
            let seg_end = a + (self.knots[seg + 1] - self.knots[seg] - u);
            let b = seg_end.min(end);
            if b > a {
                total += adaptive_gauss(&|t| self.speed(t), a, b, 1e-12 * (b - a).max(1e-300), 0);
            }
            if b <= a {
                break;
            }
            a = b;
        }
        total
    }

    pub fn total_length(&self) -> f64 {
        (0..self.segment_count()).map(|j| self.segment_length(j, self.knots[j + 1] - self.knots[j])).sum()
    }

    fn segment_speed(&self, j: usize, u: f64) -> f64 {
        Point2::new(derivative(&self.coeffs_x[j], u, 1), derivative(&self.coeffs_y[j], u, 1)).norm()
    }

    /// Length of segment `j` from its start to local offset `u`.
    fn segment_length(&self, j: usize, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let f = |v: f64| self.segment_speed(j, v);
        adaptive_gauss(&f, 0.0, u, 1e-13 * u, 0)
    }

    /// Parameter `t >= t0` at which the arc length from `t0` reaches `length`.
    pub fn parameter_at_length(&self, t0: f64, length: f64) -> f64 {
        if length <= 0.0 {
            return t0;
        }
        let (mut lo, mut hi) = (t0, t0 + self.period() * 1.0001);
        let mut t = t0 + length.min(hi - t0);
        for _ in 0..100 {
            let residual = self.arc_length(t0, t) - length;
            if residual.abs() < 1e-13 * length.max(1.0) {
                return t;
            }
            if residual > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let step = residual / self.speed(t).max(1e-300);
            let next = t - step;
            t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 * self.period() {
                break;
            }
        }
        t
    }
}

/// Cumulative per-segment arc lengths for fast length/parameter conversion
/// from `s_0`.
#[derive(Debug, Clone)]
pub struct ArcLengthTable<'a> {
    spline: &'a PeriodicSpline,
    /// `cumulative[j]` is the curve length from `s_0` to `s_j`.
    cumulative: Vec<f64>,
}

impl<'a> ArcLengthTable<'a> {
    pub fn new(spline: &'a PeriodicSpline) -> Self {
        let mut cumulative = Vec::with_capacity(spline.segment_count() + 1);
        cumulative.push(0.0);
        for j in 0..spline.segment_count() {
            let len = spline.segment_length(j, spline.knots[j + 1] - spline.knots[j]);
            cumulative.push(cumulative[j] + len);
        }
        Self { spline, cumulative }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Curve length from `s_0` to `t` in `[0, period]`.
    pub fn length_at(&self, t: f64) -> f64 {
        if t >= self.spline.period() {
            return self.total();
        }
        let t = t.max(0.0);
        let j = self.spline.knots[1..].partition_point(|&s| s <= t).min(self.spline.segment_count() - 1);
        self.cumulative[j] + self.spline.segment_length(j, t - self.spline.knots[j])
    }

    /// Parameter in `[0, period]` at curve length `length` from `s_0`.
    pub fn parameter_at(&self, length: f64) -> f64 {
        let length = length.clamp(0.0, self.total());
        let j = self.cumulative[1..].partition_point(|&c| c <= length).min(self.spline.segment_count() - 1);
        let (a, b) = (self.spline.knots[j], self.spline.knots[j + 1]);
        let target = length - self.cumulative[j];
        let (mut lo, mut hi) = (0.0, b - a);
        let mut u = (target / (self.cumulative[j + 1] - self.cumulative[j]).max(1e-300)) * (b - a);
        for _ in 0..100 {
            let residual = self.spline.segment_length(j, u) - target;
            if residual.abs() <= 1e-14 * self.total() {
                break;
            }
            if residual > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let speed = self.spline.segment_speed(j, u);
            let next = u - residual / speed.max(1e-300);
            u = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 1e-16 * (b - a) {
                break;
            }
        }
        a + u
    }
}

fn horner(c: &[f64; 4], u: f64) -> f64 {
    ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
}

fn derivative(c: &[f64; 4], u: f64, order: u8) -> f64 {
    match order {
        0 => horner(c, u),
        1 => (3.0 * c[3] * u + 2.0 * c[2]) * u + c[1],
        2 => 6.0 * c[3] * u + 2.0 * c[2],
        3 => 6.0 * c[3],
        _ => 0.0,
    }
}

/// Coefficients of the periodic cubic through `values` with segment lengths `h`.
fn periodic_coefficients(values: &[f64], h: &[f64]) -> Vec<[f64; 4]> {
    let k = values.len();
    // Second derivatives m_j satisfy, cyclically,
    // h_{j-1} m_{j-1} + 2 (h_{j-1} + h_j) m_j + h_j m_{j+1} = 6 (Δ_j - Δ_{j-1}).
    let slope: Vec<f64> = (0..k).map(|j| (values[(j + 1) % k] - values[j]) / h[j]).collect();
    let sub: Vec<f64> = (0..k).map(|j| h[(j + k - 1) % k]).collect();
    let diag: Vec<f64> = (0..k).map(|j| 2.0 * (h[(j + k - 1) % k] + h[j])).collect();
    let sup: Vec<f64> = h.to_vec();
    let rhs: Vec<f64> = (0..k).map(|j| 6.0 * (slope[j] - slope[(j + k - 1) % k])).collect();
    let m = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs);
    (0..k)
        .map(|j| {
            let (m0, m1, hj) = (m[j], m[(j + 1) % k], h[j]);
            [values[j], slope[j] - hj * (2.0 * m0 + m1) / 6.0, 0.5 * m0, (m1 - m0) / (6.0 * hj)]
        })
        .collect()
}

/// Solves the cyclic tridiagonal system (row `i`: `sub[i] x[i-1] + diag[i]
/// x[i] + sup[i] x[i+1] = rhs[i]`, indices mod n) via Sherman-Morrison on top
/// of the Thomas algorithm. The spline matrix is strictly diagonally
/// dominant, so no pivoting is needed.
fn solve_cyclic_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 3 {
        // The corner entries coincide with the off-diagonals; solve densely.
        let a = nalgebra::Matrix3::new(
            diag[0], sup[0] , sub[0],
            sub[1], diag[1], sup[1],
            sup[2], sub[2], diag[2],
        );
        let x = a.lu().solve(&nalgebra::Vector3::new(rhs[0], rhs[1], rhs[2])).expect("diagonally dominant");
        return vec![x[0], x[1], x[2]];
    }
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= sup[n - 1] * sub[0] / gamma;
    let x = thomas(sub, &b, sup, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let z = thomas(sub, &b, sup, &u);
    let v0 = 1.0;
    let vn = sub[0] / gamma;
    let factor = (v0 * x[0] + vn * x[n - 1]) / (1.0 + v0 * z[0] + vn * z[n - 1]);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i < n - 1 { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

const GL5_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL5_NODES.iter().zip(GL5_WEIGHTS).map(|(x, w)| w * f(c + r * x)).sum::<f64>()
}

/// Adaptive 5-point Gauss-Legendre with absolute tolerance `tol`.
fn adaptive_gauss(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let whole = gauss5(f, a, b);
    let mid = 0.5 * (a + b);
    let halves = gauss5(f, a, mid) + gauss5(f, mid, b);
    if (whole - halves).abs() <= tol || depth >= 30 {
        halves
    } else {
        adaptive_gauss(f, a, mid, 0.5 * tol, depth + 1) + adaptive_gauss(f, mid, b, 0.5 * tol, depth + 1)
    }
}
