//! A reconstructed closed curve that answers projection and containment
//! queries.
//!
//! The closest curve point to `x` is searched only near the sample point
//! nearest to `x`: if that sample sits at curve position `p`, the parameter
//! is bracketed by the neighboring knots `s_{p-1}`, `s_{p+1}`. Containment
//! is the sign of `<x - γ(t_min), n(t_min)>`, negative meaning inside.

use crate::error::{Error, Result};
use crate::geometry::{centroid, point_in_polygon, polyline_signed_area, Point2};
use crate::ordering::{order_points, OrderedBoundary};
use crate::spline::{fit_periodic_cubic, PeriodicSpline};

/// Below this magnitude the orientation scalar product is treated as zero.
pub const ORIENTATION_TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Which normal the containment test dots against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContainmentRule {
    /// `c·γ''(t_min)` everywhere. Misclassifies points whose closest curve
    /// point lies on a concave stretch, where the curvature vector points out
    /// of the domain.
    CurvatureVerbatim,
    /// [`ReconstructedDomain::outward_normal`]: `c·γ''` where it agrees with
    /// the area-oriented tangent normal, the tangent normal elsewhere.
    #[default]
    Guarded,
}

#[derive(Debug, Clone)]
pub struct ReconstructedDomain {
    ordered: OrderedBoundary,
    spline: PeriodicSpline,
    orientation_c: f64,
    interior_probe: Point2,
    /// +1 when the ordered control polygon runs counter-clockwise.
    winding: f64,
    rule: ContainmentRule,
}

/// Orientation sign `c = -sgn(<probe - γ(t), γ''(t)>)` taken at the probe's
/// closest curve point.
pub fn orientation_constant(ordered: &OrderedBoundary, spline: &PeriodicSpline, interior_probe: Point2) -> Result<f64> {
    let t = project(ordered, spline, interior_probe);
    let value = (interior_probe - spline.eval(t)).dot(spline.second_derivative(t));
    if value.abs() < ORIENTATION_TOLERANCE {
        return Err(Error::AmbiguousOrientation { value });
    }
    Ok(-value.signum())
}

impl ReconstructedDomain {
    /// Orders, fits and orients an unordered boundary sample.
    pub fn from_unordered(points: Vec<Point2>) -> Result<Self> {
        Self::new(order_points(points)?)
    }

    /// Fits the spline and picks an interior probe automatically.
    pub fn new(ordered: OrderedBoundary) -> Result<Self> {
        let spline = fit_periodic_cubic(&ordered)?;
        let mut dom = Self::assemble(ordered, spline)?;
        dom.auto_orient()?;
        Ok(dom)
    }

    /// Fits the spline and orients it with a caller-supplied interior point.
    pub fn with_probe(ordered: OrderedBoundary, interior_probe: Point2) -> Result<Self> {
        let spline = fit_periodic_cubic(&ordered)?;
        let mut dom = Self::assemble(ordered, spline)?;
        dom.orientation_c = orientation_constant(&dom.ordered, &dom.spline, interior_probe)?;
        dom.interior_probe = interior_probe;
        Ok(dom)
    }

    pub fn with_rule(mut self, rule: ContainmentRule) -> Self {
        self.rule = rule;
        self
    }

    fn assemble(ordered: OrderedBoundary, spline: PeriodicSpline) -> Result<Self> {
        let winding = polyline_signed_area(&ordered.ordered_points())?.signum();
        Ok(Self { ordered, spline, orientation_c: 0.0, interior_probe: Point2::ORIGIN, winding, rule: ContainmentRule::default() })
    }

    /// Tries the centroid first, then points just inside the most strongly
    /// convex knots. A probe is accepted when it lies inside the control
    /// polygon, its closest curve point is on a convex stretch, and the
    /// orientation product is not ambiguous.
    fn auto_orient(&mut self) -> Result<()> {
        let control = self.ordered.ordered_points();
        let center = centroid(&control);
        let mut candidates = vec![center];

        let k = self.spline.segment_count();
        let mut convex_knots: Vec<(f64, usize)> = (0..k)
            .map(|j| {
                let t = self.spline.knot(j);
                (-self.spline.second_derivative(t).dot(self.tangent_normal(t)), j)
            })
            .filter(|&(inward, _)| inward > 0.0)
            .collect();
        convex_knots.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &convex_knots {
            let t = self.spline.knot(j);
            let prev = if j == 0 { self.spline.period() - self.spline.knot(k - 1) } else { t - self.spline.knot(j - 1) };
            let next = self.spline.knot(j + 1) - self.spline.knot(j);
            let inset = self.spline.eval(t) - self.tangent_normal(t) * (0.25 * prev.min(next));
            candidates.push(center.midpoint(inset));
            candidates.push(inset);
        }

        let mut fallback = None;
        for probe in candidates {
            if !point_in_polygon(probe, &control) {
                continue;
            }
            let Ok(c) = orientation_constant(&self.ordered, &self.spline, probe) else { continue };
            let t = self.nearest_parameter(probe);
            let convex_here = self.spline.second_derivative(t).dot(self.tangent_normal(t)) < 0.0;
            self.orientation_c = c;
            self.interior_probe = probe;
            if convex_here && self.contains(probe) {
                return Ok(());
            }
            fallback.get_or_insert((probe, c));
        }
        match fallback {
            Some((probe, c)) => {
                self.orientation_c = c;
                self.interior_probe = probe;
                Ok(())
            }
            None => Err(Error::AmbiguousOrientation { value: 0.0 }),
        }
    }

    pub fn spline(&self) -> &PeriodicSpline {
        &self.spline
    }

    pub fn ordered(&self) -> &OrderedBoundary {
        &self.ordered
    }

    pub fn orientation_c(&self) -> f64 {
        self.orientation_c
    }

    pub fn interior_probe(&self) -> Point2 {
        self.interior_probe
    }

    pub fn rule(&self) -> ContainmentRule {
        self.rule
    }

    /// +1 for a counter-clockwise parameterization, -1 otherwise.
    pub fn winding(&self) -> f64 {
        self.winding
    }

    pub fn eval(&self, t: f64) -> Point2 {
        self.spline.eval(t)
    }

    /// Parameter of the closest curve point to `x`.
    pub fn nearest_parameter(&self, x: Point2) -> f64 {
        project(&self.ordered, &self.spline, x)
    }

    pub fn closest_point(&self, x: Point2) -> Point2 {
        self.spline.eval(self.nearest_parameter(x))
    }

    pub fn distance(&self, x: Point2) -> f64 {
        x.distance(self.closest_point(x))
    }

    pub fn contains(&self, x: Point2) -> bool {
        let t = self.nearest_parameter(x);
        let normal = match self.rule {
            ContainmentRule::CurvatureVerbatim => self.spline.second_derivative(t) * self.orientation_c,
            ContainmentRule::Guarded => self.outward_normal(t),
        };
        (x - self.spline.eval(t)).dot(normal) < 0.0
    }

    /// Unit normal from rotating the tangent a quarter turn away from the
    /// control polygon's interior.
    pub fn tangent_normal(&self, t: f64) -> Point2 {
        -(self.spline.tangent(t).perp().normalized() * self.winding)
    }

    /// Unit outward normal: the normalized `c·γ''(t)` when the curvature is
    /// resolvable and agrees with the tangent normal, otherwise the tangent
    /// normal itself.
    pub fn outward_normal(&self, t: f64) -> Point2 {
        let fallback = self.tangent_normal(t);
        let curvature = self.spline.second_derivative(t) * self.orientation_c;
        if curvature.norm() > 1e-12 && curvature.dot(fallback) > 0.0 {
            curvature.normalized()
        } else {
            fallback
        }
    }

    /// Chord length of the spline segment containing `t`.
    pub fn local_spacing(&self, t: f64) -> f64 {
        let t = self.spline.wrap(t);
        let knots = self.spline.knots();
        let j = knots[1..].partition_point(|&s| s <= t).min(self.spline.segment_count() - 1);
        knots[j + 1] - knots[j]
    }

    pub fn max_chord(&self) -> f64 {
        self.spline.knots().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Dense polyline through the curve, `per_segment` points per segment.
    pub fn sample_polyline(&self, per_segment: usize) -> Vec<Point2> {
        let knots = self.spline.knots();
        let mut out = Vec::with_capacity(per_segment * self.spline.segment_count());
        for w in knots.windows(2) {
            for i in 0..per_segment {
                out.push(self.spline.eval(w[0] + (w[1] - w[0]) * i as f64 / per_segment as f64));
            }
        }
        out
    }
}

fn project(ordered: &OrderedBoundary, spline: &PeriodicSpline, x: Point2) -> f64 {
    let (q, _) = ordered.index().nearest(x);
    let p = ordered.sigma_inv()[q];
    let k = spline.segment_count();
    let s_p = spline.knot(p);
    let lo = s_p - (spline.knot(if p == 0 { k } else { p }) - spline.knot(if p == 0 { k - 1 } else { p - 1 }));
    let hi = spline.knot(p + 1);

    let dist2 = |t: f64| x.distance_squared(spline.eval(t));
    // Stationarity residual of the distance; positive where the distance decreases.
    let residual = |t: f64| (x - spline.eval(t)).dot(spline.tangent(t));
    let tol = 1e-12 * spline.period();

    let mut best = (s_p, dist2(s_p));
    let consider = |t: f64, best: &mut (f64, f64)| {
        let d = dist2(t);
        if d < best.1 {
            *best = (t, d);
        }
    };
    consider(lo, &mut best);
    consider(hi, &mut best);

    let g_lo = residual(lo);
    let g_mid = residual(s_p);
    let g_hi = residual(hi);
    let mut bracketed = false;
    for (a, b, ga, gb) in [(lo, s_p, g_lo, g_mid), (s_p, hi, g_mid, g_hi)] {
        if ga > 0.0 && gb < 0.0 {
            consider(bisect(&residual, a, b, tol), &mut best);
            bracketed = true;
        }
    }
    if !bracketed && g_mid != 0.0 {
        consider(golden_section(&dist2, lo, hi, tol), &mut best);
    }
    spline.wrap(best.0)
}

/// Root of `g` on `[a, b]` given `g(a) > 0 > g(b)`.
fn bisect(g: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    for _ in 0..MAX_ITERATIONS {
        let m = 0.5 * (a + b);
        if b - a <= tol {
            return m;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..MAX_ITERATIONS {
        if b - a <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
