use super::point::CartPoint;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Curve degree used for pipe axes throughout the crate.
pub const PIPE_DEGREE: usize = 3;

/// Relative convergence target for adaptive arc-length refinement.
const ARC_REL_TOL: f64 = 1e-6;

/// How the knot vector treats the curve end.
///
/// `OpenEnd` clamps the start only and places interior knots at consecutive
/// integers, so appending one control point extends the valid domain by
/// exactly one span. `ClampedBoth` clamps both ends and interpolates the
/// first and last control points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndMode {
    OpenEnd,
    ClampedBoth,
}

/// Build a knot vector for `n_ctrl` control points of the given degree.
///
/// `ClampedBoth`: start and end knots with multiplicity degree+1, uniform
/// integer interior knots. `OpenEnd`: start multiplicity degree+1 at 0,
/// then consecutive integers 1, 2, ...; the valid domain is
/// [0, n_ctrl - degree].
pub fn knot_vector(n_ctrl: usize, degree: usize, mode: EndMode) -> Result<Vec<f64>> {
    if n_ctrl < degree + 1 {
        return Err(Error::Size(format!(
            "degree {} curve needs at least {} control points, got {}",
            degree,
            degree + 1,
            n_ctrl
        )));
    }
    let mut knots = Vec::with_capacity(n_ctrl + degree + 1);
    match mode {
        EndMode::ClampedBoth => {
            let end = (n_ctrl - degree) as f64;
            knots.extend(std::iter::repeat(0.0).take(degree + 1));
            for i in 1..(n_ctrl - degree) {
                knots.push(i as f64);
            }
            knots.extend(std::iter::repeat(end).take(degree + 1));
        }
        EndMode::OpenEnd => {
            knots.extend(std::iter::repeat(0.0).take(degree + 1));
            for i in 1..=n_ctrl {
                knots.push(i as f64);
            }
        }
    }
    debug_assert_eq!(knots.len(), n_ctrl + degree + 1);
    Ok(knots)
}

/// Valid parameter domain for a knot vector of the given degree.
pub fn knot_domain(knots: &[f64], degree: usize) -> (f64, f64) {
    let n_ctrl = knots.len() - degree - 1;
    (knots[degree], knots[n_ctrl])
}

fn check_domain(knots: &[f64], degree: usize, u: f64) -> Result<f64> {
    let (lo, hi) = knot_domain(knots, degree);
    if u < lo - 1e-9 || u > hi + 1e-9 {
        return Err(Error::Domain {
            value: u,
            lo,
            hi,
        });
    }
    Ok(u.clamp(lo, hi))
}

/// Index of the knot span containing `u`: the largest `i` with
/// knots[i] <= u, clamped into [degree, n_ctrl - 1] so the span always
/// addresses existing control points (this also resolves the right
/// domain end).
fn find_span(knots: &[f64], degree: usize, u: f64) -> usize {
    let n_ctrl = knots.len() - degree - 1;
    if u >= knots[n_ctrl] {
        // domain end: walk back over any repeated end knots
        let mut i = n_ctrl - 1;
        while i > degree && knots[i] >= knots[n_ctrl] {
            i -= 1;
        }
        return i;
    }
    let idx = knots.partition_point(|&k| k <= u);
    idx.saturating_sub(1).clamp(degree, n_ctrl - 1)
}

/// One term of the two-term recursion; a zero denominator contributes zero.
#[inline]
fn rec_term(num: f64, den: f64, val: f64) -> f64 {
    if val == 0.0 || den == 0.0 {
        0.0
    } else {
        num / den * val
    }
}

fn basis_rows(knots: &[f64], degree: usize, u: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if knots.len() < degree + 2 {
        return Err(Error::Size(format!(
            "knot vector of length {} too short for degree {}",
            knots.len(),
            degree
        )));
    }
    let u = check_domain(knots, degree, u)?;
    let m = knots.len() - 1;
    let span = find_span(knots, degree, u);

    let mut prev = vec![0.0; m];
    prev[span] = 1.0;
    let mut lower = prev.clone();
    for d in 1..=degree {
        let mut cur = vec![0.0; m - d];
        for i in 0..(m - d) {
            let left = rec_term(u - knots[i], knots[i + d] - knots[i], prev[i]);
            let right = rec_term(
                knots[i + d + 1] - u,
                knots[i + d + 1] - knots[i + 1],
                prev[i + 1],
            );
            cur[i] = left + right;
        }
        if d == degree {
            lower = prev;
        }
        prev = cur;
    }
    if degree == 0 {
        lower = vec![0.0; m];
    }
    Ok((prev, lower))
}

/// All basis function values N_{i,degree}(u) for i = 0..n_ctrl-1.
pub fn basis_functions(knots: &[f64], degree: usize, u: f64) -> Result<Vec<f64>> {
    basis_rows(knots, degree, u).map(|(row, _)| row)
}

/// First derivatives N'_{i,degree}(u) for all i, from the degree-1 row.
pub fn basis_derivatives(knots: &[f64], degree: usize, u: f64) -> Result<Vec<f64>> {
    if degree == 0 {
        return Ok(vec![0.0; knots.len() - 1]);
    }
    let (_, lower) = basis_rows(knots, degree, u)?;
    let n_ctrl = knots.len() - degree - 1;
    let p = degree as f64;
    let mut out = vec![0.0; n_ctrl];
    for (i, slot) in out.iter_mut().enumerate() {
        let a = rec_term(p, knots[i + degree] - knots[i], lower[i]);
        let b = rec_term(p, knots[i + degree + 1] - knots[i + 1], lower[i + 1]);
        *slot = a - b;
    }
    Ok(out)
}

/// Rational B-spline curve in 3D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NurbsPath {
    pub degree: usize,
    pub control_points: Vec<CartPoint>,
    pub weights: Vec<f64>,
    pub knots: Vec<f64>,
    pub end_mode: EndMode,
}

impl NurbsPath {
    pub fn new(
        degree: usize,
        control_points: Vec<CartPoint>,
        weights: Vec<f64>,
        knots: Vec<f64>,
        end_mode: EndMode,
    ) -> Result<Self> {
        let n = control_points.len();
        if n < degree + 1 {
            return Err(Error::Size(format!(
                "degree {} curve needs at least {} control points, got {}",
                degree,
                degree + 1,
                n
            )));
        }
        if weights.len() != n {
            return Err(Error::Size(format!(
                "{} weights for {} control points",
                weights.len(),
                n
            )));
        }
        if knots.len() != n + degree + 1 {
            return Err(Error::Size(format!(
                "knot vector length {} != {} + {} + 1",
                knots.len(),
                n,
                degree
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::Config("weights must be positive".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config("knot vector must be non-decreasing".into()));
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("control points must be finite".into()));
        }
        Ok(NurbsPath {
            degree,
            control_points,
            weights,
            knots,
            end_mode,
        })
    }

    /// Build the curve with a generated knot vector for the given end mode.
    pub fn with_mode(
        degree: usize,
        control_points: Vec<CartPoint>,
        weights: Vec<f64>,
        end_mode: EndMode,
    ) -> Result<Self> {
        let knots = knot_vector(control_points.len(), degree, end_mode)?;
        NurbsPath::new(degree, control_points, weights, knots, end_mode)
    }

    pub fn domain(&self) -> (f64, f64) {
        knot_domain(&self.knots, self.degree)
    }

    /// Curve point at parameter `u` (rational combination of the active
    /// control points).
    pub fn eval(&self, u: f64) -> Result<CartPoint> {
        let basis = basis_functions(&self.knots, self.degree, u)?;
        let mut acc = CartPoint::ZERO;
        let mut w_acc = 0.0;
        for ((n, &w), p) in basis
            .iter()
            .zip(self.weights.iter())
            .zip(self.control_points.iter())
        {
            if *n != 0.0 {
                let nw = n * w;
                acc = acc + p.scale(nw);
                w_acc += nw;
            }
        }
        Ok(acc.scale(1.0 / w_acc))
    }

    /// First derivative of the curve at `u` (not normalized).
    pub fn tangent(&self, u: f64) -> Result<CartPoint> {
        let basis = basis_functions(&self.knots, self.degree, u)?;
        let dbasis = basis_derivatives(&self.knots, self.degree, u)?;
        let mut a = CartPoint::ZERO;
        let mut w = 0.0;
        let mut da = CartPoint::ZERO;
        let mut dw = 0.0;
        for i in 0..self.control_points.len() {
            let wi = self.weights[i];
            let p = self.control_points[i];
            a = a + p.scale(basis[i] * wi);
            w += basis[i] * wi;
            da = da + p.scale(dbasis[i] * wi);
            dw += dbasis[i] * wi;
        }
        let c = a.scale(1.0 / w);
        Ok((da - c.scale(dw)).scale(1.0 / w))
    }

    /// Cumulative chord table over [u_a, u_b], refined until the total
    /// length converges to ARC_REL_TOL and every chord is at most `dl`.
    fn chord_table(&self, u_a: f64, u_b: f64, dl: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if dl <= 0.0 {
            return Err(Error::Config(format!("sampling interval {dl} must be > 0")));
        }
        let u_a = check_domain(&self.knots, self.degree, u_a)?;
        let u_b = check_domain(&self.knots, self.degree, u_b)?;
        if u_b < u_a {
            return Err(Error::Domain {
                value: u_b,
                lo: u_a,
                hi: self.domain().1,
            });
        }

        let mut n = 8usize;
        let mut prev_len = f64::INFINITY;
        loop {
            let mut params = Vec::with_capacity(n + 1);
            let mut cum = Vec::with_capacity(n + 1);
            let mut total = 0.0;
            let mut max_chord: f64 = 0.0;
            let mut last = self.eval(u_a)?;
            params.push(u_a);
            cum.push(0.0);
            for i in 1..=n {
                let u = u_a + (u_b - u_a) * i as f64 / n as f64;
                let p = self.eval(u)?;
                let c = last.dist(p);
                total += c;
                max_chord = max_chord.max(c);
                params.push(u);
                cum.push(total);
                last = p;
            }
            let converged = (total - prev_len).abs() <= ARC_REL_TOL * total.max(1e-12);
            if (converged && max_chord <= dl) || n >= (1 << 20) {
                return Ok((params, cum));
            }
            prev_len = total;
            n *= 2;
        }
    }

    /// Arc length of the curve between two parameters, by adaptive chord
    /// summation with chord spacing capped at `dl`.
    pub fn arc_length(&self, u_a: f64, u_b: f64, dl: f64) -> Result<f64> {
        if u_a == u_b {
            check_domain(&self.knots, self.degree, u_a)?;
            if dl <= 0.0 {
                return Err(Error::Config(format!("sampling interval {dl} must be > 0")));
            }
            return Ok(0.0);
        }
        let (_, cum) = self.chord_table(u_a, u_b, dl)?;
        Ok(*cum.last().unwrap())
    }

    /// Points along the curve at (approximately) equal arc spacing `dl`.
    /// Both endpoints are included; the final interval may be shorter.
    pub fn sample_by_arclength(&self, u_a: f64, u_b: f64, dl: f64) -> Result<Vec<CartPoint>> {
        Ok(self.sample_with_length(u_a, u_b, dl)?.0)
    }

    /// Equal-arc-spacing samples together with the measured segment length.
    pub fn sample_with_length(
        &self,
        u_a: f64,
        u_b: f64,
        dl: f64,
    ) -> Result<(Vec<CartPoint>, f64)> {
        if u_a == u_b {
            check_domain(&self.knots, self.degree, u_a)?;
            if dl <= 0.0 {
                return Err(Error::Config(format!("sampling interval {dl} must be > 0")));
            }
            return Ok((vec![self.eval(u_a)?], 0.0));
        }
        let (params, cum) = self.chord_table(u_a, u_b, dl)?;
        let total = *cum.last().unwrap();
        let eps = 1e-6 * dl;
        let k = (total / dl + 1e-9).floor() as usize;
        let mut targets: Vec<f64> = (0..=k).map(|i| i as f64 * dl).collect();
        if total - k as f64 * dl > eps {
            targets.push(total);
        } else if let Some(last) = targets.last_mut() {
            *last = total;
        }

        let mut out = Vec::with_capacity(targets.len());
        for &s in &targets {
            let u = invert_cum(&params, &cum, s);
            out.push(self.eval(u)?);
        }
        Ok((out, total))
    }
}

/// Parameter at cumulative arc position `s` by linear interpolation in the
/// chord table.
fn invert_cum(params: &[f64], cum: &[f64], s: f64) -> f64 {
    let total = *cum.last().unwrap();
    if s <= 0.0 {
        return params[0];
    }
    if s >= total {
        return *params.last().unwrap();
    }
    let idx = cum.partition_point(|&c| c < s);
    let (c0, c1) = (cum[idx - 1], cum[idx]);
    let (u0, u1) = (params[idx - 1], params[idx]);
    if c1 > c0 {
        u0 + (u1 - u0) * (s - c0) / (c1 - c0)
    } else {
        u0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::FRAC_PI_2;

    /// Non-rational de Boor evaluation, independent of the basis-function
    /// path, used as an oracle for eval with unit weights.
    fn de_boor(knots: &[f64], degree: usize, ctrl: &[CartPoint], u: f64) -> CartPoint {
        let k = find_span(knots, degree, u);
        let mut d: Vec<CartPoint> = (0..=degree)
            .map(|j| ctrl[j + k - degree])
            .collect();
        for r in 1..=degree {
            for j in (r..=degree).rev() {
                let i = j + k - degree;
                let den = knots[i + degree - r + 1] - knots[i];
                let alpha = if den == 0.0 { 0.0 } else { (u - knots[i]) / den };
                d[j] = d[j - 1].scale(1.0 - alpha) + d[j].scale(alpha);
            }
        }
        d[degree]
    }

    fn quarter_circle() -> NurbsPath {
        let s = std::f64::consts::SQRT_2 / 2.0;
        NurbsPath::new(
            2,
            vec![
                CartPoint::new(1.0, 0.0, 0.0),
                CartPoint::new(1.0, 1.0, 0.0),
                CartPoint::new(0.0, 1.0, 0.0),
            ],
            vec![1.0, s, 1.0],
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            EndMode::ClampedBoth,
        )
        .unwrap()
    }

    #[test]
    fn degree_zero_indicator() {
        let b = basis_functions(&[0.0, 1.0], 0, 0.5).unwrap();
        assert_eq!(b, vec![1.0]);
    }

    #[test]
    fn cubic_bezier_is_bernstein() {
        let knots = vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0];
        let b = basis_functions(&knots, 3, 0.5).unwrap();
        let expected = [0.125, 0.375, 0.375, 0.125];
        for (got, want) in b.iter().zip(expected.iter()) {
            assert!((got - want).abs() < 1e-12, "{:?}", b);
        }
        // endpoints
        let b0 = basis_functions(&knots, 3, 0.0).unwrap();
        assert!((b0[0] - 1.0).abs() < 1e-12);
        let b1 = basis_functions(&knots, 3, 1.0).unwrap();
        assert!((b1[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_domain_rejected() {
        let knots = vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0];
        assert!(basis_functions(&knots, 3, -0.5).is_err());
        assert!(basis_functions(&knots, 3, 1.5).is_err());
        assert!(basis_functions(&knots, 3, 0.999).is_ok());
    }

    #[test]
    fn knot_vector_examples() {
        let k = knot_vector(4, 3, EndMode::ClampedBoth).unwrap();
        assert_eq!(k, vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]);

        let k = knot_vector(6, 3, EndMode::OpenEnd).unwrap();
        assert_eq!(k, vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(knot_domain(&k, 3), (0.0, 3.0));

        // one new span per added control point
        let k4 = knot_vector(4, 3, EndMode::OpenEnd).unwrap();
        assert_eq!(knot_domain(&k4, 3), (0.0, 1.0));
        let k5 = knot_vector(5, 3, EndMode::OpenEnd).unwrap();
        assert_eq!(knot_domain(&k5, 3), (0.0, 2.0));

        assert!(knot_vector(3, 3, EndMode::ClampedBoth).is_err());
    }

    #[test]
    fn coincident_control_points_collapse() {
        let p = CartPoint::new(3.0, -2.0, 7.0);
        let path = NurbsPath::with_mode(
            3,
            vec![p; 5],
            vec![1.0, 2.0, 0.5, 1.0, 3.0],
            EndMode::ClampedBoth,
        )
        .unwrap();
        for i in 0..=10 {
            let u = 2.0 * i as f64 / 10.0;
            assert!(path.eval(u).unwrap().dist(p) < 1e-12);
        }
    }

    #[test]
    fn clamped_endpoint_interpolation() {
        let ctrl = vec![
            CartPoint::new(0.0, 0.0, 0.0),
            CartPoint::new(10.0, 5.0, 0.0),
            CartPoint::new(20.0, -5.0, 3.0),
            CartPoint::new(30.0, 0.0, 1.0),
            CartPoint::new(40.0, 2.0, 2.0),
        ];
        let path = NurbsPath::with_mode(
            3,
            ctrl.clone(),
            vec![1.0, 0.7, 1.3, 2.0, 1.0],
            EndMode::ClampedBoth,
        )
        .unwrap();
        let (lo, hi) = path.domain();
        assert!(path.eval(lo).unwrap().dist(ctrl[0]) < 1e-12);
        assert!(path.eval(hi).unwrap().dist(ctrl[4]) < 1e-12);
    }

    #[test]
    fn rational_quarter_circle_on_circle() {
        let path = quarter_circle();
        let mid = path.eval(0.5).unwrap();
        let s = std::f64::consts::SQRT_2 / 2.0;
        assert!(mid.dist(CartPoint::new(s, s, 0.0)) < 1e-12);
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            let p = path.eval(u).unwrap();
            assert!(
                ((p.x * p.x + p.y * p.y).sqrt() - 1.0).abs() < 1e-9,
                "off circle at u={}",
                u
            );
        }
    }

    #[test]
    fn quarter_circle_arc_length() {
        let path = quarter_circle();
        let len = path.arc_length(0.0, 1.0, 0.01).unwrap();
        assert!(
            (len - FRAC_PI_2).abs() < 1e-3,
            "arc length {} vs {}",
            len,
            FRAC_PI_2
        );
    }

    #[test]
    fn straight_segment_lengths_and_samples() {
        let ctrl: Vec<CartPoint> = (0..5)
            .map(|i| CartPoint::new(25.0 * i as f64, 0.0, 0.0))
            .collect();
        let path =
            NurbsPath::with_mode(3, ctrl, vec![1.0; 5], EndMode::ClampedBoth).unwrap();
        let (lo, hi) = path.domain();
        let len = path.arc_length(lo, hi, 5.0).unwrap();
        assert!((len - 100.0).abs() < 1e-6, "length {}", len);

        let pts = path.sample_by_arclength(lo, hi, 5.0).unwrap();
        assert_eq!(pts.len(), 21);
        assert!(pts[0].dist(CartPoint::new(0.0, 0.0, 0.0)) < 1e-9);
        assert!(pts[20].dist(CartPoint::new(100.0, 0.0, 0.0)) < 1e-9);
        // spacing within 10%
        for w in pts.windows(2) {
            let d = w[0].dist(w[1]);
            assert!((d - 5.0).abs() <= 0.5, "spacing {}", d);
        }

        assert_eq!(path.arc_length(1.0, 1.0, 5.0).unwrap(), 0.0);
        let single = path.sample_by_arclength(1.0, 1.0, 5.0).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn sample_count_consistent_with_length() {
        let ctrl = vec![
            CartPoint::new(0.0, 0.0, 0.0),
            CartPoint::new(40.0, 60.0, 10.0),
            CartPoint::new(90.0, -20.0, 30.0),
            CartPoint::new(150.0, 10.0, -20.0),
            CartPoint::new(200.0, 0.0, 0.0),
        ];
        let path = NurbsPath::with_mode(3, ctrl, vec![1.0; 5], EndMode::ClampedBoth).unwrap();
        let (lo, hi) = path.domain();
        let dl = 5.0;
        let (pts, len) = path.sample_with_length(lo, hi, dl).unwrap();
        let spacing_est = (pts.len() - 1) as f64 * dl;
        assert!(
            (spacing_est - len).abs() <= dl,
            "count {} * dl vs length {}",
            pts.len(),
            len
        );
    }

    #[test]
    fn arc_length_monotone_in_endpoint() {
        let path = quarter_circle();
        let mut prev = 0.0;
        for i in 1..=10 {
            let u = i as f64 / 10.0;
            let len = path.arc_length(0.0, u, 0.05).unwrap();
            assert!(len >= prev - 1e-12);
            prev = len;
        }
    }

    #[test]
    fn unit_weight_eval_matches_de_boor() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(4..9);
            let ctrl: Vec<CartPoint> = (0..n)
                .map(|_| {
                    CartPoint::new(
                        rng.random_range(-100.0..100.0),
                        rng.random_range(-100.0..100.0),
                        rng.random_range(-100.0..100.0),
                    )
                })
                .collect();
            let mode = if rng.random::<bool>() {
                EndMode::ClampedBoth
            } else {
                EndMode::OpenEnd
            };
            let path = NurbsPath::with_mode(3, ctrl.clone(), vec![1.0; n], mode).unwrap();
            let (lo, hi) = path.domain();
            for _ in 0..20 {
                let u = rng.random_range(lo..=hi);
                let a = path.eval(u).unwrap();
                let b = de_boor(&path.knots, 3, &ctrl, u);
                assert!(a.dist(b) < 1e-9, "mismatch {} at u={}", a.dist(b), u);
            }
        }
    }

    #[test]
    fn convex_hull_property() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.random_range(4..8);
            let ctrl: Vec<CartPoint> = (0..n)
                .map(|_| {
                    CartPoint::new(
                        rng.random_range(-50.0..50.0),
                        rng.random_range(-50.0..50.0),
                        rng.random_range(-50.0..50.0),
                    )
                })
                .collect();
            let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..3.0)).collect();
            let path =
                NurbsPath::with_mode(3, ctrl.clone(), weights, EndMode::ClampedBoth).unwrap();
            let (lo, hi) = path.domain();
            for _ in 0..30 {
                let u = rng.random_range(lo..=hi);
                let p = path.eval(u).unwrap();
                // convex hull containment implies the point is within the
                // axis-aligned bounding box of the active control points;
                // check the global box (a necessary condition, cheap and
                // independent of span bookkeeping)
                for axis in 0..3 {
                    let v = p.to_array()[axis];
                    let min = ctrl
                        .iter()
                        .map(|c| c.to_array()[axis])
                        .fold(f64::INFINITY, f64::min);
                    let max = ctrl
                        .iter()
                        .map(|c| c.to_array()[axis])
                        .fold(f64::NEG_INFINITY, f64::max);
                    assert!(v >= min - 1e-9 && v <= max + 1e-9);
                }
            }
        }
    }

    #[test]
    fn local_support() {
        let knots = knot_vector(8, 3, EndMode::OpenEnd).unwrap();
        let (lo, hi) = knot_domain(&knots, 3);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let u = rng.random_range(lo..hi);
            let basis = basis_functions(&knots, 3, u).unwrap();
            for (i, &b) in basis.iter().enumerate() {
                if b != 0.0 {
                    assert!(
                        knots[i] <= u && u <= knots[i + 4],
                        "N_{{{},3}}({}) = {} outside support [{}, {}]",
                        i,
                        u,
                        b,
                        knots[i],
                        knots[i + 4]
                    );
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn partition_of_unity(
            n in 4usize..10,
            clamped in proptest::bool::ANY,
            frac in 0.0f64..=1.0,
        ) {
            let mode = if clamped { EndMode::ClampedBoth } else { EndMode::OpenEnd };
            let knots = knot_vector(n, 3, mode).unwrap();
            let (lo, hi) = knot_domain(&knots, 3);
            let u = lo + (hi - lo) * frac;
            let basis = basis_functions(&knots, 3, u).unwrap();
            let sum: f64 = basis.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "sum {} at u={}", sum, u);
            prop_assert!(basis.iter().all(|&b| b >= -1e-12));
        }

        #[test]
        fn partition_of_unity_random_knots(
            mut raw in proptest::collection::vec(0.0f64..10.0, 9..16),
            frac in 0.001f64..=0.999,
        ) {
            raw.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let degree = 3;
            let (lo, hi) = knot_domain(&raw, degree);
            prop_assume!(hi - lo > 1e-6);
            let u = lo + (hi - lo) * frac;
            let basis = basis_functions(&raw, degree, u).unwrap();
            let sum: f64 = basis.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "sum {} for knots {:?} u {}", sum, raw, u);
        }
    }
}
