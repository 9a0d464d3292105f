//! Lipschitz self-maps of the unit circle, represented by continuous lifts.
//!
//! A map T: S¹ → S¹ is stored through a lift τ: [0,2π] → ℝ with
//! τ(2π) − τ(0) = 2π·deg(T), either piecewise-linear or as a named analytic
//! form. Evaluation wraps: T(e^{iφ}) = e^{iτ(φ mod 2π)}. The principal value
//! for angle extraction is (−π, π].

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const TAU: f64 = 2.0 * std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// Wrap an angle difference to the principal branch (−π, π].
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Geodesic distance on S¹ between two angles.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
enum Repr {
    PiecewiseLinear { breakpoints: Vec<f64>, values: Vec<f64> },
    Sine,
    SmoothInverse { eps: f64 },
    Composed { outer: Box<Repr>, inner: Box<Repr> },
}

/// A circle self-map with integer degree.
#[derive(Debug, Clone, Serialize)]
#[serde(into = "Repr")]
pub struct CircleMap {
    repr: Repr,
    degree: i32,
}

impl From<CircleMap> for Repr {
    fn from(m: CircleMap) -> Repr {
        m.repr
    }
}

impl<'de> Deserialize<'de> for CircleMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = Repr::deserialize(d)?;
        CircleMap::from_repr(repr).map_err(serde::de::Error::custom)
    }
}

impl CircleMap {
    fn from_repr(repr: Repr) -> Result<CircleMap> {
        let degree = repr_degree(&repr)?;
        Ok(CircleMap { repr, degree })
    }

    fn pl(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<CircleMap> {
        let (breakpoints, values) = normalize_pl(breakpoints, values)?;
        CircleMap::from_repr(Repr::PiecewiseLinear { breakpoints, values })
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_piecewise_linear(&self) -> bool {
        matches!(self.repr, Repr::PiecewiseLinear { .. })
    }

    /// The lift τ evaluated at t ∈ [0, 2π].
    pub fn lift(&self, t: f64) -> f64 {
        lift_of(&self.repr, t)
    }

    /// Periodic extension of the lift to all of ℝ:
    /// τ̃(x + 2πk) = τ̃(x) + 2πk·deg.
    pub fn lift_ext(&self, x: f64) -> f64 {
        let k = (x / TAU).floor();
        let r = x - TAU * k;
        self.lift(r) + TAU * k * self.degree as f64
    }

    /// Image angle of a point given by its angle; this is τ(a mod 2π).
    pub fn angle_image(&self, a: f64) -> f64 {
        self.lift(a.rem_euclid(TAU))
    }

    /// Evaluate on a point of S¹ given as (re, im); returns (re, im).
    pub fn eval(&self, z: (f64, f64)) -> (f64, f64) {
        let phi = z.1.atan2(z.0);
        let out = self.angle_image(phi);
        (out.cos(), out.sin())
    }

    /// For piecewise-linear lifts: the segment index and exact slope at
    /// parameter t ∈ [0, 2π). None for analytic or composed maps.
    pub fn segment_slope(&self, t: f64) -> Option<(usize, f64)> {
        if let Repr::PiecewiseLinear { breakpoints, values } = &self.repr {
            let t = t.rem_euclid(TAU);
            let hi = breakpoints.partition_point(|b| *b <= t).min(breakpoints.len() - 1);
            let k = hi.max(1);
            let dt = breakpoints[k] - breakpoints[k - 1];
            if dt <= 0.0 {
                return None;
            }
            Some((k - 1, (values[k] - values[k - 1]) / dt))
        } else {
            None
        }
    }

    /// sup over S¹ of the geodesic distance d(z, T(z)).
    ///
    /// Exact for piecewise-linear lifts (the displacement τ(t) − t is again
    /// piecewise-linear, so its extrema sit at breakpoints); sampled for
    /// analytic maps.
    pub fn sup_displacement(&self) -> f64 {
        match &self.repr {
            Repr::PiecewiseLinear { breakpoints, values } => breakpoints
                .iter()
                .zip(values)
                .map(|(b, v)| circle_distance(*v, *b))
                .fold(0.0, f64::max),
            _ => {
                let n = 20_000;
                (0..=n)
                    .map(|k| {
                        let t = TAU * k as f64 / n as f64;
                        circle_distance(self.lift(t), t)
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

fn repr_degree(repr: &Repr) -> Result<i32> {
    match repr {
        Repr::PiecewiseLinear { breakpoints, values } => {
            if breakpoints.len() != values.len() || breakpoints.len() < 2 {
                return Err(Error::Parameter("lift needs matching breakpoint/value arrays".into()));
            }
            let turns = (values[values.len() - 1] - values[0]) / TAU;
            let d = turns.round();
            if (turns - d).abs() > 1e-9 {
                return Err(Error::Parameter(format!(
                    "lift endpoints differ by {turns} turns; expected an integer"
                )));
            }
            Ok(d as i32)
        }
        Repr::Sine | Repr::SmoothInverse { .. } => Ok(1),
        Repr::Composed { outer, inner } => Ok(repr_degree(outer)? * repr_degree(inner)?),
    }
}

fn normalize_pl(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    if breakpoints.len() != values.len() || breakpoints.len() < 2 {
        return Err(Error::Parameter("lift needs matching breakpoint/value arrays".into()));
    }
    if breakpoints[0].abs() > 1e-12 || (breakpoints[breakpoints.len() - 1] - TAU).abs() > 1e-9 {
        return Err(Error::Parameter("lift breakpoints must span [0, 2π]".into()));
    }
    let mut bs = vec![0.0];
    let mut vs = vec![values[0]];
    for k in 1..breakpoints.len() {
        let b = breakpoints[k];
        if b < *bs.last().unwrap() - 1e-12 {
            return Err(Error::Parameter("lift breakpoints must be nondecreasing".into()));
        }
        if b - bs.last().unwrap() <= 1e-13 {
            if (values[k] - vs.last().unwrap()).abs() > 1e-9 {
                return Err(Error::Parameter("lift has a jump at a repeated breakpoint".into()));
            }
            continue;
        }
        bs.push(b);
        vs.push(values[k]);
    }
    let last = bs.len() - 1;
    bs[last] = TAU;
    if !vs.iter().all(|v| v.is_finite()) {
        return Err(Error::Parameter("lift values must be finite".into()));
    }
    Ok((bs, vs))
}

fn lift_of(repr: &Repr, t: f64) -> f64 {
    match repr {
        Repr::PiecewiseLinear { breakpoints, values } => {
            let n = breakpoints.len();
            if t <= breakpoints[0] {
                return values[0];
            }
            if t >= breakpoints[n - 1] {
                return values[n - 1];
            }
            // first index with breakpoint >= t
            let hi = breakpoints.partition_point(|b| *b < t);
            let (b0, b1) = (breakpoints[hi - 1], breakpoints[hi]);
            let (v0, v1) = (values[hi - 1], values[hi]);
            if t == b1 {
                return v1;
            }
            v0 + (t - b0) / (b1 - b0) * (v1 - v0)
        }
        Repr::Sine => {
            if t <= PI {
                PI * (t / 2.0).sin()
            } else {
                TAU - PI * (t / 2.0).sin()
            }
        }
        Repr::SmoothInverse { eps } => {
            if t <= PI {
                2.0 * j_blend(t / PI, *eps).asin()
            } else {
                TAU - 2.0 * j_blend((TAU - t) / PI, *eps).asin()
            }
        }
        Repr::Composed { outer, inner } => {
            // lift of f∘g at t is f̃(g(t)) with f̃ the periodic extension
            let y = lift_of(inner, t);
            let deg_f = repr_degree(outer).expect("validated at construction");
            let k = (y / TAU).floor();
            lift_of(outer, y - TAU * k) + TAU * k * deg_f as f64
        }
    }
}

/// Odd C¹ interpolant equal to the identity on [−(1−ε), 1−ε] and flattened
/// to slope 0 at ±1 by a cubic Hermite blend. On [1−ε/2, 1] its second
/// derivative satisfies 1/ε ≤ |J″| ≤ 4/ε.
fn j_blend(t: f64, eps: f64) -> f64 {
    let s = t.abs();
    let v = if s <= 1.0 - eps {
        s
    } else {
        let u = ((s - (1.0 - eps)) / eps).min(1.0);
        let h00 = 2.0 * u.powi(3) - 3.0 * u.powi(2) + 1.0;
        let h10 = u.powi(3) - 2.0 * u.powi(2) + u;
        let h01 = -2.0 * u.powi(3) + 3.0 * u.powi(2);
        (1.0 - eps) * h00 + eps * h10 + h01
    };
    v.copysign(t)
}

fn j_blend_deriv(t: f64, eps: f64) -> f64 {
    let s = t.abs();
    if s <= 1.0 - eps {
        1.0
    } else {
        let u = ((s - (1.0 - eps)) / eps).min(1.0);
        (3.0 * u + 1.0) * (1.0 - u)
    }
}

/// The sawtooth maps T_n of degree one: slope n on (2jπ/n², (2j+1)π/n²] and
/// slope −(n−2) on the complementary intervals, τ_n(0) = 0.
pub fn tn_map(n: u32) -> Result<CircleMap> {
    if n < 3 {
        return Err(Error::Parameter(format!("tn_map needs n ≥ 3, got {n}")));
    }
    let n2 = (n * n) as usize;
    let step = PI / n2 as f64;
    let mut breaks = Vec::with_capacity(2 * n2 + 1);
    let mut values = Vec::with_capacity(2 * n2 + 1);
    for j in 0..n2 {
        breaks.push(2.0 * j as f64 * step);
        values.push(TAU * j as f64 / n2 as f64);
        breaks.push((2 * j + 1) as f64 * step);
        values.push((TAU * j as f64 + PI * n as f64) / n2 as f64);
    }
    breaks.push(TAU);
    values.push(TAU);
    CircleMap::pl(breaks, values)
}

/// Fold of the circle onto the closed half-circle bounded by ±e^{iζ}:
/// identity on the arc (ζ, ζ+π), reflection z ↦ ζ²z̄ elsewhere. Degree 0.
pub fn projection_map(zeta_angle: f64) -> CircleMap {
    let a = zeta_angle.rem_euclid(TAU);
    let m = if a <= PI {
        CircleMap::pl(
            vec![0.0, a, a + PI, TAU],
            vec![2.0 * a, a, a + PI, 2.0 * a],
        )
    } else {
        CircleMap::pl(
            vec![0.0, a - PI, a, TAU],
            vec![0.0, a - PI, a - TAU, 0.0],
        )
    };
    m.expect("projection lift is well formed")
}

/// Degree-one plateau map: constant 1 on [−δ, δ), constant −1 on
/// [π−δ, π+δ), linear with slope π/(π−2δ) in between.
pub fn k_map(delta: f64) -> Result<CircleMap> {
    if !(delta > 0.0 && delta < PI / 2.0) {
        return Err(Error::Parameter(format!("k_map needs δ ∈ (0, π/2), got {delta}")));
    }
    CircleMap::pl(
        vec![0.0, delta, PI - delta, PI + delta, TAU - delta, TAU],
        vec![0.0, 0.0, PI, PI, TAU, TAU],
    )
}

/// The C¹ degree-one map with lift θ = π sin(φ/2) on (−π, π], satisfying
/// |e^{iφ} − 1| = (2/π)|θ|.
pub fn sine_map() -> CircleMap {
    CircleMap::from_repr(Repr::Sine).expect("sine lift is well formed")
}

/// C¹ approximate inverse of [`sine_map`]: equal to the exact inverse
/// wherever |θ| ≤ π(1−ε), flattened near ±π so the derivative stays bounded.
pub fn smooth_inverse_map(eps: f64) -> Result<CircleMap> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Parameter(format!(
            "smooth_inverse_map needs ε ∈ (0, 1/2), got {eps}"
        )));
    }
    CircleMap::from_repr(Repr::SmoothInverse { eps })
}

/// Degree-one map that is 1 off the arc (θ−ε/2, θ+ε/2) and winds once
/// around the circle linearly on it.
pub fn dipole_map(theta: f64, eps: f64) -> Result<CircleMap> {
    if !(eps > 0.0 && eps < TAU) {
        return Err(Error::Parameter(format!("dipole_map needs ε ∈ (0, 2π), got {eps}")));
    }
    let beta = theta.rem_euclid(TAU);
    let a0 = beta - eps / 2.0;
    let a1 = beta + eps / 2.0;
    let ramp = |phi: f64| PI * (1.0 + 2.0 * (phi - beta) / eps);
    if a0 >= 0.0 && a1 <= TAU {
        CircleMap::pl(vec![0.0, a0, a1, TAU], vec![0.0, 0.0, TAU, TAU])
    } else if a0 < 0.0 {
        // arc wraps through angle 0: enter mid-ramp
        CircleMap::pl(
            vec![0.0, a1, a0 + TAU, TAU],
            vec![ramp(0.0), TAU, TAU, ramp(0.0) + TAU],
        )
    } else {
        CircleMap::pl(
            vec![0.0, a1 - TAU, a0, TAU],
            vec![ramp(TAU) - TAU, 0.0, 0.0, ramp(TAU)],
        )
    }
}

/// The split pair (T₀, T₁): T₁ maps the long arc S¹∖I onto the upper
/// half-circle and I = (2π−δ, 2π) onto the lower one (degree 1); T₀ is the
/// fold P₋₁∘T₁ — conjugate of T₁ off I, equal to it on I (degree 0).
pub fn split_maps(delta: f64) -> Result<(CircleMap, CircleMap)> {
    if !(delta > 0.0 && delta < TAU) {
        return Err(Error::Parameter(format!("split_maps needs δ ∈ (0, 2π), got {delta}")));
    }
    let t1 = CircleMap::pl(vec![0.0, TAU - delta, TAU], vec![0.0, PI, TAU])?;
    let t0 = CircleMap::pl(vec![0.0, TAU - delta, TAU], vec![0.0, -PI, 0.0])?;
    Ok((t0, t1))
}

pub fn identity_map() -> CircleMap {
    CircleMap::pl(vec![0.0, TAU], vec![0.0, TAU]).expect("identity lift")
}

/// Lift of f∘g. Exact piecewise-linear composition when both lifts are
/// piecewise-linear; otherwise a lazily evaluated composite.
pub fn compose(f: &CircleMap, g: &CircleMap) -> CircleMap {
    if let (
        Repr::PiecewiseLinear { breakpoints: fb, .. },
        Repr::PiecewiseLinear { breakpoints: gb, values: gv },
    ) = (&f.repr, &g.repr)
    {
        let mut ts: Vec<f64> = gb.clone();
        for k in 0..gb.len() - 1 {
            let (t0, t1) = (gb[k], gb[k + 1]);
            let (y0, y1) = (gv[k], gv[k + 1]);
            if y0 == y1 {
                continue;
            }
            let (lo, hi) = (y0.min(y1), y0.max(y1));
            let m_lo = (lo / TAU).floor() as i64 - 1;
            let m_hi = (hi / TAU).ceil() as i64 + 1;
            for m in m_lo..=m_hi {
                for b in fb.iter().take(fb.len() - 1) {
                    let y = b + TAU * m as f64;
                    if y > lo && y < hi {
                        ts.push(t0 + (y - y0) / (y1 - y0) * (t1 - t0));
                    }
                }
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let vs: Vec<f64> = ts.iter().map(|t| f.lift_ext(g.lift(*t))).collect();
        let out = CircleMap::pl(ts, vs).expect("composition lift is well formed");
        debug_assert_eq!(out.degree, f.degree * g.degree);
        return out;
    }
    let repr = Repr::Composed {
        outer: Box::new(f.repr.clone()),
        inner: Box::new(g.repr.clone()),
    };
    CircleMap {
        degree: f.degree * g.degree,
        repr,
    }
}

/// Exact slope extrema (min |τ′|, max |τ′|) for piecewise-linear lifts;
/// closed form for the sine map; sampled with the analytic endpoint limit
/// for the smoothed inverse.
pub fn derivative_bounds(f: &CircleMap) -> Result<(f64, f64)> {
    match &f.repr {
        Repr::PiecewiseLinear { breakpoints, values } => {
            let mut lo = f64::MAX;
            let mut hi: f64 = 0.0;
            for k in 0..breakpoints.len() - 1 {
                let dt = breakpoints[k + 1] - breakpoints[k];
                if dt <= 0.0 {
                    continue;
                }
                let s = ((values[k + 1] - values[k]) / dt).abs();
                lo = lo.min(s);
                hi = hi.max(s);
            }
            Ok((lo, hi))
        }
        Repr::Sine => Ok((0.0, PI / 2.0)),
        Repr::SmoothInverse { eps } => {
            // dφ/dθ = (2/π)·J′(θ/π)/√(1−J²); minimum 2/π at θ = 0, and the
            // limit at θ = π is 4/(π√ε).
            let mut hi = 4.0 / (PI * eps.sqrt());
            let n = 200_000;
            for k in 1..n {
                let t = k as f64 / n as f64;
                let j = j_blend(t, *eps);
                let d = 2.0 / PI * j_blend_deriv(t, *eps) / (1.0 - j * j).sqrt();
                hi = hi.max(d);
            }
            Ok((2.0 / PI, hi))
        }
        Repr::Composed { .. } => Err(Error::Parameter(
            "derivative bounds are defined for piecewise-linear and named analytic maps".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn tn_basics() {
        let t5 = tn_map(5).unwrap();
        assert_eq!(t5.degree(), 1);
        let z = t5.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        assert_close(z.1, 0.0, 1e-12);
        let (lo, hi) = derivative_bounds(&t5).unwrap();
        assert_close(lo, 3.0, 1e-9);
        assert_close(hi, 5.0, 1e-9);
        assert!(t5.sup_displacement() <= 4.0 * PI / 25.0 + 1e-12);
        assert!(tn_map(2).is_err());
    }

    #[test]
    fn tn_bounds_for_all_small_n() {
        for n in 3..=50u32 {
            let t = tn_map(n).unwrap();
            let bound = PI * (n as f64 - 1.0) / (n as f64 * n as f64);
            assert!(
                t.sup_displacement() <= bound + 1e-12,
                "sup displacement exceeds π(n−1)/n² at n={n}"
            );
            let (lo, _) = derivative_bounds(&t).unwrap();
            assert!(lo >= n as f64 - 2.0 - 1e-9, "min slope below n−2 at n={n}");
        }
    }

    #[test]
    fn lift_endpoint_exact() {
        for n in [3u32, 7, 20, 50] {
            let t = tn_map(n).unwrap();
            assert_eq!(t.lift(TAU) - t.lift(0.0), TAU);
        }
        for m in [sine_map(), smooth_inverse_map(0.2).unwrap()] {
            assert!((m.lift(TAU) - m.lift(0.0) - TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let p1 = projection_map(0.0);
        assert_eq!(p1.degree(), 0);
        let z = p1.eval((0.0, 1.0)); // i is in I(1,−1)
        assert_close(z.1, 1.0, 1e-12);
        let z = p1.eval((0.0, -1.0)); // reflected across the real axis
        assert_close(z.1, 1.0, 1e-12);
        for a in [0.0, 0.7, 2.0, PI, 4.0, 5.9] {
            let p = projection_map(a);
            let z = p.eval((a.cos(), a.sin())); // ζ is a fixed point
            assert_close(z.0, a.cos(), 1e-9);
            assert_close(z.1, a.sin(), 1e-9);
        }
    }

    #[test]
    fn projection_image_in_half_circle() {
        for a in [0.3, 1.9, 3.5, 5.5] {
            let p = projection_map(a);
            for k in 0..500 {
                let t = TAU * k as f64 / 500.0;
                let im = p.angle_image(t);
                // image angle lies in the closed arc [a, a+π] up to 2π shifts
                let rel = (im - a).rem_euclid(TAU);
                assert!(
                    rel <= PI + 1e-9 || rel >= TAU - 1e-9,
                    "image angle {rel} outside half circle for ζ-angle {a}"
                );
            }
        }
    }

    #[test]
    fn k_map_examples() {
        let k = k_map(0.1).unwrap();
        assert_eq!(k.degree(), 1);
        let z = k.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        // midpoint of the ramp maps to the midpoint
        let z = k.eval((0.0, 1.0));
        assert_close(z.1, 1.0, 1e-12);
        let (_, hi) = derivative_bounds(&k).unwrap();
        assert_close(hi, PI / (PI - 0.2), 1e-12);
        assert!(k_map(2.0).is_err());
    }

    #[test]
    fn sine_map_identity() {
        let t = sine_map();
        let z = t.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        let z = t.eval((-1.0, 0.0));
        assert_close(z.0, -1.0, 1e-12);
        let z = t.eval((0.0, 1.0));
        let expect = PI * (PI / 4.0).sin();
        assert_close(z.0, expect.cos(), 1e-12);
        assert_close(z.1, expect.sin(), 1e-12);

        // |e^{iφ} − 1| = (2/π)|θ| at 10⁴ sampled angles
        let mut worst: f64 = 0.0;
        for k in 0..10_000 {
            let phi = -PI + TAU * (k as f64 + 0.5) / 10_000.0;
            let theta = PI * (phi / 2.0).sin();
            let chord = ((phi.cos() - 1.0).powi(2) + phi.sin().powi(2)).sqrt();
            worst = worst.max((chord - 2.0 / PI * theta.abs()).abs());
        }
        assert!(worst <= 1e-12, "identity residual {worst}");

        let (lo, hi) = derivative_bounds(&t).unwrap();
        assert_close(lo, 0.0, 1e-15);
        assert_close(hi, PI / 2.0, 1e-15);
    }

    #[test]
    fn smooth_inverse_examples() {
        let eps = 0.2;
        let s = smooth_inverse_map(eps).unwrap();
        let t = sine_map();
        let z = s.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        let z = s.eval((-1.0, 0.0));
        assert_close(z.0, -1.0, 1e-12);
        // exact inverse on the identity region |θ| ≤ π(1−ε)
        for k in 0..200 {
            let phi_max = 2.0 * (1.0f64 - eps).asin();
            let phi = -phi_max + 2.0 * phi_max * k as f64 / 199.0;
            let w = t.eval((phi.cos(), phi.sin()));
            let back = s.eval(w);
            assert_close(back.0, phi.cos(), 1e-9);
            assert_close(back.1, phi.sin(), 1e-9);
        }
        assert!(smooth_inverse_map(0.7).is_err());
    }

    #[test]
    fn dipole_examples() {
        let eps = 0.8;
        for theta in [1.3, 0.1, 6.2] {
            let d = dipole_map(theta, eps).unwrap();
            assert_eq!(d.degree(), 1);
            // −1 at the arc midpoint
            let z = d.eval((theta.cos(), theta.sin()));
            assert_close(z.0, -1.0, 1e-9);
            // 1 well off the arc
            let away = theta + PI;
            let z = d.eval((away.cos(), away.sin()));
            assert_close(z.0, 1.0, 1e-9);
        }
        assert!(dipole_map(0.0, 7.0).is_err());
    }

    #[test]
    fn split_examples() {
        let (t0, t1) = split_maps(0.5).unwrap();
        assert_eq!(t0.degree(), 0);
        assert_eq!(t1.degree(), 1);
        let z = t1.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        let z = t0.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
        let (_, hi) = derivative_bounds(&t1).unwrap();
        assert!(hi <= (PI / 0.5).max(PI / (TAU - 0.5)) + 1e-12);
        // T₀ and T₁ agree on I and are conjugate off it
        for k in 0..100 {
            let th = TAU * k as f64 / 100.0;
            let a1 = t1.eval((th.cos(), th.sin()));
            let a0 = t0.eval((th.cos(), th.sin()));
            if th > TAU - 0.5 && th < TAU {
                assert_close(a0.0, a1.0, 1e-9);
                assert_close(a0.1, a1.1, 1e-9);
            } else {
                assert_close(a0.0, a1.0, 1e-9);
                assert_close(a0.1, -a1.1, 1e-9);
            }
        }
    }

    #[test]
    fn compose_degrees_and_identity() {
        let id = identity_map();
        let t5 = tn_map(5).unwrap();
        let c = compose(&id, &t5);
        for k in 0..50 {
            let t = TAU * k as f64 / 50.0;
            assert_close(c.lift(t), t5.lift(t), 1e-9);
        }
        assert_eq!(compose(&tn_map(5).unwrap(), &tn_map(7).unwrap()).degree(), 1);
        assert_eq!(compose(&projection_map(0.0), &tn_map(5).unwrap()).degree(), 0);
        // mixed composition evaluates pointwise
        let mixed = compose(&sine_map(), &t5);
        assert_eq!(mixed.degree(), 1);
        let z = mixed.eval((1.0, 0.0));
        assert_close(z.0, 1.0, 1e-12);
    }

    #[test]
    fn compose_pl_is_exact() {
        let k = k_map(0.3).unwrap();
        let p = projection_map(1.1);
        let c = compose(&p, &k);
        for i in 0..1000 {
            let t = TAU * i as f64 / 1000.0;
            let direct = p.lift_ext(k.lift(t));
            assert_close(c.lift(t), direct, 1e-9);
        }
    }

    #[test]
    fn serde_round_trip() {
        let t = tn_map(4).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: CircleMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back.degree(), 1);
        for k in 0..100 {
            let x = TAU * k as f64 / 100.0;
            assert_close(back.lift(x), t.lift(x), 1e-12);
        }
        let named = serde_json::to_string(&sine_map()).unwrap();
        assert!(named.contains("\"name\""));
    }
}
