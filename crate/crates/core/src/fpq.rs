//! Numerical membership test for the class `F_{p,q}`: convex `f` with
//! `f(1) = 0` and `m(|x−1|^p + |x−1|^q) ≤ f(x) ≤ M(|x−1|^p + |x−1|^q)`.
//!
//! The binding behaviour sits at `x → 0`, `x → 1` and `x → ∞`, so the
//! default grid is log-spaced over `[1e-6, 1e6]` with a fine mesh around 1.
//! A ratio whose log-slope does not flatten at the ends of the grid is
//! reported as unbounded.

use crate::divergence::{f_alpha, CustomF};
use crate::error::{Error, Result};

/// Largest log-slope of the ratio at a grid end still read as "flattened".
pub const END_SLOPE_TOL: f64 = 0.05;

#[derive(Debug, Clone)]
pub enum FpqFunction {
    Alpha(f64),
    Custom(CustomF),
}

impl FpqFunction {
    fn eval(&self, x: f64) -> f64 {
        match self {
            FpqFunction::Alpha(a) => f_alpha(*a, x),
            FpqFunction::Custom(c) => (c.f)(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpqMembership {
    pub p: f64,
    pub q: f64,
    pub m: f64,
    pub big_m: f64,
}

impl FpqMembership {
    pub fn contains(&self, v: f64) -> bool {
        self.m <= v && v <= self.big_m
    }

    /// Containment up to an absolute slack, for limits estimated by extrapolation.
    pub fn contains_within(&self, v: f64, slack: f64) -> bool {
        self.m - slack <= v && v <= self.big_m + slack
    }
}

/// `{α/2, 1/(α−1), 1/2}`: limits of `f_α` against `|x−1|²`, `x^α` and the full
/// denominator at `x → 1, ∞, 0`.
pub fn alpha_limit_ratios(alpha: f64) -> [f64; 3] {
    [alpha / 2.0, 1.0 / (alpha - 1.0), 0.5]
}

pub fn default_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..=1200).map(|i| 10f64.powf(-6.0 + i as f64 / 100.0)).collect();
    for i in 0..=60 {
        let d = 10f64.powf(-1.0 - i as f64 * 0.05);
        g.push(1.0 + d);
        g.push(1.0 - d);
    }
    g.retain(|&x| (x - 1.0).abs() > 1e-12);
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    g
}

fn log_slope(xs: &[f64], rs: &[f64], i: usize, j: usize, about_one: bool) -> f64 {
    let lx = |x: f64| if about_one { (x - 1.0).abs().ln() } else { x.ln() };
    (rs[j].ln() - rs[i].ln()) / (lx(xs[j]) - lx(xs[i]))
}

pub fn fpq_membership(f: &FpqFunction, p: f64, q: f64, grid: Option<&[f64]>) -> Result<FpqMembership> {
    if !(p > 1.0 && p <= q && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 1 < p ≤ q < ∞, got p = {p}, q = {q}")));
    }
    if let FpqFunction::Alpha(a) = f {
        if !(*a > 0.0) || *a == 1.0 {
            return Err(Error::InvalidParameter(format!("α = {a}")));
        }
    }
    let f1 = f.eval(1.0);
    if f1.abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("f(1) = {f1} ≠ 0")));
    }
    let owned;
    let xs: &[f64] = match grid {
        Some(g) => g,
        None => {
            owned = default_grid();
            &owned
        }
    };
    if xs.len() < 8 || xs.windows(2).any(|w| !(w[0] < w[1])) || xs[0] <= 0.0 {
        return Err(Error::InvalidParameter("grid must be ≥ 8 increasing positive points".into()));
    }
    let fs: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();

    // convexity: secant slopes non-decreasing
    let slopes: Vec<f64> = (0..xs.len() - 1).map(|i| (fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i])).collect();
    // rounding in f propagates into each secant slope as ~ε·scale/Δx
    let slope_err: Vec<f64> = (0..slopes.len())
        .map(|i| {
            let scale = 1.0 + fs[i].abs() + fs[i + 1].abs() + xs[i + 1] * slopes[i].abs();
            16.0 * f64::EPSILON * scale / (xs[i + 1] - xs[i])
        })
        .collect();
    for i in 0..slopes.len() - 1 {
        let tol = 1e-9 * (1.0 + slopes[i].abs().max(slopes[i + 1].abs())) + slope_err[i] + slope_err[i + 1];
        if slopes[i + 1] < slopes[i] - tol {
            return Err(Error::NonConvexDetected(xs[i + 1]));
        }
    }

    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&fs)
        .filter(|(x, _)| (*x - 1.0).abs() > 0.0)
        .map(|(&x, &fx)| {
            let d = (x - 1.0).abs();
            (x, fx / (d.powf(p) + d.powf(q)))
        })
        .collect();
    let (xr, rs): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let m = rs.iter().copied().fold(f64::INFINITY, f64::min);
    let big_m = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(m > 0.0) || !big_m.is_finite() {
        return Err(Error::RatioUnbounded(format!("ratio range [{m}, {big_m}]")));
    }

    let k = xr.len();
    // closest points to 1 on each side, and a neighbour further out
    let below: Vec<usize> = (0..k).filter(|&i| xr[i] < 1.0).collect();
    let above: Vec<usize> = (0..k).filter(|&i| xr[i] > 1.0).collect();
    let mut checks: Vec<(&str, f64)> = Vec::new();
    checks.push(("x → 0", log_slope(&xr, &rs, 0, 1.min(k - 1), false)));
    checks.push(("x → ∞", log_slope(&xr, &rs, k - 2, k - 1, false)));
    for (side, idx) in [("x → 1−", &below), ("x → 1+", &above)] {
        if idx.len() < 2 {
            continue;
        }
        let inner = if side == "x → 1−" { *idx.last().unwrap() } else { idx[0] };
        let d_inner = (xr[inner] - 1.0).abs();
        let outer = idx
            .iter()
            .copied()
            .filter(|&i| (xr[i] - 1.0).abs() >= 10.0 * d_inner)
            .min_by(|&a, &b| (xr[a] - 1.0).abs().total_cmp(&(xr[b] - 1.0).abs()));
        if let Some(o) = outer {
            checks.push((side, log_slope(&xr, &rs, inner, o, true)));
        }
    }
    for (where_, s) in checks {
        if !s.is_finite() || s.abs() > END_SLOPE_TOL {
            return Err(Error::RatioUnbounded(format!("ratio log-slope {s:.4} as {where_}")));
        }
    }
    // fold the end limits into the range: inf and sup over x > 0 are attained only in the limit
    let mut limits = Vec::new();
    let f0 = f.eval(0.0);
    if f0.is_finite() {
        limits.push(f0 / 2.0);
    }
    if k >= 2 {
        let (x1, x2) = (xr[k - 2], xr[k - 1]);
        limits.push((rs[k - 1] * x2 - rs[k - 2] * x1) / (x2 - x1));
    }
    for side in [-1.0, 1.0] {
        let d = 1e-4;
        let r = |d: f64| {
            let x = 1.0 + side * d;
            f.eval(x) / (d.powf(p) + d.powf(q))
        };
        limits.push(2.0 * r(d) - r(2.0 * d));
    }
    let m = limits.iter().copied().filter(|v| v.is_finite()).fold(m, f64::min);
    let big_m = limits.iter().copied().filter(|v| v.is_finite()).fold(big_m, f64::max);
    Ok(FpqMembership { p, q, m, big_m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_is_exact() {
        let r = fpq_membership(&FpqFunction::Alpha(2.0), 2.0, 2.0, None).unwrap();
        assert!((r.m - 0.5).abs() < 1e-9 && (r.big_m - 0.5).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn f3_contains_limit_ratios() {
        let r = fpq_membership(&FpqFunction::Alpha(3.0), 2.0, 3.0, None).unwrap();
        for v in alpha_limit_ratios(3.0) {
            assert!(r.contains_within(v, 1e-6), "{v} not in {r:?}");
        }
    }

    #[test]
    fn f_one_point_five_is_not_a_member() {
        for (p, q) in [(2.0, 2.0), (2.0, 3.0), (1.5, 1.5), (1.5, 2.0), (1.2, 4.0), (1.1, 1.5)] {
            let e = fpq_membership(&FpqFunction::Alpha(1.5), p, q, None).unwrap_err();
            assert!(matches!(e, Error::RatioUnbounded(_)), "{p},{q}: {e:?}");
        }
    }

    #[test]
    fn non_convex_rejected() {
        let c = CustomF::new(|x: f64| (x - 1.0).powi(2) * (1.0 + (5.0 * x).sin() * 0.9), 1.0, f64::INFINITY);
        let e = fpq_membership(&FpqFunction::Custom(c), 2.0, 2.0, None).unwrap_err();
        assert!(matches!(e, Error::NonConvexDetected(_)));
    }

    #[test]
    fn parameter_checks() {
        assert!(fpq_membership(&FpqFunction::Alpha(3.0), 1.0, 2.0, None).is_err());
        assert!(fpq_membership(&FpqFunction::Alpha(3.0), 3.0, 2.0, None).is_err());
    }
}
