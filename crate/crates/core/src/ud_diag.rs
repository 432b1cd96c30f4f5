//! Uniform-distribution diagnostics for fractional-part sequences.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};

fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Points `{f(eps i) / eps}` for all integers `i` with `eps i` in `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracSequence {
    pub points: Vec<f64>,
    pub eps: f64,
    pub descriptor: String,
}

/// Pairs in the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct FracPairs {
    pub points: Vec<[f64; 2]>,
    pub eps: f64,
    pub descriptor: String,
}

fn index_range(a: f64, b: f64, eps: f64) -> Result<(i64, i64)> {
    if !(eps > 0.0) || !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Input(format!("need eps > 0 and b > a, got eps={eps}, [{a}, {b}]")));
    }
    let lo = (a / eps - 1e-9).ceil() as i64;
    let hi = (b / eps + 1e-9).floor() as i64;
    if hi < lo {
        return Err(Error::Input(format!("no index i with eps*i in [{a}, {b}] for eps={eps}")));
    }
    Ok((lo, hi))
}

pub fn frac_points(
    mut f: impl FnMut(f64) -> f64,
    descriptor: &str,
    a: f64,
    b: f64,
    eps: f64,
) -> Result<FracSequence> {
    let (lo, hi) = index_range(a, b, eps)?;
    let mut points = Vec::with_capacity((hi - lo + 1) as usize);
    for i in lo..=hi {
        let v = f(eps * i as f64) / eps;
        if !v.is_finite() {
            return Err(Error::Numeric(format!("{descriptor} is not finite at t = {}", eps * i as f64)));
        }
        points.push(frac(v));
    }
    Ok(FracSequence {
        points,
        eps,
        descriptor: descriptor.to_string(),
    })
}

/// `({f(eps i)/eps}, {g(eps i)/eps})` on the common index range.
pub fn frac_pairs(
    f: impl FnMut(f64) -> f64,
    g: impl FnMut(f64) -> f64,
    descriptor: &str,
    a: f64,
    b: f64,
    eps: f64,
) -> Result<FracPairs> {
    let x = frac_points(f, descriptor, a, b, eps)?;
    let y = frac_points(g, descriptor, a, b, eps)?;
    Ok(FracPairs {
        points: x.points.into_iter().zip(y.points).map(|(x, y)| [x, y]).collect(),
        eps,
        descriptor: descriptor.to_string(),
    })
}

/// `|(1/N) sum_i e(M x_i)|`, in `[0, 1]`.
pub fn weyl_sum(seq: &FracSequence, m: i64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Input("Weyl sum frequency must be nonzero".into()));
    }
    if seq.points.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in &seq.points {
        // reduce before scaling by 2 pi so large M keeps full precision
        let phase = 2.0 * PI * frac(m as f64 * x);
        re += phase.cos();
        im += phase.sin();
    }
    Ok(re.hypot(im) / seq.points.len() as f64)
}

/// Exact star discrepancy of a one-dimensional point set.
pub fn star_discrepancy_1d(points: &[f64]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    let mut xs = points.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(k, &x)| ((k + 1) as f64 / n - x).max(x - k as f64 / n))
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy2d {
    pub value: f64,
    /// Bound on `|value - D*|` from restricting box corners to the grid.
    pub error_bound: f64,
}

/// Star discrepancy over anchored boxes `[0, i/r) x [0, j/r)`.
pub fn discrepancy_2d(points: &[[f64; 2]], resolution: usize) -> Result<Discrepancy2d> {
    if resolution < 2 {
        return Err(Error::Input("resolution must be at least 2".into()));
    }
    if points.is_empty() {
        return Err(Error::Input("empty sequence".into()));
    }
    let r = resolution;
    let cell = |v: f64| ((v * r as f64).floor() as usize).min(r - 1);
    // counts[(i+1)*(r+1) + (j+1)] = points in cell (i, j), then 2D prefix sums
    let w = r + 1;
    let mut counts = vec![0u64; w * w];
    for p in points {
        counts[(cell(p[0]) + 1) * w + cell(p[1]) + 1] += 1;
    }
    for i in 1..w {
        for j in 1..w {
            counts[i * w + j] += counts[(i - 1) * w + j] + counts[i * w + j - 1] - counts[(i - 1) * w + j - 1];
        }
    }
    let n = points.len() as f64;
    let rf = r as f64;
    let value = (1..w)
        .into_par_iter()
        .map(|i| {
            (1..w)
                .map(|j| (counts[i * w + j] as f64 / n - (i as f64 / rf) * (j as f64 / rf)).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(Discrepancy2d {
        value,
        error_bound: 2.0 / rf,
    })
}

/// `(x, y) -> ({x + a y}, y)`.
pub fn shear_map(points: &[[f64; 2]], a: f64) -> Vec<[f64; 2]> {
    points.iter().map(|&[x, y]| [frac(x + a * y), y]).collect()
}
