//! Predicted edge response, profile comparison and the genericity
//! diagnostics that decide whether the prediction applies.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::phantom::{Ball, JumpParams, Phantom};
use crate::rational::{detect_rational, Fraction};
use crate::reconstruct::{reconstruct_profile, DataProvider};
use crate::sphere_grid::SphereGrid;
use crate::Vec3;

/// `f0 - f_delta * int_h^inf phi`.
pub fn predicted_response(kernel: &Kernel, jump: &JumpParams, h: f64) -> f64 {
    jump.f0 - jump.f_delta * kernel.tail_integral(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProfile {
    pub h: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub predicted: Vec<f64>,
    pub max_abs_dev: f64,
    pub l2_dev: f64,
}

impl EdgeProfile {
    pub const CSV_HEADER: &'static str = "h,f_eps,predicted,abs_err";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for ((h, r), p) in self.h.iter().zip(&self.reconstructed).zip(&self.predicted) {
            writeln!(out, "{h},{r},{p},{}", (r - p).abs()).unwrap();
        }
        out
    }
}

/// Fills the deviation metrics: maximum and root-mean-square of `rec - pred`.
pub fn compare_profiles(h: &[f64], reconstructed: &[f64], predicted: &[f64]) -> Result<EdgeProfile> {
    if h.len() != reconstructed.len() || h.len() != predicted.len() {
        return Err(Error::Input(format!(
            "profile lengths differ: h {}, reconstructed {}, predicted {}",
            h.len(),
            reconstructed.len(),
            predicted.len()
        )));
    }
    let devs: Vec<f64> = reconstructed
        .iter()
        .zip(predicted)
        .map(|(r, p)| (r - p).abs())
        .collect();
    let max_abs_dev = devs.iter().copied().fold(0.0, f64::max);
    let l2_dev = if devs.is_empty() {
        0.0
    } else {
        (devs.iter().map(|d| d * d).sum::<f64>() / devs.len() as f64).sqrt()
    };
    Ok(EdgeProfile {
        h: h.to_vec(),
        reconstructed: reconstructed.to_vec(),
        predicted: predicted.to_vec(),
        max_abs_dev,
        l2_dev,
    })
}

/// Reconstructs along `x0 + eps h theta0` and compares with the prediction
/// for the jump at `x0`.
pub fn edge_profile(
    provider: &DataProvider<'_>,
    kernel: &Kernel,
    grid: &SphereGrid,
    jump: &JumpParams,
    x0: &Vec3,
    h_values: &[f64],
) -> Result<EdgeProfile> {
    let rec = reconstruct_profile(provider, kernel, grid, x0, &jump.theta0, h_values)?;
    let f: Vec<f64> = rec.iter().map(|&(_, f)| f).collect();
    let pred: Vec<f64> = h_values
        .iter()
        .map(|&h| predicted_response(kernel, jump, h))
        .collect();
    compare_profiles(h_values, &f, &pred)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cond2Verdict {
    /// At least one gradient component has no small-denominator match.
    Generic,
    /// Every component matches a convergent with denominator at most `q_max`.
    SuspectRational(Fraction, Fraction),
    /// `q(t) = H(t) . x0` is flat to second order at the chart point.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cond4Flag {
    pub m1: i64,
    pub m2: i64,
    pub t1_range: (f64, f64),
    pub slope: f64,
    pub fraction: Fraction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cond4Verdict {
    Pass,
    Suspect(Vec<Cond4Flag>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteCheck {
    pub ball_index: usize,
    pub verdict: Cond4Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityOptions {
    pub q_max: i64,
    pub tol: f64,
    pub m_max: i64,
    /// Flatness threshold relative to the curve's largest `|f''|`.
    pub flat_rel: f64,
    pub curve_samples: usize,
    /// Half width of the sampled azimuth window around the anchor, radians.
    pub curve_half_width: f64,
}

impl Default for GenericityOptions {
    fn default() -> Self {
        GenericityOptions {
            q_max: 1000,
            tol: 1e-9,
            m_max: 5,
            flat_rel: 1e-6,
            curve_samples: 201,
            curve_half_width: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub cond1_positive_curvature: bool,
    pub cond2: Cond2Verdict,
    pub grad_q: [f64; 2],
    pub cond3_remote_curvature: bool,
    pub cond4: Vec<RemoteCheck>,
    pub notes: Vec<String>,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.cond1_positive_curvature
            && self.cond2 == Cond2Verdict::Generic
            && self.cond3_remote_curvature
            && self.cond4.iter().all(|c| c.verdict == Cond4Verdict::Pass)
    }
}

impl fmt::Display for GenericityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "cond1 positive_curvature: {}",
            if self.cond1_positive_curvature { "yes" } else { "no" }
        )?;
        let g = self.grad_q;
        match &self.cond2 {
            Cond2Verdict::Generic => {
                writeln!(f, "cond2 irrational_gradient: generic grad=({}, {})", g[0], g[1])?
            }
            Cond2Verdict::SuspectRational(a, b) => writeln!(
                f,
                "cond2 irrational_gradient: suspect_rational({a}, {b}) grad=({}, {})",
                g[0], g[1]
            )?,
            Cond2Verdict::Degenerate => {
                writeln!(f, "cond2 irrational_gradient: degenerate grad=({}, {})", g[0], g[1])?
            }
        }
        writeln!(
            f,
            "cond3 remote_curvature: {}",
            if self.cond3_remote_curvature { "yes" } else { "no" }
        )?;
        if self.cond4.is_empty() {
            writeln!(f, "cond4 tangency_curves: none")?;
        }
        for c in &self.cond4 {
            match &c.verdict {
                Cond4Verdict::Pass => writeln!(f, "cond4 ball {}: pass", c.ball_index)?,
                Cond4Verdict::Suspect(flags) => {
                    write!(f, "cond4 ball {}: suspect", c.ball_index)?;
                    for fl in flags.iter().take(4) {
                        write!(
                            f,
                            " (M=({}, {}) t1 in [{:.4}, {:.4}] slope {})",
                            fl.m1, fl.m2, fl.t1_range.0, fl.t1_range.1, fl.fraction
                        )?;
                    }
                    if flags.len() > 4 {
                        write!(f, " ... {} flags", flags.len())?;
                    }
                    writeln!(f)?;
                }
            }
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

fn classify_gradient(grid: &SphereGrid, theta0: &Vec3, x0: &Vec3, opts: &GenericityOptions) -> Result<(Cond2Verdict, [f64; 2])> {
    let chart = grid.chart_at(theta0, x0)?;
    let g = chart.grad_q;
    let flat = g.iter().all(|v| v.abs() <= opts.tol)
        && chart.hess_q.iter().all(|v| v.abs() <= opts.tol);
    if flat {
        return Ok((Cond2Verdict::Degenerate, g));
    }
    let verdict = match (
        detect_rational(g[0], opts.q_max, opts.tol),
        detect_rational(g[1], opts.q_max, opts.tol),
    ) {
        (Some(a), Some(b)) => Cond2Verdict::SuspectRational(a, b),
        _ => Cond2Verdict::Generic,
    };
    Ok((verdict, g))
}

/// Genericity diagnostics at `x0` with probe direction `theta0`.
///
/// Conditions 1 and 3 hold for every ball phantom (spheres have positive
/// curvature). Condition 2 scans the chart gradient for small-denominator
/// rationals; condition 4 is a bounded integer scan along the tangency curve
/// of every ball that `x0` lies strictly outside of.
pub fn genericity_report(
    phantom: &Phantom,
    grid: &SphereGrid,
    x0: &Vec3,
    theta0: &Vec3,
    opts: &GenericityOptions,
) -> Result<GenericityReport> {
    let (cond2, grad_q) = classify_gradient(grid, theta0, x0, opts)?;
    let mut notes = vec![
        "conditions 1 and 3 hold for spheres".to_string(),
        format!(
            "rationality scan: denominators <= {}, tolerance {:e}, |M| <= {}",
            opts.q_max, opts.tol, opts.m_max
        ),
    ];
    let mut cond4 = Vec::new();
    for (i, ball) in phantom.balls().iter().enumerate() {
        let dist = (x0 - ball.center).norm();
        if dist <= ball.radius * (1.0 + 1e-9) {
            continue;
        }
        let anchor = nearest_tangent_direction(ball, x0, theta0);
        match tangency_curve(ball, grid, x0, &anchor, opts.curve_samples, opts.curve_half_width) {
            Ok(curve) => cond4.push(RemoteCheck {
                ball_index: i,
                verdict: condition4_check(&curve, opts),
            }),
            Err(e) => notes.push(format!("ball {i}: tangency curve unavailable ({e})")),
        }
    }
    Ok(GenericityReport {
        cond1_positive_curvature: true,
        cond2,
        grad_q,
        cond3_remote_curvature: true,
        cond4,
        notes,
    })
}

/// Direction on the tangency circle `alpha . (x0 - c) = -R` closest to `toward`.
pub fn nearest_tangent_direction(ball: &Ball, x0: &Vec3, toward: &Vec3) -> Vec3 {
    let d = x0 - ball.center;
    let u = d / d.norm();
    let kappa = -ball.radius / d.norm();
    let mut w = toward - toward.dot(&u) * u;
    if w.norm() < 1e-12 {
        w = crate::phantom::orthonormal_complement(&u).0;
    }
    kappa * u + (1.0 - kappa * kappa).max(0.0).sqrt() * w.normalize()
}

/// One sample of the tangency curve in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub t1: f64,
    pub a: f64,
    /// `A'(t1)`.
    pub slope: f64,
    /// `H(t1, A(t1)) . x0`.
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangencyCurve {
    pub ball_index: Option<usize>,
    pub samples: Vec<CurveSample>,
}

impl TangencyCurve {
    /// Curve from explicit samples on a uniform `t1` grid; slopes are
    /// differenced from `a`.
    pub fn from_samples(t1: &[f64], a: &[f64], q: &[f64]) -> Result<Self> {
        if t1.len() != a.len() || t1.len() != q.len() || t1.len() < 5 {
            return Err(Error::Input("curve needs at least 5 aligned samples".into()));
        }
        let h = t1[1] - t1[0];
        if !(h > 0.0) || t1.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
            return Err(Error::Input("curve samples must be uniformly spaced in t1".into()));
        }
        let n = t1.len();
        let samples = (0..n)
            .map(|k| {
                let (lo, hi) = (k.saturating_sub(1), (k + 1).min(n - 1));
                CurveSample {
                    t1: t1[k],
                    a: a[k],
                    slope: (a[hi] - a[lo]) / (t1[hi] - t1[lo]),
                    q: q[k],
                }
            })
            .collect();
        Ok(TangencyCurve {
            ball_index: None,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Polar angles solving `a sin(g) + b cos(g) = -r` in `(0, pi)`.
fn branch_roots(a: f64, b: f64, r: f64) -> Vec<f64> {
    let amp = a.hypot(b);
    if amp < r {
        return Vec::new();
    }
    let phase = a.atan2(b);
    let spread = (-r / amp).clamp(-1.0, 1.0).acos();
    [phase + spread, phase - spread]
        .into_iter()
        .map(|g| g.rem_euclid(2.0 * PI))
        .filter(|&g| g > 0.0 && g < PI)
        .collect()
}

/// Curve `t2 = A(t1)` of chart points whose plane through `x0` touches the
/// ball on the branch `alpha . (x0 - c) = -R`, sampled on a uniform azimuth
/// window around `anchor` and continued from the anchor outward.
pub fn tangency_curve(
    ball: &Ball,
    grid: &SphereGrid,
    x0: &Vec3,
    anchor: &Vec3,
    n_samples: usize,
    half_width: f64,
) -> Result<TangencyCurve> {
    let d = x0 - ball.center;
    if d.norm() <= ball.radius {
        return Err(Error::Geometry("x0 is not outside the ball; no tangent plane passes through it".into()));
    }
    if n_samples < 5 || !(half_width > 0.0) {
        return Err(Error::Input("need at least 5 samples and a positive window".into()));
    }
    let r = ball.radius;
    let theta_a = anchor.y.atan2(anchor.x).rem_euclid(2.0 * PI);
    let gamma_a = anchor.z.clamp(-1.0, 1.0).acos();
    let half = (n_samples / 2) as i64;
    let step = half_width / half as f64;

    let solve = |theta: f64, near: f64| -> Option<f64> {
        let (s, c) = theta.sin_cos();
        let a = c * d.x + s * d.y;
        let roots = branch_roots(a, d.z, r);
        let mut g = roots
            .into_iter()
            .min_by(|x, y| (x - near).abs().total_cmp(&(y - near).abs()))?;
        // Newton polish on v(g) = a sin g + b cos g + r
        for _ in 0..3 {
            let (sg, cg) = g.sin_cos();
            let v = a * sg + d.z * cg + r;
            let dv = a * cg - d.z * sg;
            if dv.abs() < 1e-14 {
                break;
            }
            g -= v / dv;
        }
        (g > 0.0 && g < PI).then_some(g)
    };

    let mut raw: Vec<(f64, f64)> = Vec::new();
    let start = solve(theta_a, gamma_a)
        .ok_or_else(|| Error::Geometry("tangency curve does not reach the anchor azimuth".into()))?;
    raw.push((theta_a, start));
    for dir in [-1i64, 1] {
        let mut prev = start;
        for k in 1..=half {
            let theta = theta_a + (dir * k) as f64 * step;
            match solve(theta, prev) {
                Some(g) if (g - prev).abs() < 0.5 => {
                    raw.push((theta, g));
                    prev = g;
                }
                _ => break,
            }
        }
    }
    raw.sort_by(|x, y| x.0.total_cmp(&y.0));
    if raw.len() < 5 {
        return Err(Error::Geometry("tangency curve leaves the chart domain".into()));
    }

    let kt = grid.delta_theta() / grid.eps();
    let kg = grid.delta_gamma() / grid.eps();
    let mut samples = Vec::with_capacity(raw.len());
    for (theta, gamma) in raw {
        let alpha = crate::sphere_grid::direction(theta, gamma);
        let resid = alpha.dot(&d) + r;
        if resid.abs() >= 1e-9 {
            return Err(Error::Numeric(format!("tangency residual {resid:e} at theta {theta}")));
        }
        let (st, ct) = theta.sin_cos();
        let (sg, cg) = gamma.sin_cos();
        let v_theta = sg * (-st * d.x + ct * d.y);
        let v_gamma = cg * (ct * d.x + st * d.y) - sg * d.z;
        samples.push(CurveSample {
            t1: theta / kt,
            a: gamma / kg,
            // dA/dt1 = -(kt v_theta) / (kg v_gamma)
            slope: -(kt * v_theta) / (kg * v_gamma),
            q: alpha.dot(x0),
        });
    }
    Ok(TangencyCurve {
        ball_index: None,
        samples,
    })
}

/// Bounded surrogate for condition 4: for `0 < M1^2 + M2^2 <= m_max^2`,
/// `f = M1 q(t1, A(t1)) + M2 A(t1)` is differenced along the curve; runs of
/// at least three samples with `|f''|` below `flat_rel * max(1, max |f''|)`
/// are flagged when `f'` there matches a small-denominator rational.
pub fn condition4_check(curve: &TangencyCurve, opts: &GenericityOptions) -> Cond4Verdict {
    let s = &curve.samples;
    let n = s.len();
    if n < 5 {
        return Cond4Verdict::Pass;
    }
    let h = s[1].t1 - s[0].t1;
    let mut flags = Vec::new();
    for m1 in -opts.m_max..=opts.m_max {
        for m2 in -opts.m_max..=opts.m_max {
            let norm2 = m1 * m1 + m2 * m2;
            if norm2 == 0 || norm2 > opts.m_max * opts.m_max {
                continue;
            }
            // one of (M, -M) suffices: f' rational iff -f' rational
            if (m1, m2) < (0, 0) {
                continue;
            }
            let f: Vec<f64> = s
                .iter()
                .map(|c| m1 as f64 * c.q + m2 as f64 * c.a)
                .collect();
            let d1: Vec<f64> = (1..n - 1).map(|k| (f[k + 1] - f[k - 1]) / (2.0 * h)).collect();
            let d2: Vec<f64> = (1..n - 1)
                .map(|k| (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h))
                .collect();
            let scale = d2.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let flat = opts.flat_rel * scale;
            let mut k = 0;
            while k < d2.len() {
                if d2[k].abs() >= flat {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < d2.len() && d2[k].abs() < flat {
                    k += 1;
                }
                if k - start >= 3 {
                    let slope = d1[start..k].iter().sum::<f64>() / (k - start) as f64;
                    if let Some(fraction) = detect_rational(slope, opts.q_max, opts.tol) {
                        flags.push(Cond4Flag {
                            m1,
                            m2,
                            t1_range: (s[start + 1].t1, s[k].t1),
                            slope,
                            fraction,
                        });
                    }
                }
            }
        }
    }
    if flags.is_empty() {
        Cond4Verdict::Pass
    } else {
        Cond4Verdict::Suspect(flags)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteRow {
    pub eps: f64,
    pub values: Vec<(f64, f64)>,
    pub max_abs: f64,
}

/// Reconstruction near a point off the singular support, on a family of
/// grids; each row records `max_h |f_eps(x0 + eps h theta0)|`. The true
/// value there is 0 when `x0` lies outside every ball.
pub fn remote_convergence_check(
    phantom: &Phantom,
    grids: &[SphereGrid],
    kernel: &Kernel,
    x0: &Vec3,
    theta0: &Vec3,
    h_values: &[f64],
) -> Result<Vec<RemoteRow>> {
    if let Some(i) = phantom
        .balls()
        .iter()
        .position(|b| (x0 - b.center).norm() <= b.radius)
    {
        return Err(Error::Geometry(format!("x0 is not outside ball {i}")));
    }
    let provider = DataProvider::Analytic(phantom);
    grids
        .iter()
        .map(|grid| {
            let values = reconstruct_profile(&provider, kernel, grid, x0, theta0, h_values)?;
            let max_abs = values.iter().fold(0.0f64, |m, &(_, f)| m.max(f.abs()));
            Ok(RemoteRow {
                eps: grid.eps(),
                values,
                max_abs,
            })
        })
        .collect()
}
