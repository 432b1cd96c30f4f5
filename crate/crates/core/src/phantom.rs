//! Ball phantoms with closed-form plane integrals.
//!
//! A phantom is a superposition of uniform-density balls; overlapping balls
//! add their densities. Every geometric quantity used by the reconstruction
//! diagnostics (plane integrals, tangency offsets, curvature, jump values) is
//! available in closed form.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::Vec3;

const UNIT_TOL: f64 = 1e-12;
const BOUNDARY_REL_TOL: f64 = 1e-9;

pub(crate) fn check_unit(v: &Vec3, what: &str) -> Result<()> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::Input(format!("{what} must be a unit vector (norm = {n})")));
    }
    Ok(())
}

/// Orthonormal pair spanning the plane orthogonal to `alpha`.
pub(crate) fn orthonormal_complement(alpha: &Vec3) -> (Vec3, Vec3) {
    let helper = if alpha.x.abs() < 0.9 {
        Vec3::x()
    } else {
        Vec3::y()
    };
    let u = alpha.cross(&helper).normalize();
    let v = alpha.cross(&u);
    (u, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
    pub density: f64,
}

impl Ball {
    pub fn new(center: Vec3, radius: f64, density: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Input(format!("ball radius must be positive, got {radius}")));
        }
        if !density.is_finite() || !center.iter().all(|c| c.is_finite()) {
            return Err(Error::Input("ball center and density must be finite".into()));
        }
        Ok(Ball {
            center,
            radius,
            density,
        })
    }

    /// Plane integral over `{x : alpha . x = p}`; the caller guarantees `alpha` is unit.
    #[inline]
    pub(crate) fn radon_unchecked(&self, alpha: &Vec3, p: f64) -> f64 {
        let d = p - alpha.dot(&self.center);
        let r2 = self.radius * self.radius - d * d;
        if r2 > 0.0 {
            self.density * PI * r2
        } else {
            0.0
        }
    }

    pub fn radon(&self, alpha: &Vec3, p: f64) -> Result<f64> {
        check_unit(alpha, "alpha")?;
        Ok(self.radon_unchecked(alpha, p))
    }

    /// Point of the sphere whose inward normal is `theta0`.
    pub fn boundary_point(&self, theta0: &Vec3) -> Result<Vec3> {
        check_unit(theta0, "theta0")?;
        Ok(self.center - self.radius * theta0)
    }

    /// Plane offsets `alpha . center -/+ radius` at which the plane touches the sphere.
    pub fn tangency_offsets(&self, alpha: &Vec3) -> Result<(f64, f64)> {
        check_unit(alpha, "alpha")?;
        let m = alpha.dot(&self.center);
        Ok((m - self.radius, m + self.radius))
    }

    pub fn curvature(&self) -> SurfaceCurvature {
        let k = 1.0 / self.radius;
        SurfaceCurvature {
            q: Matrix2::identity() * k,
            det_q: k * k,
        }
    }

    fn boundary_distance(&self, x: &Vec3) -> f64 {
        (x - self.center).norm() - self.radius
    }

    fn on_boundary(&self, x: &Vec3) -> bool {
        self.boundary_distance(x).abs() <= BOUNDARY_REL_TOL * self.radius
    }
}

/// Second fundamental form of a boundary surface in a tangent basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCurvature {
    pub q: Matrix2<f64>,
    pub det_q: f64,
}

/// One-sided limits of the phantom across a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    /// Limit from the interior side.
    pub f0: f64,
    /// Interior minus exterior limit.
    pub f_delta: f64,
    /// Inward unit normal.
    pub theta0: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    balls: Vec<Ball>,
}

impl Phantom {
    pub fn new(balls: Vec<Ball>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::Input("phantom needs at least one ball".into()));
        }
        Ok(Phantom { balls })
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn ball(&self, index: usize) -> Result<&Ball> {
        self.balls
            .get(index)
            .ok_or_else(|| Error::Input(format!("ball index {index} out of range")))
    }

    #[inline]
    pub(crate) fn radon_unchecked(&self, alpha: &Vec3, p: f64) -> f64 {
        self.balls.iter().map(|b| b.radon_unchecked(alpha, p)).sum()
    }

    pub fn radon(&self, alpha: &Vec3, p: f64) -> Result<f64> {
        check_unit(alpha, "alpha")?;
        Ok(self.radon_unchecked(alpha, p))
    }

    /// Pointwise density (boundary points count as interior).
    pub fn density_at(&self, x: &Vec3) -> f64 {
        self.balls
            .iter()
            .filter(|b| (x - b.center).norm() <= b.radius)
            .map(|b| b.density)
            .sum()
    }

    /// Jump data at a boundary point, from exact ball membership.
    pub fn jump_params(&self, x0: &Vec3, theta0: &Vec3) -> Result<JumpParams> {
        check_unit(theta0, "theta0")?;
        let on: Vec<usize> = (0..self.balls.len())
            .filter(|&i| self.balls[i].on_boundary(x0))
            .collect();
        let idx = match on.as_slice() {
            [i] => *i,
            [] => return Err(Error::Geometry("x0 is not on any ball boundary".into())),
            _ => {
                return Err(Error::Geometry(format!(
                    "x0 lies on {} ball boundaries (balls {:?})",
                    on.len(),
                    on
                )))
            }
        };
        let ball = &self.balls[idx];
        let inward = (ball.center - x0) / ball.radius;
        if inward.dot(theta0) < 1.0 - 1e-6 {
            return Err(Error::Geometry(format!(
                "theta0 is not the inward normal of ball {idx} at x0"
            )));
        }
        let others: f64 = self
            .balls
            .iter()
            .enumerate()
            .filter(|&(i, b)| i != idx && b.boundary_distance(x0) < 0.0)
            .map(|(_, b)| b.density)
            .sum();
        Ok(JumpParams {
            f0: others + ball.density,
            f_delta: ball.density,
            theta0: *theta0,
        })
    }

    /// Least-squares slope of `g(alpha, p) - g(alpha, p0)` against `p - p0` on
    /// samples `p0 + k * p_step`, `0 < k * p_step <= fit_window`, where `p0` is
    /// the lower tangency offset of the chosen ball.
    pub fn local_amplitude_slope(
        &self,
        ball_index: usize,
        alpha: &Vec3,
        fit_window: f64,
        p_step: f64,
    ) -> Result<f64> {
        check_unit(alpha, "alpha")?;
        let ball = self.ball(ball_index)?;
        if !(p_step > 0.0) || !(fit_window > 0.0) {
            return Err(Error::Input("fit window and p step must be positive".into()));
        }
        let n = (fit_window / p_step + 1e-9).floor() as usize;
        if n < 2 {
            return Err(Error::Numeric(format!(
                "fit window {fit_window} holds fewer than two samples at step {p_step}"
            )));
        }
        let p0 = alpha.dot(&ball.center) - ball.radius;
        let g0 = self.radon_unchecked(alpha, p0);
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for k in 1..=n {
            let u = k as f64 * p_step;
            sxy += u * (self.radon_unchecked(alpha, p0 + u) - g0);
            sxx += u * u;
        }
        Ok(sxy / sxx)
    }

    /// Midpoint Riemann sum of the density over the plane `{alpha . x = p}`
    /// on a square lattice of spacing `grid_step`. Used as an oracle for
    /// [`Phantom::radon`]; it only relies on ball membership.
    pub fn radon_quadrature_oracle(&self, alpha: &Vec3, p: f64, grid_step: f64) -> Result<f64> {
        check_unit(alpha, "alpha")?;
        if !(grid_step > 0.0 && grid_step.is_finite()) {
            return Err(Error::Input(format!("grid step must be positive, got {grid_step}")));
        }
        let (u, v) = orthonormal_complement(alpha);
        let half = self
            .balls
            .iter()
            .map(|b| b.center.dot(&u).abs().max(b.center.dot(&v).abs()) + b.radius)
            .fold(0.0, f64::max)
            + grid_step;
        let n = (2.0 * half / grid_step).ceil() as i64;
        let origin = -half;
        let mut total = 0.0;
        for row in 0..n {
            let b_coord = origin + (row as f64 + 0.5) * grid_step;
            let mut row_sum = 0.0;
            for ball in &self.balls {
                let dn = p - alpha.dot(&ball.center);
                let dv = b_coord - v.dot(&ball.center);
                let rem = ball.radius * ball.radius - dn * dn - dv * dv;
                if rem < 0.0 {
                    continue;
                }
                let half_chord = rem.sqrt();
                let mid = u.dot(&ball.center);
                // lattice midpoints a_m = origin + (m + 1/2) * step inside [mid - hc, mid + hc]
                let lo = ((mid - half_chord - origin) / grid_step - 0.5).ceil() as i64;
                let hi = ((mid + half_chord - origin) / grid_step - 0.5).floor() as i64;
                if hi >= lo {
                    row_sum += ball.density * (hi - lo + 1) as f64;
                }
            }
            total += row_sum;
        }
        Ok(total * grid_step * grid_step)
    }
}
