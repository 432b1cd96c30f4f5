//! Latitude-longitude sampling of the sphere, quadrature weights and the
//! local chart `H(t1, t2) = direction(t1 * dtheta / eps, t2 * dgamma / eps)`.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::phantom::check_unit;
use crate::Vec3;

const POLE_TOL: f64 = 1e-6;
const INDEX_TOL: f64 = 1e-9;

/// Unit direction with azimuth `theta` and polar angle `gamma`.
#[inline]
pub fn direction(theta: f64, gamma: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    Vec3::new(ct * sg, st * sg, cg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    n_theta: usize,
    n_gamma: usize,
    delta_theta: f64,
    delta_gamma: f64,
    eps: f64,
    rho: f64,
    p_min: f64,
    p_max: f64,
    j_min: i64,
    j_max: i64,
    directions: Vec<Vec3>,
    ring_weights: Vec<f64>,
}

impl SphereGrid {
    /// Directions for `i1 in 0..n_theta`, `i2 in 1..n_gamma` (poles and the
    /// duplicate `theta = 2 pi` column dropped), affine samples
    /// `p_j = eps (rho + j)` covering `[p_min, p_max]`.
    pub fn new(
        n_theta: usize,
        n_gamma: usize,
        eps: f64,
        rho: f64,
        p_min: f64,
        p_max: f64,
    ) -> Result<Self> {
        if n_theta < 4 || n_gamma < 2 {
            return Err(Error::Input(format!(
                "need n_theta >= 4 and n_gamma >= 2, got {n_theta} x {n_gamma}"
            )));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Input(format!("eps must be positive, got {eps}")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Input(format!("rho must lie in [0, 1), got {rho}")));
        }
        if !(p_min < p_max) || !p_min.is_finite() || !p_max.is_finite() {
            return Err(Error::Input(format!("invalid p range [{p_min}, {p_max}]")));
        }
        let j_min = (p_min / eps - rho - INDEX_TOL).ceil() as i64;
        let j_max = (p_max / eps - rho + INDEX_TOL).floor() as i64;
        if j_max <= j_min {
            return Err(Error::Input(format!(
                "p range [{p_min}, {p_max}] holds fewer than two samples at eps {eps}"
            )));
        }
        let delta_theta = 2.0 * PI / n_theta as f64;
        let delta_gamma = PI / n_gamma as f64;
        let mut directions = Vec::with_capacity(n_theta * (n_gamma - 1));
        let mut ring_weights = Vec::with_capacity(n_gamma - 1);
        for i2 in 1..n_gamma {
            let gamma = delta_gamma * i2 as f64;
            // sin(gamma) = sin(pi - gamma), evaluated on the northern index
            let mirrored = delta_gamma * i2.min(n_gamma - i2) as f64;
            ring_weights.push(mirrored.sin() * delta_theta * delta_gamma);
            for i1 in 0..n_theta {
                directions.push(direction(delta_theta * i1 as f64, gamma));
            }
        }
        Ok(SphereGrid {
            n_theta,
            n_gamma,
            delta_theta,
            delta_gamma,
            eps,
            rho,
            p_min,
            p_max,
            j_min,
            j_max,
            directions,
            ring_weights,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    pub fn delta_theta(&self) -> f64 {
        self.delta_theta
    }

    pub fn delta_gamma(&self) -> f64 {
        self.delta_gamma
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn p_range(&self) -> (f64, f64) {
        (self.p_min, self.p_max)
    }

    /// Inclusive range of sample indices `j`.
    pub fn sample_range(&self) -> (i64, i64) {
        (self.j_min, self.j_max)
    }

    pub fn n_p(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    #[inline]
    pub fn sample_p(&self, j: i64) -> f64 {
        self.eps * (self.rho + j as f64)
    }

    pub fn n_directions(&self) -> usize {
        self.directions.len()
    }

    /// Directions in reduction order: row-major over `(i2, i1)`.
    pub fn directions(&self) -> &[Vec3] {
        &self.directions
    }

    /// Flat index of node `(i1, i2)`.
    pub fn flat_index(&self, i1: usize, i2: usize) -> Result<usize> {
        self.check_node(i1, i2)?;
        Ok((i2 - 1) * self.n_theta + i1)
    }

    /// Node `(i1, i2)` of a flat index.
    pub fn node(&self, flat: usize) -> (usize, usize) {
        (flat % self.n_theta, flat / self.n_theta + 1)
    }

    fn check_node(&self, i1: usize, i2: usize) -> Result<()> {
        if i1 >= self.n_theta || i2 == 0 || i2 >= self.n_gamma {
            return Err(Error::Input(format!(
                "node ({i1}, {i2}) outside 0..{} x 1..{}",
                self.n_theta, self.n_gamma
            )));
        }
        Ok(())
    }

    pub fn alpha(&self, i1: usize, i2: usize) -> Result<Vec3> {
        Ok(self.directions[self.flat_index(i1, i2)?])
    }

    /// Tessellation area `sin(gamma) dtheta dgamma` of node `(i1, i2)`.
    pub fn weight(&self, i1: usize, i2: usize) -> Result<f64> {
        self.check_node(i1, i2)?;
        Ok(self.ring_weights[i2 - 1])
    }

    #[inline]
    pub(crate) fn weight_flat(&self, flat: usize) -> f64 {
        self.ring_weights[flat / self.n_theta]
    }

    pub fn total_weight(&self) -> f64 {
        self.ring_weights.iter().sum::<f64>() * self.n_theta as f64
    }

    /// The node representing `-alpha`, available when `n_theta` is even.
    pub fn antipode(&self, i1: usize, i2: usize) -> Result<Option<(usize, usize)>> {
        self.check_node(i1, i2)?;
        if !self.n_theta.is_multiple_of(2) {
            return Ok(None);
        }
        Ok(Some((
            (i1 + self.n_theta / 2) % self.n_theta,
            self.n_gamma - i2,
        )))
    }

    /// Chart data of `q(t) = H(t) . x0` at the chart point of `theta0`.
    pub fn chart_at(&self, theta0: &Vec3, x0: &Vec3) -> Result<GridChart> {
        check_unit(theta0, "theta0")?;
        let gamma = theta0.z.clamp(-1.0, 1.0).acos();
        let (sg, cg) = gamma.sin_cos();
        if sg < POLE_TOL {
            return Err(Error::Chart(format!(
                "theta0 is within {POLE_TOL} of a pole of the latitude-longitude chart"
            )));
        }
        let theta = theta0.y.atan2(theta0.x).rem_euclid(2.0 * PI);
        let (st, ct) = theta.sin_cos();
        let (x, y, z) = (x0.x, x0.y, x0.z);
        let kt = self.delta_theta / self.eps;
        let kg = self.delta_gamma / self.eps;

        let radial = ct * x + st * y;
        let tangential = -st * x + ct * y;
        let d_theta = sg * tangential;
        let d_gamma = cg * radial - sg * z;
        let d_tt = -sg * radial;
        let d_tg = cg * tangential;
        let d_gg = -sg * radial - cg * z;

        let chart = GridChart {
            t_star: [theta * self.eps / self.delta_theta, gamma * self.eps / self.delta_gamma],
            grad_q: [kt * d_theta, kg * d_gamma],
            hess_q: Matrix2::new(kt * kt * d_tt, kt * kg * d_tg, kt * kg * d_tg, kg * kg * d_gg),
            jacobian_det: sg * kt * kg,
        };
        if !(chart.jacobian_det > 0.0) {
            return Err(Error::Chart("chart Jacobian is not positive".into()));
        }
        Ok(chart)
    }

    /// Chart map `H(t)`.
    pub fn chart_direction(&self, t1: f64, t2: f64) -> Vec3 {
        direction(
            t1 * self.delta_theta / self.eps,
            t2 * self.delta_gamma / self.eps,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridChart {
    pub t_star: [f64; 2],
    pub grad_q: [f64; 2],
    pub hess_q: Matrix2<f64>,
    pub jacobian_det: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_grid() -> SphereGrid {
        SphereGrid::new(500, 500, 0.04, 0.0, -10.0, 10.0).unwrap()
    }

    #[test]
    fn paper_grid_dimensions() {
        let g = paper_grid();
        assert_eq!(g.n_directions(), 500 * 499);
        assert_eq!(g.n_p(), 501);
        assert_eq!(g.sample_range(), (-250, 250));
        assert_eq!(g.sample_p(-250), -10.0);
        assert_eq!(g.sample_p(250), 10.0);
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn small_grid_is_equatorial() {
        let g = SphereGrid::new(4, 2, 0.1, 0.0, -1.0, 1.0).unwrap();
        assert_eq!(g.n_directions(), 4);
        for a in g.directions() {
            assert!(a.z.abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(SphereGrid::new(3, 10, 0.1, 0.0, -1.0, 1.0).is_err());
        assert!(SphereGrid::new(10, 10, 0.0, 0.0, -1.0, 1.0).is_err());
        assert!(SphereGrid::new(10, 10, 0.1, 1.0, -1.0, 1.0).is_err());
        assert!(SphereGrid::new(10, 10, 0.1, 0.0, 1.0, -1.0).is_err());
        assert!(SphereGrid::new(10, 10, 1.0, 0.0, 0.1, 0.2).is_err());
    }

    #[test]
    fn weight_examples() {
        let g = paper_grid();
        let w = g.weight(0, 250).unwrap();
        assert!((w - 2.0 * PI * PI / 250_000.0).abs() < 1e-15);
        assert!((w - 7.8957e-5).abs() < 1e-9);
        for i2 in 1..500 {
            assert_eq!(g.weight(3, i2).unwrap(), g.weight(7, i2).unwrap());
            let mirror = g.weight(0, 500 - i2).unwrap();
            assert_eq!(g.weight(0, i2).unwrap(), mirror);
        }
        let gamma = 100.0 * g.delta_gamma();
        let ring: f64 = (0..500).map(|i1| g.weight(i1, 100).unwrap()).sum();
        assert!((ring - 2.0 * PI * gamma.sin() * g.delta_gamma()).abs() < 1e-12);
        assert!(g.weight(500, 1).is_err());
        assert!(g.weight(0, 0).is_err());
        assert!(g.weight(0, 500).is_err());
    }

    #[test]
    fn total_weight_converges_at_first_order_or_better() {
        let errs: Vec<f64> = [50usize, 100, 200]
            .iter()
            .map(|&n| {
                let g = SphereGrid::new(n, n, 0.1, 0.0, -1.0, 1.0).unwrap();
                (g.total_weight() - 4.0 * PI).abs()
            })
            .collect();
        assert!(errs[1] < errs[0] / 1.9 && errs[2] < errs[1] / 1.9, "{errs:?}");
    }

    #[test]
    fn directions_are_unit_and_paired() {
        let g = SphereGrid::new(40, 30, 0.1, 0.0, -1.0, 1.0).unwrap();
        for i2 in 1..30 {
            for i1 in 0..40 {
                let a = g.alpha(i1, i2).unwrap();
                assert!((a.norm() - 1.0).abs() < 1e-14);
                let (j1, j2) = g.antipode(i1, i2).unwrap().unwrap();
                let b = g.alpha(j1, j2).unwrap();
                assert!((a + b).norm() < 1e-14);
            }
        }
        let odd = SphereGrid::new(5, 4, 0.1, 0.0, -1.0, 1.0).unwrap();
        assert_eq!(odd.antipode(0, 1).unwrap(), None);
    }

    #[test]
    fn chart_non_generic_case_has_zero_gradient() {
        let g = paper_grid();
        let c = g
            .chart_at(&Vec3::new(-1.0, 0.0, 0.0), &Vec3::new(1.0, 0.0, 0.0))
            .unwrap();
        assert!(c.grad_q[0].abs() < 1e-15 && c.grad_q[1].abs() < 1e-15, "{:?}", c.grad_q);
        let c = g
            .chart_at(&Vec3::new(0.3, 0.4, 0.5).normalize(), &Vec3::zeros())
            .unwrap();
        assert_eq!(c.grad_q, [0.0, 0.0]);
        assert!(c.jacobian_det > 0.0);
    }

    #[test]
    fn chart_rejects_poles() {
        let g = paper_grid();
        assert!(matches!(
            g.chart_at(&Vec3::z(), &Vec3::new(1.0, 0.0, 0.0)),
            Err(Error::Chart(_))
        ));
    }

    #[test]
    fn chart_matches_finite_differences() {
        let g = paper_grid();
        let theta0 = Vec3::new(0.3, -0.5, 0.6).normalize();
        let x0 = Vec3::new(1.3, -2.0, 0.7);
        let c = g.chart_at(&theta0, &x0).unwrap();
        let q = |t1: f64, t2: f64| g.chart_direction(t1, t2).dot(&x0);
        let [t1, t2] = c.t_star;
        assert!((g.chart_direction(t1, t2) - theta0).norm() < 1e-12);
        let h = 1e-4;
        let g1 = (q(t1 + h, t2) - q(t1 - h, t2)) / (2.0 * h);
        let g2 = (q(t1, t2 + h) - q(t1, t2 - h)) / (2.0 * h);
        assert!((g1 - c.grad_q[0]).abs() < 1e-6);
        assert!((g2 - c.grad_q[1]).abs() < 1e-6);
        let h = 1e-3;
        let h11 = (q(t1 + h, t2) - 2.0 * q(t1, t2) + q(t1 - h, t2)) / (h * h);
        let h22 = (q(t1, t2 + h) - 2.0 * q(t1, t2) + q(t1, t2 - h)) / (h * h);
        let h12 = (q(t1 + h, t2 + h) - q(t1 + h, t2 - h) - q(t1 - h, t2 + h) + q(t1 - h, t2 - h))
            / (4.0 * h * h);
        assert!((h11 - c.hess_q[(0, 0)]).abs() < 1e-6);
        assert!((h22 - c.hess_q[(1, 1)]).abs() < 1e-6);
        assert!((h12 - c.hess_q[(0, 1)]).abs() < 1e-6);
    }
}
