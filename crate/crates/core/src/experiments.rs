//! Reference experiment geometry: the two-ball generic setup and the
//! unit-ball non-generic setups.

use crate::phantom::{Ball, Phantom};
use crate::sphere_grid::{direction, SphereGrid};
use crate::Vec3;
use std::f64::consts::PI;

pub const FIG1_CENTER_1: [f64; 3] = [0.0, 0.0, -5.0];
pub const FIG1_CENTER_2: [f64; 3] = [-5.52, 0.0, -7.36];
pub const FIG1_RADIUS: f64 = 4.0;

/// Inward normal `-(cos .7pi sin .2pi, sin .7pi sin .2pi, cos .2pi)`.
pub fn fig1_theta0() -> Vec3 {
    -direction(0.7 * PI, 0.2 * PI)
}

pub fn fig1_phantom() -> Phantom {
    Phantom::new(vec![fig1_near_ball(), fig1_remote_ball()]).expect("two balls")
}

pub fn fig1_near_ball() -> Ball {
    Ball::new(Vec3::from(FIG1_CENTER_1), FIG1_RADIUS, 1.0).expect("valid ball")
}

pub fn fig1_remote_ball() -> Ball {
    Ball::new(Vec3::from(FIG1_CENTER_2), FIG1_RADIUS, 1.0).expect("valid ball")
}

pub fn fig1_x0() -> Vec3 {
    fig1_near_ball().center - FIG1_RADIUS * fig1_theta0()
}

pub fn fig2_theta0() -> Vec3 {
    Vec3::new(-1.0, 0.0, 0.0)
}

pub fn fig2_phantom(center: Vec3) -> Phantom {
    Phantom::new(vec![Ball::new(center, 1.0, 1.0).expect("valid ball")]).expect("one ball")
}

pub fn fig2_x0(center: Vec3) -> Vec3 {
    center - fig2_theta0()
}

/// Grid with `dtheta = 2 pi / n`, `dgamma = pi / n`, `n = round(20 / eps)`,
/// so `eps = 0.04` gives the 500 x 500 reference grid on `p in [-10, 10]`.
pub fn scaled_grid(eps: f64) -> SphereGrid {
    let n = (20.0 / eps).round() as usize;
    SphereGrid::new(n, n, eps, 0.0, -10.0, 10.0).expect("valid reference grid")
}

/// `h in [-5, 5]` with step 0.25.
pub fn default_h_values() -> Vec<f64> {
    (0..=40).map(|k| -5.0 + 0.25 * k as f64).collect()
}
