//! The symmetric interpolating kernel of class {N=4, W=6, R=2, L=3}.
//!
//! The kernel is assembled from cardinal B-splines with exact rational
//! coefficients and centered so that its support is `[-3, 3]`:
//!
//! `phi(t) = raw(t + 3)`, `raw(t) = (B3(t) + B3(t-2))/2 + 4 B3(t-1) - 2 (B4(t) + B4(t-1))`.

use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{bspline, rational, to_f64, PiecewisePolynomial, Rational};

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// Four-point Gauss-Legendre rule on `[a, b]`, exact up to degree 7.
pub(crate) fn gauss4(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    GAUSS4.iter().map(|&(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Composite Gauss rule over the sorted cut points in `[a, b]`.
fn gauss_composite(a: f64, b: f64, cuts: &mut Vec<f64>, f: impl Fn(f64) -> f64) -> f64 {
    cuts.retain(|&c| c > a && c < b);
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2).map(|w| gauss4(w[0], w[1], &f)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    derivs: [PiecewisePolynomial; 4],
}

impl Kernel {
    /// Wraps an arbitrary piecewise polynomial; used to check candidate kernels.
    pub fn from_piecewise(phi: PiecewisePolynomial) -> Self {
        let d1 = phi.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        Kernel {
            derivs: [phi, d1, d2, d3],
        }
    }

    pub fn phi(&self) -> &PiecewisePolynomial {
        &self.derivs[0]
    }

    pub fn derivative(&self, m: usize) -> Result<&PiecewisePolynomial> {
        self.derivs
            .get(m)
            .ok_or_else(|| Error::Input(format!("derivative order must be in 0..=3, got {m}")))
    }

    pub fn eval(&self, t: f64, m: usize) -> Result<f64> {
        Ok(self.derivative(m)?.eval(t))
    }

    #[inline]
    pub(crate) fn phi2(&self, t: f64) -> f64 {
        self.derivs[2].eval(t)
    }

    /// Integer support bound `S` with `supp(phi)` inside `[-S, S]`.
    pub fn half_width(&self) -> i64 {
        match self.phi().support() {
            Some((lo, hi)) => to_f64(&hi).max(-to_f64(&lo)).ceil() as i64,
            None => 0,
        }
    }

    /// `int_h^infinity phi(s) ds`.
    pub fn tail_integral(&self, h: f64) -> f64 {
        self.phi().integral_from(h)
    }

    /// `psi(q, s) = sum_j (j - q + s)_+ phi''(q - j)`.
    pub fn psi(&self, q: f64, s: f64) -> f64 {
        let w = self.half_width() as f64;
        let lo = (q - w).ceil() as i64;
        let hi = (q + w).floor() as i64;
        (lo..=hi)
            .map(|j| {
                let j = j as f64;
                let ramp = (j - q + s).max(0.0);
                if ramp == 0.0 {
                    0.0
                } else {
                    ramp * self.phi2(q - j)
                }
            })
            .sum()
    }

    fn knot_fractions(&self) -> Vec<f64> {
        self.phi()
            .breakpoints()
            .iter()
            .map(|b| to_f64(b).rem_euclid(1.0))
            .collect()
    }

    /// `int_0^1 psi(t, s) dt` by a composite Gauss rule split where the
    /// integrand is not smooth (kernel knots and the ramp kink).
    pub fn psi_cell_integral(&self, s: f64) -> f64 {
        let mut cuts = self.knot_fractions();
        cuts.push(s.rem_euclid(1.0));
        gauss_composite(0.0, 1.0, &mut cuts, |t| self.psi(t, s))
    }

    /// `-int_h^infinity int_0^1 psi(t, s) dt ds`, with the outer integral
    /// truncated where `psi` vanishes.
    pub fn psi_tail(&self, h: f64) -> f64 {
        let top = self.half_width() as f64 + 1.0;
        if h >= top {
            return 0.0;
        }
        let mut cuts: Vec<f64> = (-(top as i64)..=top as i64).map(|k| k as f64).collect();
        cuts.extend(self.phi().breakpoints().iter().map(to_f64));
        -gauss_composite(h, top, &mut cuts, |s| self.psi_cell_integral(s))
    }

    pub fn verify_assumptions(&self) -> AxiomReport {
        verify(self)
    }
}

/// The kernel used by the reconstruction.
pub fn build_kernel() -> Kernel {
    let b3 = bspline(3).expect("degree 3 is supported");
    let b4 = bspline(4).expect("degree 4 is supported");
    let one = Rational::one;
    let half = rational(1, 2);
    let raw = b3
        .add(&b3.shift(rational(2, 1)))
        .and_then(|s| s.scale(half).add(&b3.shift(one()).scale(rational(4, 1))))
        .and_then(|s| s.add(&b4.add(&b4.shift(one()))?.scale(rational(-2, 1))))
        .expect("B-spline combination is well formed");
    Kernel::from_piecewise(raw.shift(rational(-3, 1)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<14} {}  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail
            )?;
        }
        Ok(())
    }
}

pub const A1_SAMPLES: usize = 1000;
pub const A1_TOL: f64 = 1e-10;
const A1_SEED: u64 = 0x005e_eda1;
pub const KERNEL_HALF_WIDTH: i128 = 3;

fn verify(kernel: &Kernel) -> AxiomReport {
    let phi = kernel.phi();
    let mut checks = Vec::new();

    // A1: reproduction of 1, t, t^2 at random points.
    let mut rng = ChaCha8Rng::seed_from_u64(A1_SEED);
    let w = kernel.half_width();
    let mut worst = [0.0f64; 3];
    for _ in 0..A1_SAMPLES {
        let t: f64 = rng.random_range(-10.0..10.0);
        let (lo, hi) = ((t - w as f64).ceil() as i64, (t + w as f64).floor() as i64);
        for (m, slot) in worst.iter_mut().enumerate() {
            let s: f64 = (lo..=hi)
                .map(|j| (j as f64).powi(m as i32) * phi.eval(t - j as f64))
                .sum();
            *slot = slot.max((s - t.powi(m as i32)).abs());
        }
    }
    checks.push(AxiomCheck {
        name: "A1-exactness",
        passed: worst.iter().all(|&e| e < A1_TOL),
        detail: format!(
            "max error m=0: {:.3e}, m=1: {:.3e}, m=2: {:.3e} over {A1_SAMPLES} points",
            worst[0], worst[1], worst[2]
        ),
    });

    let target = (
        Rational::from_integer(-KERNEL_HALF_WIDTH),
        Rational::from_integer(KERNEL_HALF_WIDTH),
    );
    let support = phi.support();
    checks.push(AxiomCheck {
        name: "A2-support",
        passed: support == Some(target),
        detail: match support {
            Some((a, b)) => format!("support [{a}, {b}], expected [{}, {}]", target.0, target.1),
            None => "identically zero".into(),
        },
    });

    // A3: phi, phi', phi'' continuous at every knot, from exact one-sided limits.
    let mut jumps = Vec::new();
    for m in 0..=2 {
        let d = &kernel.derivs[m];
        for &b in d.breakpoints() {
            if d.left_limit(b) != d.eval_exact(b) {
                jumps.push(format!("phi^({m}) at {b}"));
            }
        }
    }
    checks.push(AxiomCheck {
        name: "A3-smoothness",
        passed: jumps.is_empty(),
        detail: if jumps.is_empty() {
            "phi, phi', phi'' continuous at all knots".into()
        } else {
            format!("discontinuities: {}", jumps.join(", "))
        },
    });

    let d3 = &kernel.derivs[3];
    let bound = d3
        .breakpoints()
        .windows(2)
        .flat_map(|k| {
            let (a, b) = (to_f64(&k[0]), to_f64(&k[1]));
            (0..=16).map(move |i| a + (b - a) * i as f64 / 16.0)
        })
        .map(|t| d3.eval(t).abs())
        .fold(0.0, f64::max);
    checks.push(AxiomCheck {
        name: "A4-phi3-bound",
        passed: bound.is_finite(),
        detail: format!("sup |phi'''| = {bound}"),
    });

    let integral = phi.integral();
    checks.push(AxiomCheck {
        name: "A5-integral",
        passed: integral == Rational::one(),
        detail: format!("integral = {integral}"),
    });

    checks.push(AxiomCheck {
        name: "symmetry",
        passed: is_even(phi),
        detail: "phi(t) = phi(-t) checked piece by piece".into(),
    });

    let mut bad = Vec::new();
    if let Some((lo, hi)) = phi.support() {
        let (lo, hi) = (
            to_f64(&lo).floor() as i128 - 1,
            to_f64(&hi).ceil() as i128 + 1,
        );
        for n in lo..=hi {
            let v = phi.eval_exact(Rational::from_integer(n));
            let want = if n == 0 { Rational::one() } else { Rational::zero() };
            if v != want {
                bad.push(format!("phi({n}) = {v}"));
            }
        }
    } else {
        bad.push("phi(0) = 0".into());
    }
    checks.push(AxiomCheck {
        name: "interpolation",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "phi(n) = delta(n) at all integers".into()
        } else {
            bad.join(", ")
        },
    });

    AxiomReport { checks }
}

fn is_even(phi: &PiecewisePolynomial) -> bool {
    let b = phi.breakpoints();
    let p = phi.pieces();
    let n = p.len();
    if (0..b.len()).any(|k| b[k] != -b[b.len() - 1 - k]) {
        return false;
    }
    (0..n).all(|k| {
        let width = b[k + 1] - b[k];
        // phi on piece k at local u equals the mirror piece at local width - u
        let mirrored = p[n - 1 - k].reflect().taylor_shift(-width);
        mirrored == p[k]
    })
}
