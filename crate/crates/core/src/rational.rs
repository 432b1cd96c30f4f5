//! Small-denominator rational detection by continued fractions.

/// A rational `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Continued-fraction convergents of `x` with denominator at most `q_max`.
pub fn convergents(x: f64, q_max: i64) -> Vec<Fraction> {
    let mut out = Vec::new();
    if !x.is_finite() {
        return out;
    }
    let (mut h_prev, mut h) = (1i128, x.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut rem = x - x.floor();
    out.push(Fraction {
        num: h as i64,
        den: 1,
    });
    for _ in 0..64 {
        if rem <= 1e-15 {
            break;
        }
        let inv = 1.0 / rem;
        let a = inv.floor() as i128;
        rem = inv - inv.floor();
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        if k_next > q_max as i128 {
            break;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        out.push(Fraction {
            num: h as i64,
            den: k as i64,
        });
    }
    out
}

/// First convergent with denominator `<= q_max` within `tol` of `x`.
pub fn detect_rational(x: f64, q_max: i64, tol: f64) -> Option<Fraction> {
    convergents(x, q_max)
        .into_iter()
        .find(|f| (x - f.num as f64 / f.den as f64).abs() <= tol)
}
