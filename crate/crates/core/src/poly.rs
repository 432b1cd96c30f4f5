//! Exact piecewise polynomials with rational coefficients.

use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub const MAX_DEGREE: usize = 4;

fn q(n: i128) -> Rational {
    Rational::from_integer(n)
}

/// Polynomial in a local variable, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).copied().unwrap_or_else(Rational::zero)
    }

    pub fn eval_exact(&self, u: Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, &c| acc * u + c)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, c: Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * q(k as i128))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Rational::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / q(k as i128 + 1)),
        );
        Poly::new(out)
    }

    /// Returns `r` with `r(u) = self(u + a)`.
    pub fn taylor_shift(&self, a: Rational) -> Poly {
        let mut out = Poly::zero();
        let step = Poly::new(vec![a, Rational::one()]);
        for &c in self.coeffs.iter().rev() {
            out = out.mul(&step).add(&Poly::constant(c));
        }
        out
    }

    /// Returns `r` with `r(u) = self(-u)`.
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
                .collect(),
        )
    }
}

/// Piecewise polynomial on `[b_0, b_K]`, zero outside. Piece `k` covers
/// `[b_k, b_{k+1})` and is expressed in the local variable `u = t - b_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<Rational>,
    pieces: Vec<Poly>,
    knots_f64: Vec<f64>,
    coeffs_f64: Vec<[f64; MAX_DEGREE + 1]>,
}

impl PiecewisePolynomial {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Poly>) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 {
            return Err(Error::Input(format!(
                "{} breakpoints cannot bound {} pieces",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Input("breakpoints must be strictly increasing".into()));
        }
        if let Some(p) = pieces.iter().find(|p| p.degree() > MAX_DEGREE) {
            return Err(Error::Input(format!(
                "piece degree {} exceeds {MAX_DEGREE}",
                p.degree()
            )));
        }
        let knots_f64 = breakpoints.iter().map(to_f64).collect();
        let coeffs_f64 = pieces
            .iter()
            .map(|p| {
                let mut c = [0.0; MAX_DEGREE + 1];
                for (k, slot) in c.iter_mut().enumerate() {
                    *slot = to_f64(&p.coeff(k));
                }
                c
            })
            .collect();
        Ok(PiecewisePolynomial {
            breakpoints,
            pieces,
            knots_f64,
            coeffs_f64,
        })
    }

    pub fn zero() -> Self {
        PiecewisePolynomial::new(vec![Rational::zero()], Vec::new())
            .expect("single breakpoint is valid")
    }

    /// Indicator of `[lo, hi)`.
    pub fn indicator(lo: Rational, hi: Rational) -> Result<Self> {
        PiecewisePolynomial::new(vec![lo, hi], vec![Poly::constant(Rational::one())])
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn support(&self) -> Option<(Rational, Rational)> {
        let first = self.pieces.iter().position(|p| !p.is_zero())?;
        let last = self.pieces.iter().rposition(|p| !p.is_zero())?;
        Some((self.breakpoints[first], self.breakpoints[last + 1]))
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn shift(&self, s: Rational) -> Self {
        PiecewisePolynomial::new(
            self.breakpoints.iter().map(|&b| b + s).collect(),
            self.pieces.clone(),
        )
        .expect("shift preserves ordering")
    }

    pub fn scale(&self, c: Rational) -> Self {
        PiecewisePolynomial::new(
            self.breakpoints.clone(),
            self.pieces.iter().map(|p| p.scale(c)).collect(),
        )
        .expect("scaling preserves structure")
    }

    pub fn derivative(&self) -> Self {
        PiecewisePolynomial::new(
            self.breakpoints.clone(),
            self.pieces.iter().map(Poly::derivative).collect(),
        )
        .expect("differentiation preserves structure")
    }

    /// Piece re-expressed on `[lo, hi)`, which must lie inside one piece or
    /// outside the support.
    fn piece_on(&self, lo: Rational) -> Poly {
        match self.piece_index_exact(lo) {
            Some(k) => self.pieces[k].taylor_shift(lo - self.breakpoints[k]),
            None => Poly::zero(),
        }
    }

    fn piece_index_exact(&self, t: Rational) -> Option<usize> {
        let n = self.breakpoints.len();
        if n < 2 || t < self.breakpoints[0] || t >= self.breakpoints[n - 1] {
            return None;
        }
        Some(self.breakpoints.partition_point(|&b| b <= t) - 1)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut knots: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        knots.sort();
        knots.dedup();
        if knots.len() < 2 {
            return Ok(self.clone());
        }
        let pieces = knots
            .windows(2)
            .map(|w| self.piece_on(w[0]).add(&other.piece_on(w[0])))
            .collect();
        PiecewisePolynomial::new(knots, pieces)
    }

    /// Multiplies by the affine function `a0 + a1 * t` of the global variable.
    pub fn mul_affine(&self, a0: Rational, a1: Rational) -> Result<Self> {
        let pieces = self
            .pieces
            .iter()
            .zip(&self.breakpoints)
            .map(|(p, &b)| p.mul(&Poly::new(vec![a0 + a1 * b, a1])))
            .collect();
        PiecewisePolynomial::new(self.breakpoints.clone(), pieces)
    }

    /// Exact right-continuous value.
    pub fn eval_exact(&self, t: Rational) -> Rational {
        match self.piece_index_exact(t) {
            Some(k) => self.pieces[k].eval_exact(t - self.breakpoints[k]),
            None => Rational::zero(),
        }
    }

    /// Exact left limit at `t`.
    pub fn left_limit(&self, t: Rational) -> Rational {
        let n = self.breakpoints.len();
        if n < 2 || t <= self.breakpoints[0] || t > self.breakpoints[n - 1] {
            return Rational::zero();
        }
        let k = self.breakpoints.partition_point(|&b| b < t) - 1;
        self.pieces[k].eval_exact(t - self.breakpoints[k])
    }

    pub fn integral(&self) -> Rational {
        self.pieces
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(p, w)| p.antiderivative().eval_exact(w[1] - w[0]))
            .fold(Rational::zero(), |a, b| a + b)
    }

    #[inline]
    fn piece_index(&self, t: f64) -> Option<usize> {
        let n = self.knots_f64.len();
        if n < 2 || !(t >= self.knots_f64[0]) || t >= self.knots_f64[n - 1] {
            return None;
        }
        Some(self.knots_f64.partition_point(|&b| b <= t) - 1)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self.piece_index(t) {
            Some(k) => {
                let u = t - self.knots_f64[k];
                let c = &self.coeffs_f64[k];
                (((c[4] * u + c[3]) * u + c[2]) * u + c[1]) * u + c[0]
            }
            None => 0.0,
        }
    }

    /// `int_h^infinity` of the function. Whole pieces are summed exactly.
    pub fn integral_from(&self, h: f64) -> f64 {
        let n = self.knots_f64.len();
        if n < 2 || h >= self.knots_f64[n - 1] {
            return 0.0;
        }
        let whole = |k: usize| {
            self.pieces[k]
                .antiderivative()
                .eval_exact(self.breakpoints[k + 1] - self.breakpoints[k])
        };
        if !(h > self.knots_f64[0]) {
            return to_f64(&self.integral());
        }
        let k = self.knots_f64.partition_point(|&b| b <= h) - 1;
        let right = (k + 1..self.pieces.len())
            .map(whole)
            .fold(Rational::zero(), |a, b| a + b);
        let anti: Vec<f64> = self.pieces[k]
            .antiderivative()
            .coeffs()
            .iter()
            .map(to_f64)
            .collect();
        let u = h - self.knots_f64[k];
        let part = anti.iter().rev().fold(0.0, |acc, &a| acc * u + a);
        to_f64(&right) + (to_f64(&whole(k)) - part)
    }

    /// One CSV row per piece: left breakpoint followed by `c0..c4` as exact
    /// rationals in the local variable `t - breakpoint`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("breakpoint,c0,c1,c2,c3,c4\n");
        for (p, b) in self.pieces.iter().zip(&self.breakpoints) {
            write!(out, "{b}").unwrap();
            for k in 0..=MAX_DEGREE {
                write!(out, ",{}", p.coeff(k)).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> Rational {
        self.pieces
            .iter()
            .flat_map(|p| p.coeffs().iter().map(|c| c.abs()))
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

pub fn rational(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}

/// Cardinal B-spline of degree `n` on `[0, n + 1]`, built by the
/// degree-raising recursion `B_n(t) = t/n B_{n-1}(t) + (n+1-t)/n B_{n-1}(t-1)`.
pub fn bspline(n: usize) -> Result<PiecewisePolynomial> {
    if n > MAX_DEGREE {
        return Err(Error::Input(format!(
            "B-spline degree must be in 0..={MAX_DEGREE}, got {n}"
        )));
    }
    let mut b = PiecewisePolynomial::indicator(q(0), q(1))?;
    for k in 1..=n as i128 {
        let inv = rational(1, k);
        let left = b.mul_affine(q(0), inv)?;
        let right = b.shift(q(1)).mul_affine(q(k + 1) * inv, -inv)?;
        b = left.add(&right)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cox-de Boor evaluation of the cardinal B-spline, in floating point.
    fn cox_de_boor(n: usize, t: f64) -> f64 {
        if n == 0 {
            return if (0.0..1.0).contains(&t) { 1.0 } else { 0.0 };
        }
        let nf = n as f64;
        t / nf * cox_de_boor(n - 1, t) + (nf + 1.0 - t) / nf * cox_de_boor(n - 1, t - 1.0)
    }

    #[test]
    fn b0_is_unit_indicator() {
        let b0 = bspline(0).unwrap();
        assert_eq!(b0.eval(0.0), 1.0);
        assert_eq!(b0.eval(0.999), 1.0);
        assert_eq!(b0.eval(1.0), 0.0);
        assert_eq!(b0.eval(-0.01), 0.0);
    }

    #[test]
    fn bspline_knot_values() {
        let b3 = bspline(3).unwrap();
        let vals: Vec<Rational> = (1..=3).map(|k| b3.eval_exact(q(k))).collect();
        assert_eq!(vals, vec![rational(1, 6), rational(2, 3), rational(1, 6)]);
        let b4 = bspline(4).unwrap();
        let vals: Vec<Rational> = (1..=4).map(|k| b4.eval_exact(q(k))).collect();
        assert_eq!(
            vals,
            vec![rational(1, 24), rational(11, 24), rational(11, 24), rational(1, 24)]
        );
    }

    #[test]
    fn bsplines_match_recursion_and_integrate_to_one() {
        for n in 0..=4 {
            let b = bspline(n).unwrap();
            assert_eq!(b.integral(), q(1));
            assert_eq!(b.support(), Some((q(0), q(n as i128 + 1))));
            for i in 0..=200 {
                let t = -0.5 + i as f64 * (n as f64 + 2.0) / 200.0;
                let (a, o) = (b.eval(t), cox_de_boor(n, t));
                assert!((a - o).abs() < 1e-13, "n={n} t={t}: {a} vs {o}");
                assert!(a >= 0.0);
            }
        }
        assert!(bspline(5).is_err());
    }

    #[test]
    fn taylor_shift_and_reflect() {
        let p = Poly::new(vec![q(1), q(-2), q(3)]);
        let s = p.taylor_shift(rational(1, 2));
        for u in [-1, 0, 2, 5] {
            let u = q(u);
            assert_eq!(s.eval_exact(u), p.eval_exact(u + rational(1, 2)));
            assert_eq!(p.reflect().eval_exact(u), p.eval_exact(-u));
        }
    }

    #[test]
    fn construction_rejects_bad_layouts() {
        assert!(PiecewisePolynomial::new(vec![q(1), q(0)], vec![Poly::zero()]).is_err());
        assert!(PiecewisePolynomial::new(vec![q(0)], vec![Poly::zero()]).is_err());
        let deg5 = Poly::new(vec![q(0), q(0), q(0), q(0), q(0), q(1)]);
        assert!(PiecewisePolynomial::new(vec![q(0), q(1)], vec![deg5]).is_err());
    }

    #[test]
    fn integral_from_matches_exact_sums() {
        let b3 = bspline(3).unwrap();
        assert_eq!(b3.integral_from(-1.0), 1.0);
        assert!((b3.integral_from(2.0) - 0.5).abs() < 1e-15);
        assert_eq!(b3.integral_from(4.0), 0.0);
    }

    #[test]
    fn csv_has_one_row_per_piece() {
        let csv = bspline(2).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "breakpoint,c0,c1,c2,c3,c4");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0,0,0,1/2,0,0");
    }
}
