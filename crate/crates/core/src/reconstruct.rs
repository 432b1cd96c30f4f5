//! Interpolated-data filtering and the discrete inversion sum.
//!
//! `f_eps(x) = -1/(4 pi^2) * sum_i (c_i / 2) * d^2/dp^2 g_eps(alpha_i, alpha_i . x)`
//! over every grid direction; the half weight accounts for evenness of the
//! data, `g(alpha, p) = g(-alpha, -p)`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::phantom::Phantom;
use crate::sphere_grid::SphereGrid;
use crate::sum::compensated_sum;
use crate::Vec3;

pub const SINOGRAM_MAGIC: &str = "RSG1";

/// Sampled data `g(alpha_i, p_j)`; stored direction-major in the grid's
/// reduction order, samples contiguous per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    grid: SphereGrid,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i1: usize, i2: usize, j: i64) -> Result<f64> {
        let flat = self.grid.flat_index(i1, i2)?;
        let (j_min, j_max) = self.grid.sample_range();
        if j < j_min || j > j_max {
            return Err(Error::Input(format!("sample index {j} outside {j_min}..={j_max}")));
        }
        Ok(self.sample(flat, j))
    }

    #[inline]
    fn sample(&self, flat: usize, j: i64) -> f64 {
        let (j_min, _) = self.grid.sample_range();
        self.values[flat * self.grid.n_p() + (j - j_min) as usize]
    }

    /// Writes the `RSG1` format: a two-line text header followed by
    /// little-endian `f64` values in `(i1, i2, j)` row-major order.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let g = &self.grid;
        let (p_min, _) = g.p_range();
        writeln!(w, "{SINOGRAM_MAGIC}")?;
        writeln!(
            w,
            "{} {} {} {} {} {}",
            g.n_theta(),
            g.n_gamma(),
            g.n_p(),
            g.eps(),
            g.rho(),
            p_min
        )?;
        let n_p = g.n_p();
        let mut buf = Vec::with_capacity(n_p * 8);
        for i1 in 0..g.n_theta() {
            for i2 in 1..g.n_gamma() {
                let flat = g.flat_index(i1, i2)?;
                buf.clear();
                for v in &self.values[flat * n_p..(flat + 1) * n_p] {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
                w.write_all(&buf)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self> {
        let mut line = String::new();
        r.read_line(&mut line)?;
        if line.trim_end() != SINOGRAM_MAGIC {
            return Err(Error::Format(format!("bad magic {:?}", line.trim_end())));
        }
        line.clear();
        r.read_line(&mut line)?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Format(format!(
                "header needs 6 fields (n_theta n_gamma n_p eps rho p_min), got {}",
                fields.len()
            )));
        }
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Format(format!("bad integer {s:?}: {e}")))
        };
        let real = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number {s:?}: {e}")))
        };
        let (n_theta, n_gamma, n_p) = (int(fields[0])?, int(fields[1])?, int(fields[2])?);
        let (eps, rho, p_min) = (real(fields[3])?, real(fields[4])?, real(fields[5])?);
        if n_p < 2 {
            return Err(Error::Format(format!("n_p = {n_p} is too small")));
        }
        let probe = SphereGrid::new(n_theta, n_gamma, eps, rho, p_min, p_min + eps * n_p as f64)?;
        let j_min = probe.sample_range().0;
        let p_max = probe.sample_p(j_min + n_p as i64 - 1);
        let grid = SphereGrid::new(n_theta, n_gamma, eps, rho, p_min, p_max)?;
        if grid.n_p() != n_p {
            return Err(Error::Format(format!(
                "header p range yields {} samples, expected {n_p}",
                grid.n_p()
            )));
        }
        let mut values = vec![0.0; grid.n_directions() * n_p];
        let mut buf = vec![0u8; n_p * 8];
        for i1 in 0..n_theta {
            for i2 in 1..n_gamma {
                r.read_exact(&mut buf).map_err(|e| {
                    Error::Format(format!("truncated sample data at node ({i1}, {i2}): {e}"))
                })?;
                let flat = grid.flat_index(i1, i2)?;
                for (k, chunk) in buf.chunks_exact(8).enumerate() {
                    let v = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
                    if !v.is_finite() {
                        return Err(Error::Format(format!("non-finite sample at node ({i1}, {i2})")));
                    }
                    values[flat * n_p + k] = v;
                }
            }
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Format("trailing bytes after sample data".into()));
        }
        Ok(Sinogram { grid, values })
    }
}

/// Samples `phantom_radon(alpha_i, p_j)` on every grid node.
pub fn build_sinogram(phantom: &Phantom, grid: &SphereGrid) -> Sinogram {
    let n_p = grid.n_p();
    let (j_min, _) = grid.sample_range();
    let mut values = vec![0.0; grid.n_directions() * n_p];
    values
        .par_chunks_mut(n_p)
        .zip(grid.directions().par_iter())
        .for_each(|(row, alpha)| {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = phantom.radon_unchecked(alpha, grid.sample_p(j_min + k as i64));
            }
        });
    Sinogram {
        grid: grid.clone(),
        values,
    }
}

/// Where the samples `g(alpha_i, p_j)` come from.
#[derive(Debug, Clone, Copy)]
pub enum DataProvider<'a> {
    Analytic(&'a Phantom),
    Table(&'a Sinogram),
}

impl DataProvider<'_> {
    fn check_grid(&self, grid: &SphereGrid) -> Result<()> {
        if let DataProvider::Table(s) = self {
            let g = s.grid();
            let same = g.n_theta() == grid.n_theta()
                && g.n_gamma() == grid.n_gamma()
                && g.eps() == grid.eps()
                && g.rho() == grid.rho()
                && g.sample_range() == grid.sample_range();
            if !same {
                return Err(Error::Input("sinogram was sampled on a different grid".into()));
            }
        }
        Ok(())
    }

    #[inline]
    fn sample(&self, grid: &SphereGrid, flat: usize, j: i64) -> f64 {
        match self {
            DataProvider::Analytic(ph) => {
                ph.radon_unchecked(&grid.directions()[flat], grid.sample_p(j))
            }
            DataProvider::Table(s) => s.sample(flat, j),
        }
    }
}

/// `d^2/dp^2 g_eps(alpha_i, p)` for the direction with flat index `flat`.
pub fn filtered_value(
    provider: &DataProvider<'_>,
    kernel: &Kernel,
    grid: &SphereGrid,
    flat: usize,
    p: f64,
) -> Result<f64> {
    provider.check_grid(grid)?;
    if flat >= grid.n_directions() {
        return Err(Error::Input(format!("direction index {flat} out of range")));
    }
    filtered_unchecked(provider, kernel, grid, flat, p)
}

#[inline]
fn filtered_unchecked(
    provider: &DataProvider<'_>,
    kernel: &Kernel,
    grid: &SphereGrid,
    flat: usize,
    p: f64,
) -> Result<f64> {
    let eps = grid.eps();
    let w = kernel.half_width() as f64;
    let s = p / eps - grid.rho();
    let (lo, hi) = ((s - w).ceil() as i64, (s + w).floor() as i64);
    let (j_min, j_max) = grid.sample_range();
    if !p.is_finite() || lo < j_min || hi > j_max {
        let (a, b) = (grid.sample_p(j_min), grid.sample_p(j_max));
        return Err(Error::Range {
            p,
            lo: a,
            hi: b,
            direction: None,
        });
    }
    let mut acc = 0.0;
    for j in lo..=hi {
        acc += provider.sample(grid, flat, j) * kernel.phi2((p - grid.sample_p(j)) / eps);
    }
    Ok(acc / (eps * eps))
}

/// Discrete inversion at `x`. Direction terms are evaluated in parallel and
/// reduced in the fixed grid order with compensated summation.
pub fn reconstruct_point(
    provider: &DataProvider<'_>,
    kernel: &Kernel,
    grid: &SphereGrid,
    x: &Vec3,
) -> Result<f64> {
    provider.check_grid(grid)?;
    let terms: Vec<Result<f64>> = grid
        .directions()
        .par_iter()
        .enumerate()
        .map(|(flat, alpha)| {
            filtered_unchecked(provider, kernel, grid, flat, alpha.dot(x))
                .map(|v| 0.5 * grid.weight_flat(flat) * v)
                .map_err(|e| e.with_direction(flat))
        })
        .collect();
    let mut values = Vec::with_capacity(terms.len());
    for t in terms {
        values.push(t?);
    }
    Ok(-compensated_sum(values) / (4.0 * PI * PI))
}

/// Reconstructions at `x0 + eps h theta0` for each `h`, in input order.
pub fn reconstruct_profile(
    provider: &DataProvider<'_>,
    kernel: &Kernel,
    grid: &SphereGrid,
    x0: &Vec3,
    theta0: &Vec3,
    h_values: &[f64],
) -> Result<Vec<(f64, f64)>> {
    h_values
        .iter()
        .map(|&h| {
            let x = x0 + grid.eps() * h * theta0;
            reconstruct_point(provider, kernel, grid, &x).map(|f| (h, f))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::build_kernel;
    use crate::phantom::Ball;

    /// Single-direction grid stand-in: checks filtering of synthetic data
    /// through a table built by hand.
    fn synthetic_table(grid: &SphereGrid, g: impl Fn(f64) -> f64) -> Sinogram {
        let (j_min, _) = grid.sample_range();
        let n_p = grid.n_p();
        let mut values = Vec::with_capacity(grid.n_directions() * n_p);
        for _ in 0..grid.n_directions() {
            values.extend((0..n_p).map(|k| g(grid.sample_p(j_min + k as i64))));
        }
        Sinogram {
            grid: grid.clone(),
            values,
        }
    }

    fn small_grid(eps: f64) -> SphereGrid {
        SphereGrid::new(4, 2, eps, 0.0, -2.0, 2.0).unwrap()
    }

    #[test]
    fn affine_data_filters_to_zero() {
        let grid = small_grid(0.04);
        let table = synthetic_table(&grid, |p| 3.0 - 2.5 * p);
        let k = build_kernel();
        let v = filtered_value(&DataProvider::Table(&table), &k, &grid, 0, 0.3137).unwrap();
        assert!(v.abs() < 1e-9, "{v}");
    }

    #[test]
    fn quadratic_data_filters_to_two() {
        let grid = small_grid(0.04);
        let table = synthetic_table(&grid, |p| p * p);
        let k = build_kernel();
        for p in [-1.0, 0.0, 0.123, 0.5] {
            let v = filtered_value(&DataProvider::Table(&table), &k, &grid, 1, p).unwrap();
            assert!((v - 2.0).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn gaussian_data_filters_to_second_derivative() {
        let grid = small_grid(0.04);
        let table = synthetic_table(&grid, |p| (-p * p).exp());
        let k = build_kernel();
        let p = 0.3;
        let v = filtered_value(&DataProvider::Table(&table), &k, &grid, 2, p).unwrap();
        let exact = (4.0 * p * p - 2.0) * (-p * p).exp();
        assert!((v - exact).abs() < 0.01, "{v} vs {exact}");
    }

    #[test]
    fn filtering_outside_usable_range_is_an_error() {
        let grid = small_grid(0.04);
        let table = synthetic_table(&grid, |p| p);
        let k = build_kernel();
        let provider = DataProvider::Table(&table);
        assert!(filtered_value(&provider, &k, &grid, 0, 2.0 - 3.0 * 0.04).is_ok());
        assert!(matches!(
            filtered_value(&provider, &k, &grid, 0, 1.95),
            Err(Error::Range { .. })
        ));
        assert!(filtered_value(&provider, &k, &grid, 99, 0.0).is_err());
    }

    #[test]
    fn zero_phantom_reconstructs_to_zero() {
        let ph = Phantom::new(vec![Ball::new(Vec3::zeros(), 1.0, 0.0).unwrap()]).unwrap();
        let grid = SphereGrid::new(40, 20, 0.05, 0.0, -3.0, 3.0).unwrap();
        let v = reconstruct_point(&DataProvider::Analytic(&ph), &build_kernel(), &grid, &Vec3::zeros())
            .unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn range_error_names_direction() {
        let ph = Phantom::new(vec![Ball::new(Vec3::zeros(), 1.0, 1.0).unwrap()]).unwrap();
        let grid = SphereGrid::new(40, 20, 0.05, 0.0, -3.0, 3.0).unwrap();
        let err = reconstruct_point(
            &DataProvider::Analytic(&ph),
            &build_kernel(),
            &grid,
            &Vec3::new(3.0, 0.0, 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Range { direction: Some(_), .. }), "{err}");
    }

    #[test]
    fn sinogram_file_round_trip_and_provider_equivalence() {
        let ph = Phantom::new(vec![
            Ball::new(Vec3::new(0.2, 0.0, -0.3), 1.0, 1.0).unwrap(),
            Ball::new(Vec3::new(-0.5, 0.4, 0.1), 0.5, 0.7).unwrap(),
        ])
        .unwrap();
        let grid = SphereGrid::new(24, 12, 0.1, 0.25, -2.5, 2.5).unwrap();
        let sino = build_sinogram(&ph, &grid);
        assert_eq!(sino.values().len(), 24 * 11 * grid.n_p());
        let alpha = grid.alpha(5, 3).unwrap();
        let (j_min, _) = grid.sample_range();
        assert_eq!(
            sino.get(5, 3, j_min + 7).unwrap(),
            ph.radon(&alpha, grid.sample_p(j_min + 7)).unwrap()
        );

        let mut bytes = Vec::new();
        sino.write_to(&mut bytes).unwrap();
        let back = Sinogram::read_from(&bytes[..]).unwrap();
        assert_eq!(back.values(), sino.values());

        let k = build_kernel();
        let x = Vec3::new(0.3, -0.1, 0.2);
        let a = reconstruct_point(&DataProvider::Analytic(&ph), &k, &grid, &x).unwrap();
        let b = reconstruct_point(&DataProvider::Table(&back), &k, &back.grid().clone(), &x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn sinogram_reader_rejects_damage() {
        let ph = Phantom::new(vec![Ball::new(Vec3::zeros(), 1.0, 1.0).unwrap()]).unwrap();
        let grid = SphereGrid::new(8, 4, 0.25, 0.0, -2.0, 2.0).unwrap();
        let mut bytes = Vec::new();
        build_sinogram(&ph, &grid).write_to(&mut bytes).unwrap();
        assert!(Sinogram::read_from(&bytes[..bytes.len() - 3]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(Sinogram::read_from(&extra[..]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Sinogram::read_from(&bad[..]), Err(Error::Format(_))));
    }

    #[test]
    fn table_on_other_grid_is_rejected() {
        let ph = Phantom::new(vec![Ball::new(Vec3::zeros(), 1.0, 1.0).unwrap()]).unwrap();
        let grid = SphereGrid::new(8, 4, 0.25, 0.0, -2.0, 2.0).unwrap();
        let other = SphereGrid::new(8, 6, 0.25, 0.0, -2.0, 2.0).unwrap();
        let sino = build_sinogram(&ph, &grid);
        let r = reconstruct_point(&DataProvider::Table(&sino), &build_kernel(), &other, &Vec3::zeros());
        assert!(r.is_err());
    }
}
