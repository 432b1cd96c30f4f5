//! Experiment configuration: `key = value` lines, `#` comments, one
//! `ball = cx cy cz radius density` line per ball. Numbers may be constant
//! expressions such as `0.7*pi`; vector entries are separated by spaces.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::phantom::{Ball, Phantom};
use crate::sphere_grid::{direction, SphereGrid};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub n_theta: usize,
    pub n_gamma: usize,
    pub eps: f64,
    pub rho: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl GridParams {
    pub fn build(&self) -> Result<SphereGrid> {
        SphereGrid::new(self.n_theta, self.n_gamma, self.eps, self.rho, self.p_min, self.p_max)
    }

    /// Same angular resolution per unit of `eps`: counts scale by `eps / new_eps`.
    pub fn rescaled(&self, eps: f64) -> GridParams {
        let k = self.eps / eps;
        GridParams {
            n_theta: (self.n_theta as f64 * k).round() as usize,
            n_gamma: (self.n_gamma as f64 * k).round() as usize,
            eps,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub x0: Vec3,
    /// Unit direction of the profile line; inward normal for boundary probes.
    pub theta0: Vec3,
    /// Ball whose boundary carries `x0`, for `probe = ball-normal`.
    pub ball: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub phantom: Phantom,
    pub grid: GridParams,
    pub probe: Probe,
    pub h_values: Vec<f64>,
    pub remote_eps: Vec<f64>,
}

struct Entry {
    line: usize,
    value: String,
}

const KEYS: &[&str] = &[
    "name",
    "n_theta",
    "n_gamma",
    "eps",
    "rho",
    "p_min",
    "p_max",
    "probe",
    "probe_ball",
    "normal_angles",
    "x0",
    "theta0",
    "h_min",
    "h_max",
    "h_step",
    "remote_eps",
];

fn number(line: usize, key: &str, src: &str) -> Result<f64> {
    let v = Expr::parse(src)
        .and_then(|e| e.eval(0.0))
        .map_err(|e| Error::config(line, format!("{key}: {e}")))?;
    if !v.is_finite() {
        return Err(Error::config(line, format!("{key}: '{src}' is not finite")));
    }
    Ok(v)
}

fn numbers(line: usize, key: &str, src: &str) -> Result<Vec<f64>> {
    src.split_whitespace().map(|s| number(line, key, s)).collect()
}

fn count(line: usize, key: &str, src: &str) -> Result<usize> {
    src.trim()
        .parse::<usize>()
        .map_err(|_| Error::config(line, format!("{key}: expected a non-negative integer, got '{src}'")))
}

struct Fields {
    map: HashMap<String, Entry>,
}

impl Fields {
    fn get(&self, key: &str) -> Result<&Entry> {
        self.map
            .get(key)
            .ok_or_else(|| Error::config(None, format!("missing key '{key}'")))
    }

    fn number(&self, key: &str) -> Result<f64> {
        let e = self.get(key)?;
        number(e.line, key, &e.value)
    }

    fn count(&self, key: &str) -> Result<usize> {
        let e = self.get(key)?;
        count(e.line, key, &e.value)
    }

    fn vector(&self, key: &str, len: usize) -> Result<(usize, Vec<f64>)> {
        let e = self.get(key)?;
        let v = numbers(e.line, key, &e.value)?;
        if v.len() != len {
            return Err(Error::config(e.line, format!("{key}: expected {len} numbers, got {}", v.len())));
        }
        Ok((e.line, v))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut balls = Vec::new();
        let mut map: HashMap<String, Entry> = HashMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::config(line, format!("expected 'key = value', got '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "ball" {
                let v = numbers(line, key, value)?;
                if v.len() != 5 {
                    return Err(Error::config(line, "ball: expected 'cx cy cz radius density'"));
                }
                let ball = Ball::new(Vec3::new(v[0], v[1], v[2]), v[3], v[4])
                    .map_err(|e| Error::config(line, format!("ball: {e}")))?;
                balls.push(ball);
                continue;
            }
            if !KEYS.contains(&key) {
                return Err(Error::config(line, format!("unknown key '{key}'")));
            }
            let entry = Entry {
                line,
                value: value.to_string(),
            };
            if let Some(prev) = map.insert(key.to_string(), entry) {
                return Err(Error::config(line, format!("key '{key}' already set at line {}", prev.line)));
            }
        }
        let f = Fields { map };
        if balls.is_empty() {
            return Err(Error::config(None, "missing key 'ball'"));
        }
        let phantom = Phantom::new(balls).map_err(|e| Error::config(None, e.to_string()))?;

        let grid = GridParams {
            n_theta: f.count("n_theta")?,
            n_gamma: f.count("n_gamma")?,
            eps: f.number("eps")?,
            rho: f.number("rho")?,
            p_min: f.number("p_min")?,
            p_max: f.number("p_max")?,
        };
        grid.build().map_err(|e| Error::config(None, format!("grid: {e}")))?;

        let probe_kind = f.get("probe")?;
        let probe = match probe_kind.value.as_str() {
            "ball-normal" => {
                let b = f.count("probe_ball")?;
                let line = f.get("probe_ball")?.line;
                let ball = phantom
                    .ball(b)
                    .map_err(|_| Error::config(line, format!("probe_ball {b} does not exist")))?;
                let (_, a) = f.vector("normal_angles", 2)?;
                let normal = direction(a[0], a[1]);
                Probe {
                    x0: ball.center + ball.radius * normal,
                    theta0: -normal,
                    ball: Some(b),
                }
            }
            "explicit" => {
                let (_, x) = f.vector("x0", 3)?;
                let (line, t) = f.vector("theta0", 3)?;
                let theta0 = Vec3::new(t[0], t[1], t[2]);
                if (theta0.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::config(line, "theta0: must be a unit vector"));
                }
                Probe {
                    x0: Vec3::new(x[0], x[1], x[2]),
                    theta0,
                    ball: None,
                }
            }
            other => {
                return Err(Error::config(
                    probe_kind.line,
                    format!("probe: expected 'ball-normal' or 'explicit', got '{other}'"),
                ))
            }
        };

        let (h_min, h_max, h_step) = (f.number("h_min")?, f.number("h_max")?, f.number("h_step")?);
        if !(h_step > 0.0) || h_max < h_min {
            return Err(Error::config(
                f.get("h_step")?.line,
                "need h_step > 0 and h_max >= h_min",
            ));
        }
        let n_h = ((h_max - h_min) / h_step + 1e-9).floor() as usize;
        let h_values = (0..=n_h).map(|k| h_min + h_step * k as f64).collect();

        let remote_eps = match f.map.get("remote_eps") {
            Some(e) => {
                let v = numbers(e.line, "remote_eps", &e.value)?;
                if v.is_empty() || v.iter().any(|&x| !(x > 0.0)) {
                    return Err(Error::config(e.line, "remote_eps: expected positive values"));
                }
                v
            }
            None => vec![2.0 * grid.eps, grid.eps, 0.5 * grid.eps],
        };

        Ok(ExperimentConfig {
            name: f.map.get("name").map(|e| e.value.clone()).unwrap_or_else(|| "experiment".into()),
            phantom,
            grid,
            probe,
            h_values,
            remote_eps,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{fig1_phantom, fig1_theta0, fig1_x0};

    const FIG1: &str = "\
# two balls
name = fig1
ball = 0 0 -5 4 1
ball = -5.52 0 -7.36 4 1
n_theta = 500
n_gamma = 500
eps = 0.04
rho = 0
p_min = -10
p_max = 10
probe = ball-normal
probe_ball = 0
normal_angles = 0.7*pi 0.2*pi
h_min = -5
h_max = 5
h_step = 0.25
";

    #[test]
    fn parses_two_ball_setup() {
        let c = ExperimentConfig::parse(FIG1).unwrap();
        assert_eq!(c.name, "fig1");
        assert_eq!(c.phantom, fig1_phantom());
        assert!((c.probe.x0 - fig1_x0()).norm() < 1e-12);
        assert!((c.probe.theta0 - fig1_theta0()).norm() < 1e-12);
        assert_eq!(c.h_values.len(), 41);
        assert_eq!(c.h_values[40], 5.0);
        assert_eq!(c.remote_eps, vec![0.08, 0.04, 0.02]);
        assert_eq!(c.grid.rescaled(0.02).n_theta, 1000);
    }

    #[test]
    fn missing_key_is_named() {
        let text = FIG1.replace("eps = 0.04\n", "");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        assert!(err.to_string().contains("'eps'"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = FIG1.replace("rho = 0", "rho = zero");
        match ExperimentConfig::parse(&text).unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, Some(8)),
            e => panic!("{e}"),
        }
        let text = format!("{FIG1}colour = red\n");
        assert!(ExperimentConfig::parse(&text).unwrap_err().to_string().contains("line 17"));
        let text = FIG1.replace("ball = 0 0 -5 4 1", "ball = 0 0 -5 -4 1");
        assert!(ExperimentConfig::parse(&text).unwrap_err().to_string().contains("line 3"));
        let text = FIG1.replace("n_gamma = 500", "n_gamma = 1");
        assert!(matches!(ExperimentConfig::parse(&text), Err(Error::Config { .. })));
    }

    #[test]
    fn explicit_probe() {
        let text = FIG1
            .replace("probe = ball-normal", "probe = explicit")
            .replace("probe_ball = 0\n", "x0 = 1 0 0\n")
            .replace("normal_angles = 0.7*pi 0.2*pi", "theta0 = -1 0 0");
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(c.probe.x0, Vec3::x());
        assert_eq!(c.probe.theta0, -Vec3::x());
        assert_eq!(c.probe.ball, None);
    }
}
