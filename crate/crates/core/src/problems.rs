//! Benchmark objectives: the LZG suite (Ellipsoid, Rosenbrock, Ackley,
//! Griewank), the YLL suite (F01–F09, F12, F13) and the 1-D case-study
//! function. All are minimized.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::types::Bounds;

/// Coordinate of the YLLF08 (Schwefel 2.26) minimizer.
const SCHWEFEL_OPT_X: f64 = 420.968_746_359_982_03;
/// Per-dimension value of YLLF08 at its minimizer.
const SCHWEFEL_OPT_F: f64 = -418.982_887_272_433_7;
/// Minimizer of `-x sin x` on `[0, 12]` (root of `tan x = -x` in (6, 10)).
const CASE_OPT_X: f64 = 7.978_665_712_413_241;
const CASE_OPT_F: f64 = -7.916_727_371_587_782;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Benchmark {
    Ellipsoid,
    Rosenbrock,
    Ackley,
    Griewank,
    Yll01,
    Yll02,
    Yll03,
    Yll04,
    Yll05,
    Yll06,
    Yll07,
    Yll08,
    Yll09,
    Yll12,
    Yll13,
    CaseStudy1D,
}

impl Benchmark {
    pub const LZG: [Benchmark; 4] = [
        Benchmark::Ellipsoid,
        Benchmark::Rosenbrock,
        Benchmark::Ackley,
        Benchmark::Griewank,
    ];

    pub const YLL: [Benchmark; 11] = [
        Benchmark::Yll01,
        Benchmark::Yll02,
        Benchmark::Yll03,
        Benchmark::Yll04,
        Benchmark::Yll05,
        Benchmark::Yll06,
        Benchmark::Yll07,
        Benchmark::Yll08,
        Benchmark::Yll09,
        Benchmark::Yll12,
        Benchmark::Yll13,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Benchmark::Ellipsoid => "Ellipsoid",
            Benchmark::Rosenbrock => "Rosenbrock",
            Benchmark::Ackley => "Ackley",
            Benchmark::Griewank => "Griewank",
            Benchmark::Yll01 => "YLLF01",
            Benchmark::Yll02 => "YLLF02",
            Benchmark::Yll03 => "YLLF03",
            Benchmark::Yll04 => "YLLF04",
            Benchmark::Yll05 => "YLLF05",
            Benchmark::Yll06 => "YLLF06",
            Benchmark::Yll07 => "YLLF07",
            Benchmark::Yll08 => "YLLF08",
            Benchmark::Yll09 => "YLLF09",
            Benchmark::Yll12 => "YLLF12",
            Benchmark::Yll13 => "YLLF13",
            Benchmark::CaseStudy1D => "CaseStudy1D",
        }
    }

    fn domain(&self) -> (f64, f64) {
        match self {
            Benchmark::Ellipsoid | Benchmark::Yll09 => (-5.12, 5.12),
            Benchmark::Rosenbrock => (-2.048, 2.048),
            Benchmark::Ackley => (-32.768, 32.768),
            Benchmark::Griewank => (-600.0, 600.0),
            Benchmark::Yll01 | Benchmark::Yll03 | Benchmark::Yll04 | Benchmark::Yll06 => {
                (-100.0, 100.0)
            }
            Benchmark::Yll02 => (-10.0, 10.0),
            Benchmark::Yll05 => (-30.0, 30.0),
            Benchmark::Yll07 => (-1.28, 1.28),
            Benchmark::Yll08 => (-500.0, 500.0),
            Benchmark::Yll12 | Benchmark::Yll13 => (-50.0, 50.0),
            Benchmark::CaseStudy1D => (0.0, 12.0),
        }
    }

    fn optimizer_coordinate(&self) -> f64 {
        match self {
            Benchmark::Rosenbrock | Benchmark::Yll05 | Benchmark::Yll13 => 1.0,
            Benchmark::Yll08 => SCHWEFEL_OPT_X,
            Benchmark::Yll12 => -1.0,
            Benchmark::CaseStudy1D => CASE_OPT_X,
            _ => 0.0,
        }
    }

    fn optimum_value(&self, n: usize) -> f64 {
        match self {
            Benchmark::Yll08 => SCHWEFEL_OPT_F * n as f64,
            Benchmark::CaseStudy1D => CASE_OPT_F,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Benchmark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = Benchmark::LZG
            .iter()
            .chain(Benchmark::YLL.iter())
            .chain(std::iter::once(&Benchmark::CaseStudy1D));
        for b in all {
            if b.name().eq_ignore_ascii_case(s) {
                return Ok(*b);
            }
        }
        if s.eq_ignore_ascii_case("YLLF10") || s.eq_ignore_ascii_case("YLLF11") {
            return Err(Error::ExcludedProblem(s.to_string()));
        }
        Err(Error::UnknownProblem(s.to_string()))
    }
}

/// A configured benchmark instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    benchmark: Benchmark,
    dim: usize,
    bounds: Bounds,
}

impl Problem {
    pub fn new(benchmark: Benchmark, dim: usize) -> Result<Self> {
        let dim = if benchmark == Benchmark::CaseStudy1D { 1 } else { dim };
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let (lo, hi) = benchmark.domain();
        Ok(Self {
            benchmark,
            dim,
            bounds: Bounds::uniform(dim, lo, hi)?,
        })
    }

    pub fn benchmark(&self) -> Benchmark {
        self.benchmark
    }

    pub fn name(&self) -> &'static str {
        self.benchmark.name()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// Only YLLF07 carries additive noise.
    pub fn is_stochastic(&self) -> bool {
        self.benchmark == Benchmark::Yll07
    }

    pub fn known_optimum_value(&self) -> Option<f64> {
        Some(self.benchmark.optimum_value(self.dim))
    }

    /// The documented global minimizer.
    pub fn optimizer(&self) -> Vec<f64> {
        vec![self.benchmark.optimizer_coordinate(); self.dim]
    }

    /// Evaluate at an in-bounds point. `rng` is consumed only by YLLF07.
    pub fn evaluate(&self, x: &[f64], rng: &mut RngStream) -> Result<f64> {
        self.bounds.check(x)?;
        Ok(self.eval_raw(x, rng))
    }

    /// Evaluate without the bounds check (dimension is still checked).
    pub fn evaluate_lenient(&self, x: &[f64], rng: &mut RngStream) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(self.eval_raw(x, rng))
    }

    fn eval_raw(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        let n = x.len() as f64;
        match self.benchmark {
            Benchmark::Ellipsoid => x
                .iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum(),
            Benchmark::Rosenbrock | Benchmark::Yll05 => rosenbrock(x),
            Benchmark::Ackley => {
                let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
                let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
                -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E
            }
            Benchmark::Griewank => {
                let s = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let p = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product::<f64>();
                s - p + 1.0
            }
            Benchmark::Yll01 => x.iter().map(|v| v * v).sum(),
            Benchmark::Yll02 => {
                x.iter().map(|v| v.abs()).sum::<f64>() + x.iter().map(|v| v.abs()).product::<f64>()
            }
            Benchmark::Yll03 => {
                let mut prefix = 0.0;
                let mut total = 0.0;
                for v in x {
                    prefix += v;
                    total += prefix * prefix;
                }
                total
            }
            Benchmark::Yll04 => x.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
            Benchmark::Yll06 => x
                .iter()
                .map(|v| {
                    let s = (v + 0.5).floor();
                    s * s
                })
                .sum(),
            Benchmark::Yll07 => {
                let quartic: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (i + 1) as f64 * v.powi(4))
                    .sum();
                quartic + rng.uniform()
            }
            Benchmark::Yll08 => x.iter().map(|v| -v * v.abs().sqrt().sin()).sum(),
            Benchmark::Yll09 => x
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0)
                .sum(),
            Benchmark::Yll12 => {
                let y: Vec<f64> = x.iter().map(|v| 1.0 + (v + 1.0) / 4.0).collect();
                let last = y[y.len() - 1];
                let mut core = 10.0 * (PI * y[0]).sin().powi(2);
                for w in y.windows(2) {
                    core += (w[0] - 1.0).powi(2) * (1.0 + 10.0 * (PI * w[1]).sin().powi(2));
                }
                core += (last - 1.0).powi(2);
                PI / n * core + x.iter().map(|&v| penalty(v, 10.0, 100.0, 4)).sum::<f64>()
            }
            Benchmark::Yll13 => {
                let last = x[x.len() - 1];
                let mut core = (3.0 * PI * x[0]).sin().powi(2);
                for w in x.windows(2) {
                    core += (w[0] - 1.0).powi(2) * (1.0 + (3.0 * PI * w[1]).sin().powi(2));
                }
                core += (last - 1.0).powi(2) * (1.0 + (2.0 * PI * last).sin().powi(2));
                0.1 * core + x.iter().map(|&v| penalty(v, 5.0, 100.0, 4)).sum::<f64>()
            }
            Benchmark::CaseStudy1D => -x[0] * x[0].sin(),
        }
    }
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

/// The `u(x, a, k, m)` penalty of the YLL penalized functions.
fn penalty(x: f64, a: f64, k: f64, m: i32) -> f64 {
    if x > a {
        k * (x - a).powi(m)
    } else if x < -a {
        k * (-x - a).powi(m)
    } else {
        0.0
    }
}

/// Look up a problem by its stable CLI name.
pub fn problem_registry(name: &str, dim: usize) -> Result<Problem> {
    Problem::new(name.parse()?, dim)
}
