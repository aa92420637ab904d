//! Gaussian-process regression with an isotropic squared-exponential kernel.
//!
//! Inputs are min-max scaled to the unit cube and targets standardized. The
//! lengthscale is picked from a fixed log-grid by log marginal likelihood;
//! the signal variance is the (unit) standardized target variance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::TrainingSet;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    /// Observation noise variance, relative to the standardized targets.
    pub noise: f64,
    /// Upper limit of the jitter escalation (×10 per retry).
    pub max_jitter: f64,
    pub lengthscale_min: f64,
    pub lengthscale_max: f64,
    pub lengthscale_steps: usize,
}

impl Default for GpParams {
    fn default() -> Self {
        Self {
            noise: 1e-6,
            max_jitter: 1e-2,
            lengthscale_min: 0.05,
            lengthscale_max: 2.0,
            lengthscale_steps: 16,
        }
    }
}

impl GpParams {
    pub fn lengthscale_grid(&self) -> Vec<f64> {
        let steps = self.lengthscale_steps.max(1);
        if steps == 1 {
            return vec![self.lengthscale_min];
        }
        let (a, b) = (self.lengthscale_min.ln(), self.lengthscale_max.ln());
        (0..steps)
            .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
            .collect()
    }
}

struct Fitted {
    inputs: Vec<Vec<f64>>,
    offset: Vec<f64>,
    scale: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    lengthscale: f64,
    jitter: f64,
    alpha: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl std::fmt::Debug for Fitted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fitted")
            .field("n", &self.inputs.len())
            .field("lengthscale", &self.lengthscale)
            .field("jitter", &self.jitter)
            .finish()
    }
}

type Candidate = (f64, f64, f64, Cholesky<f64, Dyn>, DVector<f64>);

#[derive(Debug)]
pub struct GaussianProcess {
    params: GpParams,
    fitted: Option<Fitted>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl GaussianProcess {
    pub fn new(params: GpParams) -> Self {
        Self {
            params,
            fitted: None,
        }
    }

    pub fn is_trained(&self) -> bool {
        self.fitted.is_some()
    }

    pub fn lengthscale(&self) -> Option<f64> {
        self.fitted.as_ref().map(|f| f.lengthscale)
    }

    /// Noise plus whatever jitter the factorization needed.
    pub fn effective_noise(&self) -> Option<f64> {
        self.fitted.as_ref().map(|f| f.jitter)
    }

    pub fn fit(&mut self, data: &TrainingSet) -> Result<()> {
        let n = data.len();
        if n < 2 {
            return Err(Error::NotEnoughIndividuals {
                needed: 2,
                available: n,
            });
        }
        let dim = data.dim();
        let mut offset = vec![f64::INFINITY; dim];
        let mut top = vec![f64::NEG_INFINITY; dim];
        for x in &data.inputs {
            for d in 0..dim {
                offset[d] = offset[d].min(x[d]);
                top[d] = top[d].max(x[d]);
            }
        }
        let scale: Vec<f64> = offset
            .iter()
            .zip(&top)
            .map(|(lo, hi)| if hi > lo { hi - lo } else { 1.0 })
            .collect();
        let inputs: Vec<Vec<f64>> = data
            .inputs
            .iter()
            .map(|x| (0..dim).map(|d| (x[d] - offset[d]) / scale[d]).collect())
            .collect();

        let y_mean = data.targets.iter().sum::<f64>() / n as f64;
        let var = data.targets.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64;
        let y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let y = DVector::from_iterator(n, data.targets.iter().map(|t| (t - y_mean) / y_std));

        let mut d2 = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let v = sq_dist(&inputs[i], &inputs[j]);
                d2[(i, j)] = v;
                d2[(j, i)] = v;
            }
        }

        // (log marginal likelihood, lengthscale, jitter, factor, alpha)
        let mut best: Option<Candidate> = None;
        let mut last_jitter = self.params.noise;
        for ell in self.params.lengthscale_grid() {
            let kernel = d2.map(|v| (-0.5 * v / (ell * ell)).exp());
            let Some((chol, jitter)) = self.factorize(&kernel) else {
                last_jitter = self.params.max_jitter;
                continue;
            };
            let alpha = chol.solve(&y);
            let log_det: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum();
            let lml = -0.5 * y.dot(&alpha)
                - log_det
                - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
            if best.as_ref().is_none_or(|b| lml > b.0) {
                best = Some((lml, ell, jitter, chol, alpha));
            }
        }
        let (_, lengthscale, jitter, chol, alpha) =
            best.ok_or(Error::Factorization { jitter: last_jitter })?;
        self.fitted = Some(Fitted {
            inputs,
            offset,
            scale,
            y_mean,
            y_std,
            lengthscale,
            jitter,
            alpha,
            chol,
        });
        Ok(())
    }

    fn factorize(&self, kernel: &DMatrix<f64>) -> Option<(Cholesky<f64, Dyn>, f64)> {
        let mut jitter = self.params.noise.max(0.0);
        loop {
            let mut k = kernel.clone();
            for i in 0..k.nrows() {
                k[(i, i)] = 1.0 + jitter;
            }
            if let Some(ch) = Cholesky::new(k) {
                return Some((ch, jitter));
            }
            jitter = if jitter == 0.0 { 1e-12 } else { jitter * 10.0 };
            if jitter > self.params.max_jitter * (1.0 + 1e-9) {
                return None;
            }
        }
    }

    fn fitted(&self, x: &[f64]) -> Result<&Fitted> {
        let f = self.fitted.as_ref().ok_or(Error::Untrained)?;
        if x.len() != f.offset.len() {
            return Err(Error::DimensionMismatch {
                expected: f.offset.len(),
                actual: x.len(),
            });
        }
        Ok(f)
    }

    fn cross_kernel(f: &Fitted, x: &[f64]) -> DVector<f64> {
        let z: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(d, v)| (v - f.offset[d]) / f.scale[d])
            .collect();
        let l2 = f.lengthscale * f.lengthscale;
        DVector::from_iterator(
            f.inputs.len(),
            f.inputs.iter().map(|xi| (-0.5 * sq_dist(xi, &z) / l2).exp()),
        )
    }

    /// Posterior mean.
    pub fn predict_one(&self, x: &[f64]) -> Result<f64> {
        let f = self.fitted(x)?;
        let k = Self::cross_kernel(f, x);
        Ok(f.y_mean + f.y_std * k.dot(&f.alpha))
    }

    /// Posterior mean and standard deviation of the latent function.
    pub fn predict_one_with_std(&self, x: &[f64]) -> Result<(f64, f64)> {
        let f = self.fitted(x)?;
        let k = Self::cross_kernel(f, x);
        let mean = f.y_mean + f.y_std * k.dot(&f.alpha);
        let v = f
            .chol
            .l_dirty()
            .lower_triangle()
            .solve_lower_triangular(&k)
            .unwrap_or_else(|| DVector::zeros(k.len()));
        let var = (1.0 - v.dot(&v)).max(0.0);
        Ok((mean, f.y_std * var.sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DecisionVector;

    fn data(xs: &[f64], ys: &[f64]) -> TrainingSet {
        TrainingSet::new(
            xs.iter().map(|&x| DecisionVector::new(vec![x]).unwrap()).collect(),
            ys.to_vec(),
        )
        .unwrap()
    }

    fn noiseless() -> GpParams {
        GpParams {
            noise: 0.0,
            ..GpParams::default()
        }
    }

    #[test]
    fn interpolates_without_noise() {
        let xs = [0.0, 1.0, 2.5, 4.0, 7.0];
        let ys = [1.0, -0.5, 2.0, 0.3, -1.2];
        let mut gp = GaussianProcess::new(noiseless());
        gp.fit(&data(&xs, &ys)).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            let (m, s) = gp.predict_one_with_std(&[*x]).unwrap();
            assert!((m - y).abs() < 1e-6, "{m} vs {y}");
            assert!(s < 1e-6 + 1e-5, "std {s}");
        }
    }

    #[test]
    fn constant_targets() {
        let mut gp = GaussianProcess::new(GpParams::default());
        gp.fit(&data(&[0.0, 1.0, 2.0], &[3.0, 3.0, 3.0])).unwrap();
        assert!((gp.predict_one(&[10.0]).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn untrained_rejected() {
        let gp = GaussianProcess::new(GpParams::default());
        assert!(matches!(gp.predict_one(&[0.0]), Err(Error::Untrained)));
    }

    #[test]
    fn duplicate_inputs_need_jitter_or_fail() {
        // identical inputs with different targets make the kernel singular
        let ts = data(&[1.0, 1.0, 2.0], &[0.0, 1.0, 2.0]);
        let mut strict = GaussianProcess::new(GpParams {
            noise: 0.0,
            max_jitter: 0.0,
            ..GpParams::default()
        });
        assert!(matches!(strict.fit(&ts), Err(Error::Factorization { .. })));
        let mut gp = GaussianProcess::new(GpParams::default());
        gp.fit(&ts).unwrap();
        assert!(gp.effective_noise().unwrap() >= 1e-6);
    }

    #[test]
    fn grid_spans_requested_range() {
        let g = GpParams::default().lengthscale_grid();
        assert_eq!(g.len(), 16);
        assert!((g[0] - 0.05).abs() < 1e-12);
        assert!((g[15] - 2.0).abs() < 1e-12);
    }
}
