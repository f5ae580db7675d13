//! Ornstein–Uhlenbeck simulation `dX = (μ - X) dt + σ dW` and Monte Carlo
//! checks of the hitting-time Laplace identity
//! `E[e^{(ν-k)τ_y}] = ψ^{(k)}(x) / ψ^{(k)}(y)` and of the strict Hölder
//! inequality between the `k = 0, 1, 2` functionals.
//!
//! Paths are stepped with the exact Gaussian transition law. A crossing
//! inside a step is detected either from the end state, with the crossing
//! time interpolated linearly, or from the Brownian-bridge crossing
//! probability when both end states sit below the level.
//!
//! Each path owns two ChaCha8 streams keyed by `(seed, path index)`, one for
//! the Gaussian increments and one for the bridge uniforms. Results therefore
//! do not depend on how paths are scheduled across threads, and switching the
//! bridge correction on or off leaves the state path unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::specfun::{hermite, Order, MAX_PSI_ORDER};
use crate::stats::{mean_and_stderr, CompensatedSum};

/// Mean-reversion level and volatility of the OU process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OUParams {
    mu: f64,
    sigma: f64,
}

impl OUParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("mu must be finite, got {mu}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for OUParams {
    fn default() -> Self {
        Self {
            mu: 0.0,
            sigma: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    /// Censoring horizon.
    pub t_max: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub bridge_correction: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_max: 200.0,
            n_paths: 100_000,
            seed: 0,
            bridge_correction: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max.is_finite() && self.dt <= self.t_max) {
            return Err(Error::Domain(format!(
                "t_max must be finite and >= dt, got {}",
                self.t_max
            )));
        }
        if self.n_paths < 1 {
            return Err(Error::Domain("n_paths must be >= 1".into()));
        }
        Ok(())
    }
}

/// Mean and variance of `X_t` given `X_0 = x`. `t = +inf` gives the
/// stationary law.
pub fn transition_law(x: f64, t: f64, params: &OUParams) -> Result<(f64, f64)> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Precondition(format!("t must be >= 0, got {t}")));
    }
    let decay = (-t).exp();
    let mean = params.mu + (x - params.mu) * decay;
    let var = 0.5 * params.sigma * params.sigma * -(-2.0 * t).exp_m1();
    Ok((mean, var))
}

/// Precomputed exact transition over a fixed step.
#[derive(Debug, Clone, Copy)]
struct Stepper {
    mu: f64,
    decay: f64,
    sd: f64,
}

impl Stepper {
    fn new(params: &OUParams, delta: f64) -> Self {
        Self {
            mu: params.mu,
            decay: (-delta).exp(),
            sd: params.sigma * (-0.5 * (-2.0 * delta).exp_m1()).sqrt(),
        }
    }

    #[inline]
    fn step(&self, x: f64, z: f64) -> f64 {
        self.mu + (x - self.mu) * self.decay + self.sd * z
    }
}

/// Samples `X_{t+delta}` given `X_t = x` from the exact transition law.
pub fn ou_exact_step<R: Rng + ?Sized>(
    x: f64,
    delta: f64,
    params: &OUParams,
    rng: &mut R,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    let z: f64 = rng.sample(StandardNormal);
    Ok(Stepper::new(params, delta).step(x, z))
}

/// The random streams owned by one simulated path.
#[derive(Debug, Clone)]
pub struct PathRng {
    normals: ChaCha8Rng,
    uniforms: ChaCha8Rng,
}

impl PathRng {
    pub fn for_path(seed: u64, index: u64) -> Self {
        let base = ChaCha8Rng::seed_from_u64(seed);
        let mut normals = base.clone();
        normals.set_stream(2 * index);
        let mut uniforms = base;
        uniforms.set_stream(2 * index + 1);
        Self { normals, uniforms }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HitOutcome {
    Hit(f64),
    Censored,
}

impl HitOutcome {
    pub fn time(&self) -> Option<f64> {
        match *self {
            HitOutcome::Hit(t) => Some(t),
            HitOutcome::Censored => None,
        }
    }
}

fn check_levels(x: f64, y: f64) -> Result<()> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Domain("start and level must be finite".into()));
    }
    if !(y > x) {
        return Err(Error::Precondition(format!(
            "hitting level y = {y} must exceed start x = {x}"
        )));
    }
    Ok(())
}

fn run_path(
    x: f64,
    y: f64,
    params: &OUParams,
    cfg: &SimConfig,
    stepper: &Stepper,
    rng: &mut PathRng,
) -> HitOutcome {
    let dt = cfg.dt;
    let n_steps = (cfg.t_max / dt).ceil() as u64;
    let bridge_scale = 2.0 / (params.sigma * params.sigma * dt);
    let mut cur = x;
    for i in 0..n_steps {
        let t = i as f64 * dt;
        let z: f64 = rng.normals.sample(StandardNormal);
        let next = stepper.step(cur, z);
        if next >= y {
            let hit = t + dt * (y - cur) / (next - cur);
            return if hit <= cfg.t_max {
                HitOutcome::Hit(hit)
            } else {
                HitOutcome::Censored
            };
        }
        if cfg.bridge_correction {
            let expo = (y - cur) * (y - next) * bridge_scale;
            // crossing probability below e^-40 is not worth a draw
            if expo < 40.0 {
                let u: f64 = rng.uniforms.random();
                if u < (-expo).exp() {
                    let hit = t + 0.5 * dt;
                    return if hit <= cfg.t_max {
                        HitOutcome::Hit(hit)
                    } else {
                        HitOutcome::Censored
                    };
                }
            }
        }
        cur = next;
    }
    HitOutcome::Censored
}

/// Simulates one path from `x` until it first reaches `y`, or until `t_max`.
pub fn simulate_hit(
    x: f64,
    y: f64,
    params: &OUParams,
    cfg: &SimConfig,
    rng: &mut PathRng,
) -> Result<HitOutcome> {
    check_levels(x, y)?;
    cfg.validate()?;
    let stepper = Stepper::new(params, cfg.dt);
    Ok(run_path(x, y, params, cfg, &stepper, rng))
}

/// Monte Carlo estimate of `E[e^{λτ}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEstimate {
    pub lambda: f64,
    pub mean: f64,
    pub stderr: f64,
    /// Upper bound on the contribution of censored paths, `e^{λ t_max} · n_censored / n`.
    pub censored_bound: f64,
}

/// Hitting-time samples of one simulation run, in path-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct HitSamples {
    outcomes: Vec<HitOutcome>,
    t_max: f64,
}

impl HitSamples {
    pub fn from_outcomes(outcomes: Vec<HitOutcome>, t_max: f64) -> Self {
        Self { outcomes, t_max }
    }

    pub fn outcomes(&self) -> &[HitOutcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn n_hit(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o, HitOutcome::Hit(_)))
            .count()
    }

    pub fn n_censored(&self) -> usize {
        self.len() - self.n_hit()
    }

    /// Censored paths are assigned `τ = t_max`.
    fn discounted(&self, lambda: f64) -> impl Iterator<Item = f64> + '_ {
        let t_max = self.t_max;
        self.outcomes
            .iter()
            .map(move |o| (lambda * o.time().unwrap_or(t_max)).exp())
    }

    pub fn mean_hit_time(&self) -> Option<f64> {
        let mut sum = CompensatedSum::default();
        let mut n = 0usize;
        for t in self.outcomes.iter().filter_map(HitOutcome::time) {
            sum.add(t);
            n += 1;
        }
        (n > 0).then(|| sum.value() / n as f64)
    }

    pub fn laplace(&self, lambda: f64) -> Result<LaplaceEstimate> {
        if !(lambda <= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!(
                "rate must be finite and <= 0, got {lambda}"
            )));
        }
        if self.is_empty() {
            return Err(Error::Precondition("no samples".into()));
        }
        let values: Vec<f64> = self.discounted(lambda).collect();
        let (mean, stderr) = mean_and_stderr(&values);
        let censored_bound =
            (lambda * self.t_max).exp() * self.n_censored() as f64 / self.len() as f64;
        Ok(LaplaceEstimate {
            lambda,
            mean,
            stderr,
            censored_bound,
        })
    }
}

/// Simulates `cfg.n_paths` independent hitting times of `y` from `x`.
pub fn sample_hitting_times(
    x: f64,
    y: f64,
    params: &OUParams,
    cfg: &SimConfig,
) -> Result<HitSamples> {
    check_levels(x, y)?;
    cfg.validate()?;
    let stepper = Stepper::new(params, cfg.dt);
    let outcomes: Vec<HitOutcome> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = PathRng::for_path(cfg.seed, i);
            run_path(x, y, params, cfg, &stepper, &mut rng)
        })
        .collect();
    Ok(HitSamples::from_outcomes(outcomes, cfg.t_max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HitTimeStats {
    pub n_hit: usize,
    pub n_censored: usize,
    pub laplace_estimates: Vec<LaplaceEstimate>,
}

impl HitTimeStats {
    pub fn estimate(&self, lambda: f64) -> Option<&LaplaceEstimate> {
        self.laplace_estimates.iter().find(|e| e.lambda == lambda)
    }
}

impl HitSamples {
    pub fn stats(&self, lambdas: &[f64]) -> Result<HitTimeStats> {
        let laplace_estimates = lambdas
            .iter()
            .map(|&l| self.laplace(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(HitTimeStats {
            n_hit: self.n_hit(),
            n_censored: self.n_censored(),
            laplace_estimates,
        })
    }
}

/// Monte Carlo estimates of `E[e^{λτ_y}]` for each requested rate.
pub fn laplace_at_hit(
    x: f64,
    y: f64,
    lambdas: &[f64],
    params: &OUParams,
    cfg: &SimConfig,
) -> Result<HitTimeStats> {
    if let Some(&bad) = lambdas.iter().find(|l| !(**l <= 0.0 && l.is_finite())) {
        return Err(Error::Domain(format!(
            "rate must be finite and <= 0, got {bad}"
        )));
    }
    sample_hitting_times(x, y, params, cfg)?.stats(lambdas)
}

/// `ψ^{(k)}(x) / ψ^{(k)}(y) = H_{ν-k}((μ-x)/σ) / H_{ν-k}((μ-y)/σ)`.
pub fn eigen_ratio(
    x: f64,
    y: f64,
    nu: Order,
    k: u32,
    params: &OUParams,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let order = nu.lowered(k);
    let hx = hermite(order, (params.mu - x) / params.sigma, quad)?;
    let hy = hermite(order, (params.mu - y) / params.sigma, quad)?;
    Ok(hx.value.ratio(hy.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eq5Report {
    pub k: u32,
    pub lambda: f64,
    pub mc: f64,
    pub analytic: f64,
    pub stderr: f64,
    pub z_score: f64,
    pub censored_bound: f64,
}

fn z_score(mc: f64, analytic: f64, stderr: f64) -> f64 {
    let diff = mc - analytic;
    if stderr > 0.0 {
        diff / stderr
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

fn check_k(k: u32) -> Result<()> {
    if k > MAX_PSI_ORDER {
        return Err(Error::Domain(format!(
            "k must be <= {MAX_PSI_ORDER}, got {k}"
        )));
    }
    Ok(())
}

/// Compares the Laplace functional at rate `ν - k` on existing samples with
/// the eigenfunction ratio. The samples must have been drawn from `x` to `y`
/// under `params`.
pub fn eq5_from_samples(
    samples: &HitSamples,
    x: f64,
    y: f64,
    nu: Order,
    k: u32,
    params: &OUParams,
    quad: &QuadratureConfig,
) -> Result<Eq5Report> {
    check_k(k)?;
    let lambda = nu.lowered(k).get();
    let est = samples.laplace(lambda)?;
    let analytic = eigen_ratio(x, y, nu, k, params, quad)?;
    Ok(Eq5Report {
        k,
        lambda,
        mc: est.mean,
        analytic,
        stderr: est.stderr,
        z_score: z_score(est.mean, analytic, est.stderr),
        censored_bound: est.censored_bound,
    })
}

pub fn verify_eq5(
    x: f64,
    y: f64,
    nu: Order,
    k: u32,
    params: &OUParams,
    cfg: &SimConfig,
    quad: &QuadratureConfig,
) -> Result<Eq5Report> {
    check_k(k)?;
    let samples = sample_hitting_times(x, y, params, cfg)?;
    eq5_from_samples(&samples, x, y, nu, k, params, quad)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    /// `(mean e^{ντ})^{1/2} (mean e^{(ν-2)τ})^{1/2}`
    pub lhs: f64,
    /// `mean e^{(ν-1)τ}`
    pub rhs: f64,
    pub gap: f64,
    /// Delta-method standard error of `gap` on the common sample.
    pub stderr: f64,
}

impl HolderReport {
    /// Strictly positive beyond `n_sigma` standard errors.
    pub fn is_strict(&self, n_sigma: f64) -> bool {
        self.gap > n_sigma * self.stderr
    }
}

pub fn holder_from_samples(samples: &HitSamples, nu: Order) -> Result<HolderReport> {
    let v = nu.get();
    let lo = samples.laplace(v)?;
    let mid = samples.laplace(v - 1.0)?;
    let hi = samples.laplace(v - 2.0)?;
    let (a, b, c) = (lo.mean, mid.mean, hi.mean);
    let lhs = a.sqrt() * c.sqrt();
    let wa = 0.5 * (c / a).sqrt();
    let wc = 0.5 * (a / c).sqrt();
    let grads: Vec<f64> = samples
        .discounted(v)
        .zip(samples.discounted(v - 1.0))
        .zip(samples.discounted(v - 2.0))
        .map(|((ea, eb), ec)| wa * ea - eb + wc * ec)
        .collect();
    let (_, stderr) = mean_and_stderr(&grads);
    Ok(HolderReport {
        lhs,
        rhs: b,
        gap: lhs - b,
        stderr,
    })
}

pub fn verify_holder(
    x: f64,
    y: f64,
    nu: Order,
    params: &OUParams,
    cfg: &SimConfig,
) -> Result<HolderReport> {
    let samples = sample_hitting_times(x, y, params, cfg)?;
    holder_from_samples(&samples, nu)
}

/// Hölder gap predicted by the eigenfunction ratios for `k = 0, 1, 2`.
pub fn holder_analytic_gap(
    x: f64,
    y: f64,
    nu: Order,
    params: &OUParams,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let a = eigen_ratio(x, y, nu, 0, params, quad)?;
    let b = eigen_ratio(x, y, nu, 1, params, quad)?;
    let c = eigen_ratio(x, y, nu, 2, params, quad)?;
    Ok((a * c).sqrt() - b)
}
