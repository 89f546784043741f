// SPDX-License-Identifier: Apache-2.0

//! Training grids, losses, a deterministic Adam optimizer and the training
//! loops for distribution fitting, differential equation solving and
//! bivariate fitting.
//!
//! Epochs are full-grid gradient steps (grids never exceed a few thousand
//! points). Per-slot gradient terms are computed in parallel and reduced in
//! slot order, so reports are bitwise reproducible for a fixed seed.

use std::time::Instant;

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::model::{DiffMethod, QuantumModel, CENTRAL_DIFF_STEP, SECOND_DIFF_STEP};
use crate::statevector::StateVector;
use crate::targets::{de_boundary, de_residual, DeKind, TargetSpec};
use crate::{Error, Real, Result};

/// Which grid a univariate run trains on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GridKind {
    /// The 2^n integers plus the 2^n half-integers (M = 2^{n+1}).
    #[default]
    IntegersAndHalves,
    /// The 2^n integers only.
    Integers,
}

impl GridKind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "integers-and-halves" => GridKind::IntegersAndHalves,
            "integers" => GridKind::Integers,
            other => return Err(Error::UnknownMethod(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            GridKind::IntegersAndHalves => "integers-and-halves",
            GridKind::Integers => "integers",
        }
    }
}

/// Training hyperparameters.
#[derive(Clone, Debug)]
pub struct TrainConfig<T: Real> {
    pub epochs: usize,
    pub learning_rate: T,
    pub seed: u64,
    pub loss_report_stride: usize,
    /// Angles are initialized uniformly from [-init_scale, init_scale].
    pub init_scale: T,
    /// Stop once the loss drops below this value.
    pub early_stop_loss: T,
    /// Derivative route used inside differential-equation losses.
    pub x_diff_method: DiffMethod,
    pub grid: GridKind,
    /// Optional warm start (theta, alpha, beta) overriding random init.
    pub warm_start: Option<(Vec<T>, T, T)>,
    /// Bivariate ablation: pin the correlation-circuit angles at zero so
    /// the model stays a product across registers.
    pub freeze_correlation: bool,
}

impl<T: Real> TrainConfig<T> {
    pub fn new(epochs: usize, learning_rate: T, seed: u64) -> Self {
        TrainConfig {
            epochs,
            learning_rate,
            seed,
            loss_report_stride: 100,
            init_scale: T::of(0.1),
            early_stop_loss: T::of(1e-8),
            x_diff_method: DiffMethod::CentralDifference,
            grid: GridKind::IntegersAndHalves,
            warm_start: None,
            freeze_correlation: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidTarget("epochs must be at least 1".into()));
        }
        if self.learning_rate <= T::zero() {
            return Err(Error::InvalidTarget(
                "learning rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a training run.
#[derive(Clone, Debug)]
pub struct TrainReport<T: Real> {
    /// (epoch, loss) at the configured stride; the last entry is the final
    /// loss at the returned parameters.
    pub trajectory: Vec<(usize, T)>,
    pub theta: Vec<T>,
    pub alpha: T,
    pub beta: T,
    pub final_loss: T,
    pub epochs_run: usize,
    pub seed: u64,
    pub wall_clock_secs: f64,
}

/// The sorted training grid: integers and half-integers of [0, 2^n), i.e.
/// {0, 0.5, 1, ..., 2^n - 0.5} with M = 2^{n+1} points.
pub fn make_training_grid<T: Real>(n: usize) -> Vec<T> {
    let m = 1usize << (n + 1);
    (0..m).map(|i| T::of_usize(i) / T::of(2.0)).collect()
}

/// Integer-only grid {0, 1, ..., 2^n - 1}.
pub fn make_integer_grid<T: Real>(n: usize) -> Vec<T> {
    (0..(1usize << n)).map(T::of_usize).collect()
}

fn grid_for<T: Real>(kind: GridKind, n: usize) -> Vec<T> {
    match kind {
        GridKind::IntegersAndHalves => make_training_grid(n),
        GridKind::Integers => make_integer_grid(n),
    }
}

/// Mean squared error of the model against the target on the grid.
pub fn mse_loss<T: Real>(
    model: &QuantumModel<T>,
    target: &TargetSpec<T>,
    grid: &[T],
) -> Result<T> {
    let mut total = T::zero();
    for &x in grid {
        let diff = model.evaluate(&[x])? - target.density(x)?;
        total += diff * diff;
    }
    Ok(total / T::of_usize(grid.len()))
}

// --- Adam -------------------------------------------------------------------

/// First/second moment state of the Adam optimizer with canonical
/// constants beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
#[derive(Clone, Debug)]
pub struct AdamState<T: Real> {
    m: Vec<T>,
    v: Vec<T>,
    step: usize,
    beta1: T,
    beta2: T,
    eps: T,
}

impl<T: Real> AdamState<T> {
    pub fn new(dim: usize) -> Self {
        AdamState {
            m: vec![T::zero(); dim],
            v: vec![T::zero(); dim],
            step: 0,
            beta1: T::of(0.9),
            beta2: T::of(0.999),
            eps: T::of(1e-8),
        }
    }

    pub fn step_count(&self) -> usize {
        self.step
    }
}

/// One Adam update with bias correction. Parameter and gradient shapes must
/// match the state.
pub fn adam_step<T: Real>(
    params: &mut [T],
    grads: &[T],
    state: &mut AdamState<T>,
    lr: T,
) -> Result<()> {
    if params.len() != grads.len() || params.len() != state.m.len() {
        return Err(Error::ParameterCountMismatch {
            expected: state.m.len(),
            got: params.len().min(grads.len()),
        });
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = T::one() - state.beta1.powi(t);
    let bc2 = T::one() - state.beta2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (T::one() - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (T::one() - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + state.eps);
    }
    Ok(())
}

// --- shared loop machinery ---------------------------------------------------

fn initial_params<T: Real>(
    model: &QuantumModel<T>,
    config: &TrainConfig<T>,
    alpha_init: T,
) -> Result<(Vec<T>, T, T)> {
    if let Some((theta, alpha, beta)) = &config.warm_start {
        if theta.len() != model.param_count() {
            return Err(Error::ParameterCountMismatch {
                expected: model.param_count(),
                got: theta.len(),
            });
        }
        return Ok((theta.clone(), *alpha, *beta));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let theta = (0..model.param_count())
        .map(|_| T::of((rng.random::<f64>() * 2.0 - 1.0) * config.init_scale.as_f64()))
        .collect();
    Ok((theta, alpha_init, T::zero()))
}

/// Verifies the analytic theta gradient against a central difference at the
/// run's initial parameters; training aborts if they disagree.
fn gradient_gate<T: Real>(model: &QuantumModel<T>, features: &[T]) -> Result<()> {
    let analytic = model.grad_theta(features)?;
    let h = T::of(1e-5);
    for (i, &g) in analytic.iter().enumerate() {
        let mut theta = model.theta().to_vec();
        theta[i] += h;
        let up = model
            .clone()
            .with_params(theta.clone(), model.alpha(), model.beta())?
            .evaluate_unchecked(features)?;
        theta[i] -= T::of(2.0) * h;
        let down = model
            .clone()
            .with_params(theta, model.alpha(), model.beta())?
            .evaluate_unchecked(features)?;
        let central = (up - down) / (T::of(2.0) * h);
        let dev = (g - central).abs().as_f64();
        if dev > 1e-6 {
            return Err(Error::GradientCheckFailed {
                slot: i,
                deviation: dev,
            });
        }
    }
    Ok(())
}

struct LossAndGrads<T> {
    loss: T,
    grads: Vec<T>, // layout: theta..., alpha, beta
}

/// Packed parameters, reported (epoch, loss) pairs, and epochs run.
type LoopOutcome<T> = (Vec<T>, Vec<(usize, T)>, usize);

/// Runs the Adam loop over a closure computing loss and gradients for the
/// packed parameter vector [theta..., alpha, beta].
fn run_loop<T: Real>(
    mut params: Vec<T>,
    config: &TrainConfig<T>,
    mut eval: impl FnMut(&[T]) -> Result<LossAndGrads<T>>,
) -> Result<LoopOutcome<T>> {
    let mut adam = AdamState::new(params.len());
    let mut trajectory = Vec::new();
    let stride = config.loss_report_stride.max(1);
    let mut epochs_run = 0;
    for epoch in 0..config.epochs {
        let lg = eval(&params)?;
        if !lg.loss.as_f64().is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        if epoch % stride == 0 {
            trajectory.push((epoch, lg.loss));
        }
        if lg.loss < config.early_stop_loss {
            epochs_run = epoch;
            break;
        }
        adam_step(&mut params, &lg.grads, &mut adam, config.learning_rate)?;
        epochs_run = epoch + 1;
    }
    Ok((params, trajectory, epochs_run))
}

fn unpack<T: Real>(params: &[T]) -> (Vec<T>, T, T) {
    let p = params.len();
    (params[..p - 2].to_vec(), params[p - 2], params[p - 1])
}

// --- distribution fitting ----------------------------------------------------

/// Fits a univariate model to an analytic density by MSE minimization over
/// theta, alpha and beta.
pub fn train_distribution<T: Real>(
    target: &TargetSpec<T>,
    template: &QuantumModel<T>,
    config: &TrainConfig<T>,
) -> Result<(QuantumModel<T>, TrainReport<T>)> {
    config.validate()?;
    target.validate()?;
    if target.is_bivariate() || target.is_de() {
        return Err(Error::InvalidTarget(
            "train_distribution needs a univariate density target".into(),
        ));
    }
    let started = Instant::now();
    let grid: Vec<T> = grid_for(config.grid, template.n());
    let target_values: Vec<T> = grid
        .iter()
        .map(|&x| target.density(x))
        .collect::<Result<_>>()?;
    let alpha_init = target_values
        .iter()
        .fold(T::zero(), |a, &b| if b > a { b } else { a })
        .max(T::of(1e-3));

    let (theta0, alpha0, beta0) = initial_params(template, config, alpha_init)?;
    let gate_model = template
        .clone()
        .with_params(theta0.clone(), alpha0, beta0)?;
    gradient_gate(&gate_model, &[grid[grid.len() / 2]])?;

    let states: Vec<StateVector<T>> = grid
        .iter()
        .map(|&x| template.feature_state(&[x]))
        .collect::<Result<_>>()?;
    let m_count = T::of_usize(grid.len());
    let template = template.clone();

    let mut packed = theta0;
    packed.push(alpha0);
    packed.push(beta0);
    let half = T::FRAC_PI_2();

    let eval = |params: &[T]| -> Result<LossAndGrads<T>> {
        let (theta, alpha, beta) = unpack(params);
        let row = template.projector_row(&theta)?;
        let obs: Vec<T> = states
            .iter()
            .map(|s| QuantumModel::observable_from(&row, s))
            .collect();
        let residuals: Vec<T> = obs
            .iter()
            .zip(&target_values)
            .map(|(&o, &t)| alpha * o + beta - t)
            .collect();
        let loss = residuals.iter().map(|&r| r * r).sum::<T>() / m_count;

        let theta_grads: Vec<T> = (0..theta.len())
            .into_par_iter()
            .map(|j| -> Result<T> {
                let mut shifted = theta.clone();
                shifted[j] += half;
                let row_p = template.projector_row(&shifted)?;
                shifted[j] = theta[j] - half;
                let row_m = template.projector_row(&shifted)?;
                let mut g = T::zero();
                for (i, s) in states.iter().enumerate() {
                    let d_obs = (QuantumModel::observable_from(&row_p, s)
                        - QuantumModel::observable_from(&row_m, s))
                        / T::of(2.0);
                    g += residuals[i] * alpha * d_obs;
                }
                Ok(T::of(2.0) * g / m_count)
            })
            .collect::<Result<_>>()?;

        let mut grads = theta_grads;
        let g_alpha = residuals
            .iter()
            .zip(&obs)
            .map(|(&r, &o)| r * o)
            .sum::<T>()
            * T::of(2.0)
            / m_count;
        let g_beta = residuals.iter().copied().sum::<T>() * T::of(2.0) / m_count;
        grads.push(g_alpha);
        grads.push(g_beta);
        Ok(LossAndGrads { loss, grads })
    };

    let (params, mut trajectory, epochs_run) = run_loop(packed, config, eval)?;
    let (theta, alpha, beta) = unpack(&params);
    let model = template.with_params(theta, alpha, beta)?;
    let final_loss = {
        let row = model.projector_row(model.theta())?;
        let mut total = T::zero();
        for (s, &t) in states.iter().zip(&target_values) {
            let r = model.alpha() * QuantumModel::observable_from(&row, s) + model.beta() - t;
            total += r * r;
        }
        total / m_count
    };
    trajectory.push((epochs_run, final_loss));

    let report = TrainReport {
        trajectory,
        theta: model.theta().to_vec(),
        alpha: model.alpha(),
        beta: model.beta(),
        final_loss,
        epochs_run,
        seed: config.seed,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

// --- differential equations ---------------------------------------------------

/// Observable values needed for f, f' and f'' at one grid point.
struct DePointStates<T: Real> {
    center: StateVector<T>,
    d1_plus: StateVector<T>,
    d1_minus: StateVector<T>,
    d2_plus: StateVector<T>,
    d2_minus: StateVector<T>,
}

struct DeValues<T> {
    f: T,
    df: T,
    d2f: T,
    /// the same triple at alpha = 1, beta = 0 (observable space)
    o: T,
    do_: T,
    d2o: T,
}

fn de_point_values<T: Real>(
    row: &StateVector<T>,
    point: &DePointStates<T>,
    alpha: T,
    beta: T,
) -> DeValues<T> {
    let h1 = T::of(CENTRAL_DIFF_STEP);
    let h2 = T::of(SECOND_DIFF_STEP);
    let o = QuantumModel::observable_from(row, &point.center);
    let do_ = (QuantumModel::observable_from(row, &point.d1_plus)
        - QuantumModel::observable_from(row, &point.d1_minus))
        / (T::of(2.0) * h1);
    let d2o = (QuantumModel::observable_from(row, &point.d2_plus) - T::of(2.0) * o
        + QuantumModel::observable_from(row, &point.d2_minus))
        / (h2 * h2);
    DeValues {
        f: alpha * o + beta,
        df: alpha * do_,
        d2f: alpha * d2o,
        o,
        do_,
        d2o,
    }
}

/// Trains a univariate Hartley model to satisfy a differential equation:
/// the loss is the equal-weighted sum of the mean squared residual over the
/// grid and the squared boundary value and boundary slope mismatches.
pub fn train_de<T: Real>(
    kind: DeKind,
    mu: T,
    sigma: T,
    template: &QuantumModel<T>,
    config: &TrainConfig<T>,
) -> Result<(QuantumModel<T>, TrainReport<T>)> {
    config.validate()?;
    let spec = TargetSpec::De { kind, mu, sigma };
    spec.validate()?;
    let started = Instant::now();

    let grid: Vec<T> = grid_for(config.grid, template.n())
        .into_iter()
        .filter(|&x| kind == DeKind::De1 || x > T::zero())
        .collect();
    let boundary = de_boundary(kind, mu, sigma);

    let h1 = T::of(CENTRAL_DIFF_STEP);
    let h2 = T::of(SECOND_DIFF_STEP);
    let point_states = |x: T| -> Result<DePointStates<T>> {
        Ok(DePointStates {
            center: template.feature_state(&[x])?,
            d1_plus: template.feature_state(&[x + h1])?,
            d1_minus: template.feature_state(&[x - h1])?,
            d2_plus: template.feature_state(&[x + h2])?,
            d2_minus: template.feature_state(&[x - h2])?,
        })
    };
    let states: Vec<DePointStates<T>> = grid.iter().map(|&x| point_states(x)).collect::<Result<_>>()?;
    let boundary_states = point_states(boundary.point)?;

    let (theta0, alpha0, beta0) = initial_params(template, config, boundary.value)?;
    let gate_model = template.clone().with_params(theta0.clone(), alpha0, beta0)?;
    gradient_gate(&gate_model, &[grid[grid.len() / 2]])?;

    let m_count = T::of_usize(grid.len());
    let template = template.clone();
    let half = T::FRAC_PI_2();

    // residuals and boundary mismatches for one projector row
    let residual_pack = |row: &StateVector<T>, alpha: T, beta: T| -> Result<(Vec<T>, T, T)> {
        let mut residuals = Vec::with_capacity(grid.len());
        for (i, &x) in grid.iter().enumerate() {
            let v = de_point_values(row, &states[i], alpha, beta);
            residuals.push(de_residual(kind, v.f, v.df, v.d2f, x, mu, sigma)?);
        }
        let vb = de_point_values(row, &boundary_states, alpha, beta);
        Ok((residuals, vb.f - boundary.value, vb.df - boundary.derivative))
    };

    let mut packed = theta0;
    packed.push(alpha0);
    packed.push(beta0);

    let eval = |params: &[T]| -> Result<LossAndGrads<T>> {
        let (theta, alpha, beta) = unpack(params);
        let row = template.projector_row(&theta)?;
        let (residuals, bv, bd) = residual_pack(&row, alpha, beta)?;
        let loss =
            residuals.iter().map(|&r| r * r).sum::<T>() / m_count + bv * bv + bd * bd;

        let theta_grads: Vec<T> = (0..theta.len())
            .into_par_iter()
            .map(|j| -> Result<T> {
                let mut shifted = theta.clone();
                shifted[j] += half;
                let row_p = template.projector_row(&shifted)?;
                shifted[j] = theta[j] - half;
                let row_m = template.projector_row(&shifted)?;
                let (res_p, bv_p, bd_p) = residual_pack(&row_p, alpha, beta)?;
                let (res_m, bv_m, bd_m) = residual_pack(&row_m, alpha, beta)?;
                let mut g = T::zero();
                for i in 0..residuals.len() {
                    g += residuals[i] * (res_p[i] - res_m[i]) / T::of(2.0);
                }
                g = T::of(2.0) * g / m_count;
                g += T::of(2.0) * bv * (bv_p - bv_m) / T::of(2.0);
                g += T::of(2.0) * bd * (bd_p - bd_m) / T::of(2.0);
                Ok(g)
            })
            .collect::<Result<_>>()?;

        // alpha and beta enter every residual affinely
        let mut g_alpha = T::zero();
        let mut g_beta = T::zero();
        for (i, &x) in grid.iter().enumerate() {
            let v = de_point_values(&row, &states[i], alpha, beta);
            let dr_dalpha = de_residual(kind, v.o, v.do_, v.d2o, x, mu, sigma)?;
            let dr_dbeta = de_residual(kind, T::one(), T::zero(), T::zero(), x, mu, sigma)?;
            g_alpha += residuals[i] * dr_dalpha;
            g_beta += residuals[i] * dr_dbeta;
        }
        g_alpha = T::of(2.0) * g_alpha / m_count;
        g_beta = T::of(2.0) * g_beta / m_count;
        let vb = de_point_values(&row, &boundary_states, alpha, beta);
        g_alpha += T::of(2.0) * (bv * vb.o + bd * vb.do_);
        g_beta += T::of(2.0) * bv;

        let mut grads = theta_grads;
        grads.push(g_alpha);
        grads.push(g_beta);
        Ok(LossAndGrads { loss, grads })
    };

    let (params, mut trajectory, epochs_run) = run_loop(packed, config, eval)?;
    let (theta, alpha, beta) = unpack(&params);
    let model = template.with_params(theta, alpha, beta)?;
    let final_loss = {
        let row = model.projector_row(model.theta())?;
        let (residuals, bv, bd) = residual_pack(&row, model.alpha(), model.beta())?;
        residuals.iter().map(|&r| r * r).sum::<T>() / m_count + bv * bv + bd * bd
    };
    trajectory.push((epochs_run, final_loss));

    let report = TrainReport {
        trajectory,
        theta: model.theta().to_vec(),
        alpha: model.alpha(),
        beta: model.beta(),
        final_loss,
        epochs_run,
        seed: config.seed,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

// --- bivariate fitting ---------------------------------------------------------

/// Fits a bivariate Hartley model to a binormal target on the Cartesian
/// product of two univariate grids.
pub fn train_bivariate<T: Real>(
    target: &TargetSpec<T>,
    template: &QuantumModel<T>,
    config: &TrainConfig<T>,
) -> Result<(QuantumModel<T>, TrainReport<T>)> {
    config.validate()?;
    target.validate()?;
    if !target.is_bivariate() {
        return Err(Error::InvalidTarget(
            "train_bivariate needs a binormal target".into(),
        ));
    }
    let started = Instant::now();
    let axis: Vec<T> = grid_for(config.grid, template.n());
    let mut grid: Vec<(T, T)> = Vec::with_capacity(axis.len() * axis.len());
    for &x in &axis {
        for &y in &axis {
            grid.push((x, y));
        }
    }
    let target_values: Vec<T> = grid
        .iter()
        .map(|&(x, y)| target.density2(x, y))
        .collect::<Result<_>>()?;
    let alpha_init = target_values
        .iter()
        .fold(T::zero(), |a, &b| if b > a { b } else { a })
        .max(T::of(1e-3));

    let (mut theta0, alpha0, beta0) = initial_params(template, config, alpha_init)?;
    let frozen_from = if config.freeze_correlation {
        let from = 2 * template.ansatz_param_count();
        for slot in theta0.iter_mut().skip(from) {
            *slot = T::zero();
        }
        Some(from)
    } else {
        None
    };
    let gate_model = template.clone().with_params(theta0.clone(), alpha0, beta0)?;
    let mid = grid[grid.len() / 2];
    gradient_gate(&gate_model, &[mid.0, mid.1])?;

    // the bivariate feature state is a product across the two registers, so
    // <w|s(x) (x) s(y)> contracts through per-axis half-projections
    let axis_map = crate::circuits::build_hartley_feature_map::<T>(template.n())?;
    let axis_states: Vec<StateVector<T>> = axis
        .iter()
        .map(|&x| axis_map.run_on_zero(&[x], &[]))
        .collect::<Result<_>>()?;
    let m_count = T::of_usize(grid.len());
    let template = template.clone();
    let half = T::FRAC_PI_2();

    let observables = |row: &StateVector<T>| -> Vec<T> {
        bivariate_observables(row, &axis_states)
    };

    let mut packed = theta0;
    packed.push(alpha0);
    packed.push(beta0);

    let eval = |params: &[T]| -> Result<LossAndGrads<T>> {
        let (theta, alpha, beta) = unpack(params);
        let row = template.projector_row(&theta)?;
        let obs = observables(&row);
        let residuals: Vec<T> = obs
            .iter()
            .zip(&target_values)
            .map(|(&o, &t)| alpha * o + beta - t)
            .collect();
        let loss = residuals.iter().map(|&r| r * r).sum::<T>() / m_count;

        let theta_grads: Vec<T> = (0..theta.len())
            .into_par_iter()
            .map(|j| -> Result<T> {
                if frozen_from.is_some_and(|from| j >= from) {
                    return Ok(T::zero());
                }
                let mut shifted = theta.clone();
                shifted[j] += half;
                let obs_p = observables(&template.projector_row(&shifted)?);
                shifted[j] = theta[j] - half;
                let obs_m = observables(&template.projector_row(&shifted)?);
                let mut g = T::zero();
                for i in 0..residuals.len() {
                    g += residuals[i] * alpha * (obs_p[i] - obs_m[i]) / T::of(2.0);
                }
                Ok(T::of(2.0) * g / m_count)
            })
            .collect::<Result<_>>()?;

        let mut grads = theta_grads;
        let g_alpha = residuals
            .iter()
            .zip(&obs)
            .map(|(&r, &o)| r * o)
            .sum::<T>()
            * T::of(2.0)
            / m_count;
        let g_beta = residuals.iter().copied().sum::<T>() * T::of(2.0) / m_count;
        grads.push(g_alpha);
        grads.push(g_beta);
        Ok(LossAndGrads { loss, grads })
    };

    let (params, mut trajectory, epochs_run) = run_loop(packed, config, eval)?;
    let (theta, alpha, beta) = unpack(&params);
    let model = template.with_params(theta, alpha, beta)?;
    let final_loss = {
        let row = model.projector_row(model.theta())?;
        let obs = bivariate_observables(&row, &axis_states);
        let mut total = T::zero();
        for (&o, &t) in obs.iter().zip(&target_values) {
            let r = model.alpha() * o + model.beta() - t;
            total += r * r;
        }
        total / m_count
    };
    trajectory.push((epochs_run, final_loss));

    let report = TrainReport {
        trajectory,
        theta: model.theta().to_vec(),
        alpha: model.alpha(),
        beta: model.beta(),
        final_loss,
        epochs_run,
        seed: config.seed,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((model, report))
}

/// <O> on the whole product grid from one projector row: the row reshapes
/// into a block_x by block_y matrix, contracts with each y-axis state, and
/// the remainder dots against each x-axis state. Grid order is x-major,
/// matching the Cartesian product built by `train_bivariate`.
fn bivariate_observables<T: Real>(
    row: &StateVector<T>,
    axis_states: &[StateVector<T>],
) -> Vec<T> {
    use num_complex::Complex;
    let block_dim = axis_states[0].dim();
    let w = row.amplitudes();
    let half_projected: Vec<Vec<Complex<T>>> = axis_states
        .iter()
        .map(|sy| {
            (0..block_dim)
                .map(|ix| {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for (iy, &s) in sy.amplitudes().iter().enumerate() {
                        acc += w[ix * block_dim + iy].conj() * s;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(axis_states.len() * axis_states.len());
    for sx in axis_states {
        for u in &half_projected {
            let mut ip = Complex::new(T::zero(), T::zero());
            for (ix, &a) in sx.amplitudes().iter().enumerate() {
                ip += u[ix] * a;
            }
            out.push(ip.norm_sqr());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AnsatzSpec, FeatureKind};

    #[test]
    fn training_grid_shapes() {
        let g: Vec<f64> = make_training_grid(1);
        assert_eq!(g, vec![0.0, 0.5, 1.0, 1.5]);

        let g: Vec<f64> = make_training_grid(3);
        assert_eq!(g.len(), 16);
        assert_eq!(*g.last().unwrap(), 7.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|&x| (0.0..=7.5).contains(&x)));
    }

    #[test]
    fn mse_loss_closed_forms() {
        let n = 3;
        let target = TargetSpec::Exponential { lambda: 0.5 };
        let grid: Vec<f64> = make_training_grid(n);

        // alpha = 0, beta = 0 gives the mean of target^2
        let template = QuantumModel::new(FeatureKind::Hartley, n, AnsatzSpec::hera(1)).unwrap();
        let slots = template.param_count();
        let model = template.with_params(vec![0.0; slots], 0.0, 0.0).unwrap();
        let loss = mse_loss(&model, &target, &grid).unwrap();
        let expect: f64 = grid
            .iter()
            .map(|&x| target.density(x).unwrap().powi(2))
            .sum::<f64>()
            / grid.len() as f64;
        assert!((loss - expect).abs() < 1e-14);

        // batched and pointwise evaluation agree for a random model too
        let ou = TargetSpec::Ou {
            mu: 5.0,
            sigma: 3.0,
            nu: 0.5,
            x_init: 24.0,
            t: 1.0,
        };
        let template = QuantumModel::new(FeatureKind::Hartley, n, AnsatzSpec::hera(2)).unwrap();
        let p = template.param_count();
        let theta: Vec<f64> = (0..p).map(|i| ((i * 11 + 3) as f64 * 0.673).sin()).collect();
        let random = template.with_params(theta, 0.9, 0.02).unwrap();
        let batched = mse_loss(&random, &ou, &grid).unwrap();
        let pointwise: f64 = grid
            .iter()
            .map(|&x| {
                let d = random.evaluate(&[x]).unwrap() - ou.density(x).unwrap();
                d * d
            })
            .sum::<f64>()
            / grid.len() as f64;
        assert!((batched - pointwise).abs() < 1e-14);
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut p = vec![0.3, -0.7];
        let g = vec![0.0, 0.0];
        let mut st = AdamState::new(2);
        adam_step(&mut p, &g, &mut st, 0.01).unwrap();
        assert_eq!(p, vec![0.3, -0.7]);
    }

    #[test]
    fn adam_constant_gradient_converges_to_signed_rate() {
        let mut p = vec![0.0f64];
        let mut st = AdamState::new(1);
        let lr = 0.01;
        let mut last = p[0];
        for _ in 0..5000 {
            last = p[0];
            adam_step(&mut p, &[0.3], &mut st, lr).unwrap();
        }
        let step = last - p[0];
        assert!((step - lr).abs() < 1e-6, "step {step}");
    }

    #[test]
    fn adam_rejects_shape_mismatch() {
        let mut p = vec![0.0; 2];
        let mut st = AdamState::new(3);
        assert!(adam_step(&mut p, &[0.1, 0.1], &mut st, 0.01).is_err());
    }

    #[test]
    fn adam_is_deterministic() {
        let run = || {
            let mut p = vec![0.1, 0.2, 0.3];
            let mut st = AdamState::new(3);
            for i in 0..50 {
                let g = vec![(i as f64 * 0.3).sin(), 0.2, -0.1];
                adam_step(&mut p, &g, &mut st, 0.02).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn short_distribution_run_decreases_loss_deterministically() {
        let n = 3;
        let target = TargetSpec::Exponential { lambda: 0.5 };
        let template = QuantumModel::new(FeatureKind::Hartley, n, AnsatzSpec::hera(1)).unwrap();
        let mut config = TrainConfig::new(120, 0.05, 11);
        config.loss_report_stride = 20;

        let (model, report) = train_distribution(&target, &template, &config).unwrap();
        let (model2, report2) = train_distribution(&target, &template, &config).unwrap();
        assert_eq!(model.theta(), model2.theta());
        assert_eq!(report.final_loss, report2.final_loss);
        assert_eq!(report.trajectory, report2.trajectory);

        let first = report.trajectory.first().unwrap().1;
        assert!(
            report.final_loss < first,
            "loss did not improve: {first} -> {}",
            report.final_loss
        );
        assert_eq!(report.trajectory.last().unwrap().1, report.final_loss);
    }

    #[test]
    fn windowed_loss_minima_decrease() {
        let n = 3;
        let target = TargetSpec::Exponential { lambda: 0.5 };
        let template = QuantumModel::new(FeatureKind::Hartley, n, AnsatzSpec::hera(2)).unwrap();
        let mut config = TrainConfig::new(300, 0.05, 3);
        config.loss_report_stride = 1;
        let (_, report) = train_distribution(&target, &template, &config).unwrap();
        let losses: Vec<f64> = report.trajectory.iter().map(|&(_, l)| l).collect();
        let window = 100;
        let minima: Vec<f64> = losses
            .chunks(window)
            .map(|c| c.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect();
        for w in minima.windows(2) {
            assert!(
                w[1] <= w[0] * 1.0000001,
                "windowed minima increased: {:?}",
                minima
            );
        }
    }

    #[test]
    fn warm_start_resumes_at_low_loss() {
        let n = 3;
        let target = TargetSpec::Exponential { lambda: 0.5 };
        let template = QuantumModel::new(FeatureKind::Hartley, n, AnsatzSpec::hera(1)).unwrap();
        let config = TrainConfig::new(400, 0.05, 5);
        let (model, report) = train_distribution(&target, &template, &config).unwrap();

        let mut resumed = TrainConfig::new(1, 0.05, 5);
        resumed.warm_start = Some((model.theta().to_vec(), model.alpha(), model.beta()));
        let (_, report2) = train_distribution(&target, &template, &resumed).unwrap();
        let initial = report2.trajectory.first().unwrap().1;
        assert!(
            initial <= report.final_loss * 1.0001,
            "warm start lost progress: {initial} vs {}",
            report.final_loss
        );
    }

    #[test]
    fn fast_bivariate_observables_match_model_path() {
        let n = 2;
        let model = QuantumModel::new(FeatureKind::BivariateHartley, n, AnsatzSpec::hera(1))
            .unwrap();
        let p = model.param_count();
        let theta: Vec<f64> = (0..p).map(|i| ((i * 5 + 2) as f64 * 0.713).sin()).collect();
        let model = model.with_params(theta, 1.0, 0.0).unwrap();

        let axis: Vec<f64> = make_training_grid(n);
        let axis_map = crate::circuits::build_hartley_feature_map::<f64>(n).unwrap();
        let axis_states: Vec<_> = axis
            .iter()
            .map(|&x| axis_map.run_on_zero(&[x], &[]).unwrap())
            .collect();
        let row = model.projector_row(model.theta()).unwrap();
        let fast = bivariate_observables(&row, &axis_states);
        let mut k = 0;
        for &x in &axis {
            for &y in &axis {
                let slow = model.observable(&[x, y]).unwrap();
                assert!(
                    (fast[k] - slow).abs() < 1e-13,
                    "({x}, {y}): fast {} vs slow {slow}",
                    fast[k]
                );
                k += 1;
            }
        }
    }

    #[test]
    fn distribution_training_rejects_wrong_targets() {
        let template = QuantumModel::new(FeatureKind::Hartley, 2, AnsatzSpec::hera(1)).unwrap();
        let config = TrainConfig::new(10, 0.01, 1);
        let binormal = TargetSpec::Binormal {
            mu_x: 0.0,
            mu_y: 0.0,
            sigma_x: 1.0,
            sigma_y: 1.0,
            rho: 0.0,
        };
        assert!(train_distribution(&binormal, &template, &config).is_err());
    }
}
