//! Oscillatory propagation-speed families and the loss-of-regularity scans
//! they drive.
//!
//! A speed class fixes a band `[μ1, μ2]` and a derivative envelope
//! `|c'(t)| ≤ C·θ(t)/t` with `θ(t) → ∞` at `t = 0`. Inside such a class one
//! can build, for each frequency `λ`, a resonant perturbation of a constant
//! plateau whose mode energy is amplified by at least `exp(2φ(λ))` with
//! `φ(λ)/log λ → ∞`; swept over `λ`, that is the superpolynomial signature
//! separating infinite from finite loss of regularity. The mode integrator
//! uses exact rotations on constant plateaus and an adaptive Runge–Kutta
//! step capped well below the oscillation period elsewhere.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::excision::nu_derivatives;
use crate::numerics::{lin_space, log_space, par_map};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Speeds.
// ---------------------------------------------------------------------------

/// A propagation speed `c(t)` with derivative access.
pub trait Speed: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// If the speed is exactly constant on `[t, end]`, the plateau end and
    /// value; lets the integrator use closed-form rotations there.
    fn plateau(&self, _t: f64) -> Option<(f64, f64)> {
        None
    }
}

/// Identically constant speed.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSpeed(pub f64);

impl Speed for ConstantSpeed {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
    fn plateau(&self, _t: f64) -> Option<(f64, f64)> {
        Some((f64::INFINITY, self.0))
    }
}

/// Speed defined by a pair of closures (no plateau information).
#[derive(Clone)]
pub struct FnSpeed {
    value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FnSpeed {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }
}

impl Speed for FnSpeed {
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (self.derivative)(t)
    }
}

// ---------------------------------------------------------------------------
// Speed classes.
// ---------------------------------------------------------------------------

/// Derivative envelope shape `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Theta {
    /// `θ(t) = ln(1/t)`.
    LogInverse,
    /// `θ(t) = t^{-p}`, `p > 0`.
    InversePower { p: f64 },
}

impl Theta {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Theta::LogInverse => -(t.ln()),
            Theta::InversePower { p } => t.powf(-p),
        }
    }
}

/// The class of speeds confined to `[μ1, μ2]` with `|c'(t)| ≤ C·θ(t)/t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedClass {
    pub mu1: f64,
    pub mu2: f64,
    pub theta: Theta,
    pub t_end: f64,
}

impl SpeedClass {
    /// Validates the band and probes `θ` for monotone divergence at `t → 0`.
    pub fn new(mu1: f64, mu2: f64, theta: Theta, t_end: f64) -> Result<Self> {
        if !(0.0 < mu1 && mu1 <= mu2) {
            return Err(Error::Validation(format!(
                "band must satisfy 0 < mu1 <= mu2, got [{mu1}, {mu2}]"
            )));
        }
        if !(t_end > 0.0) {
            return Err(Error::Validation("t_end must be positive".into()));
        }
        let probes = log_space(1e-15, t_end.min(0.3), 12);
        let mut prev = f64::INFINITY;
        for &t in &probes {
            let v = theta.eval(t);
            if !(v > 0.0) || v > prev * (1.0 + 1e-12) {
                return Err(Error::Validation(
                    "theta must be positive and monotone decreasing toward t_end".into(),
                ));
            }
            prev = v;
        }
        if theta.eval(1e-15) < 10.0 * theta.eval(t_end.min(0.3)) {
            return Err(Error::Validation(
                "theta must diverge as t approaches 0".into(),
            ));
        }
        Ok(Self {
            mu1,
            mu2,
            theta,
            t_end,
        })
    }
}

/// Composite sampling grid on `(0, T]`: log-spaced points resolving the
/// `t → 0` end plus a uniform sweep of the bulk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub points: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_min: 1e-9,
            points: 2000,
        }
    }
}

impl TimeGrid {
    pub fn build(&self, t_end: f64) -> Vec<f64> {
        let mut v = log_space(self.t_min, t_end, self.points / 2);
        v.extend(lin_space(self.t_min, t_end, self.points / 2));
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }
}

/// Band and derivative-envelope check of one speed against a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub pass: bool,
    /// Fitted envelope constant `sup t·|c'(t)|/θ(t)`.
    pub fitted_c: f64,
    /// Worst band violation `(t, c(t))`, if any.
    pub band_witness: Option<(f64, f64)>,
}

pub fn membership_check(c: &dyn Speed, class: &SpeedClass, grid: &TimeGrid) -> MembershipReport {
    let mut fitted_c = 0.0_f64;
    let mut band_witness: Option<(f64, f64)> = None;
    let mut worst_excess = 0.0;
    for &t in &grid.build(class.t_end) {
        let v = c.value(t);
        let excess = (class.mu1 - v).max(v - class.mu2);
        if excess > 1e-12 && excess > worst_excess {
            worst_excess = excess;
            band_witness = Some((t, v));
        }
        let dv = c.derivative(t).abs();
        if dv > 0.0 {
            let th = class.theta.eval(t);
            if th > 0.0 {
                fitted_c = fitted_c.max(t * dv / th);
            } else {
                fitted_c = f64::INFINITY;
            }
        }
    }
    MembershipReport {
        pass: band_witness.is_none() && fitted_c.is_finite(),
        fitted_c,
        band_witness,
    }
}

/// Class distance `sup|c1−c2| + sup (t²/θ(t))·|c1'−c2'|`, sampled.
pub fn d_c_metric(c1: &dyn Speed, c2: &dyn Speed, class: &SpeedClass, grid: &TimeGrid) -> f64 {
    let mut sup_val = 0.0_f64;
    let mut sup_der = 0.0_f64;
    for &t in &grid.build(class.t_end) {
        sup_val = sup_val.max((c1.value(t) - c2.value(t)).abs());
        let dd = (c1.derivative(t) - c2.derivative(t)).abs();
        if dd > 0.0 {
            let th = class.theta.eval(t);
            if th > 0.0 {
                sup_der = sup_der.max(t * t / th * dd);
            }
        }
    }
    sup_val + sup_der
}

// ---------------------------------------------------------------------------
// The resonant family.
// ---------------------------------------------------------------------------

/// Largest integer `n >= 0` with `n^p <= lambda`, robust against the rounding
/// of `powf` at exact powers.
fn floor_root(lambda: f64, p: i32) -> f64 {
    let mut n = lambda.powf(1.0 / p as f64).floor();
    while (n + 1.0).powi(p) <= lambda {
        n += 1.0;
    }
    while n > 0.0 && n.powi(p) > lambda {
        n -= 1.0;
    }
    n
}

/// The anchor times `(a_λ, b_λ) = (2π/(γλ))·(⌊λ^{1/4}⌋, ⌊λ^{1/2}⌋)`. Both
/// are integer multiples of the oscillation period `2π/(γλ)` by construction.
pub fn lambda_marks(lambda: f64, gamma: f64) -> (f64, f64) {
    let base = 2.0 * std::f64::consts::PI / (gamma * lambda);
    (
        base * floor_root(lambda, 4),
        base * floor_root(lambda, 2),
    )
}

/// Everything fixed once `(γ, T1, λ)` and the class are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivatorParams {
    pub gamma: f64,
    pub t1: f64,
    pub lambda: f64,
    pub a_mark: f64,
    pub b_mark: f64,
    pub theta_lambda: f64,
}

impl ActivatorParams {
    /// Validates `μ1 < γ² < μ2` and the strict ordering
    /// `0 < a_λ < 2a_λ < b_λ/2 < b_λ < T1`; a `λ` breaking the ordering is
    /// below the admissible threshold for these `(γ, T1)`.
    pub fn new(gamma: f64, t1: f64, lambda: f64, class: &SpeedClass) -> Result<Self> {
        if !(class.mu1 < gamma * gamma && gamma * gamma < class.mu2) {
            return Err(Error::Validation(format!(
                "plateau value γ² = {} outside the open band ({}, {})",
                gamma * gamma,
                class.mu1,
                class.mu2
            )));
        }
        if !(t1 > 0.0 && t1 < class.t_end) {
            return Err(Error::Validation(format!(
                "plateau time T1 = {t1} outside (0, {})",
                class.t_end
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::Validation("lambda must be positive".into()));
        }
        let (a_mark, b_mark) = lambda_marks(lambda, gamma);
        let ordered =
            0.0 < a_mark && 2.0 * a_mark < b_mark / 2.0 && b_mark < t1;
        if !ordered {
            return Err(Error::Validation(format!(
                "lambda = {lambda} below the admissible threshold: marks ({a_mark:.6e}, {b_mark:.6e}) \
                 break 0 < a < 2a < b/2 < b < {t1}"
            )));
        }
        let theta_lambda = class.theta.eval(b_mark).min(lambda.ln());
        Ok(Self {
            gamma,
            t1,
            lambda,
            a_mark,
            b_mark,
            theta_lambda,
        })
    }
}

/// Smallest integer `λ` admissible for `(γ, T1)` in the class. Admissibility
/// is not monotone in `λ` (the floors jump), so this is the first admissible
/// value, not a threshold above which everything passes.
pub fn min_admissible_lambda(gamma: f64, t1: f64, class: &SpeedClass) -> Option<f64> {
    let mut lambda = 2.0;
    while lambda <= 1e7 {
        if ActivatorParams::new(gamma, t1, lambda, class).is_ok() {
            return Some(lambda);
        }
        lambda += 1.0;
    }
    None
}

/// Ramp profile and its first two derivatives: `0` outside `[a, b]`,
/// `θ_λ/t` on `[2a, b/2]`, smoothly switched on over `[a, 2a]` and off over
/// `[b/2, b]` through the canonical rising cutoff.
pub fn epsilon_profile(t: f64, p: &ActivatorParams) -> (f64, f64, f64) {
    let (a, b, th) = (p.a_mark, p.b_mark, p.theta_lambda);
    if t <= a || t >= b {
        return (0.0, 0.0, 0.0);
    }
    let (cut, dcut, ddcut, wp) = if t < 2.0 * a {
        let (v, d1, d2) = nu_derivatives((t - a) / a);
        (v, d1, d2, 1.0 / a)
    } else if t <= b / 2.0 {
        (1.0, 0.0, 0.0, 1.0)
    } else {
        let (v, d1, d2) = nu_derivatives(2.0 * (b - t) / b);
        (v, d1, d2, -2.0 / b)
    };
    let base = th / t;
    let dbase = -th / (t * t);
    let ddbase = 2.0 * th / (t * t * t);
    let value = base * cut;
    let d1 = dbase * cut + base * dcut * wp;
    let d2 = ddbase * cut + 2.0 * dbase * dcut * wp + base * ddcut * wp * wp;
    (value, d1, d2)
}

/// The ramp value and first derivative.
pub fn epsilon_lambda(t: f64, p: &ActivatorParams) -> (f64, f64) {
    let (v, d1, _) = epsilon_profile(t, p);
    (v, d1)
}

/// The resonant speed built from a constant plateau `c_* = γ²`:
///
/// `c_λ(t) = γ² − ε/(4γλ)·sin(2γλt) − ε'/(8γ²λ²)·sin²(γλt)
///            − ε²/(64γ⁴λ²)·sin⁴(γλt)`.
///
/// Constant exactly where the ramp vanishes, so the integrator can rotate
/// through `[0, a_λ]` and `[b_λ, T]` in closed form.
#[derive(Debug, Clone, Copy)]
pub struct ActivatorSpeed {
    params: ActivatorParams,
}

impl ActivatorSpeed {
    pub fn new(params: ActivatorParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &ActivatorParams {
        &self.params
    }

    pub fn plateau_value(&self) -> f64 {
        self.params.gamma * self.params.gamma
    }
}

impl Speed for ActivatorSpeed {
    fn value(&self, t: f64) -> f64 {
        let p = &self.params;
        let (eps, deps, _) = epsilon_profile(t, p);
        if eps == 0.0 && deps == 0.0 {
            return self.plateau_value();
        }
        let (g, l) = (p.gamma, p.lambda);
        let s = (g * l * t).sin();
        let s2 = (2.0 * g * l * t).sin();
        self.plateau_value()
            - eps / (4.0 * g * l) * s2
            - deps / (8.0 * g * g * l * l) * s * s
            - eps * eps / (64.0 * g.powi(4) * l * l) * s.powi(4)
    }

    fn derivative(&self, t: f64) -> f64 {
        let p = &self.params;
        let (eps, deps, ddeps) = epsilon_profile(t, p);
        if eps == 0.0 && deps == 0.0 && ddeps == 0.0 {
            return 0.0;
        }
        let (g, l) = (p.gamma, p.lambda);
        let w = g * l;
        let s = (w * t).sin();
        let c = (w * t).cos();
        let s2 = (2.0 * w * t).sin();
        let c2 = (2.0 * w * t).cos();
        -(deps * s2 + 2.0 * w * eps * c2) / (4.0 * g * l)
            - (ddeps * s * s + w * deps * s2) / (8.0 * g * g * l * l)
            - (2.0 * eps * deps * s.powi(4) + 4.0 * w * eps * eps * s.powi(3) * c)
                / (64.0 * g.powi(4) * l * l)
    }

    fn plateau(&self, t: f64) -> Option<(f64, f64)> {
        if t < self.params.a_mark {
            Some((self.params.a_mark, self.plateau_value()))
        } else if t >= self.params.b_mark {
            Some((f64::INFINITY, self.plateau_value()))
        } else {
            None
        }
    }
}

/// A random member of the class built from smoothed random steps: plateaus
/// in `ln c` joined by the canonical rising cutoff. Steps sit away from
/// `t = 0` with widths bounded below, so the derivative envelope `θ(t)/t` is
/// met with room to spare, and levels stay strictly inside the band.
pub fn random_class_member(class: &SpeedClass, seed: u64) -> FnSpeed {
    use crate::excision::{nu, nu_derivatives};
    use crate::numerics::rng::SplitMix64;

    let mut rng = SplitMix64::new(seed.wrapping_mul(7919).wrapping_add(13));
    let (lo, hi) = (class.mu1.ln(), class.mu2.ln());
    let margin = 0.07 * (hi - lo);
    let (lo, hi) = (lo + margin, hi - margin);

    let n_steps = 2 + (rng.next_u64() % 3) as usize;
    let mut levels = vec![rng.uniform(lo, hi)];
    for _ in 0..n_steps {
        let span = (hi - lo) / 3.0;
        let next = (levels.last().unwrap() + rng.uniform(-span, span)).clamp(lo, hi);
        levels.push(next);
    }
    let t_end = class.t_end;
    let mut anchors: Vec<f64> = (0..n_steps)
        .map(|_| rng.uniform(0.15 * t_end, 0.72 * t_end))
        .collect();
    anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let steps: Vec<(f64, f64, f64)> = anchors
        .iter()
        .enumerate()
        .map(|(i, &t_i)| {
            let width = rng.uniform(0.12 * t_end, 0.2 * t_end);
            (t_i, width, levels[i + 1] - levels[i])
        })
        .collect();
    let y0 = levels[0];
    let steps2 = steps.clone();
    FnSpeed::new(
        move |t: f64| {
            let mut y = y0;
            for &(t_i, w, dy) in &steps {
                y += dy * nu((t - t_i) / w);
            }
            y.exp()
        },
        move |t: f64| {
            let mut y = y0;
            let mut dy_dt = 0.0;
            for &(t_i, w, dy) in &steps2 {
                let (v, d1, _) = nu_derivatives((t - t_i) / w);
                y += dy * v;
                dy_dt += dy * d1 / w;
            }
            y.exp() * dy_dt
        },
    )
}

/// Amplification exponent `φ(λ) = θ_λ/(32γ²)·ln(⌊λ^{1/2}⌋/⌊λ^{1/4}⌋)` with
/// `θ_λ = min(θ(b_λ), ln λ)`.
pub fn phi_rate(lambda: f64, gamma: f64, theta: &Theta) -> f64 {
    let (_, b_mark) = lambda_marks(lambda, gamma);
    let theta_lambda = theta.eval(b_mark).min(lambda.ln());
    let n2 = floor_root(lambda, 2);
    let n4 = floor_root(lambda, 4);
    theta_lambda / (32.0 * gamma * gamma) * (n2 / n4).ln()
}

// ---------------------------------------------------------------------------
// Mode integration.
// ---------------------------------------------------------------------------

/// One sampled point of a mode trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSample {
    pub t: f64,
    pub u: f64,
    pub du: f64,
}

impl ModeSample {
    /// `E = |u'|² + λ²|u|²`.
    pub fn energy(&self, lambda: f64) -> f64 {
        self.du * self.du + lambda * lambda * self.u * self.u
    }

    /// `E_c = |u'|² + c(t)·λ²|u|²`: the quantity whose growth the identity
    /// `dE_c/dt = c'λ²|u|²` controls, hence the one the Gronwall bound caps.
    pub fn weighted_energy(&self, c: &dyn Speed, lambda: f64) -> f64 {
        self.du * self.du + c.value(self.t) * lambda * lambda * self.u * self.u
    }
}

/// Solution of `u'' + c(t)·λ²·u = 0`, `u(0) = 0`, `u'(0) = 1`, with its
/// sampled history.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    pub lambda: f64,
    samples: Vec<ModeSample>,
}

impl ModeTrajectory {
    pub fn samples(&self) -> &[ModeSample] {
        &self.samples
    }

    pub fn final_state(&self) -> ModeSample {
        *self.samples.last().unwrap()
    }

    pub fn final_energy(&self) -> f64 {
        self.final_state().energy(self.lambda)
    }

    /// Smallest sampled energy with `t >= from`.
    pub fn inf_energy(&self, from: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.t >= from)
            .map(|s| s.energy(self.lambda))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup_energy(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.energy(self.lambda))
            .fold(0.0, f64::max)
    }
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate one oscillator mode with the given local error tolerance.
///
/// Constant plateaus advance by exact rotations (sampled a few times per
/// period so energy extrema are visible); everywhere else an adaptive
/// Dormand–Prince 5(4) step runs with the step capped at 1/20 of the local
/// oscillation period.
pub fn integrate_mode(
    c: &dyn Speed,
    lambda: f64,
    t_end: f64,
    tol: f64,
) -> Result<ModeTrajectory> {
    if !(lambda > 0.0) || !(t_end > 0.0) {
        return Err(Error::Validation("lambda and t_end must be positive".into()));
    }
    if !(tol >= 1e-13) {
        return Err(Error::Validation(format!(
            "tolerance {tol} below the trustworthy floor 1e-13"
        )));
    }
    let mut t = 0.0_f64;
    let mut u = 0.0_f64;
    let mut v = 1.0_f64;
    let mut samples = vec![ModeSample { t, u, du: v }];
    let max_steps = 50_000_000usize;
    let mut steps = 0usize;

    let rhs = |t: f64, u: f64, v: f64| -> (f64, f64) { (v, -c.value(t) * lambda * lambda * u) };

    let mut h_guess: Option<f64> = None;
    while t < t_end {
        steps += 1;
        if steps > max_steps {
            return Err(Error::Numerical(format!(
                "step budget exhausted at t = {t:.6e} (lambda = {lambda})"
            )));
        }
        // Closed-form rotation across an exact plateau.
        if let Some((end, cval)) = c.plateau(t) {
            let seg_end = end.min(t_end);
            if seg_end > t {
                let omega = lambda * cval.sqrt();
                // Sample at most a quarter period apart so energy extrema on
                // the plateau are captured.
                let max_dt = 0.25 * std::f64::consts::PI / omega;
                let mut remaining = seg_end - t;
                while remaining > 0.0 {
                    let dt = remaining.min(max_dt);
                    let (s, co) = ((omega * dt).sin(), (omega * dt).cos());
                    let nu_ = u * co + v / omega * s;
                    let nv = -u * omega * s + v * co;
                    u = nu_;
                    v = nv;
                    t += dt;
                    remaining = seg_end - t;
                    samples.push(ModeSample { t, u, du: v });
                    steps += 1;
                    if steps > max_steps {
                        return Err(Error::Numerical(format!(
                            "step budget exhausted at t = {t:.6e} (lambda = {lambda})"
                        )));
                    }
                }
                h_guess = None;
                continue;
            }
        }

        // Adaptive Runge-Kutta step.
        let cval = c.value(t).abs().max(1e-12);
        let h_cap = 2.0 * std::f64::consts::PI / (20.0 * lambda * cval.sqrt());
        let mut h = h_guess.unwrap_or(h_cap).min(h_cap).min(t_end - t);
        loop {
            let mut k = [[0.0_f64; 2]; 7];
            let (du0, dv0) = rhs(t, u, v);
            k[0] = [du0, dv0];
            for stage in 0..6 {
                let mut su = 0.0;
                let mut sv = 0.0;
                for j in 0..=stage {
                    su += DP_A[stage][j] * k[j][0];
                    sv += DP_A[stage][j] * k[j][1];
                }
                let (du, dv) = rhs(t + DP_C[stage] * h, u + h * su, v + h * sv);
                k[stage + 1] = [du, dv];
            }
            // Fifth-order solution is the last stage combination (FSAL form).
            let mut u5 = u;
            let mut v5 = v;
            for j in 0..6 {
                u5 += h * DP_A[5][j] * k[j][0];
                v5 += h * DP_A[5][j] * k[j][1];
            }
            let mut eu = 0.0;
            let mut ev = 0.0;
            for j in 0..7 {
                eu += DP_ERR[j] * k[j][0];
                ev += DP_ERR[j] * k[j][1];
            }
            eu *= h;
            ev *= h;
            let sc_u = tol / lambda + tol * u.abs().max(u5.abs());
            let sc_v = tol + tol * v.abs().max(v5.abs());
            let err = ((eu / sc_u).powi(2) + (ev / sc_v).powi(2)).sqrt() / 2.0_f64.sqrt();
            if err <= 1.0 || h <= 1e-15 * (1.0 + t) {
                t += h;
                u = u5;
                v = v5;
                samples.push(ModeSample { t, u, du: v });
                let factor = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    5.0
                };
                h_guess = Some((h * factor).min(h_cap));
                break;
            }
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 0.9);
            steps += 1;
            if steps > max_steps {
                return Err(Error::Numerical(format!(
                    "step budget exhausted at t = {t:.6e} (lambda = {lambda})"
                )));
            }
        }
    }
    Ok(ModeTrajectory { lambda, samples })
}

// ---------------------------------------------------------------------------
// Sweeps.
// ---------------------------------------------------------------------------

/// Growth classification of `log E_λ(T) / log λ` across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    Polynomial,
    Superpolynomial,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossScanRow {
    pub lambda: f64,
    pub skipped: bool,
    pub phi: f64,
    pub a_mark: f64,
    pub b_mark: f64,
    pub theta_lambda: f64,
    /// Class distance to the unperturbed plateau.
    pub d_c: f64,
    pub membership_pass: bool,
    pub fitted_envelope_c: f64,
    /// `inf_{t ∈ [δ, T]} E_λ(t)`.
    pub inf_energy: f64,
    pub log_energy_end: f64,
    pub log_energy_over_log_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossScanReport {
    pub gamma: f64,
    pub t1: f64,
    pub delta: f64,
    /// Sampling grid used for the class metric and membership fits.
    pub sampling: TimeGrid,
    pub rows: Vec<LossScanRow>,
    pub classification: GrowthClass,
}

impl LossScanReport {
    pub fn active_rows(&self) -> impl Iterator<Item = &LossScanRow> {
        self.rows.iter().filter(|r| !r.skipped)
    }
}

/// Sweep the resonant family over `lambdas`: build each speed, check class
/// membership, integrate its mode, and measure the energy amplification
/// against the rate `exp(2φ(λ))`. Inadmissible `λ` produce skipped rows, not
/// silent omissions.
pub fn activator_sweep(
    gamma: f64,
    t1: f64,
    class: &SpeedClass,
    lambdas: &[f64],
    delta: f64,
    tol: f64,
) -> Result<LossScanReport> {
    if !(delta > 0.0 && delta < class.t_end) {
        return Err(Error::Validation(format!(
            "delta = {delta} outside (0, {})",
            class.t_end
        )));
    }
    let grid = TimeGrid::default();
    let rows: Vec<Result<LossScanRow>> = par_map(lambdas, |&lambda| {
        let params = match ActivatorParams::new(gamma, t1, lambda, class) {
            Ok(p) => p,
            Err(_) => {
                return Ok(LossScanRow {
                    lambda,
                    skipped: true,
                    phi: f64::NAN,
                    a_mark: f64::NAN,
                    b_mark: f64::NAN,
                    theta_lambda: f64::NAN,
                    d_c: f64::NAN,
                    membership_pass: false,
                    fitted_envelope_c: f64::NAN,
                    inf_energy: f64::NAN,
                    log_energy_end: f64::NAN,
                    log_energy_over_log_lambda: f64::NAN,
                })
            }
        };
        let speed = ActivatorSpeed::new(params);
        let membership = membership_check(&speed, class, &grid);
        let plateau = ConstantSpeed(speed.plateau_value());
        let d_c = d_c_metric(&speed, &plateau, class, &grid);
        let trajectory = integrate_mode(&speed, lambda, class.t_end, tol)?;
        let phi = phi_rate(lambda, gamma, &class.theta);
        let e_end = trajectory.final_energy();
        Ok(LossScanRow {
            lambda,
            skipped: false,
            phi,
            a_mark: params.a_mark,
            b_mark: params.b_mark,
            theta_lambda: params.theta_lambda,
            d_c,
            membership_pass: membership.pass,
            fitted_envelope_c: membership.fitted_c,
            inf_energy: trajectory.inf_energy(delta),
            log_energy_end: e_end.ln(),
            log_energy_over_log_lambda: e_end.ln() / lambda.ln(),
        })
    });
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        out.push(r?);
    }
    out.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).unwrap());

    let ratios: Vec<f64> = out
        .iter()
        .filter(|r| !r.skipped)
        .map(|r| r.log_energy_over_log_lambda)
        .collect();
    let classification = if ratios.len() < 2 {
        GrowthClass::Inconclusive
    } else if ratios.windows(2).all(|w| w[1] > w[0] + 1e-12) {
        GrowthClass::Superpolynomial
    } else {
        let spread = ratios.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let scale = ratios.iter().map(|r| r.abs()).fold(0.0, f64::max);
        if spread <= 0.05 * scale + 1e-6 {
            GrowthClass::Polynomial
        } else {
            GrowthClass::Inconclusive
        }
    };
    Ok(LossScanReport {
        gamma,
        t1,
        delta,
        sampling: grid,
        rows: out,
        classification,
    })
}

// ---------------------------------------------------------------------------
// Cascade scans.
// ---------------------------------------------------------------------------

/// One mode of a cascade: frequency, data weight, and the speed driving it.
#[derive(Clone)]
pub struct CascadeMode {
    pub lambda: f64,
    pub weight: f64,
    pub speed: Arc<dyn Speed>,
}

/// Default super-polynomially decaying mode weights `exp(−√λ)`.
pub fn default_mode_weight(lambda: f64) -> f64 {
    (-lambda.sqrt()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeVerdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub lambda: f64,
    pub weight: f64,
    /// Unit-data mode energy `Ê(T)`.
    pub unit_energy_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeOrderResult {
    /// Weighted-sum exponent `m` of the scale `λ^{2m}·(|u'|² + λ²|u|²)`.
    pub m: f64,
    pub partial_sums: Vec<f64>,
    pub verdict: CascadeVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub rows: Vec<CascadeRow>,
    pub orders: Vec<CascadeOrderResult>,
    /// Affine fit slope of `ln Ê(T)` against `ln λ` (finite-loss indicator).
    pub energy_slope: f64,
}

fn tail_verdict(terms: &[f64]) -> CascadeVerdict {
    if terms.len() < 6 {
        return CascadeVerdict::Inconclusive;
    }
    let tail = &terms[terms.len() - terms.len() / 3 - 1..];
    if tail.iter().all(|&v| v <= 1e-280) {
        return CascadeVerdict::Convergent;
    }
    if tail.iter().any(|&v| !v.is_finite()) {
        return CascadeVerdict::Divergent;
    }
    let ratios: Vec<f64> = tail
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
        .collect();
    let r_max = ratios.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let r_min = ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if r_max <= 0.95 {
        CascadeVerdict::Convergent
    } else if r_min >= 1.05 {
        CascadeVerdict::Divergent
    } else {
        CascadeVerdict::Inconclusive
    }
}

/// Integrate every mode of the cascade and report, for each requested order
/// `m`, the truncated weighted sums `Σ λ^{2m}(|u'(T)|² + λ²|u(T)|²)` together
/// with a convergence/divergence verdict read off the term trend.
pub fn cascade_loss_scan(
    modes: &[CascadeMode],
    t_end: f64,
    m_list: &[f64],
    tol: f64,
) -> Result<CascadeReport> {
    if modes.is_empty() {
        return Err(Error::Validation("cascade needs at least one mode".into()));
    }
    if modes.windows(2).any(|w| w[0].lambda > w[1].lambda) {
        return Err(Error::Validation(
            "cascade frequencies must be nondecreasing".into(),
        ));
    }
    let energies: Vec<Result<f64>> = par_map(modes, |mode| {
        Ok(integrate_mode(mode.speed.as_ref(), mode.lambda, t_end, tol)?.final_energy())
    });
    let mut rows = Vec::with_capacity(modes.len());
    for (mode, e) in modes.iter().zip(energies) {
        rows.push(CascadeRow {
            lambda: mode.lambda,
            weight: mode.weight,
            unit_energy_end: e?,
        });
    }
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let log_e: Vec<f64> = rows.iter().map(|r| r.unit_energy_end.ln()).collect();
    let log_l: Vec<f64> = lambdas.iter().map(|l| l.ln()).collect();
    let energy_slope = crate::numerics::fit::fit_line(&log_l, &log_e)?.slope;

    let orders = m_list
        .iter()
        .map(|&m| {
            let terms: Vec<f64> = rows
                .iter()
                .map(|r| {
                    r.lambda.powf(2.0 * m) * r.weight * r.weight * r.unit_energy_end
                })
                .collect();
            let mut partial_sums = Vec::new();
            let mut acc = 0.0;
            let quarters: Vec<usize> = (1..=4).map(|q| q * terms.len() / 4).collect();
            for (i, &term) in terms.iter().enumerate() {
                acc += term;
                if quarters.contains(&(i + 1)) {
                    partial_sums.push(acc);
                }
            }
            CascadeOrderResult {
                m,
                partial_sums,
                verdict: tail_verdict(&terms),
            }
        })
        .collect();

    Ok(CascadeReport {
        rows,
        orders,
        energy_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad;

    fn log_class() -> SpeedClass {
        SpeedClass::new(0.5, 2.0, Theta::LogInverse, 1.0).unwrap()
    }

    #[test]
    fn marks_for_power_of_two() {
        // ⌊1024^{1/4}⌋ = 5, ⌊1024^{1/2}⌋ = 32.
        let (a, b) = lambda_marks(1024.0, 1.0);
        assert!((a - 10.0 * std::f64::consts::PI / 1024.0).abs() < 1e-15);
        assert!((b - std::f64::consts::PI / 16.0).abs() < 1e-15);
        assert!((a - 0.030679615757712823).abs() < 1e-12);
        assert!((b - 0.19634954084936207).abs() < 1e-12);
    }

    #[test]
    fn marks_scale_inversely_with_gamma() {
        let (a1, b1) = lambda_marks(4096.0, 1.0);
        let (a2, b2) = lambda_marks(4096.0, 2.0);
        assert!((a1 - 2.0 * a2).abs() < 1e-15);
        assert!((b1 - 2.0 * b2).abs() < 1e-15);
    }

    #[test]
    fn floor_root_handles_exact_powers() {
        assert_eq!(floor_root(4096.0, 4), 8.0);
        assert_eq!(floor_root(4096.0, 2), 64.0);
        assert_eq!(floor_root(1024.0, 4), 5.0);
        assert_eq!(floor_root(255.0, 2), 15.0);
        assert_eq!(floor_root(256.0, 2), 16.0);
    }

    #[test]
    fn lambda_256_breaks_the_strict_ordering() {
        // ⌊√256⌋ = 16 = 4·⌊256^{1/4}⌋, so 2a = b/2 exactly.
        let (a, b) = lambda_marks(256.0, 1.0);
        assert!((2.0 * a - b / 2.0).abs() < 1e-15);
        assert!(ActivatorParams::new(1.0, 0.5, 256.0, &log_class()).is_err());
    }

    #[test]
    fn admissible_sweep_parameters() {
        let class = log_class();
        for j in 10..=14 {
            let lambda = (2.0_f64).powi(j);
            let p = ActivatorParams::new(1.0, 0.5, lambda, &class).unwrap();
            assert!(0.0 < p.a_mark);
            assert!(2.0 * p.a_mark < p.b_mark / 2.0);
            assert!(p.b_mark < 0.5);
        }
    }

    #[test]
    fn gamma_band_validation() {
        let class = log_class();
        // γ² must lie strictly inside (0.5, 2).
        assert!(ActivatorParams::new(0.5, 0.5, 4096.0, &class).is_err());
        assert!(ActivatorParams::new(1.5, 0.5, 4096.0, &class).is_err());
        assert!(ActivatorParams::new(1.2, 0.5, 4096.0, &class).is_ok());
    }

    #[test]
    fn epsilon_branches() {
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        // Zero outside the ramp.
        assert_eq!(epsilon_lambda(p.a_mark / 2.0, &p), (0.0, 0.0));
        assert_eq!(epsilon_lambda(p.b_mark * 1.01, &p), (0.0, 0.0));
        // Pure 1/t branch in the middle.
        let mid = (2.0 * p.a_mark + p.b_mark / 2.0) / 2.0;
        let (v, d) = epsilon_lambda(mid, &p);
        assert!((v - p.theta_lambda / mid).abs() < 1e-14);
        assert!((d + p.theta_lambda / (mid * mid)).abs() < 1e-12);
        // Transition midpoint carries the half value.
        let t = 1.5 * p.a_mark;
        let (v, _) = epsilon_lambda(t, &p);
        assert!((v - 0.5 * p.theta_lambda / t).abs() < 1e-13);
    }

    #[test]
    fn epsilon_derivatives_match_finite_differences() {
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        let probes = lin_space(p.a_mark * 1.01, p.b_mark * 0.99, 200);
        for &t in &probes {
            let h = 1e-7 * t;
            let (_, d1, d2) = epsilon_profile(t, &p);
            let (vp, _, _) = epsilon_profile(t + h, &p);
            let (vm, _, _) = epsilon_profile(t - h, &p);
            let fd1 = (vp - vm) / (2.0 * h);
            assert!(
                (d1 - fd1).abs() <= 1e-4 * (1.0 + fd1.abs()),
                "d1 at t = {t}: {d1} vs {fd1}"
            );
            // The curvature check needs a wider stencil: the second
            // difference at h ~ 1e-7·t is dominated by rounding noise.
            let h2 = 1e-4 * t;
            let (_, d1p, _) = epsilon_profile(t + h2, &p);
            let (_, d1m, _) = epsilon_profile(t - h2, &p);
            let fd2 = (d1p - d1m) / (2.0 * h2);
            assert!(
                (d2 - fd2).abs() <= 1e-3 * (1.0 + fd2.abs()),
                "d2 at t = {t}: {d2} vs {fd2}"
            );
        }
    }

    #[test]
    fn theta_lambda_and_phi_reference_values() {
        // θ_λ(1024) = ln(1024/(64π)) and φ = θ_λ/32·ln(32/5), both evaluated
        // independently of the production formulas.
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        let expected_theta = (1024.0 / (64.0 * std::f64::consts::PI)).ln();
        assert!((p.theta_lambda - expected_theta).abs() < 1e-13);
        assert!((p.theta_lambda - 1.6278588363903811).abs() < 1e-12);
        let phi = phi_rate(1024.0, 1.0, &Theta::LogInverse);
        let expected_phi = expected_theta / 32.0 * (32.0_f64 / 5.0).ln();
        assert!((phi - expected_phi).abs() < 1e-15);
        assert!((phi - 0.09443097145594972).abs() < 1e-12);
    }

    #[test]
    fn phi_trivial_and_scaling_cases() {
        // Equal floors give a zero rate.
        let th = Theta::LogInverse;
        // λ = 17: ⌊17^{1/2}⌋ = 4, ⌊17^{1/4}⌋ = 2 — not equal; use a direct
        // construction instead: any λ < 16 has ⌊λ^{1/2}⌋ < 4. λ = 15 gives
        // floors (3, 1)... smallest equal-floor case is λ ∈ [1, 2): both 1.
        assert_eq!(phi_rate(1.5, 1.0, &th), 0.0);
        // Quartering under γ → 2γ at fixed θ_λ: a steep envelope keeps
        // θ(b) > ln λ for both marks, pinning θ_λ = ln λ on each side.
        let steep = Theta::InversePower { p: 1.0 };
        let lam = 1e6;
        let (_, b1) = lambda_marks(lam, 1.0);
        let (_, b2) = lambda_marks(lam, 2.0);
        assert!(steep.eval(b1) > lam.ln());
        assert!(steep.eval(b2) > lam.ln());
        let r = phi_rate(lam, 1.0, &steep) / phi_rate(lam, 2.0, &steep);
        assert!((r - 4.0).abs() < 1e-12);
    }

    #[test]
    fn activator_plateaus_equal_gamma_squared() {
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        let c = ActivatorSpeed::new(p);
        assert_eq!(c.value(p.a_mark * 0.5), 1.0);
        assert_eq!(c.value(p.b_mark), 1.0);
        assert_eq!(c.value(0.9), 1.0);
        assert_eq!(c.derivative(0.9), 0.0);
    }

    #[test]
    fn activator_derivative_matches_finite_differences() {
        let class = log_class();
        let p = ActivatorParams::new(1.1, 0.5, 2048.0, &class).unwrap();
        let c = ActivatorSpeed::new(p);
        let probes = lin_space(p.a_mark * 1.02, p.b_mark * 0.98, 300);
        for &t in &probes {
            let h = 1e-9;
            let fd = (c.value(t + h) - c.value(t - h)) / (2.0 * h);
            let d = c.derivative(t);
            assert!(
                (d - fd).abs() <= 1e-3 * (1.0 + fd.abs()),
                "at t = {t}: {d} vs {fd}"
            );
        }
    }

    #[test]
    fn activator_band_membership_at_reference_point() {
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        let c = ActivatorSpeed::new(p);
        let mid = (2.0 * p.a_mark + p.b_mark / 2.0) / 2.0;
        let v = c.value(mid);
        assert!((0.5..=2.0).contains(&v), "c at ramp midpoint = {v}");
        // Corrections are O(θ_λ/(λ·a_λ)) — small at this frequency.
        assert!((v - 1.0).abs() < 0.2);
    }

    #[test]
    fn integer_period_anchoring() {
        let class = log_class();
        for &lambda in &[1024.0, 2048.0, 16384.0] {
            let p = ActivatorParams::new(1.0, 0.5, lambda, &class).unwrap();
            assert!((p.gamma * lambda * p.a_mark).sin().abs() < 1e-9);
            assert!((p.gamma * lambda * p.b_mark).sin().abs() < 1e-9);
        }
    }

    #[test]
    fn membership_of_constant_and_unbounded_speeds() {
        let class = log_class();
        let grid = TimeGrid::default();
        let m = membership_check(&ConstantSpeed(1.0), &class, &grid);
        assert!(m.pass);
        assert_eq!(m.fitted_c, 0.0);
        // 2 + t^{-1/2} exceeds the band near 0.
        let bad = FnSpeed::new(
            |t: f64| 2.0 + t.powf(-0.5),
            |t: f64| -0.5 * t.powf(-1.5),
        );
        let m = membership_check(&bad, &class, &grid);
        assert!(!m.pass);
        assert!(m.band_witness.is_some());
    }

    #[test]
    fn membership_of_log_oscillation() {
        // c = 2 + sin(ln(1/t)) on (0, 0.1]: t·|c'| = |cos(ln(1/t))| ≤ 1 and
        // θ = ln(1/t) ≥ ln 10 there, so the fitted constant is well below 1.
        let class = SpeedClass::new(0.5, 3.5, Theta::LogInverse, 0.1).unwrap();
        let c = FnSpeed::new(
            |t: f64| 2.0 + (1.0 / t).ln().sin(),
            |t: f64| -(1.0 / t).ln().cos() / t,
        );
        let m = membership_check(&c, &class, &TimeGrid::default());
        assert!(m.pass);
        assert!(m.fitted_c <= 1.01, "fitted C = {}", m.fitted_c);
    }

    #[test]
    fn metric_basics() {
        let class = log_class();
        let grid = TimeGrid::default();
        let c1 = ConstantSpeed(1.0);
        assert_eq!(d_c_metric(&c1, &c1, &class, &grid), 0.0);
        let c2 = ConstantSpeed(1.2);
        assert!((d_c_metric(&c1, &c2, &class, &grid) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn metric_to_plateau_decreases_along_the_sweep() {
        let class = log_class();
        let grid = TimeGrid::default();
        let mut prev = f64::INFINITY;
        for j in 10..=14 {
            let lambda = (2.0_f64).powi(j);
            let p = ActivatorParams::new(1.0, 0.5, lambda, &class).unwrap();
            let c = ActivatorSpeed::new(p);
            let d = d_c_metric(&c, &ConstantSpeed(1.0), &class, &grid);
            assert!(d < prev, "d_C not decreasing at λ = {lambda}: {d} vs {prev}");
            prev = d;
        }
    }

    #[test]
    fn rotation_segment_is_closed_form() {
        // c ≡ 1, λ = 1000: u = sin(λt)/λ, u' = cos(λt), E ≡ 1.
        let lambda = 1000.0;
        let traj = integrate_mode(&ConstantSpeed(1.0), lambda, 1.0, 1e-9).unwrap();
        for s in traj.samples() {
            let exact_u = (lambda * s.t).sin() / lambda;
            let exact_v = (lambda * s.t).cos();
            assert!((s.u - exact_u).abs() < 1e-10);
            assert!((s.du - exact_v).abs() < 1e-10);
            assert!((s.energy(lambda) - 1.0).abs() < 1e-10);
        }
        assert!((traj.final_state().t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oscillating_energy_with_nonunit_plateau() {
        // c ≡ 4 (γ = 2): E(t) = cos²(2λt) + sin²(2λt)/4 swings in [1/4, 1].
        let lambda = 10.0;
        let traj = integrate_mode(&ConstantSpeed(4.0), lambda, 1.0, 1e-10).unwrap();
        for s in traj.samples() {
            let e = s.energy(lambda);
            let expected = (2.0 * lambda * s.t).cos().powi(2)
                + (2.0 * lambda * s.t).sin().powi(2) / 4.0;
            assert!((e - expected).abs() < 1e-9, "t = {}", s.t);
        }
        assert!(traj.inf_energy(0.0) < 0.2501);
        assert!(traj.sup_energy() > 0.9999);
    }

    #[test]
    fn adaptive_path_matches_rotation_path() {
        // Same constant speed, once with and once without the plateau hint.
        let lambda = 300.0;
        let hinted = integrate_mode(&ConstantSpeed(1.3), lambda, 0.7, 1e-10).unwrap();
        let blind = integrate_mode(
            &FnSpeed::new(|_| 1.3, |_| 0.0),
            lambda,
            0.7,
            1e-10,
        )
        .unwrap();
        let a = hinted.final_state();
        let b = blind.final_state();
        assert!((a.u - b.u).abs() < 1e-7 / lambda + 1e-9 * a.u.abs());
        assert!((a.du - b.du).abs() < 1e-6);
    }

    #[test]
    fn gronwall_bound_on_smooth_member() {
        // c = 2 + sin(ln(1/t)) clipped to start at t0 > 0 (evaluated there
        // below t0): the energy identity gives E_c(t) ≤ exp(∫|c'|/c).
        let t0 = 1e-6;
        let c = FnSpeed::new(
            move |t: f64| 2.0 + (1.0 / t.max(t0)).ln().sin(),
            move |t: f64| {
                if t <= t0 {
                    0.0
                } else {
                    -(1.0 / t).ln().cos() / t
                }
            },
        );
        let lambda = 50.0;
        let traj = integrate_mode(&c, lambda, 1.0, 1e-10).unwrap();
        for idx in (0..traj.samples().len()).step_by(97) {
            let s = traj.samples()[idx];
            if s.t < 1e-3 {
                continue;
            }
            let integral = quad::integrate(
                |r| c.derivative(r).abs() / c.value(r),
                0.0,
                s.t,
                1e-9,
                &[],
            )
            .unwrap();
            let e = s.weighted_energy(&c, lambda);
            assert!(
                e <= integral.exp() + 1e-6,
                "t = {}: E = {e}, bound = {}",
                s.t,
                integral.exp()
            );
        }
    }

    #[test]
    fn random_members_stay_in_class() {
        let class = log_class();
        let grid = TimeGrid::default();
        for seed in 0..20 {
            let c = random_class_member(&class, seed);
            let m = membership_check(&c, &class, &grid);
            assert!(m.pass, "seed {seed}: witness {:?}", m.band_witness);
            assert!(m.fitted_c.is_finite());
            // Derivative closure consistent with the value closure.
            for &t in &[0.2, 0.35, 0.5, 0.8] {
                let h = 1e-7;
                let fd = (c.value(t + h) - c.value(t - h)) / (2.0 * h);
                assert!((c.derivative(t) - fd).abs() <= 1e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn energy_identity_integrated_along_trajectory() {
        let class = log_class();
        let p = ActivatorParams::new(1.0, 0.5, 1024.0, &class).unwrap();
        let speed = ActivatorSpeed::new(p);
        let lambda = 1024.0;
        let traj = integrate_mode(&speed, lambda, 1.0, 1e-10).unwrap();
        // d/dt(|u'|² + c λ²|u|²) = c' λ² |u|²: integrate the right side with
        // the trapezoid rule over the dense samples and compare.
        let s = traj.samples();
        let e_c = |s: &ModeSample| s.du * s.du + speed.value(s.t) * lambda * lambda * s.u * s.u;
        let mut integral = 0.0;
        for w in s.windows(2) {
            let f0 = speed.derivative(w[0].t) * lambda * lambda * w[0].u * w[0].u;
            let f1 = speed.derivative(w[1].t) * lambda * lambda * w[1].u * w[1].u;
            integral += 0.5 * (f0 + f1) * (w[1].t - w[0].t);
        }
        let lhs = e_c(s.last().unwrap()) - e_c(&s[0]);
        assert!(
            (lhs - integral).abs() <= 1e-4 * (1.0 + lhs.abs()),
            "identity residual: {lhs} vs {integral}"
        );
    }

    #[test]
    fn sweep_rows_skipped_when_inadmissible() {
        let class = log_class();
        let report = activator_sweep(1.0, 0.5, &class, &[4.0, 16.0, 64.0], 0.6, 1e-9).unwrap();
        assert!(report.rows.iter().all(|r| r.skipped));
        assert_eq!(report.classification, GrowthClass::Inconclusive);
    }

    #[test]
    fn no_activation_means_flat_ratio() {
        // Plateau-only cascade: energies stay equal, verdicts convergent.
        let c: Arc<dyn Speed> = Arc::new(ConstantSpeed(1.0));
        let modes: Vec<CascadeMode> = (1..=10)
            .map(|i| CascadeMode {
                lambda: (2.0_f64).powi(i),
                weight: default_mode_weight((2.0_f64).powi(i)),
                speed: c.clone(),
            })
            .collect();
        let report = cascade_loss_scan(&modes, 1.0, &[1.0, 0.0, -1.0], 1e-9).unwrap();
        for row in &report.rows {
            assert!((row.unit_energy_end - 1.0).abs() < 1e-8);
        }
        assert!(report.energy_slope.abs() < 1e-6);
        for order in &report.orders {
            assert_eq!(
                order.verdict,
                CascadeVerdict::Convergent,
                "m = {}",
                order.m
            );
        }
    }

    #[test]
    fn per_mode_activator_cascade_diverges_at_order_zero() {
        // Resonant speed tuned to each mode: unit-data energies grow without
        // bound along the sequence, so the order-0 terms trend divergent
        // while a negative order stays summable.
        let class = log_class();
        let modes: Vec<CascadeMode> = (10..=18)
            .map(|j| {
                let lambda = (2.0_f64).powi(j);
                let params = ActivatorParams::new(1.0, 0.5, lambda, &class).unwrap();
                CascadeMode {
                    lambda,
                    weight: 1.0,
                    speed: Arc::new(ActivatorSpeed::new(params)),
                }
            })
            .collect();
        let report = cascade_loss_scan(&modes, 1.0, &[0.0, -1.0], 1e-9).unwrap();
        assert!(report
            .rows
            .windows(2)
            .all(|w| w[1].unit_energy_end > w[0].unit_energy_end));
        assert!(report.energy_slope > 0.0);
        let m0 = report.orders.iter().find(|o| o.m == 0.0).unwrap();
        assert_eq!(m0.verdict, CascadeVerdict::Divergent);
        let m_neg = report.orders.iter().find(|o| o.m == -1.0).unwrap();
        assert_eq!(m_neg.verdict, CascadeVerdict::Convergent);
    }

    #[test]
    fn cascade_rejects_decreasing_frequencies() {
        let c: Arc<dyn Speed> = Arc::new(ConstantSpeed(1.0));
        let modes = vec![
            CascadeMode {
                lambda: 4.0,
                weight: 1.0,
                speed: c.clone(),
            },
            CascadeMode {
                lambda: 2.0,
                weight: 1.0,
                speed: c,
            },
        ];
        assert!(cascade_loss_scan(&modes, 1.0, &[0.0], 1e-9).is_err());
    }

    #[test]
    fn phi_over_log_lambda_increases_dyadically() {
        let th = Theta::LogInverse;
        let mut prev = 0.0;
        for j in 10..=20 {
            let lambda = (2.0_f64).powi(j);
            let r = phi_rate(lambda, 1.0, &th) / lambda.ln();
            assert!(r > prev, "ratio not increasing at λ = 2^{j}");
            prev = r;
        }
    }
}
