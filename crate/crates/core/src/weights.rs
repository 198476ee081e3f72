//! Weight functions on the real line and the axioms a phase-space metric
//! imposes on them.
//!
//! The admissible family is `⟨x⟩^κ = (1+x²)^{κ/2}` for `κ ∈ [0, 1]`, plus the
//! constant weight `1`. Every axiom check is sampled (a deterministic grid
//! plus seeded random pairs), never symbolic; reports carry the sample spec,
//! fitted constants and the worst violating point so runs are reproducible.

use serde::{Deserialize, Serialize};

use crate::numerics::rng::SplitMix64;
use crate::{Error, Result};

/// `⟨x⟩ = (1 + x²)^{1/2}`.
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// A weight function: either the polynomial bracket `⟨x⟩^κ` or the constant 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightSpec {
    /// `⟨x⟩^κ` with `κ ∈ [0, 1]`.
    PolynomialBracket { kappa: f64 },
    /// Identically one.
    ConstantOne,
}

impl WeightSpec {
    /// Bracket weight `⟨x⟩^κ`; `κ` outside `[0, 1]` breaks sub-linearity and
    /// is rejected.
    pub fn bracket_pow(kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) || !kappa.is_finite() {
            return Err(Error::Validation(format!(
                "weight exponent must lie in [0, 1], got {kappa}"
            )));
        }
        Ok(WeightSpec::PolynomialBracket { kappa })
    }

    pub fn one() -> Self {
        WeightSpec::ConstantOne
    }

    pub fn kappa(&self) -> f64 {
        match self {
            WeightSpec::PolynomialBracket { kappa } => *kappa,
            WeightSpec::ConstantOne => 0.0,
        }
    }

    /// Evaluate the weight; always `>= 1` and nondecreasing in `|x|`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WeightSpec::PolynomialBracket { kappa } => (1.0 + x * x).powf(kappa / 2.0),
            WeightSpec::ConstantOne => 1.0,
        }
    }

    /// Closed-form first derivative.
    pub fn deriv(&self, x: f64) -> f64 {
        match self {
            WeightSpec::PolynomialBracket { kappa } => {
                kappa * x * (1.0 + x * x).powf(kappa / 2.0 - 1.0)
            }
            WeightSpec::ConstantOne => 0.0,
        }
    }

    /// Closed-form second derivative.
    pub fn deriv2(&self, x: f64) -> f64 {
        match self {
            WeightSpec::PolynomialBracket { kappa } => {
                let q = 1.0 + x * x;
                kappa * q.powf(kappa / 2.0 - 1.0)
                    + kappa * (kappa - 2.0) * x * x * q.powf(kappa / 2.0 - 2.0)
            }
            WeightSpec::ConstantOne => 0.0,
        }
    }
}

/// The pair `(ω, Φ)`: `ω` weights the equation's ellipticity, `Φ` the metric.
/// The calculus needs `ω ≤ Φ` pointwise; that is checked, not assumed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub omega: WeightSpec,
    pub phi: WeightSpec,
}

impl WeightPair {
    pub fn new(omega: WeightSpec, phi: WeightSpec) -> Self {
        Self { omega, phi }
    }

    /// `⟨x⟩^κ1, ⟨x⟩^κ2` shorthand.
    pub fn brackets(kappa1: f64, kappa2: f64) -> Result<Self> {
        Ok(Self::new(
            WeightSpec::bracket_pow(kappa1)?,
            WeightSpec::bracket_pow(kappa2)?,
        ))
    }
}

/// How the axiom checks sample the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    /// Samples cover `|x|, |y| <= radius`.
    pub radius: f64,
    /// Deterministic grid resolution per axis.
    pub grid_points: usize,
    /// Random pairs drawn per two-point axiom.
    pub random_pairs: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            radius: 1e3,
            grid_points: 201,
            random_pairs: 10_000,
            seed: 1,
        }
    }
}

/// Fitted constants reported per axiom. Absent entries do not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomConstants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(rename = "C")]
    pub c: f64,
}

/// Worst violating (or extremal) sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub pass: bool,
    pub violations: usize,
    pub constants: AxiomConstants,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub sampling: SampleSpec,
}

const REL_TOL: f64 = 1e-12;
/// Fitted constants must grow by at most this factor when the sample radius
/// doubles, else the axiom is flagged as unstable.
const STABILITY_FACTOR: f64 = 1.05;

fn grid(radius: f64, n: usize) -> Vec<f64> {
    crate::numerics::lin_space(-radius, radius, n.max(3))
}

/// Keep the violation whose `|x|` is smallest (deterministic tie-break).
fn worse(current: &mut Option<Witness>, cand: Witness) {
    let replace = match current {
        None => true,
        Some(w) => (cand.x.abs(), cand.x) < (w.x.abs(), w.x),
    };
    if replace {
        *current = Some(cand);
    }
}

fn check_sublinear(w: WeightSpec, spec: &SampleSpec) -> (f64, usize, Option<Witness>) {
    let mut c = f64::NEG_INFINITY;
    let mut violations = 0;
    let mut witness = None;
    for x in grid(spec.radius, spec.grid_points) {
        let v = w.eval(x);
        c = c.max(v / (1.0 + x.abs()));
        if v < 1.0 - REL_TOL {
            violations += 1;
            worse(
                &mut witness,
                Witness {
                    x,
                    y: None,
                    lhs: v,
                    rhs: 1.0,
                },
            );
        }
    }
    (c, violations, witness)
}

/// Largest two-sided ratio `Φ(x)/Φ(y)` over pairs with `|x−y| <= r·Φ(y)`.
fn slowly_varying_constant(w: WeightSpec, r: f64, radius: f64, spec: &SampleSpec) -> (f64, Option<Witness>) {
    let mut rng = SplitMix64::new(spec.seed ^ 0x5bd1);
    let mut c: f64 = 1.0;
    let mut witness = None;
    for _ in 0..spec.random_pairs {
        let y = rng.uniform(-radius, radius);
        let x = y + rng.uniform(-1.0, 1.0) * r * w.eval(y);
        let ratio = w.eval(x) / w.eval(y);
        let two_sided = ratio.max(1.0 / ratio);
        if two_sided > c {
            c = two_sided;
            witness = Some(Witness {
                x,
                y: Some(y),
                lhs: w.eval(x),
                rhs: w.eval(y),
            });
        }
    }
    (c, witness)
}

/// Smallest constant with `Φ(x+y) <= C·Φ(x)(1+|y|)^s` over sampled pairs.
fn temperate_constant(w: WeightSpec, s: f64, radius: f64, spec: &SampleSpec) -> (f64, Option<Witness>) {
    let mut rng = SplitMix64::new(spec.seed ^ 0x7e3a);
    let mut c = f64::NEG_INFINITY;
    let mut witness = None;
    for _ in 0..spec.random_pairs {
        let x = rng.uniform(-radius, radius);
        let y = rng.uniform(-radius, radius);
        let ratio = w.eval(x + y) / (w.eval(x) * (1.0 + y.abs()).powf(s));
        if ratio > c {
            c = ratio;
            witness = Some(Witness {
                x,
                y: Some(y),
                lhs: w.eval(x + y),
                rhs: w.eval(x) * (1.0 + y.abs()).powf(s),
            });
        }
    }
    (c, witness)
}

fn check_subadditive(w: WeightSpec, spec: &SampleSpec) -> (usize, Option<Witness>) {
    let mut rng = SplitMix64::new(spec.seed ^ 0x11c9);
    let mut violations = 0;
    let mut witness = None;
    let check = |x: f64, y: f64, violations: &mut usize, witness: &mut Option<Witness>| {
        let upper = w.eval(x) + w.eval(y);
        let mid = w.eval(x + y);
        let lower = (w.eval(x) - w.eval(y)).abs();
        if mid > upper * (1.0 + REL_TOL) {
            *violations += 1;
            worse(
                witness,
                Witness {
                    x,
                    y: Some(y),
                    lhs: mid,
                    rhs: upper,
                },
            );
        }
        if lower > mid * (1.0 + REL_TOL) {
            *violations += 1;
            worse(
                witness,
                Witness {
                    x,
                    y: Some(y),
                    lhs: lower,
                    rhs: mid,
                },
            );
        }
    };
    for _ in 0..spec.random_pairs {
        let x = rng.uniform(-spec.radius, spec.radius);
        let y = rng.uniform(-spec.radius, spec.radius);
        check(x, y, &mut violations, &mut witness);
    }
    // Deterministic coarse grid on top of the random pairs.
    let g = grid(spec.radius, 41);
    for &x in &g {
        for &y in &g {
            check(x, y, &mut violations, &mut witness);
        }
    }
    (violations, witness)
}

/// Finite-difference derivative bound: `|Δ^β Φ(x)| <= C·Φ(x)·⟨x⟩^{−β}`,
/// β = 1, 2, with step `h = max(1e-4, 1e-4·⟨x⟩)`.
fn derivative_bound_constant(w: WeightSpec, radius: f64, spec: &SampleSpec, h_scale: f64) -> (f64, Option<Witness>) {
    let mut c = f64::NEG_INFINITY;
    let mut witness = None;
    for x in grid(radius, spec.grid_points) {
        let h = (1e-4_f64).max(h_scale * bracket(x));
        let d1 = (w.eval(x + h) - w.eval(x - h)).abs() / (2.0 * h);
        let d2 = (w.eval(x + h) - 2.0 * w.eval(x) + w.eval(x - h)).abs() / (h * h);
        for (order, d) in [(1, d1), (2, d2)] {
            let ratio = d * bracket(x).powi(order) / w.eval(x);
            if ratio > c {
                c = ratio;
                witness = Some(Witness {
                    x,
                    y: None,
                    lhs: d,
                    rhs: w.eval(x) / bracket(x).powi(order),
                });
            }
        }
    }
    (c, witness)
}

fn check_scaling(w: WeightSpec, spec: &SampleSpec) -> (usize, Option<Witness>) {
    let mut rng = SplitMix64::new(spec.seed ^ 0x3d27);
    let mut violations = 0;
    let mut witness = None;
    for i in 0..spec.random_pairs {
        let x = rng.uniform(-spec.radius, spec.radius);
        let a = if i % 2 == 0 {
            rng.next_f64() // [0, 1)
        } else {
            1.0 + rng.uniform(0.0, 99.0)
        };
        let (lhs, rhs) = if a <= 1.0 {
            (a * w.eval(x), w.eval(a * x))
        } else {
            (w.eval(a * x), a * w.eval(x))
        };
        if lhs > rhs * (1.0 + REL_TOL) {
            violations += 1;
            worse(
                &mut witness,
                Witness {
                    x,
                    y: Some(a),
                    lhs,
                    rhs,
                },
            );
        }
    }
    (violations, witness)
}

fn merge_fit(a: (f64, Option<Witness>), b: (f64, Option<Witness>)) -> (f64, Option<Witness>) {
    if a.0 >= b.0 {
        a
    } else {
        b
    }
}

/// Run every axiom check for the pair `(ω, Φ)`.
///
/// Produces one report per axiom — sub-linearity, slow variation, temperance,
/// subadditivity, the derivative bound, scaling — plus the `ω ≤ Φ` dominance
/// check. Constants are the tightest fitted over the sample set; for the
/// fitted-constant axioms `pass` additionally requires the constant to be
/// stable when the sample radius (or step) is refined.
pub fn check_weight_axioms(pair: &WeightPair, spec: &SampleSpec) -> Result<Vec<AxiomReport>> {
    if !(spec.radius > 0.0) || spec.grid_points < 3 || spec.random_pairs == 0 {
        return Err(Error::Validation("degenerate sample spec".into()));
    }
    let both = [pair.omega, pair.phi];
    let mut reports = Vec::with_capacity(7);

    // (sub-linear)
    {
        let mut c = f64::NEG_INFINITY;
        let mut violations = 0;
        let mut witness = None;
        for w in both {
            let (cw, vw, ww) = check_sublinear(w, spec);
            c = c.max(cw);
            violations += vw;
            if let Some(wt) = ww {
                worse(&mut witness, wt);
            }
        }
        reports.push(AxiomReport {
            axiom: "sublinear".into(),
            pass: violations == 0 && c.is_finite(),
            violations,
            constants: AxiomConstants {
                r: None,
                s: None,
                c,
            },
            witness,
            sampling: *spec,
        });
    }

    // (slowly varying), r = 1/2; stability against radius doubling.
    {
        let r = 0.5;
        let mut fit = (f64::NEG_INFINITY, None);
        let mut stable = true;
        for w in both {
            let half = slowly_varying_constant(w, r, spec.radius / 2.0, spec);
            let full = slowly_varying_constant(w, r, spec.radius, spec);
            stable &= full.0 <= half.0 * STABILITY_FACTOR + REL_TOL;
            fit = merge_fit(fit, full);
        }
        reports.push(AxiomReport {
            axiom: "slowly-varying".into(),
            pass: stable && fit.0.is_finite(),
            violations: if stable { 0 } else { 1 },
            constants: AxiomConstants {
                r: Some(r),
                s: None,
                c: fit.0,
            },
            witness: fit.1,
            sampling: *spec,
        });
    }

    // (temperate), s fixed to the weight's own exponent.
    {
        let mut fit = (f64::NEG_INFINITY, None);
        let mut stable = true;
        let mut s_used: f64 = 0.0;
        for w in both {
            let s = w.kappa();
            s_used = s_used.max(s);
            let half = temperate_constant(w, s, spec.radius / 2.0, spec);
            let full = temperate_constant(w, s, spec.radius, spec);
            stable &= full.0 <= half.0 * STABILITY_FACTOR + REL_TOL;
            fit = merge_fit(fit, full);
        }
        reports.push(AxiomReport {
            axiom: "temperate".into(),
            pass: stable && fit.0.is_finite(),
            violations: if stable { 0 } else { 1 },
            constants: AxiomConstants {
                r: None,
                s: Some(s_used),
                c: fit.0,
            },
            witness: fit.1,
            sampling: *spec,
        });
    }

    // (subadditive): two-sided triangle inequality, zero tolerance.
    {
        let mut violations = 0;
        let mut witness = None;
        for w in both {
            let (v, wt) = check_subadditive(w, spec);
            violations += v;
            if let Some(wt) = wt {
                worse(&mut witness, wt);
            }
        }
        reports.push(AxiomReport {
            axiom: "subadditive".into(),
            pass: violations == 0,
            violations,
            constants: AxiomConstants {
                r: None,
                s: None,
                c: 1.0,
            },
            witness,
            sampling: *spec,
        });
    }

    // (derivative-bound): finite differences of orders 1, 2; stability under
    // halving the step.
    {
        let mut fit = (f64::NEG_INFINITY, None);
        let mut stable = true;
        for w in both {
            let coarse = derivative_bound_constant(w, spec.radius, spec, 1e-4);
            let fine = derivative_bound_constant(w, spec.radius, spec, 5e-5);
            stable &= (fine.0 - coarse.0).abs() <= 0.02 * coarse.0.abs() + 1e-9;
            fit = merge_fit(fit, fine);
        }
        reports.push(AxiomReport {
            axiom: "derivative-bound".into(),
            pass: stable && fit.0.is_finite(),
            violations: if stable { 0 } else { 1 },
            constants: AxiomConstants {
                r: None,
                s: None,
                c: fit.0,
            },
            witness: fit.1,
            sampling: *spec,
        });
    }

    // (scaling): exact inequalities on both sides of a = 1.
    {
        let mut violations = 0;
        let mut witness = None;
        for w in both {
            let (v, wt) = check_scaling(w, spec);
            violations += v;
            if let Some(wt) = wt {
                worse(&mut witness, wt);
            }
        }
        reports.push(AxiomReport {
            axiom: "scaling".into(),
            pass: violations == 0,
            violations,
            constants: AxiomConstants {
                r: None,
                s: None,
                c: 1.0,
            },
            witness,
            sampling: *spec,
        });
    }

    // ω ≤ Φ dominance.
    {
        let mut violations = 0;
        let mut witness = None;
        for x in grid(spec.radius, spec.grid_points.max(1001)) {
            let (o, p) = (pair.omega.eval(x), pair.phi.eval(x));
            if o > p * (1.0 + REL_TOL) {
                violations += 1;
                worse(
                    &mut witness,
                    Witness {
                        x,
                        y: None,
                        lhs: o,
                        rhs: p,
                    },
                );
            }
        }
        reports.push(AxiomReport {
            axiom: "dominance".into(),
            pass: violations == 0,
            violations,
            constants: AxiomConstants {
                r: None,
                s: None,
                c: 1.0,
            },
            witness,
            sampling: *spec,
        });
    }

    Ok(reports)
}
