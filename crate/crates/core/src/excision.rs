//! Excision of the time singularity and the majorants controlling it.
//!
//! Near `t = 0` the symbol `a(t,x)⟨ξ⟩_k²` is replaced by the regular
//! `ω(x)²⟨ξ⟩_k²` through a smooth cutoff in the scale variable
//! `u = t·Φ(x)·⟨ξ⟩_k`. The difference and the first-order remainder are
//! dominated by explicit majorants whose time integral is logarithmic in
//! `Φ(x)⟨ξ⟩_k`; those integral bounds are what the loss-of-derivatives law
//! ultimately rests on, and they are checked here by adaptive quadrature.

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientField;
use crate::numerics::{log_space, par_map, quad};
use crate::phasespace::{xi_bracket_unchecked, PhaseParams};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Canonical smooth transition.
//
// rise(s) = e(s)/(e(s)+e(1-s)) with e(s) = exp(-1/s): 0 for s <= 0, 1 for
// s >= 1, strictly increasing between, C^∞, symmetric about s = 1/2.
// Implemented through the ratio R = exp(g), g(s) = 1/s - 1/(1-s), so nothing
// underflows before it should.
// ---------------------------------------------------------------------------

fn rise_raw(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let g = 1.0 / s - 1.0 / (1.0 - s);
    if g > 700.0 {
        return (0.0, 0.0, 0.0);
    }
    if g < -700.0 {
        return (1.0, 0.0, 0.0);
    }
    let r = g.exp();
    let gp = -1.0 / (s * s) - 1.0 / ((1.0 - s) * (1.0 - s));
    let gpp = 2.0 / (s * s * s) - 2.0 / ((1.0 - s) * (1.0 - s) * (1.0 - s));
    // Work with q = 1/(1+R) and p = R/(1+R); every product below stays in
    // range even when R itself is near overflow.
    let q = 1.0 / (1.0 + r);
    let p = 1.0 - q;
    let value = q;
    // d/ds (1+R)^{-1} = -g'·R/(1+R)² = -g'·p·q
    let d1 = -gp * p * q;
    let d2 = p * q * (-gpp - gp * gp + 2.0 * gp * gp * p);
    (value, d1, d2)
}

/// Rising cutoff `ν`: 0 on `(-∞, 0]`, 1 on `[1, ∞)`, smooth and monotone.
pub fn nu(r: f64) -> f64 {
    rise_raw(r).0
}

/// `ν` together with its first two derivatives.
pub fn nu_derivatives(r: f64) -> (f64, f64, f64) {
    rise_raw(r)
}

/// Falling cutoff `φ`: 1 on `(-∞, 1]`, 0 on `[2, ∞)`, smooth and monotone.
/// Built as `ν(2 − r)`, so `φ(1.5) = 1/2` exactly by symmetry.
pub fn smooth_step(r: f64) -> f64 {
    rise_raw(2.0 - r).0
}

/// `φ` and its first derivative.
pub fn smooth_step_deriv(r: f64) -> (f64, f64) {
    let (v, d1, _) = rise_raw(2.0 - r);
    (v, -d1)
}

// ---------------------------------------------------------------------------
// Excised symbol and characteristic root.
// ---------------------------------------------------------------------------

/// `ã(t,x,ξ) = φ(u)·ω²⟨ξ⟩_k² + (1−φ(u))·a(t,x)⟨ξ⟩_k²`, `u = tΦ(x)⟨ξ⟩_k`.
///
/// Equal to the plain symbol where `u >= 2`, to the weight square where
/// `u <= 1`, a convex combination between.
#[derive(Debug, Clone)]
pub struct ExcisedSymbol {
    field: CoefficientField,
    params: PhaseParams,
}

impl ExcisedSymbol {
    pub fn new(field: CoefficientField, params: PhaseParams) -> Result<Self> {
        if *field.pair() != params.pair {
            return Err(Error::Validation(
                "excision weights must match the field's attached weights".into(),
            ));
        }
        Ok(Self { field, params })
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn params(&self) -> &PhaseParams {
        &self.params
    }

    /// The cutoff argument `u = t·Φ(x)·⟨ξ⟩_k`.
    pub fn scale(&self, t: f64, x: f64, xi: f64) -> f64 {
        t * self.params.pair.phi.eval(x) * xi_bracket_unchecked(xi, self.params.k)
    }

    pub fn eval(&self, t: f64, x: f64, xi: f64) -> f64 {
        let b = xi_bracket_unchecked(xi, self.params.k);
        let w = self.params.pair.omega.eval(x);
        let phi_cut = smooth_step(self.scale(t, x, xi));
        let replacement = w * w * b * b;
        if phi_cut >= 1.0 {
            return replacement;
        }
        let plain = self.field.eval(t, x) * b * b;
        if phi_cut <= 0.0 {
            return plain;
        }
        phi_cut * replacement + (1.0 - phi_cut) * plain
    }

    /// `∂_t ã` via the chain rule through the cutoff.
    pub fn dt(&self, t: f64, x: f64, xi: f64) -> f64 {
        let b = xi_bracket_unchecked(xi, self.params.k);
        let w = self.params.pair.omega.eval(x);
        let phi_x = self.params.pair.phi.eval(x);
        let u = t * phi_x * b;
        let (phi_cut, dphi) = smooth_step_deriv(u);
        if phi_cut >= 1.0 {
            return 0.0;
        }
        let plain_dt = self.field.dt(t, x) * b * b;
        if phi_cut <= 0.0 {
            return plain_dt;
        }
        let diff = w * w * b * b - self.field.eval(t, x) * b * b;
        dphi * phi_x * b * diff + (1.0 - phi_cut) * plain_dt
    }

    /// Difference `a − ã`; identically zero where `u >= 2`.
    pub fn excision_error(&self, t: f64, x: f64, xi: f64) -> f64 {
        let b = xi_bracket_unchecked(xi, self.params.k);
        let phi_cut = smooth_step(self.scale(t, x, xi));
        if phi_cut <= 0.0 {
            return 0.0;
        }
        let w = self.params.pair.omega.eval(x);
        phi_cut * (self.field.eval(t, x) - w * w) * b * b
    }

    /// Characteristic root `τ = √ã`. Rejects a non-positive excised symbol
    /// (an ellipticity violation upstream).
    pub fn tau(&self, t: f64, x: f64, xi: f64) -> Result<f64> {
        let v = self.eval(t, x, xi);
        if !(v > 0.0) {
            return Err(Error::Numerical(format!(
                "excised symbol non-positive: ({t}, {x}, {xi}) -> {v}"
            )));
        }
        Ok(v.sqrt())
    }

    /// `∂_t τ = ∂_t ã / (2τ)`.
    pub fn dt_tau(&self, t: f64, x: f64, xi: f64) -> Result<f64> {
        Ok(self.dt(t, x, xi) / (2.0 * self.tau(t, x, xi)?))
    }

    /// Infimum of `τ/(ω⟨ξ⟩_k)` over the grid: the elliptic floor of the root.
    pub fn tau_ellipticity_floor(&self, grid: &PhaseGrid) -> Result<f64> {
        let cells = grid.cells();
        let times = grid.times();
        let infs = par_map(&cells, |&(x, xi)| -> Result<f64> {
            let w = self.params.pair.omega.eval(x);
            let b = xi_bracket_unchecked(xi, self.params.k);
            let mut inf = f64::INFINITY;
            for &t in &times {
                inf = inf.min(self.tau(t, x, xi)? / (w * b));
            }
            Ok(inf)
        });
        let mut floor = f64::INFINITY;
        for r in infs {
            floor = floor.min(r?);
        }
        Ok(floor)
    }
}

// ---------------------------------------------------------------------------
// Majorants.
// ---------------------------------------------------------------------------

/// Phase-space sampling grid for the majorant fits: `0` and `±` log-spaced
/// values up to the given maxima on each axis, log-spaced times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_max: f64,
    pub xi_max: f64,
    /// Log-spaced points per half-axis.
    pub points: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self {
            x_max: 1e3,
            xi_max: 1e3,
            points: 9,
            t_min: 1e-6,
            t_max: 1.0,
            t_points: 32,
        }
    }
}

impl PhaseGrid {
    fn axis(max: f64, points: usize) -> Vec<f64> {
        let mut v = vec![0.0];
        for s in log_space(max * 1e-3, max, points.max(2)) {
            v.push(s);
            v.push(-s);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_max, self.points)
    }

    pub fn xis(&self) -> Vec<f64> {
        Self::axis(self.xi_max, self.points)
    }

    pub fn times(&self) -> Vec<f64> {
        log_space(self.t_min, self.t_max, self.t_points)
    }

    /// All `(x, ξ)` pairs of the grid.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &x in &self.xs() {
            for &xi in &self.xis() {
                out.push((x, xi));
            }
        }
        out
    }

    /// Same extent, twice the density on every axis.
    pub fn doubled(&self) -> Self {
        Self {
            points: self.points * 2,
            t_points: self.t_points * 2,
            ..*self
        }
    }
}

/// Which majorant to evaluate or integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiKind {
    Psi0,
    Psi1,
    Psi,
    PsiTilde0,
    PsiTilde1,
    PsiTilde,
}

/// The fitted majorant family of one coefficient field.
///
/// `ψ0` dominates the excision error, `ψ1` the first-order remainder
/// (realized here through `∂_t τ`); the tilde variants widen the cutoff to
/// `φ(u/3)` in their first term. With `tilde_symmetric` the second tilde term
/// also uses the widened cutoff instead of the plain one.
#[derive(Debug, Clone)]
pub struct MajorantSet {
    pub c1: f64,
    pub c2: f64,
    /// κ constants of the integral bounds for derivative orders
    /// (|α|, |β|) ∈ {(0,0), (1,0), (0,1)} of the tilde majorant.
    pub kappa: [f64; 3],
    pub params: PhaseParams,
    pub t_max: f64,
    pub tilde_symmetric: bool,
    grid: PhaseGrid,
}

impl MajorantSet {
    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    fn ell(t: f64) -> f64 {
        (1.0 + 1.0 / t).ln()
    }

    /// Evaluate the selected majorant at `(t, x, ξ)`.
    pub fn eval(&self, kind: PsiKind, t: f64, x: f64, xi: f64) -> f64 {
        let w = self.params.pair.omega.eval(x);
        let phi_x = self.params.pair.phi.eval(x);
        let b = xi_bracket_unchecked(xi, self.params.k);
        let u = t * phi_x * b;
        match kind {
            PsiKind::Psi0 => self.c1 * smooth_step(u) * Self::ell(t) * w * b,
            PsiKind::Psi1 => {
                self.c2 * (smooth_step(u) * Self::ell(t) * w * b + (1.0 - smooth_step(u)) / t)
            }
            PsiKind::Psi => {
                self.eval(PsiKind::Psi0, t, x, xi) + self.eval(PsiKind::Psi1, t, x, xi)
            }
            PsiKind::PsiTilde0 => self.c1 * smooth_step(u / 3.0) * Self::ell(t) * w * b,
            PsiKind::PsiTilde1 => {
                let second_cut = if self.tilde_symmetric { u / 3.0 } else { u };
                self.c2
                    * (smooth_step(u / 3.0) * Self::ell(t) * w * b
                        + (1.0 - smooth_step(second_cut)) / t)
            }
            PsiKind::PsiTilde => {
                self.eval(PsiKind::PsiTilde0, t, x, xi) + self.eval(PsiKind::PsiTilde1, t, x, xi)
            }
        }
    }

    /// `∂_x` of the tilde majorant (chain rule through `φ`, `ω`, `Φ`).
    pub fn dx_tilde(&self, t: f64, x: f64, xi: f64) -> f64 {
        let pair = &self.params.pair;
        let (w, dw) = (pair.omega.eval(x), pair.omega.deriv(x));
        let (_, dp) = (pair.phi.eval(x), pair.phi.deriv(x));
        let b = xi_bracket_unchecked(xi, self.params.k);
        let u = t * pair.phi.eval(x) * b;
        let du = t * dp * b;
        let ell = Self::ell(t);
        let (cut3, dcut3) = smooth_step_deriv(u / 3.0);
        let (_, dcut1) = smooth_step_deriv(u);
        // ψ̃0 and the first term of ψ̃1 share the widened-cutoff shape.
        let first = (self.c1 + self.c2) * ell * (dcut3 * (du / 3.0) * w * b + cut3 * dw * b);
        let second = if self.tilde_symmetric {
            self.c2 * (-dcut3 * (du / 3.0)) / t
        } else {
            self.c2 * (-dcut1 * du) / t
        };
        first + second
    }

    /// `∂_ξ` of the tilde majorant.
    pub fn dxi_tilde(&self, t: f64, x: f64, xi: f64) -> f64 {
        let pair = &self.params.pair;
        let w = pair.omega.eval(x);
        let p = pair.phi.eval(x);
        let b = xi_bracket_unchecked(xi, self.params.k);
        let db = xi / b;
        let u = t * p * b;
        let du = t * p * db;
        let ell = Self::ell(t);
        let (cut3, dcut3) = smooth_step_deriv(u / 3.0);
        let (_, dcut1) = smooth_step_deriv(u);
        let first = (self.c1 + self.c2) * ell * (dcut3 * (du / 3.0) * w * b + cut3 * w * db);
        let second = if self.tilde_symmetric {
            self.c2 * (-dcut3 * (du / 3.0)) / t
        } else {
            self.c2 * (-dcut1 * du) / t
        };
        first + second
    }
}

/// Fit the majorant constants of a field over a phase-space grid.
///
/// `C1` is the smallest constant with
/// `|a−ã|/(ω⟨ξ⟩_k) ≤ C1·φ(u)·ln(1+1/t)·ω⟨ξ⟩_k` on the grid; `C2` plays the
/// same role for `|∂_t τ|` against the `ψ1` shape. The κ constants bound the
/// time integrals of the tilde majorant and its first derivatives by
/// `Φ^{−|β|}⟨ξ⟩_k^{−|α|}·log(1+Φ⟨ξ⟩_k)`.
pub fn build_majorants(
    field: &CoefficientField,
    params: &PhaseParams,
    grid: &PhaseGrid,
    tilde_symmetric: bool,
) -> Result<MajorantSet> {
    let excised = ExcisedSymbol::new(field.clone(), *params)?;
    let times = grid.times();
    let cells = grid.cells();

    let fits = par_map(&cells, |&(x, xi)| -> Result<(f64, f64)> {
        let w = params.pair.omega.eval(x);
        let phi_x = params.pair.phi.eval(x);
        let b = xi_bracket_unchecked(xi, params.k);
        let mut c1 = 0.0_f64;
        let mut c2 = 0.0_f64;
        for &t in &times {
            let u = t * phi_x * b;
            let cut = smooth_step(u);
            let ell = MajorantSet::ell(t);
            if cut > 1e-12 {
                let num = excised.excision_error(t, x, xi).abs() / (w * b);
                c1 = c1.max(num / (cut * ell * w * b));
            }
            let shape1 = cut * ell * w * b + (1.0 - cut) / t;
            let num1 = excised.dt_tau(t, x, xi)?.abs() / (w * b);
            c2 = c2.max(num1 / shape1);
        }
        Ok((c1, c2))
    });
    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for f in fits {
        let (a, b) = f?;
        c1 = c1.max(a);
        c2 = c2.max(b);
    }
    if !c1.is_finite() || !c2.is_finite() {
        return Err(Error::Numerical(format!(
            "majorant constants unbounded on the grid: C1 = {c1}, C2 = {c2}"
        )));
    }

    let mut set = MajorantSet {
        c1,
        c2,
        kappa: [0.0; 3],
        params: *params,
        t_max: field.t_max(),
        tilde_symmetric,
        grid: *grid,
    };
    // A field that needs no excision fits C1 = C2 = 0; the κ integrals still
    // describe the ψ̃ shape, so give that shape unit constants.
    let kappa_set = MajorantSet {
        c1: if c1 > 0.0 { c1 } else { 1.0 },
        c2: if c2 > 0.0 { c2 } else { 1.0 },
        ..set.clone()
    };
    let kappas = par_map(&cells, |&(x, xi)| -> Result<[f64; 3]> {
        let phi_x = params.pair.phi.eval(x);
        let b = xi_bracket_unchecked(xi, params.k);
        let log_factor = (1.0 + phi_x * b).ln();
        let splits = split_points(phi_x * b);
        let t_end = kappa_set.t_max;
        let i0 = quad::integrate(
            |t| kappa_set.eval(PsiKind::PsiTilde, t, x, xi).abs(),
            0.0,
            t_end,
            1e-10,
            &splits,
        )?;
        let i_xi = quad::integrate(
            |t| kappa_set.dxi_tilde(t, x, xi).abs(),
            0.0,
            t_end,
            1e-10,
            &splits,
        )?;
        let i_x = quad::integrate(
            |t| kappa_set.dx_tilde(t, x, xi).abs(),
            0.0,
            t_end,
            1e-10,
            &splits,
        )?;
        Ok([
            i0 / log_factor,
            i_xi * b / log_factor,
            i_x * phi_x / log_factor,
        ])
    });
    for k in kappas {
        let k = k?;
        for (slot, v) in set.kappa.iter_mut().zip(k) {
            *slot = slot.max(v);
        }
    }
    Ok(set)
}

/// Forced subdivision points for the time quadratures: the zone boundaries
/// `{1, 2, 3, 6}/(Φ⟨ξ⟩_k)` where the cutoffs switch branches.
pub fn split_points(phi_xi: f64) -> Vec<f64> {
    [1.0, 2.0, 3.0, 6.0].iter().map(|n| n / phi_xi).collect()
}

/// `(∫₀ᵀ ψ dt) / log(1 + Φ(x)⟨ξ⟩_k)` by adaptive quadrature with forced
/// splits at the zone boundaries.
pub fn integral_log_bound(
    m: &MajorantSet,
    kind: PsiKind,
    x: f64,
    xi: f64,
    t_end: f64,
) -> Result<f64> {
    let phi_x = m.params.pair.phi.eval(x);
    let b = xi_bracket_unchecked(xi, m.params.k);
    let integral = quad::integrate(
        |t| m.eval(kind, t, x, xi).abs(),
        0.0,
        t_end,
        1e-10,
        &split_points(phi_x * b),
    )?;
    Ok(integral / (1.0 + phi_x * b).ln())
}
