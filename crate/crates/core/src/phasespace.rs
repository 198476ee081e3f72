//! Spectral bracket, Planck function and the interior/exterior split of the
//! extended phase space.
//!
//! The split happens at the separatrix time `t = N/(Φ(x)⟨ξ⟩_k)`: before it the
//! time singularity is excised, after it the `1/t` weights are integrable.

use serde::{Deserialize, Serialize};

use crate::weights::WeightPair;
use crate::{Error, Result};

/// Parameters of the phase-space geometry: spectral parameter `k >= 1`, zone
/// constant `N > 0`, and the weight pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams {
    pub k: f64,
    pub zone_n: f64,
    pub pair: WeightPair,
}

impl PhaseParams {
    pub fn new(k: f64, zone_n: f64, pair: WeightPair) -> Result<Self> {
        if !(k >= 1.0) {
            return Err(Error::Validation(format!(
                "spectral parameter k must be >= 1, got {k}"
            )));
        }
        if !(zone_n > 0.0) {
            return Err(Error::Validation(format!(
                "zone constant N must be positive, got {zone_n}"
            )));
        }
        Ok(Self { k, zone_n, pair })
    }
}

/// `⟨ξ⟩_k = (k² + ξ²)^{1/2}`. Requires `k >= 1`.
pub fn xi_bracket(xi: f64, k: f64) -> Result<f64> {
    if !(k >= 1.0) {
        return Err(Error::Validation(format!(
            "spectral parameter k must be >= 1, got {k}"
        )));
    }
    Ok(xi_bracket_unchecked(xi, k))
}

/// As [`xi_bracket`] but without the parameter check; for inner loops where
/// `k` was validated at construction.
pub fn xi_bracket_unchecked(xi: f64, k: f64) -> f64 {
    (k * k + xi * xi).sqrt()
}

/// Planck function `h(x, ξ) = (Φ(x)·⟨ξ⟩_k)^{-1}`; `<= 1` whenever `k >= 1`.
pub fn planck_h(x: f64, xi: f64, p: &PhaseParams) -> f64 {
    1.0 / (p.pair.phi.eval(x) * xi_bracket_unchecked(xi, p.k))
}

/// The separatrix time `t_{x,ξ} = N·h(x, ξ)` splitting the zones at `(x, ξ)`.
pub fn separatrix_time(x: f64, xi: f64, p: &PhaseParams) -> f64 {
    p.zone_n * planck_h(x, xi, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneLabel {
    Interior,
    Exterior,
}

/// Classify a point of the extended phase space. The separatrix itself
/// belongs to the interior (closed inequality there, strict outside).
pub fn classify_zone(t: f64, x: f64, xi: f64, p: &PhaseParams) -> Result<ZoneLabel> {
    if !(t >= 0.0) {
        return Err(Error::Validation(format!("time must be >= 0, got {t}")));
    }
    if t <= separatrix_time(x, xi, p) {
        Ok(ZoneLabel::Interior)
    } else {
        Ok(ZoneLabel::Exterior)
    }
}
