//! Weighted Sobolev norms `‖Φ(·)^{s2} ⟨D⟩_k^{s1} v‖_{L²}` on a uniform
//! periodic grid, with the fractional derivative realized as a Fourier
//! multiplier `(k² + ξ²)^{s1/2}`.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft::{fft_in_place, signed_index};
use crate::weights::WeightSpec;
use crate::{Error, Result};

/// Complex-valued function sampled at `x_j = −L + 2Lj/M` for `j = 0..M`,
/// `M` a power of two ≥ 8, periodic on `[−L, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    half_width: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(half_width: f64, values: Vec<Complex64>) -> Result<Self> {
        let m = values.len();
        if !(half_width > 0.0) {
            return Err(Error::Validation(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if m < 8 || !m.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid size must be a power of two >= 8, got {m}"
            )));
        }
        Ok(Self { half_width, values })
    }

    pub fn zeros(half_width: f64, m: usize) -> Result<Self> {
        Self::new(half_width, vec![Complex64::new(0.0, 0.0); m])
    }

    pub fn from_fn(
        half_width: f64,
        m: usize,
        mut f: impl FnMut(f64) -> Complex64,
    ) -> Result<Self> {
        let mut g = Self::zeros(half_width, m)?;
        for j in 0..m {
            g.values[j] = f(g.x(j));
        }
        Ok(g)
    }

    pub fn from_real_fn(half_width: f64, m: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::from_fn(half_width, m, |x| Complex64::new(f(x), 0.0))
    }

    pub fn from_real_slice(half_width: f64, values: &[f64]) -> Result<Self> {
        Self::new(
            half_width,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + 2.0 * self.half_width * j as f64 / self.len() as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.len() as f64
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Discrete `L²` norm with uniform (trapezoid-on-a-circle) weight `2L/M`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.dx();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * w).sqrt()
    }

    /// Write `values` as little-endian `f64` (re, im) pairs plus a JSON
    /// sidecar `<path>.json` recording the geometry and provenance.
    pub fn save(&self, path: &Path, provenance: &str) -> Result<()> {
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        let sidecar = serde_json::json!({
            "L": self.half_width,
            "M": self.values.len(),
            "timestamp": std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            "provenance": provenance,
        });
        let json_path = path.with_extension(format!(
            "{}json",
            path.extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default()
        ));
        std::fs::write(&json_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json_path = path.with_extension(format!(
            "{}json",
            path.extension()
                .map(|e| format!("{}.", e.to_string_lossy()))
                .unwrap_or_default()
        ));
        let sidecar: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&json_path)?)
                .map_err(|e| Error::Io(format!("bad sidecar {}: {e}", json_path.display())))?;
        let l = sidecar["L"]
            .as_f64()
            .ok_or_else(|| Error::Io("sidecar missing L".into()))?;
        let m = sidecar["M"]
            .as_u64()
            .ok_or_else(|| Error::Io("sidecar missing M".into()))? as usize;
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        if buf.len() != m * 16 {
            return Err(Error::Io(format!(
                "binary payload is {} bytes, sidecar says M = {m}",
                buf.len()
            )));
        }
        let values = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[0..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..16].try_into().unwrap()),
                )
            })
            .collect();
        Self::new(l, values)
    }
}

/// Sobolev index pair: `s1` counts derivatives, `s2` decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevIndex {
    pub s1: f64,
    pub s2: f64,
}

impl SobolevIndex {
    pub fn new(s1: f64, s2: f64) -> Self {
        Self { s1, s2 }
    }
}

/// Apply `⟨D⟩_k^{s1}`: the Fourier multiplier `(k² + ξ_j²)^{s1/2}` with
/// `ξ_j = πj/L`, `j ∈ {−M/2, …, M/2−1}`. `s1` and `−s1` invert each other up
/// to rounding.
pub fn bessel_potential(v: &GridFunction, s1: f64, k: f64) -> Result<GridFunction> {
    if !(k >= 1.0) {
        return Err(Error::Validation(format!(
            "spectral parameter k must be >= 1, got {k}"
        )));
    }
    let m = v.len();
    let mut hat = v.values.clone();
    fft_in_place(&mut hat, false);
    let base = std::f64::consts::PI / v.half_width;
    for (idx, c) in hat.iter_mut().enumerate() {
        let xi = base * signed_index(idx, m) as f64;
        *c *= (k * k + xi * xi).powf(s1 / 2.0);
    }
    fft_in_place(&mut hat, true);
    GridFunction::new(v.half_width, hat)
}

/// `‖v‖_{Φ,k;s} = ‖Φ(·)^{s2} ⟨D⟩_k^{s1} v‖_{L²}` on the grid: potential
/// first, pointwise weight after, then the discrete `L²` norm.
pub fn sobolev_norm(v: &GridFunction, s: SobolevIndex, k: f64, phi: WeightSpec) -> Result<f64> {
    let mut w = bessel_potential(v, s.s1, k)?;
    for j in 0..w.len() {
        let factor = phi.eval(w.x(j)).powf(s.s2);
        w.values_mut()[j] *= factor;
    }
    Ok(w.l2_norm())
}
