//! Browser bindings for the interactive demo page: resonant speed curves,
//! mode-energy trajectories, and the phase-space separatrix map.
//!
//! Build with `wasm-pack build --target web crates/wasm` and serve
//! `crates/wasm/www/` next to the generated `pkg/`. The `api` module holds
//! the target-independent implementations; the exported functions are thin
//! wrappers that only translate errors into JavaScript values.

use wasm_bindgen::prelude::*;

/// Target-independent implementations (testable on the host).
pub mod api {
    use hyperlab_core::activators::{
        integrate_mode, phi_rate, ActivatorParams, ActivatorSpeed, Speed, SpeedClass, Theta,
    };
    use hyperlab_core::phasespace::{separatrix_time, PhaseParams};
    use hyperlab_core::weights::{WeightPair, WeightSpec};
    use hyperlab_core::Result;

    fn sweep_class(t_end: f64) -> Result<SpeedClass> {
        SpeedClass::new(0.5, 2.0, Theta::LogInverse, t_end)
    }

    /// Key numbers of the resonant speed at one frequency, as JSON: anchor
    /// times, envelope level, amplification exponent and its ratio to `log λ`.
    pub fn activator_info(lambda: f64, gamma: f64, t1: f64) -> Result<String> {
        let class = sweep_class(1.0)?;
        let params = ActivatorParams::new(gamma, t1, lambda, &class)?;
        let phi = phi_rate(lambda, gamma, &Theta::LogInverse);
        Ok(serde_json::json!({
            "a": params.a_mark,
            "b": params.b_mark,
            "thetaLambda": params.theta_lambda,
            "phi": phi,
            "phiOverLogLambda": phi / lambda.ln(),
            "expTwoPhi": (2.0 * phi).exp(),
        })
        .to_string())
    }

    /// Sampled speed curve `c_λ(t)` on `[0, t_max]`: `[t0, c0, t1, c1, …]`.
    pub fn activator_curve(
        lambda: f64,
        gamma: f64,
        t1: f64,
        t_max: f64,
        points: usize,
    ) -> Result<Vec<f64>> {
        let class = sweep_class(1.0)?;
        let params = ActivatorParams::new(gamma, t1, lambda, &class)?;
        let speed = ActivatorSpeed::new(params);
        let n = points.clamp(16, 400_000);
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let t = t_max * i as f64 / (n - 1) as f64;
            out.push(t);
            out.push(speed.value(t));
        }
        Ok(out)
    }

    /// Energy history `E(t) = |u'|² + λ²|u|²` of the resonant mode:
    /// `[t0, E0, t1, E1, …]`, decimated to at most `max_points` samples.
    pub fn mode_energy(
        lambda: f64,
        gamma: f64,
        t1: f64,
        t_end: f64,
        max_points: usize,
    ) -> Result<Vec<f64>> {
        let class = sweep_class(t_end.max(1.0))?;
        let params = ActivatorParams::new(gamma, t1, lambda, &class)?;
        let speed = ActivatorSpeed::new(params);
        let traj = integrate_mode(&speed, lambda, t_end, 1e-9)?;
        let samples = traj.samples();
        let stride = (samples.len() / max_points.max(2)).max(1);
        let mut out = Vec::new();
        for (i, s) in samples.iter().enumerate() {
            if i % stride == 0 || i + 1 == samples.len() {
                out.push(s.t);
                out.push(s.energy(lambda));
            }
        }
        Ok(out)
    }

    /// Separatrix time `N/(Φ(x)·⟨ξ⟩_k)` on an `nx × nxi` grid covering
    /// `[−x_max, x_max] × [−xi_max, xi_max]`, row-major in `x`. A phase-space
    /// point at time `t` lies in the interior zone iff `t` is below this
    /// surface.
    pub fn separatrix_map(
        kappa2: f64,
        k: f64,
        zone_n: f64,
        x_max: f64,
        xi_max: f64,
        nx: usize,
        nxi: usize,
    ) -> Result<Vec<f64>> {
        let phi = WeightSpec::bracket_pow(kappa2)?;
        let pair = WeightPair::new(phi, phi);
        let params = PhaseParams::new(k, zone_n, pair)?;
        let (nx, nxi) = (nx.clamp(2, 2048), nxi.clamp(2, 2048));
        let mut out = Vec::with_capacity(nx * nxi);
        for i in 0..nx {
            let x = -x_max + 2.0 * x_max * i as f64 / (nx - 1) as f64;
            for j in 0..nxi {
                let xi = -xi_max + 2.0 * xi_max * j as f64 / (nxi - 1) as f64;
                out.push(separatrix_time(x, xi, &params));
            }
        }
        Ok(out)
    }
}

fn js_err(e: hyperlab_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub fn activator_info(lambda: f64, gamma: f64, t1: f64) -> Result<String, JsValue> {
    api::activator_info(lambda, gamma, t1).map_err(js_err)
}

#[wasm_bindgen]
pub fn activator_curve(
    lambda: f64,
    gamma: f64,
    t1: f64,
    t_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    api::activator_curve(lambda, gamma, t1, t_max, points).map_err(js_err)
}

#[wasm_bindgen]
pub fn mode_energy(
    lambda: f64,
    gamma: f64,
    t1: f64,
    t_end: f64,
    max_points: usize,
) -> Result<Vec<f64>, JsValue> {
    api::mode_energy(lambda, gamma, t1, t_end, max_points).map_err(js_err)
}

#[wasm_bindgen]
pub fn separatrix_map(
    kappa2: f64,
    k: f64,
    zone_n: f64,
    x_max: f64,
    xi_max: f64,
    nx: usize,
    nxi: usize,
) -> Result<Vec<f64>, JsValue> {
    api::separatrix_map(kappa2, k, zone_n, x_max, xi_max, nx, nxi).map_err(js_err)
}
