//! Shared numerical machinery: quadrature, regression, deterministic sampling.

pub mod fit;
pub mod quad;
pub mod rng;

/// Ordered parallel map. Falls back to a serial map when the `parallel`
/// feature is off (the wasm build). Result order matches input order either
/// way, so downstream reductions stay deterministic.
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Logarithmically spaced values from `a` to `b` inclusive, `n >= 2`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > 0.0 && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Uniformly spaced values from `a` to `b` inclusive, `n >= 2`.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}
