//! Reproducible batch experiments: JSON config in, CSV/JSON artifacts and a
//! manifest out. Identical config and seed give byte-identical tabular
//! outputs; the manifest carries the config hash and wall time.

mod config;
mod runner;

pub use config::{
    catalog, validate_against_catalog, ActivatorSweepParams, CascadeScanParams,
    CascadeSpeedChoice, ConeParams, DataShape, ExcisionBoundsParams, ExperimentConfig,
    ExperimentKind, KindSchema, ParamField, Params, SobolevSelftestParams, SolveParams,
    SymbolFitParams, WeightChoice, WeightsAxiomsParams,
};
pub use runner::{run, RunOutcome};

/// Cap the worker-thread count for the process. Call once, before any
/// parallel work; later calls are ignored. No-op without the `parallel`
/// feature.
pub fn set_thread_cap(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}
