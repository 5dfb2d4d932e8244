//! Runs every example under `cargo test` so they cannot rot.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!($file);

            #[test]
            fn runs() {
                run_example().unwrap();
            }
        }
    };
}

example!(batch_manifest, "../examples/batch_manifest.rs");
example!(benchmark_distances, "../examples/benchmark_distances.rs");
example!(benchmark_law, "../examples/benchmark_law.rs");
example!(correlate, "../examples/correlate.rs");
example!(density_sweep, "../examples/density_sweep.rs");
example!(fit_families, "../examples/fit_families.rs");
example!(image_pipeline, "../examples/image_pipeline.rs");
example!(roi_sweep, "../examples/roi_sweep.rs");
example!(simulate_cli, "../examples/simulate_cli.rs");
example!(simulate_phasor_sum, "../examples/simulate_phasor_sum.rs");
