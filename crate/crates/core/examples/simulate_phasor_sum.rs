// Random phasor sums: a handful of scatterers gives visibly non-Rayleigh
// amplitude, many scatterers converge to the benchmark. Fluctuating
// (negative-binomial) counts give K-distributed amplitude with extra
// contrast.

use speckle_core::benchmark::cr_theoretical;
use speckle_core::distances::{d_ks, distance_report};
use speckle_core::estimators::contrast_ratio;
use speckle_core::ingest::normalize_rms;
use speckle_core::sim::{sample_phasor_sum, SimConfig};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 20_000;
    println!("benchmark contrast ratio {:.4}", cr_theoretical());
    println!("{:<22} {:>8} {:>8}", "model", "CR", "d_ks");
    for count in [1, 2, 3, 10, 100] {
        let raw = sample_phasor_sum(&SimConfig::fixed(n, count, 11))?;
        let ks = d_ks(&normalize_rms(&raw)?)?;
        println!("{:<22} {:>8.4} {:>8.4}", format!("fixed {count}"), contrast_ratio(&raw)?, ks);
    }
    for mean in [2.0, 10.0, 100.0] {
        let raw = sample_phasor_sum(&SimConfig::neg_binomial(n, mean, mean, 11))?;
        let report = distance_report(&normalize_rms(&raw)?, &Default::default())?;
        println!("{:<22} {:>8.4} {:>8.4}", format!("negbin mean={mean}"), contrast_ratio(&raw)?, report.d_ks);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
