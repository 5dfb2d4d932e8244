// The four distances on a sample that follows the benchmark, and on one
// that does not.

use speckle_core::distances::{distance_report, DistanceSettings, DISTANCE_NAMES};
use speckle_core::ingest::normalize_rms;
use speckle_core::sim::{sample_k, sample_rayleigh};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let settings = DistanceSettings::default();
    // Any Rayleigh scale works; normalization removes it.
    let rayleigh = normalize_rms(&sample_rayleigh(100_000, 4.2, 1)?)?;
    let k = normalize_rms(&sample_k(100_000, 1.5, 1)?)?;
    let a = distance_report(&rayleigh, &settings)?;
    let b = distance_report(&k, &settings)?;
    println!("{:<6} {:>12} {:>12}", "", "rayleigh", "k(1.5)");
    for (i, name) in DISTANCE_NAMES.iter().enumerate() {
        println!("{name:<6} {:>12.3e} {:>12.3e}", a.values()[i], b.values()[i]);
    }
    println!("bandwidth {:.4} / {:.4}", a.settings.bandwidth, b.settings.bandwidth);
    for i in 0..4 {
        assert!(a.values()[i].abs() < b.values()[i].abs());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
