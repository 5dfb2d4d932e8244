// Distances over nested ROIs of a synthetic, fully developed speckle image.
// Small regions carry few pixels, so their distances are inflated by
// sampling noise; the estimates settle toward zero as the area grows.

use speckle_core::distances::DistanceSettings;
use speckle_core::ingest::{PixelMatrix, RoiSpec};
use speckle_core::pipeline::{roi_sweep, DEFAULT_SWEEP_FRACTIONS};
use speckle_core::sim::{sample_phasor_sum, SimConfig};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (rows, cols) = (160, 400);
    let amps = sample_phasor_sum(&SimConfig::fixed(rows * cols, 60, 21))?;
    let top = amps.values().iter().copied().fold(0.0, f64::max);
    let image = PixelMatrix::new(rows, cols, amps.into_values(), top)?;

    let base = RoiSpec::new(20, 10, 360, 140);
    let sweep = roi_sweep(&image, &base, &DEFAULT_SWEEP_FRACTIONS, &DistanceSettings::default())?;
    println!("{:>9} {:>16} {:>7} {:>9} {:>9} {:>9} {:>9}", "fraction", "roi", "area", "d_ks", "d_mse", "d_mmd", "d_cr");
    for row in &sweep {
        match &row.report {
            Some(r) => println!(
                "{:>9.4} {:>16} {:>7} {:>9.4} {:>9.2e} {:>9.4} {:>9.4}",
                row.fraction,
                row.roi.to_string(),
                row.area,
                r.d_ks,
                r.d_mse,
                r.d_mmd,
                r.d_cr
            ),
            None => println!("{:>9.4} {:>16} {:>7} {}", row.fraction, row.roi.to_string(), row.area, row.note.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
