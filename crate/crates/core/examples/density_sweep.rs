// Distances as the mean number of scatterers per resolution cell grows:
// sparse scattering is far from the benchmark, dense scattering is close.

use speckle_core::distances::distance_report;
use speckle_core::ingest::normalize_rms;
use speckle_core::sim::{sample_phasor_sum, SimConfig};
use speckle_core::stats::{spearman_rho, PairedSeries};

pub const COUNTS: [f64; 9] = [1.0, 2.0, 3.0, 5.0, 8.0, 15.0, 50.0, 150.0, 500.0];

/// One row of distances per density level; `|d_cr|` is reported so every
/// column is a magnitude.
pub fn density_table(n: usize, seed: u64) -> speckle_core::Result<Vec<[f64; 4]>> {
    COUNTS
        .iter()
        .map(|&c| {
            let raw = sample_phasor_sum(&SimConfig::neg_binomial(n, c, c, seed))?;
            let r = distance_report(&normalize_rms(&raw)?, &Default::default())?;
            Ok([r.d_ks, r.d_mse, r.d_mmd, r.d_cr.abs()])
        })
        .collect()
}

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = density_table(20_000, 5)?;
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "mean", "d_ks", "d_mse", "d_mmd", "|d_cr|");
    for (c, row) in COUNTS.iter().zip(&table) {
        println!("{c:>6} {:>10.4} {:>10.2e} {:>10.4} {:>10.4}", row[0], row[1], row[2], row[3]);
    }
    for (j, name) in ["d_ks", "d_mse", "d_mmd", "|d_cr|"].iter().enumerate() {
        let series = PairedSeries::new(COUNTS.to_vec(), table.iter().map(|r| r[j]).collect())?;
        println!("spearman({name}, count) = {:.3}", spearman_rho(&series)?);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
