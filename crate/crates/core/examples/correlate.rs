// Relating a distance to an external measurement across a cohort: Pearson
// and Spearman correlation, the regression line, and a Fisher z test
// against a correlation reported elsewhere.

use speckle_core::stats::{fisher_compare, linear_regression, spearman_rho, PairedSeries};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Twelve regions: a distance and a co-registered attenuation estimate.
    let distance = vec![0.012, 0.018, 0.021, 0.030, 0.034, 0.041, 0.047, 0.055, 0.060, 0.071, 0.078, 0.090];
    let attenuation = vec![1.1, 1.3, 1.2, 1.7, 1.6, 2.0, 2.3, 2.2, 2.6, 2.9, 3.1, 3.4];
    let series = PairedSeries::new(distance, attenuation)?;
    let fit = linear_regression(&series)?;
    println!("r = {:.4}, slope = {:.3}, intercept = {:.3}", fit.r, fit.slope, fit.intercept);
    println!("spearman = {:.4}", spearman_rho(&series)?);
    let cmp = fisher_compare(fit.r, series.len(), 0.40, 30)?;
    println!("vs r=0.40 (n=30): z = {:.3}, p = {:.4}", cmp.z, cmp.p_two_sided);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
