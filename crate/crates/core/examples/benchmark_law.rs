// The normalized Rayleigh benchmark: density, distribution, quantiles,
// characteristic function and the contrast-ratio constant.

use speckle_core::benchmark::{bd_cdf, bd_cf, bd_pdf, bd_quantile, cr_theoretical, SIGMA};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("sigma = {SIGMA:.6}, contrast ratio = {:.6}", cr_theoretical());
    println!("{:>6} {:>10} {:>10}", "x", "pdf", "cdf");
    for x in [0.25, 0.5, SIGMA, 1.0, 1.5, 2.0, 3.0] {
        println!("{x:>6.3} {:>10.6} {:>10.6}", bd_pdf(x)?, bd_cdf(x)?);
    }
    let median = bd_quantile(0.5);
    println!("median = {median:.6}");
    assert!((bd_cdf(median)? - 0.5).abs() < 1e-12);

    println!("{:>6} {:>10} {:>10} {:>10}", "t", "re", "im", "|cf|");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let cf = bd_cf(t);
        println!("{t:>6.1} {:>10.6} {:>10.6} {:>10.6}", cf.re, cf.im, cf.norm());
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
