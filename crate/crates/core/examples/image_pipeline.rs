// From a stored B-scan to distances: log-compress a synthetic speckle field
// into a 16-bit PNG, read it back, undo the compression, cut a ROI and
// measure it. The same file is then analyzed through the command line.

use std::fs::File;

use speckle_core::cli;
use speckle_core::distances::distance_report;
use speckle_core::ingest::{encode_png_gray, load_image_auto, PixelMatrix, RoiSpec};
use speckle_core::pipeline::{log_compress, roi_sample, PixelMapping};
use speckle_core::sim::{sample_phasor_sum, SimConfig};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (rows, cols) = (120, 200);
    let amps = sample_phasor_sum(&SimConfig::fixed(rows * cols, 40, 8))?;
    let field = PixelMatrix::new(rows, cols, amps.into_values(), 1.0)?;
    // Five decades keeps clipping of the darkest pixels negligible.
    let stored = log_compress(&field, 5.0, 65535.0)?;
    let pixels: Vec<u16> = stored.data().iter().map(|p| p.round() as u16).collect();

    let dir = std::env::temp_dir().join(format!("speckle-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("scan.png");
    encode_png_gray(File::create(&path)?, cols, rows, &pixels, 16)?;

    let image = load_image_auto(&path)?;
    let amplitudes = PixelMapping::Log { decades: 5.0 }.to_amplitudes(&image)?;
    let roi = RoiSpec::new(10, 10, 180, 100);
    let report = distance_report(&roi_sample(&amplitudes, &roi)?, &Default::default())?;
    println!("library: n={} d_ks={:.4} d_mse={:.2e} d_mmd={:.4} d_cr={:.4}", report.n, report.d_ks, report.d_mse, report.d_mmd, report.d_cr);

    let args = [
        "speckle",
        "distances",
        "--input",
        path.to_str().unwrap(),
        "--roi",
        "10,10,180,100",
        "--dynamic-range",
        "5",
        "--format",
        "csv",
    ];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(args, &mut out, &mut err);
    println!("cli (exit {code}):\n{}", String::from_utf8_lossy(&out));
    std::fs::remove_dir_all(&dir)?;
    assert_eq!(code, 0);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
