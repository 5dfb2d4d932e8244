// Cohort processing: simulate a few regions at different scatterer
// densities, list them in a manifest, and run `speckle batch` over it with
// two workers. One entry points at a missing file to show per-row errors.

use std::fs;

use speckle_core::cli;
use speckle_core::ingest::write_amplitude_csv;
use speckle_core::sim::{sample_phasor_sum, SimConfig};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("speckle-batch-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let mut manifest = String::from("path,roi,label\n");
    for mean in [2.0, 8.0, 50.0] {
        let raw = sample_phasor_sum(&SimConfig::neg_binomial(10_000, mean, mean, 4))?;
        let name = format!("density_{mean}.csv");
        write_amplitude_csv(&raw, fs::File::create(dir.join(&name))?)?;
        manifest.push_str(&format!("{name},,mean {mean}\n"));
    }
    manifest.push_str("lost.png,\"0,0,10,10\",missing scan\n");
    let manifest_path = dir.join("manifest.csv");
    fs::write(&manifest_path, manifest)?;

    let args = ["speckle", "batch", "--manifest", manifest_path.to_str().unwrap(), "--jobs", "2", "--format", "csv"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run_with(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    println!("exit code {code} (3 means some rows failed)");
    fs::remove_dir_all(&dir)?;
    assert_eq!(code, cli::EXIT_PARTIAL);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
