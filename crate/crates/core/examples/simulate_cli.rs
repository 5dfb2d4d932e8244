// Driving the simulator through the command line with a config file; flags
// on the command line override the file.

use std::fs;

use speckle_core::cli;

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("speckle-sim-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    let config = dir.join("run.cfg");
    fs::write(&config, "# negative-binomial scatterers\nmodel = negbin\nscatterers = 5\nalpha = 5\nn = 8\nseed = 42\n")?;
    let out = dir.join("sample.csv");

    let args = ["speckle", "--config", config.to_str().unwrap(), "simulate", "--n", "4", "--out", out.to_str().unwrap()];
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = cli::run_with(args, &mut stdout, &mut stderr);
    println!("exit {code}\n{}", fs::read_to_string(&out)?);
    let record = fs::read_to_string(dir.join("sample.csv.run.json"))?;
    println!("run record: {record}");
    fs::remove_dir_all(&dir)?;
    assert_eq!(code, 0);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
