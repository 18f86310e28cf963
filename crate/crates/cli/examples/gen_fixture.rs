//! Regenerates `fixtures/synthetic_trace.csv` from the analytic test curves.

use anyhow::Result;
use squeeze_cli::io::write_noise_trace;
use squeeze_core::fixtures::synthetic_trace;

fn main() -> Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/synthetic_trace.csv");
    let trace = synthetic_trace();
    let mut file = std::fs::File::create(path)?;
    write_noise_trace(
        &trace,
        &mut file,
        &[
            "synthetic trace: analytic zero-frequency curves convolved with the 1 MHz sideband pair",
            "not measured data; regenerate with `cargo run -p squeeze-cli --example gen_fixture`",
        ],
    )?;
    println!("wrote {path}");
    Ok(())
}
