//! Writes the sampled evolution of the computational subspace as CSV.

use nhqc::propagation::evolve_path;
use nhqc::PathPlan;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/worked_example.json");
    let plan: PathPlan = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let trajectory = evolve_path(&plan, 16)?;
    trajectory.write_csv(std::io::stdout().lock())?;
    Ok(())
}
