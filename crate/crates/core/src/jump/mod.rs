//! Trajectories of the pure-jump process generated by `L_J` and the path
//! functionals that appear under Feynman-Kac expectations.

mod path;
mod sampler;

use std::io::Write;

pub use path::JumpPath;
pub use sampler::JumpSampler;

use crate::error::Result;
use crate::lattice::Kernel;
use crate::scalar::Scalar;
use crate::seed::SeedSpec;

/// Samples one path; builds a throwaway sampler. Prefer [`JumpSampler`] for ensembles.
pub fn sample_path<T: Scalar>(
    kernel: &Kernel<T>,
    start: usize,
    horizon: T,
    seed: SeedSpec,
) -> Result<JumpPath<T>> {
    JumpSampler::new(kernel)?.sample_path(start, horizon, seed)
}

/// Debug dump: one CSV row `(stream_index, jump_time, cell_index)` per jump.
/// A path without jumps contributes a row at time 0 with its start site.
pub fn write_paths_csv<T: Scalar, W: Write>(
    out: &mut W,
    paths: &[(SeedSpec, &JumpPath<T>)],
) -> Result<()> {
    writeln!(out, "stream_index,jump_time,cell_index")?;
    for (seed, path) in paths {
        writeln!(out, "{},{:e},{}", seed.stream_index, 0.0, path.start)?;
        for (t, x) in path.jump_times.iter().zip(&path.positions) {
            writeln!(out, "{},{:e},{}", seed.stream_index, t, x)?;
        }
    }
    Ok(())
}
