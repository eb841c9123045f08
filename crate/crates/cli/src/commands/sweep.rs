use anyhow::{anyhow, Context};
use clap::Args;
use kinex_core::run_sweep;

use crate::config::OutputFormat;
use crate::output::OutDir;
use crate::{CommonArgs, Failure, ResultExt};

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub replicates: Option<u32>,
    /// Base seed for the replicate streams.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub t_max: Option<u64>,
}

/// Worker count from `KINEX_THREADS`, if set.
fn thread_cap() -> anyhow::Result<Option<usize>> {
    match std::env::var("KINEX_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("KINEX_THREADS: {e}")),
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("KINEX_THREADS={v:?}"))?;
            if n == 0 {
                anyhow::bail!("KINEX_THREADS must be at least 1");
            }
            Ok(Some(n))
        }
    }
}

pub fn run(args: SweepArgs) -> Result<(), Failure> {
    let mut config = super::load_config(&args.common)?;
    if let Some(r) = args.replicates {
        config.sweep.replicates = r;
    }
    if let Some(seed) = args.seed {
        config.sweep.base_seed = seed;
    }
    if let Some(t_max) = args.t_max {
        config.sweep.t_max = t_max;
        config.sweep.t1 = None;
        config.sweep.t2 = None;
    }
    config.sweep.resolve();
    let spec = config.sweep.spec().usage()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap().usage()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().runtime()?;
    let cells = pool.install(|| run_sweep(&spec)).runtime()?;

    let out = OutDir::create(&config.out).runtime()?;
    out.config(&config).runtime()?;
    out.csv("sweep.csv", &cells).runtime()?;
    if config.format == OutputFormat::Json {
        out.json("sweep.json", &cells).runtime()?;
    }
    println!("{} cells -> {}", cells.len(), out.path("sweep.csv").display());
    Ok(())
}
