use std::fs::File;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use kinex_core::empirical::{classify_groups, default_thresholds, derive, fit_groups, load_countries, GroupFit};
use kinex_core::Error;
use serde::Serialize;

use crate::output::OutDir;
use crate::{CommonArgs, Failure, ResultExt};

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Country table with a `country,f,g,lambda,gamma` header.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// GDP group thresholds as LO,HI (in units of f).
    #[arg(long, value_delimiter = ',', value_name = "LO,HI")]
    pub thresholds: Option<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct GroupReport {
    data: String,
    thresholds: [f64; 2],
    thresholds_source: &'static str,
    excluded: Vec<String>,
    ignored_columns: Vec<String>,
    groups: Vec<GroupFit>,
}

pub fn run(args: EmpiricalArgs) -> Result<(), Failure> {
    let mut config = super::load_config(&args.common)?;
    if let Some(data) = args.data {
        config.empirical.data = Some(data);
    }
    if let Some(t) = args.thresholds {
        let [lo, hi] = t[..] else {
            return Err(anyhow::anyhow!("--thresholds takes exactly two values, LO,HI")).usage();
        };
        config.empirical.thresholds = Some([lo, hi]);
    }
    let data = config
        .empirical
        .data
        .clone()
        .ok_or_else(|| anyhow::anyhow!("no country data given (--data)"))
        .usage()?;
    let file = File::open(&data)
        .with_context(|| format!("opening {}", data.display()))
        .usage()?;
    let table = load_countries(file)
        .with_context(|| format!("reading {}", data.display()))
        .usage()?;

    let derived = derive(&table.records).runtime()?;
    let (thresholds, source) = match config.empirical.thresholds {
        Some(t) => (t, "configured"),
        None => {
            let (lo, hi) = default_thresholds(&derived.records).runtime()?;
            ([lo, hi], "33rd/67th percentiles of f")
        }
    };
    config.empirical.thresholds = Some(thresholds);
    let grouped = match classify_groups(&derived.records, (thresholds[0], thresholds[1])) {
        Err(e @ Error::InvalidArgument(_)) => return Err(e).usage(),
        other => other.runtime()?,
    };
    let groups = fit_groups(&grouped).runtime()?;

    let out = OutDir::create(&config.out).runtime()?;
    out.config(&config).runtime()?;
    let rows: Vec<Vec<String>> = grouped
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.f.to_string(),
                r.g.to_string(),
                r.lambda.to_string(),
                r.gamma.to_string(),
                r.x.to_string(),
                r.f_norm.to_string(),
                r.y.to_string(),
                r.group.map(|g| g.to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    out.csv_records(
        "derived_countries.csv",
        &["country", "f", "g", "lambda", "gamma", "x", "f_norm", "y", "group"],
        &rows,
    )
    .runtime()?;
    let report = GroupReport {
        data: data.display().to_string(),
        thresholds,
        thresholds_source: source,
        excluded: derived.excluded,
        ignored_columns: table.ignored_columns,
        groups,
    };
    out.json("group_fits.json", &report).runtime()?;

    println!("thresholds {} / {} ({source})", thresholds[0], thresholds[1]);
    for g in &report.groups {
        match &g.fit {
            Some(f) => println!(
                "{:>6}: y = {:.4} ln x + {:.4}, R^2 = {:.4}, n = {}",
                g.group.as_str(),
                f.slope,
                f.intercept,
                f.r_squared,
                f.n_points
            ),
            None => println!("{:>6}: unfittable ({})", g.group.as_str(), g.unfittable.as_deref().unwrap_or("")),
        }
    }
    Ok(())
}
