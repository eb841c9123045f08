use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use kinex_core::fitting::{law5_points, law6_points, Exclusion, FitResult, LawPoints};
use kinex_core::{fit_linear, SweepCell};
use serde::Serialize;

use crate::output::OutDir;
use crate::{CommonArgs, Failure, ResultExt};

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sweep table (`sweep.csv`, or `sweep.json`).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct LawReport {
    x: &'static str,
    y: &'static str,
    fit: FitResult,
    excluded: Vec<Exclusion>,
}

#[derive(Debug, Serialize)]
struct FitReport {
    table: String,
    cells: usize,
    /// f/g against ln((1 - lambda) * gamma).
    flow_disparity: LawReport,
    /// The same fit against ln(sqrt((1 - lambda) * gamma)).
    flow_disparity_sqrt_axis: FitResult,
    /// tau against f.
    flow_mobility: LawReport,
}

pub fn read_table(path: &Path) -> anyhow::Result<Vec<SweepCell>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_reader(file).with_context(|| format!("parsing {}", path.display()));
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
    reader
        .deserialize()
        .map(|row| row.with_context(|| format!("parsing {}", path.display())))
        .collect()
}

fn fit_law(name: &str, law: &LawPoints) -> anyhow::Result<FitResult> {
    if law.points.len() < 2 {
        anyhow::bail!("{name}: {} usable point(s), need at least 2", law.points.len());
    }
    fit_linear(&law.points).with_context(|| name.to_string())
}

pub fn run(args: FitArgs) -> Result<(), Failure> {
    let mut config = super::load_config(&args.common)?;
    if let Some(table) = args.table {
        config.fit.table = Some(table);
    }
    let table = config
        .fit
        .table
        .clone()
        .ok_or_else(|| anyhow::anyhow!("no sweep table given (--table)"))
        .usage()?;
    let cells = read_table(&table).usage()?;

    let law5 = law5_points(&cells);
    let law6 = law6_points(&cells);
    let fit5 = fit_law("f/g vs ln((1-lambda)*gamma)", &law5).runtime()?;
    let fit6 = fit_law("tau vs f", &law6).runtime()?;

    let report = FitReport {
        table: table.display().to_string(),
        cells: cells.len(),
        flow_disparity: LawReport {
            x: "ln((1-lambda)*gamma)",
            y: "f/g",
            fit: fit5,
            excluded: law5.excluded,
        },
        flow_disparity_sqrt_axis: fit5.on_sqrt_axis(),
        flow_mobility: LawReport { x: "f", y: "tau", fit: fit6, excluded: law6.excluded },
    };

    let text = render(&report);
    let out = OutDir::create(&config.out).runtime()?;
    out.config(&config).runtime()?;
    out.json("fit_report.json", &report).runtime()?;
    out.text("fit_report.txt", &text).runtime()?;
    print!("{text}");
    Ok(())
}

fn render(r: &FitReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sweep table: {} ({} cells)", r.table, r.cells);
    for (title, law) in [("f/g = a*ln((1-lambda)*gamma) + b", &r.flow_disparity), ("tau = a*f + b", &r.flow_mobility)] {
        let f = &law.fit;
        let _ = writeln!(
            s,
            "{title}: a = {:.6}, b = {:.6}, R^2 = {:.6}, points = {}",
            f.slope, f.intercept, f.r_squared, f.n_points
        );
        for e in &law.excluded {
            let _ = writeln!(s, "  excluded lambda={} gamma={}: {}", e.lambda, e.gamma, e.reason);
        }
    }
    let sq = &r.flow_disparity_sqrt_axis;
    let _ = writeln!(s, "f/g = a*ln(sqrt((1-lambda)*gamma)) + C: a = {:.6}, C = {:.6}", sq.slope, sq.intercept);
    s
}
