//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{
    cmd_analyze, cmd_ingest, cmd_partition, cmd_sample_stats, cmd_sweep, with_jobs, Context,
    GlobalOpts, IngestArgs,
};
use crate::config::Format;
use crate::error::CliError;
use crate::output::{to_json, write_json};

#[derive(Debug, Parser)]
#[command(
    name = "gnncost",
    version,
    about = "Analytical cost model for full-graph versus mini-batch GNN training"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides sampler.rng_root.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads for sampling and sweep points.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Report formats to write.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert an edge list to binary CSR and check it against dataset metadata.
    Ingest(IngestCli),
    /// Partition the configured graph and report its boundary profile.
    Partition,
    /// Compute every cost for the configured single point.
    Analyze,
    /// Analyze the configuration at several partition counts.
    Sweep {
        /// Partition counts, comma separated; each must be >= 2.
        #[arg(long = "k-list", alias = "k", value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
    },
    /// Sampler statistics for one epoch.
    SampleStats,
}

#[derive(Debug, Args)]
pub struct IngestCli {
    /// Edge-list text file.
    #[arg(long, short)]
    pub input: PathBuf,
    /// GCSR output path; defaults to the input path with a .gcsr extension.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Add the reverse of every edge.
    #[arg(long)]
    pub symmetrize: bool,
    /// Dataset name recorded in the report.
    #[arg(long)]
    pub name: Option<String>,
    /// Known dataset statistics to validate against (pubmed, ogbn-arxiv).
    #[arg(long)]
    pub preset: Option<String>,
    /// Expected vertex count; overrides the preset.
    #[arg(long)]
    pub expected_n: Option<u64>,
    /// Expected directed edge count after ingestion; overrides the preset.
    #[arg(long)]
    pub expected_m: Option<u64>,
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
}

/// Runs one parsed invocation, printing a short summary to stdout.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let opts = GlobalOpts {
        config: g.config,
        seed: g.seed,
        jobs: g.jobs,
        out: g.out,
        format: g.format,
    };
    let jobs = opts.jobs;
    match cli.command {
        Command::Ingest(a) => {
            let args = IngestArgs {
                input: a.input,
                output: a.output,
                symmetrize: a.symmetrize,
                name: a.name,
                preset: a.preset,
                expected_n: a.expected_n,
                expected_m: a.expected_m,
            };
            let (report, status) = cmd_ingest(&args)?;
            if let Some(dir) = &opts.out {
                write_json(&dir.join("ingest_report.json"), &report)?;
            }
            print!("{}", String::from_utf8_lossy(&to_json(&report)?));
            status
        }
        Command::Partition => {
            let ctx = Context::load(&opts)?;
            let s = with_jobs(jobs, || cmd_partition(&ctx))?;
            println!(
                "k={} edge_cut={} halo_total={} -> {}",
                s.k,
                s.edge_cut,
                s.halo_total,
                ctx.out_dir.display()
            );
            Ok(())
        }
        Command::Analyze => {
            let ctx = Context::load(&opts)?;
            let r = with_jobs(jobs, || cmd_analyze(&ctx))?;
            println!(
                "gamma_ratio={} theta_ratio={} sampling_fraction={} -> {}",
                fmt_ratio(r.gamma_ratio),
                fmt_ratio(r.theta_ratio),
                fmt_ratio(r.sampling_fraction),
                ctx.out_dir.display()
            );
            for f in &r.flags {
                println!("note: {f}");
            }
            Ok(())
        }
        Command::Sweep { k_list } => {
            let ctx = Context::load(&opts)?;
            let rows = with_jobs(jobs, || cmd_sweep(&ctx, &k_list))?;
            for r in &rows {
                println!(
                    "k={} gamma_ratio={} theta_ratio={}",
                    r.k,
                    fmt_ratio(r.gamma_ratio),
                    fmt_ratio(r.theta_ratio)
                );
            }
            println!("-> {}", ctx.out_dir.display());
            Ok(())
        }
        Command::SampleStats => {
            let ctx = Context::load(&opts)?;
            let s = with_jobs(jobs, || cmd_sample_stats(&ctx))?;
            println!(
                "sampling_work={} sampling_fraction={} micro_batches={} -> {}",
                s.sampling_work,
                fmt_ratio(s.sampling_fraction),
                s.micro_batches,
                ctx.out_dir.display()
            );
            Ok(())
        }
    }
}
