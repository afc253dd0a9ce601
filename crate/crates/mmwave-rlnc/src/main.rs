//! Thin CLI over the campaign runners. All logic lives in the library;
//! this binary parses flags, applies overrides, and maps errors to exit
//! codes (0 success, 2 config error, 3 infeasible bound request).

use clap::{Args, Parser, Subcommand};
use mmwave_rlnc::campaign::{
    run_bounds_figures, run_downlink_campaign, run_phi_validation, run_uplink_campaign,
    CampaignError,
};
use mmwave_rlnc::config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mmwave-rlnc",
    about = "Monte-Carlo campaigns and bound tables for network-coded multi-relay transmission",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (JSON); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's replication count.
    #[arg(long)]
    replications: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the downlink bound curves and the backhaul efficiency table.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit infeasible grid cells as `undefined` rows instead of failing.
        #[arg(long)]
        allow_undefined: bool,
    },
    /// Run the downlink air-interface campaign over the street deployment.
    Downlink {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the uplink backhaul campaign with inter-session coding.
    Uplink {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Validate the singularity-probability bound empirically.
    Phi {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn effective_config(common: &CommonArgs) -> Result<ExperimentConfig, CampaignError> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(replications) = common.replications {
        config.replications = replications;
    }
    config.validate()?;
    Ok(config)
}

fn exit_code_for(err: &CampaignError) -> ExitCode {
    match err {
        CampaignError::Config(_) => ExitCode::from(2),
        CampaignError::InfeasibleBound { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn report_files(files: &[PathBuf]) {
    for file in files {
        println!("wrote {}", file.display());
    }
}

fn run(cli: Cli) -> Result<(), CampaignError> {
    match cli.command {
        Command::Bounds {
            common,
            allow_undefined,
        } => {
            let config = effective_config(&common)?;
            let summary = run_bounds_figures(&config, allow_undefined)?;
            if summary.infeasible_cells > 0 {
                println!(
                    "{} backhaul cell(s) beyond the feasibility frontier marked undefined",
                    summary.infeasible_cells
                );
            }
            report_files(&summary.files);
        }
        Command::Downlink { common } => {
            let config = effective_config(&common)?;
            let summary = run_downlink_campaign(&config)?;
            println!(
                "{} devices ({} with no usable link)",
                summary.total_devices, summary.outage_devices
            );
            for (scheme, _) in &summary.efficiency {
                if let Some(med) = summary.median_efficiency(*scheme) {
                    println!("median efficiency {}: {med:.4}", scheme.label());
                }
            }
            report_files(&summary.files);
        }
        Command::Uplink { common } => {
            let config = effective_config(&common)?;
            let summary = run_uplink_campaign(&config)?;
            println!(
                "{} groups, {} undecodable spans",
                summary.total_groups, summary.undecodable_spans
            );
            for (scheme, _) in &summary.backhaul_efficiency {
                if let Some(med) = summary.median_backhaul_efficiency(*scheme) {
                    println!("median backhaul efficiency {}: {med:.4}", scheme.label());
                }
            }
            report_files(&summary.files);
        }
        Command::Phi { common } => {
            let config = effective_config(&common)?;
            let summary = run_phi_validation(&config)?;
            let feasible = summary.rows.iter().filter(|r| r.feasible).count();
            println!(
                "{} grid cells, {feasible} inside the feasible region",
                summary.rows.len()
            );
            report_files(&summary.files);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
