//! Campaign runners: seeded Monte-Carlo sweeps plus bound tables, all
//! emitting CSV under the configured output directory.
//!
//! Replications, devices and groups each draw from their own ChaCha
//! substream derived from the base seed (see [`crate::config`]), and
//! parallel results are merged in index order, so output bytes depend
//! only on the config and seed, never on scheduling.

use crate::bounds::{
    bkeff_forwarding_symmetric, bkeff_nc_lb, phi_oracle, phi_ub, BackhaulBound, SeriesControl,
    UplinkScenario,
};
use crate::channel::{build_link_matrix, sample_link, LinkMatrix};
use crate::config::{rng_for, stream, ExperimentConfig, GroupingPolicy, Scheme};
use crate::deployment::{drop_devices, place_relays, Position};
use crate::gf::FieldContext;
use crate::report::{fmt_f64, median, ratio_efficiency, summarize, CsvReport};
use crate::sim::{
    downlink_forwarding, downlink_nc, uplink_device_phase, uplink_forwarding_backhaul,
    uplink_nc_backhaul,
};
use rayon::prelude::*;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
    #[error(
        "{cells} grid cell(s) fall outside the feasible region of the backhaul bound; \
         rerun with --allow-undefined to emit them as undefined"
    )]
    InfeasibleBound { cells: usize },
    #[error("deployment failed: {0}")]
    Deployment(#[from] crate::deployment::DeploymentError),
    #[error("channel failed: {0}")]
    Channel(#[from] crate::channel::ChannelError),
}

fn field_for(config: &ExperimentConfig) -> FieldContext {
    FieldContext::new(config.field_size).expect("config validated the field size")
}

/// Provenance line naming the field construction behind the run.
fn field_note(field: &FieldContext) -> Vec<String> {
    vec![format!(
        "field=GF({}) reduction_polynomial=0b{:b}",
        field.size(),
        field.reduction_polynomial()
    )]
}

// ============================================================================
// Bound tables
// ============================================================================

#[derive(Debug, Clone)]
pub struct DownlinkBoundRow {
    pub scenario: &'static str,
    pub erasure_low: f64,
    pub erasure_high: f64,
    pub relays: u32,
    pub forwarding_ub: f64,
    pub nc_lb: f64,
}

#[derive(Debug, Clone)]
pub struct BackhaulBoundRow {
    pub code_length: u32,
    pub relays: u32,
    pub erasure: f64,
    pub phi_ub: f64,
    pub bound: BackhaulBound,
    pub forwarding_clamped: f64,
    pub forwarding_unclamped: f64,
    pub sim_nc: Option<(f64, f64)>,
    pub sim_forwarding: Option<(f64, f64)>,
    pub undecodable_spans: u64,
}

#[derive(Debug)]
pub struct BoundsSummary {
    pub downlink_rows: Vec<DownlinkBoundRow>,
    pub backhaul_rows: Vec<BackhaulBoundRow>,
    pub infeasible_cells: usize,
    pub files: Vec<PathBuf>,
}

fn downlink_bound_row(
    scenario: &'static str,
    erasures: &[f64],
    low: f64,
    high: f64,
) -> DownlinkBoundRow {
    let s = crate::bounds::DownlinkScenario::new(1, erasures.to_vec())
        .expect("bound grid erasures are in range");
    DownlinkBoundRow {
        scenario,
        erasure_low: low,
        erasure_high: high,
        relays: erasures.len() as u32,
        forwarding_ub: crate::bounds::eff_forwarding_ub(&s).expect("p < 1 on the grid"),
        nc_lb: crate::bounds::eff_nc_lb(&s),
    }
}

/// Regenerate the downlink bound curves and the backhaul efficiency
/// table, with simulated overlay columns. Infeasible backhaul cells are
/// an error unless `allow_undefined` is set, in which case they are
/// emitted with explicit `undefined` markers.
pub fn run_bounds_figures(
    config: &ExperimentConfig,
    allow_undefined: bool,
) -> Result<BoundsSummary, CampaignError> {
    config.validate()?;
    let field = field_for(config);
    let grid = &config.bounds;

    let mut downlink_rows = Vec::new();
    let mut symmetric_levels = vec![grid.low_erasure];
    symmetric_levels.extend(grid.high_erasures.iter().copied());
    for n in grid.relay_min..=grid.relay_max {
        for &p in &symmetric_levels {
            downlink_rows.push(downlink_bound_row("symmetric", &vec![p; n as usize], p, p));
        }
        for &high in &grid.high_erasures {
            let low = grid.low_erasure;
            let mut single_low = vec![high; n as usize];
            single_low[0] = low;
            downlink_rows.push(downlink_bound_row("single_low", &single_low, low, high));
            let mut single_high = vec![low; n as usize];
            single_high[0] = high;
            downlink_rows.push(downlink_bound_row("single_high", &single_high, low, high));
        }
    }

    let mut backhaul_rows = Vec::new();
    let mut infeasible = 0usize;
    for &z in &grid.code_lengths {
        let relays = grid.backhaul_relays.unwrap_or(z);
        for &p in &grid.backhaul_grid() {
            let scenario = UplinkScenario::symmetric(z as usize, relays as usize, p)
                .expect("grid values are valid");
            let bound = bkeff_nc_lb(
                &scenario,
                config.field_size as u64,
                SeriesControl::default(),
            )
            .expect("symmetric scenario");
            if !bound.is_defined() {
                infeasible += 1;
            }
            let (sim_nc, sim_forwarding, undecodable) = if grid.sim_spans_per_point > 0 {
                let mut rng = rng_for(config.base_seed, &[stream::BOUNDS, z as u64, p.to_bits()]);
                let mut nc_counts = Vec::new();
                let mut fwd_counts = Vec::new();
                let mut undecodable = 0u64;
                for _ in 0..grid.sim_spans_per_point {
                    let erasures = vec![vec![p; relays as usize]; z as usize];
                    let phase = uplink_device_phase(&erasures, &mut rng);
                    if !phase.excluded.is_empty() {
                        undecodable += 1;
                        continue;
                    }
                    fwd_counts.push(uplink_forwarding_backhaul(&phase) as f64);
                    let nc = uplink_nc_backhaul(&field, &phase, &mut rng)
                        .expect("coverage checked via exclusions");
                    nc_counts.push(nc as f64);
                }
                let nc = (!nc_counts.is_empty()).then(|| ratio_efficiency(z as f64, &nc_counts));
                let fwd = (!fwd_counts.is_empty()).then(|| ratio_efficiency(z as f64, &fwd_counts));
                (nc, fwd, undecodable)
            } else {
                (None, None, 0)
            };
            backhaul_rows.push(BackhaulBoundRow {
                code_length: z,
                relays,
                erasure: p,
                phi_ub: phi_ub(z as u64, config.field_size as u64, p),
                bound,
                forwarding_clamped: bkeff_forwarding_symmetric(relays as usize, p)
                    .expect("p < 1 on the grid"),
                forwarding_unclamped: crate::bounds::bkeff_forwarding(&scenario)
                    .expect("p < 1 on the grid")
                    .unclamped,
                sim_nc,
                sim_forwarding,
                undecodable_spans: undecodable,
            });
        }
    }

    if infeasible > 0 && !allow_undefined {
        return Err(CampaignError::InfeasibleBound { cells: infeasible });
    }

    let hash = config.hash();
    let notes = field_note(&field);
    let dir = &config.output_dir;
    let mut table = CsvReport::create(
        dir,
        "bounds_downlink.csv",
        "bounds",
        &hash,
        config.base_seed,
        &notes,
        "scenario,erasure_low,erasure_high,relays,eff_forwarding_ub,eff_nc_lb,gap",
    )?;
    for row in &downlink_rows {
        table.row(&[
            row.scenario.to_string(),
            fmt_f64(row.erasure_low),
            fmt_f64(row.erasure_high),
            row.relays.to_string(),
            fmt_f64(row.forwarding_ub),
            fmt_f64(row.nc_lb),
            fmt_f64(row.nc_lb - row.forwarding_ub),
        ])?;
    }
    let downlink_table = table.finish()?;

    let mut table = CsvReport::create(
        dir,
        "bounds_backhaul.csv",
        "bounds",
        &hash,
        config.base_seed,
        &notes,
        "code_length,field_size,relays,erasure,phi_ub,feasible,beta_nc_ub,series_tail_bound,\
         bkeff_nc_lb,bkeff_forwarding,bkeff_forwarding_unclamped,sim_bkeff_nc,sim_bkeff_nc_se,\
         sim_bkeff_f,sim_bkeff_f_se,undecodable_spans",
    )?;
    for row in &backhaul_rows {
        let (beta, tail, lb) = match row.bound {
            BackhaulBound::Defined {
                expected_transmissions,
                tail_bound,
                efficiency,
                ..
            } => (
                fmt_f64(expected_transmissions),
                fmt_f64(tail_bound),
                fmt_f64(efficiency),
            ),
            BackhaulBound::Undefined { .. } => {
                ("undefined".into(), "undefined".into(), "undefined".into())
            }
        };
        let sim = |v: Option<(f64, f64)>| match v {
            Some((value, se)) => (fmt_f64(value), fmt_f64(se)),
            None => (String::new(), String::new()),
        };
        let (sim_nc, sim_nc_se) = sim(row.sim_nc);
        let (sim_f, sim_f_se) = sim(row.sim_forwarding);
        table.row(&[
            row.code_length.to_string(),
            config.field_size.to_string(),
            row.relays.to_string(),
            fmt_f64(row.erasure),
            fmt_f64(row.phi_ub),
            row.bound.is_defined().to_string(),
            beta,
            tail,
            lb,
            fmt_f64(row.forwarding_clamped),
            fmt_f64(row.forwarding_unclamped),
            sim_nc,
            sim_nc_se,
            sim_f,
            sim_f_se,
            row.undecodable_spans.to_string(),
        ])?;
    }
    let backhaul_table = table.finish()?;

    Ok(BoundsSummary {
        downlink_rows,
        backhaul_rows,
        infeasible_cells: infeasible,
        files: vec![downlink_table, backhaul_table],
    })
}

// ============================================================================
// Downlink campaign
// ============================================================================

#[derive(Debug, Clone, Default)]
struct SchemeAccumulator {
    air: u64,
    delivered: u64,
    slots: u64,
    spans: u64,
}

#[derive(Debug, Clone)]
struct DeviceOutcome {
    replication: u32,
    device: u32,
    outage_spans: u64,
    measured_spans: u64,
    per_scheme: Vec<(Scheme, SchemeAccumulator)>,
}

#[derive(Debug)]
pub struct DownlinkSummary {
    /// Per-device efficiency series, pooled over replications.
    pub efficiency: Vec<(Scheme, Vec<f64>)>,
    /// Per-device mean slots per completed span.
    pub mean_slots: Vec<(Scheme, Vec<f64>)>,
    /// Devices that never saw a usable link in any span.
    pub outage_devices: u64,
    pub total_devices: u64,
    pub files: Vec<PathBuf>,
}

impl DownlinkSummary {
    pub fn series(&self, scheme: Scheme) -> Option<&[f64]> {
        self.efficiency
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, v)| v.as_slice())
    }

    pub fn median_efficiency(&self, scheme: Scheme) -> Option<f64> {
        self.series(scheme).filter(|v| !v.is_empty()).map(median)
    }

    pub fn median_slots(&self, scheme: Scheme) -> Option<f64> {
        self.mean_slots
            .iter()
            .find(|(s, _)| *s == scheme)
            .filter(|(_, v)| !v.is_empty())
            .map(|(_, v)| median(v))
    }
}

/// Air-interface comparison over the street deployment: every device
/// runs the selected schemes across its spans, links resampled per span.
pub fn run_downlink_campaign(config: &ExperimentConfig) -> Result<DownlinkSummary, CampaignError> {
    config.validate()?;
    let field = field_for(config);
    let relays = place_relays(&config.scenario)?;
    let k = config.time_span.packets_per_span;

    let mut outcomes: Vec<DeviceOutcome> = Vec::new();
    for rep in 0..config.replications {
        let mut deployment_rng = rng_for(
            config.base_seed,
            &[stream::DEPLOYMENT, stream::DOWNLINK, rep as u64],
        );
        let devices = drop_devices(&config.scenario, &mut deployment_rng)?;
        let mut rep_outcomes: Vec<DeviceOutcome> = devices
            .par_iter()
            .enumerate()
            .map(|(idx, device)| {
                let mut rng = rng_for(
                    config.base_seed,
                    &[stream::DOWNLINK, rep as u64, idx as u64],
                );
                let mut per_scheme: Vec<(Scheme, SchemeAccumulator)> = config
                    .schemes
                    .iter()
                    .map(|&s| (s, SchemeAccumulator::default()))
                    .collect();
                let mut outage_spans = 0u64;
                let mut measured_spans = 0u64;
                for _ in 0..config.spans_per_device {
                    let usable: Vec<f64> = relays
                        .iter()
                        .map(|r| {
                            sample_link(
                                device.distance(*r),
                                &config.downlink_budget,
                                config.downlink_channel(),
                                &mut rng,
                            )
                        })
                        .filter(|l| l.usable())
                        .map(|l| l.erasure)
                        .collect();
                    if usable.is_empty() {
                        outage_spans += 1;
                        continue;
                    }
                    measured_spans += 1;
                    for (scheme, acc) in per_scheme.iter_mut() {
                        let metrics = match scheme {
                            Scheme::Forwarding => downlink_forwarding(k, &usable, &mut rng),
                            Scheme::NetworkCoding => downlink_nc(&field, k, &usable, &mut rng),
                        }
                        .expect("usable links are nonempty");
                        acc.air += metrics.air_transmissions;
                        acc.delivered += metrics.packets_delivered;
                        acc.slots += metrics.slots_to_complete;
                        acc.spans += 1;
                    }
                }
                DeviceOutcome {
                    replication: rep,
                    device: idx as u32,
                    outage_spans,
                    measured_spans,
                    per_scheme,
                }
            })
            .collect();
        outcomes.append(&mut rep_outcomes);
    }

    let hash = config.hash();
    let notes = field_note(&field);
    let mut report = CsvReport::create(
        &config.output_dir,
        "downlink_devices.csv",
        "downlink",
        &hash,
        config.base_seed,
        &notes,
        "replication,device,scheme,metric,value",
    )?;
    let mut efficiency: Vec<(Scheme, Vec<f64>)> =
        config.schemes.iter().map(|&s| (s, Vec::new())).collect();
    let mut mean_slots: Vec<(Scheme, Vec<f64>)> =
        config.schemes.iter().map(|&s| (s, Vec::new())).collect();
    let mut outage_devices = 0u64;
    for outcome in &outcomes {
        let rep = outcome.replication.to_string();
        let dev = outcome.device.to_string();
        report.row(&[
            rep.clone(),
            dev.clone(),
            String::new(),
            "outage_spans".into(),
            outcome.outage_spans.to_string(),
        ])?;
        report.row(&[
            rep.clone(),
            dev.clone(),
            String::new(),
            "measured_spans".into(),
            outcome.measured_spans.to_string(),
        ])?;
        if outcome.measured_spans == 0 {
            outage_devices += 1;
            continue;
        }
        for (scheme, acc) in &outcome.per_scheme {
            let eff = acc.delivered as f64 / acc.air as f64;
            let slots = acc.slots as f64 / acc.spans as f64;
            report.row(&[
                rep.clone(),
                dev.clone(),
                scheme.label().into(),
                "efficiency".into(),
                fmt_f64(eff),
            ])?;
            report.row(&[
                rep.clone(),
                dev.clone(),
                scheme.label().into(),
                "mean_slots".into(),
                fmt_f64(slots),
            ])?;
            efficiency
                .iter_mut()
                .find(|(s, _)| s == scheme)
                .expect("scheme list is fixed")
                .1
                .push(eff);
            mean_slots
                .iter_mut()
                .find(|(s, _)| s == scheme)
                .expect("scheme list is fixed")
                .1
                .push(slots);
        }
    }
    let devices_file = report.finish()?;

    let mut quantile_report = CsvReport::create(
        &config.output_dir,
        "downlink_quantiles.csv",
        "downlink",
        &hash,
        config.base_seed,
        &notes,
        "scheme,metric,quantile,value",
    )?;
    for (label, series) in [("efficiency", &efficiency), ("mean_slots", &mean_slots)] {
        for (scheme, values) in series {
            if values.is_empty() {
                continue;
            }
            let (_, quantiles) = summarize(values.clone());
            for (q, v) in quantiles {
                quantile_report.row(&[
                    scheme.label().into(),
                    label.into(),
                    fmt_f64(q),
                    fmt_f64(v),
                ])?;
            }
        }
    }
    let quantiles_file = quantile_report.finish()?;

    Ok(DownlinkSummary {
        efficiency,
        mean_slots,
        outage_devices,
        total_devices: outcomes.len() as u64,
        files: vec![devices_file, quantiles_file],
    })
}

// ============================================================================
// Uplink campaign
// ============================================================================

/// Group devices for inter-session coding. Proximity gathers the z
/// nearest ungrouped devices around shuffled anchors; random just
/// chunks a shuffled order. Devices left over when the population is
/// not a multiple of z stay ungrouped.
fn group_devices<R: rand::Rng + ?Sized>(
    policy: GroupingPolicy,
    positions: &[Position],
    z: usize,
    rng: &mut R,
) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    match policy {
        GroupingPolicy::Random => order.chunks_exact(z).map(|c| c.to_vec()).collect(),
        GroupingPolicy::Proximity => {
            let mut grouped = vec![false; n];
            let mut groups = Vec::new();
            for &anchor in &order {
                if grouped[anchor] {
                    continue;
                }
                let mut candidates: Vec<usize> =
                    (0..n).filter(|&i| !grouped[i] && i != anchor).collect();
                if candidates.len() + 1 < z {
                    break;
                }
                // Distance ties broken by index to keep grouping stable.
                candidates.sort_by(|&a, &b| {
                    positions[a]
                        .distance(positions[anchor])
                        .partial_cmp(&positions[b].distance(positions[anchor]))
                        .expect("distances are finite")
                        .then(a.cmp(&b))
                });
                let mut group = vec![anchor];
                group.extend(candidates.into_iter().take(z - 1));
                for &i in &group {
                    grouped[i] = true;
                }
                groups.push(group);
            }
            groups
        }
    }
}

#[derive(Debug, Clone)]
struct GroupOutcome {
    replication: u32,
    group: u32,
    undecodable_spans: u64,
    measured_spans: u64,
    per_scheme: Vec<(Scheme, u64)>, // total backhaul transmissions
    delivered: u64,
}

#[derive(Debug)]
pub struct UplinkSummary {
    /// Per-group backhaul efficiency series, pooled over replications.
    pub backhaul_efficiency: Vec<(Scheme, Vec<f64>)>,
    pub undecodable_spans: u64,
    pub total_groups: u64,
    pub files: Vec<PathBuf>,
}

impl UplinkSummary {
    pub fn series(&self, scheme: Scheme) -> Option<&[f64]> {
        self.backhaul_efficiency
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, v)| v.as_slice())
    }

    pub fn median_backhaul_efficiency(&self, scheme: Scheme) -> Option<f64> {
        self.series(scheme).filter(|v| !v.is_empty()).map(median)
    }
}

/// Backhaul comparison: groups of z devices share an uplink span; the
/// device phase is common to both schemes, the backhaul phase differs.
pub fn run_uplink_campaign(config: &ExperimentConfig) -> Result<UplinkSummary, CampaignError> {
    config.validate()?;
    let field = field_for(config);
    let relays = place_relays(&config.scenario)?;
    let z = config.time_span.code_length as usize;

    let mut outcomes: Vec<GroupOutcome> = Vec::new();
    for rep in 0..config.replications {
        let mut deployment_rng = rng_for(
            config.base_seed,
            &[stream::DEPLOYMENT, stream::UPLINK, rep as u64],
        );
        let devices = drop_devices(&config.scenario, &mut deployment_rng)?;
        let groups = group_devices(config.grouping, &devices, z, &mut deployment_rng);
        let mut rep_outcomes: Vec<GroupOutcome> = groups
            .par_iter()
            .enumerate()
            .map(|(gidx, members)| {
                let mut rng = rng_for(config.base_seed, &[stream::UPLINK, rep as u64, gidx as u64]);
                let positions: Vec<Position> = members.iter().map(|&i| devices[i]).collect();
                let mut per_scheme: Vec<(Scheme, u64)> =
                    config.schemes.iter().map(|&s| (s, 0u64)).collect();
                let mut undecodable = 0u64;
                let mut measured = 0u64;
                for _ in 0..config.spans_per_device {
                    let matrix: LinkMatrix = build_link_matrix(
                        &positions,
                        &relays,
                        &config.uplink_budget,
                        &config.channel,
                        &mut rng,
                    )
                    .expect("positions are nonempty");
                    let erasures: Vec<Vec<f64>> = (0..z).map(|d| matrix.erasure_row(d)).collect();
                    let phase = uplink_device_phase(&erasures, &mut rng);
                    if !phase.excluded.is_empty() {
                        undecodable += 1;
                        continue;
                    }
                    measured += 1;
                    for (scheme, total) in per_scheme.iter_mut() {
                        *total += match scheme {
                            Scheme::Forwarding => uplink_forwarding_backhaul(&phase),
                            Scheme::NetworkCoding => uplink_nc_backhaul(&field, &phase, &mut rng)
                                .expect("exclusions guarantee coverage"),
                        };
                    }
                }
                GroupOutcome {
                    replication: rep,
                    group: gidx as u32,
                    undecodable_spans: undecodable,
                    measured_spans: measured,
                    per_scheme,
                    delivered: measured * z as u64,
                }
            })
            .collect();
        outcomes.append(&mut rep_outcomes);
    }

    let hash = config.hash();
    let notes = field_note(&field);
    let mut report = CsvReport::create(
        &config.output_dir,
        "uplink_groups.csv",
        "uplink",
        &hash,
        config.base_seed,
        &notes,
        "replication,group,scheme,metric,value",
    )?;
    let mut backhaul_efficiency: Vec<(Scheme, Vec<f64>)> =
        config.schemes.iter().map(|&s| (s, Vec::new())).collect();
    let mut undecodable_spans = 0u64;
    for outcome in &outcomes {
        let rep = outcome.replication.to_string();
        let group = outcome.group.to_string();
        report.row(&[
            rep.clone(),
            group.clone(),
            String::new(),
            "undecodable_spans".into(),
            outcome.undecodable_spans.to_string(),
        ])?;
        report.row(&[
            rep.clone(),
            group.clone(),
            String::new(),
            "measured_spans".into(),
            outcome.measured_spans.to_string(),
        ])?;
        undecodable_spans += outcome.undecodable_spans;
        if outcome.measured_spans == 0 {
            continue;
        }
        for &(scheme, total) in &outcome.per_scheme {
            let eff = outcome.delivered as f64 / total as f64;
            report.row(&[
                rep.clone(),
                group.clone(),
                scheme.label().into(),
                "backhaul_efficiency".into(),
                fmt_f64(eff),
            ])?;
            backhaul_efficiency
                .iter_mut()
                .find(|(s, _)| *s == scheme)
                .expect("scheme list is fixed")
                .1
                .push(eff);
        }
    }
    let groups_file = report.finish()?;

    let mut quantile_report = CsvReport::create(
        &config.output_dir,
        "uplink_quantiles.csv",
        "uplink",
        &hash,
        config.base_seed,
        &notes,
        "scheme,metric,quantile,value",
    )?;
    for (scheme, values) in &backhaul_efficiency {
        if values.is_empty() {
            continue;
        }
        let (_, quantiles) = summarize(values.clone());
        for (q, v) in quantiles {
            quantile_report.row(&[
                scheme.label().into(),
                "backhaul_efficiency".into(),
                fmt_f64(q),
                fmt_f64(v),
            ])?;
        }
    }
    let quantiles_file = quantile_report.finish()?;

    Ok(UplinkSummary {
        backhaul_efficiency,
        undecodable_spans,
        total_groups: outcomes.len() as u64,
        files: vec![groups_file, quantiles_file],
    })
}

// ============================================================================
// Singularity-probability validation
// ============================================================================

#[derive(Debug, Clone)]
pub struct PhiRow {
    pub code_length: u32,
    pub field_size: u32,
    pub erasure: f64,
    pub trials: u64,
    pub phi_hat: f64,
    pub std_error: f64,
    pub phi_ub: f64,
    pub feasible: bool,
}

#[derive(Debug)]
pub struct PhiSummary {
    pub rows: Vec<PhiRow>,
    pub files: Vec<PathBuf>,
}

/// Estimate the singularity probability cell by cell and emit it next
/// to the analytic upper bound.
pub fn run_phi_validation(config: &ExperimentConfig) -> Result<PhiSummary, CampaignError> {
    config.validate()?;
    let grid = &config.phi;
    let mut cells = Vec::new();
    for &z in &grid.code_lengths {
        for &q in &grid.field_sizes {
            for &p in &grid.erasures {
                cells.push((z, q, p));
            }
        }
    }
    let rows: Vec<PhiRow> = cells
        .par_iter()
        .map(|&(z, q, p)| {
            let field = FieldContext::new(q).expect("grid field sizes are powers of two");
            let mut rng = rng_for(
                config.base_seed,
                &[stream::PHI, z as u64, q as u64, p.to_bits()],
            );
            let hat = phi_oracle(&field, z as usize, p, grid.trials, &mut rng);
            let ub = phi_ub(z as u64, q as u64, p);
            PhiRow {
                code_length: z,
                field_size: q,
                erasure: p,
                trials: grid.trials,
                phi_hat: hat,
                std_error: (hat * (1.0 - hat) / grid.trials as f64).sqrt(),
                phi_ub: ub,
                feasible: ub < 1.0,
            }
        })
        .collect();

    let notes: Vec<String> = config
        .phi
        .field_sizes
        .iter()
        .map(|&q| {
            let field = FieldContext::new(q).expect("grid field sizes are powers of two");
            format!(
                "field=GF({}) reduction_polynomial=0b{:b}",
                field.size(),
                field.reduction_polynomial()
            )
        })
        .collect();
    let mut report = CsvReport::create(
        &config.output_dir,
        "phi_validation.csv",
        "phi",
        &config.hash(),
        config.base_seed,
        &notes,
        "code_length,field_size,erasure,trials,phi_hat,std_error,phi_ub,feasible",
    )?;
    for row in &rows {
        report.row(&[
            row.code_length.to_string(),
            row.field_size.to_string(),
            fmt_f64(row.erasure),
            row.trials.to_string(),
            fmt_f64(row.phi_hat),
            fmt_f64(row.std_error),
            fmt_f64(row.phi_ub),
            row.feasible.to_string(),
        ])?;
    }
    let file = report.finish()?;
    Ok(PhiSummary {
        rows,
        files: vec![file],
    })
}

// ============================================================================
// Synthetic symmetric-erasure sweeps (shared by tests and examples)
// ============================================================================

/// Simulated uplink backhaul efficiencies for a symmetric erasure
/// probability: returns ((nc_eff, nc_se), (fwd_eff, fwd_se)).
pub fn simulate_symmetric_uplink<R: rand::Rng + ?Sized>(
    field: &FieldContext,
    z: usize,
    relays: usize,
    p: f64,
    spans: u32,
    rng: &mut R,
) -> ((f64, f64), (f64, f64)) {
    let erasures = vec![vec![p; relays]; z];
    let mut nc_counts = Vec::with_capacity(spans as usize);
    let mut fwd_counts = Vec::with_capacity(spans as usize);
    for _ in 0..spans {
        let phase = uplink_device_phase(&erasures, rng);
        fwd_counts.push(uplink_forwarding_backhaul(&phase) as f64);
        nc_counts.push(
            uplink_nc_backhaul(field, &phase, rng).expect("p < 1 keeps coverage certain") as f64,
        );
    }
    (
        ratio_efficiency(z as f64, &nc_counts),
        ratio_efficiency(z as f64, &fwd_counts),
    )
}

/// Simulated downlink efficiencies over symmetric links:
/// ((nc_eff, nc_se), (fwd_eff, fwd_se)).
pub fn simulate_symmetric_downlink<R: rand::Rng + ?Sized>(
    field: &FieldContext,
    k: u32,
    erasures: &[f64],
    spans: u32,
    rng: &mut R,
) -> ((f64, f64), (f64, f64)) {
    let mut nc_counts = Vec::with_capacity(spans as usize);
    let mut fwd_counts = Vec::with_capacity(spans as usize);
    for _ in 0..spans {
        fwd_counts.push(
            downlink_forwarding(k, erasures, rng)
                .expect("links usable")
                .air_transmissions as f64,
        );
        nc_counts.push(
            downlink_nc(field, k, erasures, rng)
                .expect("links usable")
                .air_transmissions as f64,
        );
    }
    (
        ratio_efficiency(k as f64, &nc_counts),
        ratio_efficiency(k as f64, &fwd_counts),
    )
}
