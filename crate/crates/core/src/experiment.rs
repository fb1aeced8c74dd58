// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Scenario runner: every demand of a topology through candidate selection,
//! utilities, sincere elections and manipulation analysis, aggregated into
//! efficiency and manipulability rates.
//!
//! Output files, all written by [`write_reports`]:
//!
//! * `scenario_summary.csv`: one row per scenario and voting system, columns
//!   [`SUMMARY_COLUMNS`].
//! * `demands_detail.csv`: one row per scenario, demand and voting system,
//!   columns [`DETAIL_COLUMNS`].
//! * `report.json`: the same data as nested objects.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidates::{enumerate_candidates, PathLimits};
use crate::economics::{
    calibrate_fare_with_factor, efficiency, exact_sum, global_net_income, utility_matrix, EconomicsError, Fare,
    FARE_FACTOR,
};
use crate::manipulation::{analyze_stv, insincere_outcomes, range_cm, range_sincere_winner, Status, DEFAULT_MAX_M};
use crate::topology::{all_demands, CostModel, CostPreset, Demand, Topology};
use crate::voting::{needs_clamping, VotingSystem};

pub const SUMMARY_FILE: &str = "scenario_summary.csv";
pub const DETAIL_FILE: &str = "demands_detail.csv";
pub const REPORT_FILE: &str = "report.json";

pub const SUMMARY_COLUMNS: [&str; 21] = [
    "scenario",
    "m_min",
    "delta_min",
    "cost_model",
    "c0",
    "d0",
    "fare",
    "demands",
    "mean_candidates",
    "system",
    "sincere_efficiency",
    "tm_rate",
    "cm_lower",
    "cm_upper",
    "inconclusive_rate",
    "insincere_efficiency_avg",
    "insincere_efficiency_worst",
    "random_efficiency",
    "worst_efficiency",
    "mean_demand_efficiency",
    "clamping_incidents",
];

pub const DETAIL_COLUMNS: [&str; 21] = [
    "scenario",
    "ingress",
    "egress",
    "m",
    "h_min",
    "delta_h",
    "saturated",
    "electors",
    "system",
    "sincere_winner",
    "verdict",
    "tm",
    "upper",
    "challengers",
    "optimal_income",
    "sincere_income",
    "insincere_avg_income",
    "insincere_worst_income",
    "sincere_ratio",
    "random_income",
    "worst_income",
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("topology has no links to derive a cost model from")]
    NoLinks,
    #[error("fewer than two carriers")]
    TooSmall,
    #[error(transparent)]
    Economics(#[from] EconomicsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One point of the configuration grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub path_limits: PathLimits,
    pub cost_model: CostPreset,
    pub fare_factor: f64,
    pub max_m: usize,
    pub systems: Vec<VotingSystem>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            path_limits: PathLimits::FEW,
            cost_model: CostPreset::Intermediate,
            fare_factor: FARE_FACTOR,
            max_m: DEFAULT_MAX_M,
            systems: VotingSystem::ALL.to_vec(),
        }
    }
}

impl ScenarioConfig {
    /// Stable identifier such as `m5_d0_intermediate`.
    pub fn label(&self) -> String {
        format!(
            "m{}_d{}_{}",
            self.path_limits.m_min,
            self.path_limits.delta_min,
            self.cost_model.name()
        )
    }

    /// The six path-limit and cost-model combinations, other fields copied
    /// from `self`.
    pub fn grid(&self) -> Vec<ScenarioConfig> {
        PathLimits::PRESETS
            .iter()
            .flat_map(|&path_limits| {
                CostPreset::ALL.iter().map(move |&cost_model| ScenarioConfig {
                    path_limits,
                    cost_model,
                    ..self.clone()
                })
            })
            .collect()
    }
}

/// Outcome of one voting system on one demand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemRecord {
    pub system: VotingSystem,
    pub sincere_winner: usize,
    /// Exact for range voting; the combined bound verdict for STV.
    pub verdict: Status,
    /// Whether trivial manipulation succeeds.
    pub tm: bool,
    /// Relaxed-search status, STV only and only when trivial manipulation
    /// failed.
    pub upper: Option<Status>,
    pub successful_challengers: Vec<usize>,
    pub sincere_income: f64,
    pub insincere_avg_income: f64,
    pub insincere_worst_income: f64,
    /// Some sincere range note fell outside `[-A, A]`.
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandRecord {
    pub demand: Demand,
    pub candidates: usize,
    pub h_min: usize,
    pub delta_h: usize,
    pub saturated: bool,
    pub electors: usize,
    pub optimal_income: f64,
    /// Mean income over candidates.
    pub random_income: f64,
    /// Lowest income over candidates.
    pub worst_income: f64,
    pub systems: Vec<SystemRecord>,
}

impl DemandRecord {
    pub fn system(&self, system: VotingSystem) -> Option<&SystemRecord> {
        self.systems.iter().find(|r| r.system == system)
    }
}

/// Aggregates of one voting system over all demands; rates and
/// efficiencies in percent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemMetrics {
    pub system: VotingSystem,
    pub sincere_efficiency: f64,
    pub tm_rate: f64,
    pub cm_lower: f64,
    pub cm_upper: f64,
    pub inconclusive_rate: f64,
    pub insincere_efficiency_avg: f64,
    pub insincere_efficiency_worst: f64,
    /// Mean of per-demand sincere income ratios.
    pub mean_demand_efficiency: f64,
    pub clamping_incidents: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub cost: CostModel,
    pub fare: Fare,
    pub demands: usize,
    pub mean_candidates: f64,
    pub random_efficiency: f64,
    pub worst_efficiency: f64,
    pub systems: Vec<SystemMetrics>,
    pub records: Vec<DemandRecord>,
}

impl ScenarioMetrics {
    pub fn system(&self, system: VotingSystem) -> Option<&SystemMetrics> {
        self.systems.iter().find(|m| m.system == system)
    }
}

/// Full analysis of one demand.
pub fn run_demand(
    topology: &Topology,
    cost: &CostModel,
    fare: Fare,
    demand: Demand,
    config: &ScenarioConfig,
) -> Result<DemandRecord, ExperimentError> {
    let candidates = enumerate_candidates(topology, demand, config.path_limits);
    let utilities = utility_matrix(&candidates, topology, cost, fare)?;
    let incomes: Vec<f64> = (0..candidates.len())
        .map(|j| global_net_income(&utilities, j))
        .collect();
    let optimal_income = incomes.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let systems = config
        .systems
        .iter()
        .map(|&system| match system {
            VotingSystem::Range => {
                let winner = range_sincere_winner(&utilities);
                let verdict = range_cm(&utilities);
                let outcome = insincere_outcomes(&utilities, winner, &verdict.successful_challengers);
                SystemRecord {
                    system,
                    sincere_winner: winner,
                    verdict: verdict.status,
                    tm: verdict.is_manipulable(),
                    upper: None,
                    successful_challengers: verdict.successful_challengers,
                    sincere_income: incomes[winner],
                    insincere_avg_income: outcome.average,
                    insincere_worst_income: outcome.worst,
                    clamped: (0..utilities.electors()).any(|row| needs_clamping(&utilities, row)),
                }
            }
            VotingSystem::Stv => {
                let analysis = analyze_stv(&utilities, config.max_m);
                let winner = analysis.sincere_winner;
                let outcome = insincere_outcomes(&utilities, winner, &analysis.tm.successful_challengers);
                SystemRecord {
                    system,
                    sincere_winner: winner,
                    verdict: analysis.verdict,
                    tm: analysis.tm.is_manipulable(),
                    upper: analysis.upper.map(|u| u.status),
                    successful_challengers: analysis.tm.successful_challengers,
                    sincere_income: incomes[winner],
                    insincere_avg_income: outcome.average,
                    insincere_worst_income: outcome.worst,
                    clamped: false,
                }
            }
        })
        .collect();

    Ok(DemandRecord {
        demand,
        candidates: candidates.len(),
        h_min: candidates.h_min,
        delta_h: candidates.delta_h,
        saturated: candidates.saturated,
        electors: utilities.electors(),
        optimal_income,
        random_income: exact_sum(incomes.iter().copied()) / incomes.len() as f64,
        worst_income: incomes.iter().copied().fold(f64::INFINITY, f64::min),
        systems,
    })
}

fn percent(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

/// Aggregates demand records of one scenario. Every aggregate is a ratio of
/// exact sums, so the result does not depend on record order.
pub fn aggregate(
    config: &ScenarioConfig,
    cost: CostModel,
    fare: Fare,
    records: Vec<DemandRecord>,
) -> Result<ScenarioMetrics, ExperimentError> {
    let total = records.len();
    let optimal: Vec<f64> = records.iter().map(|r| r.optimal_income).collect();
    let column = |f: &dyn Fn(&DemandRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let random_efficiency = efficiency(&column(&|r| r.random_income), &optimal)?;
    let worst_efficiency = efficiency(&column(&|r| r.worst_income), &optimal)?;

    let mut systems = Vec::with_capacity(config.systems.len());
    for &system in &config.systems {
        let rows: Vec<&SystemRecord> = records.iter().filter_map(|r| r.system(system)).collect();
        let pick = |f: &dyn Fn(&SystemRecord) -> f64| -> Vec<f64> { rows.iter().map(|r| f(r)).collect() };
        let count = |f: &dyn Fn(&SystemRecord) -> bool| rows.iter().filter(|r| f(r)).count();
        let tm = count(&|r| r.tm);
        let ratios: Vec<f64> = records
            .iter()
            .zip(&rows)
            .map(|(d, r)| r.sincere_income / d.optimal_income)
            .collect();
        systems.push(SystemMetrics {
            system,
            sincere_efficiency: efficiency(&pick(&|r| r.sincere_income), &optimal)?,
            tm_rate: percent(tm, total),
            cm_lower: percent(tm, total),
            cm_upper: percent(count(&|r| r.verdict != Status::NotManipulable), total),
            inconclusive_rate: percent(count(&|r| r.verdict == Status::Inconclusive), total),
            insincere_efficiency_avg: efficiency(&pick(&|r| r.insincere_avg_income), &optimal)?,
            insincere_efficiency_worst: efficiency(&pick(&|r| r.insincere_worst_income), &optimal)?,
            mean_demand_efficiency: 100.0 * exact_sum(ratios.iter().copied()) / total as f64,
            clamping_incidents: count(&|r| r.clamped),
        });
    }

    Ok(ScenarioMetrics {
        scenario: config.label(),
        config: config.clone(),
        cost,
        fare,
        demands: total,
        mean_candidates: records.iter().map(|r| r.candidates).sum::<usize>() as f64 / total as f64,
        random_efficiency,
        worst_efficiency,
        systems,
        records,
    })
}

/// Runs every demand of `topology` under `config`, in parallel on the
/// current rayon pool.
pub fn run_scenario(topology: &Topology, config: &ScenarioConfig) -> Result<ScenarioMetrics, ExperimentError> {
    if topology.len() < 2 {
        return Err(ExperimentError::TooSmall);
    }
    let cost = config.cost_model.model(topology).ok_or(ExperimentError::NoLinks)?;
    let fare = calibrate_fare_with_factor(topology, &cost, config.fare_factor);
    let records = all_demands(topology)
        .into_par_iter()
        .map(|demand| run_demand(topology, &cost, fare, demand, config))
        .collect::<Result<Vec<_>, _>>()?;
    aggregate(config, cost, fare, records)
}

/// Runs the six-scenario grid derived from `template`.
pub fn sweep(topology: &Topology, template: &ScenarioConfig) -> Result<Vec<ScenarioMetrics>, ExperimentError> {
    template
        .grid()
        .iter()
        .map(|config| run_scenario(topology, config))
        .collect()
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    scenario: &'a str,
    m_min: usize,
    delta_min: usize,
    cost_model: &'a str,
    c0: f64,
    d0: f64,
    fare: f64,
    demands: usize,
    mean_candidates: f64,
    system: &'a str,
    sincere_efficiency: f64,
    tm_rate: f64,
    cm_lower: f64,
    cm_upper: f64,
    inconclusive_rate: f64,
    insincere_efficiency_avg: f64,
    insincere_efficiency_worst: f64,
    random_efficiency: f64,
    worst_efficiency: f64,
    mean_demand_efficiency: f64,
    clamping_incidents: usize,
}

#[derive(Serialize)]
struct DetailRow<'a> {
    scenario: &'a str,
    ingress: usize,
    egress: usize,
    m: usize,
    h_min: usize,
    delta_h: usize,
    saturated: bool,
    electors: usize,
    system: &'a str,
    sincere_winner: usize,
    verdict: &'a str,
    tm: bool,
    upper: &'a str,
    challengers: String,
    optimal_income: f64,
    sincere_income: f64,
    insincere_avg_income: f64,
    insincere_worst_income: f64,
    sincere_ratio: f64,
    random_income: f64,
    worst_income: f64,
}

pub fn write_summary_csv<W: Write>(out: W, scenarios: &[ScenarioMetrics]) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(out);
    for s in scenarios {
        for m in &s.systems {
            writer.serialize(SummaryRow {
                scenario: &s.scenario,
                m_min: s.config.path_limits.m_min,
                delta_min: s.config.path_limits.delta_min,
                cost_model: s.config.cost_model.name(),
                c0: s.cost.c0,
                d0: s.cost.d0,
                fare: s.fare.amount(),
                demands: s.demands,
                mean_candidates: s.mean_candidates,
                system: m.system.name(),
                sincere_efficiency: m.sincere_efficiency,
                tm_rate: m.tm_rate,
                cm_lower: m.cm_lower,
                cm_upper: m.cm_upper,
                inconclusive_rate: m.inconclusive_rate,
                insincere_efficiency_avg: m.insincere_efficiency_avg,
                insincere_efficiency_worst: m.insincere_efficiency_worst,
                random_efficiency: s.random_efficiency,
                worst_efficiency: s.worst_efficiency,
                mean_demand_efficiency: m.mean_demand_efficiency,
                clamping_incidents: m.clamping_incidents,
            })?;
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_detail_csv<W: Write>(out: W, scenarios: &[ScenarioMetrics]) -> Result<(), ExperimentError> {
    let mut writer = csv::Writer::from_writer(out);
    for s in scenarios {
        for d in &s.records {
            for r in &d.systems {
                let challengers: Vec<String> = r.successful_challengers.iter().map(usize::to_string).collect();
                writer.serialize(DetailRow {
                    scenario: &s.scenario,
                    ingress: d.demand.ingress.index(),
                    egress: d.demand.egress.index(),
                    m: d.candidates,
                    h_min: d.h_min,
                    delta_h: d.delta_h,
                    saturated: d.saturated,
                    electors: d.electors,
                    system: r.system.name(),
                    sincere_winner: r.sincere_winner,
                    verdict: r.verdict.name(),
                    tm: r.tm,
                    upper: r.upper.map_or("", Status::name),
                    challengers: challengers.join(";"),
                    optimal_income: d.optimal_income,
                    sincere_income: r.sincere_income,
                    insincere_avg_income: r.insincere_avg_income,
                    insincere_worst_income: r.insincere_worst_income,
                    sincere_ratio: r.sincere_income / d.optimal_income,
                    random_income: d.random_income,
                    worst_income: d.worst_income,
                })?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

pub fn write_report_json<W: Write>(mut out: W, scenarios: &[ScenarioMetrics]) -> Result<(), ExperimentError> {
    serde_json::to_writer_pretty(&mut out, scenarios)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes the summary, detail and JSON reports into `dir`, creating it if
/// needed.
pub fn write_reports(dir: &Path, scenarios: &[ScenarioMetrics]) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir)?;
    write_summary_csv(BufWriter::new(File::create(dir.join(SUMMARY_FILE))?), scenarios)?;
    write_detail_csv(BufWriter::new(File::create(dir.join(DETAIL_FILE))?), scenarios)?;
    let mut json = BufWriter::new(File::create(dir.join(REPORT_FILE))?);
    write_report_json(&mut json, scenarios)?;
    json.flush()?;
    Ok(())
}
