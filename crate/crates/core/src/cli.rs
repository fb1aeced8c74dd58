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

//! Command-line front end of the `pathvote` binary.
//!
//! Global options pick the topology (a JSON file, the seeded generator, or
//! the bundled European approximation when neither is given), the output
//! location and the worker count. A JSON `--config` file may supply any
//! option; explicit flags take precedence.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::candidates::{enumerate_candidates, CandidateSet, PathLimits};
use crate::economics::{
    calibrate_fare_with_factor, global_net_income, path_cost, utility_matrix, Fare, UtilityMatrix, FARE_FACTOR,
};
use crate::experiment::{run_scenario, sweep, write_reports, ScenarioConfig, ScenarioMetrics};
use crate::manipulation::{analyze_stv, range_cm, Evidence, Status, DEFAULT_MAX_M};
use crate::topology::{
    europe38_approx, generate_geometric_topology, CarrierId, CostModel, CostPreset, Demand, Topology,
};
use crate::voting::{
    format_rational, range_scores, range_winner, sincere_order_ballot, sincere_range_ballot, stv_winner, VotingSystem,
};

#[derive(Debug, Parser)]
#[command(
    name = "pathvote",
    version,
    about = "Elect inter-carrier paths and measure their manipulability"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// Topology JSON file.
    #[arg(long, global = true)]
    pub topology: Option<PathBuf>,
    /// Generate a random geometric topology with this many carriers.
    #[arg(long, global = true)]
    pub gen_n: Option<usize>,
    /// Generator seed.
    #[arg(long, global = true)]
    pub gen_seed: Option<u64>,
    /// Generator target average degree.
    #[arg(long, global = true)]
    pub gen_degree: Option<f64>,
    /// Output directory (scenario, sweep) or file (gen-topology).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file with default values for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Default, Clone)]
pub struct DemandArgs {
    /// Ingress carrier, by index or name.
    #[arg(long)]
    pub ingress: Option<String>,
    /// Egress carrier, by index or name.
    #[arg(long)]
    pub egress: Option<String>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args, Default, Clone)]
pub struct ScenarioArgs {
    /// Minimum number of candidate paths.
    #[arg(long)]
    pub mmin: Option<usize>,
    /// Minimum hop slack over the shortest path.
    #[arg(long)]
    pub dmin: Option<usize>,
    /// Link cost preset: linear, intermediate or constant.
    #[arg(long)]
    pub cost_model: Option<CostPreset>,
    /// Fare as a multiple of the mean least cost.
    #[arg(long)]
    pub fare_factor: Option<f64>,
    /// Candidate count above which the STV upper-bound search is skipped.
    #[arg(long)]
    pub max_m: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the candidate paths of a demand.
    Paths(DemandArgs),
    /// Show costs, fare and the utility matrix of a demand.
    Economics(DemandArgs),
    /// Run a sincere election for a demand.
    Vote {
        #[command(flatten)]
        demand: DemandArgs,
        /// Voting system: range or stv.
        #[arg(long)]
        system: Option<VotingSystem>,
    },
    /// Decide whether a coalition can overturn the sincere winner.
    Manipulate {
        #[command(flatten)]
        demand: DemandArgs,
        /// Voting system: range or stv.
        #[arg(long)]
        system: Option<VotingSystem>,
    },
    /// Run every demand of one configuration and write reports.
    Scenario {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Restrict to one voting system.
        #[arg(long)]
        system: Option<VotingSystem>,
    },
    /// Run the six-configuration grid and write reports.
    Sweep {
        /// Fare as a multiple of the mean least cost.
        #[arg(long)]
        fare_factor: Option<f64>,
        /// Candidate count above which the STV upper-bound search is skipped.
        #[arg(long)]
        max_m: Option<usize>,
    },
    /// Write the selected topology as JSON.
    GenTopology,
}

/// Values a `--config` file may provide.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub topology: Option<PathBuf>,
    pub gen_n: Option<usize>,
    pub gen_seed: Option<u64>,
    pub gen_degree: Option<f64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub ingress: Option<String>,
    pub egress: Option<String>,
    pub m_min: Option<usize>,
    pub delta_min: Option<usize>,
    pub cost_model: Option<CostPreset>,
    pub fare_factor: Option<f64>,
    pub max_m: Option<usize>,
    pub system: Option<VotingSystem>,
}

const DEFAULT_GEN_DEGREE: f64 = 4.0;
const DEFAULT_OUT_DIR: &str = "results";

/// Flags merged over the config file.
struct Settings {
    global: GlobalArgs,
    file: FileConfig,
}

impl Settings {
    fn new(global: GlobalArgs) -> Result<Self> {
        let file = match &global.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        Ok(Settings { global, file })
    }

    fn topology(&self) -> Result<Topology> {
        let path = self.global.topology.clone().or_else(|| self.file.topology.clone());
        let gen_n = self.global.gen_n.or(self.file.gen_n);
        match (path, gen_n) {
            (Some(_), Some(_)) => bail!("give either --topology or --gen-n, not both"),
            (Some(path), None) => Topology::load(&path).with_context(|| format!("loading {}", path.display())),
            (None, Some(n)) => {
                let seed = self.global.gen_seed.or(self.file.gen_seed).unwrap_or(0);
                let degree = self
                    .global
                    .gen_degree
                    .or(self.file.gen_degree)
                    .unwrap_or(DEFAULT_GEN_DEGREE);
                Ok(generate_geometric_topology(n, seed, degree)?)
            }
            (None, None) => Ok(europe38_approx()),
        }
    }

    fn out(&self) -> Option<PathBuf> {
        self.global.out.clone().or_else(|| self.file.out.clone())
    }

    fn jobs(&self) -> Option<usize> {
        self.global.jobs.or(self.file.jobs)
    }

    fn system(&self, flag: Option<VotingSystem>) -> VotingSystem {
        flag.or(self.file.system).unwrap_or(VotingSystem::Stv)
    }

    fn scenario(&self, args: &ScenarioArgs) -> ScenarioConfig {
        let defaults = ScenarioConfig::default();
        ScenarioConfig {
            path_limits: PathLimits::new(
                args.mmin.or(self.file.m_min).unwrap_or(defaults.path_limits.m_min),
                args.dmin
                    .or(self.file.delta_min)
                    .unwrap_or(defaults.path_limits.delta_min),
            ),
            cost_model: args.cost_model.or(self.file.cost_model).unwrap_or(defaults.cost_model),
            fare_factor: args.fare_factor.or(self.file.fare_factor).unwrap_or(FARE_FACTOR),
            max_m: args.max_m.or(self.file.max_m).unwrap_or(DEFAULT_MAX_M),
            systems: defaults.systems,
        }
    }

    fn demand(&self, topology: &Topology, args: &DemandArgs) -> Result<Demand> {
        let ingress = args.ingress.clone().or_else(|| self.file.ingress.clone());
        let egress = args.egress.clone().or_else(|| self.file.egress.clone());
        let ingress = resolve_carrier(
            topology,
            ingress.as_deref().ok_or_else(|| anyhow!("--ingress is required"))?,
        )?;
        let egress = resolve_carrier(
            topology,
            egress.as_deref().ok_or_else(|| anyhow!("--egress is required"))?,
        )?;
        Demand::new(ingress, egress).ok_or_else(|| anyhow!("ingress and egress must differ"))
    }
}

fn resolve_carrier(topology: &Topology, key: &str) -> Result<CarrierId> {
    if let Ok(index) = key.parse::<usize>() {
        if index < topology.len() {
            return Ok(CarrierId(index));
        }
        bail!("carrier index {index} out of range (topology has {})", topology.len());
    }
    topology
        .carrier_by_name(key)
        .ok_or_else(|| anyhow!("no carrier named {key:?}"))
}

/// Everything needed to analyze one demand.
struct DemandContext {
    topology: Topology,
    cost: CostModel,
    fare: Fare,
    candidates: CandidateSet,
    utilities: UtilityMatrix,
    max_m: usize,
}

impl DemandContext {
    fn new(settings: &Settings, args: &DemandArgs) -> Result<Self> {
        let topology = settings.topology()?;
        let config = settings.scenario(&args.scenario);
        let demand = settings.demand(&topology, args)?;
        let cost = config
            .cost_model
            .model(&topology)
            .ok_or_else(|| anyhow!("topology has no links"))?;
        let fare = calibrate_fare_with_factor(&topology, &cost, config.fare_factor);
        let candidates = enumerate_candidates(&topology, demand, config.path_limits);
        let utilities = utility_matrix(&candidates, &topology, &cost, fare)?;
        Ok(DemandContext {
            topology,
            cost,
            fare,
            candidates,
            utilities,
            max_m: config.max_m,
        })
    }

    fn carrier_name(&self, row: usize) -> &str {
        &self.topology.carrier(self.utilities.electorate()[row]).name
    }
}

fn print_paths(out: &mut impl Write, ctx: &DemandContext) -> Result<()> {
    let cs = &ctx.candidates;
    writeln!(
        out,
        "demand {} -> {}: {} candidates, h_min {}, delta_h {}{}",
        ctx.topology.carrier(cs.demand.ingress).name,
        ctx.topology.carrier(cs.demand.egress).name,
        cs.len(),
        cs.h_min,
        cs.delta_h,
        if cs.saturated { " (all loop-free paths)" } else { "" }
    )?;
    for (j, path) in cs.paths.iter().enumerate() {
        writeln!(
            out,
            "{j:>4}  {} hops  {}",
            path.hops(),
            path.display_names(&ctx.topology)
        )?;
    }
    Ok(())
}

fn print_economics(out: &mut impl Write, ctx: &DemandContext) -> Result<()> {
    writeln!(out, "cost model c0 = {}, d0 = {}", ctx.cost.c0, ctx.cost.d0)?;
    writeln!(out, "fare {:.6}", ctx.fare.amount())?;
    writeln!(out, "{:>4}  {:>12}  {:>12}  path", "j", "cost", "income")?;
    for (j, path) in ctx.candidates.paths.iter().enumerate() {
        writeln!(
            out,
            "{j:>4}  {:>12.6}  {:>12.6}  {}",
            path_cost(&ctx.topology, &ctx.cost, path),
            global_net_income(&ctx.utilities, j),
            path.display_names(&ctx.topology)
        )?;
    }
    writeln!(
        out,
        "utilities (rows: electors, columns: candidates; '.' = not on path)"
    )?;
    for row in 0..ctx.utilities.electors() {
        let cells: Vec<String> = (0..ctx.utilities.candidates())
            .map(|j| {
                if ctx.utilities.is_on_path(row, j) {
                    format!("{:>10.4}", ctx.utilities.value(row, j))
                } else {
                    format!("{:>10}", ".")
                }
            })
            .collect();
        writeln!(out, "{:<24}{}", ctx.carrier_name(row), cells.join(""))?;
    }
    Ok(())
}

fn print_vote(out: &mut impl Write, ctx: &DemandContext, system: VotingSystem) -> Result<()> {
    let u = &ctx.utilities;
    let result = match system {
        VotingSystem::Range => {
            let ballots: Vec<_> = (0..u.electors()).map(|row| sincere_range_ballot(u, row)).collect();
            let scores: Vec<String> = range_scores(&ballots)?
                .iter()
                .enumerate()
                .map(|(c, s)| format!("{c}:{}", format_rational(s)))
                .collect();
            writeln!(out, "scores  {}", scores.join(" "))?;
            range_winner(&ballots)?
        }
        VotingSystem::Stv => {
            let ballots: Vec<_> = (0..u.electors()).map(|row| sincere_order_ballot(u, row)).collect();
            let result = stv_winner(&ballots)?;
            for (k, round) in result.rounds.iter().enumerate() {
                let cells: Vec<String> = round
                    .tallies
                    .iter()
                    .map(|(c, t)| format!("{c}:{}", format_rational(t)))
                    .collect();
                writeln!(
                    out,
                    "round {}  {}  eliminated {}",
                    k + 1,
                    cells.join(" "),
                    round.eliminated
                )?;
            }
            result
        }
    };
    let winner = result.winner;
    writeln!(
        out,
        "{system} winner: {winner} ({}), income {:.6}",
        ctx.candidates.paths[winner].display_names(&ctx.topology),
        global_net_income(u, winner)
    )?;
    Ok(())
}

fn describe_evidence(ctx: &DemandContext, evidence: &Evidence) -> String {
    match evidence {
        Evidence::RangeProfile(p) => {
            let names: Vec<&str> = p.iter().map(|(row, _)| ctx.carrier_name(*row)).collect();
            format!("coalition {}", names.join(", "))
        }
        Evidence::OrderProfile(p) => {
            let names: Vec<&str> = p.iter().map(|(row, _)| ctx.carrier_name(*row)).collect();
            format!("coalition {}", names.join(", "))
        }
        Evidence::EliminationOrder(order) => {
            let items: Vec<String> = order.iter().map(usize::to_string).collect();
            format!("relaxed elimination order {}", items.join(" "))
        }
    }
}

fn print_manipulation(out: &mut impl Write, ctx: &DemandContext, system: VotingSystem) -> Result<()> {
    let u = &ctx.utilities;
    let list = |c: &[usize]| c.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    match system {
        VotingSystem::Range => {
            let v = range_cm(u);
            write!(out, "range: {}", v.status)?;
            if let (Some(c), Some(e)) = (v.challenger, &v.evidence) {
                write!(out, ", challenger {c}, {}", describe_evidence(ctx, e))?;
            }
            writeln!(out)?;
            if !v.successful_challengers.is_empty() {
                writeln!(out, "successful challengers: {}", list(&v.successful_challengers))?;
            }
        }
        VotingSystem::Stv => {
            let a = analyze_stv(u, ctx.max_m);
            writeln!(out, "stv: {} (sincere winner {})", a.verdict, a.sincere_winner)?;
            write!(out, "  trivial manipulation: {}", a.tm.status)?;
            if let (Some(c), Some(e)) = (a.tm.challenger, &a.tm.evidence) {
                write!(out, ", challenger {c}, {}", describe_evidence(ctx, e))?;
            }
            writeln!(out)?;
            if !a.tm.successful_challengers.is_empty() {
                writeln!(out, "  successful challengers: {}", list(&a.tm.successful_challengers))?;
            }
            match &a.upper {
                None => writeln!(out, "  upper bound: not needed")?,
                Some(up) if up.status == Status::Inconclusive => writeln!(
                    out,
                    "  upper bound: skipped ({} candidates > {})",
                    u.candidates(),
                    ctx.max_m
                )?,
                Some(up) => {
                    write!(out, "  upper bound: {}", up.status)?;
                    if let (Some(c), Some(e)) = (up.challenger, &up.evidence) {
                        write!(out, ", challenger {c}, {}", describe_evidence(ctx, e))?;
                    }
                    writeln!(out)?;
                }
            }
        }
    }
    Ok(())
}

fn print_summary(out: &mut impl Write, scenarios: &[ScenarioMetrics]) -> Result<()> {
    writeln!(
        out,
        "{:<22}{:<7}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}{:>9}",
        "scenario", "system", "sincere", "tm", "cm_low", "cm_up", "ins_avg", "ins_wst", "random"
    )?;
    for s in scenarios {
        for m in &s.systems {
            writeln!(
                out,
                "{:<22}{:<7}{:>9.2}{:>9.2}{:>9.2}{:>9.2}{:>9.2}{:>9.2}{:>9.2}",
                s.scenario,
                m.system.name(),
                m.sincere_efficiency,
                m.tm_rate,
                m.cm_lower,
                m.cm_upper,
                m.insincere_efficiency_avg,
                m.insincere_efficiency_worst,
                s.random_efficiency
            )?;
            if m.clamping_incidents > 0 {
                writeln!(out, "  warning: {} demands needed note clamping", m.clamping_incidents)?;
            }
        }
    }
    Ok(())
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        builder = builder.num_threads(jobs);
    }
    Ok(builder.build()?.install(f))
}

fn write_outputs(dir: &Path, scenarios: &[ScenarioMetrics]) -> Result<()> {
    write_reports(dir, scenarios).with_context(|| format!("writing reports to {}", dir.display()))
}

/// Executes a parsed command line, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    let settings = Settings::new(cli.global)?;
    match cli.command {
        Command::Paths(args) => print_paths(out, &DemandContext::new(&settings, &args)?),
        Command::Economics(args) => print_economics(out, &DemandContext::new(&settings, &args)?),
        Command::Vote { demand, system } => {
            print_vote(out, &DemandContext::new(&settings, &demand)?, settings.system(system))
        }
        Command::Manipulate { demand, system } => {
            print_manipulation(out, &DemandContext::new(&settings, &demand)?, settings.system(system))
        }
        Command::Scenario { scenario, system } => {
            let topology = settings.topology()?;
            let mut config = settings.scenario(&scenario);
            if let Some(system) = system.or(settings.file.system) {
                config.systems = vec![system];
            }
            let metrics = with_pool(settings.jobs(), || run_scenario(&topology, &config))??;
            let dir = settings.out().unwrap_or_else(|| DEFAULT_OUT_DIR.into());
            write_outputs(&dir, std::slice::from_ref(&metrics))?;
            print_summary(out, std::slice::from_ref(&metrics))
        }
        Command::Sweep { fare_factor, max_m } => {
            let topology = settings.topology()?;
            let template = settings.scenario(&ScenarioArgs {
                fare_factor,
                max_m,
                ..ScenarioArgs::default()
            });
            let all = with_pool(settings.jobs(), || sweep(&topology, &template))??;
            let dir = settings.out().unwrap_or_else(|| DEFAULT_OUT_DIR.into());
            write_outputs(&dir, &all)?;
            print_summary(out, &all)
        }
        Command::GenTopology => {
            let json = settings.topology()?.to_json();
            match settings.out() {
                Some(path) => std::fs::write(&path, json).with_context(|| format!("writing {}", path.display())),
                None => Ok(out.write_all(json.as_bytes())?),
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
