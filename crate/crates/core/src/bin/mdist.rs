//! Command-line entry point: validate instances, evaluate mechanisms,
//! replicate the lower-bound constructions, sweep bound tables, and
//! search for high-distortion instances.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use metric_distortion::bounds::{proven_upper_bound, Space};
use metric_distortion::constructions::{self, ConstructionId, ConstructionParams};
use metric_distortion::error::Result;
use metric_distortion::eval::{distortion, omniscient_distortion, Objective};
use metric_distortion::instance::{Instance, DEFAULT_TAU};
use metric_distortion::mechanisms::{MechanismId, MechanismKind};
use metric_distortion::search::{hill_climb, random_instance, SearchConfig};
use metric_distortion::ALPHA_STAR;

#[derive(Parser)]
#[command(name = "mdist", about = "Metric distortion with threshold approvals", version)]
struct Cli {
    /// Absolute comparison tolerance; also read from MDIST_TAU.
    #[arg(long, global = true, env = "MDIST_TAU", default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the metric axioms.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run one mechanism on an instance file and report its distortion.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        mechanism: String,
        #[arg(long, default_value_t = ALPHA_STAR)]
        alpha: f64,
        #[arg(long, default_value = "sc")]
        objective: String,
    },
    /// Generate a lower-bound construction and verify its predictions.
    Construct(ConstructArgs),
    /// Evaluate the mechanism/bound table over a random corpus.
    Sweep {
        #[arg(long, value_enum, default_value_t = SpaceArg::Line)]
        space: SpaceArg,
        /// Comma-separated threshold grid.
        #[arg(long, value_delimiter = ',', default_values_t = vec![ALPHA_STAR])]
        alphas: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_agents: usize,
        #[arg(long, default_value_t = 4)]
        max_alternatives: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Hill-climb for high-distortion instances of one mechanism.
    Search {
        #[arg(long)]
        mechanism: String,
        #[arg(long, default_value_t = ALPHA_STAR)]
        alpha: f64,
        #[arg(long, default_value = "sc")]
        objective: String,
        #[arg(long, value_enum, default_value_t = SpaceArg::Line)]
        space: SpaceArg,
        #[arg(long, default_value_t = 2)]
        min_agents: usize,
        #[arg(long, default_value_t = 5)]
        max_agents: usize,
        #[arg(long, default_value_t = 2)]
        min_alternatives: usize,
        #[arg(long, default_value_t = 4)]
        max_alternatives: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        step_size: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    id: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 1e-6)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    target: usize,
    /// Skip re-verification (cubic in instance size); predictions and the
    /// realized ratio are still reported.
    #[arg(long)]
    skip_verify: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    Line,
    General,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Space {
        match s {
            SpaceArg::Line => Space::Line,
            SpaceArg::General => Space::General,
        }
    }
}

/// Plain-decimal formatting with 12 significant digits, for stable
/// regression diffs in tabular output.
fn fmt12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

fn read_instance(path: &PathBuf) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| {
        metric_distortion::Error::Structural(format!("{}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        metric_distortion::Error::Structural(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| metric_distortion::Error::Structural(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| metric_distortion::Error::Structural(e.to_string()))
        }
    }
}

/// Every (mechanism, objective) row of the bound table for a space.
fn table_rows(space: Space, alphas: &[f64]) -> Vec<(MechanismId, Objective)> {
    let mut rows = Vec::new();
    for &alpha in alphas {
        let cells: &[(MechanismKind, Objective)] = match space {
            Space::General => &[
                (MechanismKind::MinisumTas, Objective::SocialCost),
                (MechanismKind::MostCompactSet, Objective::MaxCost),
                (MechanismKind::AnyApproved, Objective::MaxCost),
            ],
            Space::Line => &[
                (MechanismKind::MinisumTas, Objective::SocialCost),
                (MechanismKind::EliminationWeightedMajority, Objective::SocialCost),
                (MechanismKind::MostCompactSet, Objective::MaxCost),
                (MechanismKind::AnyApproved, Objective::MaxCost),
                (MechanismKind::MaxTasLeftmost, Objective::MaxCost),
                (MechanismKind::MinisumTas, Objective::MaxCost),
                (MechanismKind::MinimaxTas, Objective::MaxCost),
            ],
        };
        for &(kind, objective) in cells {
            if let Ok(id) = MechanismId::new(kind, alpha) {
                rows.push((id, objective));
            }
        }
    }
    if let Ok(id) = MechanismId::new(MechanismKind::TopChoiceDictator, 1.0) {
        rows.push((id, Objective::SocialCost));
    }
    rows
}

fn run(cli: &Cli) -> Result<i32> {
    let tau = cli.tau;
    match &cli.command {
        Command::Validate { input } => {
            let instance = read_instance(input)?;
            let validation = instance.validate(tau)?;
            emit(
                &cli.output,
                &serde_json::to_string_pretty(&validation).unwrap(),
            )?;
            Ok(if validation.is_ok() { 0 } else { 1 })
        }
        Command::Eval {
            input,
            mechanism,
            alpha,
            objective,
        } => {
            let instance = read_instance(input)?;
            let objective = Objective::parse(objective)?;
            let id = MechanismId::new(MechanismKind::parse(mechanism)?, *alpha)?;
            let report = distortion(&instance, &id, objective, tau)?;
            let space = match instance {
                Instance::Line(_) => Space::Line,
                Instance::General(_) => Space::General,
            };
            let bound = proven_upper_bound(&id, objective, space, instance.n_agents());
            let violation = !report.degenerate
                && bound.map_or(false, |b| report.ratio > b + tau);
            let mut doc = serde_json::to_value(&report).unwrap();
            doc["proven_bound"] = json!(bound);
            doc["violation"] = json!(violation);
            emit(&cli.output, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if violation { 1 } else { 0 })
        }
        Command::Construct(args) => {
            let id = ConstructionId::parse(&args.id)?;
            let params = ConstructionParams {
                n: args.n,
                alpha: args.alpha,
                eps: args.eps,
                delta: args.delta,
                target: args.target,
            };
            let built = constructions::build(id, &params)?;
            let report = if args.skip_verify {
                None
            } else {
                Some(constructions::verify(&built, tau)?)
            };
            let realized = metric_distortion::eval::cost(
                &built.instance,
                built.adversarial_winner,
                built.objective,
            ) / metric_distortion::eval::cost(&built.instance, built.best, built.objective);
            let pass = report.as_ref().map_or(true, |r| r.pass());
            let doc = json!({
                "construction": built,
                "predicted_ratio": built.predicted_ratio(),
                "predicted_ratio_text": fmt12(built.predicted_ratio()),
                "realized_ratio": realized,
                "realized_ratio_text": fmt12(realized),
                "verify": report,
                "pass": pass,
            });
            emit(&cli.output, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Sweep {
            space,
            alphas,
            count,
            max_agents,
            max_alternatives,
            seed,
            format,
        } => {
            for &alpha in alphas {
                if alpha < 1.0 {
                    return Err(metric_distortion::Error::Parameter(format!(
                        "alpha grid values must be >= 1, got {alpha}"
                    )));
                }
            }
            let space = Space::from(*space);
            let rows = table_rows(space, alphas);
            let corpus: Vec<Instance> = (0..*count)
                .map(|c| {
                    let s = *seed ^ (c as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    let n = 1 + (s as usize % *max_agents);
                    let m = 1 + ((s >> 8) as usize % *max_alternatives);
                    random_instance(space, n, m, s)
                })
                .collect::<Result<_>>()?;

            let mut any_violation = false;
            let mut cells = Vec::new();
            for (id, objective) in rows {
                let mut max_ratio: f64 = 1.0;
                let mut max_n = 1;
                for instance in &corpus {
                    let report = distortion(instance, &id, objective, tau)?;
                    if !report.degenerate && report.ratio > max_ratio {
                        max_ratio = report.ratio;
                        max_n = instance.n_agents();
                    }
                }
                let bound = proven_upper_bound(&id, objective, space, max_n);
                let violation = bound.map_or(false, |b| max_ratio > b + tau);
                any_violation |= violation;
                cells.push((id, objective, max_ratio, bound, violation));
            }

            let text = match format {
                Format::Csv => {
                    let mut t = String::from(
                        "mechanism,alpha,objective,space,max_ratio,proven_bound,violation\n",
                    );
                    for (id, objective, max_ratio, bound, violation) in &cells {
                        t.push_str(&format!(
                            "{},{},{},{},{},{},{}\n",
                            id.kind.name(),
                            fmt12(id.alpha),
                            objective.name(),
                            space.name(),
                            fmt12(*max_ratio),
                            bound.map(fmt12).unwrap_or_default(),
                            violation
                        ));
                    }
                    t
                }
                Format::Json => {
                    let rows: Vec<_> = cells
                        .iter()
                        .map(|(id, objective, max_ratio, bound, violation)| {
                            json!({
                                "mechanism": id.kind.name(),
                                "alpha": id.alpha,
                                "objective": objective.name(),
                                "space": space.name(),
                                "max_ratio": max_ratio,
                                "max_ratio_text": fmt12(*max_ratio),
                                "proven_bound": bound,
                                "violation": violation,
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&json!({
                        "seed": seed,
                        "count": count,
                        "rows": rows,
                    }))
                    .unwrap()
                }
            };
            emit(&cli.output, &text)?;
            Ok(if any_violation { 1 } else { 0 })
        }
        Command::Search {
            mechanism,
            alpha,
            objective,
            space,
            min_agents,
            max_agents,
            min_alternatives,
            max_alternatives,
            restarts,
            steps,
            step_size,
            seed,
        } => {
            let id = MechanismId::new(MechanismKind::parse(mechanism)?, *alpha)?;
            let objective = Objective::parse(objective)?;
            let config = SearchConfig {
                mechanism: id,
                objective,
                space: Space::from(*space),
                n_range: (*min_agents, *max_agents),
                m_range: (*min_alternatives, *max_alternatives),
                restarts: *restarts,
                steps: *steps,
                step_size: *step_size,
                seed: *seed,
                tau,
            };
            let result = hill_climb(&config)?;
            let bound = proven_upper_bound(
                &id,
                objective,
                config.space,
                result.best_instance.n_agents(),
            );
            let violation = bound.map_or(false, |b| result.best_ratio > b + tau);
            // Sanity: the baseline that picks the enumerated optimum.
            let baseline = omniscient_distortion(&result.best_instance, objective);
            let doc = json!({
                "result": result,
                "best_ratio_text": fmt12(result.best_ratio),
                "proven_bound": bound,
                "violation": violation,
                "omniscient_ratio": baseline.ratio,
            });
            emit(&cli.output, &serde_json::to_string_pretty(&doc).unwrap())?;
            Ok(if violation { 1 } else { 0 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
