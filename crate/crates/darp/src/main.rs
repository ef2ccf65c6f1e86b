use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use darp::gap::{BksTable, GapProfile};
use darp::generator::{generate, GenConfig};
use darp::instance::{to_text, unscale};
use darp::{solve, validate, Instance, Outcome, Solution, SolveConfig, Variant};

const FOUND: u8 = 0;
const INFEASIBLE: u8 = 1;
const NO_SOLUTION: u8 = 2;
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "darp", version, about = "Dial-a-ride solver on insertion-based sequence variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance with LNS.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "darp")]
        variant: Variant,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        relax_size: usize,
        #[arg(long, default_value_t = 1000)]
        fail_limit: u64,
        /// Text solution file (stdout when absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// JSON solution file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Validate {
        instance: PathBuf,
        solution: PathBuf,
        /// Overrides the variant recorded in the solution.
        #[arg(long, value_enum)]
        variant: Option<Variant>,
    },
    /// Solve every instance of a directory and report primal gaps.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        bks: Option<PathBuf>,
        /// CSV of the gap profile `tau,fraction`.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic instance with a planted feasible schedule.
    Generate {
        #[arg(long, default_value_t = 3)]
        vehicles: usize,
        #[arg(long, default_value_t = 24)]
        requests: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        output: PathBuf,
    },
}

fn load(path: &Path) -> Result<Instance, ExitCode> {
    Instance::from_file(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(INPUT_ERROR)
    })
}

fn write(path: &Path, text: &str) -> Result<(), ExitCode> {
    std::fs::write(path, text).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        ExitCode::from(INPUT_ERROR)
    })
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Solve { instance, variant, time_limit, seed, relax_size, fail_limit, output, json } => {
            let inst = load(&instance)?;
            let cfg = SolveConfig {
                variant,
                seed,
                relax: relax_size,
                fail_limit,
                time_limit: Some(Duration::from_secs_f64(time_limit)),
                max_iterations: None,
            };
            let outcome = solve(&inst, &cfg, &mut |s: &Solution| {
                log::info!("objective {:.2}", s.objective_unscaled());
            });
            match outcome {
                Outcome::Solved { solution, stats } => {
                    let violations = validate(&inst, &solution, variant);
                    if !violations.is_empty() {
                        for v in &violations {
                            eprintln!("invalid solution: {v}");
                        }
                        return Ok(ExitCode::from(NO_SOLUTION));
                    }
                    log::info!(
                        "{} LNS iterations, {} improvements, first objective {:.2}",
                        stats.lns.iterations,
                        stats.lns.improvements,
                        unscale(stats.first_objective)
                    );
                    let text = solution.to_text(&inst);
                    match output {
                        Some(p) => write(&p, &text)?,
                        None => print!("{text}"),
                    }
                    if let Some(p) = json {
                        write(&p, &solution.to_json(&inst))?;
                    }
                    Ok(ExitCode::from(FOUND))
                }
                Outcome::Infeasible => {
                    eprintln!("instance is infeasible");
                    Ok(ExitCode::from(INFEASIBLE))
                }
                Outcome::NoSolution => {
                    eprintln!("no solution within the time limit");
                    Ok(ExitCode::from(NO_SOLUTION))
                }
            }
        }
        Command::Validate { instance, solution, variant } => {
            let inst = load(&instance)?;
            let text = std::fs::read_to_string(&solution).map_err(|e| {
                eprintln!("error: cannot read {}: {e}", solution.display());
                ExitCode::from(INPUT_ERROR)
            })?;
            let sol = Solution::read(&inst, &text).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(INPUT_ERROR)
            })?;
            let violations = validate(&inst, &sol, variant.unwrap_or(sol.variant));
            if violations.is_empty() {
                println!("ok: objective {:.2}", sol.objective_unscaled());
                Ok(ExitCode::from(FOUND))
            } else {
                for v in &violations {
                    println!("{v}");
                }
                Ok(ExitCode::from(INFEASIBLE))
            }
        }
        Command::Bench { dir, bks, profile, time_limit, seed } => {
            let table = match bks {
                Some(p) => BksTable::from_path(&p),
                None => Ok(BksTable::builtin()),
            }
            .map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(INPUT_ERROR)
            })?;
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| {
                    eprintln!("error: cannot list {}: {e}", dir.display());
                    ExitCode::from(INPUT_ERROR)
                })?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            let mut instances = Vec::new();
            for f in &files {
                let inst = load(f)?;
                // fail before hours of solving, not after
                if let Err(e) = table.get(&inst.name) {
                    eprintln!("error: {e}");
                    return Err(ExitCode::from(INPUT_ERROR));
                }
                instances.push(inst);
            }
            let limit = Duration::from_secs_f64(time_limit);
            let results = seqcp::batch::map(instances, |inst| {
                let cfg = SolveConfig { seed, time_limit: Some(limit), ..SolveConfig::default() };
                let best = match solve(&inst, &cfg, &mut |_| {}) {
                    Outcome::Solved { solution, .. } if validate(&inst, &solution, cfg.variant).is_empty() => {
                        Some(solution.objective_unscaled())
                    }
                    _ => None,
                };
                (inst.name, best)
            });
            let gaps = GapProfile::new(&results, &table).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(INPUT_ERROR)
            })?;
            println!("instance,objective,gap");
            for ((name, obj), (_, gap)) in results.iter().zip(&gaps.gaps) {
                let obj = obj.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
                println!("{name},{obj},{:.4}", gap);
            }
            if let Some(p) = profile {
                let mut csv = String::from("tau,fraction\n");
                for (tau, frac) in gaps.curve(0.5, 50) {
                    csv.push_str(&format!("{tau:.3},{frac:.4}\n"));
                }
                write(&p, &csv)?;
            }
            let all = results.iter().all(|(_, o)| o.is_some());
            Ok(ExitCode::from(if all { FOUND } else { NO_SOLUTION }))
        }
        Command::Generate { vehicles, requests, seed, output } => {
            if vehicles == 0 || requests == 0 {
                eprintln!("error: need at least one vehicle and one request");
                return Err(ExitCode::from(INPUT_ERROR));
            }
            let name = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let inst = generate(&name, &GenConfig::cordeau_like(vehicles, requests), seed);
            write(&output, &to_text(&inst))?;
            Ok(ExitCode::from(FOUND))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    run(Cli::parse()).unwrap_or_else(|code| code)
}
