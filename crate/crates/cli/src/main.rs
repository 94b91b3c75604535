//! `multiscale`: command-line access to the library over JSON.

mod table;

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use multiscale::charts::ChartPoint;
use multiscale::chow::ChowRing;
use multiscale::error::Error;
use multiscale::exec::Exec;
use multiscale::json;
use multiscale::leveltrees::{contract_levels, enumerate_level_structures, enumerate_trees_with};
use multiscale::limits::Limits;
use multiscale::partitions::enumerate_chains_with;
use multiscale::perm::Permutation;
use multiscale::rational::Q;
use multiscale::strata::{blowup_schedule_with, build_stratification_with};

const EXIT_VALIDATION: u8 = 1;
const EXIT_SIZE_GUARD: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "multiscale", version, about = "Multiscale lines: trees, charts, strata and Chow rings")]
struct Cli {
    /// Render a human-readable table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Use the data-parallel code paths where available.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct NArg {
    /// Number of marked points.
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All dual level trees with n marks.
    Trees(NArg),
    /// All chains in the proper part of the partition lattice.
    Chains {
        #[arg(long)]
        n: usize,
        /// Keep chains whose elements all have dimension at most K.
        #[arg(long, value_name = "K", allow_negative_numbers = true)]
        max_dim: Option<isize>,
    },
    /// The stratification poset: strata, closure covers, codimension grading.
    Strata(NArg),
    /// Centers of the iterated blowup, stage by stage.
    BlowupSchedule(NArg),
    /// Limit of a Laurent family as t -> 0.
    Limit {
        #[arg(long, value_name = "PATH")]
        family: String,
    },
    /// Checks a chart point and reports its stratum.
    PointValidate {
        #[arg(long, value_name = "PATH")]
        point: String,
    },
    /// Moves a point to the chart of a contracted tree.
    Transition {
        #[arg(long, value_name = "PATH")]
        point: String,
        /// Comma-separated levels to contract, e.g. "1,3".
        #[arg(long, value_name = "LEVELS")]
        contract: String,
    },
    /// The period of a pair of marks.
    Period {
        #[arg(long, value_name = "PATH")]
        point: String,
        /// The pair as "i,j".
        #[arg(long, value_name = "I,J")]
        pair: String,
    },
    /// Presentation and Hilbert function of the Chow ring.
    Chow {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        hilbert: bool,
        #[arg(long)]
        relations: bool,
    },
    /// All level structures on an unleveled tree.
    LevelStructures {
        #[arg(long, value_name = "PATH")]
        tree: String,
    },
    /// Acts on a point by a permutation of the marks or by a translation.
    Act {
        #[arg(long, value_name = "PATH")]
        point: String,
        /// One-line notation, e.g. "2,1,3" or "[2,1,3]".
        #[arg(long, value_name = "PERM", conflicts_with = "translate", required_unless_present = "translate")]
        sigma: Option<String>,
        /// Comma-separated rationals a1,...,an.
        #[arg(long, value_name = "A", allow_hyphen_values = true)]
        translate: Option<String>,
    },
    /// Forgets the level structure of a point.
    Xi {
        #[arg(long, value_name = "PATH")]
        point: String,
    },
    /// Restricts a point of a collision stratum to one mark per block.
    Kappa {
        #[arg(long, value_name = "PATH")]
        point: String,
        /// Partition JSON file.
        #[arg(long, value_name = "PATH")]
        rho: String,
    },
}

/// Errors of the front end, each with its exit code.
enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    /// The command ran and its verdict is negative; the output is printed.
    Rejected(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Io(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {path}: {e}")))
    }
}

fn read_json(path: &str) -> Result<Value, Failure> {
    Ok(json::parse_document(&read_input(path)?)?)
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, Failure> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("--{flag}: cannot parse {:?}", x.trim())))
        })
        .collect()
}

fn parse_rationals(flag: &str, s: &str) -> Result<Vec<Q>, Failure> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|x| multiscale::rational::parse_q(x).map_err(|e| Failure::Usage(format!("--{flag}: {e}"))))
        .collect()
}

/// The result of a command: its JSON form and its table form.
struct Output {
    json: Value,
    table: String,
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let exec = if cli.parallel { Exec::Parallel } else { Exec::Sequential };
    let limits = Limits::from_env();
    Ok(match &cli.command {
        Command::Trees(a) => {
            let trees = enumerate_trees_with(a.n, &limits, exec)?;
            Output {
                json: Value::Array(trees.iter().map(json::encode_tree).collect()),
                table: table::trees(&trees),
            }
        }
        Command::Chains { n, max_dim } => {
            let chains = enumerate_chains_with(*n, *max_dim, &limits, exec)?;
            Output {
                json: Value::Array(chains.iter().map(json::encode_chain).collect()),
                table: table::chains(&chains),
            }
        }
        Command::Strata(a) => {
            let poset = build_stratification_with(a.n, &limits, exec)?;
            Output {
                json: json::encode_stratification(&poset),
                table: table::strata(&poset),
            }
        }
        Command::BlowupSchedule(a) => {
            let stages = blowup_schedule_with(a.n, &limits)?;
            Output {
                json: json::encode_schedule(a.n, &stages),
                table: table::schedule(&stages),
            }
        }
        Command::Limit { family } => {
            let fam = json::decode_family(&read_json(family)?, "")?;
            let point = fam.limit_point()?;
            Output {
                json: json!({
                    "tree": json::encode_tree(point.tree()),
                    "chain": json::encode_chain(&fam.limit_chain()),
                    "point": json::encode_point(&point),
                }),
                table: table::point(&point),
            }
        }
        Command::PointValidate { point } => {
            let p = json::decode_point_unvalidated(&read_json(point)?, "")?;
            match p.validate() {
                Ok(()) => {
                    let stratum = p.stratum_of();
                    Output {
                        json: json!({"valid": true, "stratum": json::encode_chain(&stratum)}),
                        table: format!("valid\nstratum: {}\n", stratum.label()),
                    }
                }
                Err(v) => return Err(Failure::Rejected(json!({"valid": false, "violation": v.to_string()}))),
            }
        }
        Command::Transition { point, contract } => {
            let p = json::decode_point(&read_json(point)?, "")?;
            let levels: Vec<usize> = parse_list("contract", contract)?;
            let target = contract_levels(p.tree(), &levels)?;
            let q = p.transition(&target)?;
            Output {
                json: json::encode_point(&q),
                table: table::point(&q),
            }
        }
        Command::Period { point, pair } => {
            let p = json::decode_point(&read_json(point)?, "")?;
            let ij: Vec<usize> = parse_list("pair", pair)?;
            let [i, j] = ij[..] else {
                return Err(Failure::Usage("--pair expects \"i,j\"".into()));
            };
            let v = p.period(i, j)?;
            Output {
                json: json!({"pair": [i, j], "period": json::encode_extended(&v)}),
                table: format!("period({i},{j}) = {v}\n"),
            }
        }
        Command::Chow { n, hilbert, relations } => {
            let ring = ChowRing::get_with(*n, &limits, exec)?;
            Output {
                json: json::encode_chow(&ring, *relations, *hilbert),
                table: table::chow(&ring, *relations, *hilbert),
            }
        }
        Command::LevelStructures { tree } => {
            let shape = json::decode_rooted_tree(&read_json(tree)?, "")?;
            let trees = enumerate_level_structures(&shape);
            Output {
                json: Value::Array(trees.iter().map(json::encode_tree).collect()),
                table: table::trees(&trees),
            }
        }
        Command::Act { point, sigma, translate } => {
            let p = json::decode_point(&read_json(point)?, "")?;
            let q = match (sigma, translate) {
                (Some(s), None) => {
                    let perm = Permutation::new(parse_list("sigma", s)?)?;
                    p.s_act(&perm)?
                }
                (None, Some(a)) => p.g_act(&parse_rationals("translate", a)?)?,
                _ => return Err(Failure::Usage("give exactly one of --sigma and --translate".into())),
            };
            Output {
                json: json::encode_point(&q),
                table: table::point(&q),
            }
        }
        Command::Xi { point } => {
            let p = json::decode_point(&read_json(point)?, "")?;
            let x = p.xi();
            Output {
                json: json::encode_scaled_curve(&x),
                table: table::scaled_curve(&x),
            }
        }
        Command::Kappa { point, rho } => {
            let p: ChartPoint = json::decode_point(&read_json(point)?, "")?;
            let rho = json::decode_partition(&read_json(rho)?, "")?;
            let q = p.kappa(&rho)?;
            Output {
                json: json::encode_point(&q),
                table: table::point(&q),
            }
        }
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SizeGuard { .. } => EXIT_SIZE_GUARD,
        _ => EXIT_VALIDATION,
    }
}

fn emit(text: &str) -> ExitCode {
    let mut out = io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_VALIDATION);
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => emit(&if cli.table { out.table } else { json::to_pretty(&out.json) }),
        Err(Failure::Rejected(v)) => {
            let _ = emit(&json::to_pretty(&v));
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
