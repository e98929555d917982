use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use saecula::coeff::Coeff;
use saecula::diagram::Interval;
use saecula::fingroup::GroupDiagram;
use saecula::json::{self, Report};
use saecula::saecular::{is_linear_extension, lexicographic_order, random_linear_extension};
use saecula::Error;

/// Saecular decompositions of chain diagrams, filtered complexes and finite group diagrams.
#[derive(Parser, Debug)]
#[command(name = "saecula", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Worker threads for the parallel stages.
    #[arg(long, env = "SAECULA_THREADS", global = true)]
    threads: Option<usize>,
    /// Seed for anything randomized, such as `--linearization random`.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Diagrams of finitely generated abelian groups or vector spaces.
    Abelian {
        #[arg(value_enum)]
        action: AbelianAction,
        #[command(flatten)]
        input: Input,
        /// Interval order for `series`: `lex`, `random`, or a list such as `1:2,1:3,2:3`.
        #[arg(long, default_value = "lex")]
        linearization: String,
    },
    /// Filtered chain complexes.
    Homology {
        #[arg(value_enum)]
        action: HomologyAction,
        #[command(flatten)]
        input: Input,
        /// Homological degree; every degree when omitted.
        #[arg(long)]
        dim: Option<usize>,
        /// Page of the Leray-Serre tables.
        #[arg(long, default_value_t = 1)]
        page: usize,
    },
    /// Diagrams of finite groups given by Cayley tables.
    Group {
        #[arg(value_enum)]
        action: GroupAction,
        #[command(flatten)]
        input: Input,
        /// Read an abelian diagram file and convert it to Cayley tables.
        #[arg(long)]
        from_abelian: bool,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Input JSON file.
    path: PathBuf,
    /// Coefficient override: z, q or fp:<prime>.
    #[arg(long)]
    coeff: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AbelianAction {
    Barcode,
    Cdf,
    Series,
    Pdb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HomologyAction {
    Barcode,
    Spectral,
    Enumcheck,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupAction {
    Barcode,
    Normalized,
    Lattice,
}

enum Failure {
    Io(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Engine(e) => match e {
                Error::Schema(_) | Error::InvalidDiagram(_) => 2,
                Error::IllDefinedMap { .. }
                | Error::Dimension(_)
                | Error::InvalidComplex(_)
                | Error::BoundarySquare { .. }
                | Error::MalformedGroup(_)
                | Error::NotHomomorphism { .. }
                | Error::NotLinearExtension(_)
                | Error::OutOfRange(_) => 3,
                Error::NaturalityFailure(_) => 4,
                Error::InfiniteLength(_) | Error::NotField => 5,
                Error::OrderCap { .. } => 6,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Engine(e) => e.to_string(),
        }
    }
}

fn read(input: &Input) -> Result<(String, Option<Coeff>), Failure> {
    let text = std::fs::read_to_string(&input.path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", input.path.display())))?;
    let coeff = input.coeff.as_deref().map(str::parse).transpose()?;
    Ok((text, coeff))
}

fn linearization(spec: &str, n: usize, seed: u64) -> Result<Vec<Interval>, Failure> {
    match spec {
        "lex" => Ok(lexicographic_order(n)),
        "random" => Ok(random_linear_extension(n, &mut ChaCha8Rng::seed_from_u64(seed))),
        list => {
            let order = list
                .split(',')
                .map(|item| {
                    let (p, q) = item.trim().split_once(':')?;
                    Some(Interval::new(p.trim().parse().ok()?, q.trim().parse().ok()?))
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Schema(format!("cannot read linearization {list:?}")))?;
            if !is_linear_extension(n, &order) {
                return Err(Error::NotLinearExtension(list.to_string()).into());
            }
            Ok(order)
        }
    }
}

fn emit<R: Report>(report: R, format: Format) -> String {
    match format {
        Format::Json => report.json(),
        Format::Table => report.table(),
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let f = cli.format;
    match &cli.command {
        Command::Abelian {
            action,
            input,
            linearization: lin,
        } => {
            let (text, coeff) = read(input)?;
            let d = json::parse_diagram(&text, coeff)?;
            Ok(match action {
                AbelianAction::Barcode => emit(json::abelian_barcode(&d)?, f),
                AbelianAction::Cdf => emit(json::abelian_cdf(&d)?, f),
                AbelianAction::Series => {
                    let order = linearization(lin, d.len(), cli.seed)?;
                    emit(json::abelian_series(&d, &order)?, f)
                }
                AbelianAction::Pdb => emit(json::abelian_pdb(&d)?, f),
            })
        }
        Command::Homology {
            action,
            input,
            dim,
            page,
        } => {
            let (text, coeff) = read(input)?;
            let parsed = json::parse_complex(&text, coeff)?;
            let dims: Vec<usize> = dim.iter().copied().collect();
            Ok(match action {
                HomologyAction::Barcode => emit(json::homology_report(&parsed, &dims)?, f),
                HomologyAction::Spectral => emit(json::spectral_report(&parsed, &dims, *page)?, f),
                HomologyAction::Enumcheck => emit(json::enumeration_report(&parsed)?, f),
            })
        }
        Command::Group {
            action,
            input,
            from_abelian,
        } => {
            let (text, coeff) = read(input)?;
            let d = if *from_abelian {
                GroupDiagram::from_abelian(&json::parse_diagram(&text, coeff)?)?
            } else {
                json::parse_groups(&text)?
            };
            Ok(match action {
                GroupAction::Barcode => emit(json::group_barcode(&d)?, f),
                GroupAction::Normalized => emit(json::group_normalized(&d)?, f),
                GroupAction::Lattice => emit(json::group_lattice(&d)?, f),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads.filter(|&t| t > 0) {
        saecula::par::set_threads(t);
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
