use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use reskit_core::degree::{cdeg, DEFAULT_SEED};
use reskit_core::io::{strategy_name, CertificateFile, PartitionFile, ProblemFile};
use reskit_core::partition::PartitionMatrix;
use reskit_core::polytope::is_essential;
use reskit_core::residue::{construct_partition, residue_element, verify, Strategy};
use reskit_core::{Error, PolytopeFamily};

const EXIT_VERIFY: u8 = 1;
const EXIT_NO_PARTITION: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_NON_ESSENTIAL: u8 = 4;

#[derive(Parser)]
#[command(name = "reskit", version, about = "Residue matrices and combinatorial degrees for lattice polytope families")]
struct Cli {
    /// Seed for the generic points used by the degree computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    LocallyUnmixed,
    Dim2,
    Search,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::LocallyUnmixed => Strategy::LocallyUnmixed,
            StrategyArg::Dim2 => Strategy::Dim2,
            StrategyArg::Search => Strategy::Search,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check that every subfamily of k members sums to dimension at least k.
    Essential { input: PathBuf },
    /// Construct a partition matrix.
    Partition {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Combinatorial degree of a partition (given or constructed).
    Cdeg {
        input: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
    },
    /// Residue element with its certificate.
    Residue {
        input: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "auto")]
        strategy: StrategyArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every check on a partition.
    Verify {
        input: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) => EXIT_PARSE,
            Error::NonEssential(..) => EXIT_NON_ESSENTIAL,
            Error::ExceptionalFamily(_) | Error::NoPartitionFound(_) => EXIT_NO_PARTITION,
            _ => EXIT_VERIFY,
        };
        let mut message = e.to_string();
        if let Error::ExceptionalFamily(_) = e {
            message.push_str(
                "\nthe family is exceptional: no partition matrix gives a nonzero determinant, so no certificate exists",
            );
        }
        Failure { code, message }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })
}

fn write_out(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure { code: EXIT_VERIFY, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Path) -> CliResult<(ProblemFile, Arc<PolytopeFamily>)> {
    let problem = ProblemFile::parse(&read(input)?)?;
    let family = problem.family()?;
    Ok((problem, family))
}

/// Partition from --partition, else from the problem file, else none.
fn given_partition(problem: &ProblemFile, family: &Arc<PolytopeFamily>, path: Option<&Path>) -> CliResult<Option<PartitionMatrix>> {
    if let Some(p) = path {
        return Ok(Some(PartitionFile::parse(&read(p)?)?.matrix(family)?));
    }
    Ok(problem.partition_matrix(family).transpose()?)
}

fn construct(family: &Arc<PolytopeFamily>, strategy: Strategy) -> CliResult<(PartitionMatrix, Strategy, Option<String>)> {
    let (m, used, report) = construct_partition(family, strategy)?;
    Ok((m, used, report.map(|r| format!("{:?}", r.case))))
}

fn run(cli: Cli) -> CliResult<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Essential { input } => {
            let (_, family) = load(&input)?;
            let ess = is_essential(&family);
            match ess.witness {
                None => {
                    println!("essential");
                    Ok(())
                }
                Some((s, d)) => {
                    println!("not essential: members {s:?} sum to dimension {d} < {}", s.len());
                    println!("every residue of a non-essential family vanishes identically");
                    Err(Failure { code: EXIT_NON_ESSENTIAL, message: String::new() })
                }
            }
        }
        Command::Partition { input, strategy, output } => {
            let (_, family) = load(&input)?;
            let (m, used, case) = construct(&family, strategy.into())?;
            let mut file = PartitionFile::from_matrix(&m);
            file.strategy = Some(strategy_name(used).into());
            file.planar_case = case;
            eprintln!("strategy: {}", strategy_name(used));
            write_out(output.as_deref(), &file.to_json())
        }
        Command::Cdeg { input, partition, strategy } => {
            let (problem, family) = load(&input)?;
            let m = match given_partition(&problem, &family, partition.as_deref())? {
                Some(m) => m,
                None => construct(&family, strategy.into())?.0,
            };
            if let Some(v) = reskit_core::partition::validate(&m) {
                return Err(Failure { code: EXIT_VERIFY, message: format!("partition rejected: {v}") });
            }
            println!("{}", cdeg(&m, seed)?);
            Ok(())
        }
        Command::Residue { input, partition, strategy, output } => {
            let (problem, family) = load(&input)?;
            let given = given_partition(&problem, &family, partition.as_deref())?;
            let cert = residue_element(&family, strategy.into(), given, seed)?;
            let file = CertificateFile::new(&cert, seed)?;
            eprintln!("determinant: {}", file.determinant);
            eprintln!("cdeg: {}", file.cdeg);
            if cert.vanishing {
                eprintln!("WARNING: vanishing certificate (cdeg = 0); the element carries no residue information");
            }
            write_out(output.as_deref(), &file.to_json())
        }
        Command::Verify { input, partition } => {
            let (problem, family) = load(&input)?;
            let Some(m) = given_partition(&problem, &family, partition.as_deref())? else {
                return Err(Failure { code: EXIT_PARSE, message: "verify needs a partition (--partition or in the problem file)".into() });
            };
            let items = verify(&m, seed);
            let mut ok = true;
            for it in &items {
                match &it.outcome {
                    Ok(()) => println!("PASS  {}", it.check),
                    Err(w) => {
                        ok = false;
                        println!("FAIL  {}: {w}", it.check);
                    }
                }
            }
            if ok {
                Ok(())
            } else {
                Err(Failure { code: EXIT_VERIFY, message: String::new() })
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RESKIT_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VERIFY);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
