//! Command-line interface: reads a JSON input document, runs one stage of
//! the pipeline, and prints a human or machine-readable report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use silting::cli::{
    cmd_ext_algebra, cmd_identities, cmd_koszul_check, cmd_silting_end, cmd_smc_check,
    cmd_validate, CmdOutput, JobConfig, OutputFormat,
};
use silting::error::Error;
use silting::exactla::Field;

#[derive(Parser)]
#[command(
    name = "silting",
    about = "Silting presentations from simple-minded collections over quiver algebras",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Input document (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Base field override: "Q" or a prime characteristic.
    #[arg(long, global = true)]
    field: Option<String>,

    /// Largest cohomological degree tracked; the window is symmetric.
    #[arg(long, default_value_t = 6, global = true)]
    max_degree: i64,

    /// Largest operation arity computed and checked.
    #[arg(long, default_value_t = 4, global = true)]
    max_arity: usize,

    /// Extra resolution depth beyond the conservative default.
    #[arg(long, default_value_t = 0, global = true)]
    res_length: i64,

    /// Word bound for the dual bar construction and its verification.
    #[arg(long, default_value_t = 6, global = true)]
    word_bound: usize,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,

    /// Seed for the randomized identity suite.
    #[arg(long, default_value_t = 1, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an input document and check all structural invariants.
    Validate,
    /// Check the simple-minded-collection axioms over the degree window.
    SmcCheck,
    /// Compute the minimal positive Ext-algebra of the collection.
    ExtAlgebra,
    /// Compute the presentation of the endomorphism algebra of the
    /// associated silting object.
    SiltingEnd,
    /// Run the seeded randomized identity suite.
    Identities {
        /// Number of random trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Prime field characteristic for the trials.
        #[arg(long, default_value_t = 101)]
        prime: u64,
    },
    /// Report Koszulity evidence for the Ext-algebra.
    KoszulCheck {
        /// Homological steps of the resolution to examine.
        #[arg(long, default_value_t = 6)]
        steps: usize,
        /// Serialized algebra file (output of ext-algebra) instead of a
        /// document.
        #[arg(long)]
        ext_algebra: Option<PathBuf>,
    },
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Error> {
    let path = path
        .as_ref()
        .ok_or_else(|| Error::input("an input document is required (--input FILE)"))?;
    std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

fn parse_field(spec: &str) -> Result<Field, Error> {
    if spec == "Q" {
        return Ok(Field::Rational);
    }
    let p: u64 = spec
        .parse()
        .map_err(|_| Error::input(format!("bad field {spec:?}; use \"Q\" or a prime")))?;
    Field::prime(p)
}

fn run(args: &Args) -> Result<CmdOutput, Error> {
    let field = match &args.field {
        Some(s) => Some(parse_field(s)?),
        None => None,
    };
    let cfg = JobConfig {
        field,
        max_degree: args.max_degree,
        max_arity: args.max_arity,
        extra_depth: args.res_length,
        word_bound: args.word_bound,
        seed: args.seed,
        trials: 100,
    };
    match &args.command {
        Command::Validate => cmd_validate(&read_input(&args.input)?),
        Command::SmcCheck => cmd_smc_check(&read_input(&args.input)?, &cfg),
        Command::ExtAlgebra => cmd_ext_algebra(&read_input(&args.input)?, &cfg),
        Command::SiltingEnd => cmd_silting_end(&read_input(&args.input)?, &cfg),
        Command::Identities { trials, prime } => {
            let suite_field = match field {
                Some(f) => f,
                None => Field::prime(*prime)?,
            };
            let cfg = JobConfig { trials: *trials, ..cfg };
            cmd_identities(suite_field, &cfg)
        }
        Command::KoszulCheck { steps, ext_algebra } => {
            let algebra_text = match ext_algebra {
                Some(p) => Some(std::fs::read_to_string(p).map_err(|e| {
                    Error::input(format!("cannot read {}: {e}", p.display()))
                })?),
                None => None,
            };
            let doc_text = match (&args.input, &algebra_text) {
                (Some(_), _) => Some(read_input(&args.input)?),
                (None, Some(_)) => None,
                (None, None) => Some(read_input(&args.input)?),
            };
            cmd_koszul_check(doc_text.as_deref(), algebra_text.as_deref(), &cfg, *steps)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let format = match args.format {
        Format::Human => OutputFormat::Human,
        Format::Json => OutputFormat::Json,
    };
    match run(&args) {
        Ok(out) => {
            println!("{}", out.render(format));
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
