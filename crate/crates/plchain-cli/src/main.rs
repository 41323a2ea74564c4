use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use plchain_cli::commands::{run, Command, Request, Source};

/// Exact homology, intersection homology, duality and intersection products
/// of PL chains on stratified pseudomanifolds.
///
/// The space comes from `--space FILE`, `--corpus NAME`, or trailing words:
/// `plchain homology sphere 2`, `plchain intersect torus2 meridian longitude`.
#[derive(Parser, Debug)]
#[command(name = "plchain", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Space file to read.
    #[arg(long, conflicts_with = "corpus")]
    space: Option<PathBuf>,
    /// Corpus space such as `torus2` or `suspension(sphere 1)`.
    #[arg(long)]
    corpus: Option<String>,
    /// Perversity by name (zero, lower-middle, upper-middle, top, const:K) or as defined in the file.
    #[arg(long = "perversity")]
    perversities: Vec<String>,
    /// The two named chains to multiply.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    chains: Vec<String>,
    /// Line-oriented tab-separated output.
    #[arg(long)]
    machine: bool,
    /// Seed for the randomized checks of `verify`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Corpus name, followed by the two chain names for the product commands.
    words: Vec<String>,
}

fn request(args: Args) -> Result<Request, String> {
    let mut words = args.words;
    let mut chains = match args.chains.as_slice() {
        [a, b] => Some((a.clone(), b.clone())),
        _ => None,
    };
    let products = matches!(args.command, Command::Intersect | Command::GmIntersect);
    let has_source = args.space.is_some() || args.corpus.is_some();
    if products && chains.is_none() && words.len() >= 2 {
        let b = words.pop().unwrap();
        let a = words.pop().unwrap();
        chains = Some((a, b));
    }
    let source = match (args.space, args.corpus) {
        (Some(p), _) => Source::File(p),
        (None, Some(c)) => Source::Corpus(c),
        (None, None) if !words.is_empty() => Source::Corpus(std::mem::take(&mut words).join(" ")),
        _ => return Err("no space given: use --space FILE, --corpus NAME or a corpus name".into()),
    };
    if has_source && !words.is_empty() {
        return Err(format!("unexpected arguments: {}", words.join(" ")));
    }
    Ok(Request { command: args.command, source, perversities: args.perversities, chains, seed: args.seed })
}

fn threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PLCHAIN_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("PLCHAIN_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("PLCHAIN_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let machine = args.machine;
    if let Err(e) = threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let req = match request(args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&req) {
        Ok(out) => {
            match out.raw {
                Some(text) => print!("{text}"),
                None => print!("{}", out.report.render(machine)),
            }
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
