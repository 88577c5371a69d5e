//! Command-line front end for simplicial truss decomposition.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use simtruss::analysis::{export_filtration, joist_stats};
use simtruss::generators::{gen_flag_complex, gen_manifold, FlagParams, ManifoldParams};
use simtruss::oracle::{brute_top_n, brute_trussness};
use simtruss::{decompose, top_n, DecomposeOptions, Decomposition, MemoryBudget, SimplicialComplex};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(name = "simtruss", version, about = "Simplicial truss decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trussness and lower bound of every simplex, as TSV.
    Decompose {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Skip simplices whose trussness equals their lower bound.
        #[arg(long)]
        omit_trivial: bool,
    },
    /// The n simplices of size q with the largest trussness.
    Topn {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
    },
    /// Write a synthetic complex.
    Generate {
        #[command(subcommand)]
        kind: Generator,
    },
    /// Joist statistics as a one-record TSV.
    Stats {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Filtration derived from the decomposition.
    Filtration {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compare the engine against brute force; exits 4 on any difference.
    Oracle {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        engine: EngineArgs,
        /// Also compare the top-n query.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        q: usize,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// Growing d-manifold with s top simplices.
    Manifold {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Clique complex of G(n, p), cliques capped at max-size.
    Flag {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct IoArgs {
    /// Maximal simplices, one per line. Reads stdin when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Writes stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EngineArgs {
    /// Largest simplex size to decompose.
    #[arg(long)]
    max_size: Option<usize>,
    /// Candidate records kept in memory before spilling to disk.
    #[arg(long, conflicts_with = "memory_bytes")]
    memory_budget: Option<u64>,
    /// As --memory-budget, in bytes (16 per record).
    #[arg(long)]
    memory_bytes: Option<u64>,
    /// Chunk files per spilled level.
    #[arg(long, default_value_t = 8)]
    chunks: usize,
    /// Directory for chunk files.
    #[arg(long)]
    workdir: Option<PathBuf>,
    #[arg(long)]
    keep_workdir: bool,
    /// Components decomposed concurrently.
    #[arg(long, default_value_t = 1)]
    parallel_components: usize,
    /// No per-level progress on stderr.
    #[arg(long)]
    quiet: bool,
}

impl EngineArgs {
    fn options(&self) -> DecomposeOptions {
        let budget = match (self.memory_budget, self.memory_bytes) {
            (Some(r), _) => MemoryBudget::records(r),
            (None, Some(b)) => MemoryBudget::bytes(b),
            (None, None) => MemoryBudget::UNLIMITED,
        };
        DecomposeOptions {
            max_size: self.max_size,
            budget,
            chunks: self.chunks,
            workdir: self.workdir.clone(),
            keep_workdir: self.keep_workdir,
            parallel_components: self.parallel_components,
            ..DecomposeOptions::default()
        }
    }

    fn run(&self, complex: &SimplicialComplex, retain_joists: bool) -> Result<Decomposition, Failure> {
        let opts = DecomposeOptions { retain_joists, ..self.options() };
        let d = decompose(complex, &opts)?;
        if !self.quiet {
            for level in &d.levels {
                eprintln!("{level}");
            }
        }
        Ok(d)
    }
}

enum Failure {
    Usage(String),
    Io(String),
    Mismatch(String),
}

impl From<simtruss::Error> for Failure {
    fn from(e: simtruss::Error) -> Self {
        match e {
            simtruss::Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Io(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn read_complex(io: &IoArgs) -> Result<SimplicialComplex, Failure> {
    let mut text = String::new();
    match &io.input {
        Some(path) => File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => io::stdin().read_to_string(&mut text)?,
    };
    Ok(SimplicialComplex::parse(&text)?)
}

fn write_output(path: Option<&PathBuf>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let mut out: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    body(&mut out)?;
    out.flush()?;
    Ok(())
}

fn oracle(complex: &SimplicialComplex, engine: &EngineArgs, n: Option<usize>, q: usize) -> Result<(), Failure> {
    let d = engine.run(complex, false)?;
    let brute = brute_trussness(complex, d.max_size.max(2))?;
    let mut diffs = Vec::new();
    for (s, (tr, lb)) in &brute.trussness {
        match d.trussness.get(s) {
            Some(t) if (t.tr, t.lb) == (*tr, *lb) => {}
            got => diffs.push(format!(
                "[{}] engine {:?} brute ({tr}, {lb})",
                complex.format_simplex(s),
                got.map(|t| (t.tr, t.lb))
            )),
        }
    }
    if d.trussness.len() != brute.trussness.len() {
        diffs.push(format!("engine has {} rows, brute {}", d.trussness.len(), brute.trussness.len()));
    }
    if let Some(n) = n {
        let fast = top_n(complex, n, q, &engine.options())?.rows;
        let slow = brute_top_n(complex, n, q)?;
        if fast != slow {
            diffs.push(format!("top-{n} at size {q}: engine {fast:?} brute {slow:?}"));
        }
    }
    if diffs.is_empty() {
        eprintln!("oracle: {} simplices agree", brute.trussness.len());
        Ok(())
    } else {
        Err(Failure::Mismatch(diffs.join("\n")))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decompose { io, engine, omit_trivial } => {
            let k = read_complex(&io)?;
            let d = engine.run(&k, false)?;
            write_output(io.output.as_ref(), |mut w| d.trussness.write_tsv(&k, !omit_trivial, &mut w))
        }
        Command::Topn { io, engine, n, q } => {
            let k = read_complex(&io)?;
            let t = top_n(&k, n, q, &engine.options())?;
            if !t.complete && !engine.quiet {
                eprintln!("only {} simplices of size {q}", t.rows.len());
            }
            write_output(io.output.as_ref(), |w| {
                t.rows
                    .iter()
                    .try_for_each(|(s, tr)| writeln!(w, "{}\t{tr}", k.format_simplex(s)))
            })
        }
        Command::Generate { kind } => {
            let (k, output) = match kind {
                Generator::Manifold { d, s, seed, output } => (gen_manifold(ManifoldParams { d, s, seed })?, output),
                Generator::Flag { n, p, max_size, seed, output } => {
                    (gen_flag_complex(FlagParams { n, p, max_size, seed })?, output)
                }
            };
            write_output(output.as_ref(), |w| w.write_all(k.to_text().as_bytes()))
        }
        Command::Stats { io, engine } => {
            let k = read_complex(&io)?;
            let d = engine.run(&k, true)?;
            let stats = joist_stats(&k, &d.trussness, &d.joists);
            write_output(io.output.as_ref(), |w| w.write_all(stats.to_tsv().as_bytes()))
        }
        Command::Filtration { io, engine } => {
            let k = read_complex(&io)?;
            let d = engine.run(&k, false)?;
            let f = export_filtration(&k, &d)?;
            write_output(io.output.as_ref(), |mut w| f.write(&k, &mut w))
        }
        Command::Oracle { io, engine, n, q } => {
            let k = read_complex(&io)?;
            oracle(&k, &engine, n, q)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
        Err(Failure::Mismatch(msg)) => {
            eprintln!("oracle mismatch:\n{msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
