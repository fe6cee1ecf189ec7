use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use trichar::quadric::{classify_quadric, reduce, sigma_census, Budget, DEFAULT_BUDGET};
use trichar::report::{acceptance_matrix, verify, VerificationReport, VerifyOptions};
use trichar::varieties::{classify, search_class, sweep, ClassTag, Params};
use trichar::{Error, Fe, FieldDescriptor, FieldTower};

#[derive(Parser)]
#[command(name = "trichar", version, about = "Three-character sets of AG(r,q^2) and their codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the class of a parameter pair (a, b)
    Classify(ParamArgs),
    /// Verify the claims for one parameter pair and emit a JSON report
    Verify(VerifyArgs),
    /// Verify the full acceptance matrix
    VerifyAll {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Classify every admissible (a, b) as CSV
    Sweep {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        r: usize,
        /// Keep only rows of this class
        #[arg(long)]
        class: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Field utilities
    Field {
        #[command(subcommand)]
        command: FieldCommand,
    },
    /// Quadric reduction utilities
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Tally the reduced quadrics by point count (JSON)
    Census(ParamArgs),
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Element table of GF(q^2) as CSV
    Dump(FieldArgs),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Reduced quadric of the section x_r = m_1 x_1 + ... + m_{r-1} x_{r-1} + d, as CSV
    Reduce {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated encodings m_1,...,m_{r-1}
        #[arg(long, value_delimiter = ',')]
        m: Vec<u16>,
        #[arg(long, default_value_t = 0)]
        d: u16,
        /// Also print point counts and characters
        #[arg(long)]
        classify: bool,
    },
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Order of the subfield GF(q)
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    q: Option<u32>,
    /// GF(q^2) as "p^k" or "p^k/c0,...,ck"
    #[arg(long)]
    field: Option<String>,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long)]
    r: usize,
    /// Encoding of a in GF(q^2)
    #[arg(long, required_unless_present = "search_class")]
    a: Option<u16>,
    /// Encoding of b in GF(q^2)
    #[arg(long, required_unless_present = "search_class")]
    b: Option<u16>,
    /// Use the first (a, b) of this class instead of --a/--b
    #[arg(long)]
    search_class: Option<String>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    spectrum: bool,
    #[arg(long)]
    minimality: bool,
    #[arg(long)]
    code: bool,
    /// Complete the set with P_inf of this multiplicity
    #[arg(long)]
    multiset: Option<u32>,
    #[arg(long)]
    oracle: bool,
    /// Include per-stage timings (makes the report non-reproducible)
    #[arg(long)]
    timing: bool,
    /// Write report.json, matrix.txt and enumerator.json here
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("TRICHAR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().ok();
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            })
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: {}: {e}", path.display());
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn tower(args: &FieldArgs) -> Result<Arc<FieldTower>, Error> {
    let t = match (&args.field, args.q) {
        (Some(spec), _) => FieldTower::from_descriptor(FieldDescriptor::parse(spec)?)?,
        (None, Some(q)) => FieldTower::for_q(q)?,
        (None, None) => return Err(Error::InvalidParams("give --q or --field".into())),
    };
    Ok(Arc::new(t))
}

fn params(args: &ParamArgs) -> Result<Params, Error> {
    let t = tower(&args.field)?;
    if let Some(tag) = &args.search_class {
        let tag: ClassTag = tag.parse()?;
        return search_class(&t, args.r, tag)
            .ok_or_else(|| Error::InvalidParams(format!("no {tag} pair for q = {}, r = {}", t.q(), args.r)));
    }
    let (a, b) = (args.a.expect("clap requires --a"), args.b.expect("clap requires --b"));
    Params::new(t, args.r, Fe(a), Fe(b))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write_outputs(dir: &Path, report: &VerificationReport) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    write(&dir.join("report.json"), &(report.to_json() + "\n"))?;
    if let Some(g) = &report.matrix {
        write(&dir.join("matrix.txt"), &g.to_text())?;
    }
    if let Some(w) = &report.enumerator {
        write(&dir.join("enumerator.json"), &(w.to_json() + "\n"))?;
    }
    Ok(())
}

fn exit_for(report: &VerificationReport) -> u8 {
    if !report.complete {
        EXIT_BUDGET
    } else if report.passed() {
        0
    } else {
        EXIT_FAIL
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Classify(args) => {
            let p = params(&args)?;
            let class = classify(&p);
            println!("{}", class.tag);
            if let Some(d) = class.discriminant {
                println!("discriminant={}", d.enc());
            }
            if let Some(t) = class.trace_bit {
                println!("trace={}", t.enc());
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let p = params(&args.params)?;
            let any = args.spectrum || args.minimality || args.code || args.oracle;
            let opts = VerifyOptions {
                spectrum: args.spectrum || !any,
                minimality: args.minimality || !any,
                code: args.code || !any,
                multiset: args.multiset,
                oracle: args.oracle || !any,
                budget: Budget(args.params.budget),
                timing: args.timing,
            };
            let report = verify(&p, &opts)?;
            println!("{}", report.to_json());
            if let Some(dir) = &args.out {
                write_outputs(dir, &report)?;
            }
            Ok(exit_for(&report))
        }
        Command::VerifyAll { out, budget } => {
            let mut worst = 0;
            for inst in acceptance_matrix() {
                let p = inst.params()?;
                let opts = VerifyOptions { budget: Budget(budget), ..VerifyOptions::all(inst.multiset) };
                let report = verify(&p, &opts)?;
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| c.verdict == trichar::report::Verdict::Fail)
                    .map(|c| c.claim.as_str())
                    .collect();
                let code = exit_for(&report);
                let status = match code {
                    0 => "PASS".to_string(),
                    EXIT_BUDGET => "INCOMPLETE".to_string(),
                    _ => format!("FAIL ({})", failed.join("; ")),
                };
                let errata = if report.errata.is_empty() { String::new() } else { format!(" [{} erratum]", report.errata.len()) };
                println!("{status:<6} {}{errata}", inst.name);
                if let Some(dir) = &out {
                    write_outputs(&dir.join(inst.name.replace([' ', '='], "_")), &report)?;
                }
                worst = worst.max(code);
            }
            Ok(worst)
        }
        Command::Sweep { field, r, class, budget } => {
            let t = tower(&field)?;
            let pairs = (t.q2() as u128).pow(2);
            Budget(budget).check(pairs)?;
            let filter: Option<ClassTag> = class.map(|c| c.parse()).transpose()?;
            if r < 2 {
                return Err(Error::InvalidParams("r must be at least 2".into()).into());
            }
            let mut totals: BTreeMap<String, u64> = BTreeMap::new();
            println!("a,b,class,{}", if t.is_odd() { "disc" } else { "trace" });
            for (p, c) in sweep(&t, r) {
                if filter.is_some_and(|f| f != c.tag) {
                    continue;
                }
                let value = c.discriminant.or(c.trace_bit).map_or(0, |v| v.enc());
                println!("{},{},{},{}", p.a.enc(), p.b.enc(), c.tag, value);
                *totals.entry(c.tag.to_string()).or_insert(0) += 1;
            }
            for (tag, n) in totals {
                println!("# total,{tag},{n}");
            }
            Ok(0)
        }
        Command::Field { command: FieldCommand::Dump(args) } => {
            let t = tower(&args)?;
            print!("{}", t.field().dump_csv());
            Ok(0)
        }
        Command::Oracle { command: OracleCommand::Reduce { params: args, m, d, classify: show } } => {
            let p = params(&args)?;
            let m: Vec<Fe> = if m.is_empty() { vec![Fe::ZERO; p.r - 1] } else { m.into_iter().map(Fe).collect() };
            let d = Fe(d);
            if m.iter().chain([&d]).any(|x| !p.tower.field().contains(*x)) {
                return Err(Error::InvalidParams("slope or offset outside the field".into()).into());
            }
            let qd = reduce(&p, &m, d)?;
            print!("{}", qd.to_csv());
            if show {
                let c = classify_quadric(&qd, Budget(args.budget))?;
                println!("{}", serde_json::to_string(&c).expect("classification serializes"));
            }
            Ok(0)
        }
        Command::Census(args) => {
            let p = params(&args)?;
            let tag = classify(&p).tag;
            let census = sigma_census(&p, tag, Budget(args.budget))?;
            println!("{}", serde_json::to_string(&census).expect("census serializes"));
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use trichar::codes::Variant;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn multiset_variant_lookup() {
        assert_eq!(Variant::for_multiplicity(4, 2, 4), Some(Variant::MultisetJ1));
    }
}
