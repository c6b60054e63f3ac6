use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpnego_core::cpnet::{validate, CpNet, DEFAULT_EXACT_BOUND};
use cpnego_core::domain::{Outcome, OutcomeSpace};
use cpnego_core::generator::{random_cpnet, random_space, DomainRule, GenConfig, MAX_IN_DEGREE};
use cpnego_core::harness::{self, dump_counterexample, BatchConfig};
use cpnego_core::io::{self, CpNetDef, TraceRecord};
use cpnego_core::protocol::{negotiate, negotiate_with_order, ProtocolOptions, TraceKind};
use cpnego_core::stats::BatchSummary;

#[derive(Parser)]
#[command(name = "cpnego", version, about = "Negotiation over combinatorial domains with CP-net preferences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Negotiate between two CP-net files.
    Run(RunArgs),
    /// Run generated instances and print mean metrics as CSV.
    Batch(BatchArgs),
    /// Write random CP-net files over one shared outcome space.
    Gen(GenArgs),
    /// Check negotiated outcomes against the brute-force Pareto frontier.
    Verify(VerifyArgs),
    /// Summarize a CP-net file or a trace file.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct RunArgs {
    net1: PathBuf,
    net2: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed attribute order, e.g. `A,B,C`; drawn from the seed otherwise.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<String>>,
    /// Write the event log as NDJSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
    oracle_bound: u64,
    /// Give up after this many seconds of phase 1.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args, Clone)]
struct GenOpts {
    /// Attribute counts; one configuration (CSV row) per value.
    #[arg(long, value_delimiter = ',', required = true)]
    attrs: Vec<usize>,
    /// Largest domain size; 2 means binary.
    #[arg(long, default_value_t = 2)]
    domain_max: usize,
    /// Give every attribute exactly `--domain-max` values.
    #[arg(long)]
    domain_fixed: bool,
    #[arg(long, default_value_t = MAX_IN_DEGREE)]
    max_in_degree: usize,
    #[arg(long, default_value_t = 0.5)]
    edge_probability: f64,
}

impl GenOpts {
    fn config(&self, attrs: usize) -> GenConfig {
        let domain = match (self.domain_max, self.domain_fixed) {
            (2, _) => DomainRule::Binary,
            (k, true) => DomainRule::Fixed(k),
            (k, false) => DomainRule::Uniform { max: k },
        };
        GenConfig {
            attrs,
            domain,
            max_in_degree: self.max_in_degree,
            edge_probability: self.edge_probability,
        }
    }
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    gen: GenOpts,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
    oracle_bound: u64,
    /// Give up on the whole batch after this many seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenOpts,
    #[arg(long, default_value_t = 2)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    gen: GenOpts,
    #[arg(long, default_value_t = 200)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for counterexample nets and traces.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EXACT_BOUND)]
    oracle_bound: u64,
    /// Skip the enhancement phase (to see the oracle catch the difference).
    #[arg(long, hide = true)]
    no_phase2: bool,
}

#[derive(Args)]
struct InspectArgs {
    file: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run(a) => run(a),
        Command::Batch(a) => batch(a),
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Inspect(a) => inspect(a),
    }
}

fn read_def(path: &Path) -> Result<CpNetDef> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CpNetDef::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_net(path: &Path, space: Option<Arc<OutcomeSpace>>) -> Result<CpNet> {
    let def = read_def(path)?;
    let net = match space {
        Some(s) => CpNet::from_def_in(&def, s),
        None => CpNet::from_def(&def),
    };
    net.with_context(|| format!("validating {}", path.display()))
}

fn show(space: &OutcomeSpace, o: &Outcome) -> String {
    space.labels(o).join(" ")
}

fn run(a: RunArgs) -> Result<ExitCode> {
    let n1 = load_net(&a.net1, None)?;
    let n2 = load_net(&a.net2, Some(n1.shared_space().clone()))
        .context("both nets must share attributes and domains in the same order")?;
    let space = n1.shared_space().clone();
    let nets = [Arc::new(n1), Arc::new(n2)];
    let options = ProtocolOptions {
        exact_bound: a.oracle_bound,
        deadline: deadline(a.time_limit)?,
        ..Default::default()
    };
    let result = match &a.order {
        Some(names) => {
            let order = names
                .iter()
                .map(|n| space.attr_index(n).with_context(|| format!("unknown attribute `{n}` in --order")))
                .collect::<Result<Vec<_>>>()?;
            negotiate_with_order(nets, order, a.seed, options)?
        }
        None => negotiate(nets, a.seed, options)?,
    };
    let order: Vec<&str> = result.order.iter().map(|&x| space.attribute(x).name.as_str()).collect();
    println!("order: {}", order.join(" > "));
    for init in &result.initial {
        println!("initial: {}", show(&space, &init.outcome));
    }
    println!("final agreements ({}):", result.agreements.len());
    for o in &result.agreements {
        println!("  {}", show(&space, o));
    }
    println!("chosen: {}", show(&space, &result.chosen));
    let s = &result.stats;
    println!(
        "s_attr={} s_os={} s_out={:.2} ({}/{}) s_dq={:.2} ({}/{}) s_iter={} s_time_sec={:.6}",
        s.s_attr,
        s.s_os.map_or_else(|| "overflow".into(), |n| n.to_string()),
        s.mean_out(),
        s.s_out[0],
        s.s_out[1],
        s.mean_dq(),
        s.s_dq[0],
        s.s_dq[1],
        s.s_iter,
        s.s_time
    );
    if let Some(path) = &a.trace {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        io::write_trace(std::io::BufWriter::new(file), &result.trace, &space)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn deadline(secs: Option<f64>) -> Result<Option<Instant>> {
    secs.map(|s| {
        let d = Duration::try_from_secs_f64(s).context("--time-limit must be a non-negative number of seconds")?;
        Ok(Instant::now() + d)
    })
    .transpose()
}

fn batch(a: BatchArgs) -> Result<ExitCode> {
    let deadline = deadline(a.time_limit)?;
    let mut rows = Vec::new();
    for &m in &a.gen.attrs {
        let cfg = BatchConfig {
            gen: a.gen.config(m),
            rounds: a.rounds,
            seed: a.seed,
            options: ProtocolOptions {
                exact_bound: a.oracle_bound,
                deadline,
                ..Default::default()
            },
        };
        let runs = harness::batch_runs(&cfg)?;
        rows.push(BatchSummary::from_runs(&runs));
    }
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            io::write_csv(file, &rows)?;
        }
        None => io::write_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let [m] = a.gen.attrs.as_slice() else {
        bail!("gen takes a single --attrs value");
    };
    let cfg = a.gen.config(*m);
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let space = Arc::new(random_space(&cfg, &mut rng)?);
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let width = a.count.to_string().len().max(3);
    for i in 1..=a.count {
        let net = random_cpnet(&cfg, space.clone(), &mut rng)?;
        let path = a.out.join(format!("net-{i:0width$}.json"));
        fs::write(&path, net.to_def().to_json()).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let mut all_ok = true;
    for &m in &a.gen.attrs {
        let cfg = BatchConfig {
            gen: a.gen.config(m),
            rounds: a.rounds,
            seed: a.seed,
            options: ProtocolOptions {
                exact_bound: a.oracle_bound,
                phase2: !a.no_phase2,
                deadline: None,
            },
        };
        let r = harness::verify(&cfg, a.oracle_bound)?;
        println!(
            "attrs={m}: PO {}/{}  WPO {}/{}  final-set PO {}/{}  iteration bound {}/{}",
            r.po_pass, r.rounds, r.wpo_pass, r.rounds, r.final_set_po_pass, r.rounds, r.within_iteration_bound, r.rounds
        );
        for cx in &r.counterexamples {
            println!(
                "  counterexample seed {}: chosen PO={} agreement nodes WPO={}",
                cx.seed, cx.chosen_po, cx.agreements_wpo
            );
            if let Some(dir) = &a.out {
                for p in dump_counterexample(dir, cx)? {
                    println!("    wrote {}", p.display());
                }
            }
        }
        all_ok &= r.all_passed();
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn inspect(a: InspectArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    if let Ok(def) = CpNetDef::from_json(&text) {
        return inspect_net(&def);
    }
    let records = io::read_trace(BufReader::new(text.as_bytes()))
        .with_context(|| format!("{} is neither a CP-net nor a trace", a.file.display()))?;
    inspect_trace(&records)
}

fn inspect_net(def: &CpNetDef) -> Result<ExitCode> {
    let violations = validate(def);
    let out = std::io::stdout();
    let mut out = out.lock();
    writeln!(out, "attributes: {}", def.attributes.len())?;
    for attr in &def.attributes {
        let parents: Vec<&str> = def
            .edges
            .iter()
            .filter(|(_, c)| *c == attr.name)
            .map(|(p, _)| p.as_str())
            .collect();
        writeln!(
            out,
            "  {} |D|={} parents=[{}] rows={}",
            attr.name,
            attr.values.len(),
            parents.join(","),
            def.cpt.get(&attr.name).map_or(0, Vec::len)
        )?;
    }
    if violations.is_empty() {
        let net = CpNet::from_def(def)?;
        let space = net.space();
        writeln!(out, "outcomes: {}", space.outcome_count().map_or_else(|| "overflow".into(), |n| n.to_string()))?;
        writeln!(out, "optimum: {}", show(space, &net.optimum()))?;
        writeln!(out, "valid")?;
        Ok(ExitCode::SUCCESS)
    } else {
        for v in &violations {
            writeln!(out, "violation: {v}")?;
        }
        Ok(ExitCode::FAILURE)
    }
}

fn inspect_trace(records: &[TraceRecord]) -> Result<ExitCode> {
    let iterations = records.iter().map(|r| r.iteration).max().unwrap_or(0);
    for it in 1..=iterations {
        let line: Vec<String> = records
            .iter()
            .filter(|r| r.iteration == it && matches!(r.kind, TraceKind::Propose | TraceKind::Pass | TraceKind::Open | TraceKind::Expand))
            .map(|r| {
                let who = r.agent.map_or_else(String::new, |a| format!("agent{a} "));
                let node = r.node.map_or_else(String::new, |n| format!(" n{n}"));
                format!("{who}{:?}{node}", r.kind).to_lowercase()
            })
            .collect();
        println!("iteration {it}: {}", line.join(", "));
    }
    for r in records.iter().filter(|r| {
        matches!(r.kind, TraceKind::Reveal | TraceKind::Include | TraceKind::Replace | TraceKind::Final)
    }) {
        let outcome = r.outcome.as_ref().map(|o| o.join(" ")).unwrap_or_default();
        println!("{:?}: {outcome}", r.kind);
    }
    Ok(ExitCode::SUCCESS)
}
