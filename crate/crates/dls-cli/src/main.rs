//! Benchmark and simulation front end for the label-set matching engine.

mod common;

use std::collections::HashSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dls::broker::{Broker, ConnKind};
use dls::cbf::CbfParams;
use dls::harness::{self, measure_fpr};
use dls::label_space::RangeLabel;
use dls::overlay;

use common::{emit, with_suffix, FormatArg, SchemaArgs, Table, WorkloadArgs};

#[derive(Parser)]
#[command(
    name = "dls",
    about = "Content-based pub/sub on discrete label sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic workload and write it to files.
    Gen(GenArgs),
    /// Single-broker benchmark: insertion, deletion, matching, forwarding.
    Bench(BenchArgs),
    /// False-positive-rate sweep over granules or filter sizes.
    Fpr(FprArgs),
    /// Multi-broker simulation with an end-to-end delivery audit.
    Sim(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Args)]
struct FilterArgs {
    /// Filter size as a power of two: m = 2^m_bits counters.
    #[arg(long, default_value_t = 16)]
    m_bits: u8,
    #[arg(long, default_value_t = 4)]
    k_hash: u32,
    #[arg(long, default_value_t = 4)]
    counter_bits: u8,
}

impl FilterArgs {
    fn params(&self, seed: u64) -> Result<CbfParams> {
        // The two filter seeds are derived from the workload seed so a
        // whole run is reproducible from one number.
        Ok(CbfParams::new(
            1u64 << self.m_bits,
            self.k_hash,
            self.counter_bits,
            seed.wrapping_mul(2).wrapping_add(1),
            seed.wrapping_mul(2).wrapping_add(2),
        )?)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Output prefix; writes <out>.subs.txt and <out>.events.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Subscription counts, comma separated; one table column each.
    #[arg(long, default_value = "10000,100000")]
    n_subs_list: String,
    /// Clients attached to the broker; fixed across columns.
    #[arg(long, default_value_t = 8)]
    clients: usize,
    /// Timing repetitions; the minimum is reported.
    #[arg(long, default_value_t = 1)]
    reps: u32,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct FprArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[command(flatten)]
    filter: FilterArgs,
    /// Sweep axis: `granule` holds m fixed, `mbits` holds the granule fixed.
    #[arg(long, default_value = "mbits")]
    sweep: String,
    /// Granule sweep points.
    #[arg(long, default_value = "8,16,32,64,128")]
    granules: String,
    /// m sweep points, as powers of two.
    #[arg(long, default_value = "8,10,12,14,16")]
    m_bits_list: String,
    /// Workload file prefix from `gen`; generated in memory when absent.
    #[arg(long)]
    workload_files: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Args)]
struct SimArgs {
    /// Topology file; filter parameters come from its `params` line.
    #[arg(long)]
    topology: PathBuf,
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    workload: WorkloadArgs,
    /// Trace output file, one line per published event.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Build the topology even if per-broker overrides violate the
    /// identical-parameters rule, and exit zero despite lost events.
    #[arg(long, default_value_t = false)]
    negative_control: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Fpr(args) => cmd_fpr(args),
        Command::Sim(args) => cmd_sim(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| p.trim().parse::<T>())
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|_| anyhow::anyhow!("bad {what} list `{s}`"))
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let schema = args.schema.resolve()?;
    let spec = args.workload.spec(&schema);
    let subs = harness::gen_subscriptions(&spec, &schema)?;
    let events = harness::gen_events(&spec, &schema)?;
    let subs_path = with_suffix(&args.out, ".subs.txt");
    let events_path = with_suffix(&args.out, ".events.txt");
    fs::write(
        &subs_path,
        harness::subscriptions_to_text(&schema, &spec, &subs)?,
    )
    .with_context(|| format!("writing {}", subs_path.display()))?;
    fs::write(
        &events_path,
        harness::events_to_text(&schema, &spec, &events)?,
    )
    .with_context(|| format!("writing {}", events_path.display()))?;
    println!(
        "wrote {} subscriptions to {} and {} events to {}",
        subs.len(),
        subs_path.display(),
        events.len(),
        events_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    let schema = args.schema.resolve()?;
    let n_list: Vec<u64> = parse_list(&args.n_subs_list, "--n-subs-list")?;
    if args.clients == 0 {
        bail!("--clients must be at least 1");
    }
    let params = args.filter.params(args.workload.seed)?;

    let mut header = vec!["metric".to_string()];
    header.extend(n_list.iter().map(|n| format!("n={n}")));
    let mut counts = Table::new(header.clone());
    let mut timing = Table::new(header);

    let mut row_labels_total = vec!["labels_total".to_string()];
    let mut row_distinct = vec!["distinct_forwarded".to_string()];
    let mut row_deliver = vec!["event_destinations".to_string()];
    let mut row_insert = vec!["insert_us_per_sub".to_string()];
    let mut row_delete = vec!["delete_us_per_sub".to_string()];
    let mut row_match = vec!["match_us_per_event".to_string()];

    for &n in &n_list {
        let spec = args.workload.with_n_subs(&schema, n);
        let subs = harness::gen_subscriptions(&spec, &schema)?;
        let events = harness::gen_events(&spec, &schema)?;
        let event_labels: Vec<RangeLabel> = events
            .iter()
            .map(|e| schema.event_to_label(0, e))
            .collect::<std::result::Result<_, _>>()?;
        let label_sets = subs
            .iter()
            .map(|s| schema.subscription_to_labels(0, s))
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let mut best_insert = f64::INFINITY;
        let mut best_delete = f64::INFINITY;
        let mut best_match = f64::INFINITY;
        let mut labels_total = 0u64;
        let mut distinct = 0u64;
        let mut destinations = 0u64;

        for _ in 0..args.reps.max(1) {
            let mut broker = Broker::new(params)?;
            let clients: Vec<_> = (0..args.clients)
                .map(|_| broker.attach(ConnKind::Client).unwrap())
                .collect();
            let mut forwarded = HashSet::new();
            labels_total = label_sets.iter().map(|l| l.len() as u64).sum();

            let t0 = Instant::now();
            for (i, set) in label_sets.iter().enumerate() {
                let fwd = broker.on_subscribe(clients[i % clients.len()], set)?;
                forwarded.extend(fwd);
            }
            best_insert = best_insert.min(t0.elapsed().as_secs_f64() / subs.len().max(1) as f64);
            distinct = forwarded.len() as u64;

            let publisher = clients[0];
            let t0 = Instant::now();
            destinations = 0;
            for label in &event_labels {
                destinations += broker.match_event(publisher, *label)?.len() as u64;
            }
            best_match = best_match.min(t0.elapsed().as_secs_f64() / events.len().max(1) as f64);

            let t0 = Instant::now();
            for (i, set) in label_sets.iter().enumerate() {
                broker.on_unsubscribe(clients[i % clients.len()], set)?;
            }
            best_delete = best_delete.min(t0.elapsed().as_secs_f64() / subs.len().max(1) as f64);
        }

        row_labels_total.push(labels_total.to_string());
        row_distinct.push(distinct.to_string());
        row_deliver.push(destinations.to_string());
        row_insert.push(format!("{:.3}", best_insert * 1e6));
        row_delete.push(format!("{:.3}", best_delete * 1e6));
        row_match.push(format!("{:.3}", best_match * 1e6));
    }

    counts.push(row_labels_total);
    counts.push(row_distinct);
    counts.push(row_deliver);
    timing.push(row_insert);
    timing.push(row_delete);
    timing.push(row_match);

    // Counts are reproducible byte for byte and go to the chosen sink;
    // wall-clock timings are not, so they only ever go to stderr.
    emit(args.out.as_deref(), &counts.render(args.format))?;
    eprint!("{}", timing.render(args.format));
    Ok(ExitCode::SUCCESS)
}

fn cmd_fpr(args: FprArgs) -> Result<ExitCode> {
    let seed = args.workload.seed;
    let mut table = Table::new(
        ["sweep", "mapping_fpr_pct", "cbf_fpr_pct", "total_fpr_pct"]
            .map(String::from)
            .to_vec(),
    );
    match args.sweep.as_str() {
        "granule" => {
            let granules: Vec<u64> = parse_list(&args.granules, "--granules")?;
            for g in granules {
                let schema = common::synthetic_schema(args.schema.dims, g)?;
                let spec = args.workload.spec(&schema);
                let (subs, events) =
                    common::load_or_generate(args.workload_files.as_deref(), &schema, &spec)?;
                let report = measure_fpr(&schema, 0, &subs, &events, args.filter.params(seed)?)?;
                table.push(vec![
                    format!("g={g}"),
                    format!("{:.4}", report.mapping_fpr() * 100.0),
                    format!("{:.4}", report.cbf_fpr() * 100.0),
                    format!("{:.4}", report.total_fpr() * 100.0),
                ]);
            }
        }
        "mbits" => {
            let schema = args.schema.resolve()?;
            let spec = args.workload.spec(&schema);
            let (subs, events) =
                common::load_or_generate(args.workload_files.as_deref(), &schema, &spec)?;
            let m_bits: Vec<u8> = parse_list(&args.m_bits_list, "--m-bits-list")?;
            for bits in m_bits {
                let mut filter = args.filter;
                filter.m_bits = bits;
                let report = measure_fpr(&schema, 0, &subs, &events, filter.params(seed)?)?;
                table.push(vec![
                    format!("m=2^{bits}"),
                    format!("{:.4}", report.mapping_fpr() * 100.0),
                    format!("{:.4}", report.cbf_fpr() * 100.0),
                    format!("{:.4}", report.total_fpr() * 100.0),
                ]);
            }
        }
        other => bail!("--sweep must be `granule` or `mbits`, got `{other}`"),
    }
    emit(args.out.as_deref(), &table.render(args.format))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sim(args: SimArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.topology)
        .with_context(|| format!("reading {}", args.topology.display()))?;
    let topology = overlay::parse_topology(&text)?;
    let mut state = if args.negative_control {
        overlay::build_unchecked(&topology)?
    } else {
        overlay::build(&topology)?
    };
    let clients: Vec<String> = topology.clients.keys().cloned().collect();
    if clients.is_empty() {
        bail!("topology has no clients to subscribe or publish from");
    }

    let schema = args.schema.resolve()?;
    let spec = args.workload.spec(&schema);
    let subs = harness::gen_subscriptions(&spec, &schema)?;
    let events = harness::gen_events(&spec, &schema)?;
    let subs_by_client = common::spread_subscriptions(&subs, &clients);
    let events_by_publisher: Vec<(String, dls::label_space::EventPoint)> = events
        .into_iter()
        .enumerate()
        .map(|(i, e)| (clients[i % clients.len()].clone(), e))
        .collect();

    overlay::inject_workload(
        &mut state,
        &schema,
        0,
        &subs_by_client,
        &events_by_publisher,
    )?;
    let report =
        overlay::end_to_end_check(&state, &schema, 0, &subs_by_client, &events_by_publisher)?;

    if let Some(path) = &args.out {
        let mut trace = String::new();
        for record in state.traces() {
            trace.push_str(&overlay::render_trace(record));
            trace.push('\n');
        }
        fs::write(path, trace).with_context(|| format!("writing {}", path.display()))?;
    }

    println!("events {}", report.events);
    println!("deliveries {}", report.deliveries);
    println!("true_deliveries {}", report.true_deliveries);
    println!("false_negatives {}", report.false_negatives);
    println!("mapping_false_positives {}", report.mapping_fps);
    println!("cbf_false_positives {}", report.cbf_fps);
    println!("saturation_events {}", report.saturation_events);
    println!("underflow_events {}", report.underflow_events);
    let metrics = state.metrics();
    println!(
        "distinct_forwarded_labels {}",
        metrics.distinct_forwarded_labels
    );
    for ((from, to), count) in &metrics.forwarded_subscription_labels {
        println!("forwarded_subscription_labels {from}->{to} {count}");
    }
    if report.saturation_events > 0 || report.underflow_events > 0 {
        eprintln!(
            "warning: counter overflow occurred; the zero-loss guarantee only binds clean runs"
        );
    }

    if report.false_negatives > 0 && !args.negative_control {
        eprintln!("error: {} deliveries were lost", report.false_negatives);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}
