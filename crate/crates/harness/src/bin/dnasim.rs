use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use dnasim_core::bio::{self, SegmentSpec, DEFAULT_STRIDE, DEFAULT_WINDOW};
use dnasim_core::channel::{generate_reads, ChannelSpec, ReadSet, DEFAULT_P_DEL, DEFAULT_P_INS, DEFAULT_P_SUB};
use dnasim_core::codec::{self, CodecSpec, CodecVariant, DEFAULT_CHUNK};
use dnasim_core::fasta::{self, Record};
use dnasim_core::metrics::{self, edit_distance};
use dnasim_core::mrs::{self, DEFAULT_KMER};
use dnasim_core::netpbm;
use dnasim_harness::config::{ExperimentConfig, SelectionMode};
use dnasim_harness::report::{self, num};
use dnasim_harness::{compare_selection, run_sweep};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// DNA storage channel simulation toolkit.
#[derive(Parser)]
#[command(name = "dnasim", version)]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Experiment config file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a payload into FASTA chunks.
    Encode(EncodeArgs),
    /// Decode FASTA chunks back into the payload.
    Decode(DecodeArgs),
    /// Generate noisy reads of one FASTA record.
    Corrupt(CorruptArgs),
    /// Select reads from a multi-read FASTA.
    Screen(ScreenArgs),
    /// Positional consensus of a multi-read FASTA.
    Consensus(ConsensusArgs),
    /// Biological constraint report per FASTA record.
    Analyze(AnalyzeArgs),
    /// Compare two images (PGM/PPM) or two FASTA records.
    Metrics(MetricsArgs),
    /// Run the experiment grid and write per-trial CSV plus a summary.
    Sweep(SweepArgs),
    /// Paired MRS-versus-random comparison per (gamma, w).
    Compare(SweepArgs),
}

#[derive(Args)]
struct CodecArgs {
    #[arg(long, default_value_t = CodecVariant::Rotation)]
    codec: CodecVariant,
    /// Chunk length in nucleotides.
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: usize,
}

#[derive(Args)]
struct EncodeArgs {
    /// Payload file; omit when using --random-bytes.
    input: Option<PathBuf>,
    #[arg(long, conflicts_with = "input")]
    random_bytes: Option<usize>,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Args)]
struct DecodeArgs {
    /// FASTA file; standard input when absent.
    input: Option<PathBuf>,
    #[command(flatten)]
    codec: CodecArgs,
}

#[derive(Args)]
struct CorruptArgs {
    input: Option<PathBuf>,
    /// Index of the record to corrupt.
    #[arg(long, default_value_t = 0)]
    record: usize,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_P_SUB)]
    p_sub: f64,
    #[arg(long, default_value_t = DEFAULT_P_INS)]
    p_ins: f64,
    #[arg(long, default_value_t = DEFAULT_P_DEL)]
    p_del: f64,
    /// Number of reads v.
    #[arg(long, default_value_t = 8)]
    reads: usize,
}

#[derive(Args)]
struct ScreenArgs {
    input: Option<PathBuf>,
    #[arg(long)]
    w: usize,
    #[arg(long = "K", default_value_t = DEFAULT_KMER)]
    kmer: usize,
    /// Source strand length.
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = SelectionMode::Mrs)]
    mode: SelectionMode,
    /// Write a per-read score CSV here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ConsensusArgs {
    input: Option<PathBuf>,
    /// Output length; defaults to the longest read.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    stride: usize,
}

#[derive(Args)]
struct MetricsArgs {
    reference: PathBuf,
    candidate: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated error rates.
    #[arg(long)]
    gammas: Option<String>,
    #[arg(long)]
    v: Option<usize>,
    /// Comma-separated selection sizes.
    #[arg(long)]
    ws: Option<String>,
    #[arg(long = "K")]
    kmer: Option<usize>,
    /// Segment length s.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    codec: Option<CodecVariant>,
    /// Comma-separated subset of mrs, random.
    #[arg(long)]
    modes: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// PGM/PPM payload image.
    #[arg(long, conflicts_with = "random_bytes")]
    image: Option<PathBuf>,
    #[arg(long)]
    random_bytes: Option<usize>,
    #[arg(long)]
    payload_seed: Option<u64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    stride: Option<usize>,
    #[arg(long)]
    p_sub: Option<f64>,
    #[arg(long)]
    p_ins: Option<f64>,
    #[arg(long)]
    p_del: Option<f64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Include the wall_time_ms column.
    #[arg(long)]
    timing: bool,
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        Some(p) => std::fs::read(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).context("reading standard input")?;
            Ok(buf)
        }
    }
}

fn read_fasta(path: Option<&Path>) -> Result<Vec<Record>> {
    let bytes = read_input(path)?;
    let text = String::from_utf8(bytes).context("FASTA input is not UTF-8")?;
    let name = path.map_or("<stdin>".into(), |p| p.display().to_string());
    fasta::parse_str(&text).with_context(|| format!("parsing {name}"))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|()| stdout.flush()) {
                // a closed downstream pipe is not our failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

fn encode(cli: &Cli, args: &EncodeArgs) -> Result<()> {
    let payload = match (args.random_bytes, &args.input) {
        (Some(n), _) => {
            let mut bytes = vec![0u8; n];
            ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0)).fill_bytes(&mut bytes);
            bytes
        }
        (None, Some(path)) => read_input(Some(path))?,
        (None, None) => bail!("give an input file or --random-bytes"),
    };
    let spec = CodecSpec::new(args.codec.codec, args.codec.chunk);
    let records: Vec<Record> = spec
        .encode_chunks(&payload)
        .into_iter()
        .enumerate()
        .map(|(i, seq)| Record::new(format!("chunk_{i}"), seq))
        .collect();
    emit(cli.out.as_deref(), fasta::to_string(&records).as_bytes())
}

fn decode(cli: &Cli, args: &DecodeArgs) -> Result<()> {
    let records = read_fasta(args.input.as_deref())?;
    let spec = CodecSpec::new(args.codec.codec, args.codec.chunk);
    let chunks: Vec<_> = records.iter().map(|r| &r.seq).collect();
    let payload = spec.decode_chunks(&chunks).context("decoding chunks")?;
    emit(cli.out.as_deref(), &payload)
}

fn corrupt(cli: &Cli, args: &CorruptArgs) -> Result<()> {
    let records = read_fasta(args.input.as_deref())?;
    let source = records
        .get(args.record)
        .with_context(|| format!("record {} not found ({} records)", args.record, records.len()))?;
    let spec = ChannelSpec::with_split(args.gamma, args.p_sub, args.p_ins, args.p_del, cli.seed.unwrap_or(0))?;
    let reads = generate_reads(&source.seq, &spec, args.reads);
    let out: Vec<Record> = reads
        .reads
        .into_iter()
        .enumerate()
        .map(|(i, seq)| Record::new(format!("read_{}", i + 1), seq))
        .collect();
    emit(cli.out.as_deref(), fasta::to_string(&out).as_bytes())
}

fn screen(cli: &Cli, args: &ScreenArgs) -> Result<()> {
    let records = read_fasta(args.input.as_deref())?;
    let reads = ReadSet::new(args.k, records.iter().map(|r| r.seq.clone()).collect());
    let result = match args.mode {
        SelectionMode::Mrs => mrs::select(&reads, args.w, args.kmer)?,
        SelectionMode::Random => mrs::select_random(&reads, args.w, cli.seed.unwrap_or(0))?,
    };
    let chosen: Vec<Record> = result.selected.iter().map(|&i| records[i].clone()).collect();
    emit(cli.out.as_deref(), fasta::to_string(&chosen).as_bytes())?;
    if let Some(path) = &args.report {
        let mut csv = String::from("read_index,q_numerator,q_denominator,selected,tie_broken\n");
        for (i, q) in result.scores.iter().enumerate() {
            let tied = result
                .kmer_scores
                .as_ref()
                .is_some_and(|ks| ks.iter().any(|&(j, _)| j == i));
            writeln!(csv, "{},{},{},{},{}", i + 1, q.numer(), q.denom(), result.is_selected(i), tied)?;
        }
        std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn consensus(cli: &Cli, args: &ConsensusArgs) -> Result<()> {
    let records = read_fasta(args.input.as_deref())?;
    if records.is_empty() {
        bail!("no reads to combine");
    }
    let k = args
        .k
        .unwrap_or_else(|| records.iter().map(|r| r.seq.len()).max().unwrap_or(0));
    let rows: Vec<Vec<u8>> = records
        .iter()
        .map(|r| dnasim_core::dna::to_decoder_symbols(&r.seq, k))
        .collect();
    let seq = codec::consensus_decode(&rows);
    emit(cli.out.as_deref(), fasta::to_string(&[Record::new("consensus", seq)]).as_bytes())
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<()> {
    let spec = SegmentSpec::new(args.d, args.stride)?;
    let records = read_fasta(args.input.as_deref())?;
    let mut csv = String::from("record,length,gc_fraction,max_run,run_1,run_2,run_3,run_4,run_ge5,penalty,m\n");
    for r in &records {
        let hist = bio::homopolymer_histogram(&r.seq);
        let total: usize = hist.values().sum();
        let share = |n: usize| if total == 0 { 0.0 } else { n as f64 / total as f64 };
        let runs: Vec<String> = (1..=4)
            .map(|len| num(share(hist.get(&len).copied().unwrap_or(0))))
            .chain([num(share(hist.range(5..).map(|(_, c)| c).sum()))])
            .collect();
        let gc = if r.seq.is_empty() { String::new() } else { num(bio::gc_content::<f64>(&r.seq)?) };
        let (penalty, m) = if r.seq.len() >= spec.d {
            let digits = r.seq.digits();
            let pen = bio::constraint_penalty::<f64>(digits.as_slice(), &spec)?;
            (num(pen), spec.window_count(r.seq.len()).to_string())
        } else {
            (String::new(), "0".into())
        };
        let max_run = hist.keys().max().copied().unwrap_or(0);
        writeln!(csv, "{},{},{gc},{max_run},{},{penalty},{m}", r.id, r.seq.len(), runs.join(","))?;
    }
    emit(cli.out.as_deref(), csv.as_bytes())
}

fn metrics(cli: &Cli, args: &MetricsArgs) -> Result<()> {
    let a = read_input(Some(&args.reference))?;
    let b = read_input(Some(&args.candidate))?;
    let csv = if a.starts_with(b"P5") || a.starts_with(b"P6") {
        let x = netpbm::decode(&a).context("reference image")?;
        let y = netpbm::decode(&b).context("candidate image")?;
        let mse: f64 = metrics::mse(&x, &y)?;
        let ssim = match metrics::ssim::<f64>(&x, &y) {
            Ok(s) => s,
            Err(dnasim_core::Error::ImageTooSmall { .. }) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        format!(
            "mse,psnr,ssim\n{},{},{}\n",
            num(mse),
            num(metrics::psnr_from_mse(mse)),
            num(ssim)
        )
    } else {
        let first = |path: &Path| -> Result<Record> {
            read_fasta(Some(path))?
                .into_iter()
                .next()
                .with_context(|| format!("{} has no records", path.display()))
        };
        let (x, y) = (first(&args.reference)?, first(&args.candidate)?);
        let ber: f64 = codec::ber(x.seq.digits().as_slice(), y.seq.digits().as_slice())?;
        format!(
            "edit_distance,ber,reference_length,candidate_length\n{},{},{},{}\n",
            edit_distance(&x.seq, &y.seq),
            num(ber),
            x.seq.len(),
            y.seq.len()
        )
    };
    emit(cli.out.as_deref(), csv.as_bytes())
}

/// Defaults, then the config file, then flags.
fn experiment_config(cli: &Cli, args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let s = |v: &dyn ToString| v.to_string();
    let overrides: Vec<(&str, Option<String>)> = vec![
        ("gammas", args.gammas.clone()),
        ("v", args.v.map(|x| s(&x))),
        ("ws", args.ws.clone()),
        ("K", args.kmer.map(|x| s(&x))),
        ("s", args.s.map(|x| s(&x))),
        ("codec", args.codec.map(|x| s(&x))),
        ("modes", args.modes.clone()),
        ("trials", args.trials.map(|x| s(&x))),
        ("image", args.image.as_ref().map(|p| p.display().to_string())),
        ("random_bytes", args.random_bytes.map(|x| s(&x))),
        ("payload_seed", args.payload_seed.map(|x| s(&x))),
        ("d", args.d.map(|x| s(&x))),
        ("stride", args.stride.map(|x| s(&x))),
        ("p_sub", args.p_sub.map(|x| s(&x))),
        ("p_ins", args.p_ins.map(|x| s(&x))),
        ("p_del", args.p_del.map(|x| s(&x))),
        ("threads", args.threads.map(|x| s(&x))),
        ("seed", cli.seed.map(|x| s(&x))),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            cfg.set(key, &value).map_err(|e| anyhow::anyhow!("--{key}: {e}"))?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.output = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let cfg = experiment_config(cli, args)?;
    let result = run_sweep(&cfg)?;
    let trials = report::trials_csv(&result.records, args.timing);
    let summary = report::summary_csv(&result.summary);
    match &cfg.output {
        Some(path) => {
            report::write_file(path, &trials)?;
            report::write_file(&report::summary_path(path), &summary)?;
        }
        None => emit(None, format!("{trials}\n{summary}").as_bytes())?,
    }
    Ok(())
}

fn compare(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let cfg = experiment_config(cli, args)?;
    let (_, rows) = compare_selection(&cfg)?;
    let csv = report::comparison_csv(&rows);
    match &cfg.output {
        Some(path) => report::write_file(path, &csv)?,
        None => emit(None, csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Encode(a) => encode(&cli, a),
        Command::Decode(a) => decode(&cli, a),
        Command::Corrupt(a) => corrupt(&cli, a),
        Command::Screen(a) => screen(&cli, a),
        Command::Consensus(a) => consensus(&cli, a),
        Command::Analyze(a) => analyze(&cli, a),
        Command::Metrics(a) => metrics(&cli, a),
        Command::Sweep(a) => sweep(&cli, a),
        Command::Compare(a) => compare(&cli, a),
    }
}
