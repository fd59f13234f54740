//! Command-line front end.
//!
//! Every subcommand reads and writes the documented text formats, logs its
//! resolved configuration to standard error, and is deterministic for a fixed
//! `--seed` and `--threads`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use crate::bench::{
    inject_missing, parse_report, run_benchmark, sample_dataset, wilcoxon_signed_rank, wilcoxon_table, write_report,
    write_wilcoxon_table, BenchConfig, BenchDataset, DataSource, MissingnessSpec, PMethod, DEFAULT_LEVELS,
};
use crate::discretize::{parse_real_dataset, sax_discretize, SaxConfig};
use crate::imputation::{impute, impute_with_model, ImputationResult, Method};
use crate::inference::DEFAULT_ENUMERATION_CAP;
use crate::learning::{random_dbn, random_dbn_for, structural_em, LearnConfig, SemInit};
use crate::model::{
    parse_dataset, parse_dbn, parse_domains, write_dataset, write_dbn, write_domains, AttributeSpec, CellRef, Dataset,
    Dbn, DbnParameters, DbnStructure,
};
use crate::rng::{derive_seed, Stream};
use crate::scoring::PenaltyBase;
use crate::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// Learn tree-augmented dynamic Bayesian networks from incomplete categorical
/// time series and impute the missing values.
#[derive(Debug, Parser)]
#[command(name = "tdbn-impute", version, about)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a network with Structural EM.
    Learn(LearnArgs),
    /// Fill the missing cells of a dataset.
    Impute(ImputeArgs),
    /// Sample complete trajectories from a network (given or random).
    Sample(SampleArgs),
    /// Blank cells of a complete dataset at random.
    Inject(InjectArgs),
    /// Discretize real-valued series with SAX.
    Sax(SaxArgs),
    /// Compare imputers over a missingness grid.
    Bench(BenchArgs),
    /// Wilcoxon signed-rank test on paired values or on a bench report.
    Wilcoxon(WilcoxonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBase {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Dbn,
    Locf,
    Mode,
    Em,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Dbn => Method::Dbn,
            MethodArg::Locf => Method::Locf,
            MethodArg::Mode => Method::Mode,
            MethodArg::Em => Method::ParamEm,
        }
    }
}

/// Structural EM and parameter EM settings.
#[derive(Debug, Clone, Args)]
pub struct LearnFlags {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inter-slice parents per transition node.
    #[arg(long, default_value_t = 1)]
    pub max_inter_parents: usize,
    #[arg(long, default_value_t = 100)]
    pub em_max_iters: usize,
    /// Relative objective gain below which EM and Structural EM stop.
    #[arg(long, default_value_t = 1e-4)]
    pub em_tol: f64,
    #[arg(long, default_value_t = 20)]
    pub sem_max_iters: usize,
    /// Add-alpha smoothing of every M-step.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Joint completions allowed per two-slice window.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub enumeration_cap: u64,
    /// Logarithm base of the MDL penalty.
    #[arg(long, value_enum, default_value = "2")]
    pub score_log_base: LogBase,
    /// Starting network of Structural EM.
    #[arg(long, value_enum, default_value = "random")]
    pub init: InitArg,
    /// Skip parameter EM before each structure step.
    #[arg(long)]
    pub no_param_em: bool,
}

impl LearnFlags {
    pub fn config(&self) -> LearnConfig {
        LearnConfig {
            max_inter_parents: self.max_inter_parents,
            em_max_iters: self.em_max_iters,
            em_rel_tol: self.em_tol,
            sem_max_iters: self.sem_max_iters,
            smoothing_alpha: self.alpha,
            seed: self.seed,
            enumeration_cap: self.enumeration_cap,
            penalty_base: match self.score_log_base {
                LogBase::Two => PenaltyBase::Two,
                LogBase::E => PenaltyBase::Natural,
            },
            param_em_in_sem: !self.no_param_em,
            sem_init: match self.init {
                InitArg::Random => SemInit::Random,
                InitArg::Empty => SemInit::Empty,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Categorical dataset CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Attribute domains file (`name: v1 v2 ...`); inferred from the data
    /// when absent.
    #[arg(long)]
    pub domains: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Where to write the learned network (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Trace CSV `iteration,log_likelihood,mdl`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[command(flatten)]
    pub learn: LearnFlags,
}

#[derive(Debug, Args)]
pub struct ImputeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, short, value_enum, default_value = "dbn")]
    pub method: MethodArg,
    /// Use this network instead of learning one (method dbn only).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Completed dataset (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Sidecar CSV listing every imputed cell.
    #[arg(long)]
    pub provenance: Option<PathBuf>,
    #[command(flatten)]
    pub learn: LearnFlags,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Network to sample from; a random one is generated when absent.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Attributes of the random network.
    #[arg(long, default_value_t = 5)]
    pub vars: usize,
    /// Cardinality of every attribute of the random network.
    #[arg(long, default_value_t = 2)]
    pub cardinality: usize,
    #[arg(long, default_value_t = 1)]
    pub max_inter_parents: usize,
    #[arg(long, default_value_t = 100)]
    pub subjects: usize,
    #[arg(long, default_value_t = 10)]
    pub slices: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled dataset (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the generating network here.
    #[arg(long)]
    pub model_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InjectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Fraction of subjects affected, in [0, 1].
    #[arg(long)]
    pub pct_subjects: f64,
    /// Fraction of cells blanked in each affected subject, in [0, 1].
    #[arg(long)]
    pub pct_cells: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Masked dataset (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// CSV `subject_id,slice,attribute` of the blanked cells.
    #[arg(long)]
    pub mask: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaxArgs {
    /// Real-valued dataset CSV.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub alphabet: usize,
    #[arg(long, default_value_t = 100)]
    pub max_length: usize,
    /// Keep the first points instead of averaging frames.
    #[arg(long)]
    pub truncate: bool,
    /// Discretized dataset (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the symbol domains here.
    #[arg(long)]
    pub domains_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Complete dataset to mask; synthetic data is generated per seed when
    /// absent.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Attribute domains file for `--input`.
    #[arg(long, requires = "input")]
    pub domains: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub vars: usize,
    #[arg(long, default_value_t = 2)]
    pub cardinality: usize,
    #[arg(long, default_value_t = 100)]
    pub subjects: usize,
    #[arg(long, default_value_t = 10)]
    pub slices: usize,
    /// Fractions of affected subjects.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
    pub subject_levels: Vec<f64>,
    /// Fractions of blanked cells per affected subject.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
    pub cell_levels: Vec<f64>,
    /// Number of seeds; seeds are `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Dbn, MethodArg::Locf, MethodArg::Mode])]
    pub methods: Vec<MethodArg>,
    /// Report CSV (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Wilcoxon p-value table of dbn against every other method.
    #[arg(long)]
    pub wilcoxon_output: Option<PathBuf>,
    #[command(flatten)]
    pub learn: LearnFlags,
}

#[derive(Debug, Args)]
pub struct WilcoxonArgs {
    /// Two-column CSV of paired values with a header line.
    #[arg(long, short, conflicts_with = "report", required_unless_present = "report")]
    pub input: Option<PathBuf>,
    /// Bench report; prints the p-value table of `--reference` against the
    /// other methods.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dbn")]
    pub reference: MethodArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Exit status for an error: 3 for an exceeded enumeration cap, 2 for bad
/// input, 4 for anything else.
pub fn exit_code(err: &Error) -> u8 {
    if err.is_resource_limit() {
        return EXIT_RESOURCE;
    }
    match err {
        Error::Parse { .. } | Error::Invalid(_) | Error::InWindow { .. } => EXIT_VALIDATION,
        Error::Io(e) if matches!(e.kind(), io::ErrorKind::NotFound | io::ErrorKind::PermissionDenied) => {
            EXIT_VALIDATION
        }
        _ => EXIT_INTERNAL,
    }
}

pub fn run(cli: Cli) -> Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Error::Invalid("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    info!("threads: {}", cli.threads.map_or("all".to_string(), |t| t.to_string()));
    match cli.command {
        Command::Learn(a) => cmd_learn(&a),
        Command::Impute(a) => cmd_impute(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Inject(a) => cmd_inject(&a),
        Command::Sax(a) => cmd_sax(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Wilcoxon(a) => cmd_wilcoxon(&a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Buffered writer to `path`, or to standard output.
fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Error::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display())))
            })?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let mut out = create(path)?;
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

fn load_domains(path: Option<&PathBuf>) -> Result<Option<Vec<AttributeSpec>>> {
    path.map(|p| parse_domains(open(p)?)).transpose()
}

fn load_dataset(args: &DataArgs) -> Result<Dataset> {
    let domains = load_domains(args.domains.as_ref())?;
    let data = parse_dataset(open(&args.input)?, domains.as_deref())?;
    info!(
        "dataset {}: {} subjects, {} slices, {} attributes, {} missing cells",
        args.input.display(),
        data.num_subjects(),
        data.num_slices(),
        data.num_attributes(),
        data.missing_cells().len()
    );
    Ok(data)
}

fn log_config(config: &LearnConfig) {
    info!("learn config: {config:?}");
}

pub fn cmd_learn(args: &LearnArgs) -> Result<()> {
    let config = args.learn.config();
    log_config(&config);
    config.validate()?;
    let data = load_dataset(&args.data)?;
    let init = match config.sem_init {
        SemInit::Random => random_dbn_for(
            data.attributes(),
            config.max_inter_parents,
            derive_seed(config.seed, &[Stream::Init as u64]),
        )?,
        SemInit::Empty => {
            let s = DbnStructure::empty(data.num_attributes());
            let params = DbnParameters::uniform(&s, &data.cardinalities());
            Dbn::new(data.attributes().to_vec(), s, params)?
        }
    };
    let sem = structural_em(init, &data, &config)?;
    info!(
        "structural EM: {} iterations, converged: {}, final score {}",
        sem.iterations(),
        sem.converged,
        sem.trace.last().map_or(f64::NAN, |s| s.score)
    );
    if sem.zero_evidence_windows > 0 {
        warn!(
            "{} windows had zero evidence under the final network",
            sem.zero_evidence_windows
        );
    }
    if let Some(path) = &args.trace {
        write_to(Some(path), |out| {
            writeln!(out, "iteration,log_likelihood,mdl")?;
            for s in &sem.trace {
                writeln!(out, "{},{},{}", s.iteration, s.log_likelihood, s.score)?;
            }
            Ok(())
        })?;
    }
    write_to(args.output.as_deref(), |out| write_dbn(out, &sem.dbn))
}

fn write_provenance(out: &mut dyn Write, result: &ImputationResult) -> Result<()> {
    writeln!(out, "subject_id,slice,attribute,value")?;
    let d = &result.dataset;
    for &CellRef {
        subject,
        slice,
        attribute,
    } in &result.imputed
    {
        let attr = &d.attributes()[attribute];
        let value = d.get(subject, slice, attribute).map_or("?", |v| attr.label(v));
        writeln!(out, "{},{},{},{}", d.subjects()[subject].id, slice, attr.name(), value)?;
    }
    Ok(())
}

pub fn cmd_impute(args: &ImputeArgs) -> Result<()> {
    let config = args.learn.config();
    let method = Method::from(args.method);
    info!("method: {method}");
    log_config(&config);
    config.validate()?;
    let data = load_dataset(&args.data)?;
    let result = match &args.model {
        Some(path) => {
            if method != Method::Dbn {
                return Err(Error::Invalid("--model only applies to --method dbn".into()));
            }
            let dbn = parse_dbn(open(path)?)?;
            impute_with_model(&data, &dbn, config.enumeration_cap, method)?
        }
        None => impute(&data, method, &config)?,
    };
    let diag = &result.diagnostics;
    info!(
        "imputed {} cells; {} tied windows; {} zero-evidence windows",
        result.imputed.len(),
        diag.ties,
        diag.zero_evidence_fallbacks
    );
    for note in &diag.notes {
        warn!("{note}");
    }
    if let Some(path) = &args.provenance {
        write_to(Some(path), |out| write_provenance(out, &result))?;
    }
    write_to(args.output.as_deref(), |out| write_dataset(out, &result.dataset))
}

pub fn cmd_sample(args: &SampleArgs) -> Result<()> {
    info!("sample config: {args:?}");
    let dbn = match &args.model {
        Some(path) => parse_dbn(open(path)?)?,
        None => {
            if args.vars == 0 || args.cardinality == 0 {
                return Err(Error::Invalid("--vars and --cardinality must be positive".into()));
            }
            random_dbn(
                &vec![args.cardinality; args.vars],
                args.max_inter_parents,
                derive_seed(args.seed, &[Stream::Structure as u64]),
            )?
        }
    };
    if args.slices < 2 {
        return Err(Error::Invalid("--slices must be at least 2".into()));
    }
    let data = sample_dataset(&dbn, args.subjects, args.slices, args.seed)?;
    if let Some(path) = &args.model_output {
        write_to(Some(path), |out| write_dbn(out, &dbn))?;
    }
    write_to(args.output.as_deref(), |out| write_dataset(out, &data))
}

pub fn cmd_inject(args: &InjectArgs) -> Result<()> {
    let spec = MissingnessSpec {
        pct_subjects: args.pct_subjects,
        pct_cells: args.pct_cells,
        seed: args.seed,
    };
    info!("missingness: {spec:?}");
    spec.validate()?;
    let data = load_dataset(&args.data)?;
    let injected = inject_missing(&data, &spec)?;
    for note in &injected.notes {
        warn!("{note}");
    }
    info!("blanked {} cells", injected.mask.len());
    if let Some(path) = &args.mask {
        write_to(Some(path), |out| {
            writeln!(out, "subject_id,slice,attribute")?;
            for c in &injected.mask {
                writeln!(
                    out,
                    "{},{},{}",
                    data.subjects()[c.subject].id,
                    c.slice,
                    data.attributes()[c.attribute].name()
                )?;
            }
            Ok(())
        })?;
    }
    write_to(args.output.as_deref(), |out| write_dataset(out, &injected.dataset))
}

pub fn cmd_sax(args: &SaxArgs) -> Result<()> {
    let config = SaxConfig {
        alphabet_size: args.alphabet,
        max_length: args.max_length,
        truncate: args.truncate,
    };
    info!("sax config: {config:?}");
    config.validate()?;
    let real = parse_real_dataset(open(&args.input)?)?;
    let out = sax_discretize(&real, &config)?;
    for note in &out.diagnostics {
        warn!("{note}");
    }
    if let Some(path) = &args.domains_output {
        write_to(Some(path), |w| write_domains(w, out.dataset.attributes()))?;
    }
    write_to(args.output.as_deref(), |w| write_dataset(w, &out.dataset))
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let learn = args.learn.config();
    let dataset = match &args.input {
        Some(path) => BenchDataset {
            name: path
                .file_stem()
                .map_or("input".into(), |s| s.to_string_lossy().into_owned()),
            source: DataSource::Given(load_dataset(&DataArgs {
                input: path.clone(),
                domains: args.domains.clone(),
            })?),
        },
        None => {
            let mut d = BenchDataset::synthetic(args.vars, args.cardinality, args.subjects, args.slices);
            if let DataSource::Synthetic { max_inter_parents, .. } = &mut d.source {
                *max_inter_parents = learn.max_inter_parents;
            }
            d
        }
    };
    let config = BenchConfig {
        datasets: vec![dataset],
        pct_subjects: args.subject_levels.clone(),
        pct_cells: args.cell_levels.clone(),
        seeds: (0..args.seeds).map(|k| learn.seed.wrapping_add(k)).collect(),
        methods: args.methods.iter().map(|&m| m.into()).collect(),
        learn,
        reference: Method::Dbn,
    };
    info!(
        "bench config: dataset {}, subject levels {:?}, cell levels {:?}, seeds {:?}, methods {:?}",
        config.datasets[0].name, config.pct_subjects, config.pct_cells, config.seeds, config.methods
    );
    log_config(&config.learn);
    let report = run_benchmark(&config)?;
    for f in &report.failures {
        warn!("{f}");
    }
    if let Some(path) = &args.wilcoxon_output {
        write_to(Some(path), |out| {
            write_wilcoxon_table(out, &report.levels, &report.wilcoxon)
        })?;
    }
    write_to(args.output.as_deref(), |out| write_report(out, &report.rows))
}

fn read_pairs<R: BufRead>(source: R) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for (k, line) in source.lines().enumerate().skip(1) {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [a, b] = fields[..] else {
            return Err(Error::Parse {
                line: k + 1,
                message: "expected two columns".into(),
            });
        };
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: k + 1,
                message: format!("{s:?} is not a number"),
            })
        };
        pairs.push((num(a)?, num(b)?));
    }
    Ok(pairs)
}

pub fn cmd_wilcoxon(args: &WilcoxonArgs) -> Result<()> {
    if let Some(path) = &args.report {
        let rows = parse_report(open(path)?)?;
        let reference = Method::from(args.reference);
        let mut levels: Vec<f64> = rows.iter().map(|r| r.pct_subjects).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let mut methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
        methods.sort();
        methods.dedup();
        methods.retain(|&m| m != reference.as_str());
        let table = wilcoxon_table(&rows, reference.as_str(), &methods, &levels);
        return write_to(args.output.as_deref(), |out| write_wilcoxon_table(out, &levels, &table));
    }
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| Error::Invalid("--input or --report is required".into()))?;
    let pairs = read_pairs(open(path)?)?;
    let r = wilcoxon_signed_rank(&pairs)?;
    info!(
        "{} pairs, {} non-zero differences, {:?} p-value",
        pairs.len(),
        r.n,
        r.method
    );
    write_to(args.output.as_deref(), |out| {
        writeln!(out, "n,w_plus,w_minus,statistic,p_value,method")?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.n,
            r.w_plus,
            r.w_minus,
            r.statistic(),
            r.p_value,
            match r.method {
                PMethod::Exact => "exact",
                PMethod::Normal => "normal",
            }
        )?;
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["tdbn-impute", "learn", "--input", "x.csv", "--bogus"]).is_err());
    }

    #[test]
    fn learn_flags_map_to_config() {
        let cli = Cli::try_parse_from([
            "tdbn-impute",
            "learn",
            "-i",
            "x.csv",
            "--score-log-base",
            "e",
            "--init",
            "empty",
            "--no-param-em",
            "--seed",
            "9",
        ])
        .unwrap();
        let Command::Learn(args) = cli.command else { panic!() };
        let c = args.learn.config();
        assert_eq!(c.penalty_base, PenaltyBase::Natural);
        assert_eq!(c.sem_init, SemInit::Empty);
        assert!(!c.param_em_in_sem);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn pairs_csv() {
        let pairs = read_pairs("a,b\n1,0\n2, 0.5\n\n".as_bytes()).unwrap();
        assert_eq!(pairs, vec![(1.0, 0.0), (2.0, 0.5)]);
        assert!(read_pairs("a,b\n1\n".as_bytes()).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Invalid("x".into())), EXIT_VALIDATION);
        assert_eq!(
            exit_code(&Error::InWindow {
                subject: 0,
                t: 0,
                source: Box::new(Error::EnumerationCap { assignments: 9, cap: 1 })
            }),
            EXIT_RESOURCE
        );
        assert_eq!(exit_code(&Error::Io(io::Error::other("x"))), EXIT_INTERNAL);
    }
}
