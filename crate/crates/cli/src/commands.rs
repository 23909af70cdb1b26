use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ergm_core::io::{attach_attributes, parse_edge_list, write_edge_list};
use ergm_core::pipeline::{fit_models, model_space, screen_fits, STAGE_BOUND, STAGE_FIT, STAGE_SCREEN, STAGE_SELECT};
use ergm_core::{
    bound_all, build_candidate_set, derive_seed, fit_exact, fit_mcmle, fit_mple, fit_null, parse_model_terms,
    parse_rules, sample, stochastic_forward_select, ErgmModel, FitResult, Fitter, Init, McmleConfig,
    McmleFitter, MpleFitter, Network, SamplerConfig, ScreeningRule, SelectionReport, TermSpec,
};
use log::info;

use crate::config::{FitterKind, PipelineConfig};
use crate::draw;
use crate::error::{config, CliError};
use crate::report::*;

/// Seed component for the per-model draw files.
const STAGE_DRAWINGS: u64 = 5;
const DRAWINGS: usize = 3;

#[derive(Debug, Parser)]
#[command(name = "ergm", version, about = "Fit, select and screen exponential random graph models")]
pub struct Cli {
    /// Master seed; every stochastic step derives its seed from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// -v for progress, -vv for per-iteration detail.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Edge-list file.
    #[arg(long)]
    pub network: PathBuf,
    /// Node attribute CSV.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Schedule {
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Sweeps before the first draw.
    #[arg(long, default_value_t = 20)]
    pub burn_in: u64,
    /// Sweeps between draws.
    #[arg(long, default_value_t = 1)]
    pub interval: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Method {
    Null,
    Mple,
    Mcmle,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Start {
    Observed,
    Empty,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bounds for the k-star and shared-partner families.
    Bound {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = FitterKind::Mcmle)]
        fitter: FitterKind,
        #[arg(long, default_value = "ergm-out")]
        out: PathBuf,
    },
    /// Stochastic forward selection over the candidate terms.
    Select {
        #[command(flatten)]
        input: Input,
        /// Bounds from an earlier `bound` run; bounding is rerun without it.
        #[arg(long)]
        bounds: Option<PathBuf>,
        #[arg(long, default_value_t = 30)]
        refits: usize,
        #[arg(long, value_enum, default_value_t = FitterKind::Mcmle)]
        fitter: FitterKind,
        #[arg(long, default_value = "ergm-out")]
        out: PathBuf,
    },
    /// Fit the model space of a selection and screen it for degeneracy.
    Screen {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        selection: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Exogenous terms added to every model, e.g. "nodecov,attr=wealth".
        #[arg(long)]
        exogenous: Option<String>,
        #[command(flatten)]
        schedule: Schedule,
        #[arg(long, default_value = "ergm-out")]
        out: PathBuf,
    },
    /// Fit one model and print the result as JSON.
    Fit {
        #[command(flatten)]
        input: Input,
        /// Model terms, e.g. "edges + triangle".
        #[arg(long)]
        terms: String,
        #[arg(long, value_enum, default_value_t = Method::Mcmle)]
        method: Method,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Draw networks from a model on the node set of the input network.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        terms: String,
        /// Comma-separated coefficients, one per term.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[command(flatten)]
        schedule: Schedule,
        #[arg(long, value_enum, default_value_t = Start::Observed)]
        start: Start,
        #[arg(long, default_value = "ergm-draws")]
        out: PathBuf,
    },
    /// Motif census of a network.
    Motifs {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the tables of an output directory.
    Report {
        #[arg(default_value = "ergm-out")]
        dir: PathBuf,
    },
    /// Bound, select, fit, screen and draw in one run.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// key = value file; the flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long)]
    pub refits: Option<usize>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub interval: Option<u64>,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub exogenous: Option<String>,
    #[arg(long, value_enum)]
    pub fitter: Option<FitterKind>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl PipelineArgs {
    fn resolve(&self, seed: Option<u64>) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.to_string_lossy().into_owned());
        let overrides = [
            ("network", path(&self.network)),
            ("attributes", path(&self.attributes)),
            ("refits", self.refits.map(|v| v.to_string())),
            ("draws", self.draws.map(|v| v.to_string())),
            ("burn_in", self.burn_in.map(|v| v.to_string())),
            ("interval", self.interval.map(|v| v.to_string())),
            ("rules", path(&self.rules)),
            ("exogenous", self.exogenous.clone()),
            ("out", path(&self.out)),
            ("seed", seed.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v, None)?;
            }
        }
        if let Some(f) = self.fitter {
            cfg.fitter = f;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| config("this command needs --seed"))
}

pub fn load_network(network: &Path, attributes: Option<&Path>) -> Result<Network> {
    let text = std::fs::read_to_string(network)
        .map_err(|e| config(format!("cannot read network {}: {e}", network.display())))?;
    let mut net = parse_edge_list(&text).with_context(|| format!("{}", network.display()))?;
    if let Some(path) = attributes {
        let csv = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read attributes {}: {e}", path.display())))?;
        attach_attributes(&mut net, &csv).with_context(|| format!("{}", path.display()))?;
    }
    Ok(net)
}

fn network_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| "network".into(), |s| s.to_string_lossy().into_owned())
}

fn fitter_for(kind: FitterKind, mcmle: &McmleConfig) -> Box<dyn Fitter> {
    match kind {
        FitterKind::Mple => Box::new(MpleFitter),
        FitterKind::Mcmle => Box::new(McmleFitter::new(mcmle.clone())),
    }
}

fn load_rules(path: Option<&Path>) -> Result<Vec<ScreeningRule>> {
    let mut rules = vec![ScreeningRule::default_degeneracy()];
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read rules {}: {e}", path.display())))?;
        rules.extend(parse_rules(&text).with_context(|| format!("{}", path.display()))?);
    }
    Ok(rules)
}

fn exogenous_terms(spec: Option<&str>) -> Result<Vec<TermSpec>> {
    let mut cfg = PipelineConfig::default();
    if let Some(s) = spec {
        cfg.set("exogenous", s, None)?;
    }
    Ok(cfg.exogenous)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| config(format!("cannot create {}: {e}", dir.display())))
}

pub fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Bound { input, fitter, out } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let seed = require_seed(seed)?;
            create_dir(&out)?;
            let b = bound_stage(&net, fitter, &McmleConfig::default(), seed)?;
            write_json(&out, BOUNDS, &b)?;
            print!("{}", bounds_table(&b));
        }
        Command::Select { input, bounds, refits, fitter, out } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let seed = require_seed(seed)?;
            create_dir(&out)?;
            let mcmle = McmleConfig::default();
            let b = match bounds {
                Some(path) => read_json::<BoundsArtifact>(&path)?,
                None => {
                    let b = bound_stage(&net, fitter, &mcmle, seed)?;
                    write_json(&out, BOUNDS, &b)?;
                    b
                }
            };
            let (candidates, selection) = select_stage(&net, &b, refits, fitter, &mcmle, seed)?;
            write_json(&out, CANDIDATES, &candidates)?;
            write_json(&out, SELECTION, &selection)?;
            print!("{}\n{}", candidates_table(&candidates), selection_table(&selection));
        }
        Command::Screen { input, selection, rules, exogenous, schedule, out } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let seed = require_seed(seed)?;
            let selection: SelectionReport = read_json(&selection)?;
            let rules = load_rules(rules.as_deref())?;
            let exogenous = exogenous_terms(exogenous.as_deref())?;
            create_dir(&out)?;
            let screening = screen_stage(&net, &selection.surviving, &exogenous, &rules, &schedule, &McmleConfig::default(), seed, &out)?;
            print!("{}", screening_table(&screening));
            no_survivors(&screening)?;
        }
        Command::Fit { input, terms, method, output } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let terms = parse_model_terms(&terms)?;
            let fit = match method {
                Method::Null => fit_null(&net)?,
                Method::Mple => fit_mple(&net, &terms)?,
                Method::Exact => fit_exact(&net, &terms)?,
                Method::Mcmle => fit_mcmle(&net, &terms, &McmleConfig::default(), require_seed(seed)?)?,
            };
            emit(output.as_deref(), &fit)?;
        }
        Command::Simulate { input, terms, theta, schedule, start, out } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let terms = parse_model_terms(&terms)?;
            let theta = theta
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| config(format!("`{t}` is not a number"))))
                .collect::<Result<Vec<_>>>()?;
            let model = ErgmModel::new(terms, theta)?;
            let cfg = SamplerConfig {
                burn_in: schedule.burn_in,
                interval: schedule.interval,
                draws: schedule.draws,
                seed: require_seed(seed)?,
                init: match start {
                    Start::Observed => Init::Observed,
                    Start::Empty => Init::Empty,
                },
            };
            let drawn = sample(&model, &net, &cfg)?;
            create_dir(&out)?;
            let mut stats = String::from(&format!("draw\t{}\n", model.terms().iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\t")));
            for (k, (g, s)) in drawn.networks.iter().zip(&drawn.stats).enumerate() {
                write_file(&out.join(format!("draw_{:03}.edgelist", k + 1)), &write_edge_list(g))?;
                let cells: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                stats.push_str(&format!("{}\t{}\n", k + 1, cells.join("\t")));
            }
            write_file(&out.join("stats.tsv"), &stats)?;
            let shown: Vec<Network> = drawn.networks.iter().take(DRAWINGS).cloned().collect();
            write_file(&out.join("draws.svg"), &draw::svg_grid(&net, &shown, cfg.seed)?)?;
            println!("{} draws written to {}", drawn.networks.len(), out.display());
        }
        Command::Motifs { input, output } => {
            let net = load_network(&input.network, input.attributes.as_deref())?;
            let motifs = MotifsArtifact::of(&network_name(&input.network), &net);
            match output {
                Some(path) => {
                    write_file(&path, &to_json(&motifs)?)?;
                    print!("{}", motifs_table(&motifs));
                }
                None => print!("{}", to_json(&motifs)?),
            }
        }
        Command::Report { dir } => report(&dir)?,
        Command::Pipeline(args) => {
            let cfg = args.resolve(seed)?;
            pipeline(&cfg)?;
        }
    }
    Ok(())
}

fn emit(output: Option<&Path>, fit: &FitResult) -> Result<()> {
    match output {
        Some(path) => write_file(path, &to_json(fit)?),
        None => {
            print!("{}", to_json(fit)?);
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn no_survivors(s: &ScreeningArtifact) -> Result<()> {
    if s.total == 0 {
        return Err(CliError::Numerical("no term survived selection, so there is no model to screen".into()).into());
    }
    if s.survivors == 0 {
        return Err(CliError::Numerical(format!("no model survived screening ({} of {} degenerate)", s.degenerate, s.total)).into());
    }
    Ok(())
}

pub fn bound_stage(net: &Network, kind: FitterKind, mcmle: &McmleConfig, seed: u64) -> Result<BoundsArtifact> {
    let fitter = fitter_for(kind, mcmle);
    let (bounds, traces) = bound_all(net, fitter.as_ref(), derive_seed(seed, &[STAGE_BOUND]))?;
    info!("bounds {bounds:?}");
    Ok(BoundsArtifact {
        seed,
        fitter: kind,
        bounds,
        traces,
    })
}

pub fn select_stage(
    net: &Network,
    bounds: &BoundsArtifact,
    refits: usize,
    kind: FitterKind,
    mcmle: &McmleConfig,
    seed: u64,
) -> Result<(CandidatesArtifact, SelectionReport)> {
    let fitter = fitter_for(kind, mcmle);
    let candidates = build_candidate_set(bounds.bounds);
    let selection =
        stochastic_forward_select(net, &candidates.terms, refits, fitter.as_ref(), derive_seed(seed, &[STAGE_SELECT]))?;
    info!("{} of {} terms kept", selection.surviving.len(), candidates.len());
    Ok((CandidatesArtifact::from(&candidates), selection))
}

/// Fits the model space of `surviving`, screens the finite fits and writes
/// screening.json plus per-model fits, draws and drawings under `out`.
#[allow(clippy::too_many_arguments)]
pub fn screen_stage(
    net: &Network,
    surviving: &[TermSpec],
    exogenous: &[TermSpec],
    rules: &[ScreeningRule],
    schedule: &Schedule,
    mcmle: &McmleConfig,
    seed: u64,
    out: &Path,
) -> Result<ScreeningArtifact> {
    let models = model_space(surviving, exogenous);
    info!("fitting {} models", models.len());
    let fits = fit_models(net, &models, mcmle, derive_seed(seed, &[STAGE_FIT]))?;
    let cfg = SamplerConfig {
        burn_in: schedule.burn_in,
        interval: schedule.interval,
        draws: schedule.draws,
        seed: derive_seed(seed, &[STAGE_SCREEN]),
        init: Init::Observed,
    };
    let report = screen_fits(net, &fits, rules, &cfg)?;
    let screening = ScreeningArtifact::new(seed, &fits, report);
    write_models(net, &fits, schedule, seed, out)?;
    write_json(out, SCREENING, &screening)?;
    Ok(screening)
}

fn write_models(net: &Network, fits: &[FitResult], schedule: &Schedule, seed: u64, out: &Path) -> Result<()> {
    let dir = out.join(MODELS_DIR);
    if dir.exists() {
        // stale files from a larger model space would otherwise linger
        std::fs::remove_dir_all(&dir).with_context(|| format!("cannot clear {}", dir.display()))?;
    }
    create_dir(&dir)?;
    for (i, fit) in fits.iter().enumerate() {
        write_json(out, &fit_file_name(i), fit)?;
        if !fit.is_finite() {
            continue;
        }
        let model = ErgmModel::new(fit.terms.clone(), fit.theta_hat.clone())?;
        let cfg = SamplerConfig {
            burn_in: schedule.burn_in,
            interval: schedule.interval.max(1),
            draws: DRAWINGS,
            seed: derive_seed(seed, &[STAGE_DRAWINGS, i as u64]),
            init: Init::Observed,
        };
        let drawn = sample(&model, net, &cfg)?;
        for (k, g) in drawn.networks.iter().enumerate() {
            write_file(&dir.join(format!("model_{i:03}_draw{}.edgelist", k + 1)), &write_edge_list(g))?;
        }
        write_file(&dir.join(format!("model_{i:03}.svg")), &draw::svg_grid(net, &drawn.networks, cfg.seed)?)?;
        write_file(&dir.join(format!("model_{i:03}.dot")), &draw::dot(&drawn.networks[0], &format!("model_{i:03}")))?;
    }
    Ok(())
}

pub fn pipeline(cfg: &PipelineConfig) -> Result<ScreeningArtifact> {
    let network = cfg.network.as_deref().ok_or_else(|| config("no network given"))?;
    let seed = cfg.seed.ok_or_else(|| config("a seed is required"))?;
    let net = load_network(network, cfg.attributes.as_deref())?;
    let rules = load_rules(cfg.rules.as_deref())?;
    let out = &cfg.out;
    create_dir(out)?;
    let mcmle = McmleConfig::default();

    let motifs = MotifsArtifact::of(&network_name(network), &net);
    write_json(out, MOTIFS, &motifs)?;
    println!("{}", motifs_table(&motifs));

    let bounds = bound_stage(&net, cfg.fitter, &mcmle, seed)?;
    write_json(out, BOUNDS, &bounds)?;
    println!("{}", bounds_table(&bounds));

    let (candidates, selection) = select_stage(&net, &bounds, cfg.refits, cfg.fitter, &mcmle, seed)?;
    write_json(out, CANDIDATES, &candidates)?;
    write_json(out, SELECTION, &selection)?;
    print!("{}\n{}\n", candidates_table(&candidates), selection_table(&selection));

    let schedule = Schedule {
        draws: cfg.draws,
        burn_in: cfg.burn_in,
        interval: cfg.interval,
    };
    let screening = screen_stage(&net, &selection.surviving, &cfg.exogenous, &rules, &schedule, &mcmle, seed, out)?;
    print!("{}", screening_table(&screening));
    no_survivors(&screening)?;
    Ok(screening)
}

fn report(dir: &Path) -> Result<()> {
    let mut found = false;
    if dir.join(MOTIFS).exists() {
        println!("{}", motifs_table(&read_json(&dir.join(MOTIFS))?));
        found = true;
    }
    if dir.join(BOUNDS).exists() {
        println!("{}", bounds_table(&read_json(&dir.join(BOUNDS))?));
        found = true;
    }
    if dir.join(CANDIDATES).exists() {
        println!("{}", candidates_table(&read_json(&dir.join(CANDIDATES))?));
        found = true;
    }
    if dir.join(SELECTION).exists() {
        println!("{}", selection_table(&read_json(&dir.join(SELECTION))?));
        found = true;
    }
    if dir.join(SCREENING).exists() {
        print!("{}", screening_table(&read_json(&dir.join(SCREENING))?));
        found = true;
    }
    if !found {
        return Err(config(format!("no reports in {}", dir.display())));
    }
    Ok(())
}
