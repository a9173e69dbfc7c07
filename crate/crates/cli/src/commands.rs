//! Subcommand implementations. Each returns the text printed on success.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mgsr_core::analyze::{apply_filter, model_from_genes, probe_matrix, rec_curve, unique_genes, FilterCriteria};
use mgsr_core::data::SplitKind;
use mgsr_core::evolve::{run_with_threads, RunConfig};
use mgsr_core::regress::predict;
use mgsr_core::simplify::{export, simplify_model, to_infix, ExportFormat};

use crate::archive::Archive;
use crate::config::ProjectConfig;
use crate::dataset::{load_csv, LoadedData};
use crate::error::{read_text, write_text, CliError, CliResult};
use crate::html::render_report;
use crate::payload::{build_payload, PayloadOptions};

pub const THREADS_ENV: &str = "MGSR_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mgsr", version, about = "Multigene symbolic regression: evolve, analyse and export models")]
pub struct Cli {
    /// Base random seed (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for fitness evaluation.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    /// Output file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the configured number of seeded runs and write a merged archive.
    Run {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Print the Pareto front and optionally write an HTML report.
    Report {
        archive: PathBuf,
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
        /// Sort rows by R² instead of complexity.
        #[arg(long)]
        by_r2: bool,
        /// JavaScript file inlined into the HTML report in place of the built-in viewer.
        #[arg(long)]
        ui_bundle: Option<PathBuf>,
    },
    /// Keep only the models meeting every given criterion.
    Filter {
        archive: PathBuf,
        #[command(flatten)]
        data: DataArg,
        #[arg(long)]
        min_r2: Option<f64>,
        /// One-based variable indices every survivor must use.
        #[arg(long, value_delimiter = ',')]
        include: Vec<usize>,
        /// One-based variable indices no survivor may use.
        #[arg(long, value_delimiter = ',')]
        exclude: Vec<usize>,
        #[arg(long)]
        max_complexity: Option<usize>,
        #[arg(long)]
        min_vars: Option<usize>,
        #[arg(long)]
        max_vars: Option<usize>,
        #[arg(long)]
        pareto_only: bool,
    },
    /// Export one model as infix text, LaTeX, a C function or JSON.
    Export {
        archive: PathBuf,
        /// Model ID, `best` (lowest training RMSE) or `testbest` (highest test R²).
        model: String,
        #[arg(long, short, default_value = "infix")]
        format: String,
    },
    /// Regression error characteristic curves as CSV.
    Rec {
        archive: PathBuf,
        /// Model IDs or keywords.
        #[arg(required = true)]
        models: Vec<String>,
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_enum, default_value_t = SplitArg::Test)]
        split: SplitArg,
    },
    /// Concatenate archives built on the same dataset.
    Merge {
        #[arg(required = true)]
        archives: Vec<PathBuf>,
    },
    /// Build and fit a model from unique-gene IDs.
    Genes {
        archive: PathBuf,
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_delimiter = ',', conflicts_with = "from_selection")]
        ids: Vec<usize>,
        /// Text file with one gene ID per line.
        #[arg(long)]
        from_selection: Option<PathBuf>,
        #[arg(long, short, default_value = "infix")]
        format: String,
    },
}

#[derive(Debug, Args)]
pub struct DataArg {
    /// Dataset CSV to use instead of the path recorded in the archive.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    #[value(alias = "val")]
    Validation,
    Test,
}

impl From<SplitArg> for SplitKind {
    fn from(s: SplitArg) -> SplitKind {
        match s {
            SplitArg::Train => SplitKind::Train,
            SplitArg::Validation => SplitKind::Validation,
            SplitArg::Test => SplitKind::Test,
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn execute(cli: Cli) -> CliResult<String> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Run { config } => cmd_run(&config, cli.seed, cli.threads, out),
        Command::Report {
            archive,
            data,
            split,
            by_r2,
            ui_bundle,
        } => cmd_report(&archive, data.data.as_deref(), split.into(), by_r2, ui_bundle.as_deref(), out),
        Command::Filter {
            archive,
            data,
            min_r2,
            include,
            exclude,
            max_complexity,
            min_vars,
            max_vars,
            pareto_only,
        } => {
            let criteria = FilterCriteria {
                min_r2_train: min_r2,
                include_vars: include.into_iter().collect(),
                exclude_vars: exclude.into_iter().collect(),
                max_complexity,
                min_num_vars: min_vars,
                max_num_vars: max_vars,
                pareto_only,
            };
            let out = out.ok_or_else(|| CliError::Usage("filter requires --out".into()))?;
            cmd_filter(&archive, data.data.as_deref(), &criteria, out)
        }
        Command::Export { archive, model, format } => cmd_export(&archive, &model, &format, out),
        Command::Rec {
            archive,
            models,
            data,
            split,
        } => cmd_rec(&archive, &models, data.data.as_deref(), split.into(), out),
        Command::Merge { archives } => {
            let out = out.ok_or_else(|| CliError::Usage("merge requires --out".into()))?;
            cmd_merge(&archives, out)
        }
        Command::Genes {
            archive,
            data,
            ids,
            from_selection,
            format,
        } => {
            let ids = match from_selection {
                Some(p) => parse_selection(&read_text(&p)?)?,
                None => ids,
            };
            cmd_genes(&archive, data.data.as_deref(), &ids, &format, out)
        }
    }
}

fn emit(text: String, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(p) => {
            write_text(p, &text)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(text),
    }
}

pub fn cmd_run(config: &Path, seed: Option<u64>, threads: Option<usize>, out: Option<&Path>) -> CliResult<String> {
    let mut cfg = ProjectConfig::load(config)?;
    if let Some(s) = seed {
        cfg.engine.seed = s;
    }
    let data = load_csv(&cfg.dataset)?;
    let palette = cfg.palette.build(data.dataset.num_inputs())?;
    let threads = threads.unwrap_or_else(default_threads);
    let pop = run_with_threads(&cfg.engine, &data.dataset, &palette, threads)?;
    let archive = Archive::from_population(&pop, &cfg, &data);
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => config.parent().unwrap_or(Path::new(".")).join(&cfg.output.archive),
    };
    archive.save(&path)?;
    Ok(run_summary_text(&archive, &cfg.engine, &path))
}

fn run_summary_text(archive: &Archive, engine: &RunConfig, path: &Path) -> String {
    let mut s = String::new();
    for (k, h) in archive.histories.iter().enumerate() {
        let last = h.generations.last();
        let _ = writeln!(
            s,
            "run {} (seed {}): {} generations, best training RMSE {}",
            k + 1,
            h.seed,
            last.map_or(0, |g| g.generation),
            last.and_then(|g| g.best_rmse).map_or("n/a".into(), |v| format!("{v:.6}"))
        );
    }
    if let Ok(id) = archive.resolve("best") {
        let m = &archive.models[id - 1];
        let _ = write!(s, "best model {id}:");
        for (k, st) in &m.stats {
            let _ = write!(s, " R2[{k}]={:.6}", st.r2);
        }
        s.push('\n');
        if let Ok(fm) = archive.fitted(id) {
            let _ = writeln!(s, "  {}", to_infix(&simplify_model(&fm).canonical.expr));
        }
    }
    let _ = writeln!(
        s,
        "{} models from {} run(s) of up to {} generations written to {}",
        archive.models.len(),
        archive.histories.len(),
        engine.max_generations,
        path.display()
    );
    s
}

fn loaded(archive: &Archive, data: Option<&Path>) -> CliResult<LoadedData> {
    Ok(LoadedData {
        dataset: archive.load_dataset(data)?,
        sha256: archive.dataset.sha256.clone(),
    })
}

pub fn cmd_report(
    archive_path: &Path,
    data: Option<&Path>,
    split: SplitKind,
    by_r2: bool,
    ui_bundle: Option<&Path>,
    out: Option<&Path>,
) -> CliResult<String> {
    let archive = Archive::load(archive_path)?;
    let ds = archive.load_dataset(data)?;
    let pop = archive.population()?;
    let opts = PayloadOptions {
        split,
        bloat_threshold: archive.config.output.bloat_threshold,
        max_genes: archive.config.output.max_report_genes,
    };
    let payload = build_payload(&pop, &ds, &opts);
    let mut text = String::new();
    let _ = writeln!(text, "Pareto front on the {} split ({} models)", payload.split, payload.models.len());
    let _ = writeln!(text, "{:>6}  {:>8}  {:>10}  equation", "model", "R2", "complexity");
    let mut front: Vec<_> = payload.models.iter().filter(|m| m.pareto).collect();
    if by_r2 {
        front.sort_by(|a, b| {
            let ra = a.scores.get(&payload.split).map_or(f64::NAN, |s| s.r2);
            let rb = b.scores.get(&payload.split).map_or(f64::NAN, |s| s.r2);
            rb.total_cmp(&ra).then(a.id.cmp(&b.id))
        });
    } else {
        front.sort_by(|a, b| a.complexity.cmp(&b.complexity).then(a.id.cmp(&b.id)));
    }
    for m in front {
        let r2 = m.scores.get(&payload.split).map_or(f64::NAN, |s| s.r2);
        let _ = writeln!(text, "{:>6}  {:>8.4}  {:>10}  {}", m.id, r2, m.complexity, m.equation);
    }
    if let Some(p) = out {
        let bundle = ui_bundle.map(read_text).transpose()?;
        write_text(p, &render_report(&payload, bundle.as_deref()))?;
        let _ = writeln!(text, "wrote {}", p.display());
    }
    Ok(text)
}

pub fn cmd_filter(archive_path: &Path, data: Option<&Path>, c: &FilterCriteria, out: &Path) -> CliResult<String> {
    let archive = Archive::load(archive_path)?;
    let data = loaded(&archive, data)?;
    let pop = archive.population()?;
    let kept = apply_filter(&pop, c, &data.dataset);
    let filtered = Archive::from_population(&kept, &archive.config, &data);
    filtered.save(out)?;
    Ok(format!("{} of {} models kept; wrote {}\n", kept.len(), pop.len(), out.display()))
}

pub fn cmd_export(archive_path: &Path, selector: &str, format: &str, out: Option<&Path>) -> CliResult<String> {
    let format: ExportFormat = format.parse()?;
    let archive = Archive::load(archive_path)?;
    let id = archive.resolve(selector)?;
    let model = archive.fitted(id)?;
    let mut text = export(&model, &archive.palette, archive.complexity, format)?;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    emit(text, out)
}

pub fn cmd_rec(
    archive_path: &Path,
    selectors: &[String],
    data: Option<&Path>,
    split: SplitKind,
    out: Option<&Path>,
) -> CliResult<String> {
    let archive = Archive::load(archive_path)?;
    let ds = archive.load_dataset(data)?;
    let part = ds
        .split(split)
        .ok_or_else(|| CliError::Data(format!("the dataset has no {split} split")))?;
    let mut text = String::from("model,epsilon,proportion\n");
    for sel in selectors {
        let id = archive.resolve(sel)?;
        let m = archive.fitted(id)?;
        let pred = predict(&m.genes, &m.weights, &part.x)?;
        for (e, p) in rec_curve(&part.y, &pred).points {
            let _ = writeln!(text, "{id},{e:?},{p:?}");
        }
    }
    emit(text, out)
}

pub fn cmd_merge(paths: &[PathBuf], out: &Path) -> CliResult<String> {
    let parts = paths.iter().map(|p| Archive::load(p)).collect::<CliResult<Vec<_>>>()?;
    let merged = Archive::merge(parts)?;
    merged.save(out)?;
    Ok(format!(
        "merged {} archives: {} models from {} runs; wrote {}\n",
        paths.len(),
        merged.models.len(),
        merged.histories.len(),
        out.display()
    ))
}

/// Gene IDs from a selection file: one per line, `#` comments allowed.
pub fn parse_selection(text: &str) -> CliResult<Vec<usize>> {
    let mut ids = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            ids.push(tok.parse().map_err(|_| {
                CliError::Usage(format!("selection line {}: '{tok}' is not a gene ID", n + 1))
            })?);
        }
    }
    Ok(ids)
}

pub fn cmd_genes(
    archive_path: &Path,
    data: Option<&Path>,
    ids: &[usize],
    format: &str,
    out: Option<&Path>,
) -> CliResult<String> {
    let format: ExportFormat = format.parse()?;
    if ids.is_empty() {
        return Err(CliError::Usage("no gene IDs given".into()));
    }
    let unique: BTreeSet<_> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(CliError::Usage("gene IDs must not repeat".into()));
    }
    let archive = Archive::load(archive_path)?;
    let ds = archive.load_dataset(data)?;
    let pop = archive.population()?;
    let catalog = unique_genes(&pop, &probe_matrix(&ds.train));
    let model = model_from_genes(ids, &catalog, &ds, archive.complexity, Some(archive.config.engine.max_genes))?;
    let mut text = String::new();
    let _ = write!(text, "genes {ids:?}:");
    for (k, s) in &model.stats {
        let _ = write!(text, " R2[{k}]={:.6}", s.r2);
    }
    text.push('\n');
    let body = export(&model, &archive.palette, archive.complexity, format)?;
    match out {
        Some(p) => {
            write_text(p, &body)?;
            let _ = writeln!(text, "wrote {}", p.display());
        }
        None => {
            text.push_str(&body);
            if !body.ends_with('\n') {
                text.push('\n');
            }
        }
    }
    Ok(text)
}
