//! Project configuration files (TOML).

use std::path::{Path, PathBuf};

use mgsr_core::evolve::RunConfig;
use mgsr_core::expr::{Function, Palette};
use serde::{Deserialize, Serialize};

use crate::error::{read_text, CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// CSV file, resolved against the config file's directory.
    pub path: PathBuf,
    /// Response column name; the last column when absent.
    pub response: Option<String>,
    /// Column holding per-row split labels, used when present in the file.
    pub split_column: String,
    /// Train/validation/test fractions for files without a split column.
    pub fractions: [f64; 3],
    pub split_seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            path: PathBuf::new(),
            response: None,
            split_column: "split".into(),
            fractions: [0.7, 0.15, 0.15],
            split_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PaletteConfig {
    pub functions: Vec<String>,
    pub erc: bool,
    pub erc_range: [f64; 2],
}

impl Default for PaletteConfig {
    fn default() -> Self {
        PaletteConfig {
            functions: Function::DEFAULT.iter().map(|f| f.name().to_string()).collect(),
            erc: true,
            erc_range: [-10.0, 10.0],
        }
    }
}

impl PaletteConfig {
    pub fn build(&self, num_inputs: usize) -> CliResult<Palette> {
        let functions = self
            .functions
            .iter()
            .map(|n| {
                Function::from_name(n).ok_or_else(|| CliError::Config(format!("palette: unknown function '{n}'")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let palette = Palette::new(functions, num_inputs)?.with_erc(self.erc, (self.erc_range[0], self.erc_range[1]))?;
        Ok(palette)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub archive: PathBuf,
    /// Genes losing less training R² than this on removal are marked as bloat.
    pub bloat_threshold: f64,
    /// Largest gene count in the report's cross-product block.
    pub max_report_genes: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            archive: PathBuf::from("mgsr-archive.json"),
            bloat_threshold: mgsr_core::analyze::DEFAULT_BLOAT_THRESHOLD,
            max_report_genes: 200,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub dataset: DatasetConfig,
    pub engine: RunConfig,
    pub palette: PaletteConfig,
    pub output: OutputConfig,
}

impl ProjectConfig {
    pub fn parse(text: &str, origin: &str) -> CliResult<ProjectConfig> {
        let cfg: ProjectConfig = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| {
                    let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                    format!(" line {line}:")
                })
                .unwrap_or_default();
            CliError::Config(format!("{origin}:{at} {}", e.message()))
        })?;
        cfg.engine.validate()?;
        let [a, b, c] = cfg.dataset.fractions;
        if [a, b, c].iter().any(|f| !(0.0..=1.0).contains(f)) || ((a + b + c) - 1.0).abs() > 1e-9 || a <= 0.0 {
            return Err(CliError::Config(format!(
                "{origin}: dataset.fractions must be non-negative, sum to 1 and give training rows"
            )));
        }
        if !(cfg.output.bloat_threshold >= 0.0) {
            return Err(CliError::Config(format!("{origin}: output.bloat_threshold must be non-negative")));
        }
        Ok(cfg)
    }

    /// Loads a config and resolves relative paths against its directory.
    pub fn load(path: &Path) -> CliResult<ProjectConfig> {
        let mut cfg = ProjectConfig::parse(&read_text(path)?, &path.display().to_string())?;
        if cfg.dataset.path.as_os_str().is_empty() {
            return Err(CliError::Config(format!("{}: dataset.path is required", path.display())));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.dataset.path.is_relative() {
            cfg.dataset.path = base.join(&cfg.dataset.path);
        }
        if let Ok(abs) = std::fs::canonicalize(&cfg.dataset.path) {
            cfg.dataset.path = abs;
        }
        Ok(cfg)
    }
}
