//! Settings merged from flags, `ALMKIT_*` variables, `almkit.toml` and defaults.
//!
//! Clap resolves flags over environment variables; anything still unset is
//! taken from the config file, then from the built-in defaults.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use almkit_core::lexmap::Lexicon;
use almkit_core::reason::{ActivityScript, ReasonConfig};
use almkit_core::restkb::Theory;
use almkit_core::sema::LintConfig;
use almkit_core::solve::{detect_solver, SolverConfig};
use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

pub const DEFAULT_CONFIG: &str = "almkit.toml";

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Solver command line; `{input}` is replaced by the program file.
    #[arg(long = "solver", global = true, env = "ALMKIT_SOLVER_CMD", value_name = "CMD")]
    pub solver_command: Option<String>,
    /// Seconds before an external solver call is abandoned.
    #[arg(long = "timeout", global = true, env = "ALMKIT_SOLVER_TIMEOUT_S", value_name = "SECS")]
    pub timeout_s: Option<u64>,
    /// Stop after this many models (0 for all).
    #[arg(long = "model-cap", global = true, env = "ALMKIT_SOLVER_MODEL_CAP", value_name = "N")]
    pub model_cap: Option<usize>,
    /// Spare time steps beyond one per story action.
    #[arg(long, global = true, env = "ALMKIT_SLACK", value_name = "N")]
    pub slack: Option<u32>,
    /// Largest set of interferences considered by diagnosis.
    #[arg(long = "max-explanation", global = true, env = "ALMKIT_MAX_EXPLANATION", value_name = "N")]
    pub max_explanation: Option<usize>,
    /// Deepest allowed class hierarchy before a lint warning.
    #[arg(long = "max-depth", global = true, env = "ALMKIT_LINT_MAX_DEPTH", value_name = "N")]
    pub max_depth: Option<usize>,
    /// Most body conditions per axiom before a lint warning.
    #[arg(long = "max-body", global = true, env = "ALMKIT_LINT_MAX_BODY", value_name = "N")]
    pub max_body_conditions: Option<usize>,
    /// Directory of `.alm` modules used instead of the bundled library.
    #[arg(long, global = true, env = "ALMKIT_LIBRARY", value_name = "DIR")]
    pub library: Option<PathBuf>,
    /// Directory holding the lexical mapping tables.
    #[arg(long, global = true, env = "ALMKIT_LEXMAP", value_name = "DIR")]
    pub lexmap: Option<PathBuf>,
    /// Sense-override table replacing the one in the lexical mapping.
    #[arg(long = "sense-overrides", global = true, env = "ALMKIT_SENSE_OVERRIDES", value_name = "TSV")]
    pub sense_overrides: Option<PathBuf>,
    /// Activity script (TOML) used for story completion.
    #[arg(long, global = true, env = "ALMKIT_SCRIPT", value_name = "TOML")]
    pub script: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub solver: SolverSection,
    pub reason: ReasonSection,
    pub lint: LintSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub command: Option<String>,
    pub timeout_s: Option<u64>,
    pub model_cap: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReasonSection {
    pub slack: Option<u32>,
    pub max_explanation: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LintSection {
    pub max_depth: Option<usize>,
    pub max_body_conditions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub library: Option<PathBuf>,
    pub lexmap: Option<PathBuf>,
    pub sense_overrides: Option<PathBuf>,
    pub script: Option<PathBuf>,
}

impl FileConfig {
    /// Reads `path`, or `almkit.toml` in the working directory if it exists.
    /// Relative paths inside the file are taken relative to the file.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let path = match path {
            Some(p) => p.to_path_buf(),
            None => {
                let p = PathBuf::from(DEFAULT_CONFIG);
                if !p.is_file() {
                    return Ok(FileConfig::default());
                }
                p
            }
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let p = &mut cfg.paths;
        for slot in [&mut p.library, &mut p.lexmap, &mut p.sense_overrides, &mut p.script] {
            if let Some(v) = slot.as_mut() {
                if v.is_relative() {
                    *v = base.join(&*v);
                }
            }
        }
        Ok(cfg)
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub solver_command: Option<String>,
    pub timeout_s: u64,
    pub model_cap: usize,
    pub slack: u32,
    pub max_explanation: usize,
    pub lint: LintConfig,
    pub library: Option<PathBuf>,
    pub lexmap: Option<PathBuf>,
    pub sense_overrides: Option<PathBuf>,
    pub script: Option<PathBuf>,
}

impl Settings {
    pub fn merge(flags: &Overrides, file: &FileConfig) -> Settings {
        let reason = ReasonConfig::default();
        let solver = SolverConfig::default();
        let lint = LintConfig::default();
        Settings {
            solver_command: flags.solver_command.clone().or_else(|| file.solver.command.clone()),
            timeout_s: flags.timeout_s.or(file.solver.timeout_s).unwrap_or(solver.timeout.as_secs()),
            model_cap: flags.model_cap.or(file.solver.model_cap).unwrap_or(solver.model_cap),
            slack: flags.slack.or(file.reason.slack).unwrap_or(reason.slack),
            max_explanation: flags.max_explanation.or(file.reason.max_explanation).unwrap_or(reason.max_explanation),
            lint: LintConfig {
                max_depth: flags.max_depth.or(file.lint.max_depth).unwrap_or(lint.max_depth),
                max_body_conditions: flags
                    .max_body_conditions
                    .or(file.lint.max_body_conditions)
                    .unwrap_or(lint.max_body_conditions),
            },
            library: flags.library.clone().or_else(|| file.paths.library.clone()),
            lexmap: flags.lexmap.clone().or_else(|| file.paths.lexmap.clone()),
            sense_overrides: flags.sense_overrides.clone().or_else(|| file.paths.sense_overrides.clone()),
            script: flags.script.clone().or_else(|| file.paths.script.clone()),
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            command: self.solver_command.clone().or_else(detect_solver),
            timeout: Duration::from_secs(self.timeout_s),
            model_cap: self.model_cap,
        }
    }

    pub fn theory(&self) -> Result<Theory> {
        let t = match &self.library {
            Some(dir) => Theory::from_dir(dir)?,
            None => Theory::bundled(),
        };
        Ok(t.with_lints(self.lint))
    }

    pub fn reason(&self) -> Result<ReasonConfig> {
        Ok(ReasonConfig {
            theory: Arc::new(self.theory()?),
            solver: self.solver(),
            slack: self.slack,
            horizon: None,
            max_explanation: self.max_explanation,
        })
    }

    pub fn lexicon(&self) -> Result<Lexicon> {
        let lex = match &self.lexmap {
            Some(dir) => Lexicon::load_dir(dir)?,
            None => Lexicon::builtin()?,
        };
        Ok(match &self.sense_overrides {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                lex.with_overrides(&text)?
            }
            None => lex,
        })
    }

    pub fn script(&self) -> Result<ActivityScript> {
        Ok(match &self.script {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                ActivityScript::from_toml(&text)?
            }
            None => ActivityScript::restaurant(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beats_defaults() {
        let file: FileConfig = toml::from_str(
            "[solver]\ntimeout_s = 9\nmodel_cap = 5\n[reason]\nslack = 7\n[lint]\nmax_depth = 4\n",
        )
        .unwrap();
        let flags = Overrides { slack: Some(2), ..Overrides::default() };
        let s = Settings::merge(&flags, &file);
        assert_eq!(s.slack, 2);
        assert_eq!(s.timeout_s, 9);
        assert_eq!(s.model_cap, 5);
        assert_eq!(s.lint.max_depth, 4);
        assert_eq!(s.max_explanation, ReasonConfig::default().max_explanation);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[solver]\ncmd = \"x\"\n").is_err());
    }
}
