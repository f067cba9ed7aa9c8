use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classify::registry::ClassifierSettings;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatformConfig {
    pub bind: String,
    pub port: u16,
    /// SQLite file; `:memory:` for a throwaway store.
    pub store_path: PathBuf,
    /// Every `*.json` lexicon file here becomes a selectable article.
    pub lexicon_dir: PathBuf,
    pub embeddings: Option<PathBuf>,
    /// HMAC key for bearer tokens and export pseudonyms.
    pub token_secret: String,
    pub token_ttl_secs: u64,
    pub workers: usize,
    /// How long a draft upload waits for its feedback before answering
    /// `202 processing`.
    pub submit_wait_ms: u64,
    pub classifiers: ClassifierSettings,
    pub bootstrap_admin: Option<BootstrapAdmin>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapAdmin {
    pub username: String,
    pub password: String,
    #[serde(default = "default_admin_name")]
    pub display_name: String,
}

fn default_admin_name() -> String {
    "Administrator".into()
}

impl Default for PlatformConfig {
    fn default() -> Self {
        Self {
            bind: "127.0.0.1".into(),
            port: 8080,
            store_path: "draftwise.sqlite3".into(),
            lexicon_dir: "lexicons".into(),
            embeddings: None,
            token_secret: String::new(),
            token_ttl_secs: 8 * 60 * 60,
            workers: 4,
            submit_wait_ms: 5_000,
            classifiers: ClassifierSettings::default(),
            bootstrap_admin: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("token_secret must be at least 16 bytes")]
    WeakSecret,
    #[error("workers must be at least 1")]
    NoWorkers,
}

impl PlatformConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg: Self = toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_relative(base);
        Ok(cfg)
    }

    /// Relative paths in a config file are taken from the file's directory.
    pub fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() && p.as_os_str() != ":memory:" {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.store_path);
        fix(&mut self.lexicon_dir);
        if let Some(e) = self.embeddings.as_mut() {
            fix(e);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.token_secret.len() < 16 {
            return Err(ConfigError::WeakSecret);
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        Ok(())
    }
}
