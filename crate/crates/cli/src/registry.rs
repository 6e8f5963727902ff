//! Frameworks available to the CLI and the service, keyed by id.

use std::path::Path;
use std::sync::Arc;

use ers_core::framework::FrameworkError;
use ers_core::{builtin_ers_v1, Engine, FrameworkDefinition, ScoringMode};

/// Environment variable naming a directory of extra framework files.
pub const FRAMEWORK_PATH_ENV: &str = "ERS_FRAMEWORK_PATH";

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot scan {path}: {source}")]
    Scan {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Framework {
        path: String,
        #[source]
        source: FrameworkError,
    },
    #[error("framework id {0:?} is defined more than once")]
    Duplicate(String),
}

#[derive(Debug, Clone)]
pub struct Registry {
    engines: Vec<Arc<Engine>>,
}

impl Registry {
    /// Just the built-in ERS v1.
    pub fn builtin() -> Self {
        let engine = Engine::new(builtin_ers_v1(ScoringMode::Literal)).expect("built-in framework is sound");
        Registry {
            engines: vec![Arc::new(engine)],
        }
    }

    /// The built-in framework plus every `*.json` file in `dir`.
    pub fn with_directory(dir: &Path) -> Result<Self, RegistryError> {
        let mut registry = Registry::builtin();
        let entries = std::fs::read_dir(dir).map_err(|source| RegistryError::Scan {
            path: dir.display().to_string(),
            source,
        })?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        for path in paths {
            registry.insert(load_engine(&path)?)?;
        }
        Ok(registry)
    }

    /// Honors [`FRAMEWORK_PATH_ENV`] when set.
    pub fn from_env() -> Result<Self, RegistryError> {
        match std::env::var_os(FRAMEWORK_PATH_ENV) {
            Some(dir) if !dir.is_empty() => Registry::with_directory(Path::new(&dir)),
            _ => Ok(Registry::builtin()),
        }
    }

    pub fn insert(&mut self, engine: Engine) -> Result<(), RegistryError> {
        if self.get(&engine.framework().id).is_some() {
            return Err(RegistryError::Duplicate(engine.framework().id.clone()));
        }
        self.engines.push(Arc::new(engine));
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<Arc<Engine>> {
        self.engines.iter().find(|e| e.framework().id == id).cloned()
    }

    pub fn frameworks(&self) -> impl Iterator<Item = &FrameworkDefinition> {
        self.engines.iter().map(|e| e.framework())
    }
}

pub fn load_engine(path: &Path) -> Result<Engine, RegistryError> {
    let wrap = |source| RegistryError::Framework {
        path: path.display().to_string(),
        source,
    };
    FrameworkDefinition::load(path).and_then(Engine::new).map_err(wrap)
}
