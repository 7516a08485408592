//! Reading models and automata from disk.

use std::fs;
use std::path::{Path, PathBuf};

use omegarl_core::automaton::{parse_hoa, Automaton, HoaError};
use omegarl_core::model::Model;
use omegarl_core::prism::{build_model, parse_prism, PrismError};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{}: {err}", path.display())]
    Io { path: PathBuf, err: std::io::Error },
    #[error("{}:{err}", path.display())]
    Prism { path: PathBuf, err: PrismError },
    #[error("{}:{err}", path.display())]
    Hoa { path: PathBuf, err: HoaError },
}

impl InputError {
    fn io(path: &Path, source: std::io::Error) -> InputError {
        InputError::Io { path: path.to_path_buf(), err: source }
    }
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::io(path, e))
}

pub fn read_model(path: &Path) -> Result<Model, InputError> {
    let src = read_text(path)?;
    parse_prism(&src).and_then(|p| build_model(&p)).map_err(|err| InputError::Prism { path: path.to_path_buf(), err })
}

pub fn read_automaton(path: &Path) -> Result<Automaton, InputError> {
    let src = read_text(path)?;
    parse_hoa(&src).map_err(|err| InputError::Hoa { path: path.to_path_buf(), err })
}
