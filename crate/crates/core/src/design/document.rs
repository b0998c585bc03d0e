//! TOML exchange format for designs. Complex numbers are `[re, im]` pairs;
//! floats are written in shortest round-trip form, so reading a written
//! document reproduces every coefficient bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fir::FirDesign;
use super::response::DesiredResponse;
use super::ArmaDesign;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirDocument {
    pub response: DesiredResponse,
    pub grid_size: usize,
    pub fir: FirDesign,
    pub l2_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "filter", rename_all = "snake_case")]
pub enum DesignDocument {
    Arma(Box<ArmaDesign>),
    Fir(FirDocument),
}

impl DesignDocument {
    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }

    pub fn arma(&self) -> Option<&ArmaDesign> {
        match self {
            Self::Arma(d) => Some(d),
            Self::Fir(_) => None,
        }
    }

    pub fn fir(&self) -> Option<&FirDesign> {
        match self {
            Self::Fir(d) => Some(&d.fir),
            Self::Arma(_) => None,
        }
    }
}
