use serde::{Deserialize, Serialize};

use super::function::Function;
use crate::error::{Error, Result};

/// The building blocks available to tree generation and mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Palette {
    pub functions: Vec<Function>,
    pub num_inputs: usize,
    pub erc_enabled: bool,
    pub erc_range: (f64, f64),
}

impl Palette {
    pub fn new(functions: Vec<Function>, num_inputs: usize) -> Result<Palette> {
        let p = Palette {
            functions,
            num_inputs,
            erc_enabled: true,
            erc_range: (-10.0, 10.0),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn default_for(num_inputs: usize) -> Palette {
        Palette {
            functions: Function::DEFAULT.to_vec(),
            num_inputs,
            erc_enabled: true,
            erc_range: (-10.0, 10.0),
        }
    }

    pub fn with_erc(mut self, enabled: bool, range: (f64, f64)) -> Result<Palette> {
        self.erc_enabled = enabled;
        self.erc_range = range;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.functions.is_empty() {
            return Err(Error::Config("function palette is empty".into()));
        }
        let mut names: Vec<_> = self.functions.iter().map(|f| f.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("function palette lists a function twice".into()));
        }
        if self.num_inputs == 0 {
            return Err(Error::Config("at least one input variable is required".into()));
        }
        let (lo, hi) = self.erc_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid ERC range [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn erc_width(&self) -> f64 {
        self.erc_range.1 - self.erc_range.0
    }

    /// Number of distinct terminal kinds: each input variable plus one for ERCs.
    pub fn terminal_count(&self) -> usize {
        self.num_inputs + usize::from(self.erc_enabled)
    }

    pub fn functions_with_arity(&self, arity: usize) -> impl Iterator<Item = Function> + '_ {
        self.functions.iter().copied().filter(move |f| f.arity() == arity)
    }
}
