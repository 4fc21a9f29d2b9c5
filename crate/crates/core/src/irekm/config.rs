use crate::error::{Error, Result};

/// Weighting of the ν-acceptance inequality
/// ν‖(C^{ww} + νC)^{-1} r‖ ≥ ξ‖·r‖.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NuRule {
    /// ν|C^{1/2}(C^{ww}+νC)^{-1} r| ≥ ξ|C^{-1/2} r|; invariant under a
    /// common rescaling of data, predictions and σ.
    #[default]
    Weighted,
    /// ν|C^{-1/2}(C^{ww}+νC)^{-1} r| ≥ ξ|C^{-1} r|, the norms read verbatim.
    Literal,
}

impl NuRule {
    pub fn name(&self) -> &'static str {
        match self {
            NuRule::Weighted => "weighted",
            NuRule::Literal => "literal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(NuRule::Weighted),
            "literal" => Ok(NuRule::Literal),
            _ => Err(Error::param(format!("unknown ν rule '{s}' (expected weighted or literal)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrekmConfig {
    pub xi: f64,
    pub tau: f64,
    pub nu0: f64,
    pub ensemble_size: usize,
    pub max_iterations: usize,
    /// Maximum number of ν doublings per analysis step.
    pub nu_doublings: usize,
    pub nu_rule: NuRule,
    /// Start each ν search from the previous ν instead of ν₀.
    pub warm_start: bool,
    pub seed: u64,
}

impl IrekmConfig {
    /// τ just above 1/ξ.
    pub fn default_tau(xi: f64) -> f64 {
        1.01 / xi * (1.0 + 1e-6)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::param(format!("ξ must lie in (0, 1), got {}", self.xi)));
        }
        if !(self.tau * self.xi > 1.0) || !self.tau.is_finite() {
            return Err(Error::param(format!("τ must exceed 1/ξ = {}, got {}", 1.0 / self.xi, self.tau)));
        }
        if !(self.nu0 > 0.0 && self.nu0.is_finite()) {
            return Err(Error::param(format!("ν₀ must be positive, got {}", self.nu0)));
        }
        if self.ensemble_size < 2 {
            return Err(Error::param(format!("ensemble size must be at least 2, got {}", self.ensemble_size)));
        }
        Ok(())
    }
}

impl Default for IrekmConfig {
    fn default() -> Self {
        let xi = 0.8;
        Self {
            xi,
            tau: Self::default_tau(xi),
            nu0: 0.01,
            ensemble_size: 200,
            max_iterations: 50,
            nu_doublings: 200,
            nu_rule: NuRule::Weighted,
            warm_start: false,
            seed: 0,
        }
    }
}
