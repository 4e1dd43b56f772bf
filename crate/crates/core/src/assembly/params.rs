use crate::error::{Error, Result};

/// Model and discretization parameters.
///
/// `inv_lambda = 0` encodes `λ = +∞` (generalized Stokes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub k: usize,
    pub mu: f64,
    pub tau: f64,
    pub inv_lambda: f64,
    pub alpha: f64,
}

pub const DEFAULT_ALPHA: f64 = 4.0;

impl ProblemParams {
    pub fn new(k: usize, mu: f64, tau: f64, inv_lambda: f64) -> Result<Self> {
        Self { k, mu, tau, inv_lambda, alpha: DEFAULT_ALPHA }.validated()
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if self.k == 0 {
            return bad("k must be at least 1");
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return bad("mu must be positive and finite");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be non-negative and finite");
        }
        if !(self.inv_lambda >= 0.0 && self.inv_lambda.is_finite()) {
            return bad("inv_lambda must be non-negative and finite");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive and finite");
        }
        Ok(self)
    }

    /// `λ = +∞`
    pub fn is_incompressible(&self) -> bool {
        self.inv_lambda == 0.0
    }
}
