//! Two-resolution convergence verdicts.

use std::fmt;

/// Minimum observed order for a second-order claim.
pub const MIN_ORDER: f64 = 1.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Both residuals sit at the rounding floor; the identity holds exactly
    /// on the lattice.
    Exact,
    /// Observed order `log2(coarse/fine)`.
    Order(f64),
    Skipped,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        match *self {
            Verdict::Exact => true,
            Verdict::Order(p) => p >= MIN_ORDER,
            Verdict::Skipped => false,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Exact => write!(f, "exact"),
            Verdict::Order(p) => write!(f, "order {p:.3}"),
            Verdict::Skipped => write!(f, "skipped"),
        }
    }
}

/// Order of a residual that shrinks from `coarse` to `fine` under halving.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// `floor` is an absolute rounding threshold, typically a small multiple of
/// machine epsilon times the magnitude of the terms being compared.
pub fn verdict(coarse: f64, fine: f64, floor: f64) -> Verdict {
    if coarse <= floor && fine <= floor {
        Verdict::Exact
    } else {
        Verdict::Order(observed_order(coarse, fine))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        assert_eq!(verdict(1e-15, 2e-15, 1e-12), Verdict::Exact);
        assert!(verdict(4e-3, 1e-3, 1e-12).passed());
        assert!(!verdict(2e-3, 1e-3, 1e-12).passed());
        assert!(!Verdict::Skipped.passed());
        assert!((observed_order(8.0, 1.0) - 3.0).abs() < 1e-15);
    }
}
