//! Batch analysis over independent inputs.
//!
//! With the `parallel` feature (default) [`analyze_batch`] fans out over a
//! rayon pool; otherwise it is the sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::artin_schreier::{analyze, AnalysisConfig, ExtensionReport};
use crate::element::TwoDimElement;
use crate::error::Result;

pub fn analyze_batch_sequential(inputs: &[TwoDimElement], cfg: &AnalysisConfig) -> Vec<Result<ExtensionReport>> {
    inputs.iter().map(|a| analyze(a, cfg)).collect()
}

#[cfg(feature = "parallel")]
pub fn analyze_batch_parallel(inputs: &[TwoDimElement], cfg: &AnalysisConfig) -> Vec<Result<ExtensionReport>> {
    inputs.par_iter().map(|a| analyze(a, cfg)).collect()
}

/// Results in input order.
pub fn analyze_batch(inputs: &[TwoDimElement], cfg: &AnalysisConfig) -> Vec<Result<ExtensionReport>> {
    #[cfg(feature = "parallel")]
    {
        analyze_batch_parallel(inputs, cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        analyze_batch_sequential(inputs, cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::parse::parse_element;
    use std::sync::Arc;

    #[test]
    fn batch_matches_single_calls() {
        let f = Arc::new(PrimeField::new(3, 1).unwrap());
        let inputs: Vec<_> = ["pi^-1", "pi^-3*t", "t", "pi^-2*t^3 + pi^-1*t"]
            .iter()
            .map(|s| parse_element(s, f.clone()).unwrap())
            .collect();
        let cfg = AnalysisConfig::default();
        let batch = analyze_batch(&inputs, &cfg);
        assert_eq!(batch, analyze_batch_sequential(&inputs, &cfg));
        for (a, r) in inputs.iter().zip(&batch) {
            assert_eq!(r, &analyze(a, &cfg));
        }
    }
}
