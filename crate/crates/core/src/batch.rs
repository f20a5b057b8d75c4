//! Many-program analysis. Programs are independent, so with the `parallel`
//! feature (on by default) they are spread over the rayon thread pool;
//! without it [`analyze_batch`] is the sequential loop.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::frontend::SourceProgram;
use crate::pipeline::{analyze, Analysis, AnalysisError, AnalysisOptions};

pub type BatchResult = Result<Analysis, AnalysisError>;

/// Results come back in input order.
pub fn analyze_batch(sources: &[SourceProgram], options: &AnalysisOptions) -> Vec<BatchResult> {
    #[cfg(feature = "parallel")]
    {
        sources.par_iter().map(|s| analyze(s, options)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        analyze_batch_sequential(sources, options)
    }
}

pub fn analyze_batch_sequential(sources: &[SourceProgram], options: &AnalysisOptions) -> Vec<BatchResult> {
    sources.iter().map(|s| analyze(s, options)).collect()
}

/// Applies `f` to every item, in parallel when the feature is enabled.
pub fn map_all<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_program, SynthConfig};

    #[test]
    fn parallel_and_sequential_agree() {
        let sources: Vec<SourceProgram> = (0..32)
            .map(|seed| generate_program(seed, &SynthConfig::default()))
            .collect();
        let opts = AnalysisOptions::default();
        let par = analyze_batch(&sources, &opts);
        let seq = analyze_batch_sequential(&sources, &opts);
        assert_eq!(par.len(), seq.len());
        for (a, b) in par.iter().zip(&seq) {
            let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
            assert_eq!(a.cfg, b.cfg);
            assert_eq!(a.defuse, b.defuse);
            assert_eq!(a.anomalies, b.anomalies);
        }
    }
}
