//! Published exchange-rate scores used as comparison targets.

use crpsum::forecasters::DummyKind;
use crpsum::ScoreReport;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PublishedScores {
    pub crps_sum: f64,
    pub crps: f64,
    pub es: f64,
}

pub const GP_COPULA: PublishedScores = PublishedScores {
    crps_sum: 0.0070,
    crps: 0.0092,
    es: 0.0043,
};

pub const DUMMY_UNIVARIATE: PublishedScores = PublishedScores {
    crps_sum: 0.0049,
    crps: 0.4425,
    es: 0.2037,
};

pub const DUMMY_MULTIVARIATE: PublishedScores = PublishedScores {
    crps_sum: 0.0048,
    crps: 0.0077,
    es: 0.0032,
};

pub fn published(kind: DummyKind) -> PublishedScores {
    match kind {
        DummyKind::Univariate => DUMMY_UNIVARIATE,
        DummyKind::Multivariate => DUMMY_MULTIVARIATE,
    }
}

/// Signed relative deviation `(measured - published) / published`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Deviation {
    pub crps_sum: f64,
    pub crps: f64,
    pub es: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison<'a> {
    pub scores: &'a ScoreReport,
    pub published: PublishedScores,
    pub gp_copula: PublishedScores,
    pub relative_deviation: Deviation,
}

pub fn compare(kind: DummyKind, scores: &ScoreReport) -> Comparison<'_> {
    let p = published(kind);
    let rel = |got: f64, want: f64| (got - want) / want;
    Comparison {
        scores,
        published: p,
        gp_copula: GP_COPULA,
        relative_deviation: Deviation {
            crps_sum: rel(scores.crps_sum(), p.crps_sum),
            crps: rel(scores.crps_aggregate(), p.crps),
            es: rel(scores.energy_score(), p.es),
        },
    }
}
