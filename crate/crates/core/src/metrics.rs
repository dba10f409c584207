//! Lifetime and throughput metrics folded from round reports.

use std::fmt;

use crate::engine::RoundReport;
use crate::error::{Result, SimError};
use crate::network::ClassCounts;

/// A round index, or the marker for a milestone the run never hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Milestone {
    Reached(u64),
    NotReached,
}

impl Milestone {
    pub fn round(self) -> Option<u64> {
        match self {
            Milestone::Reached(r) => Some(r),
            Milestone::NotReached => None,
        }
    }

    pub fn is_reached(self) -> bool {
        matches!(self, Milestone::Reached(_))
    }
}

impl fmt::Display for Milestone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Milestone::Reached(r) => write!(f, "{r}"),
            Milestone::NotReached => f.write_str("NA"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LifetimeSummary {
    pub n_nodes: usize,
    /// First node dies.
    pub fnd: Option<u64>,
    /// Fewer than half the nodes alive.
    pub hna: Option<u64>,
    /// Last node dies.
    pub lnd: Option<u64>,
    pub alive_series: Vec<usize>,
    pub alive_by_class_series: Vec<ClassCounts>,
    pub ch_series: Vec<usize>,
    pub energy_series: Vec<f64>,
    pub bs_cumulative: Vec<u64>,
    pub spent_cumulative: Vec<f64>,
}

impl LifetimeSummary {
    pub fn fnd(&self) -> Milestone {
        self.fnd.map_or(Milestone::NotReached, Milestone::Reached)
    }

    pub fn hna(&self) -> Milestone {
        self.hna.map_or(Milestone::NotReached, Milestone::Reached)
    }

    pub fn lnd(&self) -> Milestone {
        self.lnd.map_or(Milestone::NotReached, Milestone::Reached)
    }

    pub fn rounds(&self) -> usize {
        self.alive_series.len()
    }
}

/// Folds a round-ordered report stream (starting at round 0) into a summary.
///
/// HNA is the first round with strictly fewer than `ceil(N/2)` nodes alive.
pub fn fold<'a, I>(reports: I, n_nodes: usize) -> Result<LifetimeSummary>
where
    I: IntoIterator<Item = &'a RoundReport>,
{
    let mut s = LifetimeSummary {
        n_nodes,
        ..Default::default()
    };
    let mut bs = 0u64;
    let mut spent = 0.0;
    for (expected, report) in reports.into_iter().enumerate() {
        let expected = expected as u64;
        if report.round_index != expected {
            return Err(SimError::ReportOrder {
                expected,
                found: report.round_index,
            });
        }
        let round = report.round_index;
        let alive = report.alive_total();
        if s.fnd.is_none() && !report.deaths_this_round.is_empty() {
            s.fnd = Some(round);
        }
        if s.hna.is_none() && 2 * alive < n_nodes {
            s.hna = Some(round);
        }
        if s.lnd.is_none() && alive == 0 {
            s.lnd = Some(round);
        }
        bs += report.bs_messages_this_round();
        spent += report.energy_spent;
        s.alive_series.push(alive);
        s.alive_by_class_series.push(report.alive_by_class);
        s.ch_series.push(report.ch_count());
        s.energy_series.push(report.energy_remaining_total);
        s.bs_cumulative.push(bs);
        s.spent_cumulative.push(spent);
    }
    Ok(s)
}

/// `(cumulative joules spent, cumulative BS messages)` per round.
pub fn messages_vs_energy(summary: &LifetimeSummary) -> Vec<(f64, u64)> {
    summary
        .spent_cumulative
        .iter()
        .copied()
        .zip(summary.bs_cumulative.iter().copied())
        .collect()
}
