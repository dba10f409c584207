//! One simulation round: election, cluster formation and data delivery with
//! energy bookkeeping.
//!
//! Control traffic (advertisements, join requests, TDMA schedules) is free.
//! Each alive node produces one data frame per round.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::network::{distance, ClassCounts, HeterogeneityParams, Node, NodeClass, Position};
use crate::protocol::{self, ElectionContext, ProtocolKind, ResetTrigger};
use crate::radio::{aggregation_cost, rx_cost, tx_cost, RadioParams};
use crate::rng::SimRng;

/// Everything a round needs besides node state and the random stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSetup {
    pub protocol: ProtocolKind,
    pub p_opt: f64,
    pub het: HeterogeneityParams,
    pub reset_trigger: ResetTrigger,
    pub radio: RadioParams,
    pub bs_pos: Position,
}

impl RoundSetup {
    fn election_context(&self, round: u64) -> ElectionContext {
        ElectionContext {
            round,
            p_opt: self.p_opt,
            het: self.het,
            reset_trigger: self.reset_trigger,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Cluster head id to member ids, members in ascending id order.
    pub clusters: BTreeMap<usize, Vec<usize>>,
    /// Alive nodes sending straight to the base station (no heads this round).
    pub direct_to_bs: Vec<usize>,
}

impl ClusterAssignment {
    pub fn head_of(&self, member: usize) -> Option<usize> {
        self.clusters
            .iter()
            .find(|(_, members)| members.binary_search(&member).is_ok())
            .map(|(&ch, _)| ch)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round_index: u64,
    pub ch_ids: Vec<usize>,
    pub alive_by_class: ClassCounts,
    /// Energy drawn by all transmissions this round, before clamping.
    pub energy_spent: f64,
    /// Overdraft forgiven when negative residuals were clamped to zero.
    pub energy_clamped: f64,
    pub energy_remaining_total: f64,
    pub bs_messages_ch: u64,
    pub bs_messages_direct: u64,
    pub deaths_this_round: Vec<usize>,
}

impl RoundReport {
    pub fn ch_count(&self) -> usize {
        self.ch_ids.len()
    }

    pub fn alive_total(&self) -> usize {
        self.alive_by_class.total()
    }

    pub fn bs_messages_this_round(&self) -> u64 {
        self.bs_messages_ch + self.bs_messages_direct
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SteadyStateOutcome {
    pub energy_spent: f64,
    pub bs_messages_ch: u64,
    pub bs_messages_direct: u64,
}

/// Assigns every alive non-head node to its nearest head.
///
/// Nearest distance stands in for strongest received advertisement. Exact
/// ties are broken with one draw from `rng`; no draw happens otherwise.
pub fn form_clusters<R: Rng + ?Sized>(
    nodes: &[Node],
    ch_set: &[usize],
    rng: &mut R,
) -> ClusterAssignment {
    let mut assignment = ClusterAssignment::default();
    if ch_set.is_empty() {
        assignment.direct_to_bs = nodes.iter().filter(|n| n.alive).map(|n| n.id).collect();
        return assignment;
    }
    let mut heads: Vec<usize> = ch_set.to_vec();
    heads.sort_unstable();
    for &h in &heads {
        assignment.clusters.insert(h, Vec::new());
    }
    let mut nearest = Vec::with_capacity(heads.len());
    for node in nodes.iter().filter(|n| n.alive) {
        if assignment.clusters.contains_key(&node.id) {
            continue;
        }
        nearest.clear();
        let mut best = f64::INFINITY;
        for &h in &heads {
            let d = distance(node.pos, nodes[h].pos);
            if d < best {
                best = d;
                nearest.clear();
                nearest.push(h);
            } else if d == best {
                nearest.push(h);
            }
        }
        let chosen = if nearest.len() == 1 {
            nearest[0]
        } else {
            nearest[rng.random_range(0..nearest.len())]
        };
        assignment
            .clusters
            .get_mut(&chosen)
            .expect("head registered")
            .push(node.id);
    }
    assignment
}

/// Deducts the energy of one steady-state phase. Residuals may go negative.
pub fn run_steady_state(
    nodes: &mut [Node],
    assignment: &ClusterAssignment,
    radio: &RadioParams,
    bs_pos: Position,
) -> SteadyStateOutcome {
    let bits = radio.msg_bits;
    let mut out = SteadyStateOutcome::default();
    let charge = |node: &mut Node, cost: f64| {
        node.e_residual -= cost;
        cost
    };
    for (&ch, members) in &assignment.clusters {
        let head_pos = nodes[ch].pos;
        for &m in members {
            let cost = tx_cost(radio, bits, distance(nodes[m].pos, head_pos));
            out.energy_spent += charge(&mut nodes[m], cost);
        }
        let cost = rx_cost(radio, bits) * members.len() as f64
            + aggregation_cost(radio, bits, members.len() + 1)
            + tx_cost(radio, bits, distance(head_pos, bs_pos));
        out.energy_spent += charge(&mut nodes[ch], cost);
        out.bs_messages_ch += 1;
    }
    for &id in &assignment.direct_to_bs {
        let cost = tx_cost(radio, bits, distance(nodes[id].pos, bs_pos));
        out.energy_spent += charge(&mut nodes[id], cost);
        out.bs_messages_direct += 1;
    }
    out
}

/// Marks nodes with no energy left as dead and returns the newly dead ids.
fn refresh_alive(nodes: &mut [Node]) -> Vec<usize> {
    let mut deaths = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.alive) {
        if node.e_residual <= 0.0 {
            node.alive = false;
            node.eligible = false;
            deaths.push(node.id);
        }
    }
    deaths
}

fn alive_by_class(nodes: &[Node]) -> ClassCounts {
    let mut counts = [0usize; 3];
    for n in nodes.iter().filter(|n| n.alive) {
        counts[n.class.index()] += 1;
    }
    ClassCounts {
        normal: counts[NodeClass::Normal.index()],
        advanced: counts[NodeClass::Advanced.index()],
        super_: counts[NodeClass::Super.index()],
    }
}

fn finish_round(
    nodes: &mut [Node],
    round: u64,
    heads: Vec<usize>,
    deaths: Vec<usize>,
    setup: &RoundSetup,
    rng: &mut SimRng,
) -> (RoundReport, ClusterAssignment) {
    let alive = alive_by_class(nodes);
    let assignment = form_clusters(nodes, &heads, rng);
    let steady = run_steady_state(nodes, &assignment, &setup.radio, setup.bs_pos);
    let mut clamped = 0.0;
    for node in nodes.iter_mut() {
        if node.e_residual < 0.0 {
            clamped -= node.e_residual;
            node.e_residual = 0.0;
        }
    }
    let report = RoundReport {
        round_index: round,
        ch_ids: heads,
        alive_by_class: alive,
        energy_spent: steady.energy_spent,
        energy_clamped: clamped,
        energy_remaining_total: nodes.iter().map(|n| n.e_residual).sum(),
        bs_messages_ch: steady.bs_messages_ch,
        bs_messages_direct: steady.bs_messages_direct,
        deaths_this_round: deaths,
    };
    (report, assignment)
}

/// Runs one full round: death check, election, clustering, steady state and
/// clamping of overdrawn residuals.
pub fn run_round(
    nodes: &mut [Node],
    round: u64,
    setup: &RoundSetup,
    rng: &mut SimRng,
) -> Result<(RoundReport, ClusterAssignment)> {
    let deaths = refresh_alive(nodes);
    let ctx = setup.election_context(round);
    let heads = protocol::elect(setup.protocol, nodes, &ctx, rng)?;
    Ok(finish_round(nodes, round, heads, deaths, setup, rng))
}

/// Like [`run_round`] but with a caller-chosen head set instead of an
/// election. Dead ids in `heads` are dropped.
pub fn run_round_with_heads(
    nodes: &mut [Node],
    round: u64,
    heads: &[usize],
    setup: &RoundSetup,
    rng: &mut SimRng,
) -> (RoundReport, ClusterAssignment) {
    let deaths = refresh_alive(nodes);
    let mut heads: Vec<usize> = heads.iter().copied().filter(|&h| nodes[h].alive).collect();
    heads.sort_unstable();
    heads.dedup();
    finish_round(nodes, round, heads, deaths, setup, rng)
}

/// A single run's mutable state: population, election stream and round
/// counter.
#[derive(Debug, Clone)]
pub struct Simulation {
    nodes: Vec<Node>,
    setup: RoundSetup,
    rng: SimRng,
    round: u64,
}

impl Simulation {
    pub fn new(nodes: Vec<Node>, setup: RoundSetup, rng: SimRng) -> Self {
        debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.id == i));
        Simulation {
            nodes,
            setup,
            rng,
            round: 0,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn setup(&self) -> &RoundSetup {
        &self.setup
    }

    pub fn step(&mut self) -> Result<RoundReport> {
        self.step_traced().map(|(report, _)| report)
    }

    pub fn step_traced(&mut self) -> Result<(RoundReport, ClusterAssignment)> {
        let out = run_round(&mut self.nodes, self.round, &self.setup, &mut self.rng)?;
        self.round += 1;
        Ok(out)
    }

    /// Runs until every node is dead or `max_rounds` rounds have been played.
    pub fn run(&mut self, max_rounds: u64) -> Result<Vec<RoundReport>> {
        let mut reports = Vec::new();
        while self.round < max_rounds {
            let report = self.step()?;
            let done = report.alive_total() == 0;
            reports.push(report);
            if done {
                break;
            }
        }
        Ok(reports)
    }
}
