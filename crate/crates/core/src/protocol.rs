//! Cluster-head election for LEACH, EEHC and EASM.
//!
//! All three share the rotating threshold `p / (1 - p * (r mod E))` with
//! epoch `E = round(1/p)`. LEACH uses `p_opt` for every node. EEHC weights
//! the probability by the node's initial energy class. EASM additionally
//! scales the threshold by the residual/initial energy ratio, dropping that
//! factor once the node has gone a full epoch of eligible rounds without
//! being elected (the node's own epoch `round(1/p_i)` by default).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::network::{HeterogeneityParams, Node, NodeClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Leach,
    Eehc,
    Easm,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] =
        [ProtocolKind::Leach, ProtocolKind::Eehc, ProtocolKind::Easm];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Leach => "leach",
            ProtocolKind::Eehc => "eehc",
            ProtocolKind::Easm => "easm",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "leach" => Ok(ProtocolKind::Leach),
            "eehc" => Ok(ProtocolKind::Eehc),
            "easm" => Ok(ProtocolKind::Easm),
            other => Err(SimError::invalid(
                "protocol",
                format!("unknown protocol `{other}` (expected leach, eehc or easm)"),
            )),
        }
    }
}

/// Which epoch length triggers the EASM energy-factor reset.
///
/// With per-class epochs a normal node's epoch is about twice `1/p_opt`, so
/// the `Optimal` trigger drops the energy factor halfway through it and
/// EASM elects almost exactly like EEHC. `PerClass` keeps the factor for the
/// node's whole epoch.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetTrigger {
    /// `round(1/p_opt)` for every node.
    Optimal,
    /// `round(1/p_i)` using the node's own class probability.
    #[default]
    PerClass,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectionContext {
    pub round: u64,
    pub p_opt: f64,
    pub het: HeterogeneityParams,
    pub reset_trigger: ResetTrigger,
}

impl ElectionContext {
    pub fn new(round: u64, p_opt: f64, het: HeterogeneityParams) -> Self {
        ElectionContext {
            round,
            p_opt,
            het,
            reset_trigger: ResetTrigger::default(),
        }
    }
}

/// Rounds per epoch for election probability `p`: `max(1, round(1/p))`.
pub fn epoch_length(p: f64) -> u64 {
    ((1.0 / p).round() as u64).max(1)
}

pub fn class_probability(kind: ProtocolKind, class: NodeClass, ctx: &ElectionContext) -> f64 {
    match kind {
        ProtocolKind::Leach => ctx.p_opt,
        ProtocolKind::Eehc | ProtocolKind::Easm => {
            ctx.p_opt / ctx.het.energy_scale() * class.energy_factor(&ctx.het)
        }
    }
}

/// Election threshold of `node` for the round in `ctx`, clamped to `[0, 1]`.
pub fn threshold(kind: ProtocolKind, node: &Node, p_i: f64, ctx: &ElectionContext) -> Result<f64> {
    if !node.alive || !node.eligible {
        return Ok(0.0);
    }
    let phase = ctx.round % epoch_length(p_i);
    let denominator = 1.0 - p_i * phase as f64;
    if denominator <= 0.0 {
        return Err(SimError::DegenerateThreshold {
            probability: p_i,
            round: ctx.round,
            denominator,
        });
    }
    let base = p_i / denominator;
    let t = match kind {
        ProtocolKind::Leach | ProtocolKind::Eehc => base,
        ProtocolKind::Easm => {
            let reset_after = match ctx.reset_trigger {
                ResetTrigger::Optimal => epoch_length(ctx.p_opt),
                ResetTrigger::PerClass => epoch_length(p_i),
            };
            if u64::from(node.rounds_since_ch) >= reset_after {
                base
            } else {
                base * node.energy_ratio()
            }
        }
    };
    Ok(t.clamp(0.0, 1.0))
}

/// Runs one election round and returns the ids of the new cluster heads in
/// ascending order.
///
/// Every alive node draws one uniform number in id order, eligible or not,
/// so the stream advances by exactly the alive count. Elected nodes leave
/// the eligible set until their class epoch wraps (`r mod E == 0`).
pub fn elect<R: Rng + ?Sized>(
    kind: ProtocolKind,
    nodes: &mut [Node],
    ctx: &ElectionContext,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut heads = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.alive) {
        let p_i = class_probability(kind, node.class, ctx);
        let epoch = epoch_length(p_i);
        if ctx.round.is_multiple_of(epoch) {
            node.eligible = true;
        }
        let t = threshold(kind, node, p_i, ctx)?;
        let u: f64 = rng.random();
        if !node.eligible {
            continue;
        }
        if u < t {
            heads.push(node.id);
            node.rounds_since_ch = 0;
            node.eligible = epoch == 1;
        } else {
            node.rounds_since_ch += 1;
        }
    }
    Ok(heads)
}
