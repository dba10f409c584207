//! Heterogeneous node population: classes, energies and uniform deployment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeClass {
    Normal,
    Advanced,
    Super,
}

impl NodeClass {
    pub const ALL: [NodeClass; 3] = [NodeClass::Normal, NodeClass::Advanced, NodeClass::Super];

    /// Energy multiplier over `E0` for this class: 1, 1+alpha or 1+beta.
    pub fn energy_factor(self, het: &HeterogeneityParams) -> f64 {
        match self {
            NodeClass::Normal => 1.0,
            NodeClass::Advanced => 1.0 + het.alpha,
            NodeClass::Super => 1.0 + het.beta,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            NodeClass::Normal => 0,
            NodeClass::Advanced => 1,
            NodeClass::Super => 2,
        }
    }
}

/// Three-level population parameters.
///
/// A fraction `m` of the nodes carry extra energy. Of those, a fraction `m0`
/// are super nodes with `E0 * (1 + beta)`; the rest are advanced nodes with
/// `E0 * (1 + alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeterogeneityParams {
    pub m: f64,
    pub m0: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl HeterogeneityParams {
    pub const HOMOGENEOUS: HeterogeneityParams = HeterogeneityParams {
        m: 0.0,
        m0: 0.0,
        alpha: 0.0,
        beta: 0.0,
    };

    /// `1 + m (alpha + m0 (beta - alpha))`: total energy over `N * E0`.
    pub fn energy_scale(&self) -> f64 {
        1.0 + self.m * (self.alpha + self.m0 * (self.beta - self.alpha))
    }

    pub fn validate(&self, prefix: &str) -> Result<()> {
        let key = |k: &str| format!("{prefix}.{k}");
        for (name, v) in [("m", self.m), ("m0", self.m0)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SimError::invalid(
                    key(name),
                    format!("{v} is not in [0, 1]"),
                ));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(SimError::invalid(
                key("alpha"),
                format!("{} must be >= 0", self.alpha),
            ));
        }
        if !(self.beta.is_finite() && self.beta >= self.alpha) {
            return Err(SimError::invalid(
                key("beta"),
                format!("{} must be >= alpha ({})", self.beta, self.alpha),
            ));
        }
        Ok(())
    }
}

/// Missing keys in a config file fall back to `NetworkConfig::default()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_nodes: usize,
    pub field_side: f64,
    pub bs_pos: Position,
    #[serde(rename = "heterogeneity")]
    pub het: HeterogeneityParams,
    pub e0: f64,
    /// Overwritten per replication by the experiment runner.
    pub rng_seed: u64,
}

impl NetworkConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(SimError::invalid(
                format!("{prefix}.n_nodes"),
                "must be >= 1",
            ));
        }
        if !(self.field_side.is_finite() && self.field_side > 0.0) {
            return Err(SimError::invalid(
                format!("{prefix}.field_side"),
                "must be > 0",
            ));
        }
        if !(self.e0.is_finite() && self.e0 > 0.0) {
            return Err(SimError::invalid(format!("{prefix}.e0"), "must be > 0"));
        }
        if !(self.bs_pos.x.is_finite() && self.bs_pos.y.is_finite()) {
            return Err(SimError::invalid(
                format!("{prefix}.bs_pos"),
                "must be finite",
            ));
        }
        self.het.validate(&format!("{prefix}.heterogeneity"))?;
        self.class_counts().map(|_| ())
    }

    /// Node counts per class, `(normal, advanced, super)`.
    pub fn class_counts(&self) -> Result<ClassCounts> {
        let n = self.n_nodes as f64;
        let rich = (n * self.het.m).round() as i64;
        let sup = (n * self.het.m * self.het.m0).round() as i64;
        let adv = rich - sup;
        let normal = self.n_nodes as i64 - rich;
        if sup < 0 || adv < 0 || normal < 0 {
            return Err(SimError::invalid(
                "network.heterogeneity",
                format!(
                    "class counts would be negative (super {sup}, advanced {adv}, normal {normal})"
                ),
            ));
        }
        Ok(ClassCounts {
            normal: normal as usize,
            advanced: adv as usize,
            super_: sup as usize,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassCounts {
    pub normal: usize,
    pub advanced: usize,
    pub super_: usize,
}

impl ClassCounts {
    pub fn total(&self) -> usize {
        self.normal + self.advanced + self.super_
    }

    pub fn get(&self, class: NodeClass) -> usize {
        match class {
            NodeClass::Normal => self.normal,
            NodeClass::Advanced => self.advanced,
            NodeClass::Super => self.super_,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub pos: Position,
    pub class: NodeClass,
    pub e_initial: f64,
    pub e_residual: f64,
    /// Consecutive eligible rounds without serving as cluster head.
    pub rounds_since_ch: u32,
    /// Membership in the eligible set G.
    pub eligible: bool,
    pub alive: bool,
}

impl Node {
    pub fn new(id: usize, pos: Position, class: NodeClass, e_initial: f64) -> Self {
        Node {
            id,
            pos,
            class,
            e_initial,
            e_residual: e_initial,
            rounds_since_ch: 0,
            eligible: true,
            alive: e_initial > 0.0,
        }
    }

    pub fn energy_ratio(&self) -> f64 {
        if self.e_initial > 0.0 {
            self.e_residual / self.e_initial
        } else {
            0.0
        }
    }
}

/// Deploys `n_nodes` nodes uniformly in the square field.
///
/// Positions come from the seed's deployment stream, `x` then `y` per node in
/// id order. The first `n_super` ids are super nodes, the next `n_advanced`
/// advanced, and the rest normal.
pub fn deploy(config: &NetworkConfig) -> Result<Vec<Node>> {
    config.validate("network")?;
    let counts = config.class_counts()?;
    let mut rng = rng::deployment_rng(config.rng_seed);
    let side = config.field_side;
    let nodes = (0..config.n_nodes)
        .map(|id| {
            let x = rng.random::<f64>() * side;
            let y = rng.random::<f64>() * side;
            let class = if id < counts.super_ {
                NodeClass::Super
            } else if id < counts.super_ + counts.advanced {
                NodeClass::Advanced
            } else {
                NodeClass::Normal
            };
            Node::new(
                id,
                Position::new(x, y),
                class,
                config.e0 * class.energy_factor(&config.het),
            )
        })
        .collect();
    Ok(nodes)
}

/// Closed-form total initial energy `N * E0 * (1 + m (alpha + m0 (beta - alpha)))`.
pub fn total_initial_energy(config: &NetworkConfig) -> f64 {
    config.n_nodes as f64 * config.e0 * config.het.energy_scale()
}
