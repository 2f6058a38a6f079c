mod config;
mod engine;
mod simplify;
mod tree;

pub use config::{
    ConfigError, ProverConfig, RuleSetting, DEFAULT_DEPTH_LIMIT, DEFAULT_TIME_LIMIT_MS,
};
pub use engine::{prove, prove_situation, CancelToken, Outcome, ProofResult, SearchStats};
pub use simplify::{preorder, simplify, NotProved, SimplifyOptions};
pub use tree::{
    propagate_status, ApplicationNode, Expansion, Node, NodeId, NodeStatus, ProofTree,
    SituationNode,
};
