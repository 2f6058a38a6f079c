use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tree::{Node, NodeId, NodeStatus, ProofTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimplifyOptions {
    /// Keep only the first successful alternative of each situation.
    pub prune_failures: bool,
    /// Hide assumptions no kept step refers to.
    pub elide_unused_assumptions: bool,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        Self {
            prune_failures: true,
            elide_unused_assumptions: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("tree root is {0:?}, not Success")]
pub struct NotProved(pub NodeStatus);

/// Reduces a successful tree to the proof it contains.
///
/// Node ids and situations are kept unchanged. Elided assumption labels are
/// recorded in the tree's presentation metadata only.
pub fn simplify(tree: &ProofTree, options: SimplifyOptions) -> Result<ProofTree, NotProved> {
    let status = tree.root_status();
    if status != NodeStatus::Success {
        return Err(NotProved(status));
    }
    let mut out = if options.prune_failures {
        prune(tree)
    } else {
        tree.clone()
    };
    out.elided_assumptions = if options.elide_unused_assumptions {
        unused_assumptions(&out)
    } else {
        BTreeSet::new()
    };
    Ok(out)
}

fn prune(tree: &ProofTree) -> ProofTree {
    let mut kept = Vec::new();
    let mut stack = vec![tree.root];
    while let Some(id) = stack.pop() {
        let Some(node) = tree.node(id) else { continue };
        let mut node = node.clone();
        match &mut node {
            Node::Situation(s) => {
                let chosen = s
                    .alternatives
                    .iter()
                    .copied()
                    .find(|&a| tree.node(a).map(Node::status) == Some(NodeStatus::Success));
                s.alternatives = chosen.into_iter().collect();
            }
            Node::Application(_) => {}
        }
        stack.extend(node.children().iter().rev().copied());
        kept.push(node);
    }
    kept.sort_by_key(Node::id);
    ProofTree {
        root: tree.root,
        nodes: kept,
        elided_assumptions: tree.elided_assumptions.clone(),
    }
}

fn unused_assumptions(tree: &ProofTree) -> BTreeSet<String> {
    let used: BTreeSet<&str> = tree
        .applications()
        .flat_map(|a| a.application.focus.labels())
        .map(String::as_str)
        .collect();
    tree.situations()
        .flat_map(|s| s.situation.assumptions.iter().map(|a| a.label.as_str()))
        .filter(|l| !used.contains(l))
        .map(str::to_string)
        .collect()
}

/// Ids of the nodes kept in a simplified tree, in preorder.
pub fn preorder(tree: &ProofTree) -> Vec<NodeId> {
    let mut order = Vec::new();
    let mut stack = vec![tree.root];
    while let Some(id) = stack.pop() {
        order.push(id);
        if let Some(n) = tree.node(id) {
            stack.extend(n.children().iter().rev().copied());
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::KnowledgeBase;
    use crate::formula::parse_formula;
    use crate::search::{prove, CancelToken, ProverConfig};

    fn proof(goal: &str, kb: &[(&str, &str)]) -> ProofTree {
        let kb =
            KnowledgeBase::from_formulas(kb.iter().map(|(l, f)| (*l, parse_formula(f).unwrap())));
        prove(
            &parse_formula(goal).unwrap(),
            &kb,
            &ProverConfig::default(),
            &CancelToken::new(),
        )
        .tree
    }

    #[test]
    fn pruned_tree_is_simplified_and_keeps_ids() {
        let tree = proof("P | Q", &[("H", "Q"), ("Unused", "R")]);
        let s = simplify(&tree, SimplifyOptions::default()).unwrap();
        assert!(s.is_simplified());
        for n in &s.nodes {
            assert_eq!(tree.node(n.id()).map(Node::id), Some(n.id()));
        }
        assert!(s.elided_assumptions.contains("Unused"));
        assert!(!s.elided_assumptions.contains("H"));
        assert_eq!(simplify(&s, SimplifyOptions::default()).unwrap(), s);
    }

    #[test]
    fn failed_tree_is_rejected() {
        let tree = proof("Q", &[("H", "P")]);
        assert_eq!(
            simplify(&tree, SimplifyOptions::default()),
            Err(NotProved(NodeStatus::Failed))
        );
    }

    #[test]
    fn options_are_independent() {
        let tree = proof("P | Q", &[("H", "Q")]);
        let keep = simplify(
            &tree,
            SimplifyOptions {
                prune_failures: false,
                elide_unused_assumptions: false,
            },
        )
        .unwrap();
        assert_eq!(keep, tree);
    }
}
