use serde::{Deserialize, Serialize};

use crate::formula::render_formula;
use crate::kernel::RuleId;
use crate::search::{Node, NodeId, NodeStatus, ProofTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Situation,
    Application,
}

/// One node of the tree as the UI draws it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub status: NodeStatus,
    /// The situation's goal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleId>,
    /// Tool-tip text for application nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_display_name: Option<String>,
    pub children: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeView {
    pub root: NodeId,
    pub nodes: Vec<ViewNode>,
}

impl TreeView {
    pub fn node(&self, id: NodeId) -> Option<&ViewNode> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

pub fn tree_to_view(tree: &ProofTree) -> TreeView {
    let nodes = tree
        .nodes
        .iter()
        .map(|n| match n {
            Node::Situation(s) => ViewNode {
                id: s.id,
                kind: NodeKind::Situation,
                status: s.status,
                goal: Some(render_formula(&s.situation.goal)),
                rule: None,
                rule_display_name: None,
                children: s.alternatives.clone(),
            },
            Node::Application(a) => ViewNode {
                id: a.id,
                kind: NodeKind::Application,
                status: a.status,
                goal: None,
                rule: Some(a.application.rule),
                rule_display_name: Some(a.application.rule.display_name().to_string()),
                children: a.children.clone(),
            },
        })
        .collect();
    TreeView {
        root: tree.root,
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::KnowledgeBase;
    use crate::formula::parse_formula;
    use crate::search::{prove, simplify, CancelToken, ProverConfig, SimplifyOptions};

    fn run(goal: &str) -> ProofTree {
        prove(
            &parse_formula(goal).unwrap(),
            &KnowledgeBase::default(),
            &ProverConfig::default(),
            &CancelToken::new(),
        )
        .tree
    }

    #[test]
    fn identity_proof_view() {
        let tree = simplify(&run("P -> P"), SimplifyOptions::default()).unwrap();
        let view = tree_to_view(&tree);
        let kinds: Vec<_> = view.nodes.iter().map(|n| n.kind).collect();
        assert_eq!(
            kinds,
            [
                NodeKind::Situation,
                NodeKind::Application,
                NodeKind::Situation,
                NodeKind::Application
            ]
        );
        assert!(view.nodes.iter().all(|n| n.status == NodeStatus::Success));
        let closing = view.nodes.last().unwrap();
        assert_eq!(closing.rule, Some(RuleId::GoalInKB));
        assert!(closing.children.is_empty());
        let json = serde_json::to_string(&view).unwrap();
        assert_eq!(serde_json::from_str::<TreeView>(&json).unwrap(), view);
    }

    #[test]
    fn failed_root_is_reported() {
        let view = tree_to_view(&run("P"));
        assert_eq!(view.node(view.root).unwrap().status, NodeStatus::Failed);
        assert!(view.node(view.root).unwrap().children.is_empty());
        let json: serde_json::Value = serde_json::to_value(&view).unwrap();
        assert_eq!(json["nodes"][0]["status"], "Failed");
    }
}
