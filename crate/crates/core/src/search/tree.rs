use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::kernel::{check_step, ProofSituation, RuleApplication, StepVerdict};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeStatus {
    Success,
    Failed,
    Pending,
    /// Only while the search is running.
    Open,
}

/// How far a situation node has been explored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expansion {
    /// Not reached before the search stopped.
    Unexpanded,
    /// Every applicable alternative has been listed.
    Expanded,
    /// Beyond the depth limit.
    DepthLimited,
    /// Repeats a situation on the path from the root; searching it again
    /// cannot find anything the ancestor would not.
    Loop,
    /// Same goal and assumptions as a situation that already failed under
    /// the same loop cuts, or same goal and a subset of the assumptions of
    /// one that failed without any.
    KnownFailed,
    /// Same goal and assumptions as a situation that ran into the depth limit
    /// from no deeper than here.
    KnownPending,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SituationNode {
    pub id: NodeId,
    /// Situation nodes from the root, the root being 1.
    pub depth: u32,
    pub situation: ProofSituation,
    pub status: NodeStatus,
    pub expansion: Expansion,
    pub alternatives: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApplicationNode {
    pub id: NodeId,
    pub application: RuleApplication,
    pub status: NodeStatus,
    /// Child situation nodes created so far, in the order of
    /// `application.children`.
    pub children: Vec<NodeId>,
}

impl ApplicationNode {
    /// Whether every child situation has a node.
    pub fn is_complete(&self) -> bool {
        self.children.len() == self.application.children.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Situation(SituationNode),
    Application(ApplicationNode),
}

impl Node {
    pub fn id(&self) -> NodeId {
        match self {
            Node::Situation(s) => s.id,
            Node::Application(a) => a.id,
        }
    }

    pub fn status(&self) -> NodeStatus {
        match self {
            Node::Situation(s) => s.status,
            Node::Application(a) => a.status,
        }
    }

    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Situation(s) => &s.alternatives,
            Node::Application(a) => &a.children,
        }
    }
}

/// AND/OR tree of situation and application nodes.
///
/// Nodes are kept sorted by id, and every node's id is larger than its
/// parent's.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofTree {
    pub root: NodeId,
    pub nodes: Vec<Node>,
    /// Assumption labels hidden from presentation.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub elided_assumptions: BTreeSet<String>,
}

impl ProofTree {
    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.position(id).map(|i| &self.nodes[i])
    }

    fn position(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search_by_key(&id, Node::id).ok()
    }

    pub fn situation(&self, id: NodeId) -> Option<&SituationNode> {
        match self.node(id)? {
            Node::Situation(s) => Some(s),
            Node::Application(_) => None,
        }
    }

    pub fn application(&self, id: NodeId) -> Option<&ApplicationNode> {
        match self.node(id)? {
            Node::Application(a) => Some(a),
            Node::Situation(_) => None,
        }
    }

    pub fn root_node(&self) -> &SituationNode {
        self.situation(self.root).expect("root is a situation node")
    }

    pub fn root_status(&self) -> NodeStatus {
        self.root_node().status
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn situations(&self) -> impl Iterator<Item = &SituationNode> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Situation(s) => Some(s),
            Node::Application(_) => None,
        })
    }

    pub fn applications(&self) -> impl Iterator<Item = &ApplicationNode> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Application(a) => Some(a),
            Node::Situation(_) => None,
        })
    }

    /// Pairs each application node with the situation it was applied to.
    pub fn steps(&self) -> impl Iterator<Item = (&SituationNode, &ApplicationNode)> {
        self.situations().flat_map(move |s| {
            s.alternatives
                .iter()
                .filter_map(move |&a| Some((s, self.application(a)?)))
        })
    }

    /// Runs the independent checker on every application node and returns
    /// the failures.
    pub fn check_all_steps(&self) -> Vec<(NodeId, String)> {
        self.steps()
            .filter_map(|(s, a)| match check_step(&s.situation, &a.application) {
                StepVerdict::Valid => None,
                StepVerdict::Invalid(reason) => Some((a.id, reason)),
            })
            .collect()
    }

    /// Single alternative per situation and everything successful.
    pub fn is_simplified(&self) -> bool {
        self.nodes.iter().all(|n| {
            n.status() == NodeStatus::Success
                && match n {
                    Node::Situation(s) => s.alternatives.len() == 1,
                    Node::Application(a) => a.is_complete(),
                }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trees serialize")
    }
}

/// Recomputes every status bottom-up from the expansion state of the
/// situation nodes.
///
/// A situation succeeds iff one alternative does and fails iff it was fully
/// expanded and every alternative failed; an application succeeds iff all its
/// children do and fails iff one child does. Everything else is pending.
/// Alternatives after the first successful one that have no child nodes were
/// never tried and stay pending.
pub fn propagate_status(tree: &ProofTree) -> ProofTree {
    let mut out = tree.clone();
    propagate_in_place(&mut out);
    out
}

pub(crate) fn propagate_in_place(out: &mut ProofTree) {
    // Children always come after their parent, so a reverse sweep sees them first.
    for i in (0..out.nodes.len()).rev() {
        let status = match &out.nodes[i] {
            Node::Situation(s) => match s.expansion {
                Expansion::Unexpanded | Expansion::DepthLimited | Expansion::KnownPending => {
                    NodeStatus::Pending
                }
                Expansion::Loop | Expansion::KnownFailed => NodeStatus::Failed,
                Expansion::Expanded => {
                    let statuses: Vec<_> =
                        s.alternatives.iter().map(|&a| status_of(out, a)).collect();
                    if statuses.contains(&NodeStatus::Success) {
                        NodeStatus::Success
                    } else if statuses.iter().all(|&st| st == NodeStatus::Failed) {
                        NodeStatus::Failed
                    } else {
                        NodeStatus::Pending
                    }
                }
            },
            Node::Application(a) => {
                let statuses: Vec<_> = a.children.iter().map(|&c| status_of(out, c)).collect();
                if statuses.contains(&NodeStatus::Failed) {
                    NodeStatus::Failed
                } else if a.is_complete() && statuses.iter().all(|&st| st == NodeStatus::Success) {
                    NodeStatus::Success
                } else {
                    NodeStatus::Pending
                }
            }
        };
        match &mut out.nodes[i] {
            Node::Situation(s) => s.status = status,
            Node::Application(a) => a.status = status,
        }
        if let Node::Situation(s) = &out.nodes[i] {
            let alternatives = s.alternatives.clone();
            let first = alternatives
                .iter()
                .position(|&a| status_of(out, a) == NodeStatus::Success);
            for &a in alternatives
                .iter()
                .skip(first.map_or(usize::MAX, |f| f + 1))
            {
                let Some(j) = out.position(a) else { continue };
                if let Node::Application(app) = &mut out.nodes[j] {
                    if app.children.is_empty() {
                        app.status = NodeStatus::Pending;
                    }
                }
            }
        }
    }
}

fn status_of(tree: &ProofTree, id: NodeId) -> NodeStatus {
    tree.node(id).map_or(NodeStatus::Pending, Node::status)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::document::KnowledgeBase;
    use crate::formula::parse_formula;
    use crate::kernel::{applications_of, RuleId};

    pub(crate) fn sit(id: NodeId, expansion: Expansion, alternatives: Vec<NodeId>) -> Node {
        let situation =
            ProofSituation::initial(parse_formula("P").unwrap(), &KnowledgeBase::default());
        Node::Situation(SituationNode {
            id,
            depth: 1,
            situation,
            status: NodeStatus::Open,
            expansion,
            alternatives,
        })
    }

    pub(crate) fn app(id: NodeId, arity: usize, children: Vec<NodeId>) -> Node {
        let s = ProofSituation::initial(parse_formula("A & B").unwrap(), &KnowledgeBase::default());
        let mut application = applications_of(RuleId::AndGoal, &s).remove(0);
        application.children.truncate(arity);
        Node::Application(ApplicationNode {
            id,
            application,
            status: NodeStatus::Open,
            children,
        })
    }

    fn statuses(t: &ProofTree) -> Vec<NodeStatus> {
        t.nodes.iter().map(Node::status).collect()
    }

    #[test]
    fn closing_leaf_succeeds() {
        let t = ProofTree {
            root: 0,
            nodes: vec![sit(0, Expansion::Expanded, vec![1]), app(1, 0, vec![])],
            elided_assumptions: Default::default(),
        };
        assert_eq!(
            statuses(&propagate_status(&t)),
            [NodeStatus::Success, NodeStatus::Success]
        );
    }

    #[test]
    fn failed_child_fails_application() {
        let t = ProofTree {
            root: 0,
            nodes: vec![
                sit(0, Expansion::Expanded, vec![1]),
                app(1, 1, vec![2]),
                sit(2, Expansion::Expanded, vec![]),
            ],
            elided_assumptions: Default::default(),
        };
        assert_eq!(statuses(&propagate_status(&t)), [NodeStatus::Failed; 3]);
    }

    #[test]
    fn pending_beats_failed_at_situations() {
        let t = ProofTree {
            root: 0,
            nodes: vec![
                sit(0, Expansion::Expanded, vec![1, 3]),
                app(1, 1, vec![2]),
                sit(2, Expansion::DepthLimited, vec![]),
                app(3, 1, vec![4]),
                sit(4, Expansion::Expanded, vec![]),
            ],
            elided_assumptions: Default::default(),
        };
        let out = propagate_status(&t);
        assert_eq!(out.root_status(), NodeStatus::Pending);
        assert_eq!(out.node(1).unwrap().status(), NodeStatus::Pending);
        assert_eq!(out.node(3).unwrap().status(), NodeStatus::Failed);
        assert_eq!(propagate_status(&out), out);
    }

    #[test]
    fn unexplored_application_is_pending() {
        let t = ProofTree {
            root: 0,
            nodes: vec![sit(0, Expansion::Expanded, vec![1]), app(1, 2, vec![])],
            elided_assumptions: Default::default(),
        };
        assert_eq!(propagate_status(&t).root_status(), NodeStatus::Pending);
    }

    #[test]
    fn untried_alternatives_after_a_success_stay_pending() {
        let t = ProofTree {
            root: 0,
            nodes: vec![
                sit(0, Expansion::Expanded, vec![1, 2]),
                app(1, 0, vec![]),
                app(2, 0, vec![]),
            ],
            elided_assumptions: Default::default(),
        };
        let out = propagate_status(&t);
        assert_eq!(
            statuses(&out),
            [
                NodeStatus::Success,
                NodeStatus::Success,
                NodeStatus::Pending
            ]
        );
        assert_eq!(propagate_status(&out), out);
    }
}
