use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::config::ProverConfig;
use super::tree::{
    propagate_in_place, ApplicationNode, Expansion, Node, NodeId, NodeStatus, ProofTree,
    SituationNode,
};
use crate::document::KnowledgeBase;
use crate::formula::Formula;
use crate::kernel::{applicable_applications, ProofSituation};

/// Shared flag for stopping a running search from another thread.
#[derive(Clone, Debug, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::SeqCst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Proved,
    Failed,
    DepthLimit,
    TimeLimit,
    Interrupted,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofResult {
    pub outcome: Outcome,
    pub version: u32,
    pub tree: ProofTree,
    pub stats: SearchStats,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        self.outcome == Outcome::Proved
    }
}

/// Searches for a proof of `goal` from `kb`.
///
/// The search is depth-first over the AND/OR tree, tries alternatives in rule
/// priority order and stops at the first success. It checks the time limit and
/// the cancel token before each expansion.
pub fn prove(
    goal: &Formula,
    kb: &KnowledgeBase,
    config: &ProverConfig,
    cancel: &CancelToken,
) -> ProofResult {
    prove_situation(ProofSituation::initial(goal.clone(), kb), config, cancel)
}

pub fn prove_situation(
    root: ProofSituation,
    config: &ProverConfig,
    cancel: &CancelToken,
) -> ProofResult {
    let start = Instant::now();
    let deadline = start + Duration::from_millis(config.time_limit_ms);

    // Most searches settle quickly. When one does not, a depth-unbounded pass
    // looks for subtrees that fail outright, and the real search reuses those
    // failures. They can only turn pending nodes into failed ones, so whether
    // the goal is proved does not change.
    let mut quick = Search::new(
        config,
        cancel,
        deadline,
        config.depth_limit,
        Some(QUICK_EXPANSIONS),
        Memo::default(),
    );
    quick.run(root.clone());
    let mut expanded = quick.expanded;
    let search = if quick.stopped == Some(Stop::Budget) {
        let mut refute = Search::new(
            config,
            cancel,
            deadline,
            u32::MAX,
            Some(REFUTATION_EXPANSIONS),
            Memo::default(),
        );
        refute.run(root.clone());
        expanded += refute.expanded;
        match refute.stopped {
            Some(Stop::Time | Stop::Cancel) => quick,
            _ => {
                let mut main = Search::new(
                    config,
                    cancel,
                    deadline,
                    config.depth_limit,
                    None,
                    refute.memo.unconditional(),
                );
                main.run(root);
                expanded += main.expanded;
                main
            }
        }
    } else {
        quick
    };

    let stopped = search.stopped.map(|stop| match stop {
        Stop::Cancel => Outcome::Interrupted,
        Stop::Time | Stop::Budget => {
            if cancel.is_cancelled() {
                Outcome::Interrupted
            } else {
                Outcome::TimeLimit
            }
        }
    });
    let mut tree = ProofTree {
        root: 0,
        nodes: search.nodes,
        elided_assumptions: BTreeSet::new(),
    };
    propagate_in_place(&mut tree);
    // A stop that lands after the root already resolved does not change the answer.
    let outcome = match tree.root_status() {
        NodeStatus::Success => Outcome::Proved,
        NodeStatus::Failed => Outcome::Failed,
        _ => stopped.unwrap_or(Outcome::DepthLimit),
    };
    let stats = SearchStats {
        nodes_expanded: expanded,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    ProofResult {
        outcome,
        version: 1,
        tree,
        stats,
    }
}

const QUICK_EXPANSIONS: u64 = 2_000;
const REFUTATION_EXPANSIONS: u64 = 20_000;

type Key = (String, BTreeSet<String>);

enum Frame {
    Situation(Open),
    Application { id: NodeId, next: usize },
}

/// A situation being explored, with what its failure so far depends on.
struct Open {
    id: NodeId,
    next: usize,
    key: u32,
    goal: u32,
    /// Sorted formula ids of the assumptions.
    assumptions: Vec<u32>,
    depth: u32,
    /// Ancestor keys whose presence on the path caused loop cuts below.
    deps: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stop {
    Time,
    Cancel,
    Budget,
}

/// What a search remembers about situations it has left.
#[derive(Default)]
struct Memo {
    key_ids: HashMap<Key, u32>,
    formula_ids: HashMap<String, u32>,
    /// Situations known to fail as long as each listed key is on the path or
    /// itself known to fail.
    failures: HashMap<u32, Vec<u32>>,
    /// Per goal, the largest assumption sets known to fail without any loop
    /// cut. A proof from fewer assumptions would also be one from more, so
    /// every subset fails too.
    maximal_failures: HashMap<u32, Vec<Vec<u32>>>,
    /// Situations that did not succeed at the given depth under the listed
    /// cuts; deeper down they cannot succeed either.
    stalls: HashMap<u32, (u32, Vec<u32>)>,
}

impl Memo {
    /// The failures that hold whatever the path and depth.
    fn unconditional(self) -> Memo {
        let failures = self
            .failures
            .into_iter()
            .filter(|(_, deps)| deps.is_empty())
            .collect();
        Memo {
            failures,
            stalls: HashMap::new(),
            ..self
        }
    }
}

/// How a finished situation reports back to its parent.
struct Finished {
    status: NodeStatus,
    deps: Vec<u32>,
}

struct Search<'a> {
    config: &'a ProverConfig,
    cancel: &'a CancelToken,
    deadline: Instant,
    depth_limit: u32,
    budget: Option<u64>,
    nodes: Vec<Node>,
    memo: Memo,
    /// Keys of the situations on the current path.
    path: HashMap<u32, u32>,
    stack: Vec<Frame>,
    expanded: u64,
    stopped: Option<Stop>,
}

impl<'a> Search<'a> {
    fn new(
        config: &'a ProverConfig,
        cancel: &'a CancelToken,
        deadline: Instant,
        depth_limit: u32,
        budget: Option<u64>,
        memo: Memo,
    ) -> Self {
        Search {
            config,
            cancel,
            deadline,
            depth_limit,
            budget,
            nodes: Vec::new(),
            memo,
            path: HashMap::new(),
            stack: Vec::new(),
            expanded: 0,
            stopped: None,
        }
    }

    fn run(&mut self, root: ProofSituation) {
        self.enter(root, 1);
        while self.stopped.is_none() {
            let Some(frame) = self.stack.last_mut() else {
                break;
            };
            match frame {
                Frame::Situation(open) => {
                    let (id, i) = (open.id, open.next);
                    let alternatives = &self.sit(id).alternatives;
                    let previous = (i > 0).then(|| self.status(alternatives[i - 1]));
                    if previous == Some(NodeStatus::Success) {
                        self.leave_situation(NodeStatus::Success);
                    } else if i == alternatives.len() {
                        let all_failed = alternatives
                            .iter()
                            .all(|&a| self.status(a) == NodeStatus::Failed);
                        self.leave_situation(if all_failed {
                            NodeStatus::Failed
                        } else {
                            NodeStatus::Pending
                        });
                    } else {
                        let app = alternatives[i];
                        if let Some(Frame::Situation(open)) = self.stack.last_mut() {
                            open.next += 1;
                        }
                        self.stack.push(Frame::Application { id: app, next: 0 });
                    }
                }
                Frame::Application { id, next } => {
                    let (id, i) = (*id, *next);
                    let app = self.app(id);
                    let previous = (i > 0).then(|| self.status(app.children[i - 1]));
                    match previous {
                        Some(NodeStatus::Failed) => self.leave_application(NodeStatus::Failed),
                        Some(status) if status != NodeStatus::Success => {
                            self.leave_application(NodeStatus::Pending)
                        }
                        _ if i == app.application.children.len() => {
                            self.leave_application(NodeStatus::Success)
                        }
                        _ => {
                            let child = app.application.children[i].clone();
                            if let Some(Frame::Application { next, .. }) = self.stack.last_mut() {
                                *next += 1;
                            }
                            let depth = self.parent_depth() + 1;
                            let child_id = self.nodes.len() as NodeId;
                            if let Node::Application(a) = &mut self.nodes[id as usize] {
                                a.children.push(child_id);
                            }
                            if let Some(done) = self.enter(child, depth) {
                                self.report(done);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Creates the node for a situation. Returns its result if it is settled
    /// without expansion, otherwise pushes its frame.
    fn enter(&mut self, situation: ProofSituation, depth: u32) -> Option<Finished> {
        let id = self.nodes.len() as NodeId;
        let (goal_text, assumption_texts) = situation.key();
        let goal = self.formula_id(&goal_text);
        let mut assumptions: Vec<u32> = assumption_texts
            .iter()
            .map(|a| self.formula_id(a))
            .collect();
        assumptions.sort_unstable();
        let key = self.intern((goal_text, assumption_texts));
        let limit = self.depth_limit;
        // The root is always expanded so that a tree shows why it failed.
        let fresh = depth > 1 && depth <= limit && !self.path.contains_key(&key);
        let known = if fresh {
            self.known_failure(key)
                .or_else(|| self.subsumed_failure(goal, &assumptions).then(Vec::new))
        } else {
            None
        };
        let stalled = if fresh && known.is_none() {
            self.known_stall(key, depth)
        } else {
            None
        };
        let (expansion, done) = if depth > limit {
            (
                Expansion::DepthLimited,
                Some(Finished {
                    status: NodeStatus::Pending,
                    deps: vec![],
                }),
            )
        } else if self.path.contains_key(&key) {
            (
                Expansion::Loop,
                Some(Finished {
                    status: NodeStatus::Failed,
                    deps: vec![key],
                }),
            )
        } else if let Some(deps) = known {
            (
                Expansion::KnownFailed,
                Some(Finished {
                    status: NodeStatus::Failed,
                    deps,
                }),
            )
        } else if let Some(deps) = stalled {
            (
                Expansion::KnownPending,
                Some(Finished {
                    status: NodeStatus::Pending,
                    deps,
                }),
            )
        } else if let Some(stop) = self.should_stop() {
            self.stopped = Some(stop);
            (
                Expansion::Unexpanded,
                Some(Finished {
                    status: NodeStatus::Pending,
                    deps: vec![],
                }),
            )
        } else {
            (Expansion::Expanded, None)
        };
        let applications = if done.is_none() {
            self.expanded += 1;
            applicable_applications(&situation, self.config)
        } else {
            Vec::new()
        };
        let status = done.as_ref().map_or(NodeStatus::Open, |d| d.status);
        let alternatives: Vec<NodeId> = (0..applications.len())
            .map(|i| id + 1 + i as NodeId)
            .collect();
        self.nodes.push(Node::Situation(SituationNode {
            id,
            depth,
            situation,
            status,
            expansion,
            alternatives,
        }));
        for (i, application) in applications.into_iter().enumerate() {
            let app_id = id + 1 + i as NodeId;
            self.nodes.push(Node::Application(ApplicationNode {
                id: app_id,
                application,
                status: NodeStatus::Open,
                children: Vec::new(),
            }));
        }
        if done.is_none() {
            self.path.insert(key, depth);
            self.stack.push(Frame::Situation(Open {
                id,
                next: 0,
                key,
                goal,
                assumptions,
                depth,
                deps: Vec::new(),
            }));
        }
        done
    }

    fn should_stop(&self) -> Option<Stop> {
        if self.cancel.is_cancelled() {
            Some(Stop::Cancel)
        } else if Instant::now() >= self.deadline {
            Some(Stop::Time)
        } else if self.budget.is_some_and(|b| self.expanded >= b) {
            Some(Stop::Budget)
        } else {
            None
        }
    }

    /// The path keys a recorded failure of `key` still depends on, or `None`
    /// if it relied on a cut that no longer holds.
    ///
    /// A dependency that has left the path is replaced by its own recorded
    /// failure. Failures that only depend on each other form a cycle with no
    /// well-founded proof, so they stay failed.
    fn known_failure(&self, key: u32) -> Option<Vec<u32>> {
        self.resolve(key, self.memo.failures.get(&key)?)
    }

    /// Like [`Self::known_failure`] for a situation that stalled no deeper
    /// than `depth`.
    fn known_stall(&self, key: u32, depth: u32) -> Option<Vec<u32>> {
        let (at, deps) = self.memo.stalls.get(&key)?;
        if *at > depth {
            return None;
        }
        self.resolve(key, deps)
    }

    fn resolve(&self, key: u32, deps: &[u32]) -> Option<Vec<u32>> {
        let mut on_path = Vec::new();
        let mut seen = vec![key];
        let mut todo = vec![deps];
        while let Some(list) = todo.pop() {
            for &d in list {
                if seen.contains(&d) {
                    continue;
                }
                seen.push(d);
                if self.path.contains_key(&d) {
                    on_path.push(d);
                } else {
                    todo.push(self.memo.failures.get(&d)?);
                }
            }
        }
        Some(on_path)
    }

    fn subsumed_failure(&self, goal: u32, assumptions: &[u32]) -> bool {
        self.memo
            .maximal_failures
            .get(&goal)
            .is_some_and(|sets| sets.iter().any(|set| is_subset(assumptions, set)))
    }

    fn record_maximal_failure(&mut self, goal: u32, assumptions: Vec<u32>) {
        let sets = self.memo.maximal_failures.entry(goal).or_default();
        if sets.iter().any(|set| is_subset(&assumptions, set)) {
            return;
        }
        sets.retain(|set| !is_subset(set, &assumptions));
        sets.push(assumptions);
    }

    fn formula_id(&mut self, text: &str) -> u32 {
        if let Some(&id) = self.memo.formula_ids.get(text) {
            return id;
        }
        let id = self.memo.formula_ids.len() as u32;
        self.memo.formula_ids.insert(text.to_string(), id);
        id
    }

    fn intern(&mut self, key: Key) -> u32 {
        let next = self.memo.key_ids.len() as u32;
        *self.memo.key_ids.entry(key).or_insert(next)
    }

    fn leave_situation(&mut self, status: NodeStatus) {
        let Some(Frame::Situation(open)) = self.stack.pop() else {
            unreachable!("situation frame expected")
        };
        self.set_status(open.id, status);
        self.path.remove(&open.key);
        let mut deps = open.deps;
        deps.retain(|&d| d != open.key);
        match status {
            NodeStatus::Failed => {
                if self
                    .memo
                    .failures
                    .get(&open.key)
                    .is_none_or(|known| known.len() > deps.len())
                {
                    self.memo.failures.insert(open.key, deps.clone());
                }
                if deps.is_empty() {
                    self.record_maximal_failure(open.goal, open.assumptions);
                }
            }
            NodeStatus::Pending if self.stopped.is_none() => {
                let better = self
                    .memo
                    .stalls
                    .get(&open.key)
                    .is_none_or(|(d, known)| (*d, known.len()) > (open.depth, deps.len()));
                if better {
                    self.memo
                        .stalls
                        .insert(open.key, (open.depth, deps.clone()));
                }
            }
            _ => {}
        }
        self.report(Finished { status, deps });
    }

    fn leave_application(&mut self, status: NodeStatus) {
        let Some(Frame::Application { id, .. }) = self.stack.pop() else {
            unreachable!("application frame expected")
        };
        self.set_status(id, status);
    }

    /// Folds a finished child situation into the situation two frames up.
    fn report(&mut self, done: Finished) {
        let n = self.stack.len();
        if n < 2 {
            return;
        }
        if let Frame::Situation(parent) = &mut self.stack[n - 2] {
            if done.status != NodeStatus::Success {
                for d in done.deps {
                    if !parent.deps.contains(&d) {
                        parent.deps.push(d);
                    }
                }
            }
        }
    }

    fn parent_depth(&self) -> u32 {
        match self.stack.iter().rev().nth(1) {
            Some(Frame::Situation(open)) => open.depth,
            _ => unreachable!("application without a situation frame"),
        }
    }

    fn sit(&self, id: NodeId) -> &SituationNode {
        match &self.nodes[id as usize] {
            Node::Situation(s) => s,
            Node::Application(_) => unreachable!(),
        }
    }

    fn app(&self, id: NodeId) -> &ApplicationNode {
        match &self.nodes[id as usize] {
            Node::Application(a) => a,
            Node::Situation(_) => unreachable!(),
        }
    }

    fn status(&self, id: NodeId) -> NodeStatus {
        self.nodes[id as usize].status()
    }

    fn set_status(&mut self, id: NodeId, status: NodeStatus) {
        match &mut self.nodes[id as usize] {
            Node::Situation(s) => s.status = status,
            Node::Application(a) => a.status = status,
        }
    }
}

/// Both sorted.
fn is_subset(small: &[u32], large: &[u32]) -> bool {
    let mut rest = large.iter();
    small.iter().all(|x| rest.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::kernel::RuleId;

    fn run(goal: &str, kb: &[(&str, &str)], config: &ProverConfig) -> ProofResult {
        let kb =
            KnowledgeBase::from_formulas(kb.iter().map(|(l, f)| (*l, parse_formula(f).unwrap())));
        prove(
            &parse_formula(goal).unwrap(),
            &kb,
            config,
            &CancelToken::new(),
        )
    }

    #[test]
    fn identity_is_proved() {
        let r = run("P -> P", &[], &ProverConfig::default());
        assert_eq!(r.outcome, Outcome::Proved);
        assert_eq!(r.version, 1);
        let root = r.tree.root_node();
        let first = r.tree.application(root.alternatives[0]).unwrap();
        assert_eq!(first.application.rule, RuleId::ImplGoal);
        assert!(r.tree.check_all_steps().is_empty());
    }

    #[test]
    fn first_success_leaves_later_alternatives_pending() {
        let r = run("P | Q", &[("H", "P")], &ProverConfig::default());
        assert!(r.is_proved());
        let root = r.tree.root_node();
        let statuses: Vec<_> = root
            .alternatives
            .iter()
            .map(|&a| r.tree.node(a).unwrap().status())
            .collect();
        let first = statuses
            .iter()
            .position(|&s| s == NodeStatus::Success)
            .unwrap();
        assert!(statuses[first + 1..]
            .iter()
            .all(|&s| s == NodeStatus::Pending));
    }

    #[test]
    fn unprovable_atom_fails() {
        let r = run("Q", &[("H", "P")], &ProverConfig::default());
        assert_eq!(r.outcome, Outcome::Failed);
        assert_eq!(r.tree.root_status(), NodeStatus::Failed);
    }

    #[test]
    fn depth_limit_reports_pending() {
        let r = run(
            "A & B",
            &[("H", "A"), ("K", "B")],
            &ProverConfig::default().with_depth_limit(1),
        );
        assert_eq!(r.outcome, Outcome::DepthLimit);
        assert_eq!(r.tree.root_status(), NodeStatus::Pending);
        assert!(r
            .tree
            .situations()
            .any(|s| s.expansion == Expansion::DepthLimited));
    }

    #[test]
    fn cancelled_search_is_interrupted() {
        let cancel = CancelToken::new();
        cancel.cancel();
        let r = prove(
            &parse_formula("P -> P").unwrap(),
            &KnowledgeBase::default(),
            &ProverConfig::default(),
            &cancel,
        );
        assert_eq!(r.outcome, Outcome::Interrupted);
        assert_eq!(r.tree.root_status(), NodeStatus::Pending);
    }

    #[test]
    fn ids_are_preorder_and_sorted() {
        let r = run("(P & Q) -> (Q & P)", &[], &ProverConfig::default());
        assert!(r.is_proved());
        for (i, n) in r.tree.nodes.iter().enumerate() {
            assert_eq!(n.id() as usize, i);
            assert!(n.children().iter().all(|&c| c > n.id()));
        }
    }

    #[test]
    fn search_is_deterministic() {
        let config = ProverConfig::default();
        let a = run("(P -> Q) -> (!Q -> !P)", &[], &config);
        let b = run("(P -> Q) -> (!Q -> !P)", &[], &config);
        assert_eq!(a.tree, b.tree);
        assert_eq!(a.outcome, b.outcome);
    }
}
