use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use prooftutor::document::FormulaRef;
use prooftutor::search::{prove, CancelToken, Outcome, ProverConfig, SearchStats};

use crate::library::Prepared;
use crate::store::{proof_key, ProofRecord, ProofStore};

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TaskState {
    Queued,
    Running,
    Done,
    Cancelled,
}

/// What a finished task reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
    pub key: String,
    /// Absent when the proof could not be stored.
    pub version: Option<u32>,
    pub link: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A snapshot of one prove task.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProveTask {
    pub task_id: String,
    pub goal_ref: FormulaRef,
    pub selection: Vec<FormulaRef>,
    pub config: serde_json::Value,
    pub state: TaskState,
    pub created_at: u64,
    pub finished_at: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<TaskResult>,
}

impl ProveTask {
    pub fn is_finished(&self) -> bool {
        matches!(self.state, TaskState::Done | TaskState::Cancelled)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterruptError {
    #[error("no task {0}")]
    Unknown(String),
    #[error("task {0} has already finished")]
    Finished(String),
}

struct Job {
    prepared: Prepared,
    config: ProverConfig,
}

struct Entry {
    task: ProveTask,
    job: Option<Job>,
    cancel: CancelToken,
}

#[derive(Default)]
struct Board {
    next_id: u64,
    entries: HashMap<String, Entry>,
    queue: VecDeque<String>,
    shutdown: bool,
}

struct Shared {
    board: Mutex<Board>,
    /// Signalled when work is queued or a task changes state.
    changed: Condvar,
    store: Arc<ProofStore>,
}

impl Shared {
    fn board(&self) -> MutexGuard<'_, Board> {
        self.board.lock().unwrap_or_else(|e| e.into_inner())
    }
}

/// FIFO queue of prove tasks served by a fixed pool of worker threads.
pub struct TaskManager {
    shared: Arc<Shared>,
    workers: Vec<JoinHandle<()>>,
}

impl TaskManager {
    pub fn new(store: Arc<ProofStore>, workers: usize) -> Self {
        let shared = Arc::new(Shared { board: Mutex::new(Board::default()), changed: Condvar::new(), store });
        let workers = (0..workers.max(1))
            .map(|i| {
                let shared = Arc::clone(&shared);
                std::thread::Builder::new()
                    .name(format!("prove-worker-{i}"))
                    .spawn(move || work(&shared))
                    .expect("worker thread")
            })
            .collect();
        Self { shared, workers }
    }

    pub fn store(&self) -> &Arc<ProofStore> {
        &self.shared.store
    }

    pub fn submit(&self, goal_ref: FormulaRef, prepared: Prepared, config: ProverConfig) -> String {
        let mut board = self.shared.board();
        board.next_id += 1;
        let task_id = format!("task-{}", board.next_id);
        let task = ProveTask {
            task_id: task_id.clone(),
            goal_ref,
            selection: prepared.selection.iter().cloned().collect(),
            config: serde_json::from_str(&config.to_json()).expect("config JSON"),
            state: TaskState::Queued,
            created_at: now_ms(),
            finished_at: None,
            result: None,
        };
        let entry = Entry { task, job: Some(Job { prepared, config }), cancel: CancelToken::new() };
        board.entries.insert(task_id.clone(), entry);
        board.queue.push_back(task_id.clone());
        self.shared.changed.notify_all();
        task_id
    }

    pub fn get(&self, task_id: &str) -> Option<ProveTask> {
        self.shared.board().entries.get(task_id).map(|e| e.task.clone())
    }

    /// Cancels a queued task at once, or asks a running one to stop.
    pub fn interrupt(&self, task_id: &str) -> Result<ProveTask, InterruptError> {
        let mut board = self.shared.board();
        let entry = board.entries.get_mut(task_id).ok_or_else(|| InterruptError::Unknown(task_id.to_string()))?;
        match entry.task.state {
            TaskState::Done | TaskState::Cancelled => Err(InterruptError::Finished(task_id.to_string())),
            TaskState::Running => {
                entry.cancel.cancel();
                Ok(entry.task.clone())
            }
            TaskState::Queued => {
                entry.cancel.cancel();
                entry.job = None;
                entry.task.state = TaskState::Cancelled;
                entry.task.finished_at = Some(now_ms());
                let task = entry.task.clone();
                board.queue.retain(|id| id != task_id);
                self.shared.changed.notify_all();
                Ok(task)
            }
        }
    }

    /// Blocks until the task has finished or `timeout` passes.
    pub fn wait(&self, task_id: &str, timeout: Duration) -> Option<ProveTask> {
        let deadline = Instant::now() + timeout;
        let mut board = self.shared.board();
        loop {
            let task = board.entries.get(task_id)?.task.clone();
            let left = deadline.saturating_duration_since(Instant::now());
            if task.is_finished() || left.is_zero() {
                return Some(task);
            }
            board = self.shared.changed.wait_timeout(board, left).unwrap_or_else(|e| e.into_inner()).0;
        }
    }

    /// Blocks until the task is no longer queued.
    pub fn wait_started(&self, task_id: &str, timeout: Duration) -> Option<ProveTask> {
        let deadline = Instant::now() + timeout;
        let mut board = self.shared.board();
        loop {
            let task = board.entries.get(task_id)?.task.clone();
            let left = deadline.saturating_duration_since(Instant::now());
            if task.state != TaskState::Queued || left.is_zero() {
                return Some(task);
            }
            board = self.shared.changed.wait_timeout(board, left).unwrap_or_else(|e| e.into_inner()).0;
        }
    }
}

impl Drop for TaskManager {
    fn drop(&mut self) {
        {
            let mut board = self.shared.board();
            board.shutdown = true;
            for e in board.entries.values() {
                e.cancel.cancel();
            }
        }
        self.shared.changed.notify_all();
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

fn work(shared: &Shared) {
    loop {
        let (task_id, job, cancel, goal_ref) = {
            let mut board = shared.board();
            loop {
                if board.shutdown {
                    return;
                }
                if let Some(id) = board.queue.pop_front() {
                    let entry = board.entries.get_mut(&id).expect("queued task exists");
                    if let Some(job) = entry.job.take() {
                        entry.task.state = TaskState::Running;
                        let picked = (id, job, entry.cancel.clone(), entry.task.goal_ref.clone());
                        shared.changed.notify_all();
                        break picked;
                    }
                    continue;
                }
                board = shared.changed.wait(board).unwrap_or_else(|e| e.into_inner());
            }
        };

        let Job { prepared, config } = job;
        let result = prove(&prepared.goal, &prepared.kb, &config, &cancel);
        let key = proof_key(&prepared.goal, &prepared.selection);
        let (outcome, stats) = (result.outcome, result.stats.clone());
        let record = ProofRecord {
            key: key.clone(),
            version: 0,
            goal_ref,
            goal: prepared.goal,
            selection: prepared.selection.into_iter().collect(),
            kb: prepared.kb,
            config: serde_json::from_str(&config.to_json()).expect("config JSON"),
            result,
            created_at: now_ms(),
        };
        let summary = match shared.store.append(record) {
            Ok(stored) => TaskResult { outcome, stats, key, version: Some(stored.version), link: Some(stored.link()), error: None },
            Err(e) => TaskResult { outcome, stats, key, version: None, link: None, error: Some(e.to_string()) },
        };

        let mut board = shared.board();
        if let Some(entry) = board.entries.get_mut(&task_id) {
            entry.task.state = TaskState::Done;
            entry.task.finished_at = Some(now_ms());
            entry.task.result = Some(summary);
        }
        shared.changed.notify_all();
    }
}
