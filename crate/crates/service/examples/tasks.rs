//! Queue prove tasks, interrupt one and read the stored versions back.
//!
//!     cargo run -p prooftutor-service --example tasks

use std::sync::Arc;
use std::time::Duration;

use prooftutor::document::FormulaRef;
use prooftutor::search::ProverConfig;
use prooftutor_service::library::Library;
use prooftutor_service::store::ProofStore;
use prooftutor_service::tasks::TaskManager;

fn main() {
    let data = tempfile::tempdir().expect("temp dir");
    let store = Arc::new(ProofStore::open(data.path()).expect("store"));
    let tasks = TaskManager::new(Arc::clone(&store), 2);
    let library = Library::bundled();

    let submit = |goal: FormulaRef, config: ProverConfig| {
        let selection = library.auto_selection(&goal);
        let prepared = library.prepare(&goal, &selection).expect("goal resolves");
        tasks.submit(goal, prepared, config)
    };

    let socrates = FormulaRef::new("intro", "Socrates", "2");
    let first = submit(socrates.clone(), ProverConfig::default());
    let second = submit(socrates, ProverConfig::default());
    let stress = submit(FormulaRef::new("stress", "Deep", "1"), ProverConfig::default().with_time_limit_ms(60_000));

    for id in [&first, &second] {
        let task = tasks.wait(id, Duration::from_secs(10)).expect("known task");
        let result = task.result.expect("finished");
        println!("{id}: {:?} {:?}, version {:?} at {}", task.state, result.outcome, result.version, result.link.unwrap_or_default());
    }

    tasks.wait_started(&stress, Duration::from_secs(10));
    std::thread::sleep(Duration::from_millis(200));
    tasks.interrupt(&stress).expect("still running");
    let task = tasks.wait(&stress, Duration::from_secs(10)).expect("known task");
    let result = task.result.expect("finished");
    println!("{stress}: {:?} {:?} after {} expansions", task.state, result.outcome, result.stats.nodes_expanded);

    let record = store.get(&result.key, result.version.unwrap()).unwrap().expect("stored");
    println!("stored {} nodes for {} with {} knowledge-base entries", record.result.tree.len(), record.goal, record.kb.len());
}
