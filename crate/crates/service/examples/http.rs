//! Serve the bundled documents on a free port and walk through the API.
//!
//!     cargo run -p prooftutor-service --example http

use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};

use prooftutor_service::api::{router, AppState};
use prooftutor_service::library::Library;
use prooftutor_service::store::ProofStore;
use prooftutor_service::tasks::TaskManager;

async fn call(addr: std::net::SocketAddr, method: &str, path: &str, body: Option<Value>) -> (u16, Value) {
    let body = body.map(|b| b.to_string()).unwrap_or_default();
    let request = format!(
        "{method} {path} HTTP/1.1\r\nhost: {addr}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
        body.len()
    );
    let mut stream = TcpStream::connect(addr).await.expect("connect");
    stream.write_all(request.as_bytes()).await.expect("send");
    let mut raw = String::new();
    stream.read_to_string(&mut raw).await.expect("receive");
    let (head, payload) = raw.split_once("\r\n\r\n").expect("response");
    let status = head.split(' ').nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    (status, serde_json::from_str(payload).unwrap_or(Value::Null))
}

#[tokio::main]
async fn main() {
    let data = tempfile::tempdir().expect("temp dir");
    let store = Arc::new(ProofStore::open(data.path()).expect("store"));
    let state = AppState { library: Arc::new(Library::bundled()), tasks: Arc::new(TaskManager::new(store, 2)) };
    let listener = TcpListener::bind("127.0.0.1:0").await.expect("bind");
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(state)).await });
    println!("serving on http://{addr}");

    let (_, docs) = call(addr, "GET", "/documents", None).await;
    println!("GET /documents -> {docs}");
    let (_, rules) = call(addr, "GET", "/rules", None).await;
    println!("GET /rules -> {} rules", rules.as_array().map_or(0, Vec::len));

    let goal = json!({ "document": "intro", "environment": "Split", "label": "1" });
    let selection: Vec<Value> = (1..=3).map(|i| json!({ "document": "intro", "environment": "Cases", "label": i.to_string() })).collect();
    let (status, accepted) = call(addr, "POST", "/prove", Some(json!({ "goal": goal, "selection": selection }))).await;
    println!("POST /prove -> {status} {accepted}");

    let task_path = format!("/tasks/{}", accepted["task_id"].as_str().unwrap());
    let task = loop {
        let (_, task) = call(addr, "GET", &task_path, None).await;
        if task["state"] == "Done" {
            break task;
        }
        tokio::time::sleep(Duration::from_millis(20)).await;
    };
    println!("GET {task_path} -> {}", task["result"]);

    let link = task["result"]["link"].as_str().unwrap();
    let (_, prose) = call(addr, "GET", &format!("{link}?view=prose"), None).await;
    println!("GET {link}?view=prose -> {}", serde_json::to_string_pretty(&prose).unwrap());
    let (status, simplified) = call(addr, "POST", &format!("{link}/simplify"), None).await;
    println!("POST {link}/simplify -> {status}, {} nodes", simplified["tree"]["nodes"].as_array().map_or(0, Vec::len));
}
