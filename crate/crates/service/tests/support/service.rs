use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use prooftutor_service::api::{router, AppState};
use prooftutor_service::library::Library;
use prooftutor_service::store::ProofStore;
use prooftutor_service::tasks::TaskManager;

/// The service over the bundled documents with a throwaway proof store.
pub struct TestService {
    pub router: Router,
    _data: tempfile::TempDir,
}

impl TestService {
    pub fn new(workers: usize) -> Self {
        let data = tempfile::tempdir().expect("temp dir");
        let store = ProofStore::open(data.path()).expect("store");
        let state = AppState { library: Arc::new(Library::bundled()), tasks: Arc::new(TaskManager::new(Arc::new(store), workers)) };
        Self { router: router(state), _data: data }
    }

    pub async fn raw(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
        let mut req = Request::builder().method(method).uri(uri);
        let body = match body {
            Some(v) => {
                req = req.header("content-type", "application/json");
                Body::from(v.to_string())
            }
            None => Body::empty(),
        };
        let resp = self.router.clone().oneshot(req.body(body).unwrap()).await.unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        (status, bytes)
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, bytes) = self.raw(method, uri, body).await;
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    pub async fn submit(&self, body: Value) -> String {
        let (status, v) = self.call(Method::POST, "/prove", Some(body)).await;
        assert_eq!(status, StatusCode::ACCEPTED, "{v}");
        v["task_id"].as_str().unwrap().to_string()
    }

    /// Polls until the task has left the queue and finished, or `timeout` passes.
    pub async fn poll(&self, task_id: &str, timeout: Duration) -> Value {
        let start = Instant::now();
        loop {
            let (status, v) = self.call(Method::GET, &format!("/tasks/{task_id}"), None).await;
            assert_eq!(status, StatusCode::OK);
            let state = v["state"].as_str().unwrap();
            if state == "Done" || state == "Cancelled" || start.elapsed() > timeout {
                return v;
            }
            tokio::time::sleep(Duration::from_millis(10)).await;
        }
    }

    pub async fn poll_until_running(&self, task_id: &str, timeout: Duration) -> Value {
        let start = Instant::now();
        loop {
            let (_, v) = self.call(Method::GET, &format!("/tasks/{task_id}"), None).await;
            if v["state"] != "Queued" || start.elapsed() > timeout {
                return v;
            }
            tokio::time::sleep(Duration::from_millis(5)).await;
        }
    }
}

pub fn formula_ref(document: &str, env: &str, label: &str) -> Value {
    serde_json::json!({ "document": document, "environment": env, "label": label })
}
