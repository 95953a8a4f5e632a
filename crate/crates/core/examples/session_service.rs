//! Drives the HTTP API in-process the way a browser front end would:
//! create, start, freeze, rate, inspect, halt.
//!
//! Pass `--listen ADDR` to serve the API for real instead.

use std::sync::Arc;

use antdesign::http::router;
use antdesign::service::SessionService;
use axum::body::Body;
use axum::http::{Method, Request};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn send(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or(Body::empty(), |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    println!("{status} {uri}");
    value
}

#[tokio::main]
async fn main() {
    let args: Vec<String> = std::env::args().collect();
    if let Some(i) = args.iter().position(|a| a == "--listen") {
        let addr = args.get(i + 1).map_or("127.0.0.1:8080", String::as_str);
        println!("listening on http://{addr}");
        antdesign::http::serve(addr).await.unwrap();
        return;
    }

    let app = router(Arc::new(SessionService::new()));
    let handle = send(&app, Method::POST, "/sessions", Some(json!({
        "problem": {"generate": {"attributes": 16, "methods": 15, "uses": 39, "classes": 5, "seed": 1}},
        "seed": 7,
    })))
    .await;
    let id = handle["id"].as_str().unwrap().to_string();
    let base = format!("/sessions/{id}");

    let snap = send(&app, Method::POST, &format!("{base}/start"), None).await;
    println!("  iteration {}, candidate metrics {}", snap["iteration"], snap["candidate"]["metrics"]);
    for class in snap["candidate"]["classes"].as_array().unwrap() {
        println!(
            "  class {}: cohesion {:.2} {} {} {}",
            class["index"],
            class["cohesion"].as_f64().unwrap(),
            class["tier"],
            class["attributes"],
            class["methods"]
        );
    }

    let interactions = format!("{base}/interactions");
    send(&app, Method::POST, &interactions, Some(json!({"kind": "freeze", "class": 0}))).await;
    send(&app, Method::POST, &interactions, Some(json!({"kind": "archive"}))).await;
    let ack = send(&app, Method::POST, &interactions, Some(json!({"kind": "rating", "value": 64}))).await;
    println!("  ack {ack}");

    let snap = send(&app, Method::GET, &format!("{base}/snapshot"), None).await;
    println!("  now at iteration {}, weights {}", snap["iteration"], snap["weights"]);
    send(&app, Method::POST, &interactions, Some(json!({"kind": "halt"}))).await;
    let archive = send(&app, Method::GET, &format!("{base}/archive"), None).await;
    println!("  archive holds {} design(s)", archive.as_array().unwrap().len());
}
