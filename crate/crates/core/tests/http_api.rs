use std::sync::Arc;

use antdesign::http::router;
use antdesign::service::{SessionService, SnapshotPayload};
use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[tokio::test]
async fn designer_round_trip() {
    let app = router(Arc::new(SessionService::new()));
    let create = json!({
        "problem": {"generate": {"attributes": 16, "methods": 15, "uses": 39, "classes": 5, "seed": 1}},
        "seed": 42,
        "params": {"colonySize": 20}
    });
    let (status, body) = call(&app, Method::POST, "/sessions", Some(create)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let id = json(&body)["id"].as_str().unwrap().to_string();

    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/start"), None).await;
    assert_eq!(status, StatusCode::OK);
    let snap: SnapshotPayload = serde_json::from_str(&body).unwrap();
    assert!(snap.awaiting);
    assert!(snap.iteration <= 15);
    let candidate = snap.candidate.unwrap();
    assert_eq!(candidate.classes.len(), 5);
    let class = candidate.classes.iter().position(|c| !c.attributes.is_empty() || !c.methods.is_empty()).unwrap();

    let uri = format!("/sessions/{id}/interactions");
    let (status, body) = call(&app, Method::POST, &uri, Some(json!({"kind": "freeze", "class": class}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(json(&body)["staged"], true);
    let (status, _) = call(&app, Method::POST, &uri, Some(json!({"kind": "archive"}))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = call(&app, Method::POST, &uri, Some(json!({"kind": "rating", "value": 0}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    let (status, body) = call(&app, Method::POST, &uri, Some(json!({"kind": "rating", "value": 70}))).await;
    assert_eq!(status, StatusCode::OK);
    let ack = json(&body);
    assert_eq!(ack["staged"], false);
    assert_eq!(ack["awaiting"], true);

    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}/snapshot"), None).await;
    let snap: SnapshotPayload = serde_json::from_str(&body).unwrap();
    assert_eq!(snap.interactions, 1);
    assert!(snap.candidate.unwrap().classes[class].frozen);

    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}/archive"), None).await;
    assert_eq!(json(&body).as_array().unwrap().len(), 1);

    let (status, _) = call(&app, Method::POST, &uri, Some(json!({"kind": "halt"}))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::POST, &uri, Some(json!({"kind": "rating", "value": 50}))).await;
    assert_eq!(status, StatusCode::CONFLICT);

    let (_, ndjson) = call(&app, Method::GET, &format!("/sessions/{id}/log"), None).await;
    assert_eq!(ndjson.lines().filter(|l| l.contains("\"type\":\"interaction\"")).count(), 2);
    let (_, csv) = call(&app, Method::GET, &format!("/sessions/{id}/log?format=csv"), None).await;
    assert!(csv.starts_with("type,runId,iteration"));

    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(json(&body)["status"], "halted");
}

#[tokio::test]
async fn errors_map_to_status_codes() {
    let app = router(Arc::new(SessionService::new()));
    let (status, body) = call(&app, Method::GET, "/sessions/nope/snapshot", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(json(&body)["error"].as_str().unwrap().contains("nope"));

    let bad = json!({"problem": {"generate": {"attributes": 1, "methods": 1, "uses": 5, "classes": 1, "seed": 1}}, "seed": 1});
    let (status, _) = call(&app, Method::POST, "/sessions", Some(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let ok = json!({"problem": {"generate": {"attributes": 4, "methods": 3, "uses": 6, "classes": 2, "seed": 1}}, "seed": 1});
    let (_, body) = call(&app, Method::POST, "/sessions", Some(ok)).await;
    let id = json(&body)["id"].as_str().unwrap().to_string();
    let uri = format!("/sessions/{id}/interactions");
    let (status, _) = call(&app, Method::POST, &uri, Some(json!({"kind": "rating", "value": 50}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}
