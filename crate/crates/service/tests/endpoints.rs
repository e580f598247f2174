use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use tailor_core::fixtures::{self, CylinderSpec};
use tailor_core::io::save_document;
use tailor_service::{router, AppState};

async fn call(app: &Router, method: Method, uri: &str, body: impl Into<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .body(Body::from(body.into()))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn session(app: &Router) -> (String, Value) {
    let doc = fixtures::two_part_cylinder(CylinderSpec::default(), 2);
    let (status, body) = call(app, Method::POST, "/sessions", save_document(&doc)).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    (body["id"].as_str().unwrap().to_string(), body)
}

fn shorten(distance: f64) -> Value {
    json!({"kind": "shorten", "boundary": {"pick": [0.0, 0.0, -1.0]}, "distance": distance})
}

fn scale(factor: f64) -> Value {
    json!({
        "kind": "scale_region",
        "region": {"triangles": [0, 1, 2, 3]},
        "mode": "perpendicular",
        "factor": factor,
    })
}

#[tokio::test]
async fn healthz_answers() {
    let app = router(AppState::default());
    let (status, body) = call(&app, Method::GET, "/healthz", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}

#[tokio::test]
async fn create_summarizes_the_document() {
    let app = router(AppState::default());
    let (_, body) = session(&app).await;
    assert_eq!(body["revision"], 0);
    assert_eq!(body["panels"].as_array().unwrap().len(), 2);
    assert_eq!(body["seams"].as_array().unwrap().len(), 3);
    assert_eq!(body["boundaries"].as_array().unwrap().len(), 2);
    assert!(body["symmetry"].is_null());
    assert_eq!(body["hash"].as_str().unwrap().len(), 64);
}

#[tokio::test]
async fn bad_documents_are_rejected() {
    let app = router(AppState::default());
    let (status, body) = call(&app, Method::POST, "/sessions", "{\"version\": ").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "ParseError");

    let doc = fixtures::flat_square(1.0, 2);
    let mut value: Value = serde_json::from_str(&save_document(&doc)).unwrap();
    value["panels"][0]["triangles"] = json!([0, 1, 2]);
    let (status, body) = call(&app, Method::POST, "/sessions", value.to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "ValidationError", "{body}");
    assert!(body["entity"].as_str().unwrap().contains("panel 0"));
}

#[tokio::test]
async fn state_filters_and_checks_revision() {
    let app = router(AppState::default());
    let (id, _) = session(&app).await;
    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}/state?what=pattern"), "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["panels"].as_array().unwrap().len(), 2);
    assert!(body.get("garment").is_none());
    assert_eq!(body["layout"].as_array().unwrap().len(), 2);

    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}/state?what=garment&revision=0"), "").await;
    assert_eq!(status, StatusCode::OK);
    assert!(body["garment"]["vertices"].is_array());
    assert!(body.get("panels").is_none());

    let (status, body) = call(&app, Method::GET, &format!("/sessions/{id}/state?revision=3"), "").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "StaleRevision");

    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/state?what=mesh"), "").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = router(AppState::default());
    let (status, body) = call(&app, Method::GET, "/sessions/nope/state", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "SessionNotFound");
    let (status, _) = call(&app, Method::POST, "/sessions/nope/undo", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn ops_report_deltas_and_traces() {
    let app = router(AppState::default());
    let (id, created) = session(&app).await;
    let uri = format!("/sessions/{id}/ops");

    let (status, body) = call(&app, Method::POST, &uri, json!({"op": scale(1.0), "revision": 0}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 1);
    assert_eq!(body["hash"], created["hash"]);
    assert!(body["changes"]["vertex_ranges"].as_array().unwrap().is_empty());
    assert!(body["changes"]["panels"].as_array().unwrap().is_empty());
    for solve in body["solves"].as_array().unwrap() {
        assert_eq!(solve["iterations"], 0);
        assert_eq!(solve["energy_trace"].as_array().unwrap().len(), 1);
    }

    let (status, body) = call(&app, Method::POST, &uri, json!({"op": scale(1.2)}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 2);
    assert_eq!(body["changes"]["topology_changed"], false);
    assert!(!body["changes"]["panels"].as_array().unwrap().is_empty());
    let trace = body["solves"][0]["energy_trace"].as_array().unwrap();
    assert!(trace.len() >= 2);
    let energies: Vec<f64> = trace.iter().map(|e| e.as_f64().unwrap()).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-12));

    let (status, body) = call(&app, Method::POST, &uri, json!({"op": shorten(0.25)}).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["changes"]["topology_changed"], true);
    assert!(body["changes"]["garment"]["vertices"].is_array());
}

#[tokio::test]
async fn op_errors_are_422_and_leave_state() {
    let app = router(AppState::default());
    let (id, created) = session(&app).await;
    let uri = format!("/sessions/{id}/ops");
    let op = json!({"kind": "move_seam", "seam": 9, "mode": "along", "offset": 0.1});
    let (status, body) = call(&app, Method::POST, &uri, json!({"op": op}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "SeamNotFound");
    assert_eq!(body["entity"], "seam 9");

    let (status, body) = call(&app, Method::POST, &uri, json!({"op": shorten(-1.0)}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "InvalidDistance");

    let (status, body) = call(&app, Method::POST, &uri, json!({"op": scale(1.0), "mirror": true}).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["entity"], "symmetry");

    let (status, body) = call(&app, Method::POST, &uri, "{\"op\": {\"kind\": \"twist\"}}").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "ParseError");

    let (_, state) = call(&app, Method::GET, &format!("/sessions/{id}/state"), "").await;
    assert_eq!(state["revision"], 0);
    assert_eq!(state["hash"], created["hash"]);
}

#[tokio::test]
async fn stale_op_is_409() {
    let app = router(AppState::default());
    let (id, _) = session(&app).await;
    let uri = format!("/sessions/{id}/ops");
    let (status, _) = call(&app, Method::POST, &uri, json!({"op": scale(1.1), "revision": 0}).to_string()).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = call(&app, Method::POST, &uri, json!({"op": scale(1.1), "revision": 0}).to_string()).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "StaleRevision");
}

#[tokio::test]
async fn undo_replays_and_keeps_layout() {
    let app = router(AppState::default());
    let (id, created) = session(&app).await;
    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "EmptyHistory");

    let offsets = json!({"offsets": [[5.0, 1.0], [-3.0, 2.5]]});
    let (status, body) = call(&app, Method::PUT, &format!("/sessions/{id}/layout"), offsets.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 0);

    let uri = format!("/sessions/{id}/ops");
    call(&app, Method::POST, &uri, json!({"op": scale(1.3)}).to_string()).await;
    let (_, after_first) = call(&app, Method::GET, &format!("/sessions/{id}/state"), "").await;
    call(&app, Method::POST, &uri, json!({"op": scale(0.8)}).to_string()).await;

    let (status, body) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["revision"], 3);
    assert_eq!(body["hash"], after_first["hash"]);

    let (_, body) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), "").await;
    assert_eq!(body["hash"], created["hash"]);
    let (_, state) = call(&app, Method::GET, &format!("/sessions/{id}/state?what=pattern"), "").await;
    assert_eq!(state["layout"], json!([[5.0, 1.0], [-3.0, 2.5]]));
}

#[tokio::test]
async fn layout_must_match_panel_count() {
    let app = router(AppState::default());
    let (id, _) = session(&app).await;
    let (status, body) = call(&app, Method::PUT, &format!("/sessions/{id}/layout"), "{\"offsets\": [[0, 0]]}").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["code"], "InvalidLayout");
}
