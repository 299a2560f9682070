use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use nebfca::{fixtures, WorkspaceDocument};
use nebfca_cli::api::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> axum::Router {
    router(AppState::new(fixtures::demo_workspace(), None))
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or_else(|_| panic!("not JSON: {}", String::from_utf8_lossy(&bytes)));
    (status, value)
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn lists_contexts() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/contexts", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["version"], "v0");
    let ids: Vec<&str> = body["contexts"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec!["catalogue", "documents", "marvel", "reader", "universe"]);
    let (status, body) = call(&app, "GET", "/api/contexts/documents", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["attributes"].as_array().unwrap().len(), 4);
    assert_eq!(body["context"]["objects"].as_array().unwrap().len(), 5);
}

#[tokio::test]
async fn document_lattice() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/contexts/documents/lattice", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["version"], "v0");
    assert_eq!(body["concepts"].as_array().unwrap().len(), 7);
    assert_eq!(body["covers"].as_array().unwrap().len(), 9);
    let top = &body["concepts"][body["top"].as_u64().unwrap() as usize];
    assert_eq!(top["depth"], 0);
    assert!(body["concepts"].as_array().unwrap().iter().any(|c| c["object_labels"] == json!(["plan2.doc"])));

    let (_, ext) = call(&app, "GET", "/api/contexts/universe/lattice?extended=true", None).await;
    assert_eq!(ext["concepts"].as_array().unwrap().len(), 11);
    assert_eq!(ext["extended"], true);
}

#[tokio::test]
async fn query_endpoint() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/contexts/documents/query", Some(json!({"q": "format=postscript"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({"version": "v0", "objects": ["plan1.ps", "plan2.ps"]}));

    let (_, body) = call(
        &app,
        "POST",
        "/api/contexts/universe/query",
        Some(json!({"q": "format=text", "scope": "Plan2"})),
    )
    .await;
    assert_eq!(strings(&body["objects"]), vec!["notes1.txt", "notes2.txt"]);

    let (status, body) = call(&app, "POST", "/api/contexts/documents/query", Some(json!({"q": "format="}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "parse");
    assert_eq!(body["detail"]["offset"], 7);
    assert_eq!(body["version"], "v0");

    let (status, body) = call(&app, "POST", "/api/contexts/documents/query", Some(json!({"q": "format>=1"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "type");

    let (status, body) = call(&app, "POST", "/api/contexts/documents/query", Some(json!({"query": "*"}))).await;
    assert!(status.is_client_error());
    assert_eq!(body["code"], "bad_request");
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let app = app();
    for (method, uri, body) in [
        ("GET", "/api/contexts/nope", None),
        ("GET", "/api/contexts/nope/lattice", None),
        ("POST", "/api/contexts/nope/query", Some(json!({"q": "*"}))),
        ("GET", "/api/contexts/nope/views", None),
        ("POST", "/api/sessions", Some(json!({"context": "nope"}))),
        ("POST", "/api/sessions/999999/neighborhood", Some(json!({"seed": {"object": "plan2.ps"}}))),
        ("POST", "/api/sessions/abc/union", Some(json!({"a": 0, "b": 0}))),
        ("POST", "/api/shared", Some(json!({"spaces": ["nope"]}))),
    ] {
        let (status, value) = call(&app, method, uri, body).await;
        assert_eq!(status, StatusCode::NOT_FOUND, "{uri}");
        assert_eq!(value["code"], "not_found");
        assert!(value["message"].as_str().unwrap().contains("unknown"));
    }
}

#[tokio::test]
async fn views_can_be_added() {
    let app = app();
    let (status, body) = call(&app, "GET", "/api/contexts/universe/views", None).await;
    assert_eq!(status, StatusCode::OK);
    let plan2 = body["views"].as_array().unwrap().iter().find(|v| v["name"] == "Plan2").unwrap();
    assert_eq!(plan2["objects"].as_array().unwrap().len(), 4);

    let (status, body) = call(
        &app,
        "POST",
        "/api/contexts/universe/views",
        Some(json!({"name": "Notes", "scope": ["Document"], "constructor": "format=text"})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(strings(&body["view"]["objects"]), vec!["notes0.txt", "notes1.txt", "notes2.txt"]);
    let (_, body) = call(&app, "GET", "/api/contexts/universe/views", None).await;
    assert_eq!(body["views"].as_array().unwrap().len(), 6);

    let (status, body) = call(
        &app,
        "POST",
        "/api/contexts/universe/views",
        Some(json!({"name": "Notes", "scope": ["Document"], "constructor": "*"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "validation");
    assert_eq!(body["detail"]["violations"][0]["kind"], "duplicate_name");

    let (status, body) = call(
        &app,
        "POST",
        "/api/contexts/universe/views",
        Some(json!({"name": "Loop", "scope": ["Loop"], "constructor": "*"})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["message"].as_str().unwrap().contains("cycle"), "{body}");
}

#[tokio::test]
async fn mutations_are_persisted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ws.json");
    let doc = fixtures::demo_workspace();
    doc.save(&path).unwrap();
    let app = router(AppState::new(doc, Some(path.clone())));
    let (status, _) = call(
        &app,
        "POST",
        "/api/contexts/documents/views",
        Some(json!({"name": "All", "constructor": "*"})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    let saved = WorkspaceDocument::load(&path).unwrap();
    assert_eq!(saved.views("documents").unwrap().len(), 1);
}

#[tokio::test]
async fn browsing_sessions() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/sessions", Some(json!({"context": "documents"}))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["analysis"]["concepts"], 7);
    let id = body["session"].as_u64().unwrap();
    let hood = format!("/api/sessions/{id}/neighborhood");

    let (status, body) = call(&app, "POST", &hood, Some(json!({"seed": {"object": "plan2.ps"}}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["neighborhood"]["concepts"].as_array().unwrap().len(), 4);
    assert_eq!(body["index"], 0);

    let (_, body) = call(
        &app,
        "POST",
        &hood,
        Some(json!({"seed": {"object": "plan2.ps"}, "filters": {"threshold": 2}})),
    )
    .await;
    assert_eq!(body["neighborhood"]["concepts"].as_array().unwrap().len(), 3);

    let (_, body) = call(&app, "POST", &hood, Some(json!({"seed": {"attribute": "format=text"}}))).await;
    assert_eq!(body["neighborhood"]["concepts"].as_array().unwrap().len(), 2);
    assert_eq!(body["index"], 2);

    let (status, body) = call(&app, "POST", &format!("/api/sessions/{id}/union"), Some(json!({"a": 0, "b": 2}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let n = body["neighborhood"]["concepts"].as_array().unwrap().len();
    assert!(n >= 4);
    assert_eq!(body["moved"].as_u64().unwrap() + body["shared"].as_u64().unwrap(), n as u64);

    let (status, body) = call(&app, "POST", &hood, Some(json!({"seed": {"object": "ghost"}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "unknown");
    let (status, body) = call(
        &app,
        "POST",
        &hood,
        Some(json!({"seed": {"object": "plan2.ps"}, "filters": {"threshold": 0}})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "filter");
    let (status, _) = call(&app, "POST", &format!("/api/sessions/{id}/union"), Some(json!({"a": 0, "b": 9}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn faceted_session() {
    let app = app();
    let (status, body) = call(
        &app,
        "POST",
        "/api/sessions",
        Some(json!({
            "context": "documents",
            "facets": [
                {"name": "p", "plan": [{"sort": "project", "scale": "nominal"}]},
                {"name": "f", "plan": [{"sort": "format", "scale": "nominal"}]}
            ]
        })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["attributes"].as_array().unwrap().len(), 4);
    assert_eq!(body["analysis"]["concepts"], 7);
}

#[tokio::test]
async fn shared_spaces() {
    let app = app();
    let (status, body) = call(&app, "POST", "/api/shared", Some(json!({}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(strings(&body["spaces"]), vec!["catalogue", "marvel", "reader"]);
    let m = &body["matrix"];
    let rows = strings(&m["rows"]);
    let cols = strings(&m["columns"]);
    let r = rows.iter().position(|x| x == "marvel/baa-95-18").unwrap();
    let cells = m["cells"][r].as_str().unwrap().as_bytes();
    for class in ["catalogue/Military", "catalogue/Military:ARPA"] {
        let c = cols.iter().position(|x| x == class).unwrap();
        assert_eq!(cells[c], b'X', "{class}");
    }

    let (status, body) = call(
        &app,
        "POST",
        "/api/shared",
        Some(json!({"spaces": ["reader", "marvel"], "links": [{"from": "reader/NuclearWaste", "to": "marvel/Legislative"}]})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["links"].as_array().unwrap().len(), 1);

    let (status, body) = call(
        &app,
        "POST",
        "/api/shared",
        Some(json!({"spaces": ["reader", "marvel"], "links": [
            {"from": "reader/Reader", "to": "marvel/Legislative:House"},
            {"from": "marvel/Legislative", "to": "reader/NuclearWaste"}
        ]})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "cycle");
}

#[tokio::test]
async fn readers_see_consistent_snapshots_under_writes() {
    let state = AppState::new(fixtures::demo_workspace(), None);
    let app = router(Arc::clone(&state));
    let mut handles = Vec::new();
    for i in 0..8 {
        let app = app.clone();
        handles.push(tokio::spawn(async move {
            call(
                &app,
                "POST",
                "/api/contexts/documents/views",
                Some(json!({"name": format!("V{i}"), "scope": if i == 0 { json!([]) } else { json!(["V0"]) }, "constructor": "*"})),
            )
            .await
        }));
    }
    for _ in 0..8 {
        let (status, _) = call(&app, "GET", "/api/contexts/documents/views", None).await;
        assert_eq!(status, StatusCode::OK);
    }
    let mut created = 0;
    for h in handles {
        if h.await.unwrap().0 == StatusCode::CREATED {
            created += 1;
        }
    }
    let views = state.snapshot().views("documents").unwrap().len();
    assert_eq!(views, created);
    assert!(state.snapshot().system("documents").is_ok());
}
