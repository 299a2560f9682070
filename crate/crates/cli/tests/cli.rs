use std::path::Path;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use nebfca::fixtures;
use nebfca_cli::api::{router, AppState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn nebfca(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nebfca"))
        .env("NEBFCA_WORKSPACE", ws)
        .env_remove("NEBFCA_CONTEXT")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn lines(o: &Output) -> Vec<String> {
    stdout(o).lines().map(str::to_string).collect()
}

fn documents_workspace(dir: &Path) -> std::path::PathBuf {
    let ws = dir.join("docs.json");
    let records = dir.join("documents.records");
    std::fs::write(&records, fixtures::DOCUMENTS_RECORDS).unwrap();
    let o = nebfca(&ws, &["ingest", records.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    ws
}

#[test]
fn query_prints_matching_objects() {
    let dir = tempfile::tempdir().unwrap();
    let ws = documents_workspace(dir.path());
    let o = nebfca(&ws, &["query", "project=plan2 & format=text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(lines(&o), vec!["notes1.txt", "notes2.txt"]);
}

#[test]
fn lattice_formats() {
    let dir = tempfile::tempdir().unwrap();
    let ws = documents_workspace(dir.path());
    let o = nebfca(&ws, &["lattice", "--format", "cxt"]);
    assert_eq!(
        stdout(&o),
        "B\n\n5\n4\n\nplan1.ps\nplan2.ps\nplan2.doc\nnotes1.txt\nnotes2.txt\n\
         project=plan1\nproject=plan2\nformat=postscript\nformat=text\n\
         X.X.\n.XX.\n.X..\n.X.X\n.X.X\n"
    );
    let o = nebfca(&ws, &["lattice"]);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["concepts"].as_array().unwrap().len(), 7);
    assert_eq!(doc["covers"].as_array().unwrap().len(), 9);
    let o = nebfca(&ws, &["lattice", "--format", "dot"]);
    assert_eq!(stdout(&o).matches(" -> ").count(), 9);
}

#[test]
fn views_and_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("demo.json");
    assert!(nebfca(&ws, &["init", "--demo"]).status.success());
    let o = nebfca(&ws, &["-c", "universe", "view", "resolve", "Plan2"]);
    assert_eq!(lines(&o), vec!["plan2.ps", "plan2.doc", "notes1.txt", "notes2.txt"]);
    let o = nebfca(
        &ws,
        &["-c", "universe", "view", "add", "Notes", "--scope", "Document", "--constructor", "format=text"],
    );
    assert!(o.status.success());
    let o = nebfca(&ws, &["-c", "universe", "view", "list"]);
    assert!(lines(&o).contains(&"Notes\tDocument\tformat=text\t3".to_string()), "{}", stdout(&o));
    let o = nebfca(&ws, &["-c", "universe", "view", "add", "Notes", "--scope", "Document"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("defined more than once"));
}

#[test]
fn sharing_commands() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("demo.json");
    assert!(nebfca(&ws, &["init", "--demo"]).status.success());
    let o = nebfca(&ws, &["share", "resolve", "reader/NuclearWaste"]);
    assert_eq!(lines(&o).len(), 4);
    let o = nebfca(&ws, &["share", "link", "reader/NuclearWaste", "marvel/Judiciary"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nebfca(&ws, &["share", "resolve", "reader/NuclearWaste"]);
    assert!(lines(&o).contains(&"marvel/court-waste-compact".to_string()));
    let o = nebfca(&ws, &["share", "compose", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["spaces"], json!(["catalogue", "marvel", "reader"]));
    let o = nebfca(&ws, &["share", "link", "reader/NuclearWaste", "reader/Reader"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn browse_counts() {
    let dir = tempfile::tempdir().unwrap();
    let ws = documents_workspace(dir.path());
    for (args, n) in [
        (vec!["browse", "--seed", "plan2.ps"], 4),
        (vec!["browse", "--seed", "plan2.ps", "--threshold", "2"], 3),
        (vec!["browse", "--seed", "format=text"], 2),
    ] {
        let o = nebfca(&ws, &args);
        let v: Value = serde_json::from_str(&stdout(&nebfca(&ws, &[args.as_slice(), &["--json"]].concat()))).unwrap();
        assert_eq!(v["concepts"].as_array().unwrap().len(), n, "{args:?}");
        assert_eq!(lines(&o).len(), n + 1);
    }
}

#[test]
fn ingest_directory_with_rules() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("files");
    for (p, body) in [("plan1/plan1.ps", "%!"), ("plan2/plan2.ps", "%!"), ("plan2/notes1.txt", "n")] {
        let f = tree.join(p);
        std::fs::create_dir_all(f.parent().unwrap()).unwrap();
        std::fs::write(f, body).unwrap();
    }
    let rules = dir.path().join("rules.toml");
    std::fs::write(&rules, "[[rule]]\ntag = \"project\"\nsegment = 0\n").unwrap();
    let ws = dir.path().join("ws.json");
    let o = nebfca(&ws, &["ingest", tree.to_str().unwrap(), "--rules", rules.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = nebfca(&ws, &["query", "project=plan2 & extension=txt"]);
    assert_eq!(lines(&o), vec!["plan2/notes1.txt"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = documents_workspace(dir.path());
    let o = nebfca(&ws, &["query", "format=&"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("query := "));
    assert_eq!(nebfca(&ws, &["query", "colour=red"]).status.code(), Some(1));
    assert_eq!(nebfca(&ws, &["no-such-command"]).status.code(), Some(2));
    assert_eq!(nebfca(&ws, &["browse"]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(nebfca(&missing, &["query", "*"]).status.code(), Some(1));
    let o = nebfca(&ws, &["init"]);
    assert_eq!(o.status.code(), Some(1));
}

async fn api(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Value {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    serde_json::from_slice(&res.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

#[tokio::test]
async fn cli_and_api_agree() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path().join("demo.json");
    assert!(nebfca(&ws, &["init", "--demo"]).status.success());
    let app = router(AppState::new(nebfca::WorkspaceDocument::load(&ws).unwrap(), None));

    let queries = [
        ("documents", "project=plan2 & format=text"),
        ("documents", "format=postscript"),
        ("documents", "*"),
        ("universe", "project=plan1"),
        ("marvel", "subject~/nuclear waste/"),
        ("marvel", "class~/^Military/"),
        ("marvel", "published-by=\"Department of Energy\""),
    ];
    for (context, q) in queries {
        let cli = lines(&nebfca(&ws, &["-c", context, "query", q]));
        let body = api(&app, "POST", &format!("/api/contexts/{context}/query"), Some(json!({ "q": q }))).await;
        let via_api: Vec<String> = serde_json::from_value(body["objects"].clone()).unwrap();
        assert_eq!(cli, via_api, "{context}: {q}");
    }

    for context in ["documents", "universe", "marvel"] {
        let cli: Value = serde_json::from_str(&stdout(&nebfca(&ws, &["-c", context, "lattice"]))).unwrap();
        let mut body = api(&app, "GET", &format!("/api/contexts/{context}/lattice"), None).await;
        let obj = body.as_object_mut().unwrap();
        for k in ["version", "context", "extended"] {
            obj.remove(k);
        }
        assert_eq!(cli, body, "{context} lattice");
    }

    let views = api(&app, "GET", "/api/contexts/universe/views", None).await;
    for v in views["views"].as_array().unwrap() {
        let name = v["name"].as_str().unwrap();
        let cli = lines(&nebfca(&ws, &["-c", "universe", "view", "resolve", name]));
        let via_api: Vec<String> = serde_json::from_value(v["objects"].clone()).unwrap();
        assert_eq!(cli, via_api, "view {name}");
    }

    let session = api(&app, "POST", "/api/sessions", Some(json!({"context": "documents"}))).await;
    let id = session["session"].as_u64().unwrap();
    for seed in ["plan2.ps", "notes1.txt", "format=text", "project=plan1"] {
        let cli: Value =
            serde_json::from_str(&stdout(&nebfca(&ws, &["-c", "documents", "browse", "--seed", seed, "--json"]))).unwrap();
        let key = if seed.contains('=') { "attribute" } else { "object" };
        let body = api(
            &app,
            "POST",
            &format!("/api/sessions/{id}/neighborhood"),
            Some(json!({"seed": { key: seed }, "filters": {"max_concepts": 50}})),
        )
        .await;
        assert_eq!(cli, body["neighborhood"], "browse {seed}");
    }

    let cli: Value = serde_json::from_str(&stdout(&nebfca(&ws, &["share", "compose", "--format", "json"]))).unwrap();
    let mut body = api(&app, "POST", "/api/shared", Some(json!({}))).await;
    body.as_object_mut().unwrap().remove("version");
    assert_eq!(cli, body, "shared matrix");
}
