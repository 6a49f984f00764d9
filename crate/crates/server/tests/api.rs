use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tep_server::{router, AppState};
use tower::ServiceExt;

const TRIANGLE: &str = "[[0,0],[1,0],[0,1]]";

fn ledrappier() -> Value {
    json!({
        "shape": {"group": {"lattice": 2}, "members": [[0,0],[1,0],[0,1]]},
        "alphabet": 2,
        "rule": {"sum-mod": {"q": 2}}
    })
}

fn line(n: i64) -> Value {
    json!((0..n).map(|i| json!([i, 0])).collect::<Vec<_>>())
}

fn create_body(initial: Value, family: bool) -> Value {
    let mut v = json!({"group": {"lattice": 2}, "s": serde_json::from_str::<Value>(TRIANGLE).unwrap(), "initial": initial});
    if family {
        v["family"] = ledrappier();
    }
    v
}

async fn call(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, Value, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req.body(body.map(Body::from).unwrap_or_else(Body::empty)).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    let v = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, v, bytes)
}

async fn create(app: &Router, body: Value) -> (String, Value) {
    let (st, v, _) = call(app, Method::POST, "/sessions", Some(body.to_string())).await;
    assert_eq!(st, StatusCode::CREATED, "{v}");
    (v["id"].as_str().unwrap().to_string(), v["state"].clone())
}

fn app() -> Router {
    router(AppState::in_memory(), None)
}

#[tokio::test]
async fn create_defaults_t_to_lax_corners() {
    let app = app();
    let (_, state) = create(&app, create_body(line(5), false)).await;
    assert_eq!(state["support"].as_array().unwrap().len(), 5);
    assert_eq!(state["t"], json!([[0, 0], [0, 1], [1, 0]]));
    assert_eq!(state["history_len"], 0);
}

#[tokio::test]
async fn create_errors() {
    let app = app();
    let (st, _, _) = call(&app, Method::POST, "/sessions", Some("{not json".into())).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    let mut b = create_body(line(2), false);
    b["s"] = json!([[0, 0], "ab"]);
    assert_eq!(call(&app, Method::POST, "/sessions", Some(b.to_string())).await.0, StatusCode::BAD_REQUEST);
    let mut b = create_body(line(2), false);
    b.as_object_mut().unwrap().remove("initial");
    assert_eq!(call(&app, Method::POST, "/sessions", Some(b.to_string())).await.0, StatusCode::BAD_REQUEST);
    let mut b = create_body(line(2), false);
    b["t"] = json!([[0, 0], [5, 5]]);
    let (st, v, _) = call(&app, Method::POST, "/sessions", Some(b.to_string())).await;
    assert_eq!(st, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("subset"));
}

#[tokio::test]
async fn move_listing() {
    let app = app();
    let (id, _) = create(&app, create_body(line(1), false)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["moves"], json!([]));

    let (id, _) = create(&app, create_body(line(2), false)).await;
    let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    let moves = v["moves"].as_array().unwrap();
    assert!(!moves.is_empty());
    // walking all listed moves from every reached support closes up at 3 supports
    let mut seen = std::collections::BTreeSet::new();
    let mut todo = vec![(id.clone(), 0usize)];
    seen.insert(v_support(&app, &id).await);
    while let Some((sid, _)) = todo.pop() {
        let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{sid}/moves"), None).await;
        for m in v["moves"].as_array().unwrap() {
            let (st, after, _) = call(&app, Method::POST, &format!("/sessions/{sid}/moves"), Some(m["move"].to_string())).await;
            assert_eq!(st, StatusCode::OK);
            let sup = after["support"].to_string();
            if seen.insert(sup) {
                let mut body = create_body(after["support"].clone(), false);
                body["t"] = after["t"].clone();
                let (nid, _) = create(&app, body).await;
                todo.push((nid, 0));
            }
            call(&app, Method::POST, &format!("/sessions/{sid}/undo"), None).await;
        }
    }
    assert_eq!(seen.len(), 3);
}

async fn v_support(app: &Router, id: &str) -> String {
    call(app, Method::GET, &format!("/sessions/{id}"), None).await.1["support"].to_string()
}

#[tokio::test]
async fn reverse_move_is_listed_after_applying() {
    let app = app();
    let (id, _) = create(&app, create_body(line(3), false)).await;
    let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    for m in v["moves"].as_array().unwrap() {
        call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(m["move"].to_string())).await;
        let (_, after, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
        let rev = after["moves"].as_array().unwrap().iter().any(|n| {
            n["move"]["g"] == m["move"]["g"] && n["leaving"] == m["entering"] && n["entering"] == m["leaving"]
        });
        assert!(rev, "{m}");
        call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    }
}

#[tokio::test]
async fn apply_then_undo_is_byte_identical() {
    let app = app();
    let (id, _) = create(&app, create_body(line(4), false)).await;
    let (_, _, before) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    let m = v["moves"][0]["move"].to_string();
    let (st, _, _) = call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(m)).await;
    assert_eq!(st, StatusCode::OK);
    let (st, _, undone) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(undone, before);
    let (st, v, _) = call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("empty"));
}

#[tokio::test]
async fn illegal_moves_name_the_clause() {
    let app = app();
    let (id, _) = create(&app, create_body(line(2), false)).await;
    let cases = [
        (json!({"g": [0, 0], "a": [1, 0], "b": [1, 0]}), "differ"),
        (json!({"g": [0, 0], "a": [1, 0], "b": [7, 7]}), "gT"),
        (json!({"g": [0, 0], "a": [1, 0], "b": [0, 0]}), "exactly one"),
        (json!({"g": [5, 0], "a": [5, 0], "b": [6, 0]}), "exactly one"),
        (json!({"g": [1, 0], "a": [1, 0], "b": [2, 0]}), "missing"),
    ];
    for (m, clause) in cases {
        let (st, v, _) = call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(m.to_string())).await;
        assert_eq!(st, StatusCode::CONFLICT, "{m}");
        assert!(v["error"].as_str().unwrap().contains(clause), "{m}: {v}");
    }
    let (st, _, _) = call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(json!({"g": "ab"}).to_string())).await;
    assert_eq!(st, StatusCode::BAD_REQUEST);
    assert_eq!(v_support(&app, &id).await, "[[0,0],[1,0]]");
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let app = app();
    for (m, uri) in [
        (Method::GET, "/sessions/nope"),
        (Method::GET, "/sessions/nope/moves"),
        (Method::POST, "/sessions/nope/undo"),
        (Method::GET, "/sessions/nope/history"),
        (Method::GET, "/sessions/nope/component"),
        (Method::GET, "/jobs/nope"),
    ] {
        assert_eq!(call(&app, m, uri, None).await.0, StatusCode::NOT_FOUND, "{uri}");
    }
}

#[tokio::test]
async fn history_replays_to_the_same_support() {
    let app = app();
    let (id, _) = create(&app, create_body(line(6), true)).await;
    for step in 0..15 {
        let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
        let moves = v["moves"].as_array().unwrap();
        let m = moves[(step * 7) % moves.len()]["move"].to_string();
        assert_eq!(call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(m)).await.0, StatusCode::OK);
        if step % 4 == 3 {
            call(&app, Method::POST, &format!("/sessions/{id}/undo"), None).await;
        }
    }
    let (_, export, _) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
    assert_eq!(export["moves"].as_array().unwrap().len(), 15 - 3);
    let (nid, state) = create(&app, export.clone()).await;
    assert_eq!(state["support"].to_string(), v_support(&app, &id).await);
    assert_eq!(state["history_len"], 12);
    let (_, again, _) = call(&app, Method::GET, &format!("/sessions/{nid}/history"), None).await;
    assert_eq!(again, export);

    // a corrupted history is rejected as a whole
    let mut bad = export.clone();
    bad["moves"].as_array_mut().unwrap().push(json!({"g": [90, 0], "a": [90, 0], "b": [91, 0]}));
    let (st, v, _) = call(&app, Method::POST, "/sessions", Some(bad.to_string())).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().starts_with("move 12"));
}

#[tokio::test]
async fn independence_probe() {
    let app = app();
    let (id, _) = create(&app, create_body(line(6), true)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/independence?budget=100000"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v["independent"], true);

    let (id, _) = create(&app, create_body(json!([[0, 0], [1, 0], [0, 1]]), true)).await;
    let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/independence"), None).await;
    assert_eq!(v["independent"], false);

    let (id, _) = create(&app, create_body(line(12), true)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/independence?budget=1"), None).await;
    assert_eq!(st, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["detail"]["support_size"], 12);
    for q in ["budget=0", "budget=-3", "budget=x"] {
        let (st, _, _) = call(&app, Method::GET, &format!("/sessions/{id}/independence?{q}"), None).await;
        assert_eq!(st, StatusCode::BAD_REQUEST, "{q}");
    }

    let (id, _) = create(&app, create_body(line(3), false)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/independence"), None).await;
    assert_eq!(st, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("family"));
}

#[tokio::test]
async fn component_probe_and_jobs() {
    let app = app();
    let (id, _) = create(&app, create_body(line(3), false)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/component?limit=100000"), None).await;
    assert_eq!(st, StatusCode::OK);
    assert_eq!(v, json!({"size": 16, "exhausted": true}));

    let (id5, _) = create(&app, create_body(line(5), false)).await;
    let (st, v, _) = call(&app, Method::GET, &format!("/sessions/{id5}/component?limit=10"), None).await;
    assert_eq!(st, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(v["detail"]["exhausted"], false);

    let (st, v, _) = call(&app, Method::POST, &format!("/sessions/{id5}/component/jobs?limit=100000"), None).await;
    assert_eq!(st, StatusCode::ACCEPTED);
    let job = v["job"].as_str().unwrap().to_string();
    let mut report = Value::Null;
    for _ in 0..500 {
        let (st, v, _) = call(&app, Method::GET, &format!("/jobs/{job}"), None).await;
        assert_eq!(st, StatusCode::OK);
        if v["status"] == "done" {
            report = v["report"].clone();
            break;
        }
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    assert_eq!(report["size"], 1188);
    assert_eq!(report["exhausted"], true);
}

#[tokio::test]
async fn schema_and_cors() {
    let app = router(AppState::in_memory(), Some("http://localhost:5173"));
    let (st, v, _) = call(&app, Method::GET, "/schema", None).await;
    assert_eq!(st, StatusCode::OK);
    assert!(v["$defs"]["move"]["required"].as_array().unwrap().len() == 3);
    assert!(v["endpoints"]["POST /sessions"].is_object());

    let req = Request::builder()
        .method(Method::OPTIONS)
        .uri("/sessions")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.headers()["access-control-allow-origin"], "http://localhost:5173");
}

#[tokio::test]
async fn sessions_are_isolated_under_concurrency() {
    let state: Arc<AppState> = AppState::in_memory();
    let app = router(state.clone(), None);
    let mut ids = Vec::new();
    for n in 3..7 {
        ids.push((create(&app, create_body(line(n), false)).await.0, n));
    }
    let mut tasks = Vec::new();
    for (id, n) in ids.clone() {
        let app = app.clone();
        tasks.push(tokio::spawn(async move {
            for i in 0..20usize {
                let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
                let moves = v["moves"].as_array().unwrap();
                let m = moves[i % moves.len()]["move"].to_string();
                let (st, s, _) = call(&app, Method::POST, &format!("/sessions/{id}/moves"), Some(m)).await;
                assert_eq!(st, StatusCode::OK);
                assert_eq!(s["support"].as_array().unwrap().len(), n as usize);
            }
        }));
    }
    for t in tasks {
        t.await.unwrap();
    }
    for (id, n) in ids {
        let (_, export, _) = call(&app, Method::GET, &format!("/sessions/{id}/history"), None).await;
        assert_eq!(export["initial"], line(n));
        let (_, state) = create(&app, export).await;
        assert_eq!(state["support"].to_string(), v_support(&app, &id).await);
    }
    assert_eq!(state.session_count(), 8);
}

#[tokio::test]
async fn two_writers_on_one_session_serialize() {
    let app = app();
    let (id, _) = create(&app, create_body(line(2), false)).await;
    let (_, v, _) = call(&app, Method::GET, &format!("/sessions/{id}/moves"), None).await;
    let m = v["moves"][0]["move"].to_string();
    // both clients saw the same list; the writes land one after the other
    let uri = format!("/sessions/{id}/moves");
    let (a, b) = tokio::join!(
        call(&app, Method::POST, &uri, Some(m.clone())),
        call(&app, Method::POST, &uri, Some(m.clone())),
    );
    let mut codes = [a.0, b.0];
    codes.sort();
    // the second application of a swap moves the cell back, which is also legal
    assert_eq!(codes, [StatusCode::OK, StatusCode::OK]);
    let (_, s, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(s["history_len"], 2);
    assert_eq!(s["support"], line(2));
}
