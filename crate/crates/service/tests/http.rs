use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tabula_service::{read_log, router, Session, Store};
use tower::ServiceExt;

async fn call(app: &Router, method: Method, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder()
        .method(method)
        .uri(path)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, integrand: &str) -> (StatusCode, Value) {
    call(app, Method::POST, "/session", Some(json!({"integrand": integrand, "var": "x"}))).await
}

async fn act(app: &Router, id: &str, action: Value) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/session/{id}/act"), Some(action)).await
}

fn app() -> Router {
    router(Arc::new(Store::new()))
}

fn ascii(view: &Value, field: &str) -> String {
    view[field]["ascii"].as_str().unwrap_or_default().to_string()
}

#[tokio::test]
async fn exponential_sine_flow() {
    let app = app();
    let (status, view) = create(&app, "exp(3*x)*sin(2*x)").await;
    assert_eq!(status, StatusCode::CREATED);
    assert!(view["table"].is_null());
    let id = view["id"].as_str().unwrap().to_string();

    let (status, view) = act(&app, &id, json!({"type": "choose_split", "u": "exp(3*x)"})).await;
    assert_eq!(status, StatusCode::OK, "{view}");
    assert_eq!(view["table"][0]["dv"]["ascii"], "sin(2*x)");
    act(&app, &id, json!({"type": "step"})).await;
    let (_, view) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(view["hints"][0]["tag"], "self_similar");
    assert!(view["hints"][0]["text"].as_str().unwrap().contains("-9/4"));

    let (status, _) = act(&app, &id, json!({"type": "stop", "mode": "direct"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, view) = act(&app, &id, json!({"type": "stop", "mode": "self_similar"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["status"], "finalized");
    assert_eq!(ascii(&view, "antiderivative"), "(1/13)*(3*sin(2*x) - 2*cos(2*x))*exp(3*x) + C");

    let (status, read) = call(&app, Method::GET, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(read, view);
    let (status, err) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(err["code"], "illegal_transition");
}

#[tokio::test]
async fn undo_restores_the_previous_view() {
    let app = app();
    let (_, created) = create(&app, "x^2*exp(x)").await;
    let id = created["id"].as_str().unwrap().to_string();
    let (_, chosen) = act(&app, &id, json!({"type": "choose_split", "index": 0})).await;
    let (_, stepped) = act(&app, &id, json!({"type": "step"})).await;
    assert_ne!(stepped, chosen);
    let (_, undone) = act(&app, &id, json!({"type": "undo"})).await;
    assert_eq!(undone.to_string(), chosen.to_string());
    let (_, undone) = act(&app, &id, json!({"type": "undo"})).await;
    assert_eq!(undone.to_string(), created.to_string());
    let (status, _) = act(&app, &id, json!({"type": "undo"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn learning_from_a_bad_split() {
    let app = app();
    let (_, view) = create(&app, "(x^2 - 3*x)*sin(x)").await;
    let suggestions: Vec<String> = view["suggestions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["u"]["ascii"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suggestions[0], "x^2 - 3*x");
    assert!(suggestions[1..].contains(&"sin(x)".to_string()));
    let id = view["id"].as_str().unwrap().to_string();

    act(&app, &id, json!({"type": "choose_split", "u": "sin(x)"})).await;
    let (_, view) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(view["hints"][0]["tag"], "harder");
    assert_eq!(view["hints"][1]["tag"], "warning");
    let scores = &view["scores"];
    assert!(scores["residual"]["score"].as_u64() > scores["original"]["score"].as_u64());
    let (status, _) = act(&app, &id, json!({"type": "stop", "mode": "auto"})).await;
    assert_eq!(status, StatusCode::CONFLICT);

    act(&app, &id, json!({"type": "undo"})).await;
    act(&app, &id, json!({"type": "choose_split", "u": "x^2 - 3*x"})).await;
    act(&app, &id, json!({"type": "step"})).await;
    let (_, view) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(view["hints"][0]["tag"], "direct");
    let (status, view) = act(&app, &id, json!({"type": "stop", "mode": "direct"})).await;
    assert_eq!(status, StatusCode::OK);
    let result = ascii(&view, "antiderivative");
    let got = tabula::parse(result.trim_end_matches(" + C")).unwrap();
    let want = tabula::parse("(3*x - x^2)*cos(x) + (2*x - 3)*sin(x) + 2*cos(x)").unwrap();
    assert!(tabula::equals(&got, &want), "{result}");
}

#[tokio::test]
async fn recursive_table_stops_in_auto_mode() {
    let app = app();
    let (_, view) = create(&app, "(3*x^2 - x)*ln(x)^2").await;
    let id = view["id"].as_str().unwrap().to_string();
    act(&app, &id, json!({"type": "choose_split", "u": "ln(x)^2"})).await;
    let (_, view) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(view["hints"][0]["tag"], "simpler");
    let (status, view) = act(&app, &id, json!({"type": "stop", "mode": "auto"})).await;
    assert_eq!(status, StatusCode::OK, "{view}");
    assert!(ascii(&view, "antiderivative").ends_with("+ C"));
}

#[tokio::test]
async fn error_statuses() {
    let app = app();
    let (status, err) = create(&app, "(((").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "parse_error");
    assert!(err["span"]["start"].is_u64());

    let (status, _) = create(&app, "7").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, err) = call(&app, Method::POST, "/session", Some(json!({"integrand": 3}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(err["code"], "bad_request");

    let (status, err) = call(&app, Method::GET, "/session/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(err["code"], "not_found");

    let (_, view) = create(&app, "ln(x)").await;
    let id = view["id"].as_str().unwrap().to_string();
    assert_eq!(view["suggestions"][0]["u"]["ascii"], "ln(x)");
    assert_eq!(view["suggestions"][0]["dv"]["ascii"], "1");
    let (status, _) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    act(&app, &id, json!({"type": "choose_split", "index": 0})).await;
    let (status, _) = act(&app, &id, json!({"type": "stop", "mode": "auto"})).await;
    assert_eq!(status, StatusCode::CONFLICT, "a one-row table cannot stop");
    let (status, err) = act(&app, &id, json!({"type": "choose_split", "index": 9})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{err}");
    let (status, err) = act(&app, &id, json!({"type": "choose_split", "u": "ln("})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{err}");
    let (status, view) = act(&app, &id, json!({"type": "abandon"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(view["status"], "abandoned");
    let (status, err) = act(&app, &id, json!({"type": "step"})).await;
    assert_eq!(status, StatusCode::GONE);
    assert_eq!(err["code"], "abandoned");

    let (status, _) = call(&app, Method::DELETE, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/session/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn action_log_replays_to_the_same_view() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::with_log_dir(dir.path()));
    let app = router(store.clone());
    let (_, view) = create(&app, "exp(3*x)*sin(2*x)").await;
    let id = view["id"].as_str().unwrap().to_string();
    act(&app, &id, json!({"type": "choose_split", "index": 0})).await;
    act(&app, &id, json!({"type": "step"})).await;
    act(&app, &id, json!({"type": "step"})).await;
    act(&app, &id, json!({"type": "undo"})).await;
    act(&app, &id, json!({"type": "step"})).await;
    let (_, last) = act(&app, &id, json!({"type": "stop", "mode": "auto"})).await;

    let log = read_log(&store.log_path(&id).unwrap()).unwrap();
    assert_eq!(log.len(), 7);
    assert_eq!(log, store.log(&id).unwrap());
    assert!(log.iter().enumerate().all(|(i, e)| e.seq == i));
    let replayed = Session::replay(id.clone(), &log).unwrap();
    let served = serde_json::to_string(&store.view(&id).unwrap()).unwrap();
    assert_eq!(serde_json::to_string(&replayed.view()).unwrap(), served);
    assert_eq!(serde_json::to_value(replayed.view()).unwrap(), last);
    assert_eq!(replayed.log(), &log[..]);
}

#[tokio::test]
async fn concurrent_reads_agree() {
    let app = app();
    let (_, view) = create(&app, "x*cos(x)").await;
    let path = format!("/session/{}", view["id"].as_str().unwrap());
    let reads = futures_join(&app, &path).await;
    assert!(reads.windows(2).all(|w| w[0] == w[1]));
}

async fn futures_join(app: &Router, path: &str) -> Vec<Value> {
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (app, path) = (app.clone(), path.to_string());
            tokio::spawn(async move { call(&app, Method::GET, &path, None).await.1 })
        })
        .collect();
    let mut out = Vec::new();
    for h in handles {
        out.push(h.await.unwrap());
    }
    out
}
