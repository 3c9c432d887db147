//! API-versus-library checks shared by the service tests and the
//! acceptance suite.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use crashdash::config::Config;
use crashdash::query::{self, Params};
use crashdash::service::{router, AppState};
use crashdash::store;
use crashdash_core::synth::SynthRng;
use crashdash_core::DatasetSnapshot;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use super::{query_string, random_query, route, Inputs, AT};

pub const TOKEN: &str = "test-token";

pub fn config(dir: &std::path::Path) -> Config {
    Config {
        admin_token: Some(TOKEN.into()),
        data_dir: dir.join("data"),
        cors_origin: Some("http://dash.example".into()),
        ..Config::default()
    }
}

pub async fn send(app: &Router, req: Request<Body>) -> (StatusCode, Value) {
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, body)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub fn reload_request(token: Option<&str>, body: Value) -> Request<Body> {
    let mut req = Request::post("/api/v1/admin/reload").header(header::CONTENT_TYPE, "application/json");
    if let Some(t) = token {
        req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
    }
    req.body(Body::from(body.to_string())).unwrap()
}

pub fn paths_json(paths: &store::InputPaths) -> Value {
    serde_json::to_value(paths).unwrap()
}

pub fn labels(snapshot: &DatasetSnapshot) -> (Vec<String>, Vec<String>) {
    let tribes = snapshot.boundaries().iter().map(|b| b.tribe_id.clone()).collect();
    let types: BTreeSet<String> = snapshot.records().iter().map(|r| r.crash_type.clone()).collect();
    (tribes, types.into_iter().collect())
}

/// The library answer, in the shape the API must return.
pub fn expected(kind: &str, pairs: &[(String, String)], snapshot: &DatasetSnapshot, config: &Config) -> (StatusCode, Value) {
    let run = Params::from_pairs(pairs.iter().cloned()).and_then(|p| query::run(kind, p, snapshot, &config.defaults()));
    match run {
        Ok(envelope) => (StatusCode::OK, serde_json::to_value(envelope).unwrap()),
        Err(e) => (StatusCode::BAD_REQUEST, json!({"code": "invalid_param", "message": e.message, "param": e.param})),
    }
}

/// Sends `cases` random parameter sets to the API and compares each
/// response with the library. Returns `(answered, rejected)` counts.
pub async fn api_matches_library(cases: usize, seed: u64) -> (usize, usize) {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    let (snapshot, _) = Inputs::synthetic(21, 6000).snapshot(AT);
    let (tribes, types) = labels(&snapshot);
    let app = router(AppState::new(config.clone(), Some(snapshot.clone())));
    let mut rng = SynthRng::new(seed);
    let (mut answered, mut rejected) = (0, 0);
    for i in 0..cases {
        let (kind, pairs) = random_query(&mut rng, &tribes, &types);
        let uri = format!("{}?{}", route(kind), query_string(&pairs));
        let got = get(&app, &uri).await;
        assert_eq!(got, expected(kind, &pairs, &snapshot, &config), "case {i}: {uri}");
        match got.0 {
            StatusCode::OK => answered += 1,
            _ => rejected += 1,
        }
    }
    (answered, rejected)
}

/// Queries racing reloads each see exactly one snapshot: the id in the
/// envelope always belongs to the input set whose numbers are in the body.
pub async fn swap_stress(min_queries: usize, reloads: usize) -> (usize, usize) {
    let dir = tempfile::tempdir().unwrap();
    let config = config(dir.path());
    let sets = [Inputs::synthetic(31, 4000), Inputs::synthetic(32, 5000)];
    let paths: Vec<store::InputPaths> =
        sets.iter().enumerate().map(|(i, s)| s.write(&dir.path().join(format!("in{i}")))).collect();

    let kinds = [("rankings", ""), ("summary", "scope=tribal"), ("road", "scope=statewide")];
    let mut expect: Vec<BTreeMap<&str, Value>> = Vec::new();
    for set in &sets {
        let (s, _) = set.snapshot(AT);
        let mut per_kind = BTreeMap::new();
        for (kind, q) in kinds {
            let pairs: Vec<(String, String)> =
                q.split('&').filter(|p| !p.is_empty()).map(|p| p.split_once('=').unwrap()).map(|(a, b)| (a.into(), b.into())).collect();
            let v = serde_json::to_value(query::run(kind, Params::from_pairs(pairs).unwrap(), &s, &config.defaults()).unwrap()).unwrap();
            per_kind.insert(kind, v["result"].clone());
        }
        expect.push(per_kind);
    }
    assert_ne!(expect[0]["rankings"], expect[1]["rankings"]);

    let (first, _) = sets[0].snapshot(AT);
    let state = AppState::new(config, Some(first.clone()));
    let app = router(state);
    let ids: Arc<Mutex<BTreeMap<String, usize>>> =
        Arc::new(Mutex::new(BTreeMap::from([(first.snapshot_id().to_string(), 0)])));

    let reloads_done = Arc::new(AtomicBool::new(false));
    let issued = Arc::new(AtomicUsize::new(0));
    let reloader = {
        let (app, ids, paths, done) = (app.clone(), ids.clone(), paths.clone(), reloads_done.clone());
        tokio::spawn(async move {
            for i in 0..reloads {
                let which = (i + 1) % 2;
                let (status, info) = send(&app, reload_request(Some(TOKEN), paths_json(&paths[which]))).await;
                assert_eq!(status, StatusCode::OK, "{info}");
                ids.lock().unwrap().insert(info["snapshot_id"].as_str().unwrap().to_string(), which);
                tokio::time::sleep(std::time::Duration::from_millis(2)).await;
            }
            done.store(true, Ordering::SeqCst);
        })
    };
    // Readers keep querying until every reload has landed and at least
    // `min_queries` queries have been issued, so queries span all the swaps.
    let mut readers = Vec::new();
    for worker in 0..16 {
        let (app, done, issued) = (app.clone(), reloads_done.clone(), issued.clone());
        readers.push(tokio::spawn(async move {
            let mut answers = Vec::new();
            let mut i = worker;
            loop {
                let n = issued.fetch_add(1, Ordering::SeqCst);
                if n >= min_queries && done.load(Ordering::SeqCst) {
                    break;
                }
                let (kind, q) = kinds[i % kinds.len()];
                let (status, body) = get(&app, &format!("{}?{q}", route(kind))).await;
                assert_eq!(status, StatusCode::OK);
                answers.push((kind, body));
                i += 1;
            }
            answers
        }));
    }
    let mut answers = Vec::new();
    for r in readers {
        answers.extend(r.await.unwrap());
    }
    reloader.await.unwrap();
    assert!(answers.len() >= min_queries);
    let total = answers.len();

    let ids = ids.lock().unwrap();
    assert_eq!(ids.len(), reloads + 1);
    let mut seen = BTreeSet::new();
    for (kind, body) in answers {
        let id = body["snapshot_id"].as_str().unwrap();
        let set = *ids.get(id).unwrap_or_else(|| panic!("unknown snapshot id {id}"));
        assert_eq!(body["result"], expect[set][kind], "{kind} under {id}");
        seen.insert(id.to_string());
    }
    // The initial and the final snapshot are both observed at least.
    assert!(seen.len() >= 2, "{seen:?}");
    (total, seen.len())
}

