mod common;

use std::num::NonZeroU64;
use std::time::Duration;

use common::{median, random_bytes, start, start_with};
use objauth::client::{Client, ClientConfig, ClientError, Verdict};
use objauth::server::{ErrorCode, AUTH_TIME_HEADER};
use objauth::{object_digest, UserId};

fn server_err(e: ClientError) -> (u16, Option<ErrorCode>) {
    match e {
        ClientError::Server { status, code } => (status, code),
        other => panic!("expected server error, got {other}"),
    }
}

#[tokio::test]
async fn health_reports_ok() {
    let ts = start().await;
    let body = reqwest::get(format!("{}/api/health", ts.server.base_url()))
        .await
        .unwrap()
        .text()
        .await
        .unwrap();
    assert_eq!(body, r#"{"status":"ok"}"#);
}

#[tokio::test]
async fn signup_then_both_login_schemes() {
    let ts = start().await;
    let c = ts.client();
    let object = random_bytes(1, 1024);

    let out = c.signup("alice", object.clone()).await.unwrap();
    assert_eq!(out.verdict, Verdict::Accepted);
    assert!(out.server_auth_ms.unwrap() >= 0.0);
    assert!(ts.server.store().contains(&UserId::new("alice").unwrap()));

    let hex = object_digest(&object).to_hex();
    assert_eq!(c.login_hash("alice", &hex).await.unwrap().verdict, Verdict::Accepted);
    assert_eq!(
        c.login_hash("alice", &hex.to_uppercase()).await.unwrap().verdict,
        Verdict::Accepted
    );
    assert_eq!(c.login_object("alice", object.clone()).await.unwrap().verdict, Verdict::Accepted);

    let mut flipped = object.clone();
    flipped[512] ^= 0x10;
    assert_eq!(c.login_object("alice", flipped).await.unwrap().verdict, Verdict::Rejected);
    let other_hex = object_digest(b"something else").to_hex();
    assert_eq!(c.login_hash("alice", &other_hex).await.unwrap().verdict, Verdict::Rejected);
}

#[tokio::test]
async fn duplicate_signup_is_409_and_keeps_first_record() {
    let ts = start().await;
    let c = ts.client();
    c.signup("bob", b"first object".to_vec()).await.unwrap();
    let before = ts.server.store().get_account(&UserId::new("bob").unwrap()).unwrap();
    let err = c.signup("bob", b"second object".to_vec()).await.unwrap_err();
    assert_eq!(server_err(err), (409, Some(ErrorCode::DuplicateUser)));
    let after = ts.server.store().get_account(&UserId::new("bob").unwrap()).unwrap();
    assert_eq!(before, after);
    let hex = object_digest(b"first object").to_hex();
    assert_eq!(c.login_hash("bob", &hex).await.unwrap().verdict, Verdict::Accepted);
}

#[tokio::test]
async fn upload_cap_boundary() {
    let cap = 10_000u64;
    let ts = start_with(|c| c.max_upload_bytes = cap).await;
    let c = ts.client();

    let err = c.signup("big", vec![1u8; cap as usize + 1]).await.unwrap_err();
    assert_eq!(server_err(err), (413, Some(ErrorCode::TooLarge)));
    assert!(ts.server.store().is_empty());

    c.signup("exact", vec![1u8; cap as usize]).await.unwrap();
    assert_eq!(ts.server.store().len(), 1);

    let err = c.login_object("exact", vec![1u8; cap as usize + 1]).await.unwrap_err();
    assert_eq!(server_err(err), (413, Some(ErrorCode::TooLarge)));
}

#[tokio::test]
async fn empty_object_signup_is_422() {
    let ts = start().await;
    let err = ts.client().signup("empty", Vec::new()).await.unwrap_err();
    assert_eq!(server_err(err), (422, Some(ErrorCode::EmptyObject)));
    assert!(ts.server.store().is_empty());
}

#[tokio::test]
async fn malformed_requests_are_400() {
    let ts = start().await;
    let http = reqwest::Client::new();
    let base = ts.server.base_url();

    // multipart without user_id
    let form = reqwest::multipart::Form::new()
        .part("object", reqwest::multipart::Part::bytes(b"x".to_vec()));
    let resp = http.post(format!("{base}/api/signup")).multipart(form).send().await.unwrap();
    assert_eq!(resp.status(), 400);
    assert!(resp.headers().contains_key(AUTH_TIME_HEADER));
    assert_eq!(resp.text().await.unwrap(), r#"{"status":"error","code":"bad_request"}"#);

    // not multipart at all
    let resp = http.post(format!("{base}/api/login/object")).body("hello").send().await.unwrap();
    assert_eq!(resp.status(), 400);

    // bad JSON, missing field, control character in user id, empty password
    for body in [
        "{not json",
        r#"{"user_id":"a"}"#,
        r#"{"user_id":"a\nb","password":"x"}"#,
        r#"{"user_id":"a","password":""}"#,
    ] {
        let resp = http
            .post(format!("{base}/api/login/hash"))
            .header("content-type", "application/json")
            .body(body)
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), 400, "{body}");
    }

    // text sign-up is off by default
    let err = ts.client().signup_text("t", "pw").await.unwrap_err();
    assert_eq!(server_err(err), (400, Some(ErrorCode::BadRequest)));
}

#[tokio::test]
async fn rejection_bodies_do_not_reveal_unknown_users() {
    let ts = start().await;
    ts.client().signup("carol", b"carol's photo".to_vec()).await.unwrap();
    let http = reqwest::Client::new();
    let url = format!("{}/api/login/hash", ts.server.base_url());

    let post = |user: &'static str| {
        let http = http.clone();
        let url = url.clone();
        async move {
            let resp = http
                .post(url)
                .json(&serde_json::json!({"user_id": user, "password": "wrong"}))
                .send()
                .await
                .unwrap();
            let status = resp.status();
            assert!(resp.headers().contains_key(AUTH_TIME_HEADER));
            (status, resp.bytes().await.unwrap())
        }
    };
    let (s1, wrong_pw) = post("carol").await;
    let (s2, unknown) = post("nobody").await;
    assert_eq!((s1.as_u16(), s2.as_u16()), (401, 401));
    assert_eq!(wrong_pw, unknown);
    assert_eq!(&wrong_pw[..], br#"{"status":"rejected"}"#);

    // same for the object endpoint
    let c = ts.client();
    let a = c.login_object("carol", b"not it".to_vec()).await.unwrap();
    let b = c.login_object("nobody", b"not it".to_vec()).await.unwrap();
    assert_eq!((a.verdict, b.verdict), (Verdict::Rejected, Verdict::Rejected));
}

#[tokio::test]
async fn endpoints_agree_on_random_objects() {
    let ts = start().await;
    let c = ts.client();
    for i in 0..40u64 {
        let user = format!("user-{i}");
        let object = random_bytes(i, 1 + (i as usize * 97) % 3000);
        c.signup(&user, object.clone()).await.unwrap();

        let probe = if i % 2 == 0 { object.clone() } else { random_bytes(i + 1000, object.len()) };
        let by_object = c.login_object(&user, probe.clone()).await.unwrap().verdict;
        let by_hash = c.login_hash(&user, &object_digest(&probe).to_hex()).await.unwrap().verdict;
        assert_eq!(by_object, by_hash, "user {i}");
        assert_eq!(by_object == Verdict::Accepted, i % 2 == 0);
    }
}

#[tokio::test]
async fn artificial_delay_lower_bounds_auth_time() {
    let ts = start_with(|c| c.artificial_delay = Duration::from_millis(50)).await;
    let c = ts.client();
    let out = c.signup("dave", b"obj".to_vec()).await.unwrap();
    assert!(out.server_auth_ms.unwrap() >= 50.0);
    let out = c.login_hash("dave", "nope").await.unwrap();
    assert!(out.server_auth_ms.unwrap() >= 50.0);
    assert!(out.wall_ms >= out.server_auth_ms.unwrap());
}

#[tokio::test]
async fn login_paths_never_write_the_store() {
    let ts = start().await;
    let c = ts.client();
    c.signup("erin", b"erin".to_vec()).await.unwrap();
    let path = ts.store_path();
    let before = std::fs::read(&path).unwrap();
    let mtime = std::fs::metadata(&path).unwrap().modified().unwrap();
    for _ in 0..20 {
        c.login_object("erin", b"erin".to_vec()).await.unwrap();
        c.login_hash("erin", "wrong").await.unwrap();
        c.login_hash("ghost", "wrong").await.unwrap();
    }
    assert_eq!(std::fs::read(&path).unwrap(), before);
    assert_eq!(std::fs::metadata(&path).unwrap().modified().unwrap(), mtime);
}

#[tokio::test]
async fn hash_login_cost_is_independent_of_object_size() {
    let ts = start().await;
    let c = ts.client();
    let small = random_bytes(7, 1024);
    let large = random_bytes(8, 10 * 1024 * 1024);
    c.signup("small", small.clone()).await.unwrap();
    c.signup("large", large.clone()).await.unwrap();
    let hex_small = object_digest(&small).to_hex();
    let hex_large = object_digest(&large).to_hex();

    let mut t_small = Vec::new();
    let mut t_large = Vec::new();
    for _ in 0..50 {
        t_small.push(c.login_hash("small", &hex_small).await.unwrap().server_auth_ms.unwrap());
        t_large.push(c.login_hash("large", &hex_large).await.unwrap().server_auth_ms.unwrap());
    }
    let diff = (median(t_small) - median(t_large)).abs();
    assert!(diff < 5.0, "median difference {diff} ms");
}

#[tokio::test]
async fn text_signup_extension() {
    let ts = start_with(|c| c.allow_text_signup = true).await;
    let c = ts.client();
    c.signup_text("frank", "hunter2").await.unwrap();
    assert_eq!(c.login_hash("frank", "hunter2").await.unwrap().verdict, Verdict::Accepted);
    assert_eq!(c.login_hash("frank", "hunter3").await.unwrap().verdict, Verdict::Rejected);
    let err = c.signup_text("frank", "again").await.unwrap_err();
    assert_eq!(server_err(err).0, 409);
}

#[tokio::test]
async fn accounts_survive_restart() {
    let ts = start().await;
    let c = ts.client();
    for i in 0..10 {
        c.signup(&format!("r{i}"), format!("object {i}").into_bytes()).await.unwrap();
    }
    let dir = ts.dir;
    ts.server.shutdown().await.unwrap();

    let server = objauth::server::start(common::config(&dir)).await.unwrap();
    let c = Client::new(ClientConfig::new(server.base_url())).unwrap();
    for i in 0..10 {
        let hex = object_digest(format!("object {i}").as_bytes()).to_hex();
        assert_eq!(c.login_hash(&format!("r{i}"), &hex).await.unwrap().verdict, Verdict::Accepted);
    }
    server.shutdown().await.unwrap();
}

#[tokio::test]
async fn shutdown_drains_in_flight_requests() {
    let ts = start().await;
    let object = random_bytes(3, 50_000);
    ts.client().signup("slow", object.clone()).await.unwrap();

    let throttled = Client::new(
        ClientConfig::new(ts.server.base_url()).with_throttle(NonZeroU64::new(100_000)),
    )
    .unwrap();
    let login = tokio::spawn(async move { throttled.login_object("slow", object).await });
    tokio::time::sleep(Duration::from_millis(150)).await;
    ts.server.shutdown().await.unwrap();
    let out = login.await.unwrap().unwrap();
    assert_eq!(out.verdict, Verdict::Accepted);
    assert!(out.wall_ms >= 500.0);
}

#[tokio::test]
async fn serves_static_assets_when_configured() {
    let assets = tempfile::tempdir().unwrap();
    std::fs::write(assets.path().join("index.html"), "<h1>objauth</h1>").unwrap();
    let dir = assets.path().to_path_buf();
    let ts = start_with(move |c| c.static_dir = Some(dir)).await;
    let resp = reqwest::get(format!("{}/index.html", ts.server.base_url())).await.unwrap();
    assert_eq!(resp.status(), 200);
    assert_eq!(resp.text().await.unwrap(), "<h1>objauth</h1>");
    // API routes still win
    let resp = reqwest::get(format!("{}/api/health", ts.server.base_url())).await.unwrap();
    assert_eq!(resp.status(), 200);
}
