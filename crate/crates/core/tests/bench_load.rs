mod common;

use std::time::Duration;

use common::start;
use objauth::bench::{
    bench_user, run_load, sweep_object_size, BenchConfig, BenchError, LoadShape, RequestStatus,
    Scheme, SizeSweepConfig,
};

fn check_record_invariants(report: &objauth::bench::BenchReport) {
    for r in &report.records {
        assert!(r.done_unix_ms >= r.send_unix_ms, "{r:?}");
        assert!(r.latency_ms >= 0.0);
        if let Some(auth) = r.server_auth_ms {
            assert!(r.latency_ms >= auth, "{r:?}");
        }
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn open_loop_rate_fixes_throughput() {
    let ts = start().await;
    let cfg = BenchConfig::new(
        ts.server.base_url(),
        Scheme::Hash,
        LoadShape::OpenLoop { rate: 2.0 },
        Duration::from_secs(30),
        1000,
    );
    let report = run_load(&cfg).await.unwrap();
    let s = &report.summary;
    assert_eq!(s.requests, 60);
    assert_eq!(s.accepted, 60);
    assert!(!s.failed);
    let tp = s.throughput_rps.unwrap();
    assert!((tp - 2.0).abs() <= 0.2, "throughput {tp}");

    let sends: Vec<f64> = report.records.iter().map(|r| r.send_unix_ms).collect();
    let mean_gap_s = (sends[sends.len() - 1] - sends[0]) / (sends.len() - 1) as f64 / 1000.0;
    assert!((mean_gap_s - 0.5).abs() <= 0.025, "mean gap {mean_gap_s}");
    check_record_invariants(&report);
}

#[tokio::test(flavor = "multi_thread")]
async fn closed_loop_object_scheme_logs_in() {
    let ts = start().await;
    let mut cfg = BenchConfig::new(
        ts.server.base_url(),
        Scheme::Object,
        LoadShape::ClosedLoop { clients: 3 },
        Duration::from_millis(500),
        20_000,
    );
    cfg.max_requests = Some(30);
    let report = run_load(&cfg).await.unwrap();
    assert_eq!(report.summary.requests, 30);
    assert_eq!(report.summary.accepted, 30);
    let seqs: std::collections::BTreeSet<u64> = report.records.iter().map(|r| r.seq).collect();
    assert_eq!(seqs, (0..30).collect());
    check_record_invariants(&report);
}

#[tokio::test(flavor = "multi_thread")]
async fn existing_bench_account_is_reused() {
    let ts = start().await;
    let cfg = BenchConfig::new(
        ts.server.base_url(),
        Scheme::Hash,
        LoadShape::ClosedLoop { clients: 1 },
        Duration::from_millis(200),
        512,
    );
    run_load(&cfg).await.unwrap();
    let again = run_load(&cfg).await.unwrap();
    assert!(again.summary.accepted > 0);
    assert_eq!(again.summary.rejected, 0);
    assert_eq!(ts.server.store().len(), 1);
    assert!(ts.server.store().contains(&objauth::UserId::new(bench_user(512)).unwrap()));
}

#[tokio::test(flavor = "multi_thread")]
async fn unreachable_server_aborts() {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", l.local_addr().unwrap());
    drop(l);
    let cfg = BenchConfig::new(url, Scheme::Hash, LoadShape::OpenLoop { rate: 1.0 }, Duration::from_secs(1), 10);
    assert!(matches!(run_load(&cfg).await, Err(BenchError::Unreachable(_))));
}

#[tokio::test(flavor = "multi_thread")]
async fn losing_the_server_mid_run_flags_the_report() {
    let ts = start().await;
    let cfg = BenchConfig::new(
        ts.server.base_url(),
        Scheme::Hash,
        LoadShape::OpenLoop { rate: 50.0 },
        Duration::from_secs(2),
        100,
    );
    let server = ts.server;
    let stopper = tokio::spawn(async move {
        tokio::time::sleep(Duration::from_millis(400)).await;
        server.shutdown().await.unwrap();
    });
    let report = run_load(&cfg).await.unwrap();
    stopper.await.unwrap();
    let s = &report.summary;
    assert_eq!(s.requests, 100);
    assert!(s.transport_errors > 10, "{s:?}");
    assert!(s.failed);
    assert!(report.records.iter().any(|r| r.status == RequestStatus::Accepted));
}

#[tokio::test(flavor = "multi_thread")]
async fn single_size_sweep_matches_its_run() {
    let ts = start().await;
    let sweep = sweep_object_size(&SizeSweepConfig {
        server: ts.server.base_url(),
        scheme: Scheme::Object,
        sizes: vec![4096],
        requests_per_size: 15,
        warmup_per_size: 2,
        throttle_bps: None,
    })
    .await
    .unwrap();
    assert_eq!(sweep.rows.len(), 1);
    let row = &sweep.rows[0];
    let run = &sweep.reports[0].summary;
    assert_eq!(row.size, 4096);
    assert_eq!(row.requests, 15);
    assert_eq!(run.accepted, 15);
    assert_eq!(row.mean_latency_ms, run.latency_ms.unwrap().mean);

    let mut csv = Vec::new();
    sweep.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("scheme,size_bytes,requests,mean_latency_ms,"));
    assert!(text.lines().nth(1).unwrap().starts_with("object,4096,15,"));
}
