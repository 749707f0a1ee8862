use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use serde_json::json;
use slicelab_core::collab::{
    GroupingMode, Hub, HubOptions, JoinRequest, MessageEnvelope, MessageType, SessionConfig, SessionState,
};
use slicelab_core::sim::{simulate, SimConfig};
use tokio::sync::mpsc::unbounded_channel;

fn config() -> SessionConfig {
    SessionConfig {
        dataset_id: "bench".into(),
        atlas_id: None,
        grouping: GroupingMode::Automatic,
        slice_count: 64,
        pixel_spacing: 0.5,
        slice_spacing: 1.0,
        palette_size: 24,
    }
}

fn handle_message(c: &mut Criterion) {
    let mut g = c.benchmark_group("handle_message");
    for n in [4usize, 12, 24] {
        let mut state = SessionState::new("s", config());
        for i in 0..n {
            state.join(&format!("p{i}"), &JoinRequest::default()).unwrap();
        }
        g.throughput(Throughput::Elements(1));
        g.bench_with_input(BenchmarkId::new("stroke_append", n), &n, |bench, _| {
            let mut seq = 0u64;
            bench.iter(|| {
                seq += 1;
                let env = MessageEnvelope::new(MessageType::StrokeAppend, "s", "p0", seq, json!({ "points": [[1.0, 2.0]] }));
                black_box(state.handle_message(&env, seq).unwrap())
            })
        });
    }
    g.finish();
}

fn hub_dispatch(c: &mut Criterion) {
    let hub = Hub::new(HubOptions {
        store_dir: None,
        dataset_root: "datasets".into(),
        palette_size: 24,
        debounce: Duration::from_secs(3600),
    })
    .unwrap();
    hub.open_session(SessionState::new("s", config())).unwrap();
    let mut rxs = Vec::new();
    let mut txs = Vec::new();
    for i in 0..24 {
        let (tx, rx) = unbounded_channel();
        let env = MessageEnvelope::new(MessageType::JoinSession, "s", &format!("p{i}"), 1, json!({}));
        hub.dispatch_at(&env, &tx, 0).unwrap();
        txs.push(tx);
        rxs.push(rx);
    }
    let mut seq = 1u64;
    c.bench_function("hub_dispatch/slice_focus_24", |bench| {
        bench.iter(|| {
            seq += 1;
            let env = MessageEnvelope::new(MessageType::SliceFocus, "s", "p0", seq, json!({ "slice": seq % 64 }));
            hub.dispatch_at(&env, &txs[0], seq * 1000).unwrap();
            for rx in &mut rxs {
                while rx.try_recv().is_ok() {}
            }
        })
    });
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    for n in [8usize, 32] {
        let cfg = SimConfig { client_counts: vec![n], rate: 10.0, duration_secs: 5.0, seed: 1 };
        g.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |bench, cfg| bench.iter(|| simulate(cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, handle_message, hub_dispatch, simulation);
criterion_main!(benches);
