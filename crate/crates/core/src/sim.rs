//! Traffic simulator: synthetic clients sketching at a fixed rate against an in-process
//! hub over loopback channels. Time is virtual, so results do not depend on host load.

use std::fmt::Write as _;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver, UnboundedSender};

use crate::collab::{
    CollabError, GroupingMode, Hub, HubOptions, MessageEnvelope, MessageType, SessionConfig, SessionState,
    GROUP_CAPACITY, MAX_PALETTE_SIZE,
};

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub client_counts: Vec<usize>,
    /// Messages per second sent by each client.
    pub rate: f64,
    pub duration_secs: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { client_counts: vec![4, 8, 16, 32], rate: 10.0, duration_secs: 10.0, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRow {
    pub n_clients: usize,
    pub group_size: usize,
    pub duration_secs: f64,
    pub rate: f64,
    pub inbound_msgs: u64,
    pub egress_msgs_per_sec: f64,
    pub egress_bytes_per_sec: f64,
    /// Observed minus fitted egress msgs/sec.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub rows: Vec<SimRow>,
    /// Least-squares fit of egress msgs/sec against client count.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl SimReport {
    /// Egress msgs/sec of each row divided by that of the previous row.
    pub fn egress_ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[1].egress_msgs_per_sec / w[0].egress_msgs_per_sec).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n_clients,group_size,duration_secs,rate,inbound_msgs,egress_msgs_per_sec,egress_bytes_per_sec,fit_slope,fit_intercept,fit_r_squared,residual\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.3},{:.3},{:.6},{:.6},{:.6},{:.6}",
                r.n_clients,
                r.group_size,
                r.duration_secs,
                r.rate,
                r.inbound_msgs,
                r.egress_msgs_per_sec,
                r.egress_bytes_per_sec,
                self.slope,
                self.intercept,
                self.r_squared,
                r.residual
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Ordinary least squares `y = slope * x + intercept` with its coefficient of determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

struct SimClient {
    id: String,
    seq: u64,
    sent: u64,
    tx: UnboundedSender<String>,
    rx: UnboundedReceiver<String>,
}

/// The sketching cycle each client repeats: a ten-message stroke with one pose update.
fn sketch_kind(k: u64) -> MessageType {
    match k % 10 {
        0 => MessageType::StrokeBegin,
        5 => MessageType::AvatarPose,
        9 => MessageType::StrokeEnd,
        _ => MessageType::StrokeAppend,
    }
}

pub fn simulate_once(n_clients: usize, cfg: &SimConfig) -> Result<SimRow, CollabError> {
    let hub = Hub::new(HubOptions {
        store_dir: None,
        dataset_root: "datasets".into(),
        palette_size: MAX_PALETTE_SIZE,
        debounce: Duration::from_secs(3600),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ n_clients as u64);
    let config = SessionConfig {
        dataset_id: "synthetic".into(),
        atlas_id: None,
        grouping: GroupingMode::Automatic,
        slice_count: 1,
        pixel_spacing: 1.0,
        slice_spacing: 1.0,
        palette_size: MAX_PALETTE_SIZE,
    };
    // The palette bounds one session, so larger runs spread over several sessions of
    // whole groups.
    let per_session = MAX_PALETTE_SIZE - MAX_PALETTE_SIZE % GROUP_CAPACITY;
    let mut sessions: Vec<String> = Vec::new();
    let mut clients: Vec<(String, SimClient)> = Vec::with_capacity(n_clients);
    for i in 0..n_clients {
        if i % per_session == 0 {
            let sid = format!("sim{}", sessions.len());
            hub.open_session(SessionState::new(&sid, config.clone()))?;
            sessions.push(sid);
        }
        let sid = sessions.last().expect("a session").clone();
        let (tx, rx) = unbounded_channel();
        let c = SimClient { id: format!("c{i:04}"), seq: 1, sent: 0, tx, rx };
        let join = MessageEnvelope::new(MessageType::JoinSession, &sid, &c.id, c.seq, json!({ "display_name": c.id }));
        hub.dispatch_at(&join, &c.tx, 0)?;
        clients.push((sid, c));
    }
    for (_, c) in clients.iter_mut() {
        while c.rx.try_recv().is_ok() {}
    }

    // Event list in virtual time: each client fires every 1/rate s from a random phase.
    let period_ms = 1000.0 / cfg.rate;
    let horizon_ms = cfg.duration_secs * 1000.0;
    let mut events: Vec<(u64, usize)> = Vec::new();
    for (i, _) in clients.iter().enumerate() {
        let mut t = rng.random_range(0.0..period_ms);
        while t < horizon_ms {
            events.push(((t * 1000.0) as u64, i));
            t += period_ms;
        }
    }
    events.sort_unstable();

    let (m0, b0) = hub.egress().totals();
    let mut received = 0u64;
    for (t_us, i) in &events {
        let (sid, c) = &mut clients[*i];
        c.seq += 1;
        let kind = sketch_kind(c.sent);
        let payload = match kind {
            MessageType::AvatarPose => json!({ "position": [rng.random_range(-1.0..1.0), 1.6, rng.random_range(-1.0..1.0)] }),
            MessageType::StrokeEnd => json!({}),
            _ => {
                let pts: Vec<[f64; 2]> = (0..4)
                    .map(|_| [(rng.random_range(0.0..512.0f64) * 100.0).round() / 100.0, (rng.random_range(0.0..512.0f64) * 100.0).round() / 100.0])
                    .collect();
                json!({ "slice": 0, "points": pts })
            }
        };
        c.sent += 1;
        let env = MessageEnvelope::new(kind, sid, &c.id, c.seq, payload);
        let tx = c.tx.clone();
        hub.dispatch_at(&env, &tx, t_us / 1000)?;
        for (_, c) in clients.iter_mut() {
            while c.rx.try_recv().is_ok() {
                received += 1;
            }
        }
    }
    let (m1, b1) = hub.egress().totals();
    debug_assert_eq!(m1 - m0, received);
    Ok(SimRow {
        n_clients,
        group_size: GROUP_CAPACITY,
        duration_secs: cfg.duration_secs,
        rate: cfg.rate,
        inbound_msgs: events.len() as u64,
        egress_msgs_per_sec: (m1 - m0) as f64 / cfg.duration_secs,
        egress_bytes_per_sec: (b1 - b0) as f64 / cfg.duration_secs,
        residual: 0.0,
    })
}

pub fn simulate(cfg: &SimConfig) -> Result<SimReport, CollabError> {
    if cfg.client_counts.is_empty() || !(cfg.rate > 0.0) || !(cfg.duration_secs > 0.0) {
        return Err(CollabError::InvalidPayload("client counts, rate and duration must be positive".into()));
    }
    let mut rows = cfg
        .client_counts
        .iter()
        .map(|&n| simulate_once(n, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.n_clients as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.egress_msgs_per_sec).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    for r in &mut rows {
        r.residual = r.egress_msgs_per_sec - (slope * r.n_clients as f64 + intercept);
    }
    Ok(SimReport { rows, slope, intercept, r_squared })
}
