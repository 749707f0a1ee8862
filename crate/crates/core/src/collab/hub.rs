//! Live sessions: per-session serialized state, connection outboxes, persistence and the
//! background rebuild worker.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex, MutexGuard, Weak};
use std::thread;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::mpsc::UnboundedSender;
use tracing::{debug, error, info, warn};

use super::config::ServerConfig;
use super::error::{CollabError, Result};
use super::grading::GradeSummary;
use super::message::{MessageEnvelope, MessageType};
use super::persist::{restore_meshes, SessionStore, StoredVersion};
use super::rebuild::build_structure_mesh;
use super::session::{
    CommitOutcome, GroupingMode, JoinRequest, Outbound, Participant, Routed, SessionConfig, SessionState,
};
use crate::geometry::{obj_string, Contour};
use crate::tiler::TileStore;

#[derive(Debug, Clone)]
pub struct HubOptions {
    /// `None` keeps sessions in memory only.
    pub store_dir: Option<PathBuf>,
    pub dataset_root: PathBuf,
    pub palette_size: usize,
    pub debounce: Duration,
}

impl From<&ServerConfig> for HubOptions {
    fn from(c: &ServerConfig) -> Self {
        Self {
            store_dir: Some(c.store_dir.clone()),
            dataset_root: c.dataset_root.clone(),
            palette_size: c.palette_size,
            debounce: Duration::from_millis(c.debounce_ms),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    pub dataset_id: String,
    #[serde(default)]
    pub atlas_id: Option<String>,
    #[serde(default)]
    pub grouping: GroupingMode,
}

/// Frames and bytes handed to client outboxes.
#[derive(Debug, Default)]
pub struct EgressCounters {
    messages: AtomicU64,
    bytes: AtomicU64,
}

impl EgressCounters {
    fn record(&self, bytes: usize) {
        self.messages.fetch_add(1, Ordering::Relaxed);
        self.bytes.fetch_add(bytes as u64, Ordering::Relaxed);
    }

    /// `(messages, bytes)` so far.
    pub fn totals(&self) -> (u64, u64) {
        (self.messages.load(Ordering::Relaxed), self.bytes.load(Ordering::Relaxed))
    }
}

struct Live {
    state: SessionState,
    outboxes: HashMap<String, UnboundedSender<String>>,
}

enum Command {
    Schedule { session: String, label: String, due: Instant },
    Flush(mpsc::Sender<()>),
}

struct Inner {
    opts: HubOptions,
    store: Option<SessionStore>,
    tiles: TileStore,
    sessions: Mutex<HashMap<String, Arc<Mutex<Live>>>>,
    egress: EgressCounters,
    rebuilds: Mutex<mpsc::Sender<Command>>,
}

#[derive(Clone)]
pub struct Hub {
    inner: Arc<Inner>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|p| p.into_inner())
}

pub fn wall_clock_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn durable(kind: MessageType) -> bool {
    matches!(
        kind,
        MessageType::JoinSession
            | MessageType::LeaveSession
            | MessageType::JoinGroup
            | MessageType::ContourCommit
            | MessageType::GradeSubmit
            | MessageType::FilterSet
    )
}

impl Hub {
    /// Opens the hub and restores every stored session, recomputing cached meshes.
    pub fn new(opts: HubOptions) -> Result<Hub> {
        let store = opts.store_dir.as_ref().map(SessionStore::new);
        let (tx, rx) = mpsc::channel();
        let inner = Arc::new(Inner {
            tiles: TileStore::new(&opts.dataset_root),
            store,
            opts,
            sessions: Mutex::new(HashMap::new()),
            egress: EgressCounters::default(),
            rebuilds: Mutex::new(tx),
        });
        let weak = Arc::downgrade(&inner);
        thread::Builder::new()
            .name("mesh-rebuild".into())
            .spawn(move || rebuild_worker(weak, rx))
            .map_err(|e| CollabError::Storage(e.to_string()))?;
        let hub = Hub { inner };
        hub.restore_all()?;
        Ok(hub)
    }

    fn restore_all(&self) -> Result<()> {
        let Some(store) = &self.inner.store else { return Ok(()) };
        for id in store.list()? {
            let mut state = store.load(&id)?;
            if let Some(atlas_id) = state.config.atlas_id.clone() {
                match store.load_atlas(&atlas_id) {
                    Ok(a) => state.attach_atlas(Arc::new(a)),
                    Err(e) => warn!(session = %id, error = %e, "atlas unavailable"),
                }
            }
            for r in restore_meshes(&mut state) {
                if !r.matches() {
                    warn!(session = %id, structure = %r.structure, "recomputed mesh stats differ from stored");
                }
            }
            info!(session = %id, participants = state.participants.len(), "session restored");
            self.insert(state);
        }
        Ok(())
    }

    fn insert(&self, state: SessionState) {
        let id = state.session_id.clone();
        let live = Live { state, outboxes: HashMap::new() };
        lock(&self.inner.sessions).insert(id, Arc::new(Mutex::new(live)));
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Live>>> {
        lock(&self.inner.sessions).get(id).cloned().ok_or_else(|| CollabError::UnknownSession(id.to_string()))
    }

    pub fn tiles(&self) -> &TileStore {
        &self.inner.tiles
    }

    pub fn store(&self) -> Option<&SessionStore> {
        self.inner.store.as_ref()
    }

    pub fn egress(&self) -> &EgressCounters {
        &self.inner.egress
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = lock(&self.inner.sessions).keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn create_session(&self, req: &CreateSession) -> Result<String> {
        let manifest = self
            .inner
            .tiles
            .get_manifest(&req.dataset_id)
            .map_err(|_| CollabError::UnknownDataset(req.dataset_id.clone()))?;
        let atlas = match &req.atlas_id {
            Some(a) => {
                let store = self.inner.store.as_ref().ok_or_else(|| CollabError::UnknownAtlas(a.clone()))?;
                let atlas = store.load_atlas(a)?;
                if atlas.dataset_id != req.dataset_id {
                    return Err(CollabError::UnknownAtlas(format!("{a} (belongs to {})", atlas.dataset_id)));
                }
                Some(Arc::new(atlas))
            }
            None => None,
        };
        let config = SessionConfig {
            dataset_id: req.dataset_id.clone(),
            atlas_id: req.atlas_id.clone(),
            grouping: req.grouping,
            slice_count: manifest.slice_count,
            pixel_spacing: manifest.pixel_spacing,
            slice_spacing: manifest.slice_spacing,
            palette_size: self.inner.opts.palette_size,
        };
        let id = format!("s-{}", uuid::Uuid::new_v4().simple());
        let mut state = SessionState::new(&id, config);
        if let Some(a) = atlas {
            state.attach_atlas(a);
        }
        self.open_session(state)?;
        Ok(id)
    }

    /// Registers a fully built session state (used by tests and the simulator).
    pub fn open_session(&self, state: SessionState) -> Result<()> {
        if let Some(store) = &self.inner.store {
            store.save(&state)?;
        }
        info!(session = %state.session_id, dataset = %state.config.dataset_id, "session opened");
        self.insert(state);
        Ok(())
    }

    fn persist(&self, live: &Live) {
        if let Some(store) = &self.inner.store {
            if let Err(e) = store.save(&live.state) {
                error!(session = %live.state.session_id, error = %e, "persisting session failed");
            }
        }
    }

    fn deliver(&self, live: &Live, out: &Outbound) {
        let text = out.envelope.to_json();
        for r in &out.recipients {
            if let Some(tx) = live.outboxes.get(r) {
                if tx.send(text.clone()).is_ok() {
                    self.inner.egress.record(text.len());
                }
            }
        }
    }

    fn send_to(&self, tx: &UnboundedSender<String>, env: &MessageEnvelope) {
        let text = env.to_json();
        if tx.send(text.clone()).is_ok() {
            self.inner.egress.record(text.len());
        }
    }

    fn schedule_rebuild(&self, session: &str, label: String) {
        let due = Instant::now() + self.inner.opts.debounce;
        let _ = lock(&self.inner.rebuilds).send(Command::Schedule { session: session.to_string(), label, due });
    }

    /// Handles one inbound envelope from a connection whose outbox is `reply_to`. A
    /// successful `JoinSession` binds the outbox to the sender; errors are answered with an
    /// `Error` envelope on `reply_to` as well as returned.
    pub fn dispatch(&self, env: &MessageEnvelope, reply_to: &UnboundedSender<String>) -> Result<Routed> {
        self.dispatch_at(env, reply_to, wall_clock_ms())
    }

    pub fn dispatch_at(&self, env: &MessageEnvelope, reply_to: &UnboundedSender<String>, now_ms: u64) -> Result<Routed> {
        let result = self.dispatch_inner(env, reply_to, now_ms);
        if let Err(e) = &result {
            debug!(session = %env.session_id, sender = %env.sender_id, error = %e, "message rejected");
            self.send_to(reply_to, &SessionState::error_envelope(&env.session_id, e));
        }
        result
    }

    fn dispatch_inner(&self, env: &MessageEnvelope, reply_to: &UnboundedSender<String>, now_ms: u64) -> Result<Routed> {
        let slot = self.session(&env.session_id)?;
        let mut live = lock(&slot);
        let routed = live.state.handle_message(env, now_ms)?;
        let kind = env.kind().expect("validated by handle_message");
        match kind {
            MessageType::JoinSession => {
                live.outboxes.insert(env.sender_id.clone(), reply_to.clone());
            }
            MessageType::LeaveSession => {
                live.outboxes.remove(&env.sender_id);
            }
            _ => {}
        }
        if let Some(reply) = &routed.reply {
            self.send_to(reply_to, reply);
        }
        for out in &routed.outbound {
            self.deliver(&live, out);
        }
        if durable(kind) {
            self.persist(&live);
        }
        if let Some(label) = routed.rebuild.clone() {
            self.schedule_rebuild(&env.session_id, label);
        }
        Ok(routed)
    }

    /// Drops a connection's outbox without removing the participant, so it can rejoin
    /// with the same color and group.
    pub fn disconnect(&self, session_id: &str, participant_id: &str, outbox: &UnboundedSender<String>) {
        if let Ok(slot) = self.session(session_id) {
            let mut live = lock(&slot);
            if live.outboxes.get(participant_id).is_some_and(|tx| tx.same_channel(outbox)) {
                live.outboxes.remove(participant_id);
            }
        }
    }

    /// Adds a participant without a live connection.
    pub fn join(&self, session_id: &str, participant_id: &str, req: &JoinRequest) -> Result<Participant> {
        let slot = self.session(session_id)?;
        let mut live = lock(&slot);
        let (p, added) = live.state.join(participant_id, req)?;
        if added {
            let env = self_join_envelope(&mut live.state, &p);
            let recipients = live.state.participants.keys().filter(|k| *k != participant_id).cloned().collect();
            self.deliver(&live, &Outbound { recipients, envelope: env });
            self.persist(&live);
        }
        Ok(p)
    }

    /// Commits a contour on behalf of its author (who must have joined), with the same
    /// fanout as a `ContourCommit` message.
    pub fn commit_contour(&self, session_id: &str, contour: Contour) -> Result<CommitOutcome> {
        self.commit_contour_at(session_id, contour, wall_clock_ms())
    }

    pub fn commit_contour_at(&self, session_id: &str, contour: Contour, now_ms: u64) -> Result<CommitOutcome> {
        let slot = self.session(session_id)?;
        let mut live = lock(&slot);
        let author = contour.author_id.clone();
        let outcome = live.state.commit_contour(&author, contour, now_ms)?;
        let committed = live.state.contour(&outcome.contour_id).expect("just committed").contour.clone();
        let p = live.state.participant(&author)?.clone();
        let env = server_envelope(
            &mut live.state,
            MessageType::ContourCommit,
            serde_json::json!({
                "contour_id": outcome.contour_id,
                "author": author,
                "color": p.color,
                "contour": committed,
            }),
        );
        let recipients = live.state.group_members(p.group_id).iter().filter(|m| **m != author).cloned().collect();
        self.deliver(&live, &Outbound { recipients, envelope: env });
        self.persist(&live);
        drop(live);
        if let Some(label) = outcome.rebuild.clone() {
            self.schedule_rebuild(session_id, label);
        }
        Ok(outcome)
    }

    pub fn grade(&self, session_id: &str, grader: &str, author: &str, structure: &str, stars: i64) -> Result<GradeSummary> {
        let slot = self.session(session_id)?;
        let mut live = lock(&slot);
        let summary = live.state.grade(grader, author, structure, stars, wall_clock_ms())?;
        let env = server_envelope(&mut live.state, MessageType::GradeSubmit, serde_json::json!(summary));
        let recipients = live.state.participants.keys().filter(|k| *k != grader).cloned().collect();
        self.deliver(&live, &Outbound { recipients, envelope: env });
        self.persist(&live);
        Ok(summary)
    }

    pub fn set_assignments(&self, session_id: &str, teacher: &str, structures: Vec<String>) -> Result<()> {
        let slot = self.session(session_id)?;
        let mut live = lock(&slot);
        live.state.set_assignments(teacher, structures)?;
        self.persist(&live);
        Ok(())
    }

    pub fn accuracy(&self, session_id: &str, contour_id: &str) -> Result<f64> {
        let slot = self.session(session_id)?;
        let live = lock(&slot);
        live.state.accuracy(contour_id)
    }

    pub fn snapshot(&self, session_id: &str) -> Result<Value> {
        Ok(self.with_state(session_id, |s| s.snapshot_value())?)
    }

    /// Runs `f` on the session state under its lock.
    pub fn with_state<R>(&self, session_id: &str, f: impl FnOnce(&SessionState) -> R) -> Result<R> {
        let slot = self.session(session_id)?;
        let live = lock(&slot);
        Ok(f(&live.state))
    }

    /// Current mesh of a structure as OBJ text, with its version. `Ok(None)` when the
    /// structure exists but has not been reconstructed yet.
    pub fn mesh_obj(&self, session_id: &str, label: &str) -> Result<Option<(u64, String)>> {
        let slot = self.session(session_id)?;
        let live = lock(&slot);
        let s = live
            .state
            .structures
            .get(label)
            .ok_or_else(|| CollabError::UnknownStructure(label.to_string()))?;
        Ok(s.mesh.as_ref().map(|m| (s.mesh_version, obj_string(m))))
    }

    /// Writes the session state now and returns the stored version.
    pub fn persist_snapshot(&self, session_id: &str) -> Result<StoredVersion> {
        let slot = self.session(session_id)?;
        let live = lock(&slot);
        let store = self.inner.store.as_ref().ok_or_else(|| CollabError::Storage("no store configured".into()))?;
        store.save(&live.state)
    }

    /// Runs every pending rebuild now and waits for them to finish.
    pub fn flush_rebuilds(&self) {
        let (tx, rx) = mpsc::channel();
        if lock(&self.inner.rebuilds).send(Command::Flush(tx)).is_ok() {
            let _ = rx.recv();
        }
    }
}

fn server_envelope(state: &mut SessionState, kind: MessageType, payload: Value) -> MessageEnvelope {
    state.server_seq += 1;
    MessageEnvelope::new(kind, &state.session_id, super::message::SERVER_SENDER, state.server_seq, payload)
}

fn self_join_envelope(state: &mut SessionState, p: &Participant) -> MessageEnvelope {
    server_envelope(state, MessageType::JoinSession, serde_json::json!({ "participant": p }))
}

fn run_rebuild(inner: &Arc<Inner>, session: &str, label: &str) {
    let hub = Hub { inner: inner.clone() };
    let Ok(slot) = hub.session(session) else { return };
    let (input, spacing) = {
        let live = lock(&slot);
        (live.state.rebuild_input(label), live.state.config.slice_spacing)
    };
    let Some(input) = input else { return };
    let started = Instant::now();
    let (mesh, stats) = build_structure_mesh(&input, spacing);
    let mut live = lock(&slot);
    match live.state.apply_rebuild(label, Arc::new(mesh), stats) {
        Ok(out) => {
            hub.deliver(&live, &out);
            hub.persist(&live);
            debug!(%session, %label, ms = started.elapsed().as_millis() as u64, "mesh rebuilt");
        }
        Err(e) => warn!(%session, %label, error = %e, "rebuild dropped"),
    }
}

fn rebuild_worker(inner: Weak<Inner>, rx: mpsc::Receiver<Command>) {
    let mut pending: BTreeMap<(String, String), Instant> = BTreeMap::new();
    loop {
        let next_due = pending.values().min().copied();
        let cmd = match next_due {
            None => rx.recv().map_err(|_| mpsc::RecvTimeoutError::Disconnected),
            Some(due) => rx.recv_timeout(due.saturating_duration_since(Instant::now())),
        };
        let flush_reply = match cmd {
            Ok(Command::Schedule { session, label, due }) => {
                pending.insert((session, label), due);
                None
            }
            Ok(Command::Flush(reply)) => Some(reply),
            Err(mpsc::RecvTimeoutError::Timeout) => None,
            Err(mpsc::RecvTimeoutError::Disconnected) => return,
        };
        let now = Instant::now();
        let ready: Vec<(String, String)> = pending
            .iter()
            .filter(|(_, &due)| flush_reply.is_some() || due <= now)
            .map(|(k, _)| k.clone())
            .collect();
        if !ready.is_empty() {
            let Some(inner) = inner.upgrade() else { return };
            for key in ready {
                pending.remove(&key);
                run_rebuild(&inner, &key.0, &key.1);
            }
        }
        if let Some(reply) = flush_reply {
            let _ = reply.send(());
        }
    }
}
