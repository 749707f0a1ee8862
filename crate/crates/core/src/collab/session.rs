//! Authoritative state of one session and its message routing.
//!
//! Everything here is synchronous and deterministic: callers pass the current time in
//! milliseconds and get back the envelopes to deliver. Connection handling, persistence
//! and background reconstruction live in the hub.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::accuracy::accuracy_against_atlas;
use super::atlas::Atlas;
use super::error::{CollabError, Result};
use super::grading::{validate_stars, GradeBook, GradeRecord, GradeSummary};
use super::message::{MessageEnvelope, MessageType, SERVER_SENDER};
use super::palette::{color_hex, lowest_free};
use crate::geometry::{detect_collisions, Contour, MeshStats, TriangleMesh};
use crate::tiler::valid_id;

pub const GROUP_CAPACITY: usize = 4;
/// Slice-focus broadcasts allowed per participant per [`FOCUS_WINDOW_MS`].
pub const FOCUS_BROADCASTS_PER_WINDOW: usize = 2;
pub const FOCUS_WINDOW_MS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingMode {
    Voluntary,
    #[default]
    Automatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeviceClass {
    #[default]
    Desktop,
    Tablet,
    Headset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub dataset_id: String,
    pub atlas_id: Option<String>,
    pub grouping: GroupingMode,
    pub slice_count: u32,
    pub pixel_spacing: f64,
    pub slice_spacing: f64,
    pub palette_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participant {
    pub participant_id: String,
    pub display_name: String,
    pub color_index: usize,
    pub color: String,
    pub device_class: DeviceClass,
    pub teacher: bool,
    pub group_id: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub group_id: u32,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JoinRequest {
    #[serde(default)]
    pub display_name: String,
    #[serde(default)]
    pub device_class: DeviceClass,
    #[serde(default)]
    pub teacher: bool,
    /// Only honored in voluntary grouping.
    #[serde(default)]
    pub group: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommittedContour {
    pub contour_id: String,
    pub contour: Contour,
    pub committed_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Structure {
    pub contours: Vec<CommittedContour>,
    pub mesh_version: u64,
    pub mesh_stats: Option<MeshStats>,
    /// Whose group hears about rebuilds.
    pub last_committer: Option<String>,
    #[serde(skip)]
    pub mesh: Option<Arc<TriangleMesh>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub contour_id: String,
    pub point: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommitOutcome {
    pub contour_id: String,
    pub collisions: Vec<CollisionReport>,
    /// Structure whose mesh should be rebuilt, when it spans at least two slices.
    pub rebuild: Option<String>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outbound {
    pub recipients: Vec<String>,
    pub envelope: MessageEnvelope,
}

/// Result of handling one inbound message.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Routed {
    /// Sent back to the sender only.
    pub reply: Option<MessageEnvelope>,
    pub outbound: Vec<Outbound>,
    pub rebuild: Option<String>,
}

impl Routed {
    pub fn delivery_count(&self) -> usize {
        self.outbound.iter().map(|o| o.recipients.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: String,
    pub config: SessionConfig,
    pub revision: u64,
    pub participants: BTreeMap<String, Participant>,
    pub groups: BTreeMap<u32, Group>,
    pub next_group_id: u32,
    pub slice_focus: BTreeMap<String, u32>,
    pub structures: BTreeMap<String, Structure>,
    pub next_contour_id: u64,
    pub grades: GradeBook,
    pub filters: BTreeMap<String, Value>,
    pub assignments: Vec<String>,
    pub last_seq: BTreeMap<String, u64>,
    pub server_seq: u64,
    #[serde(skip)]
    focus_log: BTreeMap<String, VecDeque<u64>>,
    #[serde(skip)]
    atlas: Option<Arc<Atlas>>,
}

fn payload<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| CollabError::InvalidPayload(e.to_string()))
}

#[derive(Deserialize)]
struct FocusPayload {
    slice: u32,
}

#[derive(Deserialize)]
struct GroupPayload {
    #[serde(default)]
    group: Option<u32>,
}

#[derive(Deserialize)]
struct GradePayload {
    author: String,
    structure: String,
    stars: i64,
}

impl SessionState {
    pub fn new(session_id: impl Into<String>, config: SessionConfig) -> Self {
        Self {
            session_id: session_id.into(),
            config,
            revision: 0,
            participants: BTreeMap::new(),
            groups: BTreeMap::new(),
            next_group_id: 0,
            slice_focus: BTreeMap::new(),
            structures: BTreeMap::new(),
            next_contour_id: 0,
            grades: GradeBook::default(),
            filters: BTreeMap::new(),
            assignments: Vec::new(),
            last_seq: BTreeMap::new(),
            server_seq: 0,
            focus_log: BTreeMap::new(),
            atlas: None,
        }
    }

    pub fn attach_atlas(&mut self, atlas: Arc<Atlas>) {
        self.atlas = Some(atlas);
    }

    pub fn atlas(&self) -> Option<&Atlas> {
        self.atlas.as_deref()
    }

    pub fn participant(&self, id: &str) -> Result<&Participant> {
        self.participants.get(id).ok_or_else(|| CollabError::NotJoined(id.to_string()))
    }

    pub fn group_members(&self, group_id: u32) -> &[String] {
        self.groups.get(&group_id).map(|g| g.members.as_slice()).unwrap_or(&[])
    }

    fn group_peers(&self, sender: &str) -> Vec<String> {
        match self.participants.get(sender) {
            Some(p) => self.group_members(p.group_id).iter().filter(|m| *m != sender).cloned().collect(),
            None => Vec::new(),
        }
    }

    fn session_peers(&self, sender: &str) -> Vec<String> {
        self.participants.keys().filter(|m| *m != sender).cloned().collect()
    }

    fn server_envelope(&mut self, kind: MessageType, payload: Value) -> MessageEnvelope {
        self.server_seq += 1;
        MessageEnvelope::new(kind, &self.session_id, SERVER_SENDER, self.server_seq, payload)
    }

    fn touch(&mut self) {
        self.revision += 1;
    }

    // ---- groups -------------------------------------------------------------------------

    fn new_group(&mut self) -> u32 {
        let id = self.next_group_id;
        self.next_group_id += 1;
        self.groups.insert(id, Group { group_id: id, members: Vec::new() });
        id
    }

    /// The group a participant would be placed in. Automatic mode picks the fullest group
    /// with room (lowest id on ties); voluntary mode honors `requested`, or opens a new group.
    fn choose_group(&self, requested: Option<u32>) -> Result<Option<u32>> {
        match self.config.grouping {
            GroupingMode::Automatic => Ok(self
                .groups
                .values()
                .filter(|g| g.members.len() < GROUP_CAPACITY)
                .max_by(|a, b| a.members.len().cmp(&b.members.len()).then(b.group_id.cmp(&a.group_id)))
                .map(|g| g.group_id)),
            GroupingMode::Voluntary => match requested {
                None => Ok(None),
                Some(id) => {
                    let g = self.groups.get(&id).ok_or(CollabError::UnknownGroup(id))?;
                    if g.members.len() >= GROUP_CAPACITY {
                        return Err(CollabError::GroupFull(id));
                    }
                    Ok(Some(id))
                }
            },
        }
    }

    fn remove_from_group(&mut self, pid: &str, group_id: u32) {
        if let Some(g) = self.groups.get_mut(&group_id) {
            g.members.retain(|m| m != pid);
            if g.members.is_empty() {
                self.groups.remove(&group_id);
            }
        }
    }

    /// Moves a joined participant to a group; see [`GroupingMode`]. In automatic mode the
    /// participant keeps its current group.
    pub fn assign_group(&mut self, pid: &str, requested: Option<u32>) -> Result<u32> {
        let current = self.participant(pid)?.group_id;
        if self.config.grouping == GroupingMode::Automatic || requested == Some(current) {
            return Ok(current);
        }
        let target = match self.choose_group(requested)? {
            Some(id) => id,
            None => self.new_group(),
        };
        self.remove_from_group(pid, current);
        self.groups.get_mut(&target).expect("group exists").members.push(pid.to_string());
        self.participants.get_mut(pid).expect("participant exists").group_id = target;
        self.touch();
        Ok(target)
    }

    // ---- membership ---------------------------------------------------------------------

    /// Adds a participant, or rebinds an existing one (same color and group). Returns the
    /// participant record and whether it was newly added.
    pub fn join(&mut self, pid: &str, req: &JoinRequest) -> Result<(Participant, bool)> {
        if !valid_id(pid) || pid == SERVER_SENDER {
            return Err(CollabError::InvalidId(pid.to_string()));
        }
        if let Some(p) = self.participants.get(pid) {
            return Ok((p.clone(), false));
        }
        let color_index = lowest_free(self.participants.values().map(|p| p.color_index), self.config.palette_size)
            .ok_or(CollabError::SessionFull(self.config.palette_size))?;
        let group_id = match self.choose_group(req.group)? {
            Some(id) => id,
            None => self.new_group(),
        };
        self.groups.get_mut(&group_id).expect("group exists").members.push(pid.to_string());
        let p = Participant {
            participant_id: pid.to_string(),
            display_name: if req.display_name.is_empty() { pid.to_string() } else { req.display_name.clone() },
            color_index,
            color: color_hex(color_index).to_string(),
            device_class: req.device_class,
            teacher: req.teacher,
            group_id,
        };
        self.participants.insert(pid.to_string(), p.clone());
        self.touch();
        Ok((p, true))
    }

    pub fn leave(&mut self, pid: &str) -> Result<Participant> {
        let p = self.participants.remove(pid).ok_or_else(|| CollabError::NotJoined(pid.to_string()))?;
        self.remove_from_group(pid, p.group_id);
        self.slice_focus.remove(pid);
        self.focus_log.remove(pid);
        self.touch();
        Ok(p)
    }

    // ---- operations ---------------------------------------------------------------------

    /// Records the participant's focus. Returns whether the update should be broadcast;
    /// beyond the rate limit the focus still changes but nobody is told.
    pub fn update_focus(&mut self, pid: &str, slice: u32, now_ms: u64) -> Result<bool> {
        self.participant(pid)?;
        if slice >= self.config.slice_count {
            return Err(CollabError::SliceOutOfRange { slice, slice_count: self.config.slice_count });
        }
        self.slice_focus.insert(pid.to_string(), slice);
        self.touch();
        let log = self.focus_log.entry(pid.to_string()).or_default();
        while log.front().is_some_and(|&t| t + FOCUS_WINDOW_MS <= now_ms) {
            log.pop_front();
        }
        if log.len() >= FOCUS_BROADCASTS_PER_WINDOW {
            return Ok(false);
        }
        log.push_back(now_ms);
        Ok(true)
    }

    pub fn contour(&self, contour_id: &str) -> Option<&CommittedContour> {
        self.structures.values().flat_map(|s| &s.contours).find(|c| c.contour_id == contour_id)
    }

    /// Validates and stores a contour authored by `author`, reporting crossings with every
    /// committed contour on the same slice.
    pub fn commit_contour(&mut self, author: &str, mut contour: Contour, now_ms: u64) -> Result<CommitOutcome> {
        self.participant(author)?;
        contour.author_id = author.to_string();
        if contour.slice_index >= self.config.slice_count {
            return Err(CollabError::SliceOutOfRange {
                slice: contour.slice_index,
                slice_count: self.config.slice_count,
            });
        }
        if contour.structure_label.trim().is_empty() {
            return Err(CollabError::InvalidPayload("empty structure label".into()));
        }
        // Canonical wire precision, so a persisted contour reloads bit-identically.
        let mut contour = Contour::from_json(&contour.to_json())?;
        contour.author_id = author.to_string();
        contour.validate()?;

        let same_slice: Vec<&CommittedContour> = self
            .structures
            .values()
            .flat_map(|s| &s.contours)
            .filter(|c| c.contour.slice_index == contour.slice_index)
            .collect();
        let existing: Vec<Contour> = same_slice.iter().map(|c| c.contour.clone()).collect();
        let collisions = detect_collisions(&contour, &existing)
            .into_iter()
            .map(|c| CollisionReport {
                contour_id: same_slice[c.existing].contour_id.clone(),
                point: [c.point.x, c.point.y],
            })
            .collect();

        let accuracy = self.atlas.as_ref().and_then(|a| {
            let entries = a.entries(contour.slice_index, &contour.structure_label);
            (!entries.is_empty()).then(|| accuracy_against_atlas(&contour, &entries, self.config.pixel_spacing))
        });

        self.next_contour_id += 1;
        let contour_id = format!("c{}", self.next_contour_id);
        let label = contour.structure_label.clone();
        let structure = self.structures.entry(label.clone()).or_default();
        structure.contours.push(CommittedContour { contour_id: contour_id.clone(), contour, committed_ms: now_ms });
        structure.last_committer = Some(author.to_string());
        self.touch();
        let rebuild = self.rebuild_input(&label).is_some().then_some(label);
        Ok(CommitOutcome { contour_id, collisions, rebuild, accuracy })
    }

    /// Dice score of a committed contour against the session atlas.
    pub fn accuracy(&self, contour_id: &str) -> Result<f64> {
        let atlas = self.atlas.as_ref().ok_or(CollabError::NoAtlas)?;
        let c = &self
            .contour(contour_id)
            .ok_or_else(|| CollabError::InvalidPayload(format!("unknown contour {contour_id}")))?
            .contour;
        let entries = atlas.entries(c.slice_index, &c.structure_label);
        if entries.is_empty() {
            return Err(CollabError::NoAtlasEntry { slice: c.slice_index, structure: c.structure_label.clone() });
        }
        Ok(accuracy_against_atlas(c, &entries, self.config.pixel_spacing))
    }

    /// Contours to reconstruct for a structure, one stack per author who has traced at
    /// least two distinct slices. `None` when no author has.
    pub fn rebuild_input(&self, label: &str) -> Option<BTreeMap<String, Vec<Contour>>> {
        let s = self.structures.get(label)?;
        let mut by_author: BTreeMap<String, Vec<Contour>> = BTreeMap::new();
        for c in &s.contours {
            by_author.entry(c.contour.author_id.clone()).or_default().push(c.contour.clone());
        }
        by_author.retain(|_, cs| cs.iter().map(|c| c.slice_index).collect::<BTreeSet<_>>().len() >= 2);
        (!by_author.is_empty()).then_some(by_author)
    }

    /// Installs a rebuilt mesh and announces it to the last committer's group.
    pub fn apply_rebuild(&mut self, label: &str, mesh: Arc<TriangleMesh>, stats: MeshStats) -> Result<Outbound> {
        let s = self.structures.get_mut(label).ok_or_else(|| CollabError::UnknownStructure(label.to_string()))?;
        s.mesh_version += 1;
        s.mesh_stats = Some(stats.clone());
        s.mesh = Some(mesh);
        let version = s.mesh_version;
        let recipients = s
            .last_committer
            .as_deref()
            .and_then(|c| self.participants.get(c))
            .map(|p| self.group_members(p.group_id).to_vec())
            .unwrap_or_default();
        self.touch();
        let envelope = self.server_envelope(
            MessageType::MeshRebuilt,
            json!({ "structure": label, "version": version, "stats": stats }),
        );
        Ok(Outbound { recipients, envelope })
    }

    pub fn grade(&mut self, grader: &str, author: &str, structure: &str, stars: i64, now_ms: u64) -> Result<GradeSummary> {
        self.participant(grader)?;
        let stars = validate_stars(stars)?;
        if grader == author {
            return Err(CollabError::SelfGrading);
        }
        let exists = self
            .structures
            .get(structure)
            .is_some_and(|s| s.contours.iter().any(|c| c.contour.author_id == author));
        if !exists {
            return Err(CollabError::UnknownTarget { author: author.to_string(), structure: structure.to_string() });
        }
        self.grades.upsert(GradeRecord {
            grader_id: grader.to_string(),
            author_id: author.to_string(),
            structure_label: structure.to_string(),
            stars,
            timestamp_ms: now_ms,
        });
        self.touch();
        Ok(self.grades.summary(author, structure))
    }

    pub fn set_filter(&mut self, pid: &str, prefs: Value) -> Result<()> {
        self.participant(pid)?;
        self.filters.insert(pid.to_string(), prefs);
        self.touch();
        Ok(())
    }

    pub fn set_assignments(&mut self, pid: &str, structures: Vec<String>) -> Result<()> {
        if !self.participant(pid)?.teacher {
            return Err(CollabError::NotTeacher(pid.to_string()));
        }
        self.assignments = structures;
        self.touch();
        Ok(())
    }

    pub fn snapshot_value(&self) -> Value {
        serde_json::to_value(self).expect("session state serializes")
    }

    // ---- routing ------------------------------------------------------------------------

    /// Applies one inbound envelope. On error nothing changes, including the sender's
    /// sequence number.
    pub fn handle_message(&mut self, env: &MessageEnvelope, now_ms: u64) -> Result<Routed> {
        let kind = env.kind().ok_or_else(|| CollabError::UnknownType(env.msg_type.clone()))?;
        if env.session_id != self.session_id {
            return Err(CollabError::UnknownSession(env.session_id.clone()));
        }
        let sender = env.sender_id.as_str();
        if kind != MessageType::JoinSession {
            self.participant(sender)?;
        }
        if let Some(&last) = self.last_seq.get(sender) {
            if env.seq <= last {
                return Err(CollabError::StaleSequence { sender: sender.to_string(), seq: env.seq, last });
            }
        }
        let routed = self.route(kind, env, now_ms)?;
        self.last_seq.insert(sender.to_string(), env.seq);
        Ok(routed)
    }

    fn route(&mut self, kind: MessageType, env: &MessageEnvelope, now_ms: u64) -> Result<Routed> {
        let sender = env.sender_id.as_str();
        let mut routed = Routed::default();
        match kind {
            MessageType::JoinSession => {
                let req: JoinRequest = if env.payload.is_null() { JoinRequest::default() } else { payload(&env.payload)? };
                let (p, _) = self.join(sender, &req)?;
                let snapshot = json!({
                    "participant": p,
                    "group_id": p.group_id,
                    "last_seq": env.seq,
                    "state": self.snapshot_value(),
                });
                routed.reply = Some(self.server_envelope(MessageType::Snapshot, snapshot));
                let env = self.server_envelope(MessageType::JoinSession, json!({ "participant": p }));
                routed.outbound.push(Outbound { recipients: self.session_peers(sender), envelope: env });
            }
            MessageType::LeaveSession => {
                let p = self.leave(sender)?;
                let env = self.server_envelope(
                    MessageType::LeaveSession,
                    json!({ "participant_id": p.participant_id, "group_id": p.group_id }),
                );
                routed.outbound.push(Outbound { recipients: self.session_peers(sender), envelope: env });
            }
            MessageType::JoinGroup => {
                let req: GroupPayload = if env.payload.is_null() { GroupPayload { group: None } } else { payload(&env.payload)? };
                let old = self.participant(sender)?.group_id;
                let new = self.assign_group(sender, req.group)?;
                let body = json!({ "participant_id": sender, "group_id": new, "previous_group_id": old });
                routed.reply = Some(self.server_envelope(MessageType::JoinGroup, body.clone()));
                if new != old {
                    let mut recipients: BTreeSet<String> = self.group_members(old).iter().cloned().collect();
                    recipients.extend(self.group_members(new).iter().cloned());
                    recipients.remove(sender);
                    let env = self.server_envelope(MessageType::JoinGroup, body);
                    routed.outbound.push(Outbound { recipients: recipients.into_iter().collect(), envelope: env });
                }
            }
            MessageType::SliceFocus => {
                let req: FocusPayload = payload(&env.payload)?;
                if self.update_focus(sender, req.slice, now_ms)? {
                    let p = self.participant(sender)?;
                    let body = json!({ "participant_id": sender, "color": p.color, "slice": req.slice });
                    let env = self.server_envelope(MessageType::SliceFocus, body);
                    routed.outbound.push(Outbound { recipients: self.session_peers(sender), envelope: env });
                }
            }
            MessageType::AvatarPose
            | MessageType::StrokeBegin
            | MessageType::StrokeAppend
            | MessageType::StrokeEnd
            | MessageType::MeshRebuilt => {
                routed.outbound.push(Outbound { recipients: self.group_peers(sender), envelope: env.clone() });
            }
            MessageType::ContourCommit => {
                let contour: Contour = serde_json::from_value(env.payload.clone())
                    .map_err(|e| CollabError::InvalidContour(crate::geometry::GeometryError::InvalidContour(e.to_string())))?;
                let outcome = self.commit_contour(sender, contour, now_ms)?;
                let committed = self.contour(&outcome.contour_id).expect("just committed").contour.clone();
                let color = self.participant(sender)?.color.clone();
                routed.reply = Some(self.server_envelope(MessageType::ContourCommit, json!(outcome)));
                let body = json!({
                    "contour_id": outcome.contour_id,
                    "author": sender,
                    "color": color,
                    "contour": committed,
                });
                let env = self.server_envelope(MessageType::ContourCommit, body);
                routed.outbound.push(Outbound { recipients: self.group_peers(sender), envelope: env });
                routed.rebuild = outcome.rebuild;
            }
            MessageType::GradeSubmit => {
                let req: GradePayload = payload(&env.payload)?;
                let summary = self.grade(sender, &req.author, &req.structure, req.stars, now_ms)?;
                routed.reply = Some(self.server_envelope(MessageType::GradeSubmit, json!(summary)));
                let env = self.server_envelope(MessageType::GradeSubmit, json!(summary));
                routed.outbound.push(Outbound { recipients: self.session_peers(sender), envelope: env });
            }
            MessageType::FilterSet => {
                self.set_filter(sender, env.payload.clone())?;
                routed.reply = Some(self.server_envelope(MessageType::FilterSet, env.payload.clone()));
            }
            MessageType::Snapshot => {
                let body = json!({ "state": self.snapshot_value() });
                routed.reply = Some(self.server_envelope(MessageType::Snapshot, body));
            }
            MessageType::Error => {
                return Err(CollabError::InvalidPayload("clients cannot send Error messages".into()));
            }
        }
        routed.outbound.retain(|o| !o.recipients.is_empty());
        Ok(routed)
    }

    /// Envelope describing an error, addressed back to the offending sender.
    pub fn error_envelope(session_id: &str, err: &CollabError) -> MessageEnvelope {
        MessageEnvelope::new(
            MessageType::Error,
            session_id,
            SERVER_SENDER,
            0,
            json!({ "code": err.code(), "message": err.to_string() }),
        )
    }
}
