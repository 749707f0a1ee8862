//! Shared sessions: presence, group-scoped routing, grading, atlas scoring, persistence
//! and background mesh rebuilds.

mod accuracy;
mod atlas;
mod config;
mod error;
mod grading;
mod hub;
mod message;
mod palette;
mod persist;
mod rebuild;
mod session;

pub use accuracy::{accuracy_against_atlas, dice_score, pixel_area};
pub use atlas::Atlas;
pub use config::{ConfigError, ServerConfig, ENV_PREFIX};
pub use error::{CollabError, Result};
pub use grading::{average_half_up, validate_stars, GradeBook, GradeRecord, GradeSummary};
pub use hub::{CreateSession, EgressCounters, Hub, HubOptions};
pub use message::{MessageEnvelope, MessageType, SERVER_SENDER};
pub use palette::{color_hex, lowest_free, MAX_PALETTE_SIZE, PALETTE};
pub use persist::{label_file_stem, restore_meshes, write_atomic, RestoredMesh, SessionStore, StoredVersion, ATLAS_DIR, STATE_FILE};
pub use rebuild::build_structure_mesh;
pub use session::{
    CollisionReport, CommitOutcome, CommittedContour, DeviceClass, Group, GroupingMode, JoinRequest, Outbound,
    Participant, Routed, SessionConfig, SessionState, Structure, FOCUS_BROADCASTS_PER_WINDOW, FOCUS_WINDOW_MS,
    GROUP_CAPACITY,
};
