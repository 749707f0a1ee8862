use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MessageType {
    JoinSession,
    LeaveSession,
    JoinGroup,
    SliceFocus,
    AvatarPose,
    StrokeBegin,
    StrokeAppend,
    StrokeEnd,
    ContourCommit,
    MeshRebuilt,
    GradeSubmit,
    FilterSet,
    Snapshot,
    Error,
}

impl MessageType {
    pub const ALL: [MessageType; 14] = [
        Self::JoinSession,
        Self::LeaveSession,
        Self::JoinGroup,
        Self::SliceFocus,
        Self::AvatarPose,
        Self::StrokeBegin,
        Self::StrokeAppend,
        Self::StrokeEnd,
        Self::ContourCommit,
        Self::MeshRebuilt,
        Self::GradeSubmit,
        Self::FilterSet,
        Self::Snapshot,
        Self::Error,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::JoinSession => "JoinSession",
            Self::LeaveSession => "LeaveSession",
            Self::JoinGroup => "JoinGroup",
            Self::SliceFocus => "SliceFocus",
            Self::AvatarPose => "AvatarPose",
            Self::StrokeBegin => "StrokeBegin",
            Self::StrokeAppend => "StrokeAppend",
            Self::StrokeEnd => "StrokeEnd",
            Self::ContourCommit => "ContourCommit",
            Self::MeshRebuilt => "MeshRebuilt",
            Self::GradeSubmit => "GradeSubmit",
            Self::FilterSet => "FilterSet",
            Self::Snapshot => "Snapshot",
            Self::Error => "Error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Relayed only to the other members of the sender's group.
    pub fn is_group_scoped(self) -> bool {
        matches!(
            self,
            Self::AvatarPose | Self::StrokeBegin | Self::StrokeAppend | Self::StrokeEnd | Self::MeshRebuilt
        )
    }
}

/// One wire frame. `type` is kept as text so unknown types can be rejected with a proper
/// error rather than failing to parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageEnvelope {
    #[serde(rename = "type")]
    pub msg_type: String,
    pub session_id: String,
    pub sender_id: String,
    pub seq: u64,
    #[serde(default)]
    pub payload: Value,
}

/// Sender id used for messages the server originates.
pub const SERVER_SENDER: &str = "server";

impl MessageEnvelope {
    pub fn new(kind: MessageType, session_id: &str, sender_id: &str, seq: u64, payload: Value) -> Self {
        Self {
            msg_type: kind.as_str().to_string(),
            session_id: session_id.to_string(),
            sender_id: sender_id.to_string(),
            seq,
            payload,
        }
    }

    pub fn kind(&self) -> Option<MessageType> {
        MessageType::parse(&self.msg_type)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelope serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn wire_field_names() {
        let env = MessageEnvelope::new(MessageType::StrokeAppend, "s1", "p1", 7, json!({"points": [[1, 2]]}));
        let v: Value = serde_json::from_str(&env.to_json()).unwrap();
        assert_eq!(v["type"], "StrokeAppend");
        assert_eq!(v["session_id"], "s1");
        assert_eq!(v["sender_id"], "p1");
        assert_eq!(v["seq"], 7);
        assert_eq!(MessageEnvelope::from_json(&env.to_json()).unwrap(), env);
    }

    #[test]
    fn type_names_round_trip() {
        for t in MessageType::ALL {
            assert_eq!(MessageType::parse(t.as_str()), Some(t));
            assert_eq!(serde_json::to_value(t).unwrap(), t.as_str());
        }
        assert_eq!(MessageType::parse("Bogus"), None);
    }

    #[test]
    fn payload_optional() {
        let env = MessageEnvelope::from_json(r#"{"type":"Snapshot","session_id":"s","sender_id":"p","seq":1}"#).unwrap();
        assert!(env.payload.is_null());
    }
}
