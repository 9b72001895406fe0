//! Wire messages. Every message is one JSON object tagged by `"type"`; on TCP
//! each is terminated by `\n`, on WebSocket each is one text frame.

use capstream_core::presenters::Control;
use capstream_core::{EngineConfig, FaceAnchor, RenderFrame, SourceId, TranscriptEvent};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PROTO_VERSION: u32 = 1;

/// Error codes carried in `error` messages.
pub mod codes {
    /// First message on a connection was not `hello`.
    pub const NOT_HELLO: u16 = 1001;
    /// Message type not allowed for the connection's role.
    pub const ROLE_VIOLATION: u16 = 1002;
    /// Display sent a control before subscribing.
    pub const NOT_SUBSCRIBED: u16 = 1003;
    /// Unparseable JSON, unknown type or missing fields.
    pub const MALFORMED: u16 = 1004;
    pub const BAD_PROTO: u16 = 1005;
    pub const BAD_TOKEN: u16 = 1006;
    /// Event seq not above the last one seen for its source; the event is dropped.
    pub const SEQ_REGRESSION: u16 = 2001;
    /// Event failed domain validation; the event is dropped.
    pub const INVALID_EVENT: u16 = 2002;
    /// Subscribe carried an invalid engine config.
    pub const INVALID_CONFIG: u16 = 2003;
    /// Karaoke advance after the presentation ended.
    pub const ADVANCE_PAST_END: u16 = 3001;
    /// Control rejected by the display engine.
    pub const CONTROL_REJECTED: u16 = 3002;

    /// Codes below 2000 close the connection.
    pub fn is_fatal(code: u16) -> bool {
        code < 2000
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Publisher,
    Display,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Delivery {
    /// Raw transcript events, forwarded verbatim.
    Events,
    /// Frames rendered by a server-side engine owned by this display.
    #[default]
    Frames,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hello {
    pub role: Role,
    /// Publishers may pin the source they speak for; unpinned publishers may send either.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceId>,
    pub session: String,
    pub proto: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subscribe {
    pub session: String,
    #[serde(default)]
    pub delivery: Delivery,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<EngineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<FaceAnchor>,
    /// Replay the session's event log before going live.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub backlog: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Message {
    Hello(Hello),
    Subscribe(Subscribe),
    Event(TranscriptEvent),
    Control(Control),
    Frame(RenderFrame),
    Error { code: u16, msg: String },
    Bye,
}

impl Message {
    pub fn error(code: u16, msg: impl Into<String>) -> Self {
        Message::Error { code, msg: msg.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Message::Hello(_) => "hello",
            Message::Subscribe(_) => "subscribe",
            Message::Event(_) => "event",
            Message::Control(_) => "control",
            Message::Frame(_) => "frame",
            Message::Error { .. } => "error",
            Message::Bye => "bye",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("protocol error {code}: {msg}")]
pub struct ProtocolError {
    pub code: u16,
    pub msg: String,
}

impl ProtocolError {
    pub fn new(code: u16, msg: impl Into<String>) -> Self {
        ProtocolError { code, msg: msg.into() }
    }

    pub fn to_message(&self) -> Message {
        Message::error(self.code, self.msg.clone())
    }
}

/// What a connection has established so far.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ConnectionState {
    #[default]
    AwaitingHello,
    Publisher {
        session: String,
        source: Option<SourceId>,
    },
    Display {
        session: String,
        subscribed: bool,
    },
}

/// Parses one raw message and checks it against the connection's role.
pub fn validate_message(raw: &str, state: &ConnectionState) -> Result<Message, ProtocolError> {
    let msg: Message = serde_json::from_str(raw)
        .map_err(|e| ProtocolError::new(codes::MALFORMED, format!("malformed message: {e}")))?;
    let reject = |what: &str| Err(ProtocolError::new(codes::ROLE_VIOLATION, what.to_string()));
    match (state, &msg) {
        (ConnectionState::AwaitingHello, Message::Hello(h)) => {
            if h.proto != PROTO_VERSION {
                return Err(ProtocolError::new(codes::BAD_PROTO, format!("unsupported proto {}", h.proto)));
            }
            if h.session.is_empty() {
                return Err(ProtocolError::new(codes::MALFORMED, "empty session"));
            }
            Ok(msg)
        }
        (ConnectionState::AwaitingHello, other) => {
            Err(ProtocolError::new(codes::NOT_HELLO, format!("expected hello, got {}", other.kind())))
        }
        (_, Message::Hello(_)) => reject("duplicate hello"),
        (_, Message::Bye) => Ok(msg),
        (ConnectionState::Publisher { session, source }, Message::Event(e)) => {
            if &e.session_id != session {
                return reject(&format!("event for session {:?} on a {session:?} connection", e.session_id));
            }
            if source.is_some_and(|s| s != e.source) {
                return reject(&format!("{} event on a connection pinned to {}", e.source, source.unwrap()));
            }
            Ok(msg)
        }
        (ConnectionState::Publisher { .. }, other) => reject(&format!("publishers may not send {}", other.kind())),
        (ConnectionState::Display { .. }, Message::Subscribe(_)) => Ok(msg),
        (ConnectionState::Display { subscribed, .. }, Message::Control(_)) => {
            if *subscribed {
                Ok(msg)
            } else {
                Err(ProtocolError::new(codes::NOT_SUBSCRIBED, "control before subscribe"))
            }
        }
        (ConnectionState::Display { .. }, other) => reject(&format!("displays may not send {}", other.kind())),
    }
}
