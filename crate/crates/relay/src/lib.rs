//! Streaming relay: publishers push transcript events, displays receive
//! either the raw events or frames rendered by a server-side engine per
//! display.
//!
//! [`hub`] holds all protocol logic and is transport-free; [`server`] wraps it
//! in TCP (LF-delimited JSON) and WebSocket (one JSON message per text frame)
//! listeners.

pub mod client;
pub mod hub;
pub mod protocol;
pub mod queue;
pub mod server;

pub use client::{ClientError, RelayClient};
pub use hub::{ConnId, Hub, HubStats, Outcome};
pub use protocol::{
    codes, validate_message, ConnectionState, Delivery, Hello, Message, ProtocolError, Role, Subscribe,
};
pub use server::{start, RelayConfig, RelayHandle, RelayStats};
