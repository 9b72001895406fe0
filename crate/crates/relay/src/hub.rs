//! Transport-independent relay state: connections, sessions and the
//! per-display engines. Every input yields the messages to deliver.

use std::collections::{BTreeSet, HashMap};

use capstream_core::presenters::{Control, PresenterError};
use capstream_core::{Engine, RenderFrame, SourceId, TranscriptEvent};
use serde::Serialize;

use crate::protocol::{
    codes, validate_message, ConnectionState, Delivery, Hello, Message, ProtocolError, Role, Subscribe,
};

pub type ConnId = u64;

/// Messages to deliver, in order, and whether the sending connection must close.
#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub out: Vec<(ConnId, Message)>,
    pub close: bool,
}

impl Outcome {
    fn reply(to: ConnId, msg: Message) -> Self {
        Outcome { out: vec![(to, msg)], close: false }
    }

    fn fatal(to: ConnId, err: ProtocolError) -> Self {
        Outcome { out: vec![(to, err.to_message())], close: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct HubStats {
    pub connections: usize,
    pub sessions: usize,
    pub events: u64,
    pub frames: u64,
}

/// A subscribed display; events-mode displays have no engine.
struct Display {
    engine: Option<Engine>,
    /// Latest event time seen; controls are stamped with it.
    clock: u64,
}

#[derive(Default)]
struct Conn {
    state: ConnectionState,
    display: Option<Display>,
}

#[derive(Default)]
struct Session {
    log: Vec<TranscriptEvent>,
    last_seq: HashMap<SourceId, u64>,
    publishers: BTreeSet<ConnId>,
    subscribers: BTreeSet<ConnId>,
    /// Set when the last publisher says bye; display engines then flush.
    ended: bool,
}

pub struct Hub {
    token: Option<String>,
    next_id: ConnId,
    conns: HashMap<ConnId, Conn>,
    sessions: HashMap<String, Session>,
    events: u64,
    frames: u64,
}

impl Hub {
    pub fn new(token: Option<String>) -> Self {
        Hub { token, next_id: 0, conns: HashMap::new(), sessions: HashMap::new(), events: 0, frames: 0 }
    }

    pub fn connect(&mut self) -> ConnId {
        let id = self.next_id;
        self.next_id += 1;
        self.conns.insert(id, Conn::default());
        id
    }

    /// Forgets a connection. Nothing is sent to anyone else.
    pub fn disconnect(&mut self, id: ConnId) {
        let Some(conn) = self.conns.remove(&id) else { return };
        let session = match conn.state {
            ConnectionState::Publisher { session, .. } | ConnectionState::Display { session, .. } => session,
            ConnectionState::AwaitingHello => return,
        };
        if let Some(s) = self.sessions.get_mut(&session) {
            s.publishers.remove(&id);
            s.subscribers.remove(&id);
        }
    }

    pub fn state(&self, id: ConnId) -> Option<&ConnectionState> {
        self.conns.get(&id).map(|c| &c.state)
    }

    pub fn session_log(&self, session: &str) -> Option<&[TranscriptEvent]> {
        self.sessions.get(session).map(|s| s.log.as_slice())
    }

    pub fn stats(&self) -> HubStats {
        HubStats {
            connections: self.conns.len(),
            sessions: self.sessions.len(),
            events: self.events,
            frames: self.frames,
        }
    }

    /// Validates and dispatches one raw message from `id`.
    pub fn handle(&mut self, id: ConnId, raw: &str) -> Outcome {
        let Some(conn) = self.conns.get(&id) else { return Outcome { out: Vec::new(), close: true } };
        match validate_message(raw, &conn.state) {
            Ok(msg) => self.dispatch(id, msg),
            Err(e) => {
                tracing::debug!(conn = id, code = e.code, "{}", e.msg);
                Outcome::fatal(id, e)
            }
        }
    }

    /// Applies an already validated message.
    pub fn dispatch(&mut self, id: ConnId, msg: Message) -> Outcome {
        let outcome = match msg {
            Message::Hello(h) => self.hello(id, h),
            Message::Subscribe(s) => self.subscribe(id, s),
            Message::Event(e) => self.event(id, e),
            Message::Control(c) => self.control(id, &c),
            Message::Bye => self.bye(id),
            Message::Frame(_) | Message::Error { .. } => {
                Outcome::fatal(id, ProtocolError::new(codes::ROLE_VIOLATION, "clients may not send frame or error"))
            }
        };
        self.frames += outcome.out.iter().filter(|(_, m)| matches!(m, Message::Frame(_))).count() as u64;
        outcome
    }

    fn hello(&mut self, id: ConnId, h: Hello) -> Outcome {
        if self.token.is_some() && h.token != self.token {
            return Outcome::fatal(id, ProtocolError::new(codes::BAD_TOKEN, "bad or missing token"));
        }
        let session = self.sessions.entry(h.session.clone()).or_default();
        let state = match h.role {
            Role::Publisher => {
                session.publishers.insert(id);
                session.ended = false;
                ConnectionState::Publisher { session: h.session, source: h.source }
            }
            Role::Display => ConnectionState::Display { session: h.session, subscribed: false },
        };
        self.conns.entry(id).or_default().state = state;
        Outcome::default()
    }

    /// Registers a display. Frames-mode subscribers get the backlog frames,
    /// or else one frame of the current screen.
    fn subscribe(&mut self, id: ConnId, sub: Subscribe) -> Outcome {
        let config = sub.config.unwrap_or_default();
        let engine = match sub.delivery {
            Delivery::Events => None,
            Delivery::Frames => match Engine::new(config) {
                Ok(e) => Some(e.with_anchor(sub.anchor.unwrap_or_default())),
                Err(e) => return Outcome::reply(id, Message::error(codes::INVALID_CONFIG, e.to_string())),
            },
        };
        if let ConnectionState::Display { session, .. } = &self.conns[&id].state {
            if let Some(old) = self.sessions.get_mut(session) {
                old.subscribers.remove(&id);
            }
        }
        let session = self.sessions.entry(sub.session.clone()).or_default();
        session.subscribers.insert(id);
        let mut display = Display { engine, clock: session.log.iter().map(|e| e.t_ms).max().unwrap_or(0) };
        let mut out = Vec::new();
        if sub.backlog {
            for e in &session.log {
                out.extend(deliver(&mut display, e).into_iter().map(|m| (id, m)));
            }
            if session.ended {
                out.extend(close_display(&mut display).into_iter().map(|m| (id, m)));
            }
        }
        // Frames-mode subscribers always get the current screen as confirmation.
        if out.is_empty() {
            if let Some(engine) = display.engine.as_mut() {
                out.push((id, Message::Frame(engine.render(display.clock))));
            }
        }
        let conn = self.conns.get_mut(&id).expect("live connection");
        conn.state = ConnectionState::Display { session: sub.session, subscribed: true };
        conn.display = Some(display);
        Outcome { out, close: false }
    }

    fn event(&mut self, id: ConnId, e: TranscriptEvent) -> Outcome {
        if let Err(err) = e.validate() {
            return Outcome::reply(id, Message::error(codes::INVALID_EVENT, err.to_string()));
        }
        let session = self.sessions.get_mut(&e.session_id).expect("publisher sessions exist");
        if let Some(&last) = session.last_seq.get(&e.source) {
            if e.seq <= last {
                return Outcome::reply(
                    id,
                    Message::error(codes::SEQ_REGRESSION, format!("{} seq {} after {last}", e.source, e.seq)),
                );
            }
        }
        session.last_seq.insert(e.source, e.seq);
        self.events += 1;
        let mut out = Vec::new();
        for &sub in &session.subscribers {
            if let Some(display) = self.conns.get_mut(&sub).and_then(|c| c.display.as_mut()) {
                out.extend(deliver(display, &e).into_iter().map(|m| (sub, m)));
            }
        }
        session.log.push(e);
        Outcome { out, close: false }
    }

    fn control(&mut self, id: ConnId, control: &Control) -> Outcome {
        let display = self.conns.get_mut(&id).and_then(|c| c.display.as_mut()).expect("subscribed display");
        let Some(engine) = display.engine.as_mut() else {
            return Outcome::reply(id, Message::error(codes::CONTROL_REJECTED, "events-mode displays have no engine"));
        };
        match engine.control(control, display.clock) {
            Ok(frames) => Outcome { out: frames.into_iter().map(|f| (id, Message::Frame(f))).collect(), close: false },
            Err(PresenterError::AdvancePastEnd) => {
                Outcome::reply(id, Message::error(codes::ADVANCE_PAST_END, PresenterError::AdvancePastEnd.to_string()))
            }
            Err(e) => Outcome::reply(id, Message::error(codes::CONTROL_REJECTED, e.to_string())),
        }
    }

    fn bye(&mut self, id: ConnId) -> Outcome {
        let mut out = Vec::new();
        if let Some(ConnectionState::Publisher { session, .. }) = self.conns.get(&id).map(|c| &c.state) {
            let session = self.sessions.get_mut(session).expect("publisher sessions exist");
            session.publishers.remove(&id);
            if session.publishers.is_empty() && !session.ended {
                session.ended = true;
                for &sub in &session.subscribers {
                    if let Some(display) = self.conns.get_mut(&sub).and_then(|c| c.display.as_mut()) {
                        out.extend(close_display(display).into_iter().map(|m| (sub, m)));
                    }
                }
            }
        }
        Outcome { out, close: true }
    }
}

fn deliver(display: &mut Display, e: &TranscriptEvent) -> Vec<Message> {
    display.clock = display.clock.max(e.t_ms);
    match display.engine.as_mut() {
        None => vec![Message::Event(e.clone())],
        Some(engine) => frames(engine.push_event(e)),
    }
}

fn close_display(display: &mut Display) -> Vec<Message> {
    match display.engine.as_mut() {
        Some(engine) => frames(engine.close_input(display.clock)),
        None => Vec::new(),
    }
}

fn frames(fs: Vec<RenderFrame>) -> Vec<Message> {
    fs.into_iter().map(Message::Frame).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hello(role: &str, source: Option<&str>) -> String {
        let src = source.map(|s| format!(r#","source":"{s}""#)).unwrap_or_default();
        format!(r#"{{"type":"hello","role":"{role}"{src},"session":"s","proto":1}}"#)
    }

    fn event(seq: u64, t: u64, text: &str) -> String {
        format!(
            r#"{{"type":"event","session":"s","source":"speaker","utt":"u{seq}","seq":{seq},"t_ms":{t},"text":"{text}"}}"#
        )
    }

    fn display(hub: &mut Hub, sub: &str) -> ConnId {
        let id = hub.connect();
        assert_eq!(hub.handle(id, &hello("display", None)), Outcome::default());
        let out = hub.handle(id, sub);
        assert!(!out.close, "{out:?}");
        id
    }

    fn publisher(hub: &mut Hub) -> ConnId {
        let id = hub.connect();
        assert_eq!(hub.handle(id, &hello("publisher", Some("speaker"))), Outcome::default());
        id
    }

    fn targets(o: &Outcome) -> Vec<ConnId> {
        o.out.iter().map(|(c, _)| *c).collect()
    }

    const FRAMES: &str = r#"{"type":"subscribe","session":"s"}"#;

    #[test]
    fn fan_out_to_three_displays() {
        let mut hub = Hub::new(None);
        let ds: Vec<ConnId> = (0..3).map(|_| display(&mut hub, FRAMES)).collect();
        let p = publisher(&mut hub);
        let out = hub.handle(p, &event(1, 0, "hello there"));
        assert!(out.out.len() >= 3);
        for d in &ds {
            assert!(out.out.iter().any(|(c, m)| c == d && matches!(m, Message::Frame(_))));
        }
        assert_eq!(hub.stats().events, 1);
    }

    #[test]
    fn advance_reaches_only_its_display() {
        let mut hub = Hub::new(None);
        let a = display(&mut hub, FRAMES);
        let _b = display(&mut hub, FRAMES);
        let p = publisher(&mut hub);
        hub.handle(p, &event(1, 0, "one two three four"));
        let out = hub.handle(a, r#"{"type":"control","action":"advance"}"#);
        assert_eq!(targets(&out), vec![a]);
        assert!(matches!(&out.out[0].1, Message::Frame(_)));
    }

    #[test]
    fn seq_regression_is_dropped_and_reported() {
        let mut hub = Hub::new(None);
        let d = display(&mut hub, r#"{"type":"subscribe","session":"s","delivery":"events"}"#);
        let p = publisher(&mut hub);
        hub.handle(p, &event(5, 0, "a"));
        let out = hub.handle(p, &event(4, 10, "b"));
        assert!(!out.close);
        assert_eq!(out.out, vec![(p, Message::error(codes::SEQ_REGRESSION, "speaker seq 4 after 5"))]);
        let out = hub.handle(p, &event(6, 20, "c"));
        assert_eq!(targets(&out), vec![d]);
        assert_eq!(hub.session_log("s").unwrap().len(), 2);
    }

    #[test]
    fn protocol_violations_close() {
        let mut hub = Hub::new(None);
        let c = hub.connect();
        let out = hub.handle(c, &event(1, 0, "x"));
        assert!(out.close);
        assert!(matches!(out.out[0].1, Message::Error { code: codes::NOT_HELLO, .. }));

        let d = display(&mut hub, FRAMES);
        let out = hub.handle(d, &event(1, 0, "x"));
        assert!(out.close);
        assert!(matches!(out.out[0].1, Message::Error { code: codes::ROLE_VIOLATION, .. }));
    }

    #[test]
    fn token_is_checked() {
        let mut hub = Hub::new(Some("secret".into()));
        let c = hub.connect();
        let out = hub.handle(c, &hello("display", None));
        assert!(matches!(out.out[0].1, Message::Error { code: codes::BAD_TOKEN, .. }));
        let c = hub.connect();
        let ok = r#"{"type":"hello","role":"display","session":"s","proto":1,"token":"secret"}"#;
        assert_eq!(hub.handle(c, ok), Outcome::default());
    }

    #[test]
    fn backlog_replays_log() {
        let mut hub = Hub::new(None);
        let p = publisher(&mut hub);
        hub.handle(p, &event(1, 0, "a b"));
        hub.handle(p, &event(2, 10, "c"));
        let late = hub.connect();
        hub.handle(late, &hello("display", None));
        let out = hub.handle(late, r#"{"type":"subscribe","session":"s","delivery":"events","backlog":true}"#);
        assert_eq!(out.out.len(), 2);
        let live = display(&mut hub, FRAMES);
        assert!(hub.handle(live, r#"{"type":"control","action":"advance"}"#).out.len() == 1);
    }

    #[test]
    fn last_publisher_bye_ends_karaoke() {
        let mut hub = Hub::new(None);
        let d = display(&mut hub, FRAMES);
        let p = publisher(&mut hub);
        hub.handle(p, &event(1, 0, "one two"));
        let out = hub.handle(p, r#"{"type":"bye"}"#);
        assert!(out.close);
        hub.disconnect(p);
        let advance = r#"{"type":"control","action":"advance"}"#;
        let out = hub.handle(d, advance);
        assert!(matches!(&out.out[0].1, Message::Frame(f) if !f.end_of_stream));
        let out = hub.handle(d, advance);
        assert!(matches!(&out.out[0].1, Message::Frame(f) if f.end_of_stream));
        let out = hub.handle(d, advance);
        assert!(matches!(out.out[0].1, Message::Error { code: codes::ADVANCE_PAST_END, .. }));
        assert!(!out.close);
    }

    #[test]
    fn invalid_config_and_events_mode_controls() {
        let mut hub = Hub::new(None);
        let d = hub.connect();
        hub.handle(d, &hello("display", None));
        let out = hub.handle(d, r#"{"type":"subscribe","session":"s","config":{"wpm":1}}"#);
        assert!(matches!(out.out[0].1, Message::Error { code: codes::INVALID_CONFIG, .. }));
        let e = display(&mut hub, r#"{"type":"subscribe","session":"s","delivery":"events"}"#);
        let out = hub.handle(e, r#"{"type":"control","action":"advance"}"#);
        assert!(matches!(out.out[0].1, Message::Error { code: codes::CONTROL_REJECTED, .. }));
    }

    #[test]
    fn disconnect_leaves_others_alone() {
        let mut hub = Hub::new(None);
        let a = display(&mut hub, FRAMES);
        let b = display(&mut hub, FRAMES);
        let p = publisher(&mut hub);
        hub.handle(p, &event(1, 0, "x"));
        hub.disconnect(a);
        let out = hub.handle(p, &event(2, 10, "y"));
        assert!(targets(&out).iter().all(|c| *c == b));
        assert_eq!(hub.stats().connections, 2);
    }
}
