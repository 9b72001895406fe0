//! TCP and WebSocket listeners around a shared [`Hub`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use futures_util::future::ready;
use futures_util::{Sink, SinkExt, Stream, StreamExt};
use serde::Serialize;
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::{watch, Notify};
use tokio::task::JoinHandle;
use tokio_tungstenite::tungstenite;
use tokio_util::codec::{Framed, LinesCodec};

use crate::hub::{ConnId, Hub, HubStats, Outcome};
use crate::protocol::Message;
use crate::queue::{OutboundQueue, DEFAULT_CAPACITY};

pub const DEFAULT_TCP_ADDR: &str = "127.0.0.1:7070";
pub const DEFAULT_WS_ADDR: &str = "0.0.0.0:7071";
/// Longest accepted line on the TCP transport.
pub const MAX_LINE_BYTES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RelayConfig {
    pub tcp: Option<SocketAddr>,
    pub ws: Option<SocketAddr>,
    pub token: Option<String>,
    pub queue_capacity: usize,
}

impl Default for RelayConfig {
    fn default() -> Self {
        RelayConfig {
            tcp: Some(DEFAULT_TCP_ADDR.parse().expect("valid default")),
            ws: Some(DEFAULT_WS_ADDR.parse().expect("valid default")),
            token: None,
            queue_capacity: DEFAULT_CAPACITY,
        }
    }
}

impl RelayConfig {
    /// Defaults overridden by `CAPSTREAM_LISTEN`, `CAPSTREAM_WS_LISTEN` and `CAPSTREAM_TOKEN`.
    pub fn from_env() -> Result<Self, std::net::AddrParseError> {
        let mut cfg = RelayConfig::default();
        if let Ok(v) = std::env::var("CAPSTREAM_LISTEN") {
            cfg.tcp = Some(v.parse()?);
        }
        if let Ok(v) = std::env::var("CAPSTREAM_WS_LISTEN") {
            cfg.ws = Some(v.parse()?);
        }
        cfg.token = std::env::var("CAPSTREAM_TOKEN").ok().filter(|t| !t.is_empty());
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RelayStats {
    #[serde(flatten)]
    pub hub: HubStats,
    /// Frames discarded by full outbound queues, including closed connections.
    pub dropped_frames: u64,
}

struct Outbox {
    queue: Mutex<OutboundQueue>,
    notify: Notify,
    closed: Mutex<bool>,
}

impl Outbox {
    fn new(capacity: usize) -> Self {
        Outbox { queue: Mutex::new(OutboundQueue::new(capacity)), notify: Notify::new(), closed: Mutex::new(false) }
    }

    fn push(&self, msg: Message) {
        self.queue.lock().expect("queue lock").push(msg);
        self.notify.notify_one();
    }

    fn close(&self) {
        *self.closed.lock().expect("close lock") = true;
        self.notify.notify_one();
    }
}

struct Shared {
    hub: Mutex<Hub>,
    outboxes: Mutex<HashMap<ConnId, Arc<Outbox>>>,
    dropped: Mutex<u64>,
    capacity: usize,
}

impl Shared {
    fn register(&self) -> (ConnId, Arc<Outbox>) {
        let mut hub = self.hub.lock().expect("hub lock");
        let id = hub.connect();
        let outbox = Arc::new(Outbox::new(self.capacity));
        self.outboxes.lock().expect("outbox lock").insert(id, outbox.clone());
        (id, outbox)
    }

    /// Dispatches under the hub lock and enqueues while still holding it, so
    /// every connection sees messages in dispatch order.
    fn handle(&self, id: ConnId, raw: &str) -> bool {
        let mut hub = self.hub.lock().expect("hub lock");
        let Outcome { out, close } = hub.handle(id, raw);
        let outboxes = self.outboxes.lock().expect("outbox lock");
        for (to, msg) in out {
            if let Some(o) = outboxes.get(&to) {
                o.push(msg);
            }
        }
        close
    }

    fn unregister(&self, id: ConnId) {
        let mut hub = self.hub.lock().expect("hub lock");
        hub.disconnect(id);
        if let Some(o) = self.outboxes.lock().expect("outbox lock").remove(&id) {
            *self.dropped.lock().expect("dropped lock") += o.queue.lock().expect("queue lock").dropped();
            o.close();
        }
    }

    fn stats(&self) -> RelayStats {
        let hub = self.hub.lock().expect("hub lock").stats();
        let live: u64 = self
            .outboxes
            .lock()
            .expect("outbox lock")
            .values()
            .map(|o| o.queue.lock().expect("queue lock").dropped())
            .sum();
        RelayStats { hub, dropped_frames: live + *self.dropped.lock().expect("dropped lock") }
    }
}

/// A running relay. Dropping the handle does not stop it; call [`RelayHandle::shutdown`].
pub struct RelayHandle {
    shared: Arc<Shared>,
    tcp_addr: Option<SocketAddr>,
    ws_addr: Option<SocketAddr>,
    stop: watch::Sender<bool>,
    tasks: Vec<JoinHandle<()>>,
}

impl RelayHandle {
    pub fn tcp_addr(&self) -> Option<SocketAddr> {
        self.tcp_addr
    }

    pub fn ws_addr(&self) -> Option<SocketAddr> {
        self.ws_addr
    }

    pub fn stats(&self) -> RelayStats {
        self.shared.stats()
    }

    /// Stops accepting connections. Established connections run until their peers leave.
    pub async fn shutdown(self) {
        let _ = self.stop.send(true);
        for t in self.tasks {
            let _ = t.await;
        }
    }
}

/// Binds the configured listeners and starts accepting connections.
pub async fn start(cfg: RelayConfig) -> std::io::Result<RelayHandle> {
    let shared = Arc::new(Shared {
        hub: Mutex::new(Hub::new(cfg.token.clone())),
        outboxes: Mutex::new(HashMap::new()),
        dropped: Mutex::new(0),
        capacity: cfg.queue_capacity,
    });
    let (stop, stop_rx) = watch::channel(false);
    let mut tasks = Vec::new();
    let mut tcp_addr = None;
    let mut ws_addr = None;
    if let Some(addr) = cfg.tcp {
        let listener = TcpListener::bind(addr).await?;
        tcp_addr = Some(listener.local_addr()?);
        tracing::info!(addr = %tcp_addr.unwrap(), "tcp listener up");
        tasks.push(tokio::spawn(accept_loop(listener, shared.clone(), stop_rx.clone(), Transport::Tcp)));
    }
    if let Some(addr) = cfg.ws {
        let listener = TcpListener::bind(addr).await?;
        ws_addr = Some(listener.local_addr()?);
        tracing::info!(addr = %ws_addr.unwrap(), "websocket listener up");
        tasks.push(tokio::spawn(accept_loop(listener, shared.clone(), stop_rx, Transport::WebSocket)));
    }
    Ok(RelayHandle { shared, tcp_addr, ws_addr, stop, tasks })
}

#[derive(Clone, Copy)]
enum Transport {
    Tcp,
    WebSocket,
}

async fn accept_loop(
    listener: TcpListener,
    shared: Arc<Shared>,
    mut stop: watch::Receiver<bool>,
    transport: Transport,
) {
    loop {
        tokio::select! {
            _ = stop.changed() => break,
            accepted = listener.accept() => match accepted {
                Ok((stream, peer)) => {
                    let _ = stream.set_nodelay(true);
                    let shared = shared.clone();
                    tokio::spawn(async move {
                        match transport {
                            Transport::Tcp => serve_tcp(stream, shared).await,
                            Transport::WebSocket => serve_ws(stream, shared).await,
                        }
                        tracing::debug!(%peer, "connection closed");
                    });
                }
                Err(e) => tracing::warn!("accept failed: {e}"),
            },
        }
    }
}

async fn serve_tcp(stream: TcpStream, shared: Arc<Shared>) {
    let (sink, source) = Framed::new(stream, LinesCodec::new_with_max_length(MAX_LINE_BYTES)).split();
    let source = source.map(|r| r.map_err(|e| e.to_string()));
    run_connection(source, sink, shared).await;
}

async fn serve_ws(stream: TcpStream, shared: Arc<Shared>) {
    let ws = match tokio_tungstenite::accept_async(stream).await {
        Ok(ws) => ws,
        Err(e) => {
            tracing::debug!("websocket handshake failed: {e}");
            return;
        }
    };
    let (sink, source) = ws.split();
    let source = source.filter_map(|r| {
        ready(match r {
            Ok(tungstenite::Message::Text(t)) => Some(Ok(t)),
            Ok(tungstenite::Message::Close(_)) => Some(Err("closed".to_string())),
            Ok(_) => None,
            Err(e) => Some(Err(e.to_string())),
        })
    });
    let sink = sink.with(|s: String| ready(Ok::<_, tungstenite::Error>(tungstenite::Message::Text(s))));
    run_connection(source, sink, shared).await;
}

async fn run_connection<R, W, E>(mut source: R, mut sink: W, shared: Arc<Shared>)
where
    R: Stream<Item = Result<String, String>> + Unpin,
    W: Sink<String, Error = E> + Unpin + Send + 'static,
    E: std::fmt::Display,
{
    let (id, outbox) = shared.register();
    let writer_box = outbox.clone();
    let mut writer = tokio::spawn(async move {
        loop {
            let batch = writer_box.queue.lock().expect("queue lock").drain();
            for msg in batch {
                if let Err(e) = sink.feed(msg.to_json()).await {
                    tracing::debug!(conn = id, "write failed: {e}");
                    return;
                }
            }
            if sink.flush().await.is_err() {
                return;
            }
            if *writer_box.closed.lock().expect("close lock") && writer_box.queue.lock().expect("queue lock").is_empty()
            {
                let _ = sink.close().await;
                return;
            }
            writer_box.notify.notified().await;
        }
    });
    let mut writer_done = false;
    loop {
        tokio::select! {
            line = source.next() => match line {
                Some(Ok(raw)) => {
                    if raw.trim().is_empty() {
                        continue;
                    }
                    if shared.handle(id, &raw) {
                        break;
                    }
                }
                Some(Err(e)) => {
                    tracing::debug!(conn = id, "read failed: {e}");
                    break;
                }
                None => break,
            },
            _ = &mut writer => {
                writer_done = true;
                break;
            }
        }
    }
    shared.unregister(id);
    outbox.close();
    if !writer_done {
        let _ = tokio::time::timeout(std::time::Duration::from_secs(5), writer).await;
    }
}
