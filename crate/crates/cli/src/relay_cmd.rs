use std::net::SocketAddr;
use std::time::Duration;

use capstream_core::ingest::parse_log;
use capstream_relay::{codes, start, Message, RelayClient, RelayConfig};
use clap::Args;
use tokio::time::Instant;

use crate::exit::{fail, Classify, CliResult, INPUT, PROTOCOL};
use crate::io::read_input;

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TCP listen address
    #[arg(long, env = "CAPSTREAM_LISTEN", default_value = capstream_relay::server::DEFAULT_TCP_ADDR)]
    pub listen: SocketAddr,
    /// WebSocket listen address
    #[arg(long, env = "CAPSTREAM_WS_LISTEN", default_value = capstream_relay::server::DEFAULT_WS_ADDR)]
    pub ws_listen: SocketAddr,
    /// Disable the WebSocket listener
    #[arg(long)]
    pub no_ws: bool,
    /// Shared token clients must present in hello
    #[arg(long, env = "CAPSTREAM_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
}

pub async fn serve(args: &ServeArgs) -> CliResult {
    let cfg = RelayConfig {
        tcp: Some(args.listen),
        ws: (!args.no_ws).then_some(args.ws_listen),
        token: args.token.clone().filter(|t| !t.is_empty()),
        ..RelayConfig::default()
    };
    let relay = start(cfg).await.input()?;
    if let Some(a) = relay.tcp_addr() {
        eprintln!("tcp listening on {a}");
    }
    if let Some(a) = relay.ws_addr() {
        eprintln!("websocket listening on {a}");
    }
    tokio::signal::ctrl_c().await.input()?;
    let stats = relay.stats();
    relay.shutdown().await;
    eprintln!("{}", serde_json::to_string(&stats).expect("stats serialize"));
    Ok(())
}

#[derive(Debug, Args)]
pub struct FeedArgs {
    /// Relay TCP address
    #[arg(long, env = "CAPSTREAM_LISTEN", default_value = capstream_relay::server::DEFAULT_TCP_ADDR)]
    pub relay: String,
    /// Transcript log (JSON lines); `-` for stdin
    #[arg(long, default_value = "-")]
    pub log: String,
    /// Session to publish into; defaults to the log's first session
    #[arg(long)]
    pub session: Option<String>,
    /// Playback rate relative to the log's clock; 0 sends as fast as possible
    #[arg(long, default_value_t = 1.0)]
    pub speed: f64,
    #[arg(long, env = "CAPSTREAM_TOKEN", hide_env_values = true)]
    pub token: Option<String>,
}

pub async fn feed(args: &FeedArgs) -> CliResult {
    if !(args.speed >= 0.0 && args.speed.is_finite()) {
        return Err(fail(INPUT, format!("speed {} must be finite and >= 0", args.speed)));
    }
    let events = parse_log(&read_input(&args.log)?).input()?;
    let Some(first) = events.first() else { return Ok(()) };
    let session = args.session.clone().unwrap_or_else(|| first.session_id.clone());
    if let Some(e) = events.iter().find(|e| e.session_id != session) {
        return Err(fail(INPUT, format!("event seq {} belongs to session {:?}, not {session:?}", e.seq, e.session_id)));
    }
    let mut client =
        RelayClient::publisher(args.relay.as_str(), &session, None, args.token.clone()).await.protocol()?;

    let t0 = first.t_ms;
    let start = Instant::now();
    let mut errors = 0usize;
    for e in &events {
        let due = if args.speed > 0.0 {
            start + Duration::from_secs_f64(e.t_ms.saturating_sub(t0) as f64 / 1000.0 / args.speed)
        } else {
            start
        };
        loop {
            tokio::select! {
                biased;
                msg = client.recv() => match msg.protocol()? {
                    Some(m) => errors += report(m)?,
                    None => return Err(fail(PROTOCOL, "relay closed the connection")),
                },
                _ = tokio::time::sleep_until(due) => break,
            }
        }
        client.publish(e).await.protocol()?;
    }
    client.send(&Message::Bye).await.protocol()?;
    while let Some(m) = client.recv_timeout(Duration::from_secs(5)).await.protocol()? {
        errors += report(m)?;
    }
    if errors > 0 {
        return Err(fail(PROTOCOL, format!("relay rejected {errors} event(s)")));
    }
    Ok(())
}

/// Prints relay errors; fatal ones end the feed.
fn report(m: Message) -> CliResult<usize> {
    match m {
        Message::Error { code, msg } if codes::is_fatal(code) => {
            Err(fail(PROTOCOL, format!("relay error {code}: {msg}")))
        }
        Message::Error { code, msg } => {
            eprintln!("relay error {code}: {msg}");
            Ok(1)
        }
        _ => Ok(0),
    }
}
