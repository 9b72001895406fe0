//! Minimal TCP client for publishers, displays and tests.

use std::time::Duration;

use capstream_core::presenters::Control;
use capstream_core::{EngineConfig, SourceId, TranscriptEvent};
use futures_util::{SinkExt, StreamExt};
use thiserror::Error;
use tokio::net::{TcpStream, ToSocketAddrs};
use tokio_util::codec::{Framed, LinesCodec};

use crate::protocol::{Delivery, Hello, Message, Role, Subscribe, PROTO_VERSION};
use crate::server::MAX_LINE_BYTES;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("framing: {0}")]
    Codec(#[from] tokio_util::codec::LinesCodecError),
    #[error("bad message from relay: {0}")]
    Decode(#[from] serde_json::Error),
    #[error("timed out waiting for the relay")]
    Timeout,
}

pub struct RelayClient {
    framed: Framed<TcpStream, LinesCodec>,
}

impl RelayClient {
    pub async fn connect(addr: impl ToSocketAddrs) -> Result<Self, ClientError> {
        let stream = TcpStream::connect(addr).await?;
        stream.set_nodelay(true)?;
        Ok(RelayClient { framed: Framed::new(stream, LinesCodec::new_with_max_length(MAX_LINE_BYTES)) })
    }

    /// Connects and says hello as a publisher.
    pub async fn publisher(
        addr: impl ToSocketAddrs,
        session: &str,
        source: Option<SourceId>,
        token: Option<String>,
    ) -> Result<Self, ClientError> {
        let mut c = RelayClient::connect(addr).await?;
        c.send(&Message::Hello(Hello {
            role: Role::Publisher,
            source,
            session: session.into(),
            proto: PROTO_VERSION,
            token,
        }))
        .await?;
        Ok(c)
    }

    /// Connects, says hello as a display and subscribes.
    pub async fn display(
        addr: impl ToSocketAddrs,
        session: &str,
        delivery: Delivery,
        config: Option<EngineConfig>,
        token: Option<String>,
    ) -> Result<Self, ClientError> {
        let mut c = RelayClient::connect(addr).await?;
        c.send(&Message::Hello(Hello {
            role: Role::Display,
            source: None,
            session: session.into(),
            proto: PROTO_VERSION,
            token,
        }))
        .await?;
        c.send(&Message::Subscribe(Subscribe {
            session: session.into(),
            delivery,
            config,
            anchor: None,
            backlog: false,
        }))
        .await?;
        Ok(c)
    }

    pub async fn send(&mut self, msg: &Message) -> Result<(), ClientError> {
        self.send_raw(&msg.to_json()).await
    }

    pub async fn send_raw(&mut self, line: &str) -> Result<(), ClientError> {
        self.framed.send(line).await?;
        Ok(())
    }

    pub async fn publish(&mut self, e: &TranscriptEvent) -> Result<(), ClientError> {
        self.send_raw(&e.to_record()).await
    }

    pub async fn control(&mut self, c: Control) -> Result<(), ClientError> {
        self.send(&Message::Control(c)).await
    }

    /// Next message, or `None` once the relay closes the connection.
    pub async fn recv(&mut self) -> Result<Option<Message>, ClientError> {
        match self.framed.next().await {
            None => Ok(None),
            Some(line) => Ok(Some(serde_json::from_str(&line?)?)),
        }
    }

    pub async fn recv_timeout(&mut self, limit: Duration) -> Result<Option<Message>, ClientError> {
        tokio::time::timeout(limit, self.recv()).await.map_err(|_| ClientError::Timeout)?
    }

    /// Sends `bye` and waits for the relay to close.
    pub async fn bye(mut self) -> Result<(), ClientError> {
        self.send(&Message::Bye).await?;
        while self.recv_timeout(Duration::from_secs(5)).await?.is_some() {}
        Ok(())
    }
}
