//! WebSocket transport around a [`Session`].
//!
//! Routes: `GET /ws` (live protocol), `GET /health`, and the data files
//! observers render from: `GET /data/percept_catalog.json` and
//! `GET /data/emotion_sectors.json`.

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use hri_affect::percepts::PerceptInput;
use hri_affect::Setup;
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc, oneshot, watch};
use tokio::task::JoinHandle;
use tokio::time::MissedTickBehavior;

use crate::protocol::{Inbound, Outbound};
use crate::session::Session;

/// Frames buffered per client before a slow client starts skipping.
const BROADCAST_CAPACITY: usize = 256;

#[derive(Clone)]
struct AppState {
    setup: Arc<Setup>,
    hello: Arc<str>,
    inbound: mpsc::UnboundedSender<PerceptInput>,
    frames: broadcast::Sender<Arc<str>>,
    tick: watch::Receiver<u64>,
}

/// A running server. Dropping it leaves the server running; call
/// [`ServerHandle::shutdown`] to stop it and recover the session.
pub struct ServerHandle {
    local_addr: SocketAddr,
    frames: broadcast::Sender<Arc<str>>,
    tick: watch::Receiver<u64>,
    stop: oneshot::Sender<()>,
    tick_loop: JoinHandle<Session>,
    http: JoinHandle<io::Result<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    /// Serialized state frames, as broadcast to clients.
    pub fn subscribe(&self) -> broadcast::Receiver<Arc<str>> {
        self.frames.subscribe()
    }

    /// Number of ticks completed so far.
    pub fn ticks(&self) -> u64 {
        *self.tick.borrow()
    }

    /// Stops ticking and serving; returns the session for inspection (for
    /// example its injection log).
    pub async fn shutdown(self) -> Session {
        let _ = self.stop.send(());
        let session = self.tick_loop.await.expect("tick loop does not panic");
        self.http.abort();
        session
    }
}

/// Starts the tick loop and serves the live protocol on `listener`.
pub async fn start(setup: Arc<Setup>, listener: TcpListener) -> io::Result<ServerHandle> {
    let local_addr = listener.local_addr()?;
    let session = Session::new(Arc::clone(&setup));
    let hello: Arc<str> = Outbound::Hello(session.hello()).to_json().into();
    let (inbound_tx, inbound_rx) = mpsc::unbounded_channel();
    let (frames, _) = broadcast::channel(BROADCAST_CAPACITY);
    let (tick_tx, tick_rx) = watch::channel(0);
    let (stop_tx, stop_rx) = oneshot::channel();

    let period = Duration::from_secs_f64(1.0 / setup.config.tick_hz);
    let tick_loop = tokio::spawn(run_ticks(
        session,
        period,
        inbound_rx,
        frames.clone(),
        tick_tx,
        stop_rx,
    ));

    let state = AppState {
        setup,
        hello,
        inbound: inbound_tx,
        frames: frames.clone(),
        tick: tick_rx.clone(),
    };
    let app = Router::new()
        .route("/ws", get(ws_upgrade))
        .route("/health", get(health))
        .route("/data/percept_catalog.json", get(percept_catalog))
        .route("/data/emotion_sectors.json", get(emotion_sectors))
        .with_state(state);
    let http = tokio::spawn(async move { axum::serve(listener, app).await });
    tracing::info!(%local_addr, "serving live session");

    Ok(ServerHandle {
        local_addr,
        frames,
        tick: tick_rx,
        stop: stop_tx,
        tick_loop,
        http,
    })
}

/// The single writer: drains queued input, ticks, broadcasts.
async fn run_ticks(
    mut session: Session,
    period: Duration,
    mut inbound: mpsc::UnboundedReceiver<PerceptInput>,
    frames: broadcast::Sender<Arc<str>>,
    tick: watch::Sender<u64>,
    mut stop: oneshot::Receiver<()>,
) -> Session {
    let mut interval = tokio::time::interval(period);
    interval.set_missed_tick_behavior(MissedTickBehavior::Delay);
    loop {
        tokio::select! {
            biased;
            _ = &mut stop => break,
            Some(p) = inbound.recv() => session.submit(Inbound::Inject(p)),
            _ = interval.tick() => {
                let frame = session.tick();
                // no receivers is fine: the session runs headless
                let _ = frames.send(Outbound::State(frame).to_json().into());
                tick.send_replace(session.engine().tick());
            }
        }
    }
    session
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| client(socket, state))
}

async fn client(mut socket: WebSocket, state: AppState) {
    let mut frames = state.frames.subscribe();
    if socket
        .send(Message::Text(state.hello.as_ref().into()))
        .await
        .is_err()
    {
        return;
    }
    loop {
        tokio::select! {
            msg = socket.recv() => {
                let reply = match msg {
                    Some(Ok(Message::Text(text))) => match Inbound::parse(text.as_str(), &state.setup.percepts) {
                        Ok(m) => {
                            let p = m.into_percept(&state.setup.percepts);
                            if state.inbound.send(p).is_err() {
                                break;
                            }
                            None
                        }
                        Err(e) => Some(e.to_string()),
                    },
                    Some(Ok(Message::Binary(_))) => Some("binary frames are not supported; send JSON text".to_string()),
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => None,
                };
                if let Some(detail) = reply {
                    let err = Outbound::Error { detail }.to_json();
                    if socket.send(Message::Text(err.into())).await.is_err() {
                        break;
                    }
                }
            }
            frame = frames.recv() => match frame {
                Ok(f) => {
                    if socket.send(Message::Text(f.as_ref().into())).await.is_err() {
                        break;
                    }
                }
                Err(broadcast::error::RecvError::Lagged(n)) => {
                    tracing::warn!(skipped = n, "slow client skipped state frames");
                }
                Err(broadcast::error::RecvError::Closed) => break,
            },
        }
    }
}

async fn health(State(state): State<AppState>) -> impl IntoResponse {
    Json(serde_json::json!({
        "tick": *state.tick.borrow(),
        "clients": state.frames.receiver_count(),
        "engine_version": env!("CARGO_PKG_VERSION"),
    }))
}

async fn percept_catalog(State(state): State<AppState>) -> impl IntoResponse {
    Json(state.setup.percepts.entries().to_vec())
}

async fn emotion_sectors(State(state): State<AppState>) -> impl IntoResponse {
    Json(state.setup.sectors.to_file())
}
