//! Live session server for the hri-affect engine.
//!
//! One tick loop owns the [`Session`] (and with it the engine). Client
//! connections parse their messages and feed an ordered queue; the loop
//! drains the queue at each tick and broadcasts the resulting state frame to
//! every connection. Nothing mutable is shared between the two sides.

pub mod protocol;
pub mod server;
pub mod session;

pub use protocol::{Hello, Inbound, Outbound, ProtocolError, StateFrame, PROTOCOL_VERSION};
pub use server::{start, ServerHandle};
pub use session::Session;
