//! A live session: the engine plus its pending-input queue and the log of
//! everything injected, independent of any transport.

use std::sync::Arc;

use hri_affect::percepts::PerceptInput;
use hri_affect::scenario::{Scenario, ScenarioEvent};
use hri_affect::{Engine, Setup};

use crate::protocol::{Hello, Inbound, ProtocolError, StateFrame};

pub struct Session {
    engine: Engine,
    pending: Vec<PerceptInput>,
    log: Vec<ScenarioEvent>,
}

impl Session {
    pub fn new(setup: Arc<Setup>) -> Session {
        Session {
            engine: Engine::new(setup),
            pending: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn setup(&self) -> &Setup {
        self.engine.setup()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn hello(&self) -> Hello {
        Hello::new(self.engine.setup())
    }

    /// Queues a message for the next tick, in arrival order.
    pub fn submit(&mut self, msg: Inbound) {
        let p = msg.into_percept(&self.engine.setup().percepts);
        self.pending.push(p);
    }

    pub fn submit_text(&mut self, text: &str) -> Result<(), ProtocolError> {
        let msg = Inbound::parse(text, &self.engine.setup().percepts)?;
        self.submit(msg);
        Ok(())
    }

    /// Runs one tick on everything queued since the last one.
    pub fn tick(&mut self) -> StateFrame {
        let percepts = std::mem::take(&mut self.pending);
        if !percepts.is_empty() {
            self.log.push(ScenarioEvent {
                tick: self.engine.tick(),
                percepts: percepts.clone(),
            });
        }
        let record = self.engine.step(&percepts);
        StateFrame {
            record,
            motives: self.engine.motive_snapshot(),
        }
    }

    /// Everything applied so far as a replayable scenario. The last event is
    /// padded with an empty tick so a replay covers the whole session.
    pub fn injection_log(&self) -> Scenario {
        let mut events = self.log.clone();
        let ticks = self.engine.tick();
        if ticks > 0 && events.last().is_none_or(|e| e.tick + 1 < ticks) {
            events.push(ScenarioEvent {
                tick: ticks - 1,
                percepts: Vec::new(),
            });
        }
        Scenario { events }
    }
}
