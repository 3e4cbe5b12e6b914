use std::sync::{Arc, Mutex};

use chrono::{DateTime, Duration, Utc};

/// Source of timestamps for events, decisions and links.
///
/// `Stepping` hands out strictly increasing instants and is what fixture
/// loading uses, so two loads of the same fixture produce identical stores.
#[derive(Debug, Clone, Default)]
pub enum Clock {
    #[default]
    System,
    Fixed(DateTime<Utc>),
    Stepping { next: Arc<Mutex<DateTime<Utc>>>, step: Duration },
}

impl Clock {
    pub fn stepping(start: DateTime<Utc>, step: Duration) -> Self {
        Clock::Stepping { next: Arc::new(Mutex::new(start)), step }
    }

    pub fn now(&self) -> DateTime<Utc> {
        match self {
            Clock::System => Utc::now(),
            Clock::Fixed(t) => *t,
            Clock::Stepping { next, step } => {
                let mut guard = next.lock().expect("clock mutex poisoned");
                let t = *guard;
                *guard = t + *step;
                t
            }
        }
    }
}
