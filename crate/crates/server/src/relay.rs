use std::sync::{Condvar, Mutex};

/// Counting gate that bounds concurrent upstream fetches.
pub struct RelayGate {
    cap: usize,
    busy: Mutex<usize>,
    freed: Condvar,
}

pub struct RelayPermit<'a> {
    gate: &'a RelayGate,
}

impl RelayGate {
    pub fn new(cap: usize) -> Self {
        Self {
            cap: cap.max(1),
            busy: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    /// Blocks until a slot is free.
    pub fn acquire(&self) -> RelayPermit<'_> {
        let mut busy = self.busy.lock().unwrap();
        while *busy >= self.cap {
            busy = self.freed.wait(busy).unwrap();
        }
        *busy += 1;
        RelayPermit { gate: self }
    }

    pub fn in_flight(&self) -> usize {
        *self.busy.lock().unwrap()
    }
}

impl Drop for RelayPermit<'_> {
    fn drop(&mut self) {
        *self.gate.busy.lock().unwrap() -= 1;
        self.gate.freed.notify_one();
    }
}
