//! Bounded per-connection outbound queue.

use std::collections::VecDeque;

use crate::protocol::Message;

pub const DEFAULT_CAPACITY: usize = 1024;

/// FIFO of messages awaiting the socket writer.
///
/// When full, the oldest frame that is not an end-of-stream frame is dropped
/// to make room. Other messages are never dropped, so the queue can exceed
/// its capacity only when it holds nothing droppable.
#[derive(Debug)]
pub struct OutboundQueue {
    buf: VecDeque<Message>,
    capacity: usize,
    dropped: u64,
}

fn droppable(m: &Message) -> bool {
    matches!(m, Message::Frame(f) if !f.end_of_stream)
}

impl OutboundQueue {
    pub fn new(capacity: usize) -> Self {
        OutboundQueue { buf: VecDeque::new(), capacity: capacity.max(1), dropped: 0 }
    }

    pub fn push(&mut self, msg: Message) {
        if self.buf.len() >= self.capacity {
            if let Some(i) = self.buf.iter().position(droppable) {
                self.buf.remove(i);
                self.dropped += 1;
            } else if droppable(&msg) {
                self.dropped += 1;
                return;
            }
        }
        self.buf.push_back(msg);
    }

    pub fn pop(&mut self) -> Option<Message> {
        self.buf.pop_front()
    }

    pub fn drain(&mut self) -> Vec<Message> {
        self.buf.drain(..).collect()
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Frames discarded on overflow since creation.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }
}

impl Default for OutboundQueue {
    fn default() -> Self {
        OutboundQueue::new(DEFAULT_CAPACITY)
    }
}
