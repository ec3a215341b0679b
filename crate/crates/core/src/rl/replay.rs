//! Fixed-capacity replay buffer with uniform sampling.

use std::sync::Mutex;

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition<T> {
    pub obs: Vec<T>,
    /// Squashed action in `[-1, 1]`.
    pub action: Vec<T>,
    pub reward: T,
    pub next_obs: Vec<T>,
    /// Episode ended in a terminal state (not a time limit), so no bootstrap.
    pub done: bool,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    items: Vec<Transition<T>>,
    next: usize,
}

impl<T: Clone> ReplayBuffer<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            items: Vec::with_capacity(capacity.min(1 << 16)),
            next: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Appends, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition<T>) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.next] = t;
        }
        self.next = (self.next + 1) % self.capacity;
    }

    pub fn get(&self, i: usize) -> &Transition<T> {
        &self.items[i]
    }

    /// Uniform indices, with replacement.
    pub fn sample_indices<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        (0..n).map(|_| rng.random_range(0..self.items.len())).collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Transition<T>> {
        self.sample_indices(n, rng)
            .into_iter()
            .map(|i| self.items[i].clone())
            .collect()
    }
}

/// Buffer shared between rollout workers: appends may come from any thread,
/// sampling is serialised by the lock.
#[derive(Debug)]
pub struct SharedReplay<T> {
    inner: Mutex<ReplayBuffer<T>>,
}

impl<T: Clone> SharedReplay<T> {
    pub fn new(capacity: usize) -> Self {
        Self {
            inner: Mutex::new(ReplayBuffer::new(capacity)),
        }
    }

    pub fn push(&self, t: Transition<T>) {
        self.inner.lock().expect("replay lock poisoned").push(t);
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("replay lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Transition<T>> {
        self.inner.lock().expect("replay lock poisoned").sample(n, rng)
    }

    pub fn into_inner(self) -> ReplayBuffer<T> {
        self.inner.into_inner().expect("replay lock poisoned")
    }
}
