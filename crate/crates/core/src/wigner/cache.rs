//! Insert-once memo tables shared across threads.

use parking_lot::RwLock;
use std::collections::HashMap;
use std::hash::Hash;

#[derive(Debug, Default)]
pub struct MemoTable<K, V> {
    inner: RwLock<HashMap<K, V>>,
}

impl<K: Eq + Hash + Copy, V: Clone> MemoTable<K, V> {
    pub fn new() -> Self {
        MemoTable { inner: RwLock::new(HashMap::new()) }
    }

    /// Returns the cached value or computes it without holding the lock.
    /// Concurrent racers compute identical values; the first insert wins.
    pub fn get_or_insert_with(&self, key: K, f: impl FnOnce() -> V) -> V {
        if let Some(v) = self.inner.read().get(&key) {
            return v.clone();
        }
        let v = f();
        self.inner.write().entry(key).or_insert(v).clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().len()
    }
}
