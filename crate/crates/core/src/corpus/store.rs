use std::sync::{Arc, Mutex, RwLock};

use super::{Corpus, CorpusError};

/// Single-writer, multi-reader holder of the live corpus.
///
/// Readers take an `Arc` snapshot and never block writers for longer than a
/// pointer swap. Writers run against a private copy; the copy replaces the
/// live corpus only when the mutation succeeds.
#[derive(Debug)]
pub struct CorpusStore {
    current: RwLock<Arc<Corpus>>,
    writer: Mutex<()>,
}

impl CorpusStore {
    pub fn new(corpus: Corpus) -> Self {
        Self {
            current: RwLock::new(Arc::new(corpus)),
            writer: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<Corpus> {
        self.current.read().expect("corpus lock poisoned").clone()
    }

    pub fn mutate<T>(
        &self,
        f: impl FnOnce(&mut Corpus) -> Result<T, CorpusError>,
    ) -> Result<T, CorpusError> {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let mut draft = (*self.snapshot()).clone();
        let out = f(&mut draft)?;
        *self.current.write().expect("corpus lock poisoned") = Arc::new(draft);
        Ok(out)
    }

    /// Swaps in a freshly loaded corpus. The version continues past the old
    /// one so a reload is never mistaken for an unchanged snapshot.
    pub fn replace(&self, mut corpus: Corpus) {
        let _guard = self.writer.lock().expect("writer lock poisoned");
        let mut current = self.current.write().expect("corpus lock poisoned");
        corpus.set_version(corpus.version().max(current.version() + 1));
        *current = Arc::new(corpus);
    }
}
