//! Channel names.
//!
//! A [`Name`] is an integer identity plus the spelling used for printing.
//! Equality, ordering and hashing look only at the identity, so two binders
//! that happen to share a spelling are still distinct names. Free names are
//! interned by spelling, which lets an environment file and a process file
//! refer to the same channel without any extra resolution step.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn interner() -> &'static Mutex<HashMap<String, u64>> {
    static TABLE: OnceLock<Mutex<HashMap<String, u64>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(HashMap::new()))
}

#[derive(Clone)]
pub struct Name {
    id: u64,
    display: Arc<str>,
}

impl Name {
    /// The free name spelled `spelling`. Every call with the same spelling
    /// returns the same name.
    pub fn global(spelling: &str) -> Name {
        let mut table = interner().lock().unwrap_or_else(|e| e.into_inner());
        let id = *table
            .entry(spelling.to_string())
            .or_insert_with(|| NEXT_ID.fetch_add(1, Ordering::Relaxed));
        Name {
            id,
            display: Arc::from(spelling),
        }
    }

    /// A name distinct from every other name ever created, printed as
    /// `display` (modulo disambiguation by the printer).
    pub fn fresh(display: &str) -> Name {
        Name {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            display: Arc::from(display),
        }
    }

    /// A fresh copy of `self`: same spelling, new identity.
    pub fn refresh(&self) -> Name {
        Name {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            display: self.display.clone(),
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn display(&self) -> &str {
        &self.display
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for Name {}

impl Hash for Name {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.display, self.id)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}
