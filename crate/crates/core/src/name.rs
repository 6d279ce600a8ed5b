//! Names with freshness tags.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

/// A name `base` with a freshness tag. User-written names carry tag 0;
/// renaming during substitution bumps the tag.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    base: Arc<str>,
    tag: u32,
}

impl Name {
    pub fn new(base: &str) -> Self {
        Name {
            base: Arc::from(base),
            tag: 0,
        }
    }

    pub fn tagged(base: &str, tag: u32) -> Self {
        Name {
            base: Arc::from(base),
            tag,
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn tag(&self) -> u32 {
        self.tag
    }

    fn with_tag(&self, tag: u32) -> Self {
        Name {
            base: self.base.clone(),
            tag,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tag == 0 {
            f.write_str(&self.base)
        } else {
            write!(f, "{}_{}", self.base, self.tag)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// Source of fresh names for one renaming session.
///
/// Tracks the printed form of every name already in use, so a generated
/// `x_1` never collides with a user-written name spelled `x_1`.
#[derive(Debug, Default, Clone)]
pub struct Fresh {
    used: HashSet<(Arc<str>, u32)>,
}

/// The printed form of a name as (base, tag), splitting a user-written
/// `_digits` suffix so that `x_1` and `x` tagged 1 compare equal.
fn printed_key(name: &Name) -> (Arc<str>, u32) {
    if name.tag == 0 {
        if let Some((base, digits)) = name.base.rsplit_once('_') {
            if !digits.starts_with('0') && digits.bytes().all(|b| b.is_ascii_digit()) {
                if let Ok(tag) = digits.parse::<u32>() {
                    return (Arc::from(base), tag);
                }
            }
        }
    }
    (name.base.clone(), name.tag)
}

impl Fresh {
    pub fn new() -> Self {
        Fresh::default()
    }

    pub fn avoiding<'a>(names: impl IntoIterator<Item = &'a Name>) -> Self {
        let mut fresh = Fresh::new();
        for n in names {
            fresh.reserve(n);
        }
        fresh
    }

    pub fn reserve(&mut self, name: &Name) {
        self.used.insert(printed_key(name));
    }

    /// A name sharing `like`'s base with the smallest unused positive tag.
    pub fn rename(&mut self, like: &Name) -> Name {
        let mut tag = 1;
        loop {
            let candidate = like.with_tag(tag);
            if self.used.insert(printed_key(&candidate)) {
                return candidate;
            }
            tag += 1;
        }
    }
}
