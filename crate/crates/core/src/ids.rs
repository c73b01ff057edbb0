//! String-backed identifiers for graph elements.
//!
//! Everything at desk scale is addressed by a human-readable id so that
//! files, validation reports and move scripts can refer to elements
//! directly. Iteration order is always the `Ord` order of the ids, which
//! keeps every operation deterministic.

use std::fmt;

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(s: impl Into<String>) -> Self {
                Self(s.into())
            }
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }
    };
}

id_type!(
    /// A vertex of an embedded graph.
    VertexId
);
id_type!(
    /// An edge of an embedded graph.
    EdgeId
);
id_type!(
    /// One of the two traversal directions of an edge.
    DartId
);
id_type!(
    /// A region (connected component of the cut surface).
    RegionId
);
id_type!(
    /// A boundary component of the underlying surface.
    BoundaryId
);

/// Deterministic fresh-name source for surgeries that create elements.
#[derive(Debug, Default, Clone)]
pub struct NameGen {
    counter: u64,
}

impl NameGen {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `prefix<k>` for the least `k` not present in `taken`.
    pub fn fresh(&mut self, prefix: &str, taken: impl Fn(&str) -> bool) -> String {
        loop {
            let cand = format!("{}{}", prefix, self.counter);
            self.counter += 1;
            if !taken(&cand) {
                return cand;
            }
        }
    }
}
