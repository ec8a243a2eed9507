use std::collections::HashMap;

/// Bidirectional name table used while constructing artifacts.
#[derive(Debug, Clone, Default)]
pub(crate) struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Interner {
    pub fn from_names(names: &[String]) -> Self {
        let mut i = Interner::default();
        for n in names {
            i.intern(n);
        }
        i
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    /// Interns a name that must not exist yet; primes are appended until it
    /// is unused.
    pub fn fresh(&mut self, base: String) -> u32 {
        let mut name = base;
        while self.ids.contains_key(&name) {
            name.push('\'');
        }
        self.intern(&name)
    }

    pub fn into_names(self) -> Vec<String> {
        self.names
    }
}

/// Is `a` a prefix of `b` or `b` a prefix of `a`?
pub(crate) fn prefix_comparable<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    let n = a.len().min(b.len());
    a[..n] == b[..n]
}
