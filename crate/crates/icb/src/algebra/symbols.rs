use std::collections::HashMap;
use std::sync::Arc;

/// Dense id of a registered symbol. Ids order monomial comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymId(pub u32);

/// Frozen symbol table. Built once per computation, then shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbols {
    names: Vec<String>,
    laurent: Vec<bool>,
    index: HashMap<String, SymId>,
}

impl Symbols {
    pub fn builder() -> SymbolsBuilder {
        SymbolsBuilder { names: Vec::new(), laurent: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.names[id.0 as usize]
    }

    pub fn id(&self, name: &str) -> Option<SymId> {
        self.index.get(name).copied()
    }

    /// Whether negative exponents are allowed for this symbol.
    pub fn is_laurent(&self, id: SymId) -> bool {
        self.laurent[id.0 as usize]
    }
}

/// Accumulates registrations, then freezes into an [`Arc<Symbols>`].
pub struct SymbolsBuilder {
    names: Vec<String>,
    laurent: Vec<bool>,
}

impl SymbolsBuilder {
    pub fn add(&mut self, name: &str, laurent: bool) -> SymId {
        assert!(
            !self.names.iter().any(|n| n == name),
            "symbol {name} registered twice"
        );
        let id = SymId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.laurent.push(laurent);
        id
    }

    pub fn finish(self) -> Arc<Symbols> {
        let index = self
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), SymId(i as u32)))
            .collect();
        Arc::new(Symbols { names: self.names, laurent: self.laurent, index })
    }
}
