//! Named parameter storage and the `Graph` that ties parameters to a tape.
//!
//! Models allocate their parameters in a `ParamStore` once, at construction,
//! and keep `ParamId` handles. A forward pass opens a `Graph` over the store,
//! leafs each referenced parameter onto the tape exactly once, and records
//! which tape variable belongs to which parameter so optimizers can fetch
//! gradients by id afterwards.

use std::collections::HashMap;

use super::tape::{Gradients, Tape, Var};
use super::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(&self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Tensor>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, value: Tensor) -> ParamId {
        let name = name.into();
        debug_assert!(
            !self.names.contains(&name),
            "duplicate parameter name {name}"
        );
        self.names.push(name);
        self.values.push(value);
        ParamId(self.values.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.values[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.values[id.0]
    }

    pub fn set(&mut self, id: ParamId, value: Tensor) -> Result<()> {
        if value.shape() != self.values[id.0].shape() {
            return Err(Error::Shape(format!(
                "parameter {} has shape {:?}, refusing {:?}",
                self.names[id.0],
                self.values[id.0].shape(),
                value.shape()
            )));
        }
        self.values[id.0] = value;
        Ok(())
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> + '_ {
        (0..self.values.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &str, &Tensor)> {
        self.names
            .iter()
            .zip(&self.values)
            .enumerate()
            .map(|(i, (n, v))| (ParamId(i), n.as_str(), v))
    }

    /// Total number of scalar entries across the listed parameters.
    pub fn numel(&self, ids: &[ParamId]) -> usize {
        ids.iter().map(|id| self.values[id.0].len()).sum()
    }
}

/// A tape plus the parameter bookkeeping for one forward/backward pass.
pub struct Graph<'s> {
    pub tape: Tape,
    store: &'s ParamStore,
    frozen_depth: u32,
    param_vars: HashMap<usize, (Var, bool)>,
}

impl<'s> Graph<'s> {
    pub fn new(store: &'s ParamStore) -> Self {
        Graph {
            tape: Tape::new(),
            store,
            frozen_depth: 0,
            param_vars: HashMap::new(),
        }
    }

    pub fn store(&self) -> &ParamStore {
        self.store
    }

    /// Leafs the parameter onto the tape (once per graph). Inside a
    /// `frozen` scope the leaf does not track gradients, but downstream
    /// activations still propagate through it.
    pub fn param(&mut self, id: ParamId) -> Var {
        let frozen = self.frozen_depth > 0;
        if let Some(&(var, was_frozen)) = self.param_vars.get(&id.0) {
            assert_eq!(
                was_frozen,
                frozen,
                "parameter {} used both frozen and trainable in one graph",
                self.store.name(id)
            );
            return var;
        }
        let var = self.tape.leaf(self.store.get(id).clone(), !frozen);
        self.param_vars.insert(id.0, (var, frozen));
        var
    }

    /// Constant input (no gradient).
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.tape.leaf(value, false)
    }

    /// Runs `f` with parameter leafing switched to frozen.
    pub fn frozen<R>(&mut self, f: impl FnOnce(&mut Self) -> Result<R>) -> Result<R> {
        self.frozen_depth += 1;
        let out = f(self);
        self.frozen_depth -= 1;
        out
    }

    pub fn value(&self, var: Var) -> &Tensor {
        self.tape.value(var)
    }

    pub fn backward(&mut self, loss: Var) -> Result<Gradients> {
        self.tape.backward(loss)
    }

    /// Gradient of one parameter, zeros if it was never touched or frozen.
    pub fn param_grad(&self, grads: &Gradients, id: ParamId) -> Tensor {
        match self.param_vars.get(&id.0) {
            Some(&(var, _)) => grads
                .get(var)
                .cloned()
                .unwrap_or_else(|| Tensor::zeros(self.store.get(id).shape())),
            None => Tensor::zeros(self.store.get(id).shape()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn store_roundtrip_and_names() {
        let mut store = ParamStore::new();
        let a = store.add("w", Tensor::vector(vec![1.0, 2.0]));
        let b = store.add("b", Tensor::scalar(0.5));
        assert_eq!(store.name(a), "w");
        assert_eq!(store.get(b).item().unwrap(), 0.5);
        assert_eq!(store.numel(&[a, b]), 3);
        assert!(store.set(a, Tensor::scalar(1.0)).is_err());
    }
}
