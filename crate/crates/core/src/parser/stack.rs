use super::Tree;
use crate::grammar::Symbol;
use crate::position::Range;
use crate::tables::StateId;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackElement {
    pub symbol: Symbol,
    pub tree: Arc<Tree>,
    /// State the automaton is in once this element is on top.
    pub state: StateId,
    pub range: Range,
}

#[derive(Debug)]
pub(crate) struct Frame {
    pub elem: StackElement,
    pub next: Option<Arc<Frame>>,
    pub depth: usize,
}

/// Persistent cons-list stack; clones share every frame.
#[derive(Clone, Debug, Default)]
pub struct Stack(pub(crate) Option<Arc<Frame>>);

impl Stack {
    pub fn new() -> Self {
        Stack(None)
    }

    pub fn push(&self, elem: StackElement) -> Stack {
        let depth = self.len() + 1;
        Stack(Some(Arc::new(Frame { elem, next: self.0.clone(), depth })))
    }

    pub fn top(&self) -> Option<&StackElement> {
        self.0.as_ref().map(|f| &f.elem)
    }

    pub fn pop(&self) -> Option<Stack> {
        self.0.as_ref().map(|f| Stack(f.next.clone()))
    }

    pub fn len(&self) -> usize {
        self.0.as_ref().map_or(0, |f| f.depth)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Elements from top to bottom.
    pub fn iter(&self) -> impl Iterator<Item = &StackElement> {
        let mut cur = self.0.as_deref();
        std::iter::from_fn(move || {
            let f = cur?;
            cur = f.next.as_deref();
            Some(&f.elem)
        })
    }

    /// Elements from bottom to top.
    pub fn to_vec(&self) -> Vec<StackElement> {
        let mut v: Vec<StackElement> = self.iter().cloned().collect();
        v.reverse();
        v
    }

    pub(crate) fn frames(&self) -> impl Iterator<Item = &Arc<Frame>> {
        let mut cur = self.0.as_ref();
        std::iter::from_fn(move || {
            let f = cur?;
            cur = f.next.as_ref();
            Some(f)
        })
    }
}

impl PartialEq for Stack {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        for (a, b) in self.frames().zip(other.frames()) {
            if Arc::ptr_eq(a, b) {
                return true;
            }
            if a.elem != b.elem {
                return false;
            }
        }
        true
    }
}

impl Eq for Stack {}
