//! Families: a child variable plus its ordered parent set, and the mixed-radix
//! indexing of parent configurations shared by CPTs and count tables.

use super::dataset::Value;

/// Which slice a parent lives in, relative to its child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lag {
    /// Slice `t`, for a child in slice `t + 1`.
    Previous,
    /// The child's own slice.
    Current,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParentRef {
    pub lag: Lag,
    pub var: usize,
}

impl ParentRef {
    pub fn previous(var: usize) -> Self {
        Self {
            lag: Lag::Previous,
            var,
        }
    }

    pub fn current(var: usize) -> Self {
        Self { lag: Lag::Current, var }
    }
}

/// Prior families model slice 0; transition families model slice `t + 1`
/// given slices `t` and `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKind {
    Prior,
    Transition,
}

/// A child and its parents in canonical order: previous-slice parents by
/// ascending variable, then same-slice parents by ascending variable.
///
/// The derived ordering (kind, child, parents) is the tie-breaking order used
/// by structure search.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family {
    pub kind: FamilyKind,
    pub child: usize,
    pub parents: Vec<ParentRef>,
}

impl Family {
    pub fn prior(child: usize, parent: Option<usize>) -> Self {
        Self {
            kind: FamilyKind::Prior,
            child,
            parents: parent.into_iter().map(ParentRef::current).collect(),
        }
    }

    /// `inter` must be sorted and must not contain duplicates.
    pub fn transition(child: usize, inter: &[usize], intra: Option<usize>) -> Self {
        debug_assert!(inter.windows(2).all(|w| w[0] < w[1]));
        let mut parents: Vec<ParentRef> = inter.iter().map(|&v| ParentRef::previous(v)).collect();
        parents.extend(intra.map(ParentRef::current));
        Self {
            kind: FamilyKind::Transition,
            child,
            parents,
        }
    }

    pub fn inter_parents(&self) -> impl Iterator<Item = usize> + '_ {
        self.parents.iter().filter(|p| p.lag == Lag::Previous).map(|p| p.var)
    }

    pub fn intra_parent(&self) -> Option<usize> {
        self.parents.iter().find(|p| p.lag == Lag::Current).map(|p| p.var)
    }

    /// Position of the child inside a two-slice window laid out as
    /// `[slice t (n cells), slice t+1 (n cells)]`.
    pub fn child_slot(&self, n: usize) -> usize {
        match self.kind {
            FamilyKind::Prior => self.child,
            FamilyKind::Transition => n + self.child,
        }
    }

    pub fn parent_slot(&self, parent: ParentRef, n: usize) -> usize {
        match (self.kind, parent.lag) {
            (FamilyKind::Prior, _) => parent.var,
            (FamilyKind::Transition, Lag::Previous) => parent.var,
            (FamilyKind::Transition, Lag::Current) => n + parent.var,
        }
    }
}

/// A family together with the cardinalities of its child and parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyShape {
    pub family: Family,
    pub child_card: usize,
    pub parent_cards: Vec<usize>,
}

impl FamilyShape {
    pub fn new(family: Family, cardinalities: &[usize]) -> Self {
        let child_card = cardinalities[family.child];
        let parent_cards = family.parents.iter().map(|p| cardinalities[p.var]).collect();
        Self {
            family,
            child_card,
            parent_cards,
        }
    }

    /// Number of parent configurations `q`; 1 when parentless.
    pub fn num_configs(&self) -> usize {
        self.parent_cards.iter().product()
    }

    /// Free parameters `q (r - 1)`.
    pub fn num_free_params(&self) -> usize {
        self.num_configs() * (self.child_card - 1)
    }

    /// Mixed-radix index of a parent configuration; the first parent is the
    /// most significant digit.
    pub fn config_index(&self, parent_values: &[Value]) -> usize {
        debug_assert_eq!(parent_values.len(), self.parent_cards.len());
        parent_values
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&v, &r)| acc * r + v as usize)
    }

    /// Inverse of [`config_index`](Self::config_index).
    pub fn config_values(&self, mut index: usize) -> Vec<Value> {
        let mut out = vec![0; self.parent_cards.len()];
        for (slot, &r) in out.iter_mut().zip(&self.parent_cards).rev() {
            *slot = (index % r) as Value;
            index /= r;
        }
        out
    }

    pub fn indexer(&self, n: usize) -> FamilyIndexer {
        let mut strides = vec![0; self.parent_cards.len()];
        let mut stride = self.child_card;
        for (s, &r) in strides.iter_mut().zip(&self.parent_cards).rev() {
            *s = stride;
            stride *= r;
        }
        FamilyIndexer {
            child_slot: self.family.child_slot(n),
            parent_slots: self
                .family
                .parents
                .iter()
                .map(|&p| self.family.parent_slot(p, n))
                .collect(),
            strides,
        }
    }
}

/// Precomputed offsets mapping a fully assigned two-slice window straight to
/// the flat `(config, value)` position of a `q × r` table.
#[derive(Debug, Clone)]
pub struct FamilyIndexer {
    pub child_slot: usize,
    pub parent_slots: Vec<usize>,
    strides: Vec<usize>,
}

impl FamilyIndexer {
    #[inline]
    pub fn flat_index(&self, window: &[Value]) -> usize {
        let mut idx = window[self.child_slot] as usize;
        for (&slot, &stride) in self.parent_slots.iter().zip(&self.strides) {
            idx += window[slot] as usize * stride;
        }
        idx
    }

    /// Whether any cell this family reads is in `slots`.
    pub fn touches(&self, slots: &[usize]) -> bool {
        slots.contains(&self.child_slot) || self.parent_slots.iter().any(|s| slots.contains(s))
    }
}
