//! Homomorphism search between finite algebras.
//!
//! The search is a backtracking constraint solver: the smallest unassigned
//! source element is branched on with candidate images in increasing order,
//! and every assignment is propagated through the preserved operations. With
//! that branching rule the solutions come out in lexicographic order of their
//! map tables, which is the canonical order used throughout the crate.

use serde::{Deserialize, Serialize};

use crate::algebra::FiniteAlgebra;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Any,
    Injective,
    Surjective,
    Iso,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomKind {
    Heyting,
    Boolean,
    Stable,
    BoxPartial,
    Modal,
}

/// A map given by its full table over the source carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Homomorphism {
    pub kind: HomKind,
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(kind: HomKind, map: Vec<usize>) -> Self {
        Homomorphism { kind, map }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.map.len());
        self.map.iter().all(|v| seen.insert(*v))
    }

    pub fn is_surjective_onto(&self, target_size: usize) -> bool {
        let mut hit = vec![false; target_size];
        for &v in &self.map {
            if v < target_size {
                hit[v] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism, kind: HomKind) -> Homomorphism {
        Homomorphism::new(kind, self.map.iter().map(|&v| other.map[v]).collect())
    }
}

/// Which operations a map must commute with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Preserve {
    pub bounds: bool,
    pub meet: bool,
    pub join: bool,
    pub imp: bool,
    pub neg: bool,
    pub boxed: bool,
}

impl Preserve {
    pub const HEYTING: Preserve = Preserve {
        bounds: true,
        meet: true,
        join: true,
        imp: true,
        neg: false,
        boxed: false,
    };
    pub const BOOLEAN: Preserve = Preserve {
        bounds: true,
        meet: true,
        join: true,
        imp: false,
        neg: true,
        boxed: false,
    };
    pub const MODAL: Preserve = Preserve {
        boxed: true,
        ..Preserve::BOOLEAN
    };
}

/// Exhaustive table check that `map` commutes with the chosen operations.
pub fn preserves(
    src: &dyn FiniteAlgebra,
    dst: &dyn FiniteAlgebra,
    map: &[usize],
    ops: Preserve,
) -> bool {
    let n = src.size();
    if map.len() != n || map.iter().any(|&v| v >= dst.size()) {
        return false;
    }
    if ops.bounds && (map[src.bot()] != dst.bot() || map[src.top()] != dst.top()) {
        return false;
    }
    for a in 0..n {
        let fa = map[a];
        if ops.neg && map[src.neg(a)] != dst.neg(fa) {
            return false;
        }
        if ops.boxed && map[src.boxed(a)] != dst.boxed(fa) {
            return false;
        }
        for b in 0..n {
            let fb = map[b];
            if ops.meet && map[src.meet(a, b)] != dst.meet(fa, fb) {
                return false;
            }
            if ops.join && map[src.join(a, b)] != dst.join(fa, fb) {
                return false;
            }
            if ops.imp && map[src.imp(a, b)] != dst.imp(fa, fb) {
                return false;
            }
        }
    }
    true
}

type Accept<'a> = &'a (dyn Fn(&[usize]) -> bool + Sync);

pub struct HomSearch<'a> {
    src: &'a dyn FiniteAlgebra,
    dst: &'a dyn FiniteAlgebra,
    ops: Preserve,
    mode: SearchMode,
    fixed: Vec<(usize, usize)>,
    limit: Option<usize>,
    accept: Option<Accept<'a>>,
}

impl<'a> HomSearch<'a> {
    pub fn new(src: &'a dyn FiniteAlgebra, dst: &'a dyn FiniteAlgebra, ops: Preserve) -> Self {
        HomSearch {
            src,
            dst,
            ops,
            mode: SearchMode::Any,
            fixed: Vec::new(),
            limit: None,
            accept: None,
        }
    }

    pub fn mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn fix(mut self, constraints: &[(usize, usize)]) -> Self {
        self.fixed.extend_from_slice(constraints);
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    /// Extra condition checked on every complete candidate map.
    pub fn accept(mut self, pred: Accept<'a>) -> Self {
        self.accept = Some(pred);
        self
    }

    pub fn first(self) -> Option<Vec<usize>> {
        self.limit(1).run().into_iter().next()
    }

    pub fn count(self) -> usize {
        self.run().len()
    }

    pub fn run(self) -> Vec<Vec<usize>> {
        let (n, m) = (self.src.size(), self.dst.size());
        let feasible = match self.mode {
            SearchMode::Any => true,
            SearchMode::Injective => n <= m,
            SearchMode::Surjective => n >= m,
            SearchMode::Iso => n == m,
        };
        if !feasible || m == 0 || self.limit == Some(0) {
            return Vec::new();
        }
        if self.fixed.iter().any(|&(x, v)| x >= n || v >= m) {
            return Vec::new();
        }
        let mut engine = Engine {
            search: &self,
            assign: vec![UNSET; n],
            assigned: Vec::with_capacity(n),
            used: vec![0; m],
            distinct: 0,
            out: Vec::new(),
        };
        let mut queue = Vec::new();
        let mut ok = true;
        if self.ops.bounds {
            ok &= engine.set(self.src.bot(), self.dst.bot(), &mut queue);
            ok &= engine.set(self.src.top(), self.dst.top(), &mut queue);
        }
        for &(x, v) in &self.fixed {
            ok = ok && engine.set(x, v, &mut queue);
        }
        if ok && engine.propagate(&mut queue) && engine.surjection_possible() {
            engine.search();
        }
        engine.out
    }
}

const UNSET: usize = usize::MAX;

struct Engine<'s, 'a> {
    search: &'s HomSearch<'a>,
    assign: Vec<usize>,
    assigned: Vec<usize>,
    used: Vec<u32>,
    distinct: usize,
    out: Vec<Vec<usize>>,
}

impl Engine<'_, '_> {
    fn injective(&self) -> bool {
        matches!(self.search.mode, SearchMode::Injective | SearchMode::Iso)
    }

    fn surjective(&self) -> bool {
        matches!(self.search.mode, SearchMode::Surjective | SearchMode::Iso)
    }

    fn set(&mut self, x: usize, v: usize, queue: &mut Vec<usize>) -> bool {
        let cur = self.assign[x];
        if cur != UNSET {
            return cur == v;
        }
        if self.injective() && self.used[v] > 0 {
            return false;
        }
        self.assign[x] = v;
        self.assigned.push(x);
        self.used[v] += 1;
        if self.used[v] == 1 {
            self.distinct += 1;
        }
        queue.push(x);
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.assigned.len() > len {
            let x = self.assigned.pop().expect("non-empty trail");
            let v = self.assign[x];
            self.used[v] -= 1;
            if self.used[v] == 0 {
                self.distinct -= 1;
            }
            self.assign[x] = UNSET;
        }
    }

    fn propagate(&mut self, queue: &mut Vec<usize>) -> bool {
        let (src, dst, ops) = (self.search.src, self.search.dst, self.search.ops);
        while let Some(x) = queue.pop() {
            let v = self.assign[x];
            if ops.neg && !self.set(src.neg(x), dst.neg(v), queue) {
                return false;
            }
            if ops.boxed && !self.set(src.boxed(x), dst.boxed(v), queue) {
                return false;
            }
            let mut i = 0;
            while i < self.assigned.len() {
                let y = self.assigned[i];
                let w = self.assign[y];
                if ops.meet && !self.set(src.meet(x, y), dst.meet(v, w), queue) {
                    return false;
                }
                if ops.join && !self.set(src.join(x, y), dst.join(v, w), queue) {
                    return false;
                }
                if ops.imp
                    && !(self.set(src.imp(x, y), dst.imp(v, w), queue)
                        && self.set(src.imp(y, x), dst.imp(w, v), queue))
                {
                    return false;
                }
                i += 1;
            }
        }
        true
    }

    fn surjection_possible(&self) -> bool {
        !self.surjective()
            || self.dst_size() - self.distinct <= self.assign.len() - self.assigned.len()
    }

    fn dst_size(&self) -> usize {
        self.used.len()
    }

    /// Returns true once the result limit is reached.
    fn search(&mut self) -> bool {
        let Some(x) = self.assign.iter().position(|&v| v == UNSET) else {
            if self.surjective() && self.distinct != self.dst_size() {
                return false;
            }
            if let Some(pred) = self.search.accept {
                if !pred(&self.assign) {
                    return false;
                }
            }
            self.out.push(self.assign.clone());
            return self.search.limit.is_some_and(|l| self.out.len() >= l);
        };
        for v in 0..self.dst_size() {
            let mark = self.assigned.len();
            let mut queue = Vec::new();
            if self.set(x, v, &mut queue)
                && self.propagate(&mut queue)
                && self.surjection_possible()
                && self.search()
            {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}
