//! Finite posets, finite distributive lattices and their Heyting structure.
//!
//! A [`HeytingAlgebra`] is stored as explicit `meet`/`join`/`imp` tables over
//! element indices; the order is recovered as `a ≤ b ⇔ meet(a, b) = a`.
//! [`downset_heyting`] and [`join_irreducible_poset`] are the two halves of
//! Birkhoff duality between finite posets and finite distributive lattices.

use std::collections::HashMap;
use std::fmt;

use crate::algebra::{FiniteAlgebra, Limits, Signature};
use crate::error::{Error, Result};
use crate::hom::{HomKind, HomSearch, Homomorphism, Preserve, SearchMode};

/// Largest supported poset; downsets are stored as `u64` masks.
pub const MAX_POSET_POINTS: usize = 63;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    size: usize,
    leq: Vec<Vec<bool>>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel: Vec<(usize, usize)> = (0..self.size)
            .flat_map(|i| (0..self.size).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.leq[i][j])
            .collect();
        f.debug_struct("FinitePoset")
            .field("size", &self.size)
            .field("strict", &rel)
            .finish()
    }
}

impl FinitePoset {
    /// Builds a poset from its relation matrix, checking the partial-order axioms.
    pub fn new(leq: Vec<Vec<bool>>) -> Result<Self> {
        let size = leq.len();
        if size > MAX_POSET_POINTS {
            return Err(Error::cap("poset points", size as u128, MAX_POSET_POINTS as u128));
        }
        if let Some(i) = leq.iter().position(|row| row.len() != size) {
            return Err(Error::Malformed(format!(
                "row {i} of the order relation has {} entries, expected {size}",
                leq[i].len()
            )));
        }
        let p = FinitePoset { size, leq };
        p.check_order()?;
        Ok(p)
    }

    fn check_order(&self) -> Result<()> {
        let n = self.size;
        for i in 0..n {
            if !self.leq[i][i] {
                return Err(Error::Precondition(format!("order not reflexive at {i}")));
            }
            for j in 0..n {
                if i != j && self.leq[i][j] && self.leq[j][i] {
                    return Err(Error::Precondition(format!(
                        "order not antisymmetric at ({i}, {j})"
                    )));
                }
                for k in 0..n {
                    if self.leq[i][j] && self.leq[j][k] && !self.leq[i][k] {
                        return Err(Error::Precondition(format!(
                            "order not transitive at ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn chain(n: usize) -> Self {
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        FinitePoset { size: n, leq }
    }

    pub fn antichain(n: usize) -> Self {
        let leq = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        FinitePoset { size: n, leq }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.leq
    }

    /// Mask of the points below `j` (inclusive).
    pub fn down(&self, j: usize) -> u64 {
        (0..self.size)
            .filter(|&i| self.leq[i][j])
            .fold(0, |m, i| m | (1 << i))
    }

    pub fn is_downset(&self, set: u64) -> bool {
        (0..self.size).all(|j| set & (1 << j) == 0 || self.down(j) & !set == 0)
    }

    /// Largest downset contained in `set`.
    pub fn interior(&self, set: u64) -> u64 {
        (0..self.size)
            .filter(|&j| self.down(j) & !set == 0)
            .fold(0, |m, j| m | (1 << j))
    }

    /// All downsets as masks, in increasing numeric order. Fails once more
    /// than `cap` downsets have been produced.
    pub fn downsets(&self, cap: usize) -> Result<Vec<u64>> {
        let downs: Vec<u64> = (0..self.size).map(|j| self.down(j)).collect();
        // a linear extension: fewer predecessors first
        let mut order: Vec<usize> = (0..self.size).collect();
        order.sort_by_key(|&j| (downs[j].count_ones(), j));
        let mut out = Vec::new();
        fn walk(
            order: &[usize],
            downs: &[u64],
            pos: usize,
            cur: u64,
            cap: usize,
            out: &mut Vec<u64>,
        ) -> bool {
            if pos == order.len() {
                out.push(cur);
                return out.len() <= cap;
            }
            let j = order[pos];
            if !walk(order, downs, pos + 1, cur, cap, out) {
                return false;
            }
            let below = downs[j] & !(1 << j);
            if below & !cur == 0 {
                return walk(order, downs, pos + 1, cur | (1 << j), cap, out);
            }
            true
        }
        if !walk(&order, &downs, 0, 0, cap, &mut out) {
            return Err(Error::cap("downsets", out.len() as u128, cap as u128));
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The poset induced on the points `keep`, relabelled in the given order.
    pub fn restrict(&self, keep: &[usize]) -> FinitePoset {
        let leq = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.leq[i][j]).collect())
            .collect();
        FinitePoset {
            size: keep.len(),
            leq,
        }
    }

    /// Order-isomorphism search by brute force over permutations respecting
    /// the number of points below and above each point.
    pub fn is_isomorphic(&self, other: &FinitePoset) -> bool {
        if self.size != other.size {
            return false;
        }
        let inv = |p: &FinitePoset, i: usize| {
            let below = (0..p.size).filter(|&j| p.leq[j][i]).count();
            let above = (0..p.size).filter(|&j| p.leq[i][j]).count();
            (below, above)
        };
        let a: Vec<_> = (0..self.size).map(|i| inv(self, i)).collect();
        let b: Vec<_> = (0..other.size).map(|i| inv(other, i)).collect();
        let mut image = vec![usize::MAX; self.size];
        let mut used = vec![false; self.size];
        fn extend(
            p: &FinitePoset,
            q: &FinitePoset,
            a: &[(usize, usize)],
            b: &[(usize, usize)],
            i: usize,
            image: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if i == p.size {
                return true;
            }
            for j in 0..q.size {
                if used[j] || a[i] != b[j] {
                    continue;
                }
                let consistent = (0..i).all(|k| {
                    p.leq[k][i] == q.leq[image[k]][j] && p.leq[i][k] == q.leq[j][image[k]]
                });
                if consistent {
                    image[i] = j;
                    used[j] = true;
                    if extend(p, q, a, b, i + 1, image, used) {
                        return true;
                    }
                    used[j] = false;
                }
            }
            false
        }
        extend(self, other, &a, &b, 0, &mut image, &mut used)
    }
}

/// A finite Heyting algebra given by operation tables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HeytingAlgebra {
    size: usize,
    meet: Vec<u16>,
    join: Vec<u16>,
    imp: Vec<u16>,
    bot: usize,
    top: usize,
}

impl fmt::Debug for HeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeytingAlgebra")
            .field("size", &self.size)
            .field("bot", &self.bot)
            .field("top", &self.top)
            .finish_non_exhaustive()
    }
}

/// Table-encoded carriers are limited so indices fit in `u16`.
pub const MAX_TABLE_SIZE: usize = u16::MAX as usize;

fn flatten(name: &str, rows: &[Vec<usize>], size: usize) -> Result<Vec<u16>> {
    if rows.len() != size {
        return Err(Error::Malformed(format!(
            "{name} table has {} rows, expected {size}",
            rows.len()
        )));
    }
    let mut out = Vec::with_capacity(size * size);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != size {
            return Err(Error::Malformed(format!(
                "{name} row {i} has {} entries, expected {size}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= size {
                return Err(Error::Malformed(format!(
                    "{name}[{i}][{j}] = {v} is out of range 0..{size}"
                )));
            }
            out.push(v as u16);
        }
    }
    Ok(out)
}

impl HeytingAlgebra {
    /// Builds an algebra from raw tables. Only the shape and index ranges
    /// are checked here; the axioms are checked by [`validate_heyting`].
    pub fn from_tables(
        meet: &[Vec<usize>],
        join: &[Vec<usize>],
        imp: &[Vec<usize>],
        bot: usize,
        top: usize,
    ) -> Result<Self> {
        let size = meet.len();
        if size == 0 {
            return Err(Error::Malformed("empty carrier".into()));
        }
        if size > MAX_TABLE_SIZE {
            return Err(Error::cap("carrier size", size as u128, MAX_TABLE_SIZE as u128));
        }
        if bot >= size || top >= size {
            return Err(Error::Malformed(format!(
                "bounds ({bot}, {top}) out of range 0..{size}"
            )));
        }
        Ok(HeytingAlgebra {
            size,
            meet: flatten("meet", meet, size)?,
            join: flatten("join", join, size)?,
            imp: flatten("imp", imp, size)?,
            bot,
            top,
        })
    }

    /// Builds the algebra from lattice operations given as functions,
    /// deriving implication as the relative pseudocomplement. Fails if some
    /// relative pseudocomplement does not exist (non-distributive input).
    pub fn from_lattice(
        size: usize,
        meet: impl Fn(usize, usize) -> usize,
        join: impl Fn(usize, usize) -> usize,
        bot: usize,
        top: usize,
    ) -> Result<Self> {
        if size == 0 || size > MAX_TABLE_SIZE {
            return Err(Error::cap("carrier size", size as u128, MAX_TABLE_SIZE as u128));
        }
        let mut mt = Vec::with_capacity(size * size);
        let mut jt = Vec::with_capacity(size * size);
        for a in 0..size {
            for b in 0..size {
                mt.push(meet(a, b) as u16);
                jt.push(join(a, b) as u16);
            }
        }
        let leq = |a: usize, b: usize| mt[a * size + b] as usize == a;
        let mut it = vec![0u16; size * size];
        for b in 0..size {
            for c in 0..size {
                // join of all x with x ∧ b ≤ c; it must itself satisfy the condition
                let mut acc = bot;
                for x in 0..size {
                    if leq(mt[x * size + b] as usize, c) {
                        acc = jt[acc * size + x] as usize;
                    }
                }
                if !leq(mt[acc * size + b] as usize, c) {
                    return Err(Error::Precondition(format!(
                        "no relative pseudocomplement for ({b}, {c}); lattice is not distributive"
                    )));
                }
                it[b * size + c] = acc as u16;
            }
        }
        Ok(HeytingAlgebra {
            size,
            meet: mt,
            join: jt,
            imp: it,
            bot,
            top,
        })
    }

    /// Flat row-major tables, already known to be in range.
    pub(crate) fn from_flat(
        size: usize,
        meet: Vec<u16>,
        join: Vec<u16>,
        imp: Vec<u16>,
        bot: usize,
        top: usize,
    ) -> Self {
        debug_assert!(meet.len() == size * size && join.len() == size * size);
        HeytingAlgebra {
            size,
            meet,
            join,
            imp,
            bot,
            top,
        }
    }

    pub fn trivial() -> Self {
        HeytingAlgebra {
            size: 1,
            meet: vec![0],
            join: vec![0],
            imp: vec![0],
            bot: 0,
            top: 0,
        }
    }

    /// The `n`-element chain `0 < 1 < … < n−1`.
    pub fn chain(n: usize) -> Self {
        assert!(n >= 1, "a chain needs at least one element");
        HeytingAlgebra::from_lattice(n, |a, b| a.min(b), |a, b| a.max(b), 0, n - 1)
            .expect("chains are distributive")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tables(&self) -> [Vec<Vec<usize>>; 3] {
        let rows = |t: &[u16]| {
            t.chunks(self.size)
                .map(|r| r.iter().map(|&v| v as usize).collect())
                .collect()
        };
        [rows(&self.meet), rows(&self.join), rows(&self.imp)]
    }

    pub fn elements_below(&self, a: usize) -> Vec<usize> {
        (0..self.size).filter(|&x| self.leq(x, a)).collect()
    }

    /// The subalgebra on `elems` (must be closed under the operations and
    /// contain the bounds), with the inclusion as a homomorphism.
    pub fn subalgebra(&self, elems: &[usize]) -> Result<(HeytingAlgebra, Homomorphism)> {
        let mut elems = elems.to_vec();
        elems.sort_unstable();
        elems.dedup();
        let index: HashMap<usize, usize> =
            elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let look = |v: usize| {
            index
                .get(&v)
                .copied()
                .ok_or_else(|| Error::Precondition(format!("element set not closed: {v} missing")))
        };
        let (bot, top) = (look(self.bot)?, look(self.top)?);
        let n = elems.len();
        let mut t = [vec![0u16; n * n], vec![0u16; n * n], vec![0u16; n * n]];
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                t[0][i * n + j] = look(self.meet(a, b))? as u16;
                t[1][i * n + j] = look(self.join(a, b))? as u16;
                t[2][i * n + j] = look(self.imp(a, b))? as u16;
            }
        }
        let [meet, join, imp] = t;
        Ok((
            HeytingAlgebra {
                size: n,
                meet,
                join,
                imp,
                bot,
                top,
            },
            Homomorphism::new(HomKind::Heyting, elems),
        ))
    }

    /// Quotient by the principal filter `↑a`. The quotient is realised on the
    /// interval `[0, a]`; the projection is `x ↦ x ∧ a`.
    pub fn quotient_by_filter(&self, a: usize) -> (HeytingAlgebra, Homomorphism) {
        let elems = self.elements_below(a);
        let index: HashMap<usize, usize> =
            elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let n = elems.len();
        let mut meet = vec![0u16; n * n];
        let mut join = vec![0u16; n * n];
        let mut imp = vec![0u16; n * n];
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                meet[i * n + j] = index[&self.meet(x, y)] as u16;
                join[i * n + j] = index[&self.join(x, y)] as u16;
                imp[i * n + j] = index[&self.meet(self.imp(x, y), a)] as u16;
            }
        }
        let q = HeytingAlgebra {
            size: n,
            meet,
            join,
            imp,
            bot: index[&self.bot],
            top: index[&a],
        };
        let proj = (0..self.size).map(|x| index[&self.meet(x, a)]).collect();
        (q, Homomorphism::new(HomKind::Heyting, proj))
    }
}

impl FiniteAlgebra for HeytingAlgebra {
    fn signature(&self) -> Signature {
        Signature::Heyting
    }
    fn size(&self) -> usize {
        self.size
    }
    fn bot(&self) -> usize {
        self.bot
    }
    fn top(&self) -> usize {
        self.top
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size + b] as usize
    }
    fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size + b] as usize
    }
    fn imp(&self, a: usize, b: usize) -> usize {
        self.imp[a * self.size + b] as usize
    }
}

/// A failed axiom together with the elements witnessing the failure.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub axiom: &'static str,
    pub witness: Vec<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {:?}", self.axiom, self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, axiom: &'static str, witness: Option<Vec<usize>>) {
        if let Some(witness) = witness {
            self.violations.push(Violation { axiom, witness });
        }
    }
}

/// Checks every Heyting-algebra axiom by brute force. Each violated axiom is
/// reported once, with its lexicographically least witness.
pub fn validate_heyting(h: &HeytingAlgebra) -> ValidationReport {
    let n = h.size;
    let pairs = || (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)));
    let triples = || pairs().flat_map(move |(a, b)| (0..n).map(move |c| (a, b, c)));
    let leq = |a, b| h.meet(a, b) == a;
    let mut r = ValidationReport::default();

    r.check(
        "idempotence",
        (0..n)
            .find(|&a| h.meet(a, a) != a || h.join(a, a) != a)
            .map(|a| vec![a]),
    );
    r.check(
        "commutativity",
        pairs()
            .find(|&(a, b)| h.meet(a, b) != h.meet(b, a) || h.join(a, b) != h.join(b, a))
            .map(|(a, b)| vec![a, b]),
    );
    r.check(
        "associativity",
        triples()
            .find(|&(a, b, c)| {
                h.meet(h.meet(a, b), c) != h.meet(a, h.meet(b, c))
                    || h.join(h.join(a, b), c) != h.join(a, h.join(b, c))
            })
            .map(|(a, b, c)| vec![a, b, c]),
    );
    r.check(
        "absorption",
        pairs()
            .find(|&(a, b)| h.meet(a, h.join(a, b)) != a || h.join(a, h.meet(a, b)) != a)
            .map(|(a, b)| vec![a, b]),
    );
    r.check(
        "bounds",
        (0..n)
            .find(|&a| !leq(h.bot, a) || !leq(a, h.top))
            .map(|a| vec![a]),
    );
    r.check(
        "residuation",
        triples()
            .find(|&(a, b, c)| leq(h.meet(a, b), c) != leq(a, h.imp(b, c)))
            .map(|(a, b, c)| vec![a, b, c]),
    );
    r.check(
        "distributivity",
        triples()
            .find(|&(a, b, c)| h.meet(a, h.join(b, c)) != h.join(h.meet(a, b), h.meet(a, c)))
            .map(|(a, b, c)| vec![a, b, c]),
    );
    r
}

/// The algebra of downsets of `p` together with the downset of each element.
pub fn downset_heyting_sets(p: &FinitePoset, limits: &Limits) -> Result<(HeytingAlgebra, Vec<u64>)> {
    let sets = p.downsets(limits.max_size.min(MAX_TABLE_SIZE))?;
    let index: HashMap<u64, usize> = sets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let n = sets.len();
    let full = if p.size() == 64 { u64::MAX } else { (1u64 << p.size()) - 1 };
    let mut meet = vec![0u16; n * n];
    let mut join = vec![0u16; n * n];
    let mut imp = vec![0u16; n * n];
    for (i, &a) in sets.iter().enumerate() {
        for (j, &b) in sets.iter().enumerate() {
            meet[i * n + j] = index[&(a & b)] as u16;
            join[i * n + j] = index[&(a | b)] as u16;
            imp[i * n + j] = index[&p.interior((full & !a) | b)] as u16;
        }
    }
    let h = HeytingAlgebra {
        size: n,
        meet,
        join,
        imp,
        bot: 0,
        top: n - 1,
    };
    Ok((h, sets))
}

/// Downsets of `p` ordered by inclusion, with `A → B` the largest downset
/// inside `(P ∖ A) ∪ B`. Elements are numbered by increasing downset mask.
pub fn downset_heyting(p: &FinitePoset) -> Result<HeytingAlgebra> {
    downset_heyting_sets(p, &Limits::default()).map(|(h, _)| h)
}

/// Join-irreducible elements in increasing index order.
pub fn join_irreducibles(h: &HeytingAlgebra) -> Vec<usize> {
    (0..h.size)
        .filter(|&x| {
            x != h.bot
                && (0..h.size)
                    .filter(|&y| y != x && h.leq(y, x))
                    .fold(h.bot, |acc, y| h.join(acc, y))
                    != x
        })
        .collect()
}

/// The poset of join-irreducibles with the order inherited from `h`.
pub fn join_irreducible_poset(h: &HeytingAlgebra) -> FinitePoset {
    let ji = join_irreducibles(h);
    let leq = ji
        .iter()
        .map(|&a| ji.iter().map(|&b| h.leq(a, b)).collect())
        .collect();
    FinitePoset {
        size: ji.len(),
        leq,
    }
}

/// All Heyting homomorphisms `h1 → h2` extending `constraints`, in
/// lexicographic order of their tables.
pub fn heyting_hom_search(
    h1: &HeytingAlgebra,
    h2: &HeytingAlgebra,
    constraints: &[(usize, usize)],
    mode: SearchMode,
) -> Vec<Homomorphism> {
    HomSearch::new(h1, h2, Preserve::HEYTING)
        .fix(constraints)
        .mode(mode)
        .run()
        .into_iter()
        .map(|m| Homomorphism::new(HomKind::Heyting, m))
        .collect()
}

/// The lexicographically least isomorphism, if any.
pub fn heyting_isomorphism(h1: &HeytingAlgebra, h2: &HeytingAlgebra) -> Option<Homomorphism> {
    HomSearch::new(h1, h2, Preserve::HEYTING)
        .mode(SearchMode::Iso)
        .first()
        .map(|m| Homomorphism::new(HomKind::Heyting, m))
}

pub fn is_heyting_hom(h1: &HeytingAlgebra, h2: &HeytingAlgebra, map: &[usize]) -> bool {
    crate::hom::preserves(h1, h2, map, Preserve::HEYTING)
}

/// Componentwise product. Element tuples are numbered in lexicographic order
/// with the first factor most significant; the empty product is trivial.
pub fn heyting_product(hs: &[HeytingAlgebra], limits: &Limits) -> Result<HeytingAlgebra> {
    let cap = limits.max_size.min(MAX_TABLE_SIZE) as u128;
    let size = hs
        .iter()
        .try_fold(1u128, |acc, h| acc.checked_mul(h.size as u128))
        .unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::cap("product size", size, cap));
    }
    let size = size as usize;
    let mut strides = vec![1usize; hs.len()];
    for i in (0..hs.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * hs[i + 1].size;
    }
    let coord = |x: usize, i: usize| (x / strides[i]) % hs[i].size;
    let combine = |f: &dyn Fn(&HeytingAlgebra, usize, usize) -> usize, a: usize, b: usize| {
        hs.iter()
            .enumerate()
            .map(|(i, h)| f(h, coord(a, i), coord(b, i)) * strides[i])
            .sum::<usize>()
    };
    let mut meet = vec![0u16; size * size];
    let mut join = vec![0u16; size * size];
    let mut imp = vec![0u16; size * size];
    for a in 0..size {
        for b in 0..size {
            meet[a * size + b] = combine(&|h, x, y| h.meet(x, y), a, b) as u16;
            join[a * size + b] = combine(&|h, x, y| h.join(x, y), a, b) as u16;
            imp[a * size + b] = combine(&|h, x, y| h.imp(x, y), a, b) as u16;
        }
    }
    let bot = hs.iter().enumerate().map(|(i, h)| h.bot * strides[i]).sum();
    let top = hs.iter().enumerate().map(|(i, h)| h.top * strides[i]).sum();
    Ok(HeytingAlgebra {
        size,
        meet,
        join,
        imp,
        bot,
        top,
    })
}
