//! Finite T0-spaces as posets.
//!
//! A finite T0 topological space is the same thing as a finite poset: the
//! specialization order has `x ≤ y` iff every open set containing `x`
//! contains `y`, opens are exactly the up-closed subsets, and the smallest
//! open neighbourhood of `x` is the up-set `U_x = {y : y ≥ x}` while the
//! closure of `{x}` is the down-set `C_x`. Everything downstream (sheaves,
//! cohomology, duality) is phrased in terms of this order.
//!
//! The stored primitive is the cover relation (the transitive reduction);
//! the full order is a cached closure. Spaces here are tiny (tens of
//! elements), so O(n³) closures and exhaustive chain enumeration are fine.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

/// A finite poset with stable string labels. Immutable after construction.
#[derive(Clone, PartialEq, Eq)]
pub struct FinPoset {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    /// Reflexive: `leq[a][b]` iff a ≤ b.
    leq: Vec<Vec<bool>>,
    /// Transitive reduction, pairs (lower, upper), sorted.
    covers: Vec<(usize, usize)>,
}

impl FinPoset {
    /// Build from labels and arbitrary strict relations `a < b`; the
    /// transitive closure is taken and antisymmetry checked.
    ///
    /// Labels must be nonempty and free of whitespace (they appear verbatim
    /// in the text formats).
    pub fn from_relations<S: AsRef<str>>(labels: &[S], lt: &[(S, S)]) -> Result<FinPoset> {
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c.is_control()) {
                return Err(Error::Parse(format!("bad element label {l:?}")));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateElement(l.clone()));
            }
        }
        let n = labels.len();
        let mut strict = vec![vec![false; n]; n];
        for (a, b) in lt {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| Error::UnknownElement(a.to_string()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UnknownElement(b.to_string()))?;
            if ia == ib {
                return Err(Error::NotAPartialOrder(format!("{a} < {a} is reflexive")));
            }
            strict[ia][ib] = true;
        }
        transitive_closure(&mut strict);
        for a in 0..n {
            if strict[a][a] {
                return Err(Error::NotAPartialOrder(format!(
                    "cycle through {:?}",
                    labels[a]
                )));
            }
        }
        let mut leq = strict;
        for (a, row) in leq.iter_mut().enumerate() {
            row[a] = true;
        }
        Ok(Self::from_parts(labels, index, leq))
    }

    /// Internal constructor from a valid reflexive order matrix.
    fn from_parts(labels: Vec<String>, index: BTreeMap<String, usize>, leq: Vec<Vec<bool>>) -> FinPoset {
        let n = labels.len();
        let mut covers = Vec::new();
        for a in 0..n {
            'pair: for b in 0..n {
                if a == b || !leq[a][b] {
                    continue;
                }
                for z in 0..n {
                    if z != a && z != b && leq[a][z] && leq[z][b] {
                        continue 'pair;
                    }
                }
                covers.push((a, b));
            }
        }
        covers.sort_unstable();
        FinPoset { labels, index, leq, covers }
    }

    fn from_leq(labels: Vec<String>, leq: Vec<Vec<bool>>) -> FinPoset {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Self::from_parts(labels, index, leq)
    }

    pub fn empty() -> FinPoset {
        FinPoset { labels: Vec::new(), index: BTreeMap::new(), leq: Vec::new(), covers: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    /// Cover pairs (lower, upper) of the transitive reduction.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn is_cover(&self, a: usize, b: usize) -> bool {
        self.covers.binary_search(&(a, b)).is_ok()
    }

    /// Elements covered by `y` (its lower covers).
    pub fn covers_into(&self, y: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(_, b)| b == y).map(|&(a, _)| a).collect()
    }

    /// Elements covering `x` (its upper covers).
    pub fn covers_from(&self, x: usize) -> Vec<usize> {
        self.covers.iter().filter(|&&(a, _)| a == x).map(|&(_, b)| b).collect()
    }

    // --- subsets -----------------------------------------------------------

    /// `U_x`: the smallest open set containing x.
    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq[x][y]).collect()
    }

    /// `U_x^* = U_x − {x}`.
    pub fn punctured_up_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| y != x && self.leq[x][y]).collect()
    }

    /// `C_x`: the closure of {x}.
    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq[y][x]).collect()
    }

    /// `C_x^* = C_x − {x}`.
    pub fn punctured_down_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| y != x && self.leq[y][x]).collect()
    }

    /// The open interval `(x, y) = U_x^* ∩ C_y^*`; requires x ≤ y.
    pub fn open_interval(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        if !self.leq[x][y] {
            return Err(Error::Unsupported(format!(
                "{} ≰ {}, interval undefined",
                self.labels[x], self.labels[y]
            )));
        }
        Ok((0..self.len()).filter(|&z| self.lt(x, z) && self.lt(z, y)).collect())
    }

    /// The closed interval `[x, y]`; requires x ≤ y.
    pub fn closed_interval(&self, x: usize, y: usize) -> Result<Vec<usize>> {
        if !self.leq[x][y] {
            return Err(Error::Unsupported(format!(
                "{} ≰ {}, interval undefined",
                self.labels[x], self.labels[y]
            )));
        }
        Ok((0..self.len()).filter(|&z| self.leq[x][z] && self.leq[z][y]).collect())
    }

    /// Induced subposet on `members` (indices into self), keeping labels.
    pub fn induced(&self, members: &[usize]) -> FinPoset {
        let labels: Vec<String> = members.iter().map(|&i| self.labels[i].clone()).collect();
        let leq: Vec<Vec<bool>> = members
            .iter()
            .map(|&a| members.iter().map(|&b| self.leq[a][b]).collect())
            .collect();
        Self::from_leq(labels, leq)
    }

    pub fn mask_from(&self, members: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.len()];
        for &m in members {
            mask[m] = true;
        }
        mask
    }

    pub fn is_up_closed(&self, members: &[usize]) -> bool {
        let mask = self.mask_from(members);
        members
            .iter()
            .all(|&x| (0..self.len()).all(|y| !self.lt(x, y) || mask[y]))
    }

    pub fn is_down_closed(&self, members: &[usize]) -> bool {
        let mask = self.mask_from(members);
        members
            .iter()
            .all(|&x| (0..self.len()).all(|y| !self.lt(y, x) || mask[y]))
    }

    pub fn down_closure(&self, members: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| members.iter().any(|&x| self.leq[y][x]))
            .collect()
    }

    pub fn up_closure(&self, members: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&y| members.iter().any(|&x| self.leq[x][y]))
            .collect()
    }

    /// Complement of a subset, as sorted indices.
    pub fn complement(&self, members: &[usize]) -> Vec<usize> {
        let mask = self.mask_from(members);
        (0..self.len()).filter(|&i| !mask[i]).collect()
    }

    // --- global structure ---------------------------------------------------

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| (0..self.len()).all(|y| !self.lt(y, x)))
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| (0..self.len()).all(|y| !self.lt(x, y)))
            .collect()
    }

    /// The unique minimum, when there is one ("local" space).
    pub fn bottom(&self) -> Option<usize> {
        let mins = self.minimal_elements();
        match mins.as_slice() {
            [m] => Some(*m),
            _ => None,
        }
    }

    pub fn is_local(&self) -> bool {
        self.bottom().is_some()
    }

    /// Irreducible = has a generic point, i.e. a unique maximal element.
    pub fn is_irreducible(&self) -> bool {
        self.maximal_elements().len() == 1
    }

    pub fn generic_point(&self) -> Option<usize> {
        match self.maximal_elements().as_slice() {
            [g] => Some(*g),
            _ => None,
        }
    }

    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = count;
            while let Some(x) = stack.pop() {
                for y in 0..n {
                    if comp[y] == usize::MAX && self.comparable(x, y) {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for (x, &c) in comp.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Any linear extension: smaller elements first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.down_set(x).len(), x));
        order
    }

    /// Longest cover-path from a minimal element up to each element, in edges.
    fn height_below(&self) -> Vec<(i64, i64)> {
        // (min, max) over maximal descending chains ending at x
        let mut out = vec![(0i64, 0i64); self.len()];
        for &x in &self.linear_extension() {
            let preds = self.covers_into(x);
            if !preds.is_empty() {
                let mn = preds.iter().map(|&y| out[y].0).min().unwrap() + 1;
                let mx = preds.iter().map(|&y| out[y].1).max().unwrap() + 1;
                out[x] = (mn, mx);
            }
        }
        out
    }

    fn height_above(&self) -> Vec<(i64, i64)> {
        let mut out = vec![(0i64, 0i64); self.len()];
        for &x in self.linear_extension().iter().rev() {
            let succs = self.covers_from(x);
            if !succs.is_empty() {
                let mn = succs.iter().map(|&y| out[y].0).min().unwrap() + 1;
                let mx = succs.iter().map(|&y| out[y].1).max().unwrap() + 1;
                out[x] = (mn, mx);
            }
        }
        out
    }

    /// Maximal chain length in edges; dim(∅) = −1.
    pub fn dim(&self) -> i64 {
        if self.is_empty() {
            return -1;
        }
        self.height_below().iter().map(|&(_, mx)| mx).max().unwrap()
    }

    /// All maximal chains have the same length. A maximal chain through x
    /// splits into a maximal descending chain into x and a maximal ascending
    /// one out of x, so purity is equivalent to: both split lengths are
    /// unambiguous at every point and always sum to dim X.
    pub fn is_pure(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let below = self.height_below();
        let above = self.height_above();
        let d = self.dim();
        (0..self.len()).all(|x| {
            below[x].0 == below[x].1 && above[x].0 == above[x].1 && below[x].1 + above[x].1 == d
        })
    }

    /// Every closed interval [x, y] is pure.
    pub fn is_catenary(&self) -> bool {
        for x in 0..self.len() {
            for y in 0..self.len() {
                if self.leq[x][y] && !self.induced(&self.closed_interval(x, y).unwrap()).is_pure()
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn structure_report(&self) -> StructureReport {
        StructureReport {
            dim: self.dim(),
            is_pure: self.is_pure(),
            is_catenary: self.is_catenary(),
            is_local: self.is_local(),
            is_irreducible: self.is_irreducible(),
            is_connected: self.is_connected(),
            closed_points: self.minimal_elements().iter().map(|&x| self.labels[x].clone()).collect(),
            generic_points: self.maximal_elements().iter().map(|&x| self.labels[x].clone()).collect(),
        }
    }

    // --- chains --------------------------------------------------------------

    /// All strict chains `x_0 < x_1 < ... < x_p`, optionally restricted to a
    /// subset, to a fixed first element, and to length ≤ `max_len` (in edges).
    /// Ordered by (length, lexicographic index sequence) — a deterministic
    /// order in which the chains of a subset form a subsequence of the
    /// chains of the whole space.
    pub fn chains(
        &self,
        allowed: Option<&[bool]>,
        first: Option<usize>,
        max_len: Option<usize>,
    ) -> Vec<Vec<usize>> {
        let n = self.len();
        let ok = |x: usize| allowed.is_none_or(|m| m[x]);
        let mut out = Vec::new();
        let starts: Vec<usize> = match first {
            Some(x) => {
                if ok(x) {
                    vec![x]
                } else {
                    Vec::new()
                }
            }
            None => (0..n).filter(|&x| ok(x)).collect(),
        };
        let mut stack = Vec::new();
        for s in starts {
            stack.push(s);
            self.extend_chains(&mut stack, &ok, max_len, &mut out);
            stack.pop();
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    fn extend_chains(
        &self,
        chain: &mut Vec<usize>,
        ok: &impl Fn(usize) -> bool,
        max_len: Option<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(chain.clone());
        if max_len.is_some_and(|m| chain.len() == m + 1) {
            return;
        }
        let last = *chain.last().unwrap();
        for y in 0..self.len() {
            if ok(y) && self.lt(last, y) {
                chain.push(y);
                self.extend_chains(chain, ok, max_len, out);
                chain.pop();
            }
        }
    }

    // --- codimension functions -----------------------------------------------

    /// Solve `d(x) = d(y) + 1` over all cover pairs x ⋖ y, as a graph
    /// potential. `anchors` pins values (at most one per connected component;
    /// unanchored components get value 0 at their lexicographically first
    /// maximal element). Returns `None` when the constraints are
    /// inconsistent (the poset is then not catenary).
    pub fn codimension_function(&self, anchors: &[(usize, i64)]) -> Result<Option<CodimFunction>> {
        let n = self.len();
        let comps = self.connected_components();
        let mut comp_of = vec![0usize; n];
        for (c, comp) in comps.iter().enumerate() {
            for &x in comp {
                comp_of[x] = c;
            }
        }
        let mut anchor_of_comp: Vec<Option<(usize, i64)>> = vec![None; comps.len()];
        for &(x, v) in anchors {
            let c = comp_of[x];
            if let Some((x0, v0)) = anchor_of_comp[c] {
                if x0 != x || v0 != v {
                    return Err(Error::Unsupported(format!(
                        "two anchors ({}, {}) in one connected component",
                        self.labels[x0], self.labels[x]
                    )));
                }
            }
            anchor_of_comp[c] = Some((x, v));
        }

        let mut val = vec![None::<i64>; n];
        // Undirected adjacency over cover edges with the potential difference.
        let mut adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
        for &(a, b) in &self.covers {
            adj[a].push((b, -1)); // d(b) = d(a) − 1
            adj[b].push((a, 1)); // d(a) = d(b) + 1
        }
        for (c, comp) in comps.iter().enumerate() {
            let (root, rv) = anchor_of_comp[c].unwrap_or_else(|| {
                let m = comp
                    .iter()
                    .copied()
                    .filter(|&x| self.maximal_elements().contains(&x))
                    .min_by(|&a, &b| self.labels[a].cmp(&self.labels[b]))
                    .expect("component has a maximal element");
                (m, 0)
            });
            val[root] = Some(rv);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                let vx = val[x].unwrap();
                for &(y, delta) in &adj[x] {
                    match val[y] {
                        None => {
                            val[y] = Some(vx + delta);
                            queue.push_back(y);
                        }
                        Some(vy) => {
                            if vy != vx + delta {
                                return Ok(None);
                            }
                        }
                    }
                }
            }
        }
        let values: Vec<i64> = val.into_iter().map(|v| v.unwrap_or(0)).collect();
        debug_assert!(self.is_codim_function(&values));
        Ok(Some(CodimFunction { values }))
    }

    fn is_codim_function(&self, values: &[i64]) -> bool {
        self.covers.iter().all(|&(a, b)| values[a] == values[b] + 1)
    }

    /// The reading `φ_x = −dim C_x`, validated; natural on local spaces.
    pub fn codim_preset_local(&self) -> Option<CodimFunction> {
        let below = self.height_below();
        let values: Vec<i64> = (0..self.len()).map(|x| -below[x].1).collect();
        self.is_codim_function(&values).then_some(CodimFunction { values })
    }

    /// The reading `φ_x = dim U_x`, validated; natural on irreducible spaces.
    pub fn codim_preset_irreducible(&self) -> Option<CodimFunction> {
        let above = self.height_above();
        let values: Vec<i64> = (0..self.len()).map(|x| above[x].1).collect();
        self.is_codim_function(&values).then_some(CodimFunction { values })
    }

    // --- constructions ---------------------------------------------------------

    pub fn opposite(&self) -> FinPoset {
        let n = self.len();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| self.leq[b][a]).collect()).collect();
        Self::from_leq(self.labels.clone(), leq)
    }

    /// Direct product with componentwise order; labels `(x,y)`.
    pub fn product(&self, other: &FinPoset) -> FinPoset {
        let (n, m) = (self.len(), other.len());
        let mut labels = Vec::with_capacity(n * m);
        for a in 0..n {
            for b in 0..m {
                labels.push(format!("({},{})", self.labels[a], other.labels[b]));
            }
        }
        let leq: Vec<Vec<bool>> = (0..n * m)
            .map(|p| {
                let (a, b) = (p / m, p % m);
                (0..n * m)
                    .map(|q| {
                        let (c, d) = (q / m, q % m);
                        self.leq[a][c] && other.leq[b][d]
                    })
                    .collect()
            })
            .collect();
        Self::from_leq(labels, leq)
    }

    /// Adjoin a new minimum below everything.
    pub fn adjoin_bottom(&self, label: &str) -> Result<FinPoset> {
        self.adjoin(label, true)
    }

    /// Adjoin a new maximum above everything.
    pub fn adjoin_top(&self, label: &str) -> Result<FinPoset> {
        self.adjoin(label, false)
    }

    fn adjoin(&self, label: &str, below: bool) -> Result<FinPoset> {
        if self.index.contains_key(label) {
            return Err(Error::DuplicateElement(label.to_string()));
        }
        let n = self.len();
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        let leq: Vec<Vec<bool>> = (0..=n)
            .map(|a| {
                (0..=n)
                    .map(|b| match (a == n, b == n) {
                        (false, false) => self.leq[a][b],
                        (true, true) => true,
                        (true, false) => below,
                        (false, true) => !below,
                    })
                    .collect()
            })
            .collect();
        Ok(Self::from_leq(labels, leq))
    }

    /// Barycentric subdivision βX: the poset of nonempty chains of X ordered
    /// by inclusion. Labels join the chain's labels with `<`.
    pub fn barycentric(&self) -> FinPoset {
        let chains = self.chains(None, None, None);
        let labels: Vec<String> = chains
            .iter()
            .map(|c| c.iter().map(|&x| self.labels[x].as_str()).collect::<Vec<_>>().join("<"))
            .collect();
        let sets: Vec<Vec<usize>> = chains; // already sorted tuples
        let k = sets.len();
        let leq: Vec<Vec<bool>> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| sets[a].iter().all(|x| sets[b].contains(x)))
                    .collect()
            })
            .collect();
        Self::from_leq(labels, leq)
    }

    // --- isomorphism -------------------------------------------------------------

    /// Canonical form of the order matrix under relabeling; equal keys iff
    /// isomorphic. Exhaustive over permutations — only for small posets.
    pub fn canonical_key(&self) -> Vec<bool> {
        let n = self.len();
        assert!(n <= 8, "canonical_key is exhaustive over permutations");
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best: Option<Vec<bool>> = None;
        permute(&mut perm, 0, &mut |p| {
            // p[new] = old
            let mut key = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    key.push(self.leq[p[i]][p[j]]);
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap_or_default()
    }

    pub fn is_isomorphic(&self, other: &FinPoset) -> bool {
        self.len() == other.len() && self.canonical_key() == other.canonical_key()
    }
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn transitive_closure(m: &mut [Vec<bool>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.labels[a], self.labels[b]))
            .collect();
        write!(f, "FinPoset({:?}; {})", self.labels, covers.join(", "))
    }
}

/// Global shape summary of a space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub dim: i64,
    pub is_pure: bool,
    pub is_catenary: bool,
    pub is_local: bool,
    pub is_irreducible: bool,
    pub is_connected: bool,
    pub closed_points: Vec<String>,
    pub generic_points: Vec<String>,
}

/// An integer potential with `d(x) = d(y) + 1` across every cover x ⋖ y.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodimFunction {
    values: Vec<i64>,
}

impl CodimFunction {
    pub fn get(&self, x: usize) -> i64 {
        self.values[x]
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn from_values(poset: &FinPoset, values: Vec<i64>) -> Option<CodimFunction> {
        poset.is_codim_function(&values).then_some(CodimFunction { values })
    }
}

/// A subset of a poset together with its topological classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubSpace {
    members: Vec<usize>,
    mask: Vec<bool>,
    is_open: bool,
    is_closed: bool,
    is_locally_closed: bool,
}

impl SubSpace {
    pub fn new(poset: &FinPoset, members: impl IntoIterator<Item = usize>) -> SubSpace {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let mask = poset.mask_from(&members);
        let is_open = poset.is_up_closed(&members);
        let is_closed = poset.is_down_closed(&members);
        // Locally closed = open inside its own closure.
        let closure_mask = poset.mask_from(&poset.down_closure(&members));
        let is_locally_closed = members.iter().all(|&s| {
            (0..poset.len()).all(|z| !poset.lt(s, z) || !closure_mask[z] || mask[z])
        });
        SubSpace { members, mask, is_open, is_closed, is_locally_closed }
    }

    pub fn from_labels<S: AsRef<str>>(poset: &FinPoset, labels: &[S]) -> Result<SubSpace> {
        let members = labels
            .iter()
            .map(|l| poset.index_of(l.as_ref()))
            .collect::<Result<Vec<usize>>>()?;
        Ok(Self::new(poset, members))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, x: usize) -> bool {
        self.mask[x]
    }

    pub fn is_open(&self) -> bool {
        self.is_open
    }

    pub fn is_closed(&self) -> bool {
        self.is_closed
    }

    pub fn is_locally_closed(&self) -> bool {
        self.is_locally_closed
    }

    pub fn kind(&self) -> &'static str {
        match (self.is_open, self.is_closed) {
            (true, true) => "clopen",
            (true, false) => "open",
            (false, true) => "closed",
            (false, false) => {
                if self.is_locally_closed {
                    "locally-closed"
                } else {
                    "arbitrary"
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn v_poset() -> FinPoset {
        FinPoset::from_relations(&["o", "a", "b"], &[("o", "a"), ("o", "b")]).unwrap()
    }

    /// Subsets of {1..n} ordered by inclusion; labels are digit strings, ∅
    /// for the empty set. (The simplicial module rebuilds this as A^n.)
    pub(crate) fn subset_poset(n: u32) -> FinPoset {
        let labels: Vec<String> = (0u32..1 << n).map(subset_label).collect();
        let mut lt = Vec::new();
        for a in 0u32..1 << n {
            for b in 0u32..1 << n {
                if a != b && a & b == a {
                    lt.push((subset_label(a), subset_label(b)));
                }
            }
        }
        let pairs: Vec<(&str, &str)> = lt.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let labels_ref: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        FinPoset::from_relations(&labels_ref, &pairs).unwrap()
    }

    fn subset_label(s: u32) -> String {
        if s == 0 {
            return "∅".to_string();
        }
        (0..32).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect()
    }

    #[test]
    fn v_poset_structure() {
        let v = v_poset();
        let r = v.structure_report();
        assert_eq!(r.dim, 1);
        assert!(r.is_pure && r.is_catenary && r.is_local && r.is_connected);
        assert!(!r.is_irreducible);
        assert_eq!(r.closed_points, vec!["o"]);
        assert_eq!(r.generic_points, vec!["a", "b"]);
    }

    #[test]
    fn point_structure() {
        let p = FinPoset::from_relations(&["pt"], &[]).unwrap();
        let r = p.structure_report();
        assert_eq!(r.dim, 0);
        assert!(r.is_pure && r.is_catenary && r.is_local && r.is_irreducible && r.is_connected);
    }

    #[test]
    fn up_and_down_sets_on_v() {
        let v = v_poset();
        let o = v.index_of("o").unwrap();
        let a = v.index_of("a").unwrap();
        assert_eq!(v.up_set(o), vec![0, 1, 2]);
        assert_eq!(v.down_set(a), vec![o, a]);
        assert_eq!(v.punctured_up_set(o).len(), 2);
    }

    #[test]
    fn p5_is_not_catenary_and_has_no_codim_function() {
        // Two maximal chains o<a<b<c and o<m<c of different lengths in [o,c].
        let p5 = FinPoset::from_relations(
            &["o", "a", "b", "c", "m"],
            &[("o", "a"), ("a", "b"), ("b", "c"), ("o", "m"), ("m", "c")],
        )
        .unwrap();
        assert!(!p5.is_catenary());
        assert_eq!(p5.codimension_function(&[]).unwrap(), None);
    }

    #[test]
    fn chain_codim_anchored_at_top() {
        let c = FinPoset::from_relations(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        let top = c.index_of("2").unwrap();
        let d = c.codimension_function(&[(top, 0)]).unwrap().unwrap();
        assert_eq!(d.values(), &[2, 1, 0]);
        // default anchor picks the same maximal element
        assert_eq!(c.codimension_function(&[]).unwrap().unwrap().values(), &[2, 1, 0]);
    }

    #[test]
    fn a2_local_preset() {
        let a2 = subset_poset(2);
        let phi = a2.codim_preset_local().unwrap();
        let read = |l: &str| phi.get(a2.index_of(l).unwrap());
        assert_eq!(
            (read("∅"), read("1"), read("2"), read("12")),
            (0, -1, -1, -2)
        );
        let psi = a2.codim_preset_irreducible().unwrap();
        let read = |l: &str| psi.get(a2.index_of(l).unwrap());
        assert_eq!((read("∅"), read("1"), read("2"), read("12")), (2, 1, 1, 0));
    }

    #[test]
    fn a3_open_interval_is_six_elements() {
        let a3 = subset_poset(3);
        let bot = a3.index_of("∅").unwrap();
        let top = a3.index_of("123").unwrap();
        let int = a3.open_interval(bot, top).unwrap();
        assert_eq!(int.len(), 6);
        // covers have empty open intervals, and conversely
        for x in 0..a3.len() {
            for y in 0..a3.len() {
                if a3.lt(x, y) {
                    let empty = a3.open_interval(x, y).unwrap().is_empty();
                    assert_eq!(empty, a3.is_cover(x, y));
                }
            }
        }
    }

    #[test]
    fn opposite_is_involutive() {
        let a2 = subset_poset(2);
        assert_eq!(a2.opposite().opposite(), a2);
        assert_eq!(a2.opposite().dim(), a2.dim());
    }

    #[test]
    fn product_of_chains_is_a_square() {
        // A¹ = 2-chain; A¹ × A¹ ≅ A² as posets.
        let a1 = FinPoset::from_relations(&["∅", "1"], &[("∅", "1")]).unwrap();
        let prod = a1.product(&a1);
        assert!(prod.is_isomorphic(&subset_poset(2)));
        assert_eq!(prod.dim(), 2);
    }

    #[test]
    fn barycentric_point_and_circle() {
        let p = FinPoset::from_relations(&["pt"], &[]).unwrap();
        assert_eq!(p.barycentric().len(), 1);
        assert_eq!(p.barycentric().dim(), 0);

        // 4-point circle: two closed points under two open points.
        let circle = FinPoset::from_relations(
            &["x1", "x2", "y1", "y2"],
            &[("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")],
        )
        .unwrap();
        let b = circle.barycentric();
        assert_eq!(b.len(), 8); // 4 vertices + 4 edges of an octagon
        assert_eq!(b.dim(), circle.dim());
    }

    #[test]
    fn chains_of_v_bounded_length() {
        let v = v_poset();
        let got = v.chains(None, None, Some(1));
        let want: Vec<Vec<usize>> = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2]];
        assert_eq!(got, want);
        // chains within a subset are a subsequence of all chains
        let mask = v.mask_from(&[0, 1]);
        assert_eq!(v.chains(Some(&mask), None, None), vec![vec![0], vec![1], vec![0, 1]]);
        // fixed first element
        assert_eq!(v.chains(None, Some(0), Some(0)), vec![vec![0]]);
    }

    #[test]
    fn subspace_classification_on_a2() {
        let a2 = subset_poset(2);
        let closed = SubSpace::from_labels(&a2, &["∅", "1"]).unwrap();
        assert!(closed.is_closed() && !closed.is_open());
        assert_eq!(closed.kind(), "closed");

        let punctured = SubSpace::from_labels(&a2, &["1", "2", "12"]).unwrap();
        assert!(punctured.is_open() && !punctured.is_closed());

        let point = SubSpace::from_labels(&a2, &["1"]).unwrap();
        assert!(!point.is_open() && !point.is_closed());
        assert!(point.is_locally_closed());
        assert_eq!(point.kind(), "locally-closed");

        let weird = SubSpace::from_labels(&a2, &["∅", "12"]).unwrap();
        assert!(!weird.is_locally_closed());
        assert_eq!(weird.kind(), "arbitrary");
    }

    #[test]
    fn cycles_are_rejected() {
        let err = FinPoset::from_relations(&["a", "b"], &[("a", "b"), ("b", "a")]);
        assert!(matches!(err, Err(Error::NotAPartialOrder(_))));
        let dup = FinPoset::from_relations(&["a", "a"], &[]);
        assert!(matches!(dup, Err(Error::DuplicateElement(_))));
    }

    #[test]
    fn induced_interval_poset() {
        let a3 = subset_poset(3);
        let bot = a3.index_of("∅").unwrap();
        let top = a3.index_of("123").unwrap();
        let int = a3.induced(&a3.open_interval(bot, top).unwrap());
        // proper nonempty subsets of a 3-set: pure of dimension 1
        assert_eq!(int.dim(), 1);
        assert!(int.is_pure());
        assert_eq!(int.minimal_elements().len(), 3);
        assert_eq!(int.maximal_elements().len(), 3);
    }

    #[test]
    fn codim_function_existence_implies_catenary() {
        // a handful of deterministic random posets via closure of random arcs
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..200 {
            let n = (next() % 6 + 1) as usize;
            let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut lt = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if next() % 3 == 0 {
                        lt.push((labels[a].clone(), labels[b].clone()));
                    }
                }
            }
            let pairs: Vec<(&str, &str)> =
                lt.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
            let p = FinPoset::from_relations(&refs, &pairs).unwrap();
            if p.codimension_function(&[]).unwrap().is_some() {
                assert!(p.is_catenary(), "codim function on non-catenary {p:?}");
            }
            assert_eq!(p.opposite().opposite(), p);
            assert_eq!(p.barycentric().dim(), p.dim());
        }
    }
}
