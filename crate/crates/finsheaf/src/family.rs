//! Catalogs of example spaces and deterministic randomized generators.
//!
//! The fixtures here show up throughout the test suite and the docs; the
//! enumerators and random generators drive the property tests. Everything
//! is reproducible: random functions take an explicit RNG, and
//! [`seeded_rng`] pins the stream.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poset::{FinPoset, SubSpace};
use crate::sheaf::FreeStalkSheaf;
use crate::zlinalg::IntMatrix;

/// A reproducible RNG for the generators below.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// --- fixed example spaces ----------------------------------------------------

/// The one-point space.
pub fn point() -> FinPoset {
    FinPoset::from_relations(&["pt"], &[]).unwrap()
}

/// Two incomparable points.
pub fn two_points() -> FinPoset {
    FinPoset::from_relations(&["p", "q"], &[]).unwrap()
}

/// A total order with `n` elements.
pub fn chain(n: usize) -> FinPoset {
    let labels: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    let lt: Vec<(String, String)> =
        (1..n).map(|i| (labels[i - 1].clone(), labels[i].clone())).collect();
    FinPoset::from_relations(&labels, &lt).unwrap()
}

/// One closed point under two open points: `o < a`, `o < b`.
pub fn v_space() -> FinPoset {
    FinPoset::from_relations(&["o", "a", "b"], &[("o", "a"), ("o", "b")]).unwrap()
}

/// The four-point circle: two closed points each under both open points.
/// Its order complex is an octagon, so it has the homotopy type of S¹.
pub fn circle() -> FinPoset {
    FinPoset::from_relations(
        &["x1", "x2", "y1", "y2"],
        &[("x1", "y1"), ("x1", "y2"), ("x2", "y1"), ("x2", "y2")],
    )
    .unwrap()
}

/// The suspension of three points: `o < a, b, c < t`. Its open interval
/// `(o, t)` is a three-point antichain — not a homology sphere — which
/// makes this the smallest space rejected by the dualizability gate while
/// every stalk datum still looks innocent.
pub fn suspension_of_three_points() -> FinPoset {
    FinPoset::from_relations(
        &["o", "a", "b", "c", "t"],
        &[("o", "a"), ("o", "b"), ("o", "c"), ("a", "t"), ("b", "t"), ("c", "t")],
    )
    .unwrap()
}

/// A five-point space that is connected and local but not catenary: the
/// maximal chains `o<a<b<c` and `o<m<c` have different lengths.
pub fn non_catenary_tent() -> FinPoset {
    FinPoset::from_relations(
        &["o", "a", "b", "c", "m"],
        &[("o", "a"), ("a", "b"), ("b", "c"), ("o", "m"), ("m", "c")],
    )
    .unwrap()
}

/// Finite model of affine n-space: all subsets of `{1, …, n}` ordered by
/// inclusion, the empty set (labeled `∅`) being the unique closed point.
pub fn affine_space(n: usize) -> FinPoset {
    assert!(n <= 6, "affine model has 2^n points");
    let labels: Vec<String> = (0u32..1 << n).map(|m| subset_label(m, n)).collect();
    let mut lt = Vec::new();
    for a in 0u32..1 << n {
        for b in 0u32..1 << n {
            if a != b && a & b == a {
                lt.push((subset_label(a, n), subset_label(b, n)));
            }
        }
    }
    FinPoset::from_relations(&labels, &lt).unwrap()
}

/// Finite model of projective d-space: the nonempty subsets of
/// `{1, …, d+1}` ordered by inclusion (affine (d+1)-space minus its
/// closed point).
pub fn projective_space(d: usize) -> FinPoset {
    assert!(d < 6, "projective model has 2^(d+1)-1 points");
    let n = d + 1;
    let labels: Vec<String> = (1u32..1 << n).map(|m| subset_label(m, n)).collect();
    let mut lt = Vec::new();
    for a in 1u32..1 << n {
        for b in 1u32..1 << n {
            if a != b && a & b == a {
                lt.push((subset_label(a, n), subset_label(b, n)));
            }
        }
    }
    FinPoset::from_relations(&labels, &lt).unwrap()
}

fn subset_label(mask: u32, n: usize) -> String {
    if mask == 0 {
        return "∅".to_string();
    }
    (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(|i| i.to_string()).collect()
}

// --- exhaustive enumeration ----------------------------------------------------

/// Every poset with at most `max_n` elements, one representative per
/// isomorphism class. Class counts by exact size run 1, 1, 2, 5, 16, 63
/// for sizes 0 through 5.
pub fn all_posets_up_to_iso(max_n: usize) -> Vec<FinPoset> {
    assert!(max_n <= 6, "exhaustive enumeration is exponential");
    let mut out = vec![FinPoset::empty()];
    for n in 1..=max_n {
        out.extend(posets_of_size(n));
    }
    out
}

/// One representative per isomorphism class of posets with exactly `n`
/// elements. Every finite poset has a linear extension, so each class has
/// a representative whose strict order is a subrelation of the integer
/// order on 0..n; we enumerate those and deduplicate by canonical key.
fn posets_of_size(n: usize) -> Vec<FinPoset> {
    let labels: Vec<String> = (0..n).map(element_label).collect();
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut lt = vec![[false; 8]; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            lt[i][j] = mask >> k & 1 == 1;
        }
        if !is_transitive(&lt, n) {
            continue;
        }
        let rel: Vec<(String, String)> = pairs
            .iter()
            .filter(|&&(i, j)| lt[i][j])
            .map(|&(i, j)| (labels[i].clone(), labels[j].clone()))
            .collect();
        let p = FinPoset::from_relations(&labels, &rel).unwrap();
        if seen.insert(p.canonical_key()) {
            out.push(p);
        }
    }
    out
}

fn is_transitive(lt: &[[bool; 8]], n: usize) -> bool {
    for i in 0..n {
        for j in i + 1..n {
            if !lt[i][j] {
                continue;
            }
            for k in j + 1..n {
                if lt[j][k] && !lt[i][k] {
                    return false;
                }
            }
        }
    }
    true
}

fn element_label(i: usize) -> String {
    char::from(b'a' + i as u8).to_string()
}

// --- randomized generators -----------------------------------------------------

/// Random poset on `n` elements: a random subrelation of the integer
/// order, transitively closed.
pub fn random_poset(rng: &mut impl Rng, n: usize) -> FinPoset {
    let labels: Vec<String> = (0..n).map(element_label).collect();
    let density = rng.gen_range(0.15..0.6);
    let mut lt = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                lt.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    FinPoset::from_relations(&labels, &lt).unwrap()
}

/// Random poset on `n` elements with a unique minimum.
pub fn random_local_poset(rng: &mut impl Rng, n: usize) -> FinPoset {
    assert!(n >= 1);
    random_poset(rng, n - 1).adjoin_bottom("0").unwrap()
}

/// Random closed subset (may be empty).
pub fn random_closed(rng: &mut impl Rng, poset: &FinPoset) -> SubSpace {
    let seeds: Vec<usize> = (0..poset.len()).filter(|_| rng.gen_bool(0.4)).collect();
    SubSpace::new(poset, poset.down_closure(&seeds))
}

/// Random locally closed subset: the intersection of a random open set
/// with a random closed set.
pub fn random_locally_closed(rng: &mut impl Rng, poset: &FinPoset) -> SubSpace {
    let up_seeds: Vec<usize> = (0..poset.len()).filter(|_| rng.gen_bool(0.5)).collect();
    let down_seeds: Vec<usize> = (0..poset.len()).filter(|_| rng.gen_bool(0.6)).collect();
    let open = poset.mask_from(&poset.up_closure(&up_seeds));
    let members: Vec<usize> =
        poset.down_closure(&down_seeds).into_iter().filter(|&x| open[x]).collect();
    SubSpace::new(poset, members)
}

/// Random unimodular matrix together with its inverse, built from a short
/// walk of elementary row operations so the entries stay small.
pub fn random_unimodular(rng: &mut impl Rng, n: usize) -> (IntMatrix, IntMatrix) {
    let mut u = IntMatrix::identity(n);
    let mut u_inv = IntMatrix::identity(n);
    if n < 2 {
        return (u, u_inv);
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        let c: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        // u ← E·u adds c·row_i to row_j; u_inv ← u_inv·E⁻¹ subtracts
        // c·col_j from col_i.
        for k in 0..n {
            let v = u.get(j, k) + u.get(i, k) * c;
            u.set(j, k, v);
            let w = u_inv.get(k, i) - u_inv.get(k, j) * c;
            u_inv.set(k, i, w);
        }
    }
    (u, u_inv)
}

/// Random sheaf with every stalk rank at most `max_rank`.
///
/// The construction picks a free group per height level and one step map
/// between consecutive levels; a cover map is the composite of the steps
/// between its endpoint heights, so all restriction paths agree by
/// construction. A random unimodular change of basis at each element then
/// hides the level structure without breaking functoriality.
pub fn random_sheaf(rng: &mut impl Rng, poset: &Arc<FinPoset>, max_rank: usize) -> FreeStalkSheaf {
    let n = poset.len();
    let heights = element_heights(poset);
    let hmax = heights.iter().copied().max().unwrap_or(0);
    let level_rank: Vec<usize> = (0..=hmax).map(|_| rng.gen_range(0..=max_rank)).collect();
    let steps: Vec<IntMatrix> = (0..hmax)
        .map(|k| {
            IntMatrix::from_fn(level_rank[k + 1], level_rank[k], |_, _| {
                rng.gen_range(-2i64..=2).into()
            })
        })
        .collect();
    let composite = |lo: usize, hi: usize| -> IntMatrix {
        let mut m = IntMatrix::identity(level_rank[lo]);
        for step in &steps[lo..hi] {
            m = step.mul(&m);
        }
        m
    };
    let twists: Vec<(IntMatrix, IntMatrix)> =
        (0..n).map(|x| random_unimodular(rng, level_rank[heights[x]])).collect();
    let ranks: Vec<usize> = (0..n).map(|x| level_rank[heights[x]]).collect();
    let maps: Vec<IntMatrix> = poset
        .covers()
        .iter()
        .map(|&(a, b)| twists[b].0.mul(&composite(heights[a], heights[b])).mul(&twists[a].1))
        .collect();
    FreeStalkSheaf::new(poset.clone(), ranks, maps).expect("height composites are functorial")
}

/// Height of each element: the length of the longest chain strictly below.
fn element_heights(poset: &FinPoset) -> Vec<usize> {
    let mut h = vec![0usize; poset.len()];
    for &x in &poset.linear_extension() {
        for &(a, b) in poset.covers() {
            if b == x {
                h[x] = h[x].max(h[a] + 1);
            }
        }
    }
    h
}
