//! Derived functors on a finite space: global sections and homology,
//! sections with closed support, point-local cohomology, and Hom
//! complexes, all reduced to finite complexes of free abelian groups.
//!
//! Every computation here runs over a *chain-indexed model*: the blocks of
//! the model are pairs (chain of the poset, internal degree), each block
//! carries a free group read off a stalk, and the differentials combine
//! simplicial face maps with restriction maps and the input differentials.
//! Three models cover everything:
//!
//! * the **sections model** — a chain `x_0 < … < x_p` carries the stalk at
//!   its top `x_p`; its cohomology is `H^•(X, F)`, and filtering the chain
//!   set gives the variants with support or over an open set;
//! * the **chains model** — a chain carries the stalk at its bottom `x_0`;
//!   its homology is `H_•(X, F)`, with an augmentation for the reduced
//!   version;
//! * the **Hom model** — a chain carries `Hom(F_{x_0}, G_{x_p})`; its
//!   cohomology is `Ext^•_X(F, G)`, and indexing stalks by chains inside
//!   `U_z` upgrades it to the sheaf `RHom(F, G)` whose restriction maps
//!   are coordinate projections.
//!
//! Degree conventions: sections degree = chain length + internal degree;
//! Hom degree = target − source; homology is reported in homological
//! degrees (nonnegative for a sheaf in degree 0).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::poset::{FinPoset, SubSpace};
use crate::sheaf::{FreeStalkSheaf, SheafComplex};
use crate::zlinalg::{FreeComplexZ, GradedGroups, IntMatrix, SparseEntries};
use crate::{Error, Result};

/// Block id reserved for the augmentation summand of reduced models.
const AUGMENTATION: usize = usize::MAX;

#[derive(Clone, Copy)]
struct Block {
    /// Index into the chain list, or [`AUGMENTATION`].
    id: usize,
    q: i64,
    offset: usize,
    size: usize,
}

fn accumulate(entries: &mut SparseEntries, r0: usize, c0: usize, m: &IntMatrix, sign: i64) {
    for (i, j, v) in m.sparse_entries() {
        let key = (r0 + i, c0 + j);
        let new = entries.get(&key).cloned().unwrap_or_else(BigInt::zero) + v * sign;
        if new.is_zero() {
            entries.remove(&key);
        } else {
            entries.insert(key, new);
        }
    }
}

fn sign_of(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The sections model over the given chains: block (σ, q) at total degree
/// `(len σ − 1) + q` carries `F^q` at the top of σ. With `augment`, a
/// rank-one block in degree −1 receives the unit of every point — only
/// meaningful (and only accepted) for the constant sheaf in degree 0.
fn sections_complex(f: &SheafComplex, chains: &[Vec<usize>], augment: bool) -> FreeComplexZ {
    if augment {
        debug_assert!(
            f.lo() == 0
                && f.hi() == 0
                && (0..f.poset().len()).all(|x| f.rank_at(0, x) == 1),
            "augmentation is defined for the constant sheaf"
        );
    }
    if f.is_empty() || (chains.is_empty() && !augment) {
        return FreeComplexZ::empty();
    }
    let chain_id: BTreeMap<&[usize], usize> =
        chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let pmax = chains.last().map_or(-1, |c| c.len() as i64 - 1);
    let lo = f.lo() + if augment { -1 } else { 0 };
    let hi = f.hi() + pmax;
    let count = (hi - lo + 1) as usize;

    let mut blocks: Vec<Vec<Block>> = Vec::with_capacity(count);
    let mut lookup: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(count);
    for d in 0..count {
        let n = lo + d as i64;
        let mut layer = Vec::new();
        let mut off = 0usize;
        if augment && n == -1 {
            layer.push(Block { id: AUGMENTATION, q: 0, offset: 0, size: 1 });
            off = 1;
        }
        for (cid, c) in chains.iter().enumerate() {
            let p = c.len() as i64 - 1;
            let q = n - p;
            if f.term(q).is_none() {
                continue;
            }
            let size = f.rank_at(q, *c.last().unwrap());
            layer.push(Block { id: cid, q, offset: off, size });
            off += size;
        }
        lookup.push(layer.iter().enumerate().map(|(pos, b)| (b.id, pos)).collect());
        blocks.push(layer);
    }
    let ranks: Vec<usize> = blocks.iter().map(|l| l.last().map_or(0, |b| b.offset + b.size)).collect();

    let mut diffs: Vec<SparseEntries> = Vec::with_capacity(count.saturating_sub(1));
    for d in 0..count.saturating_sub(1) {
        let mut entries = SparseEntries::new();
        for tb in &blocks[d + 1] {
            if tb.id == AUGMENTATION {
                continue;
            }
            let tau = &chains[tb.id];
            let k = tau.len();
            // vertical: the input differential at the top, from (τ, q−1)
            if let Some(&spos) = lookup[d].get(&tb.id) {
                let sb = blocks[d][spos];
                let dm = f.differential(tb.q - 1, *tau.last().unwrap());
                accumulate(&mut entries, tb.offset, sb.offset, &dm, sign_of(k as i64 - 1));
            }
            // horizontal: coboundary faces σ = τ ∖ τ_i
            for i in 0..k {
                let mut sigma = tau.clone();
                sigma.remove(i);
                let (src_id, map) = if sigma.is_empty() {
                    if !augment {
                        continue;
                    }
                    (AUGMENTATION, IntMatrix::identity(tb.size))
                } else {
                    let Some(&sid) = chain_id.get(sigma.as_slice()) else { continue };
                    let m = if i + 1 == k {
                        f.term(tb.q).unwrap().rho(tau[k - 2], tau[k - 1])
                    } else {
                        IntMatrix::identity(tb.size)
                    };
                    (sid, m)
                };
                let Some(&spos) = lookup[d].get(&src_id) else { continue };
                let sb = blocks[d][spos];
                accumulate(&mut entries, tb.offset, sb.offset, &map, sign_of(i as i64));
            }
        }
        diffs.push(entries);
    }
    FreeComplexZ::from_sparse(lo, ranks, diffs).expect("sections model is a complex")
}

/// The chains model: block (σ, q) at homological degree `(len σ − 1) − q`
/// carries `F^q` at the bottom of σ. Stored with negated (cohomological)
/// degrees; callers negate back when reporting.
fn chains_complex(f: &SheafComplex, chains: &[Vec<usize>], augment: bool) -> FreeComplexZ {
    if augment {
        debug_assert!(
            f.lo() == 0
                && f.hi() == 0
                && (0..f.poset().len()).all(|x| f.rank_at(0, x) == 1),
            "augmentation is defined for the constant sheaf"
        );
    }
    if f.is_empty() || (chains.is_empty() && !augment) {
        return FreeComplexZ::empty();
    }
    let chain_id: BTreeMap<&[usize], usize> =
        chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let pmax = chains.last().map_or(-1, |c| c.len() as i64 - 1);
    // homological degree n = p − q ranges over:
    let n_hi = pmax - f.lo();
    let n_lo = if augment { (-f.hi()).min(-1) } else { -f.hi() };
    if n_hi < n_lo {
        return FreeComplexZ::empty();
    }
    let count = (n_hi - n_lo + 1) as usize;
    // layer index d holds homological degree n_hi − d (cohomological degree
    // −n_hi + d), so differentials map layer d to layer d+1.
    let hom_deg = |d: usize| n_hi - d as i64;

    let mut blocks: Vec<Vec<Block>> = Vec::with_capacity(count);
    let mut lookup: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(count);
    for d in 0..count {
        let n = hom_deg(d);
        let mut layer = Vec::new();
        let mut off = 0usize;
        if augment && n == -1 {
            layer.push(Block { id: AUGMENTATION, q: 0, offset: 0, size: 1 });
            off = 1;
        }
        for (cid, c) in chains.iter().enumerate() {
            let p = c.len() as i64 - 1;
            let q = p - n;
            if f.term(q).is_none() {
                continue;
            }
            let size = f.rank_at(q, c[0]);
            layer.push(Block { id: cid, q, offset: off, size });
            off += size;
        }
        lookup.push(layer.iter().enumerate().map(|(pos, b)| (b.id, pos)).collect());
        blocks.push(layer);
    }
    let ranks: Vec<usize> = blocks.iter().map(|l| l.last().map_or(0, |b| b.offset + b.size)).collect();

    let mut diffs: Vec<SparseEntries> = Vec::with_capacity(count.saturating_sub(1));
    for d in 0..count.saturating_sub(1) {
        let mut entries = SparseEntries::new();
        // boundary maps layer d (degree n) into layer d+1 (degree n−1)
        for sb in &blocks[d] {
            if sb.id == AUGMENTATION {
                continue;
            }
            let sigma = &chains[sb.id];
            let k = sigma.len();
            // faces
            for i in 0..k {
                let mut tau = sigma.clone();
                tau.remove(i);
                let (tgt_id, map) = if tau.is_empty() {
                    if !augment {
                        continue;
                    }
                    (AUGMENTATION, IntMatrix::identity(1))
                } else {
                    let Some(&tid) = chain_id.get(tau.as_slice()) else { continue };
                    let m = if i == 0 {
                        f.term(sb.q).unwrap().rho(sigma[0], sigma[1])
                    } else {
                        IntMatrix::identity(sb.size)
                    };
                    (tid, m)
                };
                let Some(&tpos) = lookup[d + 1].get(&tgt_id) else { continue };
                let tb = blocks[d + 1][tpos];
                if tb.q != sb.q {
                    continue;
                }
                accumulate(&mut entries, tb.offset, sb.offset, &map, sign_of(i as i64));
            }
            // vertical: the input differential at the bottom, to (σ, q+1)
            if f.term(sb.q + 1).is_some() {
                if let Some(&tpos) = lookup[d + 1].get(&sb.id) {
                    let tb = blocks[d + 1][tpos];
                    if tb.q == sb.q + 1 {
                        let dm = f.differential(sb.q, sigma[0]);
                        accumulate(&mut entries, tb.offset, sb.offset, &dm, sign_of(k as i64 - 1));
                    }
                }
            }
        }
        diffs.push(entries);
    }
    FreeComplexZ::from_sparse(-n_hi, ranks, diffs).expect("chains model is a complex")
}

fn constant_complex(x: &FinPoset) -> SheafComplex {
    SheafComplex::from_sheaf(FreeStalkSheaf::constant(Arc::new(x.clone())), 0)
}

/// `H^•(X, F)` for a bounded complex of sheaves.
pub fn global_cohomology(f: &SheafComplex) -> GradedGroups {
    let chains = f.poset().chains(None, None, None);
    sections_complex(f, &chains, false).homology()
}

/// `H_•(X, F)`, reported in homological degrees.
pub fn homology(f: &SheafComplex) -> GradedGroups {
    let chains = f.poset().chains(None, None, None);
    chains_complex(f, &chains, false).homology().negate_degrees()
}

/// Reduced cohomology of the space with constant coefficients `Z`.
pub fn reduced_cohomology(x: &FinPoset) -> GradedGroups {
    if x.is_empty() {
        return GradedGroups::single(-1, crate::zlinalg::FgGroup::free(1));
    }
    let f = constant_complex(x);
    let chains = x.chains(None, None, None);
    sections_complex(&f, &chains, true).homology()
}

/// Reduced homology of the space with constant coefficients `Z`; the empty
/// space has `Z` in degree −1.
pub fn reduced_homology(x: &FinPoset) -> GradedGroups {
    if x.is_empty() {
        return GradedGroups::single(-1, crate::zlinalg::FgGroup::free(1));
    }
    let f = constant_complex(x);
    let chains = x.chains(None, None, None);
    chains_complex(&f, &chains, true).homology().negate_degrees()
}

/// `H^•_Y(X, F)`: cohomology with support in the closed set Y, computed on
/// the subcomplex of the sections model spanned by chains starting in Y.
pub fn local_cohomology(f: &SheafComplex, y: &SubSpace) -> Result<GradedGroups> {
    if !y.is_closed() {
        return Err(Error::BadSubset {
            expected: "closed",
            detail: format!("support set is {}", y.kind()),
        });
    }
    let mask = y.mask();
    let chains: Vec<Vec<usize>> = f
        .poset()
        .chains(None, None, None)
        .into_iter()
        .filter(|c| mask[c[0]])
        .collect();
    Ok(sections_complex(f, &chains, false).homology())
}

/// `H^•_x(U_x, F)`: sections of `F|_{U_x}` supported at the point itself —
/// the model runs over chains inside `U_x` starting exactly at x.
pub fn point_local_cohomology(f: &SheafComplex, x: usize) -> GradedGroups {
    let poset = f.poset();
    let mask = poset.mask_from(&poset.up_set(x));
    let chains = poset.chains(Some(&mask), Some(x), None);
    sections_complex(f, &chains, false).homology()
}

// --- Hom models ------------------------------------------------------------------

#[derive(Clone, Copy)]
struct HomBlock {
    chain: usize,
    q: i64,
    r: i64,
    /// source stalk rank (bottom of the chain)
    a: usize,
    /// target stalk rank (top of the chain)
    b: usize,
}

impl HomBlock {
    fn size(&self) -> usize {
        self.a * self.b
    }
}

/// The Hom model between two complexes over a face-closed chain set:
/// block (σ, q, r) at degree `r − q + (len σ − 1)` carries the maps
/// `F^q_{bottom σ} → G^r_{top σ}`, flattened row-major.
struct HomModel {
    chains: Vec<Vec<usize>>,
    lo: i64,
    /// per degree: blocks ordered by (chain, q)
    blocks: Vec<Vec<HomBlock>>,
    /// per degree: (target position at degree+1, source position, map)
    entries: Vec<Vec<(usize, usize, IntMatrix)>>,
}

impl HomModel {
    fn build(f: &SheafComplex, g: &SheafComplex, chains: Vec<Vec<usize>>) -> Option<Self> {
        if f.is_empty() || g.is_empty() || chains.is_empty() {
            return None;
        }
        let chain_id: BTreeMap<&[usize], usize> =
            chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        // insertions[σ] = every (τ, i) with τ ∖ τ_i = σ
        let mut insertions: Vec<Vec<(usize, usize)>> = vec![Vec::new(); chains.len()];
        for (tid, tau) in chains.iter().enumerate() {
            if tau.len() < 2 {
                continue;
            }
            for i in 0..tau.len() {
                let mut sigma = tau.clone();
                sigma.remove(i);
                if let Some(&sid) = chain_id.get(sigma.as_slice()) {
                    insertions[sid].push((tid, i));
                }
            }
        }
        let pmax = chains.last().map_or(0, |c| c.len() as i64 - 1);
        let lo = g.lo() - f.hi();
        let hi = g.hi() - f.lo() + pmax;
        let count = (hi - lo + 1) as usize;

        let mut blocks: Vec<Vec<HomBlock>> = Vec::with_capacity(count);
        let mut lookup: Vec<BTreeMap<(usize, i64), usize>> = Vec::with_capacity(count);
        for d in 0..count {
            let n = lo + d as i64;
            let mut layer = Vec::new();
            for (cid, c) in chains.iter().enumerate() {
                let p = c.len() as i64 - 1;
                for q in f.lo()..=f.hi() {
                    let r = n + q - p;
                    if g.term(r).is_none() {
                        continue;
                    }
                    let a = f.rank_at(q, c[0]);
                    let b = g.rank_at(r, *c.last().unwrap());
                    layer.push(HomBlock { chain: cid, q, r, a, b });
                }
            }
            lookup.push(
                layer.iter().enumerate().map(|(pos, b)| ((b.chain, b.q), pos)).collect(),
            );
            blocks.push(layer);
        }

        let mut entries: Vec<Vec<(usize, usize, IntMatrix)>> =
            Vec::with_capacity(count.saturating_sub(1));
        for d in 0..count.saturating_sub(1) {
            let n = lo + d as i64;
            let mut layer = Vec::new();
            for (spos, sb) in blocks[d].iter().enumerate() {
                if sb.size() == 0 {
                    continue;
                }
                let sigma = &chains[sb.chain];
                let k = sigma.len();
                let p = k as i64 - 1;
                // post-compose with the differential of G
                if g.term(sb.r + 1).is_some() {
                    let tpos = lookup[d + 1][&(sb.chain, sb.q)];
                    let tb = blocks[d + 1][tpos];
                    debug_assert_eq!(tb.r, sb.r + 1);
                    let dg = g.differential(sb.r, *sigma.last().unwrap());
                    let m = dg.kronecker(&IntMatrix::identity(sb.a));
                    push_entry(&mut layer, tpos, spos, m, 1);
                }
                // pre-compose with the differential of F
                if f.term(sb.q - 1).is_some() {
                    let tpos = lookup[d + 1][&(sb.chain, sb.q - 1)];
                    let df = f.differential(sb.q - 1, sigma[0]);
                    let m = IntMatrix::identity(sb.b).kronecker(&df.transpose());
                    push_entry(&mut layer, tpos, spos, m, -sign_of(n + p));
                }
                // insert an element into the chain
                for &(tid, i) in &insertions[sb.chain] {
                    let tau = &chains[tid];
                    let Some(&tpos) = lookup[d + 1].get(&(tid, sb.q)) else { continue };
                    let tb = blocks[d + 1][tpos];
                    debug_assert_eq!(tb.r, sb.r);
                    let m = if i == 0 {
                        let rho_f = f.term(sb.q).unwrap().rho(tau[0], tau[1]);
                        IntMatrix::identity(sb.b).kronecker(&rho_f.transpose())
                    } else if i + 1 == tau.len() {
                        let rho_g =
                            g.term(sb.r).unwrap().rho(tau[tau.len() - 2], tau[tau.len() - 1]);
                        rho_g.kronecker(&IntMatrix::identity(sb.a))
                    } else {
                        IntMatrix::identity(sb.size())
                    };
                    push_entry(&mut layer, tpos, spos, m, -sign_of(n + i as i64));
                }
            }
            entries.push(layer);
        }
        Some(HomModel { chains, lo, blocks, entries })
    }

    /// Materialize the model restricted to chains satisfying `keep`, as a
    /// complex of free groups.
    fn complex_where(&self, keep: impl Fn(usize) -> bool) -> FreeComplexZ {
        let count = self.blocks.len();
        let mut offsets: Vec<Vec<Option<usize>>> = Vec::with_capacity(count);
        let mut ranks: Vec<usize> = Vec::with_capacity(count);
        for layer in &self.blocks {
            let mut off = 0usize;
            let mut layer_off = Vec::with_capacity(layer.len());
            for b in layer {
                if keep(b.chain) {
                    layer_off.push(Some(off));
                    off += b.size();
                } else {
                    layer_off.push(None);
                }
            }
            offsets.push(layer_off);
            ranks.push(off);
        }
        let mut diffs: Vec<SparseEntries> = Vec::with_capacity(count.saturating_sub(1));
        for d in 0..count.saturating_sub(1) {
            let mut es = SparseEntries::new();
            for (tpos, spos, m) in &self.entries[d] {
                let (Some(t0), Some(s0)) = (offsets[d + 1][*tpos], offsets[d][*spos]) else {
                    continue;
                };
                accumulate(&mut es, t0, s0, m, 1);
            }
            diffs.push(es);
        }
        FreeComplexZ::from_sparse(self.lo, ranks, diffs).expect("Hom model is a complex")
    }
}

fn push_entry(
    layer: &mut Vec<(usize, usize, IntMatrix)>,
    tpos: usize,
    spos: usize,
    m: IntMatrix,
    sign: i64,
) {
    if m.is_zero() {
        return;
    }
    let m = if sign == -1 { m.neg() } else { m };
    layer.push((tpos, spos, m));
}

/// `Ext^•_X(F, G) = H^•(RHom(F, G))`.
pub fn rhom_global(f: &SheafComplex, g: &SheafComplex) -> GradedGroups {
    let chains = f.poset().chains(None, None, None);
    match HomModel::build(f, g, chains) {
        Some(model) => model.complex_where(|_| true).homology(),
        None => GradedGroups::new(),
    }
}

/// `Ext^•_U(F|_U, G|_U)` over an open subset, straight from the model over
/// chains inside U.
pub fn rhom_over_open(f: &SheafComplex, g: &SheafComplex, u: &SubSpace) -> Result<GradedGroups> {
    if !u.is_open() {
        return Err(Error::BadSubset {
            expected: "open",
            detail: format!("restriction domain is {}", u.kind()),
        });
    }
    let chains = f.poset().chains(Some(u.mask()), None, None);
    Ok(match HomModel::build(f, g, chains) {
        Some(model) => model.complex_where(|_| true).homology(),
        None => GradedGroups::new(),
    })
}

/// The sheaf `RHom(F, G)`: its stalk at z is the Hom model over chains
/// inside `U_z`, and its restriction maps are the coordinate projections
/// killing the blocks whose chain leaves the smaller open set.
pub fn rhom_sheaf(f: &SheafComplex, g: &SheafComplex) -> SheafComplex {
    let poset = f.poset().clone();
    let chains = poset.chains(None, None, None);
    let Some(model) = HomModel::build(f, g, chains) else {
        return SheafComplex::empty(poset);
    };
    let nel = poset.len();
    // keep[z][chain]: does the chain lie inside U_z?
    let keep: Vec<Vec<bool>> =
        (0..nel).map(|z| model.chains.iter().map(|c| poset.leq(z, c[0])).collect()).collect();
    let count = model.blocks.len();

    // per degree, per element: block offsets and total rank
    let mut offsets: Vec<Vec<Vec<Option<usize>>>> = Vec::with_capacity(count);
    let mut ranks: Vec<Vec<usize>> = Vec::with_capacity(count);
    for layer in &model.blocks {
        let mut per_z_off = Vec::with_capacity(nel);
        let mut per_z_rank = Vec::with_capacity(nel);
        for z in 0..nel {
            let mut off = 0usize;
            let mut this = Vec::with_capacity(layer.len());
            for b in layer {
                if keep[z][b.chain] {
                    this.push(Some(off));
                    off += b.size();
                } else {
                    this.push(None);
                }
            }
            per_z_off.push(this);
            per_z_rank.push(off);
        }
        offsets.push(per_z_off);
        ranks.push(per_z_rank);
    }

    let terms: Vec<FreeStalkSheaf> = (0..count)
        .map(|d| {
            let maps: Vec<IntMatrix> = poset
                .covers()
                .iter()
                .map(|&(za, zb)| {
                    let mut m = IntMatrix::zeros(ranks[d][zb], ranks[d][za]);
                    for (pos, b) in model.blocks[d].iter().enumerate() {
                        if let (Some(oa), Some(ob)) = (offsets[d][za][pos], offsets[d][zb][pos]) {
                            for e in 0..b.size() {
                                m.set(ob + e, oa + e, BigInt::from(1));
                            }
                        }
                    }
                    m
                })
                .collect();
            FreeStalkSheaf::new(poset.clone(), ranks[d].clone(), maps)
                .expect("projections of nested chain sets are functorial")
        })
        .collect();

    let diffs: Vec<Vec<IntMatrix>> = (0..count.saturating_sub(1))
        .map(|d| {
            (0..nel)
                .map(|z| {
                    let mut m = IntMatrix::zeros(ranks[d + 1][z], ranks[d][z]);
                    for (tpos, spos, block) in &model.entries[d] {
                        let (Some(t0), Some(s0)) =
                            (offsets[d + 1][z][*tpos], offsets[d][z][*spos])
                        else {
                            continue;
                        };
                        for (i, j, v) in block.sparse_entries() {
                            m.set(t0 + i, s0 + j, v);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();

    SheafComplex::new(poset, model.lo, terms, diffs).expect("RHom sheaf model is a complex")
}

/// `Ext^•_X(Z_{x}, Z_{y})` by the interval formula: the reduced cohomology
/// of the open interval (x, y), reindexed up by two.
pub fn ext_skyscrapers(poset: &FinPoset, x: usize, y: usize) -> Result<GradedGroups> {
    if !poset.lt(x, y) {
        return Err(Error::Unsupported(format!(
            "Ext between skyscrapers needs {} < {}",
            poset.label(x),
            poset.label(y)
        )));
    }
    let members = poset.open_interval(x, y)?;
    Ok(reduced_cohomology(&poset.induced(&members)).shift(-2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family;
    use crate::sheaf::{cone, SheafMorphism};
    use crate::zlinalg::FgGroup;
    use rand::Rng;

    fn constant_on(p: &FinPoset) -> SheafComplex {
        constant_complex(p)
    }

    fn z_torsion_complex(p: &FinPoset, m: i64) -> SheafComplex {
        // constant sheaf tensored with [Z -m-> Z]: stalk homology Z/m in
        // degree 1 at every point
        let e = FreeComplexZ::from_dense(0, vec![1, 1], vec![IntMatrix::from_rows(&[&[m]])])
            .unwrap();
        constant_on(p).tensor_group(&e)
    }

    #[test]
    fn constant_cohomology_of_contractible_and_circle() {
        let v = family::v_space();
        assert_eq!(global_cohomology(&constant_on(&v)), GradedGroups::single(0, FgGroup::free(1)));

        let c = family::circle();
        let h = global_cohomology(&constant_on(&c));
        assert_eq!(h.get(0), FgGroup::free(1));
        assert_eq!(h.get(1), FgGroup::free(1));
        assert_eq!(h.degrees().count(), 2);
    }

    #[test]
    fn skyscraper_at_closed_point_has_its_stalk_as_sections() {
        let c = family::circle();
        let x1 = c.index_of("x1").unwrap();
        let sky = SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::skyscraper(Arc::new(c.clone()), x1),
            0,
        );
        assert_eq!(global_cohomology(&sky), GradedGroups::single(0, FgGroup::free(1)));
    }

    #[test]
    fn reduced_homology_of_small_spaces() {
        assert_eq!(
            reduced_homology(&FinPoset::empty()),
            GradedGroups::single(-1, FgGroup::free(1))
        );
        assert_eq!(
            reduced_homology(&family::two_points()),
            GradedGroups::single(0, FgGroup::free(1))
        );
        assert!(reduced_homology(&family::point()).is_zero());
        assert_eq!(
            reduced_cohomology(&FinPoset::empty()),
            GradedGroups::single(-1, FgGroup::free(1))
        );
    }

    #[test]
    fn hexagon_interval_in_affine_three_space() {
        let a3 = family::affine_space(3);
        let bot = a3.index_of("∅").unwrap();
        let top = a3.index_of("123").unwrap();
        let members = a3.open_interval(bot, top).unwrap();
        assert_eq!(members.len(), 6);
        let hexagon = a3.induced(&members);
        assert_eq!(
            reduced_homology(&hexagon),
            GradedGroups::single(1, FgGroup::free(1))
        );
    }

    #[test]
    fn local_cohomology_examples() {
        // A², support at the closed point: the punctured space is a
        // projective line with a maximum, so the triangle collapses
        let a2 = family::affine_space(2);
        let y = SubSpace::from_labels(&a2, &["∅"]).unwrap();
        assert!(local_cohomology(&constant_on(&a2), &y).unwrap().is_zero());

        // V: kernel of Z ⊕ Z² → (sections over the two open points)
        let v = family::v_space();
        let yo = SubSpace::from_labels(&v, &["o"]).unwrap();
        assert_eq!(
            local_cohomology(&constant_on(&v), &yo).unwrap(),
            GradedGroups::single(1, FgGroup::free(1))
        );

        let pt = family::point();
        let all = SubSpace::from_labels(&pt, &["pt"]).unwrap();
        assert_eq!(
            local_cohomology(&constant_on(&pt), &all).unwrap(),
            GradedGroups::single(0, FgGroup::free(1))
        );

        // support must be closed
        let open = SubSpace::from_labels(&v, &["a"]).unwrap();
        assert!(local_cohomology(&constant_on(&v), &open).is_err());
    }

    #[test]
    fn point_local_cohomology_examples() {
        let a2 = family::affine_space(2);
        let one = a2.index_of("1").unwrap();
        assert!(point_local_cohomology(&constant_on(&a2), one).is_zero());

        let a3 = family::affine_space(3);
        let bot = a3.index_of("∅").unwrap();
        assert!(point_local_cohomology(&constant_on(&a3), bot).is_zero());

        let v = family::v_space();
        let o = v.index_of("o").unwrap();
        assert_eq!(
            point_local_cohomology(&constant_on(&v), o),
            GradedGroups::single(1, FgGroup::free(1))
        );
    }

    #[test]
    fn rhom_from_constant_is_global_cohomology() {
        let c = family::circle();
        let g = z_torsion_complex(&c, 2);
        assert_eq!(rhom_global(&constant_on(&c), &g), global_cohomology(&g));

        let mut rng = family::seeded_rng(21);
        for _ in 0..10 {
            let p = Arc::new(family::random_poset(&mut rng, 5));
            let f = SheafComplex::from_sheaf(family::random_sheaf(&mut rng, &p, 2), 0);
            let z = SheafComplex::from_sheaf(
                crate::sheaf::FreeStalkSheaf::constant(p.clone()),
                0,
            );
            assert_eq!(rhom_global(&z, &f), global_cohomology(&f));
        }
    }

    #[test]
    fn rhom_from_skyscraper_is_point_local_cohomology() {
        let mut rng = family::seeded_rng(22);
        for _ in 0..12 {
            let p = Arc::new(family::random_poset(&mut rng, 5));
            let f = SheafComplex::from_sheaf(family::random_sheaf(&mut rng, &p, 2), 0);
            for x in 0..p.len() {
                let sky = SheafComplex::from_sheaf(
                    crate::sheaf::FreeStalkSheaf::skyscraper(p.clone(), x),
                    0,
                );
                assert_eq!(
                    rhom_global(&sky, &f),
                    point_local_cohomology(&f, x),
                    "at {} of {:?}",
                    p.label(x),
                    p.labels()
                );
            }
        }
    }

    #[test]
    fn rhom_into_closure_constant_dualizes_the_stalk() {
        let v = family::v_space();
        let a = v.index_of("a").unwrap();
        let f = z_torsion_complex(&v, 3);
        let closure = SubSpace::new(&v, v.down_set(a));
        let zc = SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::supported_constant(
                Arc::new(v.clone()),
                &closure,
            )
            .unwrap(),
            0,
        );
        let got = rhom_global(&f, &zc);
        assert_eq!(got, f.stalk_complex(a).dual().homology());
        assert_eq!(got, GradedGroups::single(0, FgGroup::cyclic(3)));
    }

    #[test]
    fn ext_between_skyscrapers_by_intervals() {
        let a2 = family::affine_space(2);
        let bot = a2.index_of("∅").unwrap();
        let top = a2.index_of("12").unwrap();
        let one = a2.index_of("1").unwrap();
        assert_eq!(
            ext_skyscrapers(&a2, bot, top).unwrap(),
            GradedGroups::single(2, FgGroup::free(1))
        );
        assert_eq!(
            ext_skyscrapers(&a2, bot, one).unwrap(),
            GradedGroups::single(1, FgGroup::free(1))
        );
        assert!(ext_skyscrapers(&a2, top, bot).is_err());
        assert!(ext_skyscrapers(&a2, one, one).is_err());

        let a3 = family::affine_space(3);
        let b3 = a3.index_of("∅").unwrap();
        let t3 = a3.index_of("123").unwrap();
        assert_eq!(
            ext_skyscrapers(&a3, b3, t3).unwrap(),
            GradedGroups::single(3, FgGroup::free(1))
        );
    }

    #[test]
    fn homology_is_dual_to_cohomology() {
        let mut rng = family::seeded_rng(23);
        let mut spaces = vec![
            family::v_space(),
            family::circle(),
            family::affine_space(2),
            family::suspension_of_three_points(),
        ];
        for _ in 0..20 {
            spaces.push(family::random_poset(&mut rng, 6));
        }
        for p in &spaces {
            let f = constant_on(p);
            let h = homology(&f);
            let c = global_cohomology(&f);
            assert_eq!(h, c.universal_coefficient_dual().negate_degrees(), "{:?}", p.labels());
        }
    }

    #[test]
    fn point_local_is_shifted_reduced_cohomology_of_the_punctured_cone() {
        let mut rng = family::seeded_rng(24);
        let mut spaces =
            vec![family::v_space(), family::affine_space(2), family::circle()];
        for _ in 0..15 {
            spaces.push(family::random_poset(&mut rng, 6));
        }
        for p in &spaces {
            let f = constant_on(p);
            for x in 0..p.len() {
                let punctured = p.induced(&p.punctured_up_set(x));
                assert_eq!(
                    point_local_cohomology(&f, x),
                    reduced_cohomology(&punctured).shift(-1),
                    "at {} of {:?}",
                    p.label(x),
                    p.labels()
                );
            }
        }
    }

    #[test]
    fn excision_for_skyscraper_sources() {
        let mut rng = family::seeded_rng(25);
        for _ in 0..10 {
            let p = Arc::new(family::random_poset(&mut rng, 6));
            let f = SheafComplex::from_sheaf(family::random_sheaf(&mut rng, &p, 2), 0);
            for x in 0..p.len() {
                let sky = SheafComplex::from_sheaf(
                    crate::sheaf::FreeStalkSheaf::skyscraper(p.clone(), x),
                    0,
                );
                let global = rhom_global(&sky, &f);
                // U_x itself, and a larger random open around x
                let mut seeds = vec![x];
                for y in 0..p.len() {
                    if rng.gen_bool(0.3) {
                        seeds.push(y);
                    }
                }
                let u = SubSpace::new(&p, p.up_closure(&seeds));
                assert_eq!(rhom_over_open(&sky, &f, &u).unwrap(), global);
            }
        }
    }

    #[test]
    fn rhom_sheaf_of_constants_and_skyscrapers() {
        let v = Arc::new(family::v_space());
        let z = SheafComplex::from_sheaf(crate::sheaf::FreeStalkSheaf::constant(v.clone()), 0);

        // End(Z_X) is Z_X
        let end = rhom_sheaf(&z, &z);
        for x in 0..v.len() {
            assert_eq!(
                end.stalk_cohomology(x),
                GradedGroups::single(0, FgGroup::free(1))
            );
        }

        // RHom(Z_{x}, F) lives on the closure of x
        let o = v.index_of("o").unwrap();
        let sky = SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::skyscraper(v.clone(), o),
            0,
        );
        let hom = rhom_sheaf(&sky, &z);
        assert_eq!(
            hom.stalk_cohomology(o),
            GradedGroups::single(1, FgGroup::free(1))
        );
        assert!(hom.stalk_cohomology(v.index_of("a").unwrap()).is_zero());
        assert!(hom.stalk_cohomology(v.index_of("b").unwrap()).is_zero());

        // RHom(Z_U, G) has stalks RΓ(U ∩ U_z, G)
        let ua = SubSpace::from_labels(&v, &["a"]).unwrap();
        let zu = SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::supported_constant(v.clone(), &ua).unwrap(),
            0,
        );
        let homu = rhom_sheaf(&zu, &z);
        assert_eq!(
            homu.stalk_cohomology(o),
            GradedGroups::single(0, FgGroup::free(1))
        );
        assert_eq!(
            homu.stalk_cohomology(v.index_of("a").unwrap()),
            GradedGroups::single(0, FgGroup::free(1))
        );
        assert!(homu.stalk_cohomology(v.index_of("b").unwrap()).is_zero());
    }

    #[test]
    fn rhom_sheaf_untwists_group_coefficients() {
        // RHom(E ⊗ Z_X, G) ≅ E^∨ ⊗ RHom(Z_X, G) stalkwise
        let v = Arc::new(family::v_space());
        let e = FreeComplexZ::from_dense(0, vec![1, 1], vec![IntMatrix::from_rows(&[&[2]])])
            .unwrap();
        let z = SheafComplex::from_sheaf(crate::sheaf::FreeStalkSheaf::constant(v.clone()), 0);
        let o = v.index_of("o").unwrap();
        let g = z.direct_sum(&SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::skyscraper(v.clone(), o),
            0,
        ));

        let lhs = rhom_sheaf(&z.tensor_group(&e), &g);
        let rhs = rhom_sheaf(&z, &g).tensor_group(&e.dual());
        for x in 0..v.len() {
            assert_eq!(lhs.stalk_cohomology(x), rhs.stalk_cohomology(x), "at {}", v.label(x));
        }
    }

    #[test]
    fn kunneth_for_external_products() {
        let c = family::circle();
        let v = family::v_space();
        let f = z_torsion_complex(&v, 2);
        let g = constant_on(&c);
        let prod = f.external_product(&g);
        assert_eq!(
            global_cohomology(&prod),
            global_cohomology(&f).kunneth(&global_cohomology(&g))
        );

        // torus-like square of the circle
        let both = constant_on(&c).external_product(&constant_on(&c));
        let h = global_cohomology(&both);
        assert_eq!(h.get(0), FgGroup::free(1));
        assert_eq!(h.get(1), FgGroup::free(2));
        assert_eq!(h.get(2), FgGroup::free(1));
    }

    #[test]
    fn vanishing_against_all_skyscrapers_detects_acyclicity() {
        let mut rng = family::seeded_rng(26);
        for _ in 0..6 {
            let p = Arc::new(family::random_poset(&mut rng, 5));
            let f = SheafComplex::from_sheaf(family::random_sheaf(&mut rng, &p, 2), 0);
            let acyclic = cone(&f, &f, &SheafMorphism::identity(&f)).unwrap();
            for x in 0..p.len() {
                let sky = SheafComplex::from_sheaf(
                    crate::sheaf::FreeStalkSheaf::skyscraper(p.clone(), x),
                    0,
                );
                assert!(rhom_global(&sky, &acyclic).is_zero());
            }
        }

        // a non-acyclic complex is detected by some skyscraper
        let v = Arc::new(family::v_space());
        let a = v.index_of("a").unwrap();
        let target = SheafComplex::from_sheaf(
            crate::sheaf::FreeStalkSheaf::skyscraper(v.clone(), a),
            0,
        );
        let hit = (0..v.len()).any(|x| {
            let sky = SheafComplex::from_sheaf(
                crate::sheaf::FreeStalkSheaf::skyscraper(v.clone(), x),
                0,
            );
            !rhom_global(&sky, &target).is_zero()
        });
        assert!(hit);
    }
}
