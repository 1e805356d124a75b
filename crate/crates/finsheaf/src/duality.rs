//! Dualizing models, canonical complexes, and the duality functor.
//!
//! For a closed subset `Y` of a finite space `X`, the functor
//! `F ↦ RΓ_Y(X, F)^∨` is representable by an explicit finite complex of
//! free-stalk sheaves: in degree `−p` it carries one copy of the
//! closure-supported constant sheaf `Z_{C_{x_p}}` for each chain
//! `x_0 < … < x_p` starting inside `Y`, and its differential drops chain
//! elements with alternating signs. The face dropping the top element is the
//! support-shrinking surjection `Z_{C_{x_p}} → Z_{C_{x_{p−1}}}`, every other
//! face is an identity, and the face dropping `x_0` is present only when the
//! shortened chain still starts inside `Y` (closedness of `Y` makes the
//! discarded chains a subcomplex, so the quotient is again a complex).
//! Taking `Y = X` represents plain `RΓ(X, −)^∨`; taking `Y` to be the closed
//! point of a local space gives the local model, written `D^0` in the tests.
//!
//! A *canonical complex* is one against which every complex with finitely
//! generated stalks is reflexive. Existence is governed by two topological
//! conditions — catenarity, and every open interval `(x, y)` being a
//! homological sphere — which [`sphere_report`] checks. On a local space the
//! canonical complex is the dualizing model at the closed point, with
//! codimension function `φ_x = −dim C_x`; on an irreducible space it is the
//! skyscraper at the generic point, with `φ_x = dim U_x`. Either way the
//! stalk of the canonical complex at `x` is the reduced homology of the
//! punctured cone `U_x^*` laid out by φ ([`canonical_stalks`]).
//!
//! [`dualize`] is `RHom(−, D^0)` as a sheaf complex on a local space passing
//! the gate, and [`reflexivity_check`] compares a complex with its double
//! dual stalk by stalk — iso classes of stalk cohomology, since no
//! chain-level unit map is available to certify a quasi-isomorphism.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::cohomology::{local_cohomology, reduced_homology, rhom_global, rhom_sheaf};
use crate::poset::{CodimFunction, FinPoset, SubSpace};
use crate::sheaf::{FreeStalkSheaf, SheafComplex};
use crate::zlinalg::{FgGroup, GradedGroups, IntMatrix};
use crate::{Error, Result};

/// Which sections-with-support functor a dualizing model represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualizingKind {
    /// `RΓ(X, −)^∨` — sections over the whole space.
    Global,
    /// `RΓ_Y(X, −)^∨` — sections supported on a closed subset.
    AlongClosed,
}

/// An explicit finite complex representing `F ↦ RΓ_Y(X, F)^∨`, with the
/// chain bookkeeping kept alongside the complex.
pub struct DualizingModel {
    kind: DualizingKind,
    support: Vec<usize>,
    /// `chain_groups[i]` lists the chains indexing the summands of the term
    /// at degree `lo + i` (so longest chains first).
    chain_groups: Vec<Vec<Vec<usize>>>,
    complex: SheafComplex,
}

impl DualizingModel {
    /// The model of `RΓ(X, −)^∨`, built from every chain in the space.
    pub fn global(poset: &Arc<FinPoset>) -> DualizingModel {
        build_model(poset, None, DualizingKind::Global, (0..poset.len()).collect())
    }

    /// The model of `RΓ_Y(X, −)^∨` for a closed subset `Y`, built from the
    /// chains starting inside `Y`.
    pub fn along_closed(poset: &Arc<FinPoset>, y: &SubSpace) -> Result<DualizingModel> {
        if !y.is_closed() {
            return Err(Error::BadSubset {
                expected: "closed",
                detail: format!("support of the dualizing model is {}", y.kind()),
            });
        }
        Ok(build_model(poset, Some(y.mask()), DualizingKind::AlongClosed, y.members().to_vec()))
    }

    /// The local model `D^0`: sections supported at the unique closed point
    /// of a local space.
    pub fn at_closed_point(poset: &Arc<FinPoset>) -> Result<DualizingModel> {
        let Some(bottom) = poset.bottom() else {
            return Err(Error::Unsupported(
                "dualizing model at the closed point needs a local space".into(),
            ));
        };
        Self::along_closed(poset, &SubSpace::new(poset, [bottom]))
    }

    pub fn kind(&self) -> DualizingKind {
        self.kind
    }

    /// The closed support `Y` (all of `X` for the global kind).
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn complex(&self) -> &SheafComplex {
        &self.complex
    }

    pub fn into_complex(self) -> SheafComplex {
        self.complex
    }

    /// The chains indexing the summands of the term at `degree`.
    pub fn chains_at(&self, degree: i64) -> &[Vec<usize>] {
        let i = degree - self.complex.lo();
        if i < 0 || i as usize >= self.chain_groups.len() {
            &[]
        } else {
            &self.chain_groups[i as usize]
        }
    }
}

/// Assemble the chain-indexed complex: degree `−p` holds `Z_{C_{top σ}}` for
/// each admissible `p`-chain σ, faces drop elements with sign `(−1)^i`.
fn build_model(
    poset: &Arc<FinPoset>,
    first_in: Option<&[bool]>,
    kind: DualizingKind,
    support: Vec<usize>,
) -> DualizingModel {
    let n = poset.len();
    let mut by_len: Vec<Vec<Vec<usize>>> = Vec::new();
    for c in poset.chains(None, None, None) {
        if first_in.is_some_and(|mask| !mask[c[0]]) {
            continue;
        }
        let p = c.len() - 1;
        if by_len.len() <= p {
            by_len.resize(p + 1, Vec::new());
        }
        by_len[p].push(c);
    }
    if by_len.is_empty() {
        return DualizingModel {
            kind,
            support,
            chain_groups: Vec::new(),
            complex: SheafComplex::empty(poset.clone()),
        };
    }
    let pmax = by_len.len() - 1;
    let lo = -(pmax as i64);

    // Summand positions: offsets[p][z][k] = the row of chain k at stalk z,
    // present exactly when z lies in the closure of the chain's top.
    let mut offsets: Vec<Vec<Vec<Option<usize>>>> = Vec::with_capacity(pmax + 1);
    let mut ranks: Vec<Vec<usize>> = Vec::with_capacity(pmax + 1);
    for chains_p in &by_len {
        let mut per_z_off = Vec::with_capacity(n);
        let mut per_z_rank = Vec::with_capacity(n);
        for z in 0..n {
            let mut off = Vec::with_capacity(chains_p.len());
            let mut r = 0usize;
            for c in chains_p {
                if poset.leq(z, *c.last().unwrap()) {
                    off.push(Some(r));
                    r += 1;
                } else {
                    off.push(None);
                }
            }
            per_z_off.push(off);
            per_z_rank.push(r);
        }
        offsets.push(per_z_off);
        ranks.push(per_z_rank);
    }

    let mut terms = Vec::with_capacity(pmax + 1);
    for i in 0..=pmax {
        let p = pmax - i;
        let cover_maps: Vec<IntMatrix> = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                let mut m = IntMatrix::zeros(ranks[p][b], ranks[p][a]);
                for k in 0..by_len[p].len() {
                    if let Some(row) = offsets[p][b][k] {
                        let col = offsets[p][a][k].expect("closures are down-closed");
                        m.set(row, col, BigInt::from(1));
                    }
                }
                m
            })
            .collect();
        terms.push(
            FreeStalkSheaf::new(poset.clone(), ranks[p].clone(), cover_maps)
                .expect("sums of closure-supported constants are functorial"),
        );
    }

    let index: Vec<HashMap<Vec<usize>, usize>> = by_len
        .iter()
        .map(|chains_p| chains_p.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect())
        .collect();

    let mut diffs: Vec<Vec<IntMatrix>> = Vec::with_capacity(pmax);
    for i in 0..pmax {
        let p = pmax - i;
        let layer: Vec<IntMatrix> = (0..n)
            .map(|z| {
                let mut m = IntMatrix::zeros(ranks[p - 1][z], ranks[p][z]);
                for (k, c) in by_len[p].iter().enumerate() {
                    let Some(col) = offsets[p][z][k] else { continue };
                    for drop in 0..=p {
                        if drop == 0 && first_in.is_some_and(|mask| !mask[c[1]]) {
                            continue; // the shortened chain left the model
                        }
                        if drop == p && !poset.leq(z, c[p - 1]) {
                            continue; // the support surjection kills this stalk
                        }
                        let face: Vec<usize> = c
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != drop)
                            .map(|(_, &v)| v)
                            .collect();
                        let t = index[p - 1][&face];
                        let row = offsets[p - 1][z][t].expect("face supports nest");
                        m.set(row, col, BigInt::from(if drop % 2 == 0 { 1 } else { -1 }));
                    }
                }
                m
            })
            .collect();
        diffs.push(layer);
    }

    let complex = SheafComplex::new(poset.clone(), lo, terms, diffs)
        .expect("chain faces square to zero");
    let mut chain_groups = by_len;
    chain_groups.reverse();
    DualizingModel { kind, support, chain_groups, complex }
}

/// Does `RHom(F, D_X^Y) = RΓ_Y(X, F)^∨` hold for this complex, at the level
/// of graded groups? Both sides are computed independently: the left against
/// the chain-indexed model, the right as the universal-coefficient dual of
/// local cohomology.
pub fn verify_local_duality(f: &SheafComplex, y: &SubSpace) -> Result<bool> {
    let model = DualizingModel::along_closed(f.poset(), y)?;
    let lhs = rhom_global(f, model.complex());
    let rhs = local_cohomology(f, y)?.universal_coefficient_dual();
    Ok(lhs == rhs)
}

/// One open interval's sphere test.
#[derive(Clone, Debug)]
pub struct IntervalVerdict {
    pub lower: usize,
    pub upper: usize,
    /// Dimension of the open interval as a space (−1 when empty).
    pub dim: i64,
    pub reduced_homology: GradedGroups,
    pub is_sphere: bool,
}

/// The topological conditions for local dualizability, with per-interval
/// evidence.
#[derive(Clone, Debug)]
pub struct DualizabilityReport {
    pub is_catenary: bool,
    pub intervals: Vec<IntervalVerdict>,
    pub is_locally_dualizable: bool,
}

impl DualizabilityReport {
    /// The first interval that is not a homological sphere, if any.
    pub fn first_failure(&self) -> Option<&IntervalVerdict> {
        self.intervals.iter().find(|v| !v.is_sphere)
    }
}

/// Check catenarity and that every open interval `(x, y)` is a homological
/// sphere: reduced homology `Z` in degree `dim (x, y)` and zero elsewhere.
/// The empty interval passes — it carries `Z` in degree −1 and has dimension
/// −1.
pub fn sphere_report(poset: &FinPoset) -> DualizabilityReport {
    let mut intervals = Vec::new();
    let mut all_spheres = true;
    for x in 0..poset.len() {
        for y in 0..poset.len() {
            if !poset.lt(x, y) {
                continue;
            }
            let members = poset.open_interval(x, y).expect("x < y");
            let sub = poset.induced(&members);
            let dim = sub.dim();
            let reduced = reduced_homology(&sub);
            let is_sphere = reduced == GradedGroups::single(dim, FgGroup::free(1));
            all_spheres &= is_sphere;
            intervals.push(IntervalVerdict {
                lower: x,
                upper: y,
                dim,
                reduced_homology: reduced,
                is_sphere,
            });
        }
    }
    let is_catenary = poset.is_catenary();
    DualizabilityReport {
        is_catenary,
        intervals,
        is_locally_dualizable: is_catenary && all_spheres,
    }
}

/// The shape a constructed canonical complex takes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalShape {
    /// Local space: the dualizing model at the closed point.
    PointDualizing,
    /// Irreducible space: the skyscraper at the generic point (its index).
    GenericSkyscraper(usize),
}

/// A constructed canonical complex with its codimension function.
pub struct CanonicalComplex {
    pub shape: CanonicalShape,
    pub complex: SheafComplex,
    pub phi: CodimFunction,
}

/// Outcome of looking for a canonical complex.
pub enum CanonicalVerdict {
    /// Built one: the space is local or irreducible, and dualizable.
    Canonical(CanonicalComplex),
    /// Every `U_x` has one, but the space is neither local nor irreducible,
    /// so no global construction is attempted.
    LocallyDualizable,
    /// The topological conditions fail; the report carries the witness.
    NotDualizable(DualizabilityReport),
}

/// Construct a canonical complex where the theory provides one: on an
/// irreducible space, the skyscraper at the generic point with
/// `φ_x = dim U_x`; on a local space, the dualizing model at the closed
/// point with `φ_x = −dim C_x`. The associated φ is asserted to step by
/// exactly one across covers before returning.
pub fn canonical_complex(poset: &Arc<FinPoset>) -> CanonicalVerdict {
    let report = sphere_report(poset);
    if !report.is_locally_dualizable {
        return CanonicalVerdict::NotDualizable(report);
    }
    if let Some(g) = poset.generic_point() {
        let values: Vec<i64> =
            (0..poset.len()).map(|x| poset.induced(&poset.up_set(x)).dim()).collect();
        let phi = CodimFunction::from_values(poset, values)
            .expect("dim U_x steps by one across covers once the gate passes");
        return CanonicalVerdict::Canonical(CanonicalComplex {
            shape: CanonicalShape::GenericSkyscraper(g),
            complex: SheafComplex::from_sheaf(FreeStalkSheaf::skyscraper(poset.clone(), g), 0),
            phi,
        });
    }
    if poset.bottom().is_some() {
        let model = DualizingModel::at_closed_point(poset).expect("space is local");
        let values: Vec<i64> =
            (0..poset.len()).map(|x| -poset.induced(&poset.down_set(x)).dim()).collect();
        let phi = CodimFunction::from_values(poset, values)
            .expect("−dim C_x steps by one across covers once the gate passes");
        return CanonicalVerdict::Canonical(CanonicalComplex {
            shape: CanonicalShape::PointDualizing,
            complex: model.into_complex(),
            phi,
        });
    }
    CanonicalVerdict::LocallyDualizable
}

/// The stalkwise groups a canonical complex with codimension function φ must
/// have: reduced homology of the punctured cone `U_x^*`, with homological
/// degree `i` landing in cohomological degree `φ_x − 1 − i`.
pub fn canonical_stalks(poset: &FinPoset, phi: &CodimFunction) -> Vec<GradedGroups> {
    (0..poset.len())
        .map(|x| {
            let star = poset.punctured_up_set(x);
            let reduced = reduced_homology(&poset.induced(&star));
            let mut out = GradedGroups::new();
            for (i, g) in reduced.iter() {
                out.insert(phi.get(x) - 1 - i, g.clone());
            }
            out
        })
        .collect()
}

/// Human-readable witness for a failed dualizability gate.
pub(crate) fn gate_failure(poset: &FinPoset, report: &DualizabilityReport) -> String {
    if !report.is_catenary {
        return "space is not catenary".into();
    }
    match report.first_failure() {
        Some(v) => format!(
            "interval ({}, {}) has reduced homology {}, not a {}-sphere",
            poset.label(v.lower),
            poset.label(v.upper),
            v.reduced_homology,
            v.dim,
        ),
        None => "space is not locally dualizable".into(),
    }
}

/// `RHom(F, D^0)` as a sheaf complex, on a local space that passes the
/// dualizability gate. Refuses otherwise, naming the violation.
pub fn dualize(f: &SheafComplex) -> Result<SheafComplex> {
    let poset = f.poset();
    if poset.bottom().is_none() {
        return Err(Error::Unsupported("duality functor needs a local space".into()));
    }
    let report = sphere_report(poset);
    if !report.is_locally_dualizable {
        return Err(Error::Unsupported(gate_failure(poset, &report)));
    }
    let model = DualizingModel::at_closed_point(poset)?;
    Ok(rhom_sheaf(f, model.complex()))
}

/// Compare `F` with `RHom(RHom(F, Ω), Ω)` by stalkwise cohomology, for any
/// candidate complex Ω on the same space.
pub fn bidual_matches(f: &SheafComplex, omega: &SheafComplex) -> bool {
    let dd = rhom_sheaf(&rhom_sheaf(f, omega), omega);
    (0..f.poset().len()).all(|x| f.stalk_cohomology(x) == dd.stalk_cohomology(x))
}

/// Reflexivity against the space's own local dualizing model, judged by
/// stalkwise cohomology iso classes.
pub fn reflexivity_check(f: &SheafComplex) -> Result<bool> {
    let poset = f.poset();
    if poset.bottom().is_none() {
        return Err(Error::Unsupported("reflexivity check needs a local space".into()));
    }
    let report = sphere_report(poset);
    if !report.is_locally_dualizable {
        return Err(Error::Unsupported(gate_failure(poset, &report)));
    }
    let model = DualizingModel::at_closed_point(poset)?;
    Ok(bidual_matches(f, model.complex()))
}

/// `i_* D_K^{Y∩K} = RHom(Z_K, D_X^Y)` for closed `Y` and `K`: both sides are
/// computed independently — the right on `X`, the left as a model on the
/// subspace `K` — and compared stalk by stalk (zero off `K`).
pub fn verify_closed_restriction(
    poset: &Arc<FinPoset>,
    y: &SubSpace,
    k: &SubSpace,
) -> Result<bool> {
    if !k.is_closed() {
        return Err(Error::BadSubset {
            expected: "closed",
            detail: format!("restriction target is {}", k.kind()),
        });
    }
    let model = DualizingModel::along_closed(poset, y)?;
    let zk = SheafComplex::from_sheaf(FreeStalkSheaf::supported_constant(poset.clone(), k)?, 0);
    let pushed = rhom_sheaf(&zk, model.complex());

    let sub = Arc::new(poset.induced(k.members()));
    let y_inside: Vec<usize> = k
        .members()
        .iter()
        .enumerate()
        .filter(|&(_, &m)| y.mask()[m])
        .map(|(j, _)| j)
        .collect();
    let small = DualizingModel::along_closed(&sub, &SubSpace::new(&sub, y_inside))?;

    for (j, &m) in k.members().iter().enumerate() {
        if pushed.stalk_cohomology(m) != small.complex().stalk_cohomology(j) {
            return Ok(false);
        }
    }
    let inside = k.mask();
    for z in 0..poset.len() {
        if !inside[z] && !pushed.stalk_cohomology(z).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
