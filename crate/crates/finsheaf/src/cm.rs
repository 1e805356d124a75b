//! Cohen–Macaulay certificates for sheaves, spaces, and closed subspaces.
//!
//! The depth of a complex at a point is the first degree where
//! `RHom(Z_{{x}}, F)` — equivalently the local cohomology `RΓ_x(U_x, F)` —
//! is nonzero; global depth adds `dim C_x` and minimizes over the points
//! where that Ext is nonzero (the *dual support*). Depth never exceeds the
//! dimension of the support closure, and a sheaf on a local dualizable space
//! is *Cohen–Macaulay* exactly when the gap closes in the strongest sense:
//! its dual `RHom(F, D^0)` against the point model collapses to a single
//! sheaf `F^#` sitting in one degree `−r`.
//!
//! [`is_cm_sheaf`] decides this by brute dualization, and — whenever the
//! generic stalks allow — re-derives the verdict along an independent route:
//! purity of the support plus stalkwise vanishing of `H^i_x(U_x, F)` away
//! from `d_x = dim(F|_{U_x})`, with torsion-free tops in the generically
//! torsion-free case. The two verdicts are asserted to agree, so every call
//! is also a consistency check of the whole dualizing machinery. A stalk at
//! a generic point that mixes free and torsion parts rules the verdict out
//! immediately: the free part forces `r = dim C_g` while the torsion part
//! forces `r = dim C_g − 1`.
//!
//! A *space* is Cohen–Macaulay when the constant sheaf is, which unwinds to
//! a pointwise condition [`is_cm_space`] checks verbatim on non-local spaces
//! too: the dualizability gate (catenary, open intervals homological
//! spheres) plus vanishing of the reduced homology of every punctured cone
//! `U_x^*` below its top dimension. On such a space the dualizing model is a
//! single sheaf up to shift, the *canonical sheaf* `ω_X = H^{−dim X}(D^0)`
//! ([`canonical_sheaf`]), and duality against it takes the classical shape:
//! universal-coefficient sequences, a boundary duality on `X^*`, and a Gysin
//! isomorphism along a Cohen–Macaulay closed subset
//! ([`omega_duality_sequences`]). A closed subset is Cohen–Macaulay iff its
//! closure-supported constant sheaf is; over a Cohen–Macaulay ambient space
//! that collapses to a single Ext-sheaf concentration which recovers the
//! subset's own canonical sheaf ([`is_cm_closed`]).
//!
//! [`baclawski_report`] compares all of this with the order-theoretic
//! notion: bound the poset as `X̂ = X ∪ {0̂, 1̂}` and ask every open interval
//! of `X̂` to be a *bouquet* — reduced homology concentrated in the top
//! degree, any group allowed there. Our notion strengthens the two interval
//! families not touching the ends (proper intervals must be honest spheres)
//! but drops the two families through `0̂`, which are global/closure
//! conditions rather than local ones. Both divergences are realized by tiny
//! spaces: a chain of three points is Baclawski but fails the sphere gate,
//! and two disjoint edges are locally Cohen–Macaulay but globally
//! disconnected, failing Baclawski's `(0̂, 1̂)` condition.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::cohomology::{
    global_cohomology, local_cohomology, reduced_homology, rhom_global, rhom_sheaf,
};
use crate::duality::{gate_failure, sphere_report, DualizabilityReport, DualizingModel};
use crate::poset::{FinPoset, SubSpace};
use crate::sheaf::{FreeStalkSheaf, PresentedSheaf, SheafComplex};
use crate::zlinalg::{FgGroup, GradedGroups};
use crate::{Error, Result};

fn skyscraper_complex(poset: &Arc<FinPoset>, x: usize) -> SheafComplex {
    SheafComplex::from_sheaf(FreeStalkSheaf::skyscraper(poset.clone(), x), 0)
}

fn constant_complex(poset: &Arc<FinPoset>) -> SheafComplex {
    SheafComplex::from_sheaf(FreeStalkSheaf::constant(poset.clone()), 0)
}

/// Elements of `members` that are maximal within `members`.
fn maximal_within(poset: &FinPoset, members: &[usize]) -> Vec<usize> {
    members
        .iter()
        .copied()
        .filter(|&x| members.iter().all(|&y| !poset.lt(x, y)))
        .collect()
}

/// Length of the longest chain ending at `x`, i.e. `dim C_x`.
fn height(poset: &FinPoset, x: usize) -> i64 {
    poset.induced(&poset.down_set(x)).dim()
}

/// Where a complex lives and how deep it is.
///
/// The *support* collects the points with nonzero stalk cohomology, the
/// *dual support* those where `RHom(Z_{{x}}, F)` is nonzero; the two have
/// the same closure. Purity asks every maximal support point to sit at full
/// closure height, and depth is `min (depth_x + dim C_x)` over the dual
/// support, which never exceeds `dim`.
#[derive(Debug, Clone)]
pub struct SupportReport {
    /// Points with nonzero stalk cohomology.
    pub support: Vec<usize>,
    /// Points `x` with `RHom(Z_{{x}}, F) ≠ 0`.
    pub dual_support: Vec<usize>,
    /// Closure of the support.
    pub closure: Vec<usize>,
    /// Dimension of the closure; `−1` for the zero complex.
    pub dim: i64,
    /// Every maximal support point has `dim C_x = dim`.
    pub is_pure: bool,
    /// For each dual-support point, the first degree where
    /// `RHom(Z_{{x}}, F)` is nonzero.
    pub point_depths: Vec<(usize, i64)>,
    /// `min (depth_x + dim C_x)`; `−1` for the zero complex.
    pub depth: i64,
}

pub fn support_report(f: &SheafComplex) -> SupportReport {
    let poset = f.poset();
    let n = poset.len();
    let support: Vec<usize> = (0..n).filter(|&x| !f.stalk_cohomology(x).is_zero()).collect();
    let mut dual_support = Vec::new();
    let mut point_depths = Vec::new();
    for x in 0..n {
        let ext = rhom_global(&skyscraper_complex(poset, x), f);
        let first = ext.degrees().next();
        if let Some(d) = first {
            dual_support.push(x);
            point_depths.push((x, d));
        }
    }
    let closure = poset.down_closure(&support);
    let dim = poset.induced(&closure).dim();
    let is_pure = maximal_within(poset, &support)
        .iter()
        .all(|&g| height(poset, g) == dim);
    let depth = point_depths
        .iter()
        .map(|&(x, d)| d + height(poset, x))
        .min()
        .unwrap_or(-1);
    SupportReport { support, dual_support, closure, dim, is_pure, point_depths, depth }
}

/// Which route produced a Cohen–Macaulay verdict for a sheaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmPath {
    /// Dualization against the point model alone; the stalkwise criterion
    /// did not apply (zero sheaf, or generic stalks of mixed kinds).
    Duality,
    /// Generic stalks all free: purity + local vanishing with torsion-free
    /// tops, cross-checked against the dualization verdict.
    FreeCriterion,
    /// All stalks torsion: purity + local vanishing, cross-checked against
    /// the dualization verdict.
    TorsionCriterion,
}

/// A point and degree witnessing a failure, with the offending group.
#[derive(Debug, Clone)]
pub struct CmWitness {
    pub point: usize,
    pub degree: i64,
    pub group: FgGroup,
}

/// Outcome of [`is_cm_sheaf`].
#[derive(Debug, Clone)]
pub struct CmVerdict {
    pub is_cm: bool,
    /// Concentration degree: `RHom(F, D^0) = F^#[r]`. Zero for the zero
    /// sheaf; for a non-CM sheaf, the degree the lowest stalk cohomology of
    /// the dual sits in.
    pub r: i64,
    /// The dual sheaf `F^#` when Cohen–Macaulay and nonzero.
    pub dual: Option<PresentedSheaf>,
    /// For a failed verdict, a stalk degree breaking concentration (or a
    /// mixed generic stalk, reported in degree 0).
    pub witness: Option<CmWitness>,
    pub path: CmPath,
}

/// Decide whether a sheaf on a local dualizable space is Cohen–Macaulay.
///
/// The primary verdict dualizes outright: resolve `F` by chain-free covers,
/// form `RHom(F, D^0)` as a sheaf complex, and ask its stalk cohomology to
/// live in a single degree `−r`; the dual sheaf `F^#` is extracted there.
/// When the generic stalks are all free, or every stalk is torsion, the
/// pointwise criterion runs as well and the two verdicts are asserted
/// equal — so is the expected shift `r = dim F` (free case) or `dim F − 1`
/// (torsion case) on success.
pub fn is_cm_sheaf(f: &PresentedSheaf) -> Result<CmVerdict> {
    let poset = f.poset().clone();
    if poset.bottom().is_none() {
        return Err(Error::Unsupported(
            "Cohen–Macaulay sheaf verdicts need a local space".into(),
        ));
    }
    let gate = sphere_report(&poset);
    if !gate.is_locally_dualizable {
        return Err(Error::Unsupported(gate_failure(&poset, &gate)));
    }
    let model = DualizingModel::at_closed_point(&poset)?;
    let resolved = f.to_complex();
    let dual_complex = rhom_sheaf(&resolved, model.complex());

    // collect every nonzero stalk cohomology group of the dual
    let mut seen: Vec<(usize, i64, FgGroup)> = Vec::new();
    for x in 0..poset.len() {
        for (d, g) in dual_complex.stalk_cohomology(x).iter() {
            seen.push((x, d, g.clone()));
        }
    }
    let degrees: BTreeSet<i64> = seen.iter().map(|&(_, d, _)| d).collect();
    let duality_cm = degrees.len() <= 1;
    let conc = degrees.iter().next().copied();
    let r = conc.map(|d| -d).unwrap_or(0);
    let mut witness = if duality_cm {
        None
    } else {
        // blame the highest degree; the lowest is where a dual sheaf would sit
        let bad = *degrees.iter().next_back().expect("at least two degrees");
        seen.iter()
            .find(|&&(_, d, _)| d == bad)
            .map(|(x, d, g)| CmWitness { point: *x, degree: *d, group: g.clone() })
    };

    // independent stalkwise criterion, where the generic stalks allow one
    let support: Vec<usize> =
        (0..poset.len()).filter(|&x| !f.stalk_group(x).is_zero()).collect();
    let closure = poset.down_closure(&support);
    let dim_f = poset.induced(&closure).dim();
    let is_pure = maximal_within(&poset, &support)
        .iter()
        .all(|&g| height(&poset, g) == dim_f);
    let generic = maximal_within(&poset, &support);

    let mut path = CmPath::Duality;
    let mut criterion: Option<bool> = None;
    if !support.is_empty() {
        let mixed = generic.iter().copied().find(|&g| {
            let s = f.stalk_group(g);
            s.rank() > 0 && !s.torsion().is_empty()
        });
        if let Some(g) = mixed {
            // free part and torsion part of the generic stalk demand duals in
            // different degrees, so mixing is fatal regardless of anything else
            criterion = Some(false);
            if witness.is_none() {
                witness = Some(CmWitness { point: g, degree: 0, group: f.stalk_group(g) });
            }
        } else if generic.iter().all(|&g| f.stalk_group(g).is_free()) {
            path = CmPath::FreeCriterion;
            let (ok, w) = local_vanishing(f, &resolved, true);
            criterion = Some(ok && is_pure);
            if witness.is_none() {
                witness = w;
            }
        } else if (0..poset.len()).all(|x| f.stalk_group(x).rank() == 0) {
            path = CmPath::TorsionCriterion;
            let (ok, w) = local_vanishing(f, &resolved, false);
            criterion = Some(ok && is_pure);
            if witness.is_none() {
                witness = w;
            }
        }
    }
    if let Some(c) = criterion {
        assert_eq!(
            c, duality_cm,
            "stalkwise criterion and dualization disagree on Cohen–Macaulayness"
        );
    }
    if duality_cm && !support.is_empty() {
        match path {
            CmPath::FreeCriterion => assert_eq!(r, dim_f, "free dual must sit in degree −dim"),
            CmPath::TorsionCriterion => {
                assert_eq!(r, dim_f - 1, "torsion dual must sit in degree 1 − dim")
            }
            CmPath::Duality => {}
        }
    }
    let dual = match (duality_cm, conc) {
        (true, Some(d)) => Some(dual_complex.cohomology_sheaf(d)),
        _ => None,
    };
    Ok(CmVerdict { is_cm: duality_cm, r, dual, witness, path })
}

/// `dim (F|_{U_x})`: dimension of the closure, within `U_x`, of the stalk
/// support above `x`. `−1` when the support misses `U_x`.
fn restricted_dim(f: &PresentedSheaf, x: usize) -> i64 {
    let poset = f.poset();
    let up = poset.up_set(x);
    let carried: Vec<usize> =
        up.iter().copied().filter(|&z| !f.stalk_group(z).is_zero()).collect();
    let members: Vec<usize> = up
        .iter()
        .copied()
        .filter(|&w| carried.iter().any(|&z| poset.leq(w, z)))
        .collect();
    poset.induced(&members).dim()
}

/// `H^i_x(U_x, F) = 0` for every `i ≠ d_x` at every point, with torsion-free
/// top groups when `need_free_top` is set.
fn local_vanishing(
    f: &PresentedSheaf,
    resolved: &SheafComplex,
    need_free_top: bool,
) -> (bool, Option<CmWitness>) {
    let poset = f.poset();
    for x in 0..poset.len() {
        let d_x = restricted_dim(f, x);
        let loc = rhom_global(&skyscraper_complex(poset, x), resolved);
        for (deg, g) in loc.iter() {
            if deg != d_x || (need_free_top && !g.torsion().is_empty()) {
                return (false, Some(CmWitness { point: x, degree: deg, group: g.clone() }));
            }
        }
    }
    (true, None)
}

/// Homological Cohen–Macaulay data at one point: the reduced homology of the
/// punctured cone `U_x^*` must vanish below its top dimension.
#[derive(Debug, Clone)]
pub struct CmPointVerdict {
    pub point: usize,
    /// `dim U_x^*`; `−1` for a maximal point.
    pub star_dim: i64,
    pub reduced: GradedGroups,
    pub homologically_cm: bool,
}

/// Outcome of [`is_cm_space`]: dualizability gate plus pointwise vanishing.
#[derive(Debug, Clone)]
pub struct CmSpaceVerdict {
    pub gate: DualizabilityReport,
    pub points: Vec<CmPointVerdict>,
    pub is_cm: bool,
    /// First pointwise homology violation; gate failures are reported inside
    /// `gate` instead.
    pub witness: Option<CmWitness>,
}

/// Decide whether a space is Cohen–Macaulay: catenary, every open interval a
/// homological sphere, and `H̃_i(U_x^*) = 0` for `i < dim U_x^*` at every
/// point. Local spaces, and disjoint or mixed-dimensional ones, are all
/// handled by the same pointwise test.
pub fn is_cm_space(poset: &FinPoset) -> CmSpaceVerdict {
    let gate = sphere_report(poset);
    let mut points = Vec::with_capacity(poset.len());
    let mut witness = None;
    for x in 0..poset.len() {
        let star = poset.induced(&poset.punctured_up_set(x));
        let star_dim = star.dim();
        let reduced = reduced_homology(&star);
        let mut homologically_cm = true;
        for (i, g) in reduced.iter() {
            if i != star_dim {
                homologically_cm = false;
                if witness.is_none() {
                    witness = Some(CmWitness { point: x, degree: i, group: g.clone() });
                }
            }
        }
        points.push(CmPointVerdict { point: x, star_dim, reduced, homologically_cm });
    }
    let is_cm =
        gate.is_locally_dualizable && points.iter().all(|p| p.homologically_cm);
    CmSpaceVerdict { gate, points, is_cm, witness }
}

/// The canonical sheaf `ω_X = H^{−dim X}(D^0)` of a Cohen–Macaulay local
/// space: the point model collapses to this single sheaf up to shift.
///
/// Every stalk is cross-checked on the way out: `ω_{X,x}` must be the
/// integral dual of the top local cohomology `H^{d_x}_x(U_x, Z)`, which
/// Cohen–Macaulayness makes torsion free.
pub fn canonical_sheaf(poset: &Arc<FinPoset>) -> Result<PresentedSheaf> {
    if poset.bottom().is_none() {
        return Err(Error::Unsupported("the canonical sheaf needs a local space".into()));
    }
    let verdict = is_cm_space(poset);
    if !verdict.gate.is_locally_dualizable {
        return Err(Error::Unsupported(gate_failure(poset, &verdict.gate)));
    }
    if !verdict.is_cm {
        let w = verdict.witness.expect("a dualizable non-CM space has a homology witness");
        return Err(Error::Unsupported(format!(
            "space is not Cohen–Macaulay: reduced H_{} of the punctured cone at {} is {}",
            w.degree,
            poset.label(w.point),
            w.group,
        )));
    }
    let model = DualizingModel::at_closed_point(poset)?;
    let omega = model.complex().cohomology_sheaf(-poset.dim());
    let constant = constant_complex(poset);
    for x in 0..poset.len() {
        let d_x = poset.induced(&poset.up_set(x)).dim();
        let top = rhom_global(&skyscraper_complex(poset, x), &constant).get(d_x);
        assert!(top.torsion().is_empty(), "top local cohomology must be torsion free");
        assert_eq!(
            omega.stalk_group(x),
            FgGroup::free(top.rank()),
            "canonical stalk must be the dual of the top local cohomology"
        );
    }
    Ok(omega)
}

/// Outcome of [`is_cm_closed`].
#[derive(Debug, Clone)]
pub struct CmClosedVerdict {
    /// Verdict for the closure-supported constant sheaf `Z_K`.
    pub sheaf: CmVerdict,
    /// `dim X − dim K`.
    pub codim: i64,
    /// Over a Cohen–Macaulay ambient space: whether `RHom(Z_K, ω_X)` is a
    /// single Ext sheaf in degree `codim` (asserted to agree with the sheaf
    /// verdict).
    pub ext_concentrated: Option<bool>,
    /// When that Ext sheaf exists: it vanishes off `K` and restricts to the
    /// canonical sheaf of `K`.
    pub omega_matches: Option<bool>,
    pub is_cm: bool,
}

/// A closed subset is Cohen–Macaulay iff `Z_K` is a Cohen–Macaulay sheaf on
/// the ambient space. Over a Cohen–Macaulay ambient space the condition
/// collapses further, to `Ext^i(Z_K, ω_X) = 0` for `i ≠ dim X − dim K`, and
/// the surviving Ext sheaf is the pushed-forward canonical sheaf of `K`;
/// both refinements are computed and compared when they apply.
pub fn is_cm_closed(poset: &Arc<FinPoset>, k: &SubSpace) -> Result<CmClosedVerdict> {
    if !k.is_closed() {
        return Err(Error::BadSubset {
            expected: "closed",
            detail: format!("the subset is {}", k.kind()),
        });
    }
    let zk = FreeStalkSheaf::supported_constant(poset.clone(), k)?;
    let sheaf = is_cm_sheaf(&PresentedSheaf::from_free(&zk))?;
    let k_dim = poset.induced(k.members()).dim();
    let codim = poset.dim() - k_dim;
    let mut ext_concentrated = None;
    let mut omega_matches = None;
    if is_cm_space(poset).is_cm {
        let model = DualizingModel::at_closed_point(poset)?;
        // Ext^i(Z_K, ω_X) = H^{i − dim X}(RHom(Z_K, D^0)), so concentration
        // in i = codim means stalk cohomology only in degree −dim K
        let e = rhom_sheaf(&SheafComplex::from_sheaf(zk, 0), model.complex());
        let mut conc = true;
        for x in 0..poset.len() {
            for (d, _) in e.stalk_cohomology(x).iter() {
                if d != -k_dim {
                    conc = false;
                }
            }
        }
        assert_eq!(
            conc, sheaf.is_cm,
            "Ext concentration over a CM space must match the sheaf verdict"
        );
        ext_concentrated = Some(conc);
        if conc && !k.members().is_empty() {
            let ext_c = e.cohomology_sheaf(-k_dim);
            let sub = Arc::new(poset.induced(k.members()));
            let omega_k = canonical_sheaf(&sub)?;
            let mut ok = true;
            for (j, &m) in k.members().iter().enumerate() {
                if ext_c.stalk_group(m) != omega_k.stalk_group(j) {
                    ok = false;
                }
            }
            for x in 0..poset.len() {
                if !k.mask()[x] && !ext_c.stalk_group(x).is_zero() {
                    ok = false;
                }
            }
            omega_matches = Some(ok);
        }
    }
    Ok(CmClosedVerdict { is_cm: sheaf.is_cm, sheaf, codim, ext_concentrated, omega_matches })
}

/// One universal-coefficient row of the duality
/// `RHom(F, ω_X[n]) = RΓ_0(X, F)^∨`: the middle term is extension-split into
/// a free part dual to `H^{n−i}_0` and a torsion part dual to `H^{n+1−i}_0`.
#[derive(Debug, Clone)]
pub struct SequenceRow {
    pub degree: i64,
    /// `Ext^i(F, ω_X)`.
    pub middle: FgGroup,
    /// `Ext¹_Z(H^{n+1−i}_0(X, F), Z)`.
    pub torsion_side: FgGroup,
    /// `Hom_Z(H^{n−i}_0(X, F), Z)`.
    pub free_side: FgGroup,
    pub exact: bool,
}

/// Local cohomology of `ω_X` along a Cohen–Macaulay closed subset.
#[derive(Debug, Clone)]
pub struct GysinReport {
    pub codim: i64,
    /// `H^i_K(X, ω_X) = 0` away from `i = codim`.
    pub concentrated: bool,
    /// The group at `i = codim`.
    pub group: FgGroup,
    /// It is the dual of the top local cohomology `H^{n−codim}_0(K, Z)`.
    pub matches_dual: bool,
    /// The boundary version along `K^* ⊆ X^*`: zero outside `{codim, n−1}`,
    /// `Z` in degree `n−1`, the dual of `H^{n−codim−1}(K^*, Z)` in degree
    /// `codim`. Trivially true when `K^*` is empty.
    pub punctured_ok: bool,
}

/// Outcome of [`omega_duality_sequences`].
#[derive(Debug, Clone)]
pub struct OmegaDualityReport {
    pub dim: i64,
    pub rows: Vec<SequenceRow>,
    pub all_rows_exact: bool,
    /// `ω_X` restricted to the boundary `X^*` is a global dualizing complex
    /// there: `RHom_{X^*}(F, ω[n−1]) = RΓ(X^*, F)^∨`.
    pub boundary_global_duality: bool,
    pub gysin: Option<GysinReport>,
}

/// Duality against the canonical sheaf of a Cohen–Macaulay local space, in
/// three classical shapes: universal-coefficient rows for
/// `Ext^i(F, ω_X) = H^{i−n}(RHom(F, D^0))` against the local cohomology at
/// the closed point, global duality on the boundary `X^*`, and — when a
/// Cohen–Macaulay closed subset is supplied — the Gysin concentration of
/// `RΓ_K(X, ω_X)` with its boundary refinement.
pub fn omega_duality_sequences(
    f: &SheafComplex,
    k: Option<&SubSpace>,
) -> Result<OmegaDualityReport> {
    let poset = f.poset().clone();
    let bottom = poset
        .bottom()
        .ok_or_else(|| Error::Unsupported("ω duality needs a local space".into()))?;
    if !is_cm_space(&poset).is_cm {
        return Err(Error::Unsupported("ω duality needs a Cohen–Macaulay space".into()));
    }
    let n = poset.dim();
    let model = DualizingModel::at_closed_point(&poset)?;
    let rg = rhom_global(f, model.complex());
    let locs = local_cohomology(f, &SubSpace::new(&poset, [bottom]))?;
    let mut degrees: BTreeSet<i64> = BTreeSet::new();
    for d in rg.degrees() {
        degrees.insert(d + n);
    }
    for d in locs.degrees() {
        degrees.insert(n - d);
        degrees.insert(n + 1 - d);
    }
    let mut rows = Vec::new();
    for i in degrees {
        let middle = rg.get(i - n);
        let free_side = FgGroup::free(locs.get(n - i).rank());
        let torsion_side = FgGroup::from_parts(0, locs.get(n + 1 - i).torsion().to_vec());
        let expected = FgGroup::from_parts(free_side.rank(), torsion_side.torsion().to_vec());
        let exact = middle == expected;
        rows.push(SequenceRow { degree: i, middle, torsion_side, free_side, exact });
    }
    let all_rows_exact = rows.iter().all(|r| r.exact);
    let star: Vec<usize> = (0..poset.len()).filter(|&x| x != bottom).collect();
    let d_star = model.complex().restrict(&star).shift(-1);
    let f_star = f.restrict(&star);
    let boundary_global_duality = rhom_global(&f_star, &d_star)
        == global_cohomology(&f_star).universal_coefficient_dual();
    let gysin = match k {
        None => None,
        Some(sub) => Some(gysin_report(&poset, &model, n, bottom, sub)?),
    };
    Ok(OmegaDualityReport { dim: n, rows, all_rows_exact, boundary_global_duality, gysin })
}

fn gysin_report(
    poset: &Arc<FinPoset>,
    model: &DualizingModel,
    n: i64,
    bottom: usize,
    k: &SubSpace,
) -> Result<GysinReport> {
    let closed = is_cm_closed(poset, k)?;
    if !closed.is_cm {
        return Err(Error::Unsupported(
            "the Gysin comparison needs a Cohen–Macaulay closed subset".into(),
        ));
    }
    let codim = closed.codim;
    // H^i_K(X, ω_X) = H^{i−n}(RΓ_K(X, D^0))
    let lhs = local_cohomology(model.complex(), k)?;
    let concentrated = lhs.iter().all(|(d, _)| d + n == codim);
    let group = lhs.get(codim - n);
    let sub = Arc::new(poset.induced(k.members()));
    let k_bottom = sub.bottom().expect("a nonempty closed subset of a local space is local");
    let top = local_cohomology(&constant_complex(&sub), &SubSpace::new(&sub, [k_bottom]))?
        .get(n - codim);
    let matches_dual = top.torsion().is_empty() && group == FgGroup::free(top.rank());
    // boundary version: H^i_{K^*}(X^*, ω_{X^*}) with ω_{X^*}[n−1] = D^0|_{X^*}[−1]
    let star: Vec<usize> = (0..poset.len()).filter(|&x| x != bottom).collect();
    let k_star: Vec<usize> = star.iter().copied().filter(|&x| k.mask()[x]).collect();
    let punctured_ok = if k_star.is_empty() {
        true
    } else {
        let d_star = model.complex().restrict(&star).shift(-1);
        let positions: Vec<usize> = star
            .iter()
            .enumerate()
            .filter(|&(_, &x)| k.mask()[x])
            .map(|(j, _)| j)
            .collect();
        let plhs = local_cohomology(&d_star, &SubSpace::new(d_star.poset(), positions))?;
        let hk = global_cohomology(&constant_complex(&Arc::new(poset.induced(&k_star))));
        let mut checks: BTreeSet<i64> = plhs.degrees().map(|d| d + n - 1).collect();
        checks.insert(codim);
        checks.insert(n - 1);
        checks.iter().all(|&i| {
            let expected = if i == codim {
                FgGroup::free(hk.get(n - codim - 1).rank())
            } else if i == n - 1 {
                FgGroup::free(1)
            } else {
                FgGroup::zero()
            };
            plhs.get(i + 1 - n) == expected
        })
    };
    Ok(GysinReport { codim, concentrated, group, matches_dual, punctured_ok })
}

/// One open interval of the bounded extension `X̂ = X ∪ {0̂, 1̂}`, with its
/// bouquet verdict: reduced homology allowed only in the top dimension.
#[derive(Debug, Clone)]
pub struct BouquetVerdict {
    /// Lower endpoint; `None` is the adjoined `0̂`.
    pub lower: Option<usize>,
    /// Upper endpoint; `None` is the adjoined `1̂`.
    pub upper: Option<usize>,
    pub dim: i64,
    pub reduced: GradedGroups,
    pub is_bouquet: bool,
}

/// Order-theoretic Cohen–Macaulayness and how it compares with ours.
///
/// The four fields classify the open intervals of `X̂` by which adjoined
/// bounds they touch: proper intervals `(x, y)`, punctured up-cones
/// `(x, 1̂) = U_x^*`, punctured down-cones `(0̂, y) = C_y^*`, and the whole
/// space `(0̂, 1̂) = X`. Baclawski requires all four to be bouquets; the
/// "almost" variant drops the global one; our notion keeps the first two
/// (strengthening proper intervals from bouquets to spheres) and drops the
/// two through `0̂`.
#[derive(Debug, Clone)]
pub struct BaclawskiReport {
    /// Intervals `(x, y)` with both ends in `X` are bouquets.
    pub proper_intervals: bool,
    /// Punctured up-cones `U_x^*` are bouquets.
    pub up_cones: bool,
    /// Punctured down-cones `C_y^*` are bouquets.
    pub down_cones: bool,
    /// `X` itself is a bouquet.
    pub global: bool,
    /// All four families.
    pub is_baclawski_cm: bool,
    /// All but the global condition.
    pub is_acm: bool,
    /// The sheaf-theoretic verdict of [`is_cm_space`], for comparison.
    pub is_cm_here: bool,
    /// Every non-bouquet interval.
    pub failures: Vec<BouquetVerdict>,
}

fn fresh_label(poset: &FinPoset, base: &str) -> String {
    let mut label = base.to_string();
    while poset.index_of(&label).is_ok() {
        label.push('\'');
    }
    label
}

pub fn baclawski_report(poset: &FinPoset) -> BaclawskiReport {
    let n = poset.len();
    let bounded = poset
        .adjoin_bottom(&fresh_label(poset, "0̂"))
        .expect("fresh label");
    let hat = bounded
        .adjoin_top(&fresh_label(&bounded, "1̂"))
        .expect("fresh label");
    let (bot, top) = (n, n + 1);
    // slots: proper, up-cone, down-cone, global
    let mut ok = [true; 4];
    let mut failures = Vec::new();
    for x in 0..hat.len() {
        for y in 0..hat.len() {
            if !hat.lt(x, y) {
                continue;
            }
            let sub = hat.induced(&hat.open_interval(x, y).expect("comparable"));
            let dim = sub.dim();
            let reduced = reduced_homology(&sub);
            let is_bouquet = reduced.iter().all(|(i, _)| i == dim);
            let (slot, lower, upper) = match (x == bot, y == top) {
                (false, false) => (0, Some(x), Some(y)),
                (false, true) => (1, Some(x), None),
                (true, false) => (2, None, Some(y)),
                (true, true) => (3, None, None),
            };
            if !is_bouquet {
                ok[slot] = false;
                failures.push(BouquetVerdict { lower, upper, dim, reduced, is_bouquet });
            }
        }
    }
    BaclawskiReport {
        proper_intervals: ok[0],
        up_cones: ok[1],
        down_cones: ok[2],
        global: ok[3],
        is_baclawski_cm: ok.iter().all(|&b| b),
        is_acm: ok[0] && ok[1] && ok[2],
        is_cm_here: is_cm_space(poset).is_cm,
        failures,
    }
}

/// Cohen–Macaulayness of a product against that of its factors, computed
/// independently on all three spaces.
#[derive(Debug, Clone, Copy)]
pub struct ProductCmReport {
    pub left_cm: bool,
    pub right_cm: bool,
    pub product_cm: bool,
    /// `product_cm ⟺ left_cm ∧ right_cm` (as it must be for nonempty factors).
    pub biconditional_holds: bool,
}

pub fn cm_product_check(x: &FinPoset, y: &FinPoset) -> ProductCmReport {
    let left_cm = is_cm_space(x).is_cm;
    let right_cm = is_cm_space(y).is_cm;
    let product_cm = is_cm_space(&x.product(y)).is_cm;
    ProductCmReport {
        left_cm,
        right_cm,
        product_cm,
        biconditional_holds: product_cm == (left_cm && right_cm),
    }
}

/// Cohen–Macaulayness of the barycentric subdivision against the space and
/// its opposite, computed independently on all three.
#[derive(Debug, Clone, Copy)]
pub struct BarycentricCmReport {
    pub space_cm: bool,
    pub opposite_cm: bool,
    pub subdivision_cm: bool,
    /// `subdivision_cm ⟺ space_cm ∧ opposite_cm`: the cones of `βX` are
    /// joins of barycentric subdivisions of a punctured down-cone and a
    /// punctured up-cone of `X`.
    pub biconditional_holds: bool,
}

pub fn cm_barycentric_check(x: &FinPoset) -> BarycentricCmReport {
    let space_cm = is_cm_space(x).is_cm;
    let opposite_cm = is_cm_space(&x.opposite()).is_cm;
    let subdivision_cm = is_cm_space(&x.barycentric()).is_cm;
    BarycentricCmReport {
        space_cm,
        opposite_cm,
        subdivision_cm,
        biconditional_holds: subdivision_cm == (space_cm && opposite_cm),
    }
}
