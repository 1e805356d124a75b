//! Sheaves of abelian groups on a finite poset.
//!
//! On a finite T0-space a sheaf is the same thing as a functor: a stalk
//! `F_x` for every element and a restriction map `ρ_{x≤y}: F_x → F_y`
//! toward larger elements (smaller opens), compatible with composition.
//! We store one matrix per cover relation and validate path independence:
//! all composites along saturated chains between two comparable elements
//! must agree. The full table `ρ_{x≤y}` is cached during validation.
//!
//! Three layers:
//!
//! * [`FreeStalkSheaf`] — free stalks `Z^{n_x}`, the workhorse.
//! * [`SheafComplex`] — bounded complexes of free-stalk sheaves, with
//!   shift, cone, direct sum, tensor by a complex of groups, and external
//!   product. Every constructor re-validates `d∘d = 0` and that
//!   differentials are sheaf morphisms.
//! * [`PresentedSheaf`] — stalks with torsion, given by canonical
//!   presentations and generator-level cover maps (functorial modulo
//!   relations). A report-friendly type; [`PresentedSheaf::to_complex`]
//!   converts it into an honest two-term complex of free-stalk sheaves
//!   before it re-enters any computation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poset::{FinPoset, SubSpace};
use crate::zlinalg::{
    image_basis, kernel_basis, smith_normal_form, solve_exact_matrix, FgGroup, FreeComplexZ,
    GradedGroups, IntMatrix,
};
use crate::{Error, Result};

/// A sheaf with free stalks `Z^{n_x}` and integer restriction matrices.
///
/// Restriction matrices for a cover `a ⋖ b` have `n_b` rows and `n_a`
/// columns: elements are column vectors and maps act on the left.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeStalkSheaf {
    poset: Arc<FinPoset>,
    ranks: Vec<usize>,
    /// Aligned with `poset.covers()`.
    cover_maps: Vec<IntMatrix>,
    /// `rho[x][y]` for every strict pair x < y; identity at x = y is implied.
    rho: Vec<BTreeMap<usize, IntMatrix>>,
}

impl FreeStalkSheaf {
    /// Validating constructor: checks matrix shapes and path independence
    /// (all saturated chains between comparable elements compose equally).
    pub fn new(poset: Arc<FinPoset>, ranks: Vec<usize>, cover_maps: Vec<IntMatrix>) -> Result<Self> {
        let n = poset.len();
        if ranks.len() != n {
            return Err(Error::InvalidSheaf(format!(
                "{} stalk ranks for {} elements",
                ranks.len(),
                n
            )));
        }
        if cover_maps.len() != poset.covers().len() {
            return Err(Error::InvalidSheaf(format!(
                "{} cover maps for {} covers",
                cover_maps.len(),
                poset.covers().len()
            )));
        }
        for (k, &(a, b)) in poset.covers().iter().enumerate() {
            let m = &cover_maps[k];
            if m.rows() != ranks[b] || m.cols() != ranks[a] {
                return Err(Error::InvalidSheaf(format!(
                    "map {} -> {} is {}x{}, stalks need {}x{}",
                    poset.label(a),
                    poset.label(b),
                    m.rows(),
                    m.cols(),
                    ranks[b],
                    ranks[a]
                )));
            }
        }
        let rho = compute_rho(&poset, &cover_maps, |x, z| {
            Error::InvalidSheaf(format!(
                "restriction from {} to {} depends on the chain chosen",
                poset.label(x),
                poset.label(z)
            ))
        })?;
        Ok(FreeStalkSheaf { poset, ranks, cover_maps, rho })
    }

    /// The constant sheaf Z_X.
    pub fn constant(poset: Arc<FinPoset>) -> Self {
        Self::constant_rank(poset, 1)
    }

    /// The constant sheaf Z^k on all of X.
    pub fn constant_rank(poset: Arc<FinPoset>, k: usize) -> Self {
        let n = poset.len();
        let maps = vec![IntMatrix::identity(k); poset.covers().len()];
        Self::new(poset, vec![k; n], maps).expect("constant sheaf is functorial")
    }

    /// The zero sheaf.
    pub fn zero(poset: Arc<FinPoset>) -> Self {
        let n = poset.len();
        let maps = vec![IntMatrix::zeros(0, 0); poset.covers().len()];
        Self::new(poset, vec![0; n], maps).expect("zero sheaf is functorial")
    }

    /// `Z_S`: the constant sheaf supported on a locally closed subset,
    /// extended by zero. Restrictions are identities inside S. Local
    /// closedness is exactly what makes every saturated chain between two
    /// members of S stay inside S, so the extension is functorial.
    pub fn supported_constant(poset: Arc<FinPoset>, s: &SubSpace) -> Result<Self> {
        if !s.is_locally_closed() {
            return Err(Error::BadSubset {
                expected: "locally closed",
                detail: format!(
                    "members {:?}",
                    s.members().iter().map(|&i| poset.label(i)).collect::<Vec<_>>()
                ),
            });
        }
        let ranks: Vec<usize> = (0..poset.len()).map(|x| usize::from(s.contains(x))).collect();
        let maps: Vec<IntMatrix> = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                if s.contains(a) && s.contains(b) {
                    IntMatrix::identity(1)
                } else {
                    IntMatrix::zeros(ranks[b], ranks[a])
                }
            })
            .collect();
        Self::new(poset, ranks, maps)
    }

    /// The skyscraper Z_{x}: stalk Z at the single point x.
    pub fn skyscraper(poset: Arc<FinPoset>, x: usize) -> Self {
        let s = SubSpace::new(&poset, [x]);
        Self::supported_constant(poset, &s).expect("a point is locally closed")
    }

    pub fn poset(&self) -> &Arc<FinPoset> {
        &self.poset
    }

    pub fn rank(&self, x: usize) -> usize {
        self.ranks[x]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn cover_map(&self, k: usize) -> &IntMatrix {
        &self.cover_maps[k]
    }

    /// The restriction `ρ_{x≤y}` for any comparable pair x ≤ y.
    pub fn rho(&self, x: usize, y: usize) -> IntMatrix {
        if x == y {
            return IntMatrix::identity(self.ranks[x]);
        }
        self.rho[x].get(&y).expect("rho called on incomparable pair").clone()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn direct_sum(&self, other: &FreeStalkSheaf) -> FreeStalkSheaf {
        assert_eq!(*self.poset, *other.poset, "direct sum over different spaces");
        let ranks: Vec<usize> =
            (0..self.poset.len()).map(|x| self.ranks[x] + other.ranks[x]).collect();
        let maps: Vec<IntMatrix> = self
            .cover_maps
            .iter()
            .zip(&other.cover_maps)
            .map(|(a, b)| block_diag(a, b))
            .collect();
        FreeStalkSheaf::new(self.poset.clone(), ranks, maps).expect("sum of functors")
    }

    /// Inverse image along the inclusion of the subspace induced on
    /// `members`: the same stalks, with comparison maps composed across
    /// whatever the subspace no longer sees.
    pub fn restrict(&self, members: &[usize]) -> FreeStalkSheaf {
        self.restrict_onto(Arc::new(self.poset.induced(members)), members)
    }

    fn restrict_onto(&self, sub: Arc<FinPoset>, members: &[usize]) -> FreeStalkSheaf {
        let ranks = members.iter().map(|&m| self.ranks[m]).collect();
        let maps = sub
            .covers()
            .iter()
            .map(|&(a, b)| self.rho(members[a], members[b]))
            .collect();
        FreeStalkSheaf::new(sub, ranks, maps).expect("restriction of a functor")
    }

    /// Pointwise tensor: Kronecker stalks and restriction maps.
    pub fn tensor(&self, other: &FreeStalkSheaf) -> FreeStalkSheaf {
        assert_eq!(*self.poset, *other.poset, "tensor over different spaces");
        let ranks: Vec<usize> =
            (0..self.poset.len()).map(|x| self.ranks[x] * other.ranks[x]).collect();
        let maps: Vec<IntMatrix> = self
            .cover_maps
            .iter()
            .zip(&other.cover_maps)
            .map(|(a, b)| a.kronecker(b))
            .collect();
        FreeStalkSheaf::new(self.poset.clone(), ranks, maps).expect("tensor of functors")
    }
}

impl fmt::Debug for FreeStalkSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeStalkSheaf(ranks {:?})", self.ranks)
    }
}

/// Shared path-independence DP: composite maps along covers, checking that
/// every incoming cover gives the same composite.
fn compute_rho(
    poset: &FinPoset,
    cover_maps: &[IntMatrix],
    mk_err: impl Fn(usize, usize) -> Error,
) -> Result<Vec<BTreeMap<usize, IntMatrix>>> {
    let n = poset.len();
    let mut rho: Vec<BTreeMap<usize, IntMatrix>> = vec![BTreeMap::new(); n];
    for &z in &poset.linear_extension() {
        for x in 0..n {
            if !poset.lt(x, z) {
                continue;
            }
            let mut candidate: Option<IntMatrix> = None;
            for (k, &(y, zz)) in poset.covers().iter().enumerate() {
                if zz != z || !poset.leq(x, y) {
                    continue;
                }
                let m = if y == x {
                    cover_maps[k].clone()
                } else {
                    cover_maps[k].mul(&rho[x][&y])
                };
                match &candidate {
                    None => candidate = Some(m),
                    Some(c) => {
                        if *c != m {
                            return Err(mk_err(x, z));
                        }
                    }
                }
            }
            rho[x].insert(z, candidate.expect("x < z implies a cover path"));
        }
    }
    Ok(rho)
}

fn block_diag(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
    place_block(&mut out, 0, 0, a);
    place_block(&mut out, a.rows(), a.cols(), b);
    out
}

fn place_block(dst: &mut IntMatrix, r0: usize, c0: usize, src: &IntMatrix) {
    for i in 0..src.rows() {
        for j in 0..src.cols() {
            let v = src.get(i, j);
            if !v.is_zero() {
                dst.set(r0 + i, c0 + j, v.clone());
            }
        }
    }
}

/// A bounded complex of free-stalk sheaves. Term `i` sits in degree
/// `lo + i`; `diffs[i][x]` is the stalkwise differential out of it.
#[derive(Clone, PartialEq, Eq)]
pub struct SheafComplex {
    poset: Arc<FinPoset>,
    lo: i64,
    terms: Vec<FreeStalkSheaf>,
    diffs: Vec<Vec<IntMatrix>>,
}

impl SheafComplex {
    pub fn new(
        poset: Arc<FinPoset>,
        lo: i64,
        terms: Vec<FreeStalkSheaf>,
        diffs: Vec<Vec<IntMatrix>>,
    ) -> Result<Self> {
        if !terms.is_empty() && diffs.len() + 1 != terms.len() {
            return Err(Error::BadComplex {
                deg: lo,
                detail: format!("{} terms need {} differentials, got {}", terms.len(), terms.len() - 1, diffs.len()),
            });
        }
        for t in &terms {
            if **t.poset() != *poset {
                return Err(Error::InvalidSheaf("terms live on different spaces".into()));
            }
        }
        let c = SheafComplex { poset, lo, terms, diffs };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let n = self.poset.len();
        for (i, d) in self.diffs.iter().enumerate() {
            if d.len() != n {
                return Err(Error::BadComplex {
                    deg: self.lo + i as i64,
                    detail: "one matrix per element required".into(),
                });
            }
            for x in 0..n {
                let (rows, cols) = (self.terms[i + 1].rank(x), self.terms[i].rank(x));
                if d[x].rows() != rows || d[x].cols() != cols {
                    return Err(Error::BadComplex {
                        deg: self.lo + i as i64,
                        detail: format!(
                            "at {}: differential {}x{}, stalks need {}x{}",
                            self.poset.label(x),
                            d[x].rows(),
                            d[x].cols(),
                            rows,
                            cols
                        ),
                    });
                }
            }
            // differentials are sheaf morphisms: commute with restrictions
            for (k, &(a, b)) in self.poset.covers().iter().enumerate() {
                let lhs = self.terms[i + 1].cover_map(k).mul(&d[a]);
                let rhs = d[b].mul(self.terms[i].cover_map(k));
                if lhs != rhs {
                    return Err(Error::InvalidSheaf(format!(
                        "differential at degree {} does not commute with restriction {} -> {}",
                        self.lo + i as i64,
                        self.poset.label(a),
                        self.poset.label(b)
                    )));
                }
            }
        }
        for i in 0..self.diffs.len().saturating_sub(1) {
            for x in 0..n {
                if !self.diffs[i + 1][x].mul(&self.diffs[i][x]).is_zero() {
                    return Err(Error::NotAComplex { deg: self.lo + i as i64 });
                }
            }
        }
        Ok(())
    }

    /// A single sheaf placed in one degree.
    pub fn from_sheaf(f: FreeStalkSheaf, degree: i64) -> Self {
        SheafComplex { poset: f.poset().clone(), lo: degree, terms: vec![f], diffs: Vec::new() }
    }

    pub fn empty(poset: Arc<FinPoset>) -> Self {
        SheafComplex { poset, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    pub fn poset(&self) -> &Arc<FinPoset> {
        &self.poset
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.terms.len() as i64 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, degree: i64) -> Option<&FreeStalkSheaf> {
        if degree < self.lo {
            return None;
        }
        self.terms.get((degree - self.lo) as usize)
    }

    pub fn rank_at(&self, degree: i64, x: usize) -> usize {
        self.term(degree).map_or(0, |t| t.rank(x))
    }

    /// Stalkwise differential out of `degree` at element `x`.
    pub fn differential(&self, degree: i64, x: usize) -> IntMatrix {
        let rows = self.rank_at(degree + 1, x);
        let cols = self.rank_at(degree, x);
        if degree >= self.lo {
            if let Some(d) = self.diffs.get((degree - self.lo) as usize) {
                return d[x].clone();
            }
        }
        IntMatrix::zeros(rows, cols)
    }

    /// Restriction map of the degree-`degree` term along x ≤ y.
    pub fn rho(&self, degree: i64, x: usize, y: usize) -> IntMatrix {
        match self.term(degree) {
            Some(t) => t.rho(x, y),
            None => IntMatrix::zeros(0, 0),
        }
    }

    /// The complex of stalks at one element.
    pub fn stalk_complex(&self, x: usize) -> FreeComplexZ {
        if self.terms.is_empty() {
            return FreeComplexZ::empty();
        }
        let ranks: Vec<usize> = self.terms.iter().map(|t| t.rank(x)).collect();
        let diffs: Vec<IntMatrix> = self.diffs.iter().map(|d| d[x].clone()).collect();
        FreeComplexZ::from_dense(self.lo, ranks, diffs).expect("stalk of a valid complex")
    }

    /// Cohomology groups of every stalk complex.
    pub fn stalk_cohomology(&self, x: usize) -> GradedGroups {
        self.stalk_complex(x).homology()
    }

    /// Extract the cohomology sheaf `H^degree` as a presented sheaf.
    ///
    /// Per element, a kernel basis of the outgoing differential is changed
    /// into Smith coordinates against the incoming image, so the subquotient
    /// presentation comes out canonical (unit generators dropped, torsion
    /// first). Cover maps are the restriction matrices expressed in those
    /// generators modulo the image — solvable because differentials commute
    /// with restrictions.
    pub fn cohomology_sheaf(&self, degree: i64) -> PresentedSheaf {
        let n = self.poset.len();
        let mut torsion: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut free: Vec<usize> = Vec::with_capacity(n);
        let mut gens: Vec<IntMatrix> = Vec::with_capacity(n);
        let mut rel_images: Vec<IntMatrix> = Vec::with_capacity(n);
        for x in 0..n {
            let kernel = kernel_basis(&self.differential(degree, x));
            let image = image_basis(&self.differential(degree - 1, x));
            let rel = solve_exact_matrix(&kernel, &image).expect("image lies in the kernel");
            let snf = smith_normal_form(&rel);
            let basis = kernel.mul(&snf.u_inv);
            // column i carries order s_ii (i < rank), or is free (i >= rank)
            let mut tors = Vec::new();
            let mut cols = Vec::new();
            for i in 0..basis.cols() {
                if i < snf.rank {
                    let d = snf.s.get(i, i).clone();
                    if d.is_one() {
                        continue;
                    }
                    tors.push(d);
                }
                cols.push(i);
            }
            let kept =
                IntMatrix::from_fn(basis.rows(), cols.len(), |r, j| basis.get(r, cols[j]).clone());
            free.push(cols.len() - tors.len());
            torsion.push(tors);
            gens.push(kept);
            rel_images.push(image);
        }
        let maps: Vec<IntMatrix> = self
            .poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                let moved = self.rho(degree, a, b).mul(&gens[a]);
                let gb = gens[b].cols();
                let mut stacked =
                    IntMatrix::zeros(gens[b].rows(), gb + rel_images[b].cols());
                place_block(&mut stacked, 0, 0, &gens[b]);
                place_block(&mut stacked, 0, gb, &rel_images[b]);
                let sol = solve_exact_matrix(&stacked, &moved)
                    .expect("restrictions preserve kernels modulo images");
                IntMatrix::from_fn(gb, moved.cols(), |i, j| sol.get(i, j).clone())
            })
            .collect();
        PresentedSheaf::new(self.poset.clone(), torsion, free, maps)
            .expect("induced maps are functorial modulo relations")
    }

    /// Shift: `(C[k])^n = C^{n+k}`, differential scaled by `(−1)^k`.
    pub fn shift(&self, k: i64) -> SheafComplex {
        let mut out = self.clone();
        out.lo -= k;
        if k.rem_euclid(2) == 1 {
            for d in &mut out.diffs {
                for m in d.iter_mut() {
                    *m = m.neg();
                }
            }
        }
        out
    }

    /// Inverse image of the whole complex along a subspace inclusion.
    pub fn restrict(&self, members: &[usize]) -> SheafComplex {
        let sub = Arc::new(self.poset.induced(members));
        if self.terms.is_empty() {
            return SheafComplex::empty(sub);
        }
        let terms: Vec<FreeStalkSheaf> =
            self.terms.iter().map(|t| t.restrict_onto(sub.clone(), members)).collect();
        let diffs: Vec<Vec<IntMatrix>> = self
            .diffs
            .iter()
            .map(|layer| members.iter().map(|&m| layer[m].clone()).collect())
            .collect();
        SheafComplex::new(sub, self.lo, terms, diffs).expect("restriction of a complex")
    }

    pub fn direct_sum(&self, other: &SheafComplex) -> SheafComplex {
        assert_eq!(*self.poset, *other.poset);
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut terms = Vec::new();
        let mut diffs = Vec::new();
        for deg in lo..=hi {
            let a = self
                .term(deg)
                .cloned()
                .unwrap_or_else(|| FreeStalkSheaf::zero(self.poset.clone()));
            let b = other
                .term(deg)
                .cloned()
                .unwrap_or_else(|| FreeStalkSheaf::zero(self.poset.clone()));
            terms.push(a.direct_sum(&b));
            if deg < hi {
                let d: Vec<IntMatrix> = (0..self.poset.len())
                    .map(|x| block_diag(&self.differential(deg, x), &other.differential(deg, x)))
                    .collect();
                diffs.push(d);
            }
        }
        SheafComplex::new(self.poset.clone(), lo, terms, diffs).expect("sum of complexes")
    }

    /// Tensor with a complex of abelian groups: degree `n` collects blocks
    /// `E^i ⊗ F^j` with `i + j = n` (ordered by `i`), and the differential
    /// is `d_E ⊗ id + (−1)^i id ⊗ d_F`.
    pub fn tensor_group(&self, e: &FreeComplexZ) -> SheafComplex {
        if self.is_empty() || e.total_rank() == 0 {
            return SheafComplex::empty(self.poset.clone());
        }
        let n_el = self.poset.len();
        let lo = e.lo() + self.lo;
        let hi = e.hi() + self.hi();
        let blocks = |n: i64| -> Vec<i64> {
            (e.lo()..=e.hi()).filter(|&i| self.term(n - i).is_some()).collect()
        };

        let mut terms = Vec::new();
        for n in lo..=hi {
            let ranks: Vec<usize> = (0..n_el)
                .map(|x| blocks(n).iter().map(|&i| e.rank_at(i) * self.rank_at(n - i, x)).sum())
                .collect();
            let maps: Vec<IntMatrix> = self
                .poset
                .covers()
                .iter()
                .map(|&(a, b)| {
                    let mut parts = Vec::new();
                    for &i in &blocks(n) {
                        let id = IntMatrix::identity(e.rank_at(i));
                        parts.push(id.kronecker(&self.term(n - i).unwrap().rho(a, b)));
                    }
                    parts
                        .into_iter()
                        .reduce(|acc, m| block_diag(&acc, &m))
                        .unwrap_or_else(|| IntMatrix::zeros(ranks[b], ranks[a]))
                })
                .collect();
            terms.push(
                FreeStalkSheaf::new(self.poset.clone(), ranks, maps)
                    .expect("tensor term is functorial"),
            );
        }

        let mut diffs = Vec::new();
        for n in lo..hi {
            let d: Vec<IntMatrix> = (0..n_el)
                .map(|x| {
                    let src = blocks(n);
                    let dst = blocks(n + 1);
                    let src_off = block_offsets(&src, |i| e.rank_at(i) * self.rank_at(n - i, x));
                    let dst_off =
                        block_offsets(&dst, |i| e.rank_at(i) * self.rank_at(n + 1 - i, x));
                    let rows = *dst_off.last().unwrap_or(&0);
                    let cols = *src_off.last().unwrap_or(&0);
                    let mut m = IntMatrix::zeros(rows, cols);
                    for (si, &i) in src.iter().enumerate() {
                        let fr = self.rank_at(n - i, x);
                        // d_E ⊗ id : (i, j) -> (i+1, j)
                        if let Some(di) = dst.iter().position(|&d| d == i + 1) {
                            let blockm = e.differential(i).kronecker(&IntMatrix::identity(fr));
                            place_block(&mut m, dst_off[di], src_off[si], &blockm);
                        }
                        // (−1)^i id ⊗ d_F : (i, j) -> (i, j+1)
                        if let Some(di) = dst.iter().position(|&d| d == i) {
                            let mut blockm = IntMatrix::identity(e.rank_at(i))
                                .kronecker(&self.differential(n - i, x));
                            if i.rem_euclid(2) == 1 {
                                blockm = blockm.neg();
                            }
                            place_block(&mut m, dst_off[di], src_off[si], &blockm);
                        }
                    }
                    m
                })
                .collect();
            diffs.push(d);
        }
        SheafComplex::new(self.poset.clone(), lo, terms, diffs).expect("tensor complex")
    }

    /// External product F ⊠ G on the product space: stalk at `(x, y)` is the
    /// Kronecker product of the stalks, with the usual total-complex signs.
    pub fn external_product(&self, other: &SheafComplex) -> SheafComplex {
        let prod = Arc::new(self.poset.product(&other.poset));
        if self.is_empty() || other.is_empty() {
            return SheafComplex::empty(prod);
        }
        let m = other.poset.len();
        let pair = |p: usize| (p / m, p % m);
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        let blocks = |n: i64| -> Vec<i64> {
            (self.lo..=self.hi()).filter(|&i| other.term(n - i).is_some()).collect()
        };

        let mut terms = Vec::new();
        for n in lo..=hi {
            let ranks: Vec<usize> = (0..prod.len())
                .map(|p| {
                    let (x, y) = pair(p);
                    blocks(n).iter().map(|&i| self.rank_at(i, x) * other.rank_at(n - i, y)).sum()
                })
                .collect();
            let maps: Vec<IntMatrix> = prod
                .covers()
                .iter()
                .map(|&(pa, pb)| {
                    let ((xa, ya), (xb, yb)) = (pair(pa), pair(pb));
                    let mut parts = Vec::new();
                    for &i in &blocks(n) {
                        let rx = self.term(i).unwrap().rho(xa, xb);
                        let ry = other.term(n - i).unwrap().rho(ya, yb);
                        parts.push(rx.kronecker(&ry));
                    }
                    parts
                        .into_iter()
                        .reduce(|acc, mm| block_diag(&acc, &mm))
                        .unwrap_or_else(|| IntMatrix::zeros(ranks[pb], ranks[pa]))
                })
                .collect();
            terms.push(FreeStalkSheaf::new(prod.clone(), ranks, maps).expect("product term"));
        }

        let mut diffs = Vec::new();
        for n in lo..hi {
            let d: Vec<IntMatrix> = (0..prod.len())
                .map(|p| {
                    let (x, y) = pair(p);
                    let src = blocks(n);
                    let dst = blocks(n + 1);
                    let src_off =
                        block_offsets(&src, |i| self.rank_at(i, x) * other.rank_at(n - i, y));
                    let dst_off =
                        block_offsets(&dst, |i| self.rank_at(i, x) * other.rank_at(n + 1 - i, y));
                    let rows = *dst_off.last().unwrap_or(&0);
                    let cols = *src_off.last().unwrap_or(&0);
                    let mut mtx = IntMatrix::zeros(rows, cols);
                    for (si, &i) in src.iter().enumerate() {
                        let gr = other.rank_at(n - i, y);
                        if let Some(di) = dst.iter().position(|&dd| dd == i + 1) {
                            let blockm =
                                self.differential(i, x).kronecker(&IntMatrix::identity(gr));
                            place_block(&mut mtx, dst_off[di], src_off[si], &blockm);
                        }
                        if let Some(di) = dst.iter().position(|&dd| dd == i) {
                            let mut blockm = IntMatrix::identity(self.rank_at(i, x))
                                .kronecker(&other.differential(n - i, y));
                            if i.rem_euclid(2) == 1 {
                                blockm = blockm.neg();
                            }
                            place_block(&mut mtx, dst_off[di], src_off[si], &blockm);
                        }
                    }
                    mtx
                })
                .collect();
            diffs.push(d);
        }
        SheafComplex::new(prod, lo, terms, diffs).expect("product complex")
    }
}

impl fmt::Debug for SheafComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SheafComplex[{}..={}]", self.lo, self.hi())
    }
}

fn block_offsets(blocks: &[i64], size: impl Fn(i64) -> usize) -> Vec<usize> {
    let mut off = vec![0usize];
    for &b in blocks {
        off.push(off.last().unwrap() + size(b));
    }
    off
}

/// A degreewise stalk map between two complexes on the same space,
/// commuting with restrictions and differentials.
#[derive(Clone, Debug)]
pub struct SheafMorphism {
    /// maps[degree][x] : F^degree_x → G^degree_x
    maps: BTreeMap<i64, Vec<IntMatrix>>,
}

impl SheafMorphism {
    pub fn new(maps: BTreeMap<i64, Vec<IntMatrix>>) -> Self {
        SheafMorphism { maps }
    }

    pub fn identity(f: &SheafComplex) -> Self {
        let mut maps = BTreeMap::new();
        for deg in f.lo()..=f.hi() {
            let ms: Vec<IntMatrix> = (0..f.poset().len())
                .map(|x| IntMatrix::identity(f.rank_at(deg, x)))
                .collect();
            maps.insert(deg, ms);
        }
        SheafMorphism { maps }
    }

    pub fn map(&self, degree: i64, x: usize, rows: usize, cols: usize) -> IntMatrix {
        match self.maps.get(&degree) {
            Some(ms) => ms[x].clone(),
            None => IntMatrix::zeros(rows, cols),
        }
    }

    /// Check that this is a morphism of complexes `F → G`.
    pub fn validate(&self, f: &SheafComplex, g: &SheafComplex) -> Result<()> {
        let poset = f.poset();
        if **poset != **g.poset() {
            return Err(Error::InvalidSheaf("morphism across different spaces".into()));
        }
        let lo = f.lo().min(g.lo());
        let hi = f.hi().max(g.hi());
        for deg in lo..=hi {
            for x in 0..poset.len() {
                let phi = self.map(deg, x, g.rank_at(deg, x), f.rank_at(deg, x));
                if phi.rows() != g.rank_at(deg, x) || phi.cols() != f.rank_at(deg, x) {
                    return Err(Error::InvalidSheaf(format!(
                        "morphism shape at degree {deg}, element {}",
                        poset.label(x)
                    )));
                }
                // commutes with differentials
                let phi_next = self.map(deg + 1, x, g.rank_at(deg + 1, x), f.rank_at(deg + 1, x));
                if phi_next.mul(&f.differential(deg, x)) != g.differential(deg, x).mul(&phi) {
                    return Err(Error::InvalidSheaf(format!(
                        "morphism does not commute with d at degree {deg}, element {}",
                        poset.label(x)
                    )));
                }
            }
            for &(a, b) in poset.covers() {
                let phi_a = self.map(deg, a, g.rank_at(deg, a), f.rank_at(deg, a));
                let phi_b = self.map(deg, b, g.rank_at(deg, b), f.rank_at(deg, b));
                if phi_b.mul(&f.rho(deg, a, b)) != g.rho(deg, a, b).mul(&phi_a) {
                    return Err(Error::InvalidSheaf(format!(
                        "morphism does not commute with restriction at degree {deg}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Mapping cone of `φ: F → G`: degree n term `F^{n+1} ⊕ G^n`, differential
/// `(f, g) ↦ (−d_F f, φ f + d_G g)`.
pub fn cone(f: &SheafComplex, g: &SheafComplex, phi: &SheafMorphism) -> Result<SheafComplex> {
    phi.validate(f, g)?;
    let poset = f.poset().clone();
    let shifted = f.shift(1);
    if shifted.is_empty() && g.is_empty() {
        return Ok(SheafComplex::empty(poset));
    }
    let lo = if shifted.is_empty() {
        g.lo()
    } else if g.is_empty() {
        shifted.lo()
    } else {
        shifted.lo().min(g.lo())
    };
    let hi = shifted.hi().max(g.hi());
    let mut terms = Vec::new();
    let mut diffs = Vec::new();
    for deg in lo..=hi {
        let a = shifted
            .term(deg)
            .cloned()
            .unwrap_or_else(|| FreeStalkSheaf::zero(poset.clone()));
        let b = g.term(deg).cloned().unwrap_or_else(|| FreeStalkSheaf::zero(poset.clone()));
        terms.push(a.direct_sum(&b));
        if deg < hi {
            let d: Vec<IntMatrix> = (0..poset.len())
                .map(|x| {
                    // F-part of cone degree n is F^{n+1}; shifted already
                    // carries −d_F as its differential.
                    let df = shifted.differential(deg, x);
                    let dg = g.differential(deg, x);
                    let phi_x = phi.map(deg + 1, x, g.rank_at(deg + 1, x), f.rank_at(deg + 1, x));
                    let rows = df.rows() + dg.rows();
                    let cols = df.cols() + dg.cols();
                    let mut m = IntMatrix::zeros(rows, cols);
                    place_block(&mut m, 0, 0, &df);
                    place_block(&mut m, df.rows(), 0, &phi_x);
                    place_block(&mut m, df.rows(), df.cols(), &dg);
                    m
                })
                .collect();
            diffs.push(d);
        }
    }
    SheafComplex::new(poset, lo, terms, diffs)
}

/// A sheaf of finitely generated groups, given per element in canonical
/// form `Z/d_1 ⊕ ... ⊕ Z/d_t ⊕ Z^f` (torsion generators first) with
/// generator-level matrices per cover, functorial modulo relations.
#[derive(Clone, PartialEq, Eq)]
pub struct PresentedSheaf {
    poset: Arc<FinPoset>,
    torsion: Vec<Vec<BigInt>>,
    free: Vec<usize>,
    /// Aligned with `poset.covers()`; entries reduced mod target orders.
    maps: Vec<IntMatrix>,
}

impl PresentedSheaf {
    pub fn new(
        poset: Arc<FinPoset>,
        torsion: Vec<Vec<BigInt>>,
        free: Vec<usize>,
        maps: Vec<IntMatrix>,
    ) -> Result<Self> {
        let n = poset.len();
        if torsion.len() != n || free.len() != n || maps.len() != poset.covers().len() {
            return Err(Error::InvalidSheaf("presentation data has wrong length".into()));
        }
        for t in torsion.iter().flatten() {
            if *t < BigInt::from(2) {
                return Err(Error::InvalidSheaf("torsion orders must be ≥ 2".into()));
            }
        }
        let mut s = PresentedSheaf { poset, torsion, free, maps };
        for (k, &(a, b)) in s.poset.covers().iter().enumerate() {
            let (ga, gb) = (s.gens(a), s.gens(b));
            if s.maps[k].rows() != gb || s.maps[k].cols() != ga {
                return Err(Error::InvalidSheaf(format!(
                    "generator map {} -> {} has wrong shape",
                    s.poset.label(a),
                    s.poset.label(b)
                )));
            }
        }
        // normalize entries, then check relation compatibility
        for k in 0..s.maps.len() {
            let (a, b) = s.poset.covers()[k];
            let m = s.normalize(b, &s.maps[k]);
            s.check_compat(a, b, &m)?;
            s.maps[k] = m;
        }
        // functoriality modulo relations
        let poset = s.poset.clone();
        compute_rho_presented(&s, &poset)?;
        Ok(s)
    }

    /// View a free-stalk sheaf as a presented sheaf with no relations.
    pub fn from_free(f: &FreeStalkSheaf) -> PresentedSheaf {
        let poset = f.poset().clone();
        let n = poset.len();
        let free = (0..n).map(|x| f.rank(x)).collect();
        let maps = (0..poset.covers().len()).map(|k| f.cover_map(k).clone()).collect();
        PresentedSheaf::new(poset, vec![Vec::new(); n], free, maps)
            .expect("a free sheaf is already a valid presentation")
    }

    pub fn poset(&self) -> &Arc<FinPoset> {
        &self.poset
    }

    pub fn gens(&self, x: usize) -> usize {
        self.torsion[x].len() + self.free[x]
    }

    pub fn stalk_group(&self, x: usize) -> FgGroup {
        FgGroup::from_parts(self.free[x], self.torsion[x].clone())
    }

    /// Reduce a generator matrix into canonical range: rows landing on a
    /// torsion generator of order d are taken mod d into [0, d).
    fn normalize(&self, target: usize, m: &IntMatrix) -> IntMatrix {
        IntMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let v = m.get(i, j);
            match self.torsion[target].get(i) {
                Some(d) => v.mod_floor(d),
                None => v.clone(),
            }
        })
    }

    /// A generator map is well defined iff it sends each relation into the
    /// target relations: for a source generator of order d_j, the column
    /// scaled by d_j must die in the target group.
    fn check_compat(&self, a: usize, b: usize, m: &IntMatrix) -> Result<()> {
        for (j, dj) in self.torsion[a].iter().enumerate() {
            for i in 0..self.gens(b) {
                let v = dj * m.get(i, j);
                let ok = match self.torsion[b].get(i) {
                    Some(di) => v.is_multiple_of(di),
                    None => v.is_zero(),
                };
                if !ok {
                    return Err(Error::InvalidSheaf(format!(
                        "map {} -> {} does not respect relations (generator {})",
                        self.poset.label(a),
                        self.poset.label(b),
                        j
                    )));
                }
            }
        }
        Ok(())
    }

    fn maps_equal_mod(&self, target: usize, m1: &IntMatrix, m2: &IntMatrix) -> bool {
        self.normalize(target, m1) == self.normalize(target, m2)
    }

    /// Generator map for any pair x ≤ y (composite along covers, canonical).
    pub fn gen_map(&self, x: usize, y: usize) -> IntMatrix {
        if x == y {
            return IntMatrix::identity(self.gens(x));
        }
        // recompute on demand; spaces are tiny
        let mut current: Vec<Option<IntMatrix>> = vec![None; self.poset.len()];
        current[x] = Some(IntMatrix::identity(self.gens(x)));
        for &z in &self.poset.linear_extension() {
            if !self.poset.lt(x, z) {
                continue;
            }
            for (k, &(yy, zz)) in self.poset.covers().iter().enumerate() {
                if zz != z || !self.poset.leq(x, yy) {
                    continue;
                }
                if let Some(prev) = &current[yy] {
                    let m = self.normalize(z, &self.maps[k].mul(prev));
                    current[z] = Some(m);
                    break;
                }
            }
        }
        current[y].clone().expect("x ≤ y required")
    }

    /// Convert into an honest two-term complex of free-stalk sheaves with
    /// `H^0` = this sheaf, `H^{−1}` = 0.
    ///
    /// Generator-level cover maps are only functorial modulo relations, so
    /// they cannot be used directly as restriction matrices. Instead the
    /// degree-0 term is the chain-free cover `⊕_z (Z_{U_z})^{g_z}` — its
    /// stalk at x is `⊕_{z≤x} Z^{g_z}` and its restrictions are coordinate
    /// inclusions, functorial on the nose — and the degree −1 term is the
    /// kernel of the evaluation onto the presented stalks.
    pub fn to_complex(&self) -> SheafComplex {
        let poset = self.poset.clone();
        let n = poset.len();
        let g: Vec<usize> = (0..n).map(|x| self.gens(x)).collect();

        // degree-0 stalk at x: blocks Z^{g_z} over z ≤ x, ascending z
        let summands: Vec<Vec<usize>> = (0..n).map(|x| poset.down_set(x)).collect();
        let offsets: Vec<Vec<usize>> = summands
            .iter()
            .map(|zs| block_offsets(&zs.iter().map(|&z| z as i64).collect::<Vec<_>>(), |z| g[z as usize]))
            .collect();
        let n0: Vec<usize> = offsets.iter().map(|o| *o.last().unwrap()).collect();

        let p0_maps: Vec<IntMatrix> = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                let mut m = IntMatrix::zeros(n0[b], n0[a]);
                for (sa, &z) in summands[a].iter().enumerate() {
                    let sb = summands[b].iter().position(|&w| w == z).expect("down-closed");
                    place_block(&mut m, offsets[b][sb], offsets[a][sa], &IntMatrix::identity(g[z]));
                }
                m
            })
            .collect();
        let p0 = FreeStalkSheaf::new(poset.clone(), n0.clone(), p0_maps)
            .expect("coordinate inclusions are functorial");

        // evaluation E_x: ⊕_{z≤x} Z^{g_z} → Z^{g_x} by generator maps,
        // and the kernel of Z^{N_x} → coker(presentation at x).
        let mut kernels: Vec<IntMatrix> = Vec::with_capacity(n);
        for x in 0..n {
            let mut e = IntMatrix::zeros(g[x], n0[x]);
            for (s, &z) in summands[x].iter().enumerate() {
                place_block(&mut e, 0, offsets[x][s], &self.gen_map(z, x));
            }
            // relations at x: diagonal torsion columns
            let t = self.torsion[x].len();
            let mut stacked = IntMatrix::zeros(g[x], n0[x] + t);
            place_block(&mut stacked, 0, 0, &e);
            for (i, d) in self.torsion[x].iter().enumerate() {
                stacked.set(i, n0[x] + i, -d.clone());
            }
            let kb = kernel_basis(&stacked);
            let proj = IntMatrix::from_fn(n0[x], kb.cols(), |i, j| kb.get(i, j).clone());
            kernels.push(image_basis(&proj));
        }

        let p1_ranks: Vec<usize> = kernels.iter().map(|k| k.cols()).collect();
        let p1_maps: Vec<IntMatrix> = poset
            .covers()
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| {
                let rhs = p0.cover_map(k).mul(&kernels[a]);
                solve_exact_matrix(&kernels[b], &rhs)
                    .expect("kernel inclusion restricts to kernels")
            })
            .collect();
        let p1 = FreeStalkSheaf::new(poset.clone(), p1_ranks, p1_maps)
            .expect("induced kernel maps are functorial");

        SheafComplex::new(poset, -1, vec![p1, p0], vec![kernels])
            .expect("presentation complex is valid")
    }
}

impl fmt::Debug for PresentedSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stalks: Vec<String> = (0..self.poset.len())
            .map(|x| format!("{}: {}", self.poset.label(x), self.stalk_group(x)))
            .collect();
        write!(f, "PresentedSheaf({})", stalks.join(", "))
    }
}

/// Path independence modulo relations for presented sheaves.
fn compute_rho_presented(s: &PresentedSheaf, poset: &FinPoset) -> Result<()> {
    let n = poset.len();
    let mut rho: Vec<BTreeMap<usize, IntMatrix>> = vec![BTreeMap::new(); n];
    for &z in &poset.linear_extension() {
        for x in 0..n {
            if !poset.lt(x, z) {
                continue;
            }
            let mut candidate: Option<IntMatrix> = None;
            for (k, &(y, zz)) in poset.covers().iter().enumerate() {
                if zz != z || !poset.leq(x, y) {
                    continue;
                }
                let m = if y == x {
                    s.maps[k].clone()
                } else {
                    s.maps[k].mul(&rho[x][&y])
                };
                match &candidate {
                    None => candidate = Some(m),
                    Some(c) => {
                        if !s.maps_equal_mod(z, c, &m) {
                            return Err(Error::InvalidSheaf(format!(
                                "generator maps from {} to {} disagree modulo relations",
                                poset.label(x),
                                poset.label(z)
                            )));
                        }
                    }
                }
            }
            rho[x].insert(z, s.normalize(z, &candidate.unwrap()));
        }
    }
    Ok(())
}
