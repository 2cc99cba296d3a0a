//! n-representations of quiver tuples: component representations linked by
//! connecting matrices, one per pair of arrows at consecutive levels.
//!
//! A link at level `m` (for `m` in `2..=n`, stored zero-based) maps the space
//! at the target of an arrow of quiver `m-1` to the space at the source of an
//! arrow of quiver `m`.

use crate::exactlin::{block_diag, ExactMatrix, FieldSpec, LinError};
use crate::quiver::Quiver;
use crate::rep::{self, RepError, RepMorphism, Representation};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NRepError {
    #[error("an n-representation needs at least 2 levels, got {0}")]
    LevelCountTooSmall(usize),
    #[error("missing link at level {level} for arrow pair (`{lower}`, `{upper}`)")]
    MissingLink {
        level: usize,
        lower: String,
        upper: String,
    },
    #[error("link at level {level} for (`{lower}`, `{upper}`): expected {expected_rows}x{expected_cols}, found {found_rows}x{found_cols}")]
    LinkShapeMismatch {
        level: usize,
        lower: String,
        upper: String,
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("link square at level {level} for (`{lower}`, `{upper}`) does not commute")]
    NotCommutingLink {
        level: usize,
        lower: String,
        upper: String,
        lhs: ExactMatrix,
        rhs: ExactMatrix,
    },
    #[error("n-representations are over different quiver tuples")]
    TupleMismatch,
    #[error("component {0} is over the wrong quiver")]
    ComponentQuiverMismatch(usize),
    #[error("level {0} out of range for a tuple of {1} quivers")]
    LevelOutOfRange(usize, usize),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// An n-tuple of representations plus connecting matrices.
///
/// `links[l][g][d]` connects level `l` to level `l+1` (zero-based): it has
/// shape `comps[l+1].dims[s(d)] x comps[l].dims[t(g)]` where `g`, `d` range
/// over the arrows of `quivers[l]`, `quivers[l+1]` in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NRepresentation {
    pub quivers: Vec<Arc<Quiver>>,
    pub comps: Vec<Representation>,
    pub links: Vec<Vec<Vec<ExactMatrix>>>,
}

impl NRepresentation {
    pub fn new(
        comps: Vec<Representation>,
        links: Vec<Vec<Vec<ExactMatrix>>>,
    ) -> Result<NRepresentation, NRepError> {
        let n = comps.len();
        if n < 2 {
            return Err(NRepError::LevelCountTooSmall(n));
        }
        let quivers: Vec<Arc<Quiver>> = comps.iter().map(|c| c.quiver.clone()).collect();
        let field = comps[0].field;
        for c in &comps {
            if c.field != field {
                return Err(NRepError::Rep(RepError::FieldMismatch(field, c.field)));
            }
        }
        assert_eq!(links.len(), n - 1);
        for l in 0..n - 1 {
            let (lo, hi) = (&comps[l], &comps[l + 1]);
            assert_eq!(links[l].len(), lo.quiver.arrow_count());
            for (gi, g) in lo.quiver.arrows.iter().enumerate() {
                assert_eq!(links[l][gi].len(), hi.quiver.arrow_count());
                for (di, d) in hi.quiver.arrows.iter().enumerate() {
                    let m = &links[l][gi][di];
                    let er = hi.dim_at(&d.source);
                    let ec = lo.dim_at(&g.target);
                    if m.rows() != er || m.cols() != ec {
                        return Err(NRepError::LinkShapeMismatch {
                            level: l + 2,
                            lower: g.label.clone(),
                            upper: d.label.clone(),
                            expected_rows: er,
                            expected_cols: ec,
                            found_rows: m.rows(),
                            found_cols: m.cols(),
                        });
                    }
                    if m.field() != field {
                        return Err(NRepError::Rep(RepError::FieldMismatch(field, m.field())));
                    }
                }
            }
        }
        Ok(NRepresentation {
            quivers,
            comps,
            links,
        })
    }

    /// Assembles links from a map keyed by `(level m in 2..=n, lower arrow
    /// label, upper arrow label)`; every pair must be present.
    pub fn from_link_map(
        comps: Vec<Representation>,
        map: &HashMap<(usize, String, String), ExactMatrix>,
    ) -> Result<NRepresentation, NRepError> {
        let n = comps.len();
        if n < 2 {
            return Err(NRepError::LevelCountTooSmall(n));
        }
        let mut links = Vec::with_capacity(n - 1);
        for l in 0..n - 1 {
            let mut per_lower = Vec::new();
            for g in &comps[l].quiver.arrows {
                let mut per_upper = Vec::new();
                for d in &comps[l + 1].quiver.arrows {
                    let key = (l + 2, g.label.clone(), d.label.clone());
                    match map.get(&key) {
                        Some(m) => per_upper.push(m.clone()),
                        None => {
                            return Err(NRepError::MissingLink {
                                level: l + 2,
                                lower: g.label.clone(),
                                upper: d.label.clone(),
                            })
                        }
                    }
                }
                per_lower.push(per_upper);
            }
            links.push(per_lower);
        }
        NRepresentation::new(comps, links)
    }

    pub fn level_count(&self) -> usize {
        self.comps.len()
    }

    pub fn field(&self) -> FieldSpec {
        self.comps[0].field
    }

    pub fn total_dim(&self) -> usize {
        self.comps.iter().map(|c| c.total_dim()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn link(&self, level: usize, lower: &str, upper: &str) -> &ExactMatrix {
        let l = level - 2;
        let gi = self.quivers[l].arrow_index(lower).unwrap();
        let di = self.quivers[l + 1].arrow_index(upper).unwrap();
        &self.links[l][gi][di]
    }

    pub fn same_tuple(&self, other: &NRepresentation) -> bool {
        self.quivers == other.quivers && self.field() == other.field()
    }

    /// Drops the last level and its links; always a valid shorter
    /// n-representation when at least three levels remain.
    pub fn truncate(&self) -> Result<NRepresentation, NRepError> {
        let n = self.level_count();
        NRepresentation::new(self.comps[..n - 1].to_vec(), self.links[..n - 2].to_vec())
    }

    /// The zero n-representation over a tuple.
    pub fn zero(quivers: &[Arc<Quiver>], field: FieldSpec) -> Result<NRepresentation, NRepError> {
        let comps: Vec<Representation> = quivers
            .iter()
            .map(|q| Representation::zero(q.clone(), field))
            .collect();
        let links = zero_links_for(&comps);
        NRepresentation::new(comps, links)
    }

    /// The monoidal unit: unit representation at every level, every link the
    /// 1x1 identity.
    pub fn unit(quivers: &[Arc<Quiver>], field: FieldSpec) -> Result<NRepresentation, NRepError> {
        let comps: Vec<Representation> = quivers
            .iter()
            .map(|q| Representation::unit(q.clone(), field))
            .collect();
        let n = comps.len();
        let mut links = Vec::with_capacity(n.saturating_sub(1));
        for l in 0..n - 1 {
            links.push(vec![
                vec![
                    ExactMatrix::identity(field, 1);
                    comps[l + 1].quiver.arrow_count()
                ];
                comps[l].quiver.arrow_count()
            ]);
        }
        NRepresentation::new(comps, links)
    }
}

fn zero_links_for(comps: &[Representation]) -> Vec<Vec<Vec<ExactMatrix>>> {
    let field = comps[0].field;
    let n = comps.len();
    let mut links = Vec::with_capacity(n - 1);
    for l in 0..n - 1 {
        let (lo, hi) = (&comps[l], &comps[l + 1]);
        let mut per_lower = Vec::new();
        for g in &lo.quiver.arrows {
            let mut per_upper = Vec::new();
            for d in &hi.quiver.arrows {
                per_upper.push(ExactMatrix::zeros(
                    field,
                    hi.dim_at(&d.source),
                    lo.dim_at(&g.target),
                ));
            }
            per_lower.push(per_upper);
        }
        links.push(per_lower);
    }
    links
}

/// A verified morphism of n-representations: one representation morphism per
/// level plus the connecting-square conditions, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NRepMorphism {
    pub source: NRepresentation,
    pub target: NRepresentation,
    pub comp_morphisms: Vec<RepMorphism>,
}

impl NRepMorphism {
    pub fn new(
        source: NRepresentation,
        target: NRepresentation,
        comp_morphisms: Vec<RepMorphism>,
    ) -> Result<NRepMorphism, NRepError> {
        if !source.same_tuple(&target) {
            return Err(NRepError::TupleMismatch);
        }
        let n = source.level_count();
        assert_eq!(comp_morphisms.len(), n);
        for (m, f) in comp_morphisms.iter().enumerate() {
            if f.source != source.comps[m] || f.target != target.comps[m] {
                return Err(NRepError::ComponentQuiverMismatch(m + 1));
            }
        }
        for l in 0..n - 1 {
            let lo_q = &source.quivers[l];
            let hi_q = &source.quivers[l + 1];
            for (gi, g) in lo_q.arrows.iter().enumerate() {
                for (di, d) in hi_q.arrows.iter().enumerate() {
                    // target.link . f_{t(g)} = f_{s(d)} . source.link
                    let lhs = target.links[l][gi][di].mul(comp_morphisms[l].comp_at(&g.target))?;
                    let rhs = comp_morphisms[l + 1]
                        .comp_at(&d.source)
                        .mul(&source.links[l][gi][di])?;
                    if lhs != rhs {
                        return Err(NRepError::NotCommutingLink {
                            level: l + 2,
                            lower: g.label.clone(),
                            upper: d.label.clone(),
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        Ok(NRepMorphism {
            source,
            target,
            comp_morphisms,
        })
    }

    pub fn identity(v: &NRepresentation) -> NRepMorphism {
        let comp_morphisms = v.comps.iter().map(RepMorphism::identity).collect();
        NRepMorphism::new(v.clone(), v.clone(), comp_morphisms).unwrap()
    }

    pub fn zero(
        source: &NRepresentation,
        target: &NRepresentation,
    ) -> Result<NRepMorphism, NRepError> {
        if !source.same_tuple(target) {
            return Err(NRepError::TupleMismatch);
        }
        let comp_morphisms = source
            .comps
            .iter()
            .zip(&target.comps)
            .map(|(s, t)| RepMorphism::zero(s, t))
            .collect::<Result<_, _>>()?;
        NRepMorphism::new(source.clone(), target.clone(), comp_morphisms)
    }

    pub fn compose_after(&self, f: &NRepMorphism) -> Result<NRepMorphism, NRepError> {
        if f.target != self.source {
            return Err(NRepError::Rep(RepError::SourceTargetMismatch));
        }
        let comp_morphisms = self
            .comp_morphisms
            .iter()
            .zip(&f.comp_morphisms)
            .map(|(g, f)| g.compose_after(f))
            .collect::<Result<_, _>>()?;
        NRepMorphism::new(f.source.clone(), self.target.clone(), comp_morphisms)
    }

    pub fn is_iso(&self) -> bool {
        self.comp_morphisms.iter().all(|f| f.is_iso())
    }

    pub fn is_zero_morphism(&self) -> bool {
        self.comp_morphisms.iter().all(|f| f.is_zero_morphism())
    }
}

pub struct NRepDirectSum {
    pub sum: NRepresentation,
    pub inj_left: NRepMorphism,
    pub inj_right: NRepMorphism,
    pub proj_left: NRepMorphism,
    pub proj_right: NRepMorphism,
}

/// Componentwise direct sum; links become block-diagonal.
pub fn nrep_direct_sum(
    a: &NRepresentation,
    b: &NRepresentation,
) -> Result<NRepDirectSum, NRepError> {
    if !a.same_tuple(b) {
        return Err(NRepError::TupleMismatch);
    }
    let field = a.field();
    let n = a.level_count();
    let mut sums = Vec::with_capacity(n);
    for m in 0..n {
        sums.push(rep::direct_sum(&a.comps[m], &b.comps[m])?);
    }
    let comps: Vec<Representation> = sums.iter().map(|s| s.sum.clone()).collect();
    let mut links = Vec::with_capacity(n - 1);
    for l in 0..n - 1 {
        let mut per_lower = Vec::new();
        for gi in 0..a.quivers[l].arrow_count() {
            let mut per_upper = Vec::new();
            for di in 0..a.quivers[l + 1].arrow_count() {
                per_upper.push(block_diag(
                    field,
                    &[a.links[l][gi][di].clone(), b.links[l][gi][di].clone()],
                )?);
            }
            per_lower.push(per_upper);
        }
        links.push(per_lower);
    }
    let sum = NRepresentation::new(comps, links)?;
    let inj_left = NRepMorphism::new(
        a.clone(),
        sum.clone(),
        sums.iter().map(|s| s.inj_left.clone()).collect(),
    )?;
    let inj_right = NRepMorphism::new(
        b.clone(),
        sum.clone(),
        sums.iter().map(|s| s.inj_right.clone()).collect(),
    )?;
    let proj_left = NRepMorphism::new(
        sum.clone(),
        a.clone(),
        sums.iter().map(|s| s.proj_left.clone()).collect(),
    )?;
    let proj_right = NRepMorphism::new(
        sum.clone(),
        b.clone(),
        sums.iter().map(|s| s.proj_right.clone()).collect(),
    )?;
    Ok(NRepDirectSum {
        sum,
        inj_left,
        inj_right,
        proj_left,
        proj_right,
    })
}

/// Componentwise tensor; links are Kronecker products of links.
pub fn nrep_tensor(a: &NRepresentation, b: &NRepresentation) -> Result<NRepresentation, NRepError> {
    if !a.same_tuple(b) {
        return Err(NRepError::TupleMismatch);
    }
    let n = a.level_count();
    let comps = (0..n)
        .map(|m| rep::tensor(&a.comps[m], &b.comps[m]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut links = Vec::with_capacity(n - 1);
    for l in 0..n - 1 {
        let mut per_lower = Vec::new();
        for gi in 0..a.quivers[l].arrow_count() {
            let mut per_upper = Vec::new();
            for di in 0..a.quivers[l + 1].arrow_count() {
                per_upper.push(a.links[l][gi][di].kron(&b.links[l][gi][di])?);
            }
            per_lower.push(per_upper);
        }
        links.push(per_lower);
    }
    NRepresentation::new(comps, links)
}

/// Tensor of n-representation morphisms, levelwise Kronecker.
pub fn nrep_tensor_morphism(f: &NRepMorphism, g: &NRepMorphism) -> Result<NRepMorphism, NRepError> {
    let source = nrep_tensor(&f.source, &g.source)?;
    let target = nrep_tensor(&f.target, &g.target)?;
    let comp_morphisms = f
        .comp_morphisms
        .iter()
        .zip(&g.comp_morphisms)
        .map(|(x, y)| rep::tensor_morphism(x, y))
        .collect::<Result<_, _>>()?;
    NRepMorphism::new(source, target, comp_morphisms)
}

/// Embeds a single-quiver representation at level `j` (1-based), with zero
/// representations elsewhere and all links forced to (possibly 0-sized) zero
/// matrices.
pub fn embed_component(
    j: usize,
    r: &Representation,
    quivers: &[Arc<Quiver>],
) -> Result<NRepresentation, NRepError> {
    if j == 0 || j > quivers.len() {
        return Err(NRepError::LevelOutOfRange(j, quivers.len()));
    }
    if quivers[j - 1] != r.quiver {
        return Err(NRepError::ComponentQuiverMismatch(j));
    }
    let comps: Vec<Representation> = quivers
        .iter()
        .enumerate()
        .map(|(m, q)| {
            if m == j - 1 {
                r.clone()
            } else {
                Representation::zero(q.clone(), r.field)
            }
        })
        .collect();
    let links = zero_links_for(&comps);
    NRepresentation::new(comps, links)
}

/// Solves the full linear system for morphisms between n-representations;
/// returns a basis of verified morphisms.
pub fn nrep_hom_space(
    a: &NRepresentation,
    b: &NRepresentation,
) -> Result<Vec<NRepMorphism>, NRepError> {
    if !a.same_tuple(b) {
        return Err(NRepError::TupleMismatch);
    }
    let f = a.field();
    let n = a.level_count();
    // Unknown layout: per level, per vertex, row-major component entries.
    let mut offsets = Vec::new();
    let mut acc = 0usize;
    for m in 0..n {
        let mut per_vertex = Vec::new();
        for i in 0..a.quivers[m].vertex_count() {
            per_vertex.push(acc);
            acc += b.comps[m].dims[i] * a.comps[m].dims[i];
        }
        offsets.push(per_vertex);
    }
    let unknowns = acc;
    let mut rows: Vec<Vec<crate::exactlin::Scalar>> = Vec::new();
    // Commuting squares inside each level.
    for m in 0..n {
        let q = &a.quivers[m];
        for arrow in &q.arrows {
            let s = q.vertex_index(&arrow.source).unwrap();
            let t = q.vertex_index(&arrow.target).unwrap();
            let am = a.comps[m].mat(&arrow.label);
            let bm = b.comps[m].mat(&arrow.label);
            for r in 0..b.comps[m].dims[t] {
                for c in 0..a.comps[m].dims[s] {
                    let mut row = vec![f.zero(); unknowns];
                    for k in 0..a.comps[m].dims[t] {
                        let idx = offsets[m][t] + r * a.comps[m].dims[t] + k;
                        row[idx] = f.add(&row[idx], am.get(k, c));
                    }
                    for k in 0..b.comps[m].dims[s] {
                        let idx = offsets[m][s] + k * a.comps[m].dims[s] + c;
                        row[idx] = f.sub(&row[idx], bm.get(r, k));
                    }
                    rows.push(row);
                }
            }
        }
    }
    // Connecting squares between consecutive levels.
    for l in 0..n - 1 {
        let lo_q = &a.quivers[l];
        let hi_q = &a.quivers[l + 1];
        for (gi, g) in lo_q.arrows.iter().enumerate() {
            let tg = lo_q.vertex_index(&g.target).unwrap();
            for (di, d) in hi_q.arrows.iter().enumerate() {
                let sd = hi_q.vertex_index(&d.source).unwrap();
                let psi_a = &a.links[l][gi][di];
                let psi_b = &b.links[l][gi][di];
                // psi_b . f_lo - f_hi . psi_a = 0
                for r in 0..b.comps[l + 1].dims[sd] {
                    for c in 0..a.comps[l].dims[tg] {
                        let mut row = vec![f.zero(); unknowns];
                        for k in 0..b.comps[l].dims[tg] {
                            let idx = offsets[l][tg] + k * a.comps[l].dims[tg] + c;
                            row[idx] = f.add(&row[idx], psi_b.get(r, k));
                        }
                        for k in 0..a.comps[l + 1].dims[sd] {
                            let idx = offsets[l + 1][sd] + r * a.comps[l + 1].dims[sd] + k;
                            row[idx] = f.sub(&row[idx], psi_a.get(k, c));
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    let system = if rows.is_empty() {
        ExactMatrix::zeros(f, 0, unknowns)
    } else {
        ExactMatrix::from_rows(f, rows)?
    };
    let basis = system.rank_and_kernel().kernel;
    let mut out = Vec::with_capacity(basis.cols());
    for j in 0..basis.cols() {
        let v = basis.column(j);
        let mut comp_morphisms = Vec::with_capacity(n);
        for m in 0..n {
            let mut comps = Vec::new();
            for i in 0..a.quivers[m].vertex_count() {
                let (dr, dc) = (b.comps[m].dims[i], a.comps[m].dims[i]);
                let mut mat = ExactMatrix::zeros(f, dr, dc);
                for r in 0..dr {
                    for c in 0..dc {
                        mat.set(r, c, v[offsets[m][i] + r * dc + c].clone());
                    }
                }
                comps.push(mat);
            }
            comp_morphisms.push(RepMorphism::new(
                a.comps[m].clone(),
                b.comps[m].clone(),
                comps,
            )?);
        }
        out.push(NRepMorphism::new(a.clone(), b.clone(), comp_morphisms)?);
    }
    Ok(out)
}
