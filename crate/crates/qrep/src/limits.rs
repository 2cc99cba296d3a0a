//! Finite limits and colimits of representations and n-representations.
//!
//! Limits are computed as equalizers of products: at every vertex slot the
//! apex space is the solution space of all edge constraints inside the
//! product, and every induced structure map is obtained by solving its
//! defining equation, so solvability and uniqueness are checked at runtime
//! rather than assumed. Colimits are the quotient duals with deterministic
//! quotient bases.

use crate::exactlin::{block_diag, ExactMatrix, FieldSpec, LinError};
use crate::nrep::{NRepError, NRepMorphism, NRepresentation};
use crate::quiver::Quiver;
use crate::rep::{RepError, RepMorphism, Representation};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LimitError {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("induced map equation has no solution at {0}; the diagram data is inconsistent")]
    NotSolvable(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    NRep(#[from] NRepError),
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// A finite diagram of representations: shape vertices carry objects, shape
/// arrows carry verified morphisms.
#[derive(Debug, Clone)]
pub struct RepDiagram {
    pub shape: Arc<Quiver>,
    /// One object per shape vertex, in shape declaration order.
    pub objects: Vec<Representation>,
    /// One morphism per shape arrow, in shape declaration order.
    pub edges: Vec<RepMorphism>,
}

impl RepDiagram {
    pub fn new(
        shape: Arc<Quiver>,
        objects: Vec<Representation>,
        edges: Vec<RepMorphism>,
    ) -> Result<RepDiagram, LimitError> {
        if shape.vertex_count() == 0 {
            return Err(LimitError::InvalidDiagram("empty shape".into()));
        }
        if objects.len() != shape.vertex_count() {
            return Err(LimitError::InvalidDiagram(format!(
                "expected {} objects, got {}",
                shape.vertex_count(),
                objects.len()
            )));
        }
        if edges.len() != shape.arrow_count() {
            return Err(LimitError::InvalidDiagram(format!(
                "expected {} edges, got {}",
                shape.arrow_count(),
                edges.len()
            )));
        }
        for o in &objects[1..] {
            objects[0].check_compatible(o)?;
        }
        for (a, f) in shape.arrows.iter().zip(&edges) {
            let s = shape.vertex_index(&a.source).unwrap();
            let t = shape.vertex_index(&a.target).unwrap();
            if f.source != objects[s] || f.target != objects[t] {
                return Err(LimitError::InvalidDiagram(format!(
                    "edge `{}` does not match its endpoint objects",
                    a.label
                )));
            }
        }
        Ok(RepDiagram {
            shape,
            objects,
            edges,
        })
    }
}

/// Same as `RepDiagram` for n-representations.
#[derive(Debug, Clone)]
pub struct NRepDiagram {
    pub shape: Arc<Quiver>,
    pub objects: Vec<NRepresentation>,
    pub edges: Vec<NRepMorphism>,
}

impl NRepDiagram {
    pub fn new(
        shape: Arc<Quiver>,
        objects: Vec<NRepresentation>,
        edges: Vec<NRepMorphism>,
    ) -> Result<NRepDiagram, LimitError> {
        if shape.vertex_count() == 0 {
            return Err(LimitError::InvalidDiagram("empty shape".into()));
        }
        if objects.len() != shape.vertex_count() {
            return Err(LimitError::InvalidDiagram(format!(
                "expected {} objects, got {}",
                shape.vertex_count(),
                objects.len()
            )));
        }
        if edges.len() != shape.arrow_count() {
            return Err(LimitError::InvalidDiagram(format!(
                "expected {} edges, got {}",
                shape.arrow_count(),
                edges.len()
            )));
        }
        for o in &objects[1..] {
            if !objects[0].same_tuple(o) {
                return Err(LimitError::NRep(NRepError::TupleMismatch));
            }
        }
        for (a, f) in shape.arrows.iter().zip(&edges) {
            let s = shape.vertex_index(&a.source).unwrap();
            let t = shape.vertex_index(&a.target).unwrap();
            if f.source != objects[s] || f.target != objects[t] {
                return Err(LimitError::InvalidDiagram(format!(
                    "edge `{}` does not match its endpoint objects",
                    a.label
                )));
            }
        }
        Ok(NRepDiagram {
            shape,
            objects,
            edges,
        })
    }
}

/// Per-slot machinery shared by all limit computations: dims of the objects
/// at one vertex slot, edge matrices at that slot, and the resulting product
/// offsets.
struct Slot {
    field: FieldSpec,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl Slot {
    fn new(field: FieldSpec, dims: Vec<usize>) -> Slot {
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        Slot {
            field,
            dims,
            offsets,
            total: acc,
        }
    }

    /// Basis of the subspace of the product where, for every edge
    /// `(s, t, m)`, the `t`-component equals `m` applied to the
    /// `s`-component. Columns are in reduced echelon form, so deterministic.
    fn cone_kernel(&self, edges: &[(usize, usize, &ExactMatrix)]) -> ExactMatrix {
        let n_rows: usize = edges.iter().map(|(_, t, _)| self.dims[*t]).sum();
        let mut sys = ExactMatrix::zeros(self.field, n_rows, self.total);
        let mut row = 0;
        for (s, t, m) in edges {
            for r in 0..self.dims[*t] {
                sys.set(row, self.offsets[*t] + r, self.field.one());
                for c in 0..self.dims[*s] {
                    let v = self.field.neg(m.get(r, c));
                    sys.set(row, self.offsets[*s] + c, v);
                }
                row += 1;
            }
        }
        sys.rank_and_kernel().kernel
    }

    /// Generators of the coequalizer relation subspace: for every edge
    /// `(s, t, m)` and basis vector `e` of the `s`-component, the column
    /// `incl_t(m e) - incl_s(e)`.
    fn cocone_relations(&self, edges: &[(usize, usize, &ExactMatrix)]) -> ExactMatrix {
        let n_cols: usize = edges.iter().map(|(s, _, _)| self.dims[*s]).sum();
        let mut rel = ExactMatrix::zeros(self.field, self.total, n_cols);
        let mut col = 0;
        for (s, t, m) in edges {
            for c in 0..self.dims[*s] {
                for r in 0..self.dims[*t] {
                    rel.set(self.offsets[*t] + r, col, m.get(r, c).clone());
                }
                let v = self.field.neg(&self.field.one());
                rel.set(self.offsets[*s] + c, col, v);
                col += 1;
            }
        }
        rel
    }

    /// Rows `offsets[j]..offsets[j]+dims[j]` of `m`: the `j`-th block of a
    /// map out of (or basis inside) the product.
    fn row_block(&self, m: &ExactMatrix, j: usize) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.field, self.dims[j], m.cols());
        for r in 0..self.dims[j] {
            for c in 0..m.cols() {
                out.set(r, c, m.get(self.offsets[j] + r, c).clone());
            }
        }
        out
    }

    /// Columns `offsets[j]..offsets[j]+dims[j]` of `m`: the `j`-th block of
    /// a map into the coproduct.
    fn col_block(&self, m: &ExactMatrix, j: usize) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.field, m.rows(), self.dims[j]);
        for r in 0..m.rows() {
            for c in 0..self.dims[j] {
                out.set(r, c, m.get(r, self.offsets[j] + c).clone());
            }
        }
        out
    }
}

fn edge_endpoints(shape: &Quiver) -> Vec<(usize, usize)> {
    shape
        .arrows
        .iter()
        .map(|a| {
            (
                shape.vertex_index(&a.source).unwrap(),
                shape.vertex_index(&a.target).unwrap(),
            )
        })
        .collect()
}

/// Solves `basis . x = rhs` where `basis` has full column rank; the unique
/// coordinates of `rhs` relative to the computed basis.
fn express_in_basis(
    basis: &ExactMatrix,
    rhs: &ExactMatrix,
    ctx: &str,
) -> Result<ExactMatrix, LimitError> {
    basis
        .solve_matrix(rhs)?
        .ok_or_else(|| LimitError::NotSolvable(ctx.to_string()))
}

pub struct RepLimit {
    pub apex: Representation,
    pub projections: Vec<RepMorphism>,
}

pub struct RepColimit {
    pub nadir: Representation,
    pub injections: Vec<RepMorphism>,
}

pub fn rep_limit(d: &RepDiagram) -> Result<RepLimit, LimitError> {
    let q = d.objects[0].quiver.clone();
    let field = d.objects[0].field;
    let ends = edge_endpoints(&d.shape);
    let mut kernels = Vec::with_capacity(q.vertex_count());
    let mut slots = Vec::with_capacity(q.vertex_count());
    for v in &q.vertices {
        let slot = Slot::new(field, d.objects.iter().map(|o| o.dim_at(v)).collect());
        let edges: Vec<(usize, usize, &ExactMatrix)> = ends
            .iter()
            .zip(&d.edges)
            .map(|(&(s, t), f)| (s, t, f.comp_at(v)))
            .collect();
        kernels.push(slot.cone_kernel(&edges));
        slots.push(slot);
    }
    let dims: Vec<usize> = kernels.iter().map(|k| k.cols()).collect();
    let mut mats = Vec::with_capacity(q.arrow_count());
    for a in &q.arrows {
        let s = q.vertex_index(&a.source).unwrap();
        let t = q.vertex_index(&a.target).unwrap();
        let phi = block_diag(
            field,
            &d.objects
                .iter()
                .map(|o| o.mat(&a.label).clone())
                .collect::<Vec<_>>(),
        )?;
        let rhs = phi.mul(&kernels[s])?;
        mats.push(express_in_basis(
            &kernels[t],
            &rhs,
            &format!("limit map at arrow `{}`", a.label),
        )?);
    }
    let apex = Representation::new(q.clone(), field, dims, mats)?;
    let mut projections = Vec::with_capacity(d.objects.len());
    for (j, o) in d.objects.iter().enumerate() {
        let comps = (0..q.vertex_count())
            .map(|i| slots[i].row_block(&kernels[i], j))
            .collect();
        projections.push(RepMorphism::new(apex.clone(), o.clone(), comps)?);
    }
    Ok(RepLimit { apex, projections })
}

pub fn rep_colimit(d: &RepDiagram) -> Result<RepColimit, LimitError> {
    let q = d.objects[0].quiver.clone();
    let field = d.objects[0].field;
    let ends = edge_endpoints(&d.shape);
    let mut projs = Vec::with_capacity(q.vertex_count());
    let mut sections = Vec::with_capacity(q.vertex_count());
    let mut relations = Vec::with_capacity(q.vertex_count());
    let mut slots = Vec::with_capacity(q.vertex_count());
    for v in &q.vertices {
        let slot = Slot::new(field, d.objects.iter().map(|o| o.dim_at(v)).collect());
        let edges: Vec<(usize, usize, &ExactMatrix)> = ends
            .iter()
            .zip(&d.edges)
            .map(|(&(s, t), f)| (s, t, f.comp_at(v)))
            .collect();
        let rel = slot.cocone_relations(&edges);
        let (p, s, _) = crate::exactlin::quotient_projection(&rel)?;
        relations.push(rel);
        projs.push(p);
        sections.push(s);
        slots.push(slot);
    }
    let dims: Vec<usize> = projs.iter().map(|p| p.rows()).collect();
    let mut mats = Vec::with_capacity(q.arrow_count());
    for a in &q.arrows {
        let s = q.vertex_index(&a.source).unwrap();
        let t = q.vertex_index(&a.target).unwrap();
        let phi = block_diag(
            field,
            &d.objects
                .iter()
                .map(|o| o.mat(&a.label).clone())
                .collect::<Vec<_>>(),
        )?;
        // Well-definedness on the quotient: the relation space must map into
        // the relation space.
        if !projs[t].mul(&phi.mul(&relations[s])?)?.is_zero() {
            return Err(LimitError::NotSolvable(format!(
                "colimit map at arrow `{}`",
                a.label
            )));
        }
        mats.push(projs[t].mul(&phi)?.mul(&sections[s])?);
    }
    let nadir = Representation::new(q.clone(), field, dims, mats)?;
    let mut injections = Vec::with_capacity(d.objects.len());
    for (j, o) in d.objects.iter().enumerate() {
        let comps = (0..q.vertex_count())
            .map(|i| slots[i].col_block(&projs[i], j))
            .collect();
        injections.push(RepMorphism::new(o.clone(), nadir.clone(), comps)?);
    }
    Ok(RepColimit { nadir, injections })
}

/// The unique morphism from a cone's tip into the limit apex; construction
/// verifies both uniqueness (full-column-rank solve) and the cone equations.
pub fn rep_mediate_to_limit(
    lim: &RepLimit,
    cone: &[RepMorphism],
) -> Result<RepMorphism, LimitError> {
    if cone.len() != lim.projections.len() {
        return Err(LimitError::InvalidDiagram("cone leg count".into()));
    }
    let tip = cone[0].source.clone();
    let q = tip.quiver.clone();
    let field = tip.field;
    let mut comps = Vec::with_capacity(q.vertex_count());
    for (i, v) in q.vertices.iter().enumerate() {
        let slot = Slot::new(
            field,
            lim.projections.iter().map(|p| p.target.dim_at(v)).collect(),
        );
        let mut stacked = ExactMatrix::zeros(field, slot.total, tip.dims[i]);
        for (j, leg) in cone.iter().enumerate() {
            let m = leg.comp_at(v);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    stacked.set(slot.offsets[j] + r, c, m.get(r, c).clone());
                }
            }
        }
        // The apex basis at this vertex, as columns in the product.
        let mut basis = ExactMatrix::zeros(field, slot.total, lim.apex.dims[i]);
        for (j, p) in lim.projections.iter().enumerate() {
            let m = p.comp_at(v);
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    basis.set(slot.offsets[j] + r, c, m.get(r, c).clone());
                }
            }
        }
        comps.push(express_in_basis(&basis, &stacked, "mediating morphism")?);
    }
    Ok(RepMorphism::new(tip, lim.apex.clone(), comps)?)
}

/// The unique morphism from the colimit nadir to a cocone's tip.
pub fn rep_mediate_from_colimit(
    colim: &RepColimit,
    cocone: &[RepMorphism],
) -> Result<RepMorphism, LimitError> {
    if cocone.len() != colim.injections.len() {
        return Err(LimitError::InvalidDiagram("cocone leg count".into()));
    }
    let tip = cocone[0].target.clone();
    let q = tip.quiver.clone();
    let field = tip.field;
    let mut comps = Vec::with_capacity(q.vertex_count());
    for (i, v) in q.vertices.iter().enumerate() {
        // Stack the injections as a surjection from the coproduct onto the
        // nadir and solve leg-wise: u . inj_j = cocone_j for all j.
        let slot = Slot::new(
            field,
            colim
                .injections
                .iter()
                .map(|f| f.source.dim_at(v))
                .collect(),
        );
        let mut surj = ExactMatrix::zeros(field, colim.nadir.dims[i], slot.total);
        let mut legs = ExactMatrix::zeros(field, tip.dims[i], slot.total);
        for (j, (inj, leg)) in colim.injections.iter().zip(cocone).enumerate() {
            let mi = inj.comp_at(v);
            let ml = leg.comp_at(v);
            for c in 0..slot.dims[j] {
                for r in 0..mi.rows() {
                    surj.set(r, slot.offsets[j] + c, mi.get(r, c).clone());
                }
                for r in 0..ml.rows() {
                    legs.set(r, slot.offsets[j] + c, ml.get(r, c).clone());
                }
            }
        }
        // u . surj = legs, i.e. surj^T . u^T = legs^T with surj^T of full
        // column rank.
        let sol = express_in_basis(&surj.transpose(), &legs.transpose(), "mediating morphism")?;
        comps.push(sol.transpose());
    }
    Ok(RepMorphism::new(colim.nadir.clone(), tip, comps)?)
}

pub struct NRepLimit {
    pub apex: NRepresentation,
    pub projections: Vec<NRepMorphism>,
}

pub struct NRepColimit {
    pub nadir: NRepresentation,
    pub injections: Vec<NRepMorphism>,
}

/// Levelwise diagram of the `m`-th components.
fn level_diagram(d: &NRepDiagram, m: usize) -> Result<RepDiagram, LimitError> {
    RepDiagram::new(
        d.shape.clone(),
        d.objects.iter().map(|o| o.comps[m].clone()).collect(),
        d.edges
            .iter()
            .map(|f| f.comp_morphisms[m].clone())
            .collect(),
    )
}

pub fn nrep_limit(d: &NRepDiagram) -> Result<NRepLimit, LimitError> {
    let n = d.objects[0].level_count();
    let field = d.objects[0].field();
    let mut level_limits = Vec::with_capacity(n);
    for m in 0..n {
        level_limits.push(rep_limit(&level_diagram(d, m)?)?);
    }
    let comps: Vec<Representation> = level_limits.iter().map(|l| l.apex.clone()).collect();
    // Induced links: solve through the apex bases, which are exactly the
    // stacked projection components.
    let mut links = Vec::with_capacity(n - 1);
    for l in 0..n - 1 {
        let lo_q = &d.objects[0].quivers[l];
        let hi_q = &d.objects[0].quivers[l + 1];
        let mut per_lower = Vec::new();
        for (gi, g) in lo_q.arrows.iter().enumerate() {
            let mut per_upper = Vec::new();
            for (di, dd) in hi_q.arrows.iter().enumerate() {
                let psi = block_diag(
                    field,
                    &d.objects
                        .iter()
                        .map(|o| o.links[l][gi][di].clone())
                        .collect::<Vec<_>>(),
                )?;
                let src_basis = stack_leg_comps(field, &level_limits[l], &g.target);
                let tgt_basis = stack_leg_comps(field, &level_limits[l + 1], &dd.source);
                let rhs = psi.mul(&src_basis)?;
                per_upper.push(express_in_basis(
                    &tgt_basis,
                    &rhs,
                    &format!("limit link at (`{}`, `{}`)", g.label, dd.label),
                )?);
            }
            per_lower.push(per_upper);
        }
        links.push(per_lower);
    }
    let apex = NRepresentation::new(comps, links)?;
    let mut projections = Vec::with_capacity(d.objects.len());
    for (j, o) in d.objects.iter().enumerate() {
        let comp_morphisms = level_limits
            .iter()
            .map(|lim| lim.projections[j].clone())
            .collect();
        projections.push(NRepMorphism::new(apex.clone(), o.clone(), comp_morphisms)?);
    }
    Ok(NRepLimit { apex, projections })
}

/// The apex basis at one vertex as columns inside the product space:
/// projection components stacked over the diagram objects.
fn stack_leg_comps(field: FieldSpec, lim: &RepLimit, vertex: &str) -> ExactMatrix {
    let total: usize = lim
        .projections
        .iter()
        .map(|p| p.target.dim_at(vertex))
        .sum();
    let mut out = ExactMatrix::zeros(field, total, lim.apex.dim_at(vertex));
    let mut off = 0;
    for p in &lim.projections {
        let m = p.comp_at(vertex);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(off + r, c, m.get(r, c).clone());
            }
        }
        off += m.rows();
    }
    out
}

/// The nadir quotient map at one vertex out of the coproduct: injection
/// components laid side by side.
fn stack_inj_comps(field: FieldSpec, colim: &RepColimit, vertex: &str) -> ExactMatrix {
    let total: usize = colim
        .injections
        .iter()
        .map(|f| f.source.dim_at(vertex))
        .sum();
    let mut out = ExactMatrix::zeros(field, colim.nadir.dim_at(vertex), total);
    let mut off = 0;
    for f in &colim.injections {
        let m = f.comp_at(vertex);
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                out.set(r, off + c, m.get(r, c).clone());
            }
        }
        off += m.cols();
    }
    out
}

pub fn nrep_colimit(d: &NRepDiagram) -> Result<NRepColimit, LimitError> {
    let n = d.objects[0].level_count();
    let field = d.objects[0].field();
    let mut level_colimits = Vec::with_capacity(n);
    for m in 0..n {
        level_colimits.push(rep_colimit(&level_diagram(d, m)?)?);
    }
    let comps: Vec<Representation> = level_colimits.iter().map(|c| c.nadir.clone()).collect();
    let mut links = Vec::with_capacity(n - 1);
    for l in 0..n - 1 {
        let lo_q = &d.objects[0].quivers[l];
        let hi_q = &d.objects[0].quivers[l + 1];
        let mut per_lower = Vec::new();
        for (gi, g) in lo_q.arrows.iter().enumerate() {
            let mut per_upper = Vec::new();
            for (di, dd) in hi_q.arrows.iter().enumerate() {
                let psi = block_diag(
                    field,
                    &d.objects
                        .iter()
                        .map(|o| o.links[l][gi][di].clone())
                        .collect::<Vec<_>>(),
                )?;
                let src_quot = stack_inj_comps(field, &level_colimits[l], &g.target);
                let tgt_quot = stack_inj_comps(field, &level_colimits[l + 1], &dd.source);
                // Induced map on quotients: solve X . src_quot = tgt_quot . psi;
                // solvable exactly when psi respects the relations.
                let rhs = tgt_quot.mul(&psi)?;
                let sol = express_in_basis(
                    &src_quot.transpose(),
                    &rhs.transpose(),
                    &format!("colimit link at (`{}`, `{}`)", g.label, dd.label),
                )?;
                per_upper.push(sol.transpose());
            }
            per_lower.push(per_upper);
        }
        links.push(per_lower);
    }
    let nadir = NRepresentation::new(comps, links)?;
    let mut injections = Vec::with_capacity(d.objects.len());
    for (j, o) in d.objects.iter().enumerate() {
        let comp_morphisms = level_colimits
            .iter()
            .map(|c| c.injections[j].clone())
            .collect();
        injections.push(NRepMorphism::new(o.clone(), nadir.clone(), comp_morphisms)?);
    }
    Ok(NRepColimit { nadir, injections })
}

pub fn nrep_mediate_to_limit(
    lim: &NRepLimit,
    cone: &[NRepMorphism],
) -> Result<NRepMorphism, LimitError> {
    if cone.is_empty() || cone.len() != lim.projections.len() {
        return Err(LimitError::InvalidDiagram("cone leg count".into()));
    }
    let n = lim.apex.level_count();
    let mut comp_morphisms = Vec::with_capacity(n);
    for m in 0..n {
        let level_lim = RepLimit {
            apex: lim.apex.comps[m].clone(),
            projections: lim
                .projections
                .iter()
                .map(|p| p.comp_morphisms[m].clone())
                .collect(),
        };
        let legs: Vec<RepMorphism> = cone.iter().map(|c| c.comp_morphisms[m].clone()).collect();
        comp_morphisms.push(rep_mediate_to_limit(&level_lim, &legs)?);
    }
    Ok(NRepMorphism::new(
        cone[0].source.clone(),
        lim.apex.clone(),
        comp_morphisms,
    )?)
}

pub fn nrep_mediate_from_colimit(
    colim: &NRepColimit,
    cocone: &[NRepMorphism],
) -> Result<NRepMorphism, LimitError> {
    if cocone.is_empty() || cocone.len() != colim.injections.len() {
        return Err(LimitError::InvalidDiagram("cocone leg count".into()));
    }
    let n = colim.nadir.level_count();
    let mut comp_morphisms = Vec::with_capacity(n);
    for m in 0..n {
        let level_colim = RepColimit {
            nadir: colim.nadir.comps[m].clone(),
            injections: colim
                .injections
                .iter()
                .map(|f| f.comp_morphisms[m].clone())
                .collect(),
        };
        let legs: Vec<RepMorphism> = cocone.iter().map(|c| c.comp_morphisms[m].clone()).collect();
        comp_morphisms.push(rep_mediate_from_colimit(&level_colim, &legs)?);
    }
    Ok(NRepMorphism::new(
        colim.nadir.clone(),
        cocone[0].target.clone(),
        comp_morphisms,
    )?)
}

/// The two-parallel-arrow shape used for (co)equalizer specializations.
fn parallel_pair_shape() -> Arc<Quiver> {
    Arc::new(
        Quiver::new(
            "par2",
            vec!["A".into(), "B".into()],
            vec![
                crate::quiver::Arrow {
                    label: "u".into(),
                    source: "A".into(),
                    target: "B".into(),
                },
                crate::quiver::Arrow {
                    label: "w".into(),
                    source: "A".into(),
                    target: "B".into(),
                },
            ],
        )
        .unwrap(),
    )
}

/// Kernel as the equalizer of `(f, 0)`; returns the kernel object and its
/// verified inclusion.
pub fn kernel_nrep(f: &NRepMorphism) -> Result<(NRepresentation, NRepMorphism), LimitError> {
    let d = NRepDiagram::new(
        parallel_pair_shape(),
        vec![f.source.clone(), f.target.clone()],
        vec![f.clone(), NRepMorphism::zero(&f.source, &f.target)?],
    )?;
    let lim = nrep_limit(&d)?;
    Ok((lim.apex.clone(), lim.projections[0].clone()))
}

/// Cokernel as the coequalizer of `(f, 0)`; returns the cokernel object and
/// its verified projection.
pub fn cokernel_nrep(f: &NRepMorphism) -> Result<(NRepresentation, NRepMorphism), LimitError> {
    let d = NRepDiagram::new(
        parallel_pair_shape(),
        vec![f.source.clone(), f.target.clone()],
        vec![f.clone(), NRepMorphism::zero(&f.source, &f.target)?],
    )?;
    let colim = nrep_colimit(&d)?;
    Ok((colim.nadir.clone(), colim.injections[1].clone()))
}

/// Image = kernel of the cokernel projection, with its inclusion into the
/// target.
pub fn image_nrep(f: &NRepMorphism) -> Result<(NRepresentation, NRepMorphism), LimitError> {
    let (_, proj) = cokernel_nrep(f)?;
    kernel_nrep(&proj)
}

/// Coimage = cokernel of the kernel inclusion, with the projection from the
/// source.
pub fn coimage_nrep(f: &NRepMorphism) -> Result<(NRepresentation, NRepMorphism), LimitError> {
    let (_, incl) = kernel_nrep(f)?;
    cokernel_nrep(&incl)
}

/// The canonical comparison `coim(f) -> im(f)` with `incl . cmp . proj = f`,
/// verified to be an isomorphism: the executable abelianness witness.
pub fn image_coimage_comparison(f: &NRepMorphism) -> Result<NRepMorphism, LimitError> {
    let (im, incl) = image_nrep(f)?;
    let (coim, proj) = coimage_nrep(f)?;
    let n = f.source.level_count();
    let mut comp_morphisms = Vec::with_capacity(n);
    for m in 0..n {
        let quiver = f.source.quivers[m].clone();
        let mut comps = Vec::new();
        for v in &quiver.vertices {
            // f factors through the coimage: f = fbar . proj, so
            // fbar = f . section(proj); then solve incl . cmp = fbar.
            let proj_m = proj.comp_morphisms[m].comp_at(v);
            let sec = express_in_basis(
                proj_m,
                &ExactMatrix::identity(f.source.field(), proj_m.rows()),
                "coimage section",
            )?;
            let fbar = f.comp_morphisms[m].comp_at(v).mul(&sec)?;
            comps.push(express_in_basis(
                incl.comp_morphisms[m].comp_at(v),
                &fbar,
                "image-coimage comparison",
            )?);
        }
        comp_morphisms.push(RepMorphism::new(
            coim.comps[m].clone(),
            im.comps[m].clone(),
            comps,
        )?);
    }
    let cmp = NRepMorphism::new(coim, im, comp_morphisms)?;
    if !cmp.is_iso() {
        return Err(LimitError::NotSolvable(
            "image-coimage comparison is not invertible".into(),
        ));
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nquiver::build_nquiver;
    use crate::quiver::Arrow;
    use crate::rep::hom_space;

    const Q: FieldSpec = FieldSpec::Rationals;

    fn arrow(label: &str, s: &str, t: &str) -> Arrow {
        Arrow {
            label: label.into(),
            source: s.into(),
            target: t.into(),
        }
    }

    fn q_line() -> Arc<Quiver> {
        Arc::new(
            Quiver::new(
                "Q",
                vec!["1".into(), "2".into()],
                vec![arrow("a", "1", "2")],
            )
            .unwrap(),
        )
    }

    fn q_star() -> Arc<Quiver> {
        Arc::new(
            Quiver::new(
                "Qp",
                vec!["1".into(), "2".into(), "3".into(), "4".into()],
                vec![
                    arrow("b1", "1", "3"),
                    arrow("b2", "2", "3"),
                    arrow("b3", "4", "3"),
                ],
            )
            .unwrap(),
        )
    }

    fn birep(psi: &[i64; 3]) -> NRepresentation {
        let line = Representation::new(
            q_line(),
            Q,
            vec![1, 1],
            vec![ExactMatrix::from_i64(Q, &[&[1]])],
        )
        .unwrap();
        let star = Representation::new(
            q_star(),
            Q,
            vec![1, 1, 2, 1],
            vec![
                ExactMatrix::from_i64(Q, &[&[1], &[0]]),
                ExactMatrix::from_i64(Q, &[&[0], &[1]]),
                ExactMatrix::from_i64(Q, &[&[1], &[1]]),
            ],
        )
        .unwrap();
        let links = vec![vec![psi
            .iter()
            .map(|&v| ExactMatrix::from_i64(Q, &[&[v]]))
            .collect()]];
        NRepresentation::new(vec![line, star], links).unwrap()
    }

    fn m_bar() -> NRepresentation {
        birep(&[1, 1, 1])
    }

    fn n_bar() -> NRepresentation {
        birep(&[1, 0, 0])
    }

    fn one_object_shape() -> Arc<Quiver> {
        Arc::new(Quiver::new("pt", vec!["X".into()], vec![]).unwrap())
    }

    fn two_object_shape() -> Arc<Quiver> {
        Arc::new(Quiver::new("pts", vec!["X".into(), "Y".into()], vec![]).unwrap())
    }

    #[test]
    fn limit_of_one_object_diagram() {
        let m = m_bar();
        let d = NRepDiagram::new(one_object_shape(), vec![m.clone()], vec![]).unwrap();
        let lim = nrep_limit(&d).unwrap();
        for (a, b) in lim.apex.comps.iter().zip(&m.comps) {
            assert_eq!(a.dims, b.dims);
        }
        assert!(lim.projections[0].is_iso());
    }

    #[test]
    fn limit_of_discrete_pair_is_biproduct() {
        let m = m_bar();
        let n = n_bar();
        let d = NRepDiagram::new(two_object_shape(), vec![m.clone(), n.clone()], vec![]).unwrap();
        let lim = nrep_limit(&d).unwrap();
        for (i, a) in lim.apex.comps.iter().enumerate() {
            let want: Vec<usize> = m.comps[i]
                .dims
                .iter()
                .zip(&n.comps[i].dims)
                .map(|(x, y)| x + y)
                .collect();
            assert_eq!(a.dims, want);
        }
        let colim = nrep_colimit(&d).unwrap();
        assert_eq!(colim.nadir.total_dim(), lim.apex.total_dim());
    }

    /// Morphisms with interesting kernels/cokernels: hom(M, N) vanishes for
    /// the worked pair, so use the biproduct structure maps.
    fn sample_morphisms() -> Vec<NRepMorphism> {
        let ds = crate::nrep::nrep_direct_sum(&m_bar(), &n_bar()).unwrap();
        vec![
            ds.proj_left.clone(),
            ds.inj_right.clone(),
            NRepMorphism::zero(&m_bar(), &n_bar()).unwrap(),
            NRepMorphism::identity(&m_bar()),
        ]
    }

    #[test]
    fn equalizer_of_f_and_zero_is_kernel() {
        for f in sample_morphisms() {
            let (k, incl) = kernel_nrep(&f).unwrap();
            for (lvl, (kc, mc)) in k.comps.iter().zip(&f.source.comps).enumerate() {
                for (i, kd) in kc.dims.iter().enumerate() {
                    let rank = f.comp_morphisms[lvl].comps[i].rank();
                    assert_eq!(*kd, mc.dims[i] - rank);
                }
            }
            // Inclusion composed into f is zero.
            assert!(f.compose_after(&incl).unwrap().is_zero_morphism());
        }
    }

    #[test]
    fn coequalizer_of_f_and_zero_is_cokernel() {
        for f in sample_morphisms() {
            let (c, proj) = cokernel_nrep(&f).unwrap();
            for (lvl, (cc, nc)) in c.comps.iter().zip(&f.target.comps).enumerate() {
                for (i, cd) in cc.dims.iter().enumerate() {
                    let rank = f.comp_morphisms[lvl].comps[i].rank();
                    assert_eq!(*cd, nc.dims[i] - rank);
                }
            }
            assert!(proj.compose_after(&f).unwrap().is_zero_morphism());
        }
    }

    #[test]
    fn kernel_and_cokernel_of_identity_vanish() {
        let m = m_bar();
        let id = NRepMorphism::identity(&m);
        let (k, _) = kernel_nrep(&id).unwrap();
        assert!(k.is_zero());
        let (c, _) = cokernel_nrep(&id).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn kernel_of_zero_morphism_is_source() {
        let m = m_bar();
        let z = NRepMorphism::zero(&m, &n_bar()).unwrap();
        let (k, incl) = kernel_nrep(&z).unwrap();
        for (a, b) in k.comps.iter().zip(&m.comps) {
            assert_eq!(a.dims, b.dims);
        }
        assert!(incl.is_iso());
    }

    #[test]
    fn pushout_of_zero_span_is_object() {
        let m = m_bar();
        let z = NRepresentation::zero(&m.quivers, Q).unwrap();
        let shape = Arc::new(
            Quiver::new(
                "span",
                vec!["C".into(), "L".into(), "R".into()],
                vec![arrow("l", "C", "L"), arrow("r", "C", "R")],
            )
            .unwrap(),
        );
        let d = NRepDiagram::new(
            shape,
            vec![z.clone(), z.clone(), m.clone()],
            vec![
                NRepMorphism::zero(&z, &z).unwrap(),
                NRepMorphism::zero(&z, &m).unwrap(),
            ],
        )
        .unwrap();
        let colim = nrep_colimit(&d).unwrap();
        for (a, b) in colim.nadir.comps.iter().zip(&m.comps) {
            assert_eq!(a.dims, b.dims);
        }
        assert!(colim.injections[2].is_iso());
    }

    #[test]
    fn comparison_is_iso_for_sample_morphisms() {
        for f in sample_morphisms() {
            let cmp = image_coimage_comparison(&f).unwrap();
            assert!(cmp.is_iso());
            let (im, _) = image_nrep(&f).unwrap();
            for (lvl, ic) in im.comps.iter().enumerate() {
                for (i, id) in ic.dims.iter().enumerate() {
                    assert_eq!(*id, f.comp_morphisms[lvl].comps[i].rank());
                }
            }
        }
    }

    #[test]
    fn mediating_morphism_into_limit() {
        // Cone over the discrete pair {M, N} from tip M with legs (id, f).
        let m = m_bar();
        let n = n_bar();
        let d = NRepDiagram::new(two_object_shape(), vec![m.clone(), n.clone()], vec![]).unwrap();
        let lim = nrep_limit(&d).unwrap();
        let f = NRepMorphism::zero(&m, &n).unwrap();
        let u = nrep_mediate_to_limit(&lim, &[NRepMorphism::identity(&m), f.clone()]).unwrap();
        assert_eq!(
            lim.projections[0].compose_after(&u).unwrap(),
            NRepMorphism::identity(&m)
        );
        assert_eq!(lim.projections[1].compose_after(&u).unwrap(), f);
    }

    #[test]
    fn mediating_morphism_from_colimit() {
        let m = m_bar();
        let n = n_bar();
        let d = NRepDiagram::new(two_object_shape(), vec![m.clone(), n.clone()], vec![]).unwrap();
        let colim = nrep_colimit(&d).unwrap();
        let f = NRepMorphism::zero(&n, &m).unwrap();
        let u =
            nrep_mediate_from_colimit(&colim, &[NRepMorphism::identity(&m), f.clone()]).unwrap();
        assert_eq!(
            u.compose_after(&colim.injections[0]).unwrap(),
            NRepMorphism::identity(&m)
        );
        assert_eq!(u.compose_after(&colim.injections[1]).unwrap(), f);
    }

    #[test]
    fn glue_route_agrees_with_direct_route() {
        // The central oracle: computing the limit of the glued diagram over
        // the glued quiver gives the same dimensions, and the glued direct
        // apex is isomorphic to it.
        let m = m_bar();
        let nq = build_nquiver(&m.quivers).unwrap();
        let ds = crate::nrep::nrep_direct_sum(&m, &n_bar()).unwrap();
        let f = ds.proj_left;
        let z = NRepMorphism::zero(&ds.sum, &m).unwrap();
        let shape = Arc::new(
            Quiver::new(
                "par",
                vec!["A".into(), "B".into()],
                vec![arrow("u", "A", "B"), arrow("w", "A", "B")],
            )
            .unwrap(),
        );
        let d = NRepDiagram::new(
            shape.clone(),
            vec![ds.sum.clone(), m.clone()],
            vec![f.clone(), z.clone()],
        )
        .unwrap();
        let direct = nrep_limit(&d).unwrap();

        let gd = RepDiagram::new(
            shape,
            vec![nq.glue(&ds.sum).unwrap(), nq.glue(&m).unwrap()],
            vec![nq.glue_morphism(&f).unwrap(), nq.glue_morphism(&z).unwrap()],
        )
        .unwrap();
        let glued = rep_limit(&gd).unwrap();
        let direct_glued = nq.glue(&direct.apex).unwrap();
        assert_eq!(direct_glued.dims, glued.apex.dims);
        let homs = hom_space(&direct_glued, &glued.apex).unwrap();
        assert!(homs.iter().any(|h| h.is_iso()));
    }

    #[test]
    fn rep_level_limit_and_colimit() {
        let line = Representation::new(
            q_line(),
            Q,
            vec![2, 1],
            vec![ExactMatrix::from_i64(Q, &[&[1, 0]])],
        )
        .unwrap();
        let d =
            RepDiagram::new(two_object_shape(), vec![line.clone(), line.clone()], vec![]).unwrap();
        let lim = rep_limit(&d).unwrap();
        assert_eq!(lim.apex.dims, vec![4, 2]);
        let colim = rep_colimit(&d).unwrap();
        assert_eq!(colim.nadir.dims, vec![4, 2]);
        let u = rep_mediate_to_limit(
            &lim,
            &[RepMorphism::identity(&line), RepMorphism::identity(&line)],
        )
        .unwrap();
        assert_eq!(
            lim.projections[0].compose_after(&u).unwrap(),
            RepMorphism::identity(&line)
        );
    }

    #[test]
    fn invalid_diagrams_rejected() {
        let m = m_bar();
        assert!(matches!(
            NRepDiagram::new(one_object_shape(), vec![], vec![]),
            Err(LimitError::InvalidDiagram(_))
        ));
        let shape = Arc::new(
            Quiver::new(
                "e",
                vec!["X".into(), "Y".into()],
                vec![arrow("f", "X", "Y")],
            )
            .unwrap(),
        );
        // Edge morphism endpoints that do not match the objects.
        let bad = NRepDiagram::new(
            shape,
            vec![m.clone(), m.clone()],
            vec![NRepMorphism::zero(&m, &n_bar()).unwrap()],
        );
        assert!(matches!(bad, Err(LimitError::InvalidDiagram(_))));
    }

    #[test]
    fn limit_dims_bounded_by_sum() {
        let m = m_bar();
        let ds = crate::nrep::nrep_direct_sum(&m, &n_bar()).unwrap();
        let shape = Arc::new(
            Quiver::new(
                "e",
                vec!["X".into(), "Y".into()],
                vec![arrow("f", "X", "Y")],
            )
            .unwrap(),
        );
        let d = NRepDiagram::new(
            shape,
            vec![ds.sum.clone(), m.clone()],
            vec![ds.proj_left.clone()],
        )
        .unwrap();
        let lim = nrep_limit(&d).unwrap();
        assert!(lim.apex.total_dim() <= ds.sum.total_dim() + m.total_dim());
        // A single-edge diagram's limit is the source object.
        assert_eq!(lim.apex.total_dim(), ds.sum.total_dim());
    }
}
