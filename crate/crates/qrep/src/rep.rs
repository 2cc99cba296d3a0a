//! Representations of a single quiver: morphisms with commuting-square
//! verification, direct sums, pointwise tensor, kernels/cokernels, hom
//! spaces, and Fitting splits.

use crate::exactlin::{block_diag, quotient_projection, ExactMatrix, FieldSpec, LinError, Scalar};
use crate::quiver::Quiver;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

/// Bit budget per matrix entry when iterating endomorphisms over the
/// rationals. Exceeding it aborts rather than silently degrading.
pub const ENTRY_BIT_BUDGET: u64 = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("arrow `{arrow}`: expected a {expected_rows}x{expected_cols} matrix, found {found_rows}x{found_cols}")]
    ShapeMismatch {
        arrow: String,
        expected_rows: usize,
        expected_cols: usize,
        found_rows: usize,
        found_cols: usize,
    },
    #[error("square at arrow `{arrow}` does not commute")]
    NotCommuting {
        arrow: String,
        lhs: ExactMatrix,
        rhs: ExactMatrix,
    },
    #[error("representations are over different quivers (`{0}` vs `{1}`)")]
    QuiverMismatch(String, String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("morphism endpoints do not match for composition")]
    SourceTargetMismatch,
    #[error("the zero representation cannot be split")]
    ZeroRepresentation,
    #[error(transparent)]
    Lin(#[from] LinError),
}

/// Per-vertex dimensions plus one exact matrix per arrow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pub quiver: Arc<Quiver>,
    pub field: FieldSpec,
    /// Dimension at each vertex, in vertex declaration order.
    pub dims: Vec<usize>,
    /// One matrix per arrow, in arrow declaration order; shape
    /// `dims[t(a)] x dims[s(a)]`.
    pub mats: Vec<ExactMatrix>,
}

impl Representation {
    pub fn new(
        quiver: Arc<Quiver>,
        field: FieldSpec,
        dims: Vec<usize>,
        mats: Vec<ExactMatrix>,
    ) -> Result<Representation, RepError> {
        assert_eq!(dims.len(), quiver.vertex_count());
        assert_eq!(mats.len(), quiver.arrow_count());
        for (a, m) in quiver.arrows.iter().zip(&mats) {
            let er = dims[quiver.vertex_index(&a.target).unwrap()];
            let ec = dims[quiver.vertex_index(&a.source).unwrap()];
            if m.rows() != er || m.cols() != ec {
                return Err(RepError::ShapeMismatch {
                    arrow: a.label.clone(),
                    expected_rows: er,
                    expected_cols: ec,
                    found_rows: m.rows(),
                    found_cols: m.cols(),
                });
            }
            if m.field() != field {
                return Err(RepError::FieldMismatch(field, m.field()));
            }
        }
        Ok(Representation {
            quiver,
            field,
            dims,
            mats,
        })
    }

    pub fn zero(quiver: Arc<Quiver>, field: FieldSpec) -> Representation {
        let dims = vec![0; quiver.vertex_count()];
        let mats = quiver
            .arrows
            .iter()
            .map(|_| ExactMatrix::zeros(field, 0, 0))
            .collect();
        Representation::new(quiver, field, dims, mats).unwrap()
    }

    /// The tensor unit: `k` at every vertex, identity on every arrow.
    pub fn unit(quiver: Arc<Quiver>, field: FieldSpec) -> Representation {
        let dims = vec![1; quiver.vertex_count()];
        let mats = quiver
            .arrows
            .iter()
            .map(|_| ExactMatrix::identity(field, 1))
            .collect();
        Representation::new(quiver, field, dims, mats).unwrap()
    }

    pub fn dim_at(&self, vertex: &str) -> usize {
        self.dims[self.quiver.vertex_index(vertex).unwrap()]
    }

    pub fn mat(&self, arrow: &str) -> &ExactMatrix {
        &self.mats[self.quiver.arrow_index(arrow).unwrap()]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub(crate) fn check_compatible(&self, other: &Representation) -> Result<(), RepError> {
        if self.quiver != other.quiver {
            return Err(RepError::QuiverMismatch(
                self.quiver.name.clone(),
                other.quiver.name.clone(),
            ));
        }
        if self.field != other.field {
            return Err(RepError::FieldMismatch(self.field, other.field));
        }
        Ok(())
    }
}

/// A verified morphism of representations: one matrix per vertex, all
/// commuting squares checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepMorphism {
    pub source: Representation,
    pub target: Representation,
    pub comps: Vec<ExactMatrix>,
}

impl RepMorphism {
    pub fn new(
        source: Representation,
        target: Representation,
        comps: Vec<ExactMatrix>,
    ) -> Result<RepMorphism, RepError> {
        source.check_compatible(&target)?;
        let q = &source.quiver;
        assert_eq!(comps.len(), q.vertex_count());
        for (i, m) in comps.iter().enumerate() {
            if m.rows() != target.dims[i] || m.cols() != source.dims[i] {
                return Err(RepError::ShapeMismatch {
                    arrow: format!("vertex {}", q.vertices[i]),
                    expected_rows: target.dims[i],
                    expected_cols: source.dims[i],
                    found_rows: m.rows(),
                    found_cols: m.cols(),
                });
            }
        }
        for a in &q.arrows {
            let s = q.vertex_index(&a.source).unwrap();
            let t = q.vertex_index(&a.target).unwrap();
            let lhs = comps[t].mul(source.mat(&a.label))?;
            let rhs = target.mat(&a.label).mul(&comps[s])?;
            if lhs != rhs {
                return Err(RepError::NotCommuting {
                    arrow: a.label.clone(),
                    lhs,
                    rhs,
                });
            }
        }
        Ok(RepMorphism {
            source,
            target,
            comps,
        })
    }

    pub fn identity(rep: &Representation) -> RepMorphism {
        let comps = rep
            .dims
            .iter()
            .map(|&d| ExactMatrix::identity(rep.field, d))
            .collect();
        RepMorphism::new(rep.clone(), rep.clone(), comps).unwrap()
    }

    pub fn zero(source: &Representation, target: &Representation) -> Result<RepMorphism, RepError> {
        source.check_compatible(target)?;
        let comps = (0..source.dims.len())
            .map(|i| ExactMatrix::zeros(source.field, target.dims[i], source.dims[i]))
            .collect();
        RepMorphism::new(source.clone(), target.clone(), comps)
    }

    pub fn comp_at(&self, vertex: &str) -> &ExactMatrix {
        &self.comps[self.source.quiver.vertex_index(vertex).unwrap()]
    }

    /// Composition `g . f` (this applied after `f`).
    pub fn compose_after(&self, f: &RepMorphism) -> Result<RepMorphism, RepError> {
        if f.target != self.source {
            return Err(RepError::SourceTargetMismatch);
        }
        let comps = self
            .comps
            .iter()
            .zip(&f.comps)
            .map(|(g, f)| g.mul(f))
            .collect::<Result<_, _>>()?;
        RepMorphism::new(f.source.clone(), self.target.clone(), comps)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(|m| m.is_invertible())
    }

    pub fn is_zero_morphism(&self) -> bool {
        self.comps.iter().all(|m| m.is_zero())
    }
}

/// A direct sum with its canonical biproduct structure.
pub struct RepDirectSum {
    pub sum: Representation,
    pub inj_left: RepMorphism,
    pub inj_right: RepMorphism,
    pub proj_left: RepMorphism,
    pub proj_right: RepMorphism,
}

/// Direct sum with block-diagonal arrow matrices.
pub fn direct_sum(a: &Representation, b: &Representation) -> Result<RepDirectSum, RepError> {
    a.check_compatible(b)?;
    let f = a.field;
    let dims: Vec<usize> = a.dims.iter().zip(&b.dims).map(|(x, y)| x + y).collect();
    let mats = a
        .mats
        .iter()
        .zip(&b.mats)
        .map(|(x, y)| block_diag(f, &[x.clone(), y.clone()]))
        .collect::<Result<Vec<_>, _>>()?;
    let sum = Representation::new(a.quiver.clone(), f, dims, mats)?;

    let n = a.dims.len();
    let mut il = Vec::with_capacity(n);
    let mut ir = Vec::with_capacity(n);
    let mut pl = Vec::with_capacity(n);
    let mut pr = Vec::with_capacity(n);
    for i in 0..n {
        let (da, db) = (a.dims[i], b.dims[i]);
        let mut inj_a = ExactMatrix::zeros(f, da + db, da);
        let mut inj_b = ExactMatrix::zeros(f, da + db, db);
        for r in 0..da {
            inj_a.set(r, r, f.one());
        }
        for r in 0..db {
            inj_b.set(da + r, r, f.one());
        }
        pl.push(inj_a.transpose());
        pr.push(inj_b.transpose());
        il.push(inj_a);
        ir.push(inj_b);
    }
    Ok(RepDirectSum {
        inj_left: RepMorphism::new(a.clone(), sum.clone(), il)?,
        inj_right: RepMorphism::new(b.clone(), sum.clone(), ir)?,
        proj_left: RepMorphism::new(sum.clone(), a.clone(), pl)?,
        proj_right: RepMorphism::new(sum.clone(), b.clone(), pr)?,
        sum,
    })
}

/// Pointwise tensor: dimensions multiply, arrow matrices are Kronecker
/// products.
pub fn tensor(a: &Representation, b: &Representation) -> Result<Representation, RepError> {
    a.check_compatible(b)?;
    let dims = a.dims.iter().zip(&b.dims).map(|(x, y)| x * y).collect();
    let mats = a
        .mats
        .iter()
        .zip(&b.mats)
        .map(|(x, y)| x.kron(y))
        .collect::<Result<_, _>>()?;
    Representation::new(a.quiver.clone(), a.field, dims, mats)
}

/// Tensor of morphisms, componentwise Kronecker.
pub fn tensor_morphism(f: &RepMorphism, g: &RepMorphism) -> Result<RepMorphism, RepError> {
    let source = tensor(&f.source, &g.source)?;
    let target = tensor(&f.target, &g.target)?;
    let comps = f
        .comps
        .iter()
        .zip(&g.comps)
        .map(|(x, y)| x.kron(y))
        .collect::<Result<_, _>>()?;
    RepMorphism::new(source, target, comps)
}

/// Kernel subrepresentation with its verified inclusion.
///
/// Vertex spaces are the deterministic null-space bases; induced arrow maps
/// are the unique solutions of the restriction equations.
pub fn kernel(f: &RepMorphism) -> Result<(Representation, RepMorphism), RepError> {
    let field = f.source.field;
    let q = f.source.quiver.clone();
    let bases: Vec<ExactMatrix> = f.comps.iter().map(|m| m.rank_and_kernel().kernel).collect();
    let dims: Vec<usize> = bases.iter().map(|k| k.cols()).collect();
    let mut mats = Vec::with_capacity(q.arrow_count());
    for a in &q.arrows {
        let s = q.vertex_index(&a.source).unwrap();
        let t = q.vertex_index(&a.target).unwrap();
        let rhs = f.source.mat(&a.label).mul(&bases[s])?;
        let induced = bases[t]
            .solve_matrix(&rhs)?
            .expect("kernel is arrow-stable");
        mats.push(induced);
    }
    let ker = Representation::new(q, field, dims, mats)?;
    let incl = RepMorphism::new(ker.clone(), f.source.clone(), bases)?;
    Ok((ker, incl))
}

/// Cokernel quotient with its verified projection, using the deterministic
/// complement selection from `exactlin`.
pub fn cokernel(f: &RepMorphism) -> Result<(Representation, RepMorphism), RepError> {
    let field = f.target.field;
    let q = f.target.quiver.clone();
    let mut projs = Vec::new();
    let mut sections = Vec::new();
    for m in &f.comps {
        let (p, s, _) = quotient_projection(m)?;
        projs.push(p);
        sections.push(s);
    }
    let dims: Vec<usize> = projs.iter().map(|p| p.rows()).collect();
    let mut mats = Vec::with_capacity(q.arrow_count());
    for a in &q.arrows {
        let s = q.vertex_index(&a.source).unwrap();
        let t = q.vertex_index(&a.target).unwrap();
        // Induced map on the quotient: project after mapping a section.
        let induced = projs[t].mul(&f.target.mat(&a.label).mul(&sections[s])?)?;
        mats.push(induced);
    }
    let coker = Representation::new(q, field, dims, mats)?;
    let proj = RepMorphism::new(f.target.clone(), coker.clone(), projs)?;
    Ok((coker, proj))
}

/// Image subrepresentation of the target, with inclusion, computed as the
/// kernel of the cokernel projection.
pub fn image(f: &RepMorphism) -> Result<(Representation, RepMorphism), RepError> {
    let (_, proj) = cokernel(f)?;
    kernel(&proj)
}

/// Basis of the solution space of all commuting-square equations; every
/// element is a verified morphism.
pub fn hom_space(a: &Representation, b: &Representation) -> Result<Vec<RepMorphism>, RepError> {
    a.check_compatible(b)?;
    let f = a.field;
    let q = &a.quiver;
    let n = q.vertex_count();
    // Unknowns: the entries of every component matrix, row-major, vertex by
    // vertex in declaration order.
    let offsets: Vec<usize> = {
        let mut acc = 0;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            out.push(acc);
            acc += b.dims[i] * a.dims[i];
        }
        out.push(acc);
        out
    };
    let unknowns = offsets[n];
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for arrow in &q.arrows {
        let s = q.vertex_index(&arrow.source).unwrap();
        let t = q.vertex_index(&arrow.target).unwrap();
        let am = a.mat(&arrow.label);
        let bm = b.mat(&arrow.label);
        // Equation block: comps[t] * a.mats - b.mats * comps[s] = 0, one
        // scalar equation per (target row, source column).
        for r in 0..b.dims[t] {
            for c in 0..a.dims[s] {
                let mut row = vec![f.zero(); unknowns];
                for k in 0..a.dims[t] {
                    let idx = offsets[t] + r * a.dims[t] + k;
                    row[idx] = f.add(&row[idx], am.get(k, c));
                }
                for k in 0..b.dims[s] {
                    let idx = offsets[s] + k * a.dims[s] + c;
                    row[idx] = f.sub(&row[idx], bm.get(r, k));
                }
                rows.push(row);
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
        let mut comps = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = ExactMatrix::zeros(f, b.dims[i], a.dims[i]);
            for r in 0..b.dims[i] {
                for c in 0..a.dims[i] {
                    m.set(r, c, v[offsets[i] + r * a.dims[i] + c].clone());
                }
            }
            comps.push(m);
        }
        out.push(RepMorphism::new(a.clone(), b.clone(), comps)?);
    }
    Ok(out)
}

/// A successful Fitting decomposition: `part_a (+) part_b ~= original` via a
/// verified isomorphism from the direct sum.
#[derive(Debug, Clone)]
pub struct FittingSplit {
    pub part_a: Representation,
    pub part_b: Representation,
    pub iso: RepMorphism,
    pub trial: usize,
}

#[derive(Debug, Clone)]
pub enum FittingOutcome {
    Split(FittingSplit),
    /// No splitting endomorphism found; the representation may still be
    /// decomposable (the search is probabilistic).
    ProbablyIndecomposable {
        trials: usize,
    },
}

/// Random-endomorphism splitting via `V = ker(f^N) (+) im(f^N)`.
/// Deterministic for a fixed seed.
pub fn fitting_split(
    r: &Representation,
    trials: usize,
    seed: u64,
) -> Result<FittingOutcome, RepError> {
    if r.is_zero() {
        return Err(RepError::ZeroRepresentation);
    }
    let endos = hom_space(r, r)?;
    if endos.len() <= 1 {
        // End(r) is spanned by the identity: a brick, hence indecomposable.
        return Ok(FittingOutcome::ProbablyIndecomposable { trials: 0 });
    }
    let field = r.field;
    let total = r.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        // Random small-integer combination of the endomorphism basis.
        let coeffs: Vec<Scalar> = (0..endos.len())
            .map(|_| field.from_i64(rng.gen_range(-3..=3)))
            .collect();
        let mut comps: Vec<ExactMatrix> = r
            .dims
            .iter()
            .map(|&d| ExactMatrix::zeros(field, d, d))
            .collect();
        for (e, c) in endos.iter().zip(&coeffs) {
            for (acc, m) in comps.iter_mut().zip(&e.comps) {
                *acc = acc.add(&m.scale(c))?;
            }
        }
        // f^N per vertex, with the entry-size guard over the rationals.
        let mut powered = comps.clone();
        for _ in 1..total {
            for (p, c) in powered.iter_mut().zip(&comps) {
                *p = p.mul(c)?;
                if field == FieldSpec::Rationals && p.max_bit_size() > ENTRY_BIT_BUDGET {
                    return Err(RepError::Lin(LinError::EntryOverflowBudget));
                }
            }
        }
        let g = RepMorphism::new(r.clone(), r.clone(), powered)?;
        let ker_total: usize = g.comps.iter().map(|m| m.cols() - m.rank()).sum();
        if ker_total == 0 || ker_total == total {
            continue;
        }
        let (ka, ki) = kernel(&g)?;
        let (ia, ii) = image(&g)?;
        // [ker incl | im incl] is an isomorphism exactly when the Fitting
        // decomposition holds for this endomorphism.
        let ds = direct_sum(&ka, &ia)?;
        let mut iso_comps = Vec::with_capacity(r.dims.len());
        let mut ok = true;
        for i in 0..r.dims.len() {
            let m = ki.comps[i].hstack(&ii.comps[i])?;
            if !m.is_invertible() {
                ok = false;
            }
            iso_comps.push(m);
        }
        if !ok {
            continue;
        }
        let iso = RepMorphism::new(ds.sum.clone(), r.clone(), iso_comps)?;
        return Ok(FittingOutcome::Split(FittingSplit {
            part_a: ka,
            part_b: ia,
            iso,
            trial,
        }));
    }
    Ok(FittingOutcome::ProbablyIndecomposable { trials })
}

/// Splits recursively until every part reports probably indecomposable.
/// Parts are returned in discovery order; seeds for sub-splits are derived
/// deterministically from `seed`.
pub fn decompose_fully(
    r: &Representation,
    trials: usize,
    seed: u64,
) -> Result<Vec<Representation>, RepError> {
    if r.is_zero() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut stack = vec![(r.clone(), seed)];
    while let Some((part, s)) = stack.pop() {
        match fitting_split(&part, trials, s)? {
            FittingOutcome::Split(sp) => {
                stack.push((
                    sp.part_a,
                    s.wrapping_mul(6364136223846793005).wrapping_add(1),
                ));
                stack.push((
                    sp.part_b,
                    s.wrapping_mul(6364136223846793005).wrapping_add(2),
                ));
            }
            FittingOutcome::ProbablyIndecomposable { .. } => out.push(part),
        }
    }
    Ok(out)
}
