//! The glued quiver of a quiver tuple: disjoint union of the level quivers
//! plus one connecting arrow per consecutive arrow pair, together with the
//! gluing/decomposing equivalence between n-representations and
//! representations of the glued quiver.

use crate::exactlin::ExactMatrix;
use crate::nrep::{NRepError, NRepMorphism, NRepresentation};
use crate::quiver::{Arrow, Quiver, QuiverError};
use crate::rep::{RepError, RepMorphism, Representation};
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NQuiverError {
    #[error("an n-quiver needs at least 2 levels, got {0}")]
    LevelCountTooSmall(usize),
    #[error("n-representation is over a different quiver tuple")]
    TupleMismatch,
    #[error("representation is not over this glued quiver")]
    QuiverMismatch,
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    NRep(#[from] NRepError),
}

/// Where a glued vertex or arrow came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArrowOrigin {
    /// An arrow copied from level `level` (1-based).
    Level { level: usize, label: String },
    /// A connecting arrow at level `level` (in `2..=n`) for the pair
    /// (`lower` in level-1, `upper` in level).
    Connecting {
        level: usize,
        lower: String,
        upper: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexOrigin {
    pub level: usize,
    pub vertex: String,
}

/// The glued quiver plus reversible bookkeeping back to the levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NQuiver {
    pub base: Arc<Quiver>,
    pub levels: Vec<Arc<Quiver>>,
    /// Origin of each base vertex, in base declaration order.
    pub vertex_origin: Vec<VertexOrigin>,
    /// Origin of each base arrow, in base declaration order.
    pub arrow_origin: Vec<ArrowOrigin>,
}

fn glued_vertex(level: usize, v: &str) -> String {
    format!("L{level}.{v}")
}

fn glued_level_arrow(level: usize, a: &str) -> String {
    format!("L{level}.{a}")
}

fn connecting_label(level: usize, lower: &str, upper: &str) -> String {
    format!("rho{level}.{lower}.{upper}")
}

/// Builds the glued quiver of a tuple. Ids are made disjoint by prefixing
/// the 1-based level; connecting arrows run from the target of the lower
/// arrow to the source of the upper arrow.
pub fn build_nquiver(levels: &[Arc<Quiver>]) -> Result<NQuiver, NQuiverError> {
    let n = levels.len();
    if n < 2 {
        return Err(NQuiverError::LevelCountTooSmall(n));
    }
    let mut vertices = Vec::new();
    let mut vertex_origin = Vec::new();
    let mut arrows = Vec::new();
    let mut arrow_origin = Vec::new();
    for (i, q) in levels.iter().enumerate() {
        let level = i + 1;
        for v in &q.vertices {
            vertices.push(glued_vertex(level, v));
            vertex_origin.push(VertexOrigin {
                level,
                vertex: v.clone(),
            });
        }
        for a in &q.arrows {
            arrows.push(Arrow {
                label: glued_level_arrow(level, &a.label),
                source: glued_vertex(level, &a.source),
                target: glued_vertex(level, &a.target),
            });
            arrow_origin.push(ArrowOrigin::Level {
                level,
                label: a.label.clone(),
            });
        }
        if i > 0 {
            for g in &levels[i - 1].arrows {
                for d in &q.arrows {
                    arrows.push(Arrow {
                        label: connecting_label(level, &g.label, &d.label),
                        source: glued_vertex(level - 1, &g.target),
                        target: glued_vertex(level, &d.source),
                    });
                    arrow_origin.push(ArrowOrigin::Connecting {
                        level,
                        lower: g.label.clone(),
                        upper: d.label.clone(),
                    });
                }
            }
        }
    }
    let name = format!(
        "NQ({})",
        levels
            .iter()
            .map(|q| q.name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    );
    let base = Arc::new(Quiver::new(&name, vertices, arrows)?);
    Ok(NQuiver {
        base,
        levels: levels.to_vec(),
        vertex_origin,
        arrow_origin,
    })
}

impl NQuiver {
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    fn check_tuple(&self, v: &NRepresentation) -> Result<(), NQuiverError> {
        if v.quivers != self.levels {
            return Err(NQuiverError::TupleMismatch);
        }
        Ok(())
    }

    /// Turns an n-representation into a representation of the glued quiver:
    /// vertex spaces and level matrices carry over, connecting arrows carry
    /// the link matrices.
    pub fn glue(&self, v: &NRepresentation) -> Result<Representation, NQuiverError> {
        self.check_tuple(v)?;
        let mut dims = Vec::with_capacity(self.base.vertex_count());
        for o in &self.vertex_origin {
            dims.push(v.comps[o.level - 1].dim_at(&o.vertex));
        }
        let mut mats = Vec::with_capacity(self.base.arrow_count());
        for o in &self.arrow_origin {
            mats.push(match o {
                ArrowOrigin::Level { level, label } => v.comps[level - 1].mat(label).clone(),
                ArrowOrigin::Connecting {
                    level,
                    lower,
                    upper,
                } => v.link(*level, lower, upper).clone(),
            });
        }
        Ok(Representation::new(
            self.base.clone(),
            v.field(),
            dims,
            mats,
        )?)
    }

    /// Inverse bookkeeping of `glue`.
    pub fn decompose(&self, r: &Representation) -> Result<NRepresentation, NQuiverError> {
        if r.quiver != self.base {
            return Err(NQuiverError::QuiverMismatch);
        }
        let mut comps = Vec::with_capacity(self.level_count());
        for (i, q) in self.levels.iter().enumerate() {
            let level = i + 1;
            let dims = q
                .vertices
                .iter()
                .map(|v| r.dim_at(&glued_vertex(level, v)))
                .collect();
            let mats = q
                .arrows
                .iter()
                .map(|a| r.mat(&glued_level_arrow(level, &a.label)).clone())
                .collect();
            comps.push(Representation::new(q.clone(), r.field, dims, mats)?);
        }
        let mut links = Vec::with_capacity(self.level_count() - 1);
        for l in 0..self.level_count() - 1 {
            let mut per_lower = Vec::new();
            for g in &self.levels[l].arrows {
                let mut per_upper = Vec::new();
                for d in &self.levels[l + 1].arrows {
                    per_upper.push(r.mat(&connecting_label(l + 2, &g.label, &d.label)).clone());
                }
                per_lower.push(per_upper);
            }
            links.push(per_lower);
        }
        Ok(NRepresentation::new(comps, links)?)
    }

    /// Transports a verified n-representation morphism to a verified
    /// morphism of glued representations.
    pub fn glue_morphism(&self, f: &NRepMorphism) -> Result<RepMorphism, NQuiverError> {
        let source = self.glue(&f.source)?;
        let target = self.glue(&f.target)?;
        let comps = self
            .vertex_origin
            .iter()
            .map(|o| f.comp_morphisms[o.level - 1].comp_at(&o.vertex).clone())
            .collect();
        Ok(RepMorphism::new(source, target, comps)?)
    }

    /// Inverse of `glue_morphism`.
    pub fn decompose_morphism(&self, f: &RepMorphism) -> Result<NRepMorphism, NQuiverError> {
        let source = self.decompose(&f.source)?;
        let target = self.decompose(&f.target)?;
        let mut comp_morphisms = Vec::with_capacity(self.level_count());
        for (i, q) in self.levels.iter().enumerate() {
            let comps: Vec<ExactMatrix> = q
                .vertices
                .iter()
                .map(|v| f.comp_at(&glued_vertex(i + 1, v)).clone())
                .collect();
            comp_morphisms.push(RepMorphism::new(
                source.comps[i].clone(),
                target.comps[i].clone(),
                comps,
            )?);
        }
        Ok(NRepMorphism::new(source, target, comp_morphisms)?)
    }

    /// Serializable origin map for every glued vertex and arrow.
    pub fn origin_map(&self) -> OriginMap {
        OriginMap {
            vertices: self
                .base
                .vertices
                .iter()
                .cloned()
                .zip(self.vertex_origin.iter().cloned())
                .collect(),
            arrows: self
                .base
                .arrows
                .iter()
                .map(|a| a.label.clone())
                .zip(self.arrow_origin.iter().cloned())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OriginMap {
    pub vertices: Vec<(String, VertexOrigin)>,
    pub arrows: Vec<(String, ArrowOrigin)>,
}

/// Block decomposition of the glued path algebra: paths staying in the first
/// n-1 levels, paths crossing a top-level connecting arrow, and paths
/// staying in the top level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockStructure {
    pub prefix_dim: usize,
    pub connecting_dim: usize,
    pub top_dim: usize,
    pub total_dim: usize,
}

pub fn block_structure(nq: &NQuiver) -> Result<BlockStructure, NQuiverError> {
    let n = nq.level_count();
    let total_dim = nq.base.path_algebra()?.dim;
    let prefix_dim = if n == 2 {
        nq.levels[0].path_algebra()?.dim
    } else {
        build_nquiver(&nq.levels[..n - 1])?.base.path_algebra()?.dim
    };
    let top_dim = nq.levels[n - 1].path_algebra()?.dim;
    // Every path either stays inside the lower glued part, stays inside the
    // top level, or crosses a top-level connecting arrow.
    let connecting_dim = total_dim - prefix_dim - top_dim;
    Ok(BlockStructure {
        prefix_dim,
        connecting_dim,
        top_dim,
        total_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::nrep::{nrep_direct_sum, nrep_hom_space};
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

    fn q_fan() -> Arc<Quiver> {
        // Two sources into a sink: path algebra dimension 7.
        Arc::new(
            Quiver::new(
                "Qpp",
                vec!["1".into(), "2".into()],
                vec![
                    arrow("c1", "1", "2"),
                    arrow("c2", "1", "2"),
                    arrow("c3", "1", "2"),
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

    #[test]
    fn two_level_build_counts() {
        let nq = build_nquiver(&[q_line(), q_fan()]).unwrap();
        assert_eq!(nq.base.vertex_count(), 4);
        // 1 level arrow + 3 connecting + 3 level arrows.
        assert_eq!(nq.base.arrow_count(), 7);
        assert!(nq.base.is_acyclic());
        let a = nq.base.arrow("rho2.a.c2").unwrap();
        assert_eq!(a.source, "L1.2");
        assert_eq!(a.target, "L2.1");
    }

    #[test]
    fn three_level_build_counts() {
        let nq = build_nquiver(&[q_star(), q_line(), q_fan()]).unwrap();
        assert_eq!(nq.base.vertex_count(), 8);
        // 3 + 3 connecting + 1 + 3 connecting + 3.
        assert_eq!(nq.base.arrow_count(), 13);
    }

    #[test]
    fn arrowless_levels_have_no_connecting_arrows() {
        let v1 = Arc::new(Quiver::new("A", vec!["x".into()], vec![]).unwrap());
        let v2 = Arc::new(Quiver::new("B", vec!["y".into()], vec![]).unwrap());
        let nq = build_nquiver(&[v1, v2]).unwrap();
        assert_eq!(nq.base.arrow_count(), 0);
        let bs = block_structure(&nq).unwrap();
        assert_eq!(bs.connecting_dim, 0);
        assert_eq!(bs.total_dim, 2);
    }

    #[test]
    fn level_count_too_small() {
        assert!(matches!(
            build_nquiver(&[q_line()]),
            Err(NQuiverError::LevelCountTooSmall(1))
        ));
    }

    #[test]
    fn block_structure_examples() {
        let nq2 = build_nquiver(&[q_line(), q_fan()]).unwrap();
        let bs2 = block_structure(&nq2).unwrap();
        assert_eq!(bs2.prefix_dim, 3);
        assert_eq!(bs2.top_dim, 5);
        assert_eq!(bs2.total_dim, 32);
        assert_eq!(bs2.connecting_dim, 24);

        let nq3 = build_nquiver(&[q_star(), q_line(), q_fan()]).unwrap();
        let bs3 = block_structure(&nq3).unwrap();
        assert_eq!(bs3.prefix_dim, 34);
        assert_eq!(bs3.top_dim, 5);
        assert_eq!(bs3.total_dim, 207);
        assert_eq!(bs3.connecting_dim, 168);
    }

    #[test]
    fn glue_reproduces_worked_chain() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let v = birep(&[1, 0, 1]);
        let g = nq.glue(&v).unwrap();
        assert_eq!(g.total_dim(), v.total_dim());
        assert_eq!(g.mat("rho2.a.b1"), &ExactMatrix::from_i64(Q, &[&[1]]));
        assert_eq!(g.mat("rho2.a.b2"), &ExactMatrix::from_i64(Q, &[&[0]]));
        assert_eq!(g.mat("rho2.a.b3"), &ExactMatrix::from_i64(Q, &[&[1]]));
        assert_eq!(g.mat("L1.a"), v.comps[0].mat("a"));
        assert_eq!(g.dim_at("L2.3"), 2);
    }

    #[test]
    fn round_trips_are_exact() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let v = birep(&[1, 1, 1]);
        let g = nq.glue(&v).unwrap();
        assert_eq!(nq.decompose(&g).unwrap(), v);
        assert_eq!(nq.glue(&nq.decompose(&g).unwrap()).unwrap(), g);

        let z = NRepresentation::zero(&nq.levels, Q).unwrap();
        assert!(nq.glue(&z).unwrap().is_zero());
    }

    #[test]
    fn glue_is_additive() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let m = birep(&[1, 1, 1]);
        let n = birep(&[1, 0, 0]);
        let sum_then_glue = nq.glue(&nrep_direct_sum(&m, &n).unwrap().sum).unwrap();
        let glue_then_sum =
            crate::rep::direct_sum(&nq.glue(&m).unwrap(), &nq.glue(&n).unwrap()).unwrap();
        assert_eq!(sum_then_glue, glue_then_sum.sum);
    }

    #[test]
    fn morphism_transport_round_trip() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let m = birep(&[1, 1, 1]);
        let n = birep(&[1, 0, 0]);
        for f in nrep_hom_space(&m, &n).unwrap() {
            let g = nq.glue_morphism(&f).unwrap();
            assert_eq!(nq.decompose_morphism(&g).unwrap(), f);
        }
    }

    #[test]
    fn hom_dimension_transport() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let m = birep(&[1, 1, 1]);
        let n = birep(&[1, 0, 0]);
        let direct = nrep_hom_space(&m, &n).unwrap().len();
        let glued = hom_space(&nq.glue(&m).unwrap(), &nq.glue(&n).unwrap())
            .unwrap()
            .len();
        assert_eq!(direct, glued);
    }

    #[test]
    fn origin_map_is_reversible() {
        let nq = build_nquiver(&[q_line(), q_star()]).unwrap();
        let om = nq.origin_map();
        assert_eq!(om.vertices.len(), 6);
        assert_eq!(om.arrows.len(), 7);
        assert_eq!(
            om.vertices[0],
            (
                "L1.1".to_string(),
                VertexOrigin {
                    level: 1,
                    vertex: "1".into()
                }
            )
        );
    }
}
