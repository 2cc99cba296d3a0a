//! Quivers, structural predicates, path enumeration, and path algebras.

use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuiverError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(String),
    #[error("arrow `{label}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { label: String, vertex: String },
    #[error("quiver has no vertices")]
    EmptyQuiver,
    #[error("quiver `{0}` has a directed cycle")]
    CyclicQuiver(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: String,
    pub target: String,
}

/// A finite directed multigraph. Vertices and arrows keep declaration order;
/// that order is the determinism anchor for everything downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    pub name: String,
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
    vertex_idx: HashMap<String, usize>,
    arrow_idx: HashMap<String, usize>,
}

impl Quiver {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        arrows: Vec<Arrow>,
    ) -> Result<Quiver, QuiverError> {
        let mut vertex_idx = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_idx.insert(v.clone(), i).is_some() {
                return Err(QuiverError::DuplicateVertex(v.clone()));
            }
        }
        let mut arrow_idx = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if arrow_idx.insert(a.label.clone(), i).is_some() {
                return Err(QuiverError::DuplicateArrow(a.label.clone()));
            }
            for v in [&a.source, &a.target] {
                if !vertex_idx.contains_key(v) {
                    return Err(QuiverError::DanglingEndpoint {
                        label: a.label.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        Ok(Quiver {
            name: name.into(),
            vertices,
            arrows,
            vertex_idx,
            arrow_idx,
        })
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_idx.get(id).copied()
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrow_idx.get(label).copied()
    }

    pub fn arrow(&self, label: &str) -> Option<&Arrow> {
        self.arrow_index(label).map(|i| &self.arrows[i])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    /// True iff the quiver has no directed cycle (trivial paths excluded).
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over vertex indices.
        let n = self.vertices.len();
        let mut indeg = vec![0usize; n];
        for a in &self.arrows {
            indeg[self.vertex_idx[&a.target]] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for a in &self.arrows {
                if self.vertex_idx[&a.source] == v {
                    let t = self.vertex_idx[&a.target];
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push(t);
                    }
                }
            }
        }
        seen == n
    }

    /// True iff the underlying undirected graph is connected.
    pub fn is_connected(&self) -> Result<bool, QuiverError> {
        let n = self.vertices.len();
        if n == 0 {
            return Err(QuiverError::EmptyQuiver);
        }
        let mut adj = vec![Vec::new(); n];
        for a in &self.arrows {
            let s = self.vertex_idx[&a.source];
            let t = self.vertex_idx[&a.target];
            adj[s].push(t);
            adj[t].push(s);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        Ok(count == n)
    }

    /// All paths, including one trivial path per vertex. Order: by length,
    /// trivial paths in vertex declaration order, longer paths sorted
    /// lexicographically on their arrow label sequence.
    pub fn enumerate_paths(&self) -> Result<Vec<Path>, QuiverError> {
        if !self.is_acyclic() {
            return Err(QuiverError::CyclicQuiver(self.name.clone()));
        }
        let mut all = Vec::new();
        let mut current: Vec<Path> = self
            .vertices
            .iter()
            .map(|v| Path {
                source: v.clone(),
                target: v.clone(),
                arrows: Vec::new(),
            })
            .collect();
        while !current.is_empty() {
            all.extend(current.iter().cloned());
            let mut next = Vec::new();
            for p in &current {
                for a in &self.arrows {
                    if a.source == p.target {
                        let mut labels = p.arrows.clone();
                        labels.push(a.label.clone());
                        next.push(Path {
                            source: p.source.clone(),
                            target: a.target.clone(),
                            arrows: labels,
                        });
                    }
                }
            }
            next.sort_by(|a, b| a.arrows.cmp(&b.arrows));
            current = next;
        }
        Ok(all)
    }

    pub fn path_algebra(&self) -> Result<PathAlgebra, QuiverError> {
        let basis = self.enumerate_paths()?;
        let dim = basis.len();
        let mut index: HashMap<(String, Vec<String>), usize> = HashMap::new();
        for (i, p) in basis.iter().enumerate() {
            index.insert((p.source.clone(), p.arrows.clone()), i);
        }
        let mut table = vec![None; dim * dim];
        for (i, p) in basis.iter().enumerate() {
            for (j, q) in basis.iter().enumerate() {
                if q.source == p.target {
                    let mut labels = p.arrows.clone();
                    labels.extend(q.arrows.iter().cloned());
                    let k = index[&(p.source.clone(), labels)];
                    table[i * dim + j] = Some(k);
                }
            }
        }
        Ok(PathAlgebra {
            quiver: self.clone(),
            basis,
            dim,
            table,
        })
    }
}

/// A composable sequence of arrows; the empty list is the trivial path at a
/// vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub source: String,
    pub target: String,
    pub arrows: Vec<String>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }
}

/// The path algebra of an acyclic quiver: basis all paths, multiplication by
/// concatenation when composable, zero otherwise. The product `c * c'` is
/// "c then c'", defined when `s(c') = t(c)`.
#[derive(Debug, Clone)]
pub struct PathAlgebra {
    pub quiver: Quiver,
    pub basis: Vec<Path>,
    pub dim: usize,
    table: Vec<Option<usize>>,
}

impl PathAlgebra {
    /// Index of the product of basis elements `i` and `j`, or `None` when the
    /// paths do not compose.
    pub fn mult(&self, i: usize, j: usize) -> Option<usize> {
        self.table[i * self.dim + j]
    }

    pub fn trivial_path_index(&self, vertex: &str) -> Option<usize> {
        self.basis
            .iter()
            .position(|p| p.is_trivial() && p.source == vertex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn arrow(label: &str, s: &str, t: &str) -> Arrow {
        Arrow {
            label: label.into(),
            source: s.into(),
            target: t.into(),
        }
    }

    fn q_two() -> Quiver {
        // The running 1 -> 2 quiver.
        Quiver::new(
            "Q",
            vec!["1".into(), "2".into()],
            vec![arrow("a", "1", "2")],
        )
        .unwrap()
    }

    fn q_parallel() -> Quiver {
        // Two vertices, three parallel arrows.
        Quiver::new(
            "Qp",
            vec!["3".into(), "4".into()],
            vec![
                arrow("b1", "3", "4"),
                arrow("b2", "3", "4"),
                arrow("b3", "3", "4"),
            ],
        )
        .unwrap()
    }

    fn q_sink() -> Quiver {
        // Vertices 5,6,7,8 with arrows 5->6, 8->6, 7->6.
        Quiver::new(
            "Qpp",
            vec!["5".into(), "6".into(), "7".into(), "8".into()],
            vec![
                arrow("c1", "5", "6"),
                arrow("c2", "8", "6"),
                arrow("c3", "7", "6"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn build_and_flags() {
        let q = q_two();
        assert!(q.is_acyclic());
        assert!(q.is_connected().unwrap());

        let single = Quiver::new("S", vec!["v".into()], vec![]).unwrap();
        assert!(single.is_acyclic());
        assert!(single.is_connected().unwrap());
    }

    #[test]
    fn dangling_endpoint_rejected() {
        let err = Quiver::new("B", vec!["1".into()], vec![arrow("a", "1", "2")]).unwrap_err();
        assert!(matches!(err, QuiverError::DanglingEndpoint { .. }));
    }

    #[test]
    fn duplicate_ids_rejected() {
        assert!(matches!(
            Quiver::new("B", vec!["1".into(), "1".into()], vec![]),
            Err(QuiverError::DuplicateVertex(_))
        ));
        assert!(matches!(
            Quiver::new(
                "B",
                vec!["1".into()],
                vec![arrow("a", "1", "1"), arrow("a", "1", "1")]
            ),
            Err(QuiverError::DuplicateArrow(_))
        ));
    }

    #[test]
    fn loop_is_cyclic() {
        let q = Quiver::new("L", vec!["1".into()], vec![arrow("l", "1", "1")]).unwrap();
        assert!(!q.is_acyclic());
        assert!(matches!(
            q.enumerate_paths(),
            Err(QuiverError::CyclicQuiver(_))
        ));
    }

    #[test]
    fn disconnected_detected() {
        let q = Quiver::new("D", vec!["1".into(), "2".into()], vec![]).unwrap();
        assert!(!q.is_connected().unwrap());
        let empty = Quiver::new("E", vec![], vec![]).unwrap();
        assert_eq!(empty.is_connected(), Err(QuiverError::EmptyQuiver));
    }

    #[test]
    fn path_counts() {
        assert_eq!(q_two().enumerate_paths().unwrap().len(), 3);
        assert_eq!(q_parallel().enumerate_paths().unwrap().len(), 5);
        assert_eq!(q_sink().enumerate_paths().unwrap().len(), 7);
    }

    #[test]
    fn path_order_deterministic() {
        let q = q_parallel();
        let a = q.enumerate_paths().unwrap();
        let b = q.enumerate_paths().unwrap();
        assert_eq!(a, b);
        // Trivial paths first, then arrows sorted by label.
        assert!(a[0].is_trivial() && a[1].is_trivial());
        assert_eq!(a[2].arrows, vec!["b1".to_string()]);
        assert_eq!(a[3].arrows, vec!["b2".to_string()]);
    }

    #[test]
    fn path_algebra_two_vertex() {
        let pa = q_two().path_algebra().unwrap();
        assert_eq!(pa.dim, 3);
        let e1 = pa.trivial_path_index("1").unwrap();
        let e2 = pa.trivial_path_index("2").unwrap();
        let a = pa.basis.iter().position(|p| p.len() == 1).unwrap();
        assert_eq!(pa.mult(e1, a), Some(a));
        assert_eq!(pa.mult(a, e2), Some(a));
        assert_eq!(pa.mult(a, a), None);
        assert_eq!(pa.mult(e1, e2), None);
        assert_eq!(pa.mult(e1, e1), Some(e1));
        assert_eq!(pa.mult(e1, e2), None);
    }

    #[test]
    fn path_algebra_associative() {
        for q in [q_two(), q_parallel(), q_sink()] {
            let pa = q.path_algebra().unwrap();
            for i in 0..pa.dim {
                for j in 0..pa.dim {
                    for k in 0..pa.dim {
                        let lhs = pa.mult(i, j).and_then(|ij| pa.mult(ij, k));
                        let rhs = pa.mult(j, k).and_then(|jk| pa.mult(i, jk));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_paths_are_identity_system() {
        let pa = q_sink().path_algebra().unwrap();
        for (i, p) in pa.basis.iter().enumerate() {
            let es = pa.trivial_path_index(&p.source).unwrap();
            let et = pa.trivial_path_index(&p.target).unwrap();
            assert_eq!(pa.mult(es, i), Some(i));
            assert_eq!(pa.mult(i, et), Some(i));
            for v in &pa.quiver.vertices {
                let e = pa.trivial_path_index(v).unwrap();
                if *v != p.source {
                    assert_eq!(pa.mult(e, i), None);
                }
            }
        }
    }

    #[test]
    fn dim_formula() {
        for q in [q_two(), q_parallel(), q_sink()] {
            let pa = q.path_algebra().unwrap();
            let long = pa.basis.iter().filter(|p| p.len() >= 2).count();
            assert_eq!(pa.dim, q.vertex_count() + q.arrow_count() + long);
        }
    }
}
