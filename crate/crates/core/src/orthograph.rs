//! Finite samples of the orthograph.
//!
//! Vertices are projective representatives of nonzero elements and two
//! vertices are joined when they are mutually strongly BJ-orthogonal. Only
//! the sampled graph is analysed; its diameter says nothing about the
//! orthograph on the full projective space.

use std::collections::VecDeque;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::linalg::CMat;
use crate::algebra::random::derive_seed;
use crate::algebra::{Element, Shape};
use crate::bj::mutual_strong_bj;
use crate::tol;

#[derive(Debug, Clone, Serialize)]
pub struct Vertex {
    pub label: String,
    pub element: Element,
}

#[derive(Debug, Clone)]
pub struct OrthographSample {
    pub shape: Shape,
    pub vertices: Vec<Vertex>,
    /// Pairs `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub seed: u64,
    pub tol: f64,
    pub structured: bool,
}

/// Unit-norm representative whose first entry (row-major, block by block)
/// of modulus above `1e-12` is real and positive. `None` for zero.
pub fn projective_representative(a: &Element) -> Option<Element> {
    let norm = a.op_norm();
    if norm == 0.0 {
        return None;
    }
    let pivot = a
        .blocks()
        .iter()
        .flat_map(|b| b.transpose().iter().copied().collect::<Vec<_>>())
        .find(|z| z.norm() > 1e-12)?;
    let phase = pivot.conj() / pivot.norm();
    Some(a.scale(phase / norm))
}

/// Samples `n_samples` Ginibre vertices and, when `structured`, the matrix
/// units, the block indicators and one random element supported on each
/// block. Edges use [`tol::DECISION`].
pub fn build_orthograph(shape: &Shape, n_samples: usize, seed: u64, structured: bool) -> OrthographSample {
    let mut labelled = Vec::new();
    if structured {
        for i in 0..shape.num_blocks() {
            let n = shape.block_dim(i);
            for r in 0..n {
                for s in 0..n {
                    let e = Element::matrix_unit(shape, i, r, s).expect("in range");
                    labelled.push((format!("E{i}[{r},{s}]"), e));
                }
            }
            let indicator = Element::from_block(shape, i, CMat::identity(n, n)).expect("in range");
            labelled.push((format!("1_{i}"), indicator));
            let random = Element::random(shape, derive_seed(seed, 1 << 32 | i as u64));
            let padded = Element::from_block(shape, i, random.block(i).clone()).expect("in range");
            labelled.push((format!("pad{i}"), padded));
        }
    }
    for t in 0..n_samples {
        labelled.push((format!("g{t}"), Element::random(shape, derive_seed(seed, t as u64))));
    }
    let mut sample = from_vertices(shape, labelled, tol::DECISION);
    sample.seed = seed;
    sample.structured = structured;
    sample
}

/// Builds the graph on explicitly given elements; zero elements are dropped.
pub fn from_vertices(shape: &Shape, labelled: Vec<(String, Element)>, tol: f64) -> OrthographSample {
    let vertices: Vec<Vertex> = labelled
        .into_iter()
        .filter_map(|(label, a)| {
            assert_eq!(a.shape(), shape, "vertex shape");
            projective_representative(&a).map(|element| Vertex { label, element })
        })
        .collect();
    let n = vertices.len();
    let edges = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let vertices = &vertices;
            (i + 1..n).filter_map(move |j| {
                let hit = mutual_strong_bj(&vertices[i].element, &vertices[j].element, tol).expect("same shape");
                hit.then_some((i, j))
            })
        })
        .collect();
    OrthographSample { shape: shape.clone(), vertices, edges, seed: 0, tol, structured: false }
}

impl OrthographSample {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(i, j)| i == v || j == v).count()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut uf = UnionFind::<usize>::new(n);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        let labels = uf.into_labeling();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for v in 0..n {
            let root = labels[v];
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(v);
        }
        groups
    }

    /// Diameter of the largest component (first one on ties) of the sampled graph.
    pub fn sampled_diameter_largest_component(&self) -> Option<usize> {
        let components = self.components();
        let largest = components.iter().fold(None::<&Vec<usize>>, |best, comp| match best {
            Some(b) if b.len() >= comp.len() => Some(b),
            _ => Some(comp),
        })?;
        let adj = self.adjacency();
        let mut diameter = 0;
        for &start in largest {
            let mut dist = vec![usize::MAX; self.vertices.len()];
            dist[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        diameter = diameter.max(dist[w]);
                        queue.push_back(w);
                    }
                }
            }
        }
        Some(diameter)
    }

    /// `orthograph_s{shape}_seed{seed}`, without extension.
    pub fn file_stem(&self) -> String {
        format!("orthograph_s{}_seed{}", self.shape.tag(), self.seed)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for (v, vertex) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  {v} [label=\"{}\"];", vertex.label);
        }
        for &(i, j) in &self.edges {
            let _ = writeln!(out, "  {i} -- {j};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> crate::Result<String> {
        crate::json::to_string(self)
    }
}

#[derive(Serialize)]
struct SampleWire<'a> {
    shape: &'a Shape,
    seed: u64,
    tol: f64,
    structured: bool,
    vertices: &'a [Vertex],
    edges: &'a [(usize, usize)],
    components: Vec<Vec<usize>>,
    sampled_diameter_largest_component: Option<usize>,
}

impl Serialize for OrthographSample {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SampleWire {
            shape: &self.shape,
            seed: self.seed,
            tol: self.tol,
            structured: self.structured,
            vertices: &self.vertices,
            edges: &self.edges,
            components: self.components(),
            sampled_diameter_largest_component: self.sampled_diameter_largest_component(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::linalg::c;

    fn shape(d: &[usize]) -> Shape {
        Shape::new(d.to_vec()).unwrap()
    }

    #[test]
    fn two_point_example() {
        let s = shape(&[1, 1]);
        let pts = [("(1,0)", 1.0, 0.0), ("(0,1)", 0.0, 1.0), ("(1,1)", 1.0, 1.0)];
        let labelled = pts
            .iter()
            .map(|&(l, x, y)| (l.to_string(), Element::from_scalars(&s, &[c(x, 0.0), c(y, 0.0)]).unwrap()))
            .collect();
        let g = from_vertices(&s, labelled, tol::DECISION);
        assert_eq!(g.edges, vec![(0, 1)]);
    }

    #[test]
    fn invertible_vertices_are_isolated() {
        let s = shape(&[2, 3]);
        let g = build_orthograph(&s, 6, 4, true);
        for (v, vertex) in g.vertices.iter().enumerate() {
            if vertex.element.is_invertible() {
                assert_eq!(g.degree(v), 0, "{}", vertex.label);
            }
        }
        assert!(g.edges.iter().all(|&(i, j)| i < j));
    }

    #[test]
    fn single_sample_and_empty_graph() {
        let s = shape(&[3]);
        let g = build_orthograph(&s, 1, 0, false);
        assert!(g.edges.is_empty());
        let empty = build_orthograph(&s, 0, 0, false);
        assert_eq!(empty.to_dot(), "graph G {\n}\n");
        assert_eq!(empty.sampled_diameter_largest_component(), None);
    }

    #[test]
    fn one_edge_is_one_component() {
        let s = shape(&[1, 1]);
        let labelled = vec![
            ("a".to_string(), Element::from_scalars(&s, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap()),
            ("b".to_string(), Element::from_scalars(&s, &[c(0.0, 0.0), c(2.0, 0.0)]).unwrap()),
        ];
        let g = from_vertices(&s, labelled, tol::DECISION);
        assert_eq!(g.components(), vec![vec![0, 1]]);
        assert_eq!(g.sampled_diameter_largest_component(), Some(1));
        assert_eq!(g.to_dot(), "graph G {\n  0 [label=\"a\"];\n  1 [label=\"b\"];\n  0 -- 1;\n}\n");
    }

    #[test]
    fn representatives_are_normalized() {
        let s = shape(&[2]);
        let a = Element::random(&s, 3).scale(c(0.0, 5.0));
        let r = projective_representative(&a).unwrap();
        assert!((r.op_norm() - 1.0).abs() < 1e-12);
        assert!(r.block(0)[(0, 0)].im.abs() < 1e-12 && r.block(0)[(0, 0)].re > 0.0);
        assert!(projective_representative(&Element::zeros(&s)).is_none());
    }

    #[test]
    fn structured_m3_is_reproducible() {
        let s = shape(&[3]);
        let a = build_orthograph(&s, 8, 1, true);
        let b = build_orthograph(&s, 8, 1, true);
        assert_eq!(a.components(), b.components());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
