//! The finite weighted tree whose vertices are the balls of a cover chain.
//!
//! Vertex ids are level-major: all level-0 balls, then level 1 in ball order,
//! and so on. The edge into a level-`k` vertex has length `2^{-kd}`, so the
//! total length is `sum_{k>=1} #C_k 2^{-kd}`.

use serde::Serialize;

use crate::covering::CoverChain;
use crate::error::{Error, Result};
use crate::geometry::format_real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub level: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverTree {
    pub d: f64,
    pub vertices: Vec<Vertex>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level_offsets: Vec<usize>,
}

impl CoverTree {
    pub fn root(&self) -> usize {
        0
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Vertex id of ball `index` at `level`.
    pub fn vertex_id(&self, level: usize, index: usize) -> Option<usize> {
        let start = *self.level_offsets.get(level)?;
        let end = self
            .level_offsets
            .get(level + 1)
            .copied()
            .unwrap_or(self.vertices.len());
        (start + index < end).then_some(start + index)
    }

    /// Length of the edge into a vertex at `level`; zero for the root level.
    pub fn edge_length_at(&self, level: usize) -> f64 {
        if level == 0 {
            0.0
        } else {
            (-(level as f64) * self.d).exp2()
        }
    }

    /// Length of the edge from `v` to its parent.
    pub fn edge_length(&self, v: usize) -> f64 {
        self.edge_length_at(self.vertices[v].level)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.len()).filter_map(move |v| self.parent[v].map(|p| (p, v, self.edge_length(v))))
    }

    pub fn total_length(&self) -> f64 {
        // level by level so the sum matches sum_k #C_k 2^{-kd}
        let levels = self.level_offsets.len();
        (1..levels)
            .map(|k| {
                let count = self.level_offsets.get(k + 1).copied().unwrap_or(self.len())
                    - self.level_offsets[k];
                count as f64 * self.edge_length_at(k)
            })
            .sum()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct EdgeJson {
            parent: usize,
            child: usize,
            length: String,
        }
        #[derive(Serialize)]
        struct TreeJson<'a> {
            d: String,
            root: usize,
            vertices: &'a [Vertex],
            edges: Vec<EdgeJson>,
        }
        let doc = TreeJson {
            d: format_real(self.d),
            root: self.root(),
            vertices: &self.vertices,
            edges: self
                .edges()
                .map(|(p, c, _)| EdgeJson {
                    parent: p,
                    child: c,
                    length: format!(
                        "1/2^{}",
                        format_real(self.vertices[c].level as f64 * self.d)
                    ),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("tree serializes")
    }
}

pub fn build_tree(chain: &CoverChain) -> Result<CoverTree> {
    if chain.levels.is_empty() {
        return Err(Error::InvalidParameter("chain has no levels".into()));
    }
    if chain.levels[0].balls.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "level 0 must hold exactly one ball, found {}",
            chain.levels[0].balls.len()
        )));
    }
    let mut vertices = Vec::new();
    let mut level_offsets = Vec::with_capacity(chain.levels.len());
    for (k, level) in chain.levels.iter().enumerate() {
        level_offsets.push(vertices.len());
        vertices.extend((0..level.balls.len()).map(|index| Vertex { level: k, index }));
    }
    let mut parent = vec![None; vertices.len()];
    let mut children = vec![Vec::new(); vertices.len()];
    for (k, level) in chain.levels.iter().enumerate().skip(1) {
        let prev_len = chain.levels[k - 1].balls.len();
        for i in 0..level.balls.len() {
            let p = match level.parents.get(i) {
                Some(&p) if p < prev_len => p,
                _ => return Err(Error::MissingParent { level: k, index: i }),
            };
            let v = level_offsets[k] + i;
            let pv = level_offsets[k - 1] + p;
            parent[v] = Some(pv);
            children[pv].push(v);
        }
    }
    Ok(CoverTree {
        d: chain.d,
        vertices,
        parent,
        children,
        level_offsets,
    })
}

/// Length of the unique path between `u` and `v`.
pub fn tree_distance(t: &CoverTree, u: usize, v: usize) -> f64 {
    let (mut a, mut b) = (u, v);
    let mut total = 0.0;
    while t.vertices[a].level > t.vertices[b].level {
        total += t.edge_length(a);
        a = t.parent[a].expect("non-root vertex has a parent");
    }
    while t.vertices[b].level > t.vertices[a].level {
        total += t.edge_length(b);
        b = t.parent[b].expect("non-root vertex has a parent");
    }
    while a != b {
        total += t.edge_length(a) + t.edge_length(b);
        a = t.parent[a].expect("non-root vertex has a parent");
        b = t.parent[b].expect("non-root vertex has a parent");
    }
    total
}

/// Lowest common ancestor of two vertices.
pub fn lca(t: &CoverTree, u: usize, v: usize) -> usize {
    let (mut a, mut b) = (u, v);
    while t.vertices[a].level > t.vertices[b].level {
        a = t.parent[a].expect("non-root vertex has a parent");
    }
    while t.vertices[b].level > t.vertices[a].level {
        b = t.parent[b].expect("non-root vertex has a parent");
    }
    while a != b {
        a = t.parent[a].expect("non-root vertex has a parent");
        b = t.parent[b].expect("non-root vertex has a parent");
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TourStep {
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Tour length after this step.
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EulerTour {
    pub steps: Vec<TourStep>,
}

impl EulerTour {
    pub fn total_length(&self) -> f64 {
        self.steps.last().map(|s| s.cumulative).unwrap_or(0.0)
    }

    /// Vertex sequence visited by the tour, starting at `root`.
    pub fn vertices(&self, root: usize) -> Vec<usize> {
        std::iter::once(root)
            .chain(self.steps.iter().map(|s| s.to))
            .collect()
    }
}

/// Closed depth-first walk from the root, children in ascending ball order.
pub fn euler_tour(t: &CoverTree) -> EulerTour {
    let mut steps = Vec::with_capacity(2 * t.len().saturating_sub(1));
    let mut cumulative = 0.0;
    // (vertex, next child position)
    let mut stack: Vec<(usize, usize)> = vec![(t.root(), 0)];
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if let Some(&c) = t.children[v].get(*next) {
            *next += 1;
            let length = t.edge_length(c);
            cumulative += length;
            steps.push(TourStep {
                from: v,
                to: c,
                length,
                cumulative,
            });
            stack.push((c, 0));
        } else {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                let length = t.edge_length(v);
                cumulative += length;
                steps.push(TourStep {
                    from: v,
                    to: p,
                    length,
                    cumulative,
                });
            }
        }
    }
    EulerTour { steps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{build_chain, Ball, CoverLevel};
    use crate::geometry::Point2;

    /// Chain with the given level sizes; ball `i` at level `k` has parent
    /// `parent_of(k, i)`.
    pub(crate) fn synthetic_chain(
        sizes: &[usize],
        d: f64,
        parent_of: impl Fn(usize, usize) -> usize,
    ) -> CoverChain {
        let levels = sizes
            .iter()
            .enumerate()
            .map(|(k, &n)| CoverLevel {
                k,
                radius: (-(k as f64)).exp2(),
                balls: (0..n)
                    .map(|i| Ball {
                        center: Point2::new(i as f64, k as f64),
                        radius: (-(k as f64)).exp2(),
                    })
                    .collect(),
                parents: if k == 0 {
                    Vec::new()
                } else {
                    (0..n).map(|i| parent_of(k, i)).collect()
                },
            })
            .collect();
        CoverChain {
            eps0: 1.0,
            d,
            levels,
        }
    }

    #[test]
    fn singleton_path() {
        let chain = build_chain(&[Point2::new(0.5, 0.5)], 1.0, 3, 1.0).unwrap();
        let t = build_tree(&chain).unwrap();
        let lengths: Vec<f64> = t.edges().map(|e| e.2).collect();
        assert_eq!(lengths, vec![0.5, 0.25, 0.125]);
        assert_eq!(t.total_length(), 0.875);
        assert_eq!(tree_distance(&t, 0, 2), 0.75);
        assert_eq!(tree_distance(&t, 2, 2), 0.0);
    }

    #[test]
    fn two_point_tree() {
        let chain = build_chain(&[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)], 1.0, 2, 1.0).unwrap();
        let t = build_tree(&chain).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.edges().count(), 4);
        assert_eq!(t.total_length(), 1.5);
    }

    #[test]
    fn sized_chain_total_length() {
        let chain = synthetic_chain(&[1, 4, 16], 2.0, |_, i| i / 4);
        let t = build_tree(&chain).unwrap();
        assert_eq!(t.total_length(), 2.0);
    }

    #[test]
    fn sibling_leaves_distance() {
        let chain = synthetic_chain(&[1, 1, 2], 1.0, |_, _| 0);
        let t = build_tree(&chain).unwrap();
        let (a, b) = (t.vertex_id(2, 0).unwrap(), t.vertex_id(2, 1).unwrap());
        assert_eq!(tree_distance(&t, a, b), 0.5);
        assert_eq!(lca(&t, a, b), t.vertex_id(1, 0).unwrap());
    }

    #[test]
    fn missing_parent_is_an_error() {
        let mut chain = synthetic_chain(&[1, 2], 1.0, |_, _| 0);
        chain.levels[1].parents.pop();
        assert_eq!(
            build_tree(&chain).unwrap_err(),
            Error::MissingParent { level: 1, index: 1 }
        );
        chain.levels[1].parents = vec![0, 7];
        assert!(build_tree(&chain).is_err());
    }

    #[test]
    fn tours() {
        let single = build_tree(&synthetic_chain(&[1], 1.0, |_, _| 0)).unwrap();
        assert!(euler_tour(&single).steps.is_empty());

        let path = build_tree(&synthetic_chain(&[1, 1, 1], 1.0, |_, _| 0)).unwrap();
        let tour = euler_tour(&path);
        assert_eq!(tour.total_length(), 1.5);
        assert_eq!(tour.vertices(0), vec![0, 1, 2, 1, 0]);

        // star with three unit edges: d = 0 is outside the chain contract but
        // gives unit lengths for this structural check
        let star = build_tree(&synthetic_chain(&[1, 3], 0.0, |_, _| 0)).unwrap();
        let tour = euler_tour(&star);
        assert_eq!(tour.total_length(), 6.0);
        assert_eq!(tour.vertices(0), vec![0, 1, 0, 2, 0, 3, 0]);
    }

    #[test]
    fn tree_json_lengths() {
        let t = build_tree(&synthetic_chain(&[1, 2], 1.5, |_, _| 0)).unwrap();
        let s = t.to_json();
        assert!(s.contains("\"length\":\"1/2^1.5\""), "{s}");
    }
}
