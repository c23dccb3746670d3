//! Graphs given by flags: a boundary map flag -> vertex and an involutive
//! inversion flag -> flag. Orbits of the inversion are the edges; a fixed
//! flag is an unbounded edge, a swapped pair an internal edge.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagGraph {
    num_vertices: usize,
    boundary: Vec<usize>,
    inversion: Vec<usize>,
}

/// An internal edge as its two flags (a < b), with the incident vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InternalEdge {
    pub flag_a: usize,
    pub flag_b: usize,
    pub va: usize,
    pub vb: usize,
}

impl FlagGraph {
    pub fn new(num_vertices: usize, boundary: Vec<usize>, inversion: Vec<usize>) -> Result<Self> {
        if boundary.len() != inversion.len() {
            return Err(Error::InvalidInput(
                "boundary and inversion must cover the same flags".into(),
            ));
        }
        for (i, &img) in inversion.iter().enumerate() {
            if img >= inversion.len() || inversion[img] != i {
                return Err(Error::InvalidInput(format!(
                    "inversion is not involutive at flag {i}"
                )));
            }
        }
        if boundary.iter().any(|&v| v >= num_vertices) {
            return Err(Error::InvalidInput("boundary maps outside the vertex set".into()));
        }
        Ok(FlagGraph {
            num_vertices,
            boundary,
            inversion,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_flags(&self) -> usize {
        self.boundary.len()
    }

    pub fn boundary(&self, flag: usize) -> usize {
        self.boundary[flag]
    }

    pub fn inversion(&self, flag: usize) -> usize {
        self.inversion[flag]
    }

    /// Edges as orbits of the inversion: (internal edges, unbounded flags).
    pub fn edges(&self) -> (Vec<InternalEdge>, Vec<usize>) {
        let mut internal = Vec::new();
        let mut unbounded = Vec::new();
        for f in 0..self.num_flags() {
            let g = self.inversion[f];
            if g == f {
                unbounded.push(f);
            } else if f < g {
                internal.push(InternalEdge {
                    flag_a: f,
                    flag_b: g,
                    va: self.boundary[f],
                    vb: self.boundary[g],
                });
            }
        }
        (internal, unbounded)
    }

    /// Betti numbers (h0, h1): connected components by union-find, h1 from
    /// the Euler formula h0 - h1 = #vertices - #internal edges.
    pub fn betti(&self) -> (usize, usize) {
        let (internal, _) = self.edges();
        let mut parent: Vec<usize> = (0..self.num_vertices).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &internal {
            let (ra, rb) = (find(&mut parent, e.va), find(&mut parent, e.vb));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..self.num_vertices)
            .map(|v| find(&mut parent, v))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        let h0 = roots.len();
        let h1 = h0 + internal.len() - self.num_vertices;
        (h0, h1)
    }

    /// Betti numbers by DFS traversal: components are counted directly and
    /// h1 counts non-tree edges. Independent of `betti`, used to cross-check
    /// the Euler formula.
    pub fn betti_by_traversal(&self) -> (usize, usize) {
        let (internal, _) = self.edges();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.num_vertices];
        for (i, e) in internal.iter().enumerate() {
            adj[e.va].push((e.vb, i));
            adj[e.vb].push((e.va, i));
        }
        let mut seen = vec![false; self.num_vertices];
        let mut edge_used = vec![false; internal.len()];
        let mut h0 = 0;
        let mut cycles = 0;
        for start in 0..self.num_vertices {
            if seen[start] {
                continue;
            }
            h0 += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(w, eid) in &adj[v] {
                    if edge_used[eid] {
                        continue;
                    }
                    edge_used[eid] = true;
                    if seen[w] {
                        cycles += 1;
                    } else {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        (h0, cycles)
    }

    pub fn is_tree(&self) -> bool {
        self.betti() == (1, 0)
    }
}

/// Convenience builder used for quotient graphs and tests.
#[derive(Default)]
pub struct GraphBuilder {
    num_vertices: usize,
    boundary: Vec<usize>,
    inversion: Vec<usize>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self) -> usize {
        self.num_vertices += 1;
        self.num_vertices - 1
    }

    pub fn add_vertices(&mut self, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.add_vertex()).collect()
    }

    /// Returns the index of the internal edge's first flag.
    pub fn add_internal_edge(&mut self, a: usize, b: usize) -> usize {
        let fa = self.boundary.len();
        self.boundary.push(a);
        self.boundary.push(b);
        self.inversion.push(fa + 1);
        self.inversion.push(fa);
        fa
    }

    /// Returns the flag index of the new unbounded edge.
    pub fn add_unbounded_edge(&mut self, v: usize) -> usize {
        let f = self.boundary.len();
        self.boundary.push(v);
        self.inversion.push(f);
        f
    }

    pub fn build(self) -> Result<FlagGraph> {
        FlagGraph::new(self.num_vertices, self.boundary, self.inversion)
    }
}
