//! Maximum bipartite matching.
//!
//! Feasibility of a δ-matching at a candidate value reduces to a maximum
//! matching question on the graph of admissible interval pairs, so the
//! bottleneck-distance search needs an exact matcher.  Hopcroft–Karp gives
//! the size; a lexicographic refinement pins down one canonical maximum
//! matching for reproducible witnesses.

/// A bipartite graph on `0..n_left` × `0..n_right` vertex sets.
#[derive(Clone, Debug)]
pub struct BipartiteGraph {
    n_left: usize,
    n_right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        BipartiteGraph {
            n_left,
            n_right,
            adj: vec![Vec::new(); n_left],
        }
    }

    pub fn add_edge(&mut self, l: usize, r: usize) {
        assert!(l < self.n_left && r < self.n_right, "edge out of range");
        self.adj[l].push(r);
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    /// A maximum matching, reported as the matched right vertex per left
    /// vertex.  Hopcroft–Karp; deterministic for a fixed edge insertion
    /// order (adjacency lists are scanned sorted).
    pub fn max_matching(&self) -> Vec<Option<usize>> {
        let mut adj = self.adj.clone();
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let mut match_l: Vec<Option<usize>> = vec![None; self.n_left];
        let mut match_r: Vec<Option<usize>> = vec![None; self.n_right];
        loop {
            // BFS layers from free left vertices.
            const UNREACHED: usize = usize::MAX;
            let mut dist = vec![UNREACHED; self.n_left];
            let mut queue: Vec<usize> =
                (0..self.n_left).filter(|&l| match_l[l].is_none()).collect();
            for &l in &queue {
                dist[l] = 0;
            }
            let mut found_free = false;
            let mut head = 0;
            while head < queue.len() {
                let l = queue[head];
                head += 1;
                for &r in &adj[l] {
                    match match_r[r] {
                        None => found_free = true,
                        Some(l2) if dist[l2] == UNREACHED => {
                            dist[l2] = dist[l] + 1;
                            queue.push(l2);
                        }
                        Some(_) => {}
                    }
                }
            }
            if !found_free {
                break;
            }
            // DFS along layered augmenting paths.
            fn augment(
                l: usize,
                adj: &[Vec<usize>],
                dist: &mut [usize],
                match_l: &mut [Option<usize>],
                match_r: &mut [Option<usize>],
            ) -> bool {
                for idx in 0..adj[l].len() {
                    let r = adj[l][idx];
                    let next = match match_r[r] {
                        None => true,
                        Some(l2) => {
                            dist[l2] == dist[l] + 1 && augment(l2, adj, dist, match_l, match_r)
                        }
                    };
                    if next {
                        match_l[l] = Some(r);
                        match_r[r] = Some(l);
                        return true;
                    }
                }
                dist[l] = usize::MAX;
                false
            }
            for l in 0..self.n_left {
                if match_l[l].is_none() && dist[l] == 0 {
                    augment(l, &adj, &mut dist, &mut match_l, &mut match_r);
                }
            }
        }
        match_l
    }

    pub fn max_matching_size(&self) -> usize {
        self.max_matching().iter().flatten().count()
    }

    /// The lexicographically least maximum matching, comparing matchings by
    /// the sequence of matched right vertices per left vertex (unmatched
    /// sorting last).  Fixes the witness the CLI prints.
    pub fn lex_maximum_matching(&self) -> Vec<Option<usize>> {
        let total = self.max_matching_size();
        let mut fixed: Vec<Option<usize>> = vec![None; self.n_left];
        let mut used_right = vec![false; self.n_right];
        let mut decided = 0;
        for l in 0..self.n_left {
            let mut candidates: Vec<usize> = self.adj[l]
                .iter()
                .copied()
                .filter(|&r| !used_right[r])
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            let mut chosen = None;
            for r in candidates {
                // Keep (l, r) iff the residual graph still reaches `total`.
                let residual = self.residual(l, r, &fixed, &used_right);
                if decided + 1 + residual.max_matching_size() == total {
                    chosen = Some(r);
                    break;
                }
            }
            fixed[l] = chosen;
            if let Some(r) = chosen {
                used_right[r] = true;
                decided += 1;
            }
        }
        debug_assert_eq!(decided, total);
        fixed
    }

    /// The subgraph on left vertices after `l` and unused right vertices,
    /// assuming `(l, r)` is taken on top of the already fixed pairs.
    fn residual(
        &self,
        l: usize,
        r: usize,
        fixed: &[Option<usize>],
        used_right: &[bool],
    ) -> BipartiteGraph {
        let remaining: Vec<usize> = (l + 1..self.n_left).collect();
        let mut g = BipartiteGraph::new(remaining.len(), self.n_right);
        for (i, &l2) in remaining.iter().enumerate() {
            debug_assert!(fixed[l2].is_none());
            for &r2 in &self.adj[l2] {
                if r2 != r && !used_right[r2] {
                    g.add_edge(i, r2);
                }
            }
        }
        g
    }
}
