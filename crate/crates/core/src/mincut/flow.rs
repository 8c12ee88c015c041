//! Real-capacity max-flow on a residual graph.
//!
//! Two exact backends share one graph representation: shortest augmenting
//! paths over breadth-first layers (Dinic) and FIFO push-relabel with the gap
//! heuristic. Residual capacities at or below [`EPS`] count as saturated.

use std::collections::VecDeque;

/// Residual-positivity tolerance.
pub const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxFlowAlgorithm {
    #[default]
    AugmentingPath,
    PushRelabel,
}

impl std::str::FromStr for MaxFlowAlgorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "augmenting-path" | "dinic" => Ok(Self::AugmentingPath),
            "push-relabel" => Ok(Self::PushRelabel),
            other => Err(format!("unknown max-flow algorithm {other:?}")),
        }
    }
}

/// Directed graph with paired forward/backward arcs. Arc `e ^ 1` is the
/// reverse of arc `e`.
#[derive(Debug, Clone, Default)]
pub struct ResidualGraph {
    adj: Vec<Vec<usize>>,
    head: Vec<usize>,
    residual: Vec<f64>,
    capacity: Vec<f64>,
}

impl ResidualGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n], ..Default::default() }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) -> usize {
        debug_assert!(cap >= 0.0);
        let e = self.head.len();
        self.adj[from].push(e);
        self.head.push(to);
        self.residual.push(cap);
        self.capacity.push(cap);
        self.adj[to].push(e + 1);
        self.head.push(from);
        self.residual.push(0.0);
        self.capacity.push(0.0);
        e
    }

    /// Forward arcs as `(from, to, capacity)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.head.len()).step_by(2).map(move |e| (self.head[e + 1], self.head[e], self.capacity[e]))
    }

    pub fn flow_on(&self, e: usize) -> f64 {
        self.capacity[e] - self.residual[e]
    }

    pub fn reset(&mut self) {
        self.residual.copy_from_slice(&self.capacity);
    }

    pub fn max_flow(&mut self, s: usize, t: usize, algo: MaxFlowAlgorithm) -> f64 {
        match algo {
            MaxFlowAlgorithm::AugmentingPath => self.dinic(s, t),
            MaxFlowAlgorithm::PushRelabel => self.push_relabel(s, t),
        }
    }

    /// Nodes reachable from `s` through arcs with positive residual capacity.
    pub fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if !seen[v] && self.residual[e] > EPS {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Nodes that can reach `t` through arcs with positive residual capacity.
    pub fn reaching(&self, t: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([t]);
        seen[t] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                // e leaves v; its reverse e^1 enters v from head[e]
                let u = self.head[e];
                if !seen[u] && self.residual[e ^ 1] > EPS {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    fn bfs_levels(&self, s: usize, t: usize, level: &mut [i32]) -> bool {
        level.fill(-1);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if level[v] < 0 && self.residual[e] > EPS {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level[t] >= 0
    }

    fn dinic(&mut self, s: usize, t: usize) -> f64 {
        let n = self.node_count();
        let mut level = vec![-1; n];
        let mut iter = vec![0usize; n];
        let mut total = 0.0;
        while self.bfs_levels(s, t, &mut level) {
            iter.fill(0);
            loop {
                let pushed = self.blocking_path(s, t, &level, &mut iter);
                if pushed <= EPS {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    /// Finds one augmenting path in the layered graph (iterative DFS with
    /// current-arc pointers) and pushes its bottleneck.
    fn blocking_path(&mut self, s: usize, t: usize, level: &[i32], iter: &mut [usize]) -> f64 {
        let mut path: Vec<usize> = Vec::new();
        let mut u = s;
        loop {
            if u == t {
                let bottleneck = path.iter().map(|&e| self.residual[e]).fold(f64::INFINITY, f64::min);
                for &e in &path {
                    self.residual[e] -= bottleneck;
                    self.residual[e ^ 1] += bottleneck;
                }
                return bottleneck;
            }
            let mut advanced = false;
            while iter[u] < self.adj[u].len() {
                let e = self.adj[u][iter[u]];
                let v = self.head[e];
                if self.residual[e] > EPS && level[v] == level[u] + 1 {
                    path.push(e);
                    u = v;
                    advanced = true;
                    break;
                }
                iter[u] += 1;
            }
            if !advanced {
                // dead end: retreat and skip the arc that led here
                match path.pop() {
                    None => return 0.0,
                    Some(e) => {
                        u = self.head[e ^ 1];
                        iter[u] += 1;
                    }
                }
            }
        }
    }

    /// FIFO push-relabel computing a maximum preflow; the returned value is
    /// the excess collected at `t`, which equals the max-flow value. Cuts
    /// should be read with [`reaching`](Self::reaching) afterwards.
    fn push_relabel(&mut self, s: usize, t: usize) -> f64 {
        let n = self.node_count();
        let mut height = vec![0usize; n];
        let mut excess = vec![0.0f64; n];
        let mut count = vec![0usize; 2 * n + 1];
        let mut current = vec![0usize; n];
        let mut active: VecDeque<usize> = VecDeque::new();
        let mut in_queue = vec![false; n];

        // exact initial heights: reverse BFS distance to t
        height.fill(n);
        height[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let u = self.head[e];
                if height[u] == n && u != t && self.residual[e ^ 1] > EPS {
                    height[u] = height[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        height[s] = n;
        for &h in &height {
            count[h] += 1;
        }

        for i in 0..self.adj[s].len() {
            let e = self.adj[s][i];
            let c = self.residual[e];
            if c > EPS {
                let v = self.head[e];
                self.residual[e] = 0.0;
                self.residual[e ^ 1] += c;
                excess[v] += c;
                excess[s] -= c;
                if v != t && !in_queue[v] {
                    in_queue[v] = true;
                    active.push_back(v);
                }
            }
        }

        while let Some(u) = active.pop_front() {
            in_queue[u] = false;
            // discharge
            while excess[u] > EPS {
                if current[u] == self.adj[u].len() {
                    // relabel
                    let old = height[u];
                    let mut best = usize::MAX;
                    for &e in &self.adj[u] {
                        if self.residual[e] > EPS {
                            best = best.min(height[self.head[e]]);
                        }
                    }
                    if best == usize::MAX {
                        // isolated excess; cannot move
                        break;
                    }
                    let new = (best + 1).min(2 * n);
                    count[old] -= 1;
                    height[u] = new;
                    count[new] += 1;
                    current[u] = 0;
                    // gap: nobody left at `old` below n; lift everything above it
                    if count[old] == 0 && old < n {
                        for v in 0..n {
                            if v != s && height[v] > old && height[v] < n {
                                count[height[v]] -= 1;
                                height[v] = n + 1;
                                count[n + 1] += 1;
                                current[v] = 0;
                            }
                        }
                    }
                    if height[u] >= 2 * n {
                        break;
                    }
                    continue;
                }
                let e = self.adj[u][current[u]];
                let v = self.head[e];
                if self.residual[e] > EPS && height[u] == height[v] + 1 {
                    let delta = excess[u].min(self.residual[e]);
                    self.residual[e] -= delta;
                    self.residual[e ^ 1] += delta;
                    excess[u] -= delta;
                    excess[v] += delta;
                    if v != s && v != t && !in_queue[v] && excess[v] > EPS {
                        in_queue[v] = true;
                        active.push_back(v);
                    }
                } else {
                    current[u] += 1;
                }
            }
        }
        excess[t]
    }
}
