// SPDX-License-Identifier: Apache-2.0

//! Dinic max-flow over small integer capacities. Internal to the crate; the
//! public surface only exposes undirected graphs.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
}

pub(crate) struct FlowNetwork {
    arcs: Vec<Vec<Arc>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl FlowNetwork {
    pub(crate) fn new(size: usize) -> Self {
        Self {
            arcs: vec![Vec::new(); size],
            level: vec![-1; size],
            cursor: vec![0; size],
        }
    }

    pub(crate) fn add_arc(&mut self, from: usize, to: usize, cap: u32) {
        let rev_from = self.arcs[to].len();
        let rev_to = self.arcs[from].len();
        self.arcs[from].push(Arc {
            to,
            cap,
            rev: rev_from,
        });
        self.arcs[to].push(Arc {
            to: from,
            cap: 0,
            rev: rev_to,
        });
    }

    fn bfs(&mut self, source: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for arc in &self.arcs[v] {
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, sink: usize, limit: u32) -> u32 {
        if v == sink {
            return limit;
        }
        while self.cursor[v] < self.arcs[v].len() {
            let Arc { to, cap, rev } = self.arcs[v][self.cursor[v]];
            if cap > 0 && self.level[v] < self.level[to] {
                let pushed = self.dfs(to, sink, limit.min(cap));
                if pushed > 0 {
                    self.arcs[v][self.cursor[v]].cap -= pushed;
                    self.arcs[to][rev].cap += pushed;
                    return pushed;
                }
            }
            self.cursor[v] += 1;
        }
        0
    }

    pub(crate) fn max_flow(&mut self, source: usize, sink: usize) -> u32 {
        let mut flow = 0;
        loop {
            self.bfs(source);
            if self.level[sink] < 0 {
                return flow;
            }
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(source, sink, u32::MAX);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
    }
}
