//! Maximum-weight matching on general graphs (Edmonds' blossom algorithm,
//! primal-dual, O(n^3)), in exact integer arithmetic.
//!
//! The structure follows Joris van Rantwijk's well-known reference
//! implementation: vertices and blossoms share one index space, each edge
//! `k` has endpoints `2k` and `2k + 1`, and labels are 1 (S), 2 (T) or 0.

const NONE: usize = usize::MAX;

struct Matcher<'a> {
    edges: &'a [(usize, usize, i64)],
    nv: usize,
    endpoint: Vec<usize>,
    neighbend: Vec<Vec<usize>>,
    mate: Vec<usize>,
    label: Vec<u8>,
    labelend: Vec<usize>,
    inblossom: Vec<usize>,
    blossomparent: Vec<usize>,
    blossomchilds: Vec<Vec<usize>>,
    blossombase: Vec<usize>,
    blossomendps: Vec<Vec<usize>>,
    bestedge: Vec<usize>,
    blossombestedges: Vec<Option<Vec<usize>>>,
    unusedblossoms: Vec<usize>,
    /// Blossom slots currently in use.
    active: Vec<usize>,
    dualvar: Vec<i64>,
    allowedge: Vec<bool>,
    queue: Vec<usize>,
    /// Tree-root memo for [`Matcher::release_trees`], valid while
    /// `root_stamp[b] == epoch`.
    root_memo: Vec<usize>,
    root_stamp: Vec<u32>,
    epoch: u32,
}

fn wrap(j: isize, len: usize) -> usize {
    j.rem_euclid(len as isize) as usize
}

impl<'a> Matcher<'a> {
    fn slack(&self, k: usize) -> i64 {
        let (i, j, w) = self.edges[k];
        self.dualvar[i] + self.dualvar[j] - 2 * w
    }

    fn leaves(&self, b: usize, out: &mut Vec<usize>) {
        if b < self.nv {
            out.push(b);
        } else {
            for &t in &self.blossomchilds[b] {
                self.leaves(t, out);
            }
        }
    }

    fn leaves_of(&self, b: usize) -> Vec<usize> {
        let mut v = Vec::new();
        self.leaves(b, &mut v);
        v
    }

    fn assign_label(&mut self, w: usize, t: u8, p: usize) {
        let b = self.inblossom[w];
        self.label[w] = t;
        self.label[b] = t;
        self.labelend[w] = p;
        self.labelend[b] = p;
        self.bestedge[w] = NONE;
        self.bestedge[b] = NONE;
        if t == 1 {
            let leaves = self.leaves_of(b);
            self.queue.extend(leaves);
        } else if t == 2 {
            let base = self.blossombase[b];
            let m = self.mate[base];
            self.assign_label(self.endpoint[m], 1, m ^ 1);
        }
    }

    /// Trace back from `v` and `w` to find a new blossom's base, or NONE if
    /// the two S-vertices lie in different trees (augmenting path).
    fn scan_blossom(&mut self, mut v: usize, mut w: usize) -> usize {
        let mut path = Vec::new();
        let mut base = NONE;
        while v != NONE || w != NONE {
            let mut b = self.inblossom[v];
            if self.label[b] & 4 != 0 {
                base = self.blossombase[b];
                break;
            }
            path.push(b);
            self.label[b] = 5;
            if self.labelend[b] == NONE {
                v = NONE;
            } else {
                v = self.endpoint[self.labelend[b]];
                b = self.inblossom[v];
                v = self.endpoint[self.labelend[b]];
            }
            if w != NONE {
                std::mem::swap(&mut v, &mut w);
            }
        }
        for b in path {
            self.label[b] = 1;
        }
        base
    }

    fn add_blossom(&mut self, base: usize, k: usize) {
        let (mut v, mut w, _) = self.edges[k];
        let bb = self.inblossom[base];
        let mut bv = self.inblossom[v];
        let mut bw = self.inblossom[w];
        let b = self.unusedblossoms.pop().expect("blossom slots available");
        self.active.push(b);
        self.blossombase[b] = base;
        self.blossomparent[b] = NONE;
        self.blossomparent[bb] = b;
        let mut path = Vec::new();
        let mut endps = Vec::new();
        while bv != bb {
            self.blossomparent[bv] = b;
            path.push(bv);
            endps.push(self.labelend[bv]);
            v = self.endpoint[self.labelend[bv]];
            bv = self.inblossom[v];
        }
        path.push(bb);
        path.reverse();
        endps.reverse();
        endps.push(2 * k);
        while bw != bb {
            self.blossomparent[bw] = b;
            path.push(bw);
            endps.push(self.labelend[bw] ^ 1);
            w = self.endpoint[self.labelend[bw]];
            bw = self.inblossom[w];
        }
        self.label[b] = 1;
        self.labelend[b] = self.labelend[bb];
        self.dualvar[b] = 0;
        self.blossomchilds[b] = path.clone();
        self.blossomendps[b] = endps;
        for v in self.leaves_of(b) {
            if self.label[self.inblossom[v]] == 2 {
                self.queue.push(v);
            }
            self.inblossom[v] = b;
        }
        let mut bestedgeto = vec![NONE; 2 * self.nv];
        for &bv in &path {
            let nblists: Vec<Vec<usize>> = match self.blossombestedges[bv].take() {
                Some(list) => vec![list],
                None => self
                    .leaves_of(bv)
                    .into_iter()
                    .map(|v| self.neighbend[v].iter().map(|&p| p / 2).collect())
                    .collect(),
            };
            for nblist in nblists {
                for k in nblist {
                    let (i, j, _) = self.edges[k];
                    let far = if self.inblossom[j] == b { i } else { j };
                    let bj = self.inblossom[far];
                    if bj != b
                        && self.label[bj] == 1
                        && (bestedgeto[bj] == NONE || self.slack(k) < self.slack(bestedgeto[bj]))
                    {
                        bestedgeto[bj] = k;
                    }
                }
            }
            self.bestedge[bv] = NONE;
        }
        let list: Vec<usize> = bestedgeto.into_iter().filter(|&k| k != NONE).collect();
        self.bestedge[b] = NONE;
        for &k in &list {
            if self.bestedge[b] == NONE || self.slack(k) < self.slack(self.bestedge[b]) {
                self.bestedge[b] = k;
            }
        }
        self.blossombestedges[b] = Some(list);
    }

    fn expand_blossom(&mut self, b: usize, endstage: bool) {
        let childs = self.blossomchilds[b].clone();
        for &s in &childs {
            self.blossomparent[s] = NONE;
            if s < self.nv {
                self.inblossom[s] = s;
            } else if endstage && self.dualvar[s] == 0 {
                self.expand_blossom(s, endstage);
            } else {
                for v in self.leaves_of(s) {
                    self.inblossom[v] = s;
                }
            }
        }
        if !endstage && self.label[b] == 2 {
            let len = childs.len();
            let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
            let mut j = childs.iter().position(|&c| c == entrychild).unwrap() as isize;
            let (jstep, endptrick): (isize, usize) = if j & 1 == 1 {
                j -= len as isize;
                (1, 0)
            } else {
                (-1, 1)
            };
            let endps = self.blossomendps[b].clone();
            let mut p = self.labelend[b];
            while j != 0 {
                let q = self.endpoint[p ^ 1];
                self.label[q] = 0;
                let e = endps[wrap(j - endptrick as isize, len)];
                self.label[self.endpoint[e ^ endptrick ^ 1]] = 0;
                self.assign_label(q, 2, p);
                self.allowedge[e / 2] = true;
                j += jstep;
                p = endps[wrap(j - endptrick as isize, len)] ^ endptrick;
                self.allowedge[p / 2] = true;
                j += jstep;
            }
            let bv = childs[wrap(j, len)];
            let q = self.endpoint[p ^ 1];
            self.label[q] = 2;
            self.label[bv] = 2;
            self.labelend[q] = p;
            self.labelend[bv] = p;
            self.bestedge[bv] = NONE;
            j += jstep;
            while childs[wrap(j, len)] != entrychild {
                let bv = childs[wrap(j, len)];
                if self.label[bv] == 1 {
                    j += jstep;
                    continue;
                }
                let leaves = self.leaves_of(bv);
                let v = leaves.iter().copied().find(|&v| self.label[v] != 0).unwrap_or(*leaves.last().unwrap());
                if self.label[v] != 0 {
                    self.label[v] = 0;
                    let m = self.mate[self.blossombase[bv]];
                    self.label[self.endpoint[m]] = 0;
                    self.assign_label(v, 2, self.labelend[v]);
                }
                j += jstep;
            }
        }
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.blossomchilds[b].clear();
        self.blossomendps[b].clear();
        self.blossombase[b] = NONE;
        self.blossombestedges[b] = None;
        self.bestedge[b] = NONE;
        if let Some(i) = self.active.iter().position(|&x| x == b) {
            self.active.swap_remove(i);
        }
        self.unusedblossoms.push(b);
    }

    fn augment_blossom(&mut self, b: usize, v: usize) {
        let mut t = v;
        while self.blossomparent[t] != b {
            t = self.blossomparent[t];
        }
        if t >= self.nv {
            self.augment_blossom(t, v);
        }
        let len = self.blossomchilds[b].len();
        let i = self.blossomchilds[b].iter().position(|&c| c == t).unwrap();
        let mut j = i as isize;
        let (jstep, endptrick): (isize, usize) = if i & 1 == 1 {
            j -= len as isize;
            (1, 0)
        } else {
            (-1, 1)
        };
        while j != 0 {
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            let p = self.blossomendps[b][wrap(j - endptrick as isize, len)] ^ endptrick;
            if t >= self.nv {
                self.augment_blossom(t, self.endpoint[p]);
            }
            j += jstep;
            let t = self.blossomchilds[b][wrap(j, len)];
            if t >= self.nv {
                self.augment_blossom(t, self.endpoint[p ^ 1]);
            }
            self.mate[self.endpoint[p]] = p ^ 1;
            self.mate[self.endpoint[p ^ 1]] = p;
        }
        self.blossomchilds[b].rotate_left(i);
        self.blossomendps[b].rotate_left(i);
        self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
    }

    fn augment_matching(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        for (mut s, mut p) in [(v, 2 * k + 1), (w, 2 * k)] {
            loop {
                let bs = self.inblossom[s];
                if bs >= self.nv {
                    self.augment_blossom(bs, s);
                }
                self.mate[s] = p;
                if self.labelend[bs] == NONE {
                    break;
                }
                let t = self.endpoint[self.labelend[bs]];
                let bt = self.inblossom[t];
                s = self.endpoint[self.labelend[bt]];
                let j = self.endpoint[self.labelend[bt] ^ 1];
                if bt >= self.nv {
                    self.augment_blossom(bt, j);
                }
                self.mate[j] = self.labelend[bt];
                p = self.labelend[bt] ^ 1;
            }
        }
    }

    fn tree_root(&mut self, start: usize) -> usize {
        let mut b = start;
        let root = loop {
            if self.root_stamp[b] == self.epoch {
                break self.root_memo[b];
            }
            if self.labelend[b] == NONE {
                break b;
            }
            b = self.inblossom[self.endpoint[self.labelend[b]]];
        };
        let mut b = start;
        while self.root_stamp[b] != self.epoch {
            self.root_memo[b] = root;
            self.root_stamp[b] = self.epoch;
            if self.labelend[b] == NONE {
                break;
            }
            b = self.inblossom[self.endpoint[self.labelend[b]]];
        }
        root
    }

    fn clear_labels(&mut self, b: usize) {
        self.label[b] = 0;
        self.labelend[b] = NONE;
        self.bestedge[b] = NONE;
        if b >= self.nv {
            self.blossombestedges[b] = None;
            for idx in 0..self.blossomchilds[b].len() {
                self.clear_labels(self.blossomchilds[b][idx]);
            }
        }
    }

    /// Augment along edge `k`, then dissolve the two alternating trees it
    /// joined. Their vertices are all matched afterwards, so they become
    /// unlabelled exactly like vertices no tree has reached yet, and the
    /// search carries on with the remaining trees instead of restarting.
    fn release_trees(&mut self, k: usize) {
        let (v, w, _) = self.edges[k];
        self.epoch += 1;
        let ra = self.tree_root(self.inblossom[v]);
        let rb = self.tree_root(self.inblossom[w]);
        let mut dead = Vec::new();
        let candidates: Vec<usize> = (0..self.nv).chain(self.active.iter().copied()).collect();
        for b in candidates {
            if self.blossomparent[b] == NONE && self.label[b] != 0 {
                let r = self.tree_root(b);
                if r == ra || r == rb {
                    dead.push(b);
                }
            }
        }
        let mut leaves = Vec::new();
        for &b in &dead {
            self.leaves(b, &mut leaves);
        }
        self.augment_matching(k);
        for &b in &dead {
            if b >= self.nv && self.label[b] == 1 && self.dualvar[b] == 0 {
                self.clear_labels(b);
                self.expand_blossom(b, true);
            } else {
                self.clear_labels(b);
            }
        }
        for &v in &leaves {
            let t = self.inblossom[v];
            if self.label[t] != 0 {
                self.clear_labels(t);
            }
            for idx in 0..self.neighbend[v].len() {
                self.allowedge[self.neighbend[v][idx] / 2] = false;
            }
        }
        // Leaves of surviving T-blossoms may have been reached from a
        // released S-vertex; re-derive that mark from a live one.
        for &v in &leaves {
            for idx in 0..self.neighbend[v].len() {
                let w = self.endpoint[self.neighbend[v][idx]];
                if self.label[self.inblossom[w]] == 2
                    && self.label[w] == 2
                    && self.label[self.inblossom[self.endpoint[self.labelend[w]]]] != 1
                {
                    self.remark_t_leaf(w);
                }
            }
        }
        for &v in &leaves {
            self.refresh_free_bestedge(v);
        }
    }

    fn remark_t_leaf(&mut self, w: usize) {
        self.label[w] = 0;
        self.labelend[w] = NONE;
        for idx in 0..self.neighbend[w].len() {
            let q = self.neighbend[w][idx];
            if self.label[self.inblossom[self.endpoint[q]]] == 1 && self.slack(q / 2) <= 0 {
                self.label[w] = 2;
                self.labelend[w] = q;
                return;
            }
        }
    }

    /// Least-slack edge from unlabelled vertex `v` to any S-blossom.
    fn refresh_free_bestedge(&mut self, v: usize) {
        let mut best = NONE;
        let mut best_slack = i64::MAX;
        for &p in &self.neighbend[v] {
            let w = self.endpoint[p];
            if self.label[self.inblossom[w]] == 1 && self.inblossom[w] != self.inblossom[v] {
                let s = self.slack(p / 2);
                if s < best_slack {
                    best = p / 2;
                    best_slack = s;
                }
            }
        }
        self.bestedge[v] = best;
    }

    /// Fold top-level S-blossom `b`'s least-slack S-S edge into the running
    /// minimum of half-slacks.
    fn consider_s_bestedge(&mut self, b: usize, best: &mut i64, edge: &mut usize) {
        if self.label[b] != 1 || self.bestedge[b] == NONE {
            return;
        }
        let (i, j, _) = self.edges[self.bestedge[b]];
        let (bi, bj) = (self.inblossom[i], self.inblossom[j]);
        if bi == bj || self.label[bi] != 1 || self.label[bj] != 1 {
            self.refresh_s_bestedge(b);
            if self.bestedge[b] == NONE {
                return;
            }
        }
        let kslack = self.slack(self.bestedge[b]);
        debug_assert_eq!(kslack % 2, 0);
        if kslack / 2 < *best {
            *best = kslack / 2;
            *edge = self.bestedge[b];
        }
    }

    /// Least-slack edge from S-blossom `b` to any other S-blossom.
    fn refresh_s_bestedge(&mut self, b: usize) {
        let mut leaves = Vec::new();
        self.leaves(b, &mut leaves);
        let mut best = NONE;
        let mut best_slack = i64::MAX;
        for v in leaves {
            for &p in &self.neighbend[v] {
                let bw = self.inblossom[self.endpoint[p]];
                if bw != b && self.label[bw] == 1 {
                    let s = self.slack(p / 2);
                    if s < best_slack {
                        best = p / 2;
                        best_slack = s;
                    }
                }
            }
        }
        self.bestedge[b] = best;
    }

    fn run(&mut self, maxcardinality: bool) {
        let nv = self.nv;
        for _ in 0..nv {
            self.label.fill(0);
            self.bestedge.fill(NONE);
            for b in nv..2 * nv {
                self.blossombestedges[b] = None;
            }
            self.allowedge.fill(false);
            self.queue.clear();
            for v in 0..nv {
                if self.mate[v] == NONE && self.label[self.inblossom[v]] == 0 {
                    self.assign_label(v, 1, NONE);
                }
            }
            let mut augmented = false;
            loop {
                while let Some(v) = self.queue.pop() {
                    // Entries of released trees are stale.
                    if self.label[self.inblossom[v]] != 1 {
                        continue;
                    }
                    for idx in 0..self.neighbend[v].len() {
                        let p = self.neighbend[v][idx];
                        let k = p / 2;
                        let w = self.endpoint[p];
                        if self.inblossom[v] == self.inblossom[w] {
                            continue;
                        }
                        let mut kslack = 0;
                        if !self.allowedge[k] {
                            kslack = self.slack(k);
                            if kslack <= 0 {
                                self.allowedge[k] = true;
                            }
                        }
                        if self.allowedge[k] {
                            if self.label[self.inblossom[w]] == 0 {
                                self.assign_label(w, 2, p ^ 1);
                            } else if self.label[self.inblossom[w]] == 1 {
                                let base = self.scan_blossom(v, w);
                                if base != NONE {
                                    self.add_blossom(base, k);
                                } else {
                                    self.release_trees(k);
                                    augmented = true;
                                    break;
                                }
                            } else if self.label[w] == 0 {
                                self.label[w] = 2;
                                self.labelend[w] = p ^ 1;
                            }
                        } else if self.label[self.inblossom[w]] == 1 {
                            let b = self.inblossom[v];
                            if self.bestedge[b] == NONE || kslack < self.slack(self.bestedge[b]) {
                                self.bestedge[b] = k;
                            }
                        } else if self.label[w] == 0
                            && (self.bestedge[w] == NONE || kslack < self.slack(self.bestedge[w]))
                        {
                            self.bestedge[w] = k;
                        }
                    }
                }

                // No augmenting path under the current duals: find the
                // smallest dual change that creates new tight edges.
                let mut d1 = i64::MAX;
                let (mut d2, mut e2) = (i64::MAX, NONE);
                let (mut d3, mut e3) = (i64::MAX, NONE);
                let (mut d4, mut b4) = (i64::MAX, NONE);
                for v in 0..nv {
                    d1 = d1.min(self.dualvar[v]);
                    let t = self.inblossom[v];
                    if self.label[t] == 0 && self.bestedge[v] != NONE {
                        let (i, j, _) = self.edges[self.bestedge[v]];
                        let far = if i == v { j } else { i };
                        if self.label[self.inblossom[far]] != 1 {
                            self.refresh_free_bestedge(v);
                            if self.bestedge[v] == NONE {
                                continue;
                            }
                        }
                        let d = self.slack(self.bestedge[v]);
                        if d < d2 {
                            (d2, e2) = (d, self.bestedge[v]);
                        }
                    } else if t == v {
                        self.consider_s_bestedge(v, &mut d3, &mut e3);
                    }
                }
                for idx in 0..self.active.len() {
                    let b = self.active[idx];
                    if self.blossomparent[b] != NONE {
                        continue;
                    }
                    if self.label[b] == 2 && self.dualvar[b] < d4 {
                        (d4, b4) = (self.dualvar[b], b);
                    } else {
                        self.consider_s_bestedge(b, &mut d3, &mut e3);
                    }
                }
                let (mut deltatype, mut delta) = if maxcardinality { (0u8, 0) } else { (1u8, d1) };
                let mut deltaedge = NONE;
                let mut deltablossom = NONE;
                if e2 != NONE && (deltatype == 0 || d2 < delta) {
                    (deltatype, delta, deltaedge) = (2, d2, e2);
                }
                if e3 != NONE && (deltatype == 0 || d3 < delta) {
                    (deltatype, delta, deltaedge) = (3, d3, e3);
                }
                if b4 != NONE && (deltatype == 0 || d4 < delta) {
                    (deltatype, delta, deltablossom) = (4, d4, b4);
                }
                if deltatype == 0 {
                    deltatype = 1;
                    delta = d1.max(0);
                }
                for v in 0..nv {
                    match self.label[self.inblossom[v]] {
                        1 => self.dualvar[v] -= delta,
                        2 => self.dualvar[v] += delta,
                        _ => {}
                    }
                }
                for idx in 0..self.active.len() {
                    let b = self.active[idx];
                    if self.blossomparent[b] == NONE {
                        match self.label[b] {
                            1 => self.dualvar[b] += delta,
                            2 => self.dualvar[b] -= delta,
                            _ => {}
                        }
                    }
                }
                match deltatype {
                    1 => break,
                    2 => {
                        self.allowedge[deltaedge] = true;
                        let (mut i, j, _) = self.edges[deltaedge];
                        if self.label[self.inblossom[i]] == 0 {
                            i = j;
                        }
                        self.queue.push(i);
                    }
                    3 => {
                        self.allowedge[deltaedge] = true;
                        let (i, _, _) = self.edges[deltaedge];
                        self.queue.push(i);
                    }
                    _ => self.expand_blossom(deltablossom, false),
                }
            }
            if !augmented {
                break;
            }
            for b in nv..2 * nv {
                if self.blossomparent[b] == NONE
                    && self.blossombase[b] != NONE
                    && self.label[b] == 1
                    && self.dualvar[b] == 0
                {
                    self.expand_blossom(b, true);
                }
            }
        }
    }
}

/// Maximum-weight matching of the graph on vertices `0..num_vertices` with
/// the given weighted edges. With `max_cardinality`, the matching has maximum
/// cardinality first and maximum weight among those. Returns each vertex's
/// partner.
pub fn max_weight_matching(num_vertices: usize, edges: &[(usize, usize, i64)], max_cardinality: bool) -> Vec<Option<usize>> {
    let nv = num_vertices;
    if edges.is_empty() {
        return vec![None; nv];
    }
    // Doubling keeps every dual variable integral.
    let doubled: Vec<(usize, usize, i64)> = edges.iter().map(|&(i, j, w)| (i, j, 2 * w)).collect();
    let maxweight = doubled.iter().map(|e| e.2).max().unwrap().max(0);
    let mut neighbend = vec![Vec::new(); nv];
    for (k, &(i, j, _)) in doubled.iter().enumerate() {
        neighbend[i].push(2 * k + 1);
        neighbend[j].push(2 * k);
    }
    let mut m = Matcher {
        edges: &doubled,
        nv,
        endpoint: (0..2 * doubled.len()).map(|p| if p % 2 == 0 { doubled[p / 2].0 } else { doubled[p / 2].1 }).collect(),
        neighbend,
        mate: vec![NONE; nv],
        label: vec![0; 2 * nv],
        labelend: vec![NONE; 2 * nv],
        inblossom: (0..nv).collect(),
        blossomparent: vec![NONE; 2 * nv],
        blossomchilds: vec![Vec::new(); 2 * nv],
        blossombase: (0..nv).chain(std::iter::repeat(NONE).take(nv)).collect(),
        blossomendps: vec![Vec::new(); 2 * nv],
        bestedge: vec![NONE; 2 * nv],
        blossombestedges: vec![None; 2 * nv],
        unusedblossoms: (nv..2 * nv).collect(),
        active: Vec::new(),
        dualvar: std::iter::repeat(maxweight).take(nv).chain(std::iter::repeat(0).take(nv)).collect(),
        allowedge: vec![false; doubled.len()],
        queue: Vec::new(),
        root_memo: vec![NONE; 2 * nv],
        root_stamp: vec![0; 2 * nv],
        epoch: 0,
    };
    m.run(max_cardinality);
    m.mate.iter().map(|&p| (p != NONE).then(|| m.endpoint[p])).collect()
}
