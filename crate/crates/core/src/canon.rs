//! Canonical certificates and symmetry groups for MOLS equivalence testing.
//!
//! An orthogonal array O becomes a vertex-colored graph: one vertex per
//! column (type 1), one per (column, symbol) pair (type 2), one per array
//! row (type 3). Column vertices join their n symbol vertices; each row
//! vertex joins the symbol vertex of its entry in every column. Color-
//! preserving isomorphism of these graphs is exactly paratopism, and
//! recoloring the column vertices selects the finer equivalences: distinct
//! colors pin columns (isotopism of lists), sharing a color on the first
//! two lets them swap (trisotopism), and so on.
//!
//! Certificates come from a branch-and-bound search over the refinement
//! tree: iterated equitable color refinement, individualizing vertices of
//! the first smallest non-singleton cell, keeping the least leaf encoding.
//! Leaves that tie yield automorphisms, pruning sibling branches orbit-wise;
//! their group order comes from an orbit-stabilizer chain.

use crate::latin::LatinSquare;
use crate::mols::{MolsList, OrthogonalArray};
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// Which notion of equivalence the coloring should test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquivalenceMode {
    /// All column vertices share one color: paratopism of lists or sets.
    SpeciesMols,
    /// Species of a single latin square (width-3 array).
    SpeciesLs,
    /// Every column vertex its own color: isotopism of lists.
    IsotopismList,
    /// Coordinate columns pinned separately, square columns interchangeable.
    IsotopismSet,
    /// Like isotopism of lists but the two coordinate columns may swap.
    TrisotopismList,
    /// Like isotopism of sets but the two coordinate columns may swap.
    TrisotopismSet,
}

/// 256-bit vertex set; large enough for every graph this crate builds
/// (width + width*n + n^2 <= 210 for n <= 10, k <= 8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Bits([u64; 4]);

impl Bits {
    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn count_and(&self, other: &Bits) -> u32 {
        (self.0[0] & other.0[0]).count_ones()
            + (self.0[1] & other.0[1]).count_ones()
            + (self.0[2] & other.0[2]).count_ones()
            + (self.0[3] & other.0[3]).count_ones()
    }
}

/// A simple undirected graph with an initial vertex coloring.
#[derive(Debug, Clone)]
pub struct ColoredGraph {
    order: usize,
    adj: Vec<Bits>,
    colors: Vec<u16>,
}

impl ColoredGraph {
    pub fn new(order: usize, colors: Vec<u16>) -> ColoredGraph {
        assert!(order <= 256, "graph too large for the fixed bitset");
        assert_eq!(colors.len(), order);
        ColoredGraph {
            order,
            adj: vec![Bits::default(); order],
            colors,
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.order && b < self.order);
        self.adj[a].set(b);
        self.adj[b].set(a);
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].get(b)
    }

    pub fn color(&self, v: usize) -> u16 {
        self.colors[v]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.order)
            .map(|v| {
                self.adj[v]
                    .0
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum::<usize>()
            })
            .sum::<usize>()
            / 2
    }

    /// Triangles through each vertex, used to seed refinement. The arrays
    /// here give bipartite graphs, so the seed is inert on them; correctness
    /// never depends on it.
    fn triangle_counts(&self) -> Vec<u32> {
        (0..self.order)
            .map(|v| {
                let mut t = 0;
                for u in 0..self.order {
                    if self.adj[v].get(u) {
                        t += self.adj[v].count_and(&self.adj[u]);
                    }
                }
                t / 2
            })
            .collect()
    }

    fn is_automorphism(&self, p: &[u32]) -> bool {
        (0..self.order).all(|v| self.colors[p[v] as usize] == self.colors[v])
            && (0..self.order).all(|a| {
                (a + 1..self.order)
                    .all(|b| self.adj[a].get(b) == self.adj[p[a] as usize].get(p[b] as usize))
            })
    }
}

/// Encodes an orthogonal array as the colored graph for the given mode.
pub fn encode_graph(oa: &OrthogonalArray, mode: EquivalenceMode) -> ColoredGraph {
    let n = oa.order();
    let w = oa.width();
    if mode == EquivalenceMode::SpeciesLs {
        assert_eq!(w, 3, "SpeciesLs expects the width-3 array of one square");
    }
    let type2 = |j: usize, s: usize| w + j * n + s;
    let type3_base = w + w * n;
    let order = type3_base + n * n;

    // Column-vertex colors select the equivalence; symbol and row vertices
    // always take the next two colors.
    let t1_colors: Vec<u16> = match mode {
        EquivalenceMode::SpeciesMols | EquivalenceMode::SpeciesLs => vec![0; w],
        EquivalenceMode::IsotopismList => (0..w as u16).collect(),
        EquivalenceMode::IsotopismSet => {
            let mut v = vec![2u16; w];
            v[0] = 0;
            v[1] = 1;
            v
        }
        EquivalenceMode::TrisotopismList => {
            let mut v = vec![0u16; w];
            for (j, c) in v.iter_mut().enumerate().skip(2) {
                *c = j as u16 - 1;
            }
            v
        }
        EquivalenceMode::TrisotopismSet => {
            let mut v = vec![1u16; w];
            v[0] = 0;
            v[1] = 0;
            v
        }
    };
    let next = t1_colors.iter().copied().max().unwrap_or(0) + 1;
    let mut colors = vec![0u16; order];
    colors[..w].copy_from_slice(&t1_colors);
    for j in 0..w {
        for s in 0..n {
            colors[type2(j, s)] = next;
        }
    }
    for r in 0..n * n {
        colors[type3_base + r] = next + 1;
    }

    let mut g = ColoredGraph::new(order, colors);
    for j in 0..w {
        for s in 0..n {
            g.add_edge(j, type2(j, s));
        }
    }
    for r in 0..n * n {
        for j in 0..w {
            g.add_edge(type3_base + r, type2(j, oa.get(r, j) as usize));
        }
    }
    g
}

/// A canonical certificate: equal exactly for color-isomorphic graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Certificate(Vec<u8>);

impl Certificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Species key of a single square, from its canonical (least reduced)
    /// member. Same equivalence as the SpeciesLs graph certificate, far
    /// cheaper to compute.
    pub fn of_square_species(canonical_member: &LatinSquare) -> Certificate {
        let mut bytes = vec![1u8, canonical_member.order() as u8];
        bytes.extend_from_slice(canonical_member.cells());
        Certificate(bytes)
    }

    /// Species key of a k-MOLS list, from its canonical member.
    pub fn of_list_species(canonical_member: &MolsList) -> Certificate {
        let mut bytes = vec![
            2u8,
            canonical_member.order() as u8,
            canonical_member.len() as u8,
        ];
        for sq in canonical_member.squares() {
            bytes.extend_from_slice(sq.cells());
        }
        Certificate(bytes)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Result of a canonical search.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub certificate: Certificate,
    pub aut_order: BigInt,
    pub generators: Vec<Vec<u32>>,
}

pub fn canonical_certificate(g: &ColoredGraph) -> Certificate {
    canonize(g).certificate
}

pub fn automorphism_order(g: &ColoredGraph) -> BigInt {
    canonize(g).aut_order
}

/// Order of the autoparatopism group of a list of MOLS.
pub fn par_order(m: &MolsList) -> BigInt {
    automorphism_order(&encode_graph(&m.to_oa(), EquivalenceMode::SpeciesMols))
}

/// Order of the autotopism group of a list of MOLS.
pub fn atp_order(m: &MolsList) -> BigInt {
    automorphism_order(&encode_graph(&m.to_oa(), EquivalenceMode::IsotopismList))
}

/// Species certificate of a single latin square, via its canonical member.
/// Equal exactly when the graph certificates under [`EquivalenceMode::SpeciesLs`]
/// are equal, but usable on the group-table graphs where plain refinement
/// stalls.
pub fn square_species_certificate(l: &LatinSquare) -> Certificate {
    let (rep, _) = crate::species::min_reduced_member(l);
    Certificate::of_square_species(&rep)
}

/// Species certificate of a list of MOLS, via its canonical member.
pub fn list_species_certificate(m: &MolsList) -> Certificate {
    Certificate::of_list_species(&crate::species::list_min_rep(m))
}

/// Certificate of a MOLS list under the given equivalence mode.
pub fn mols_certificate(m: &MolsList, mode: EquivalenceMode) -> Certificate {
    canonical_certificate(&encode_graph(&m.to_oa(), mode))
}

// ---------------------------------------------------------------------------
// Individualization-refinement search.

/// Ordered partition of the vertices. Positions in `lab` are stable under
/// splitting: `start[pos]` names the cell of a position, `len[start]` is
/// valid at cell starts.
#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    start: Vec<u32>,
    len: Vec<u32>,
}

impl Partition {
    fn from_keys(keys: &[(u32, u32)]) -> Partition {
        let order = keys.len();
        let mut sorted = keys.to_vec();
        sorted.sort_unstable();
        let mut part = Partition {
            lab: sorted.iter().map(|&(_, v)| v).collect(),
            pos: vec![0; order],
            start: vec![0; order],
            len: vec![0; order],
        };
        for (i, &v) in part.lab.iter().enumerate() {
            part.pos[v as usize] = i as u32;
        }
        let mut s = 0;
        while s < order {
            let mut e = s + 1;
            while e < order && sorted[e].0 == sorted[s].0 {
                e += 1;
            }
            for p in s..e {
                part.start[p] = s as u32;
            }
            part.len[s] = (e - s) as u32;
            s = e;
        }
        part
    }

    /// First smallest non-singleton cell, as (start, len); None when the
    /// partition is discrete.
    fn target_cell(&self) -> Option<(usize, usize)> {
        let order = self.lab.len();
        let mut best: Option<(usize, usize)> = None;
        let mut s = 0;
        while s < order {
            let l = self.len[s] as usize;
            if l > 1 {
                match best {
                    Some((_, bl)) if bl <= l => {}
                    _ => best = Some((s, l)),
                }
            }
            s += l;
        }
        best
    }

    /// Splits v off at the front of its cell; returns the start position.
    fn individualize(&mut self, v: u32) -> usize {
        let p = self.pos[v as usize] as usize;
        let s = self.start[p] as usize;
        let l = self.len[s] as usize;
        debug_assert!(l > 1);
        let first = self.lab[s];
        self.lab[s] = v;
        self.lab[p] = first;
        self.pos[v as usize] = s as u32;
        self.pos[first as usize] = p as u32;
        self.len[s] = 1;
        self.len[s + 1] = (l - 1) as u32;
        for q in s + 1..s + l {
            self.start[q] = (s + 1) as u32;
        }
        s
    }
}

fn fnv_mix(h: &mut u64, v: u64) {
    *h ^= v;
    *h = h.wrapping_mul(0x100000001b3);
    *h ^= *h >> 29;
}

struct Leaf {
    lab: Vec<u32>,
    enc: Vec<u64>,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    zeta: Option<Leaf>,
    zeta_trace: Vec<u64>,
    rho: Option<Leaf>,
    rho_trace: Vec<u64>,
    generators: Vec<Vec<u32>>,
}

impl Search<'_> {
    /// Equitable refinement; returns an isomorphism-invariant hash of the
    /// splitting events (everything hashed is a position or a degree).
    fn refine(&self, part: &mut Partition, mut queue: VecDeque<u32>) -> u64 {
        let order = self.g.order;
        let mut hash = 0xcbf29ce484222325u64;
        let mut scratch: Vec<(u32, u32)> = Vec::with_capacity(order);
        while let Some(ws) = queue.pop_front() {
            let ws = ws as usize;
            let wl = part.len[ws] as usize;
            let mut splitter = Bits::default();
            for p in ws..ws + wl {
                splitter.set(part.lab[p] as usize);
            }
            let mut s = 0;
            while s < order {
                let l = part.len[s] as usize;
                if l == 1 {
                    let key = self.g.adj[part.lab[s] as usize].count_and(&splitter);
                    fnv_mix(&mut hash, (s as u64) << 32 | key as u64);
                    s += l;
                    continue;
                }
                scratch.clear();
                let mut min_key = u32::MAX;
                let mut max_key = 0;
                for p in s..s + l {
                    let v = part.lab[p];
                    let key = self.g.adj[v as usize].count_and(&splitter);
                    min_key = min_key.min(key);
                    max_key = max_key.max(key);
                    scratch.push((key, v));
                }
                if min_key == max_key {
                    fnv_mix(&mut hash, (s as u64) << 32 | min_key as u64);
                    s += l;
                    continue;
                }
                scratch.sort_unstable();
                for (offset, &(_, v)) in scratch.iter().enumerate() {
                    part.lab[s + offset] = v;
                    part.pos[v as usize] = (s + offset) as u32;
                }
                let mut frag = s;
                while frag < s + l {
                    let key = scratch[frag - s].0;
                    let mut end = frag + 1;
                    while end < s + l && scratch[end - s].0 == key {
                        end += 1;
                    }
                    for p in frag..end {
                        part.start[p] = frag as u32;
                    }
                    part.len[frag] = (end - frag) as u32;
                    queue.push_back(frag as u32);
                    fnv_mix(&mut hash, 0x5bd1e995 ^ ((frag as u64) << 24 | key as u64));
                    frag = end;
                }
                s += l;
            }
        }
        hash
    }

    fn encode(&self, lab: &[u32]) -> Vec<u64> {
        let order = self.g.order;
        let nbits = order * (order - 1) / 2;
        let mut words = vec![0u64; nbits.div_ceil(64).max(1)];
        let mut bit = 0usize;
        for i in 0..order {
            let row = &self.g.adj[lab[i] as usize];
            for &vj in lab.iter().skip(i + 1) {
                if row.get(vj as usize) {
                    words[bit / 64] |= 1 << (bit % 64);
                }
                bit += 1;
            }
        }
        words
    }

    fn record_automorphism(&mut self, base: &[u32], lab: &[u32]) {
        let order = self.g.order;
        let mut perm = vec![0u32; order];
        for i in 0..order {
            perm[base[i] as usize] = lab[i];
        }
        if perm.iter().enumerate().all(|(i, &x)| i as u32 == x) {
            return;
        }
        debug_assert!(self.g.is_automorphism(&perm));
        self.generators.push(perm);
    }

    /// Whether some known automorphism fixing every path vertex maps v into
    /// the explored sibling set. Only path-stabilizing automorphisms may
    /// prune, otherwise both the canonical choice and the generated group
    /// can come out wrong.
    fn pruned_by_stabilizer(&self, path: &[u32], explored: &[u32], v: u32) -> bool {
        if explored.is_empty() || self.generators.is_empty() {
            return false;
        }
        let applicable: Vec<&Vec<u32>> = self
            .generators
            .iter()
            .filter(|g| path.iter().all(|&p| g[p as usize] == p))
            .collect();
        if applicable.is_empty() {
            return false;
        }
        // Orbit of v under the path stabilizer (or the subgroup its
        // stabilizing generators span, which prunes less but stays sound).
        let mut seen = Bits::default();
        seen.set(v as usize);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for g in &applicable {
                let y = g[x as usize];
                if !seen.get(y as usize) {
                    if explored.contains(&y) {
                        return true;
                    }
                    seen.set(y as usize);
                    stack.push(y);
                }
            }
        }
        false
    }

    /// One refined node of the search tree. `rho_state` tracks this path's
    /// trace against the best leaf's, `eq_zeta` against the first leaf's.
    fn node(
        &mut self,
        part: Partition,
        node_value: u64,
        depth: usize,
        rho_state: Ordering,
        eq_zeta: bool,
        path: &mut Vec<u32>,
    ) {
        let on_first_path = self.zeta.is_none();
        let eq_zeta = if on_first_path {
            self.zeta_trace.push(node_value);
            true
        } else {
            eq_zeta && self.zeta_trace.get(depth) == Some(&node_value)
        };
        let mut rho_state = if self.rho.is_none() {
            Ordering::Equal
        } else if rho_state == Ordering::Equal {
            match self.rho_trace.get(depth) {
                Some(&rv) => node_value.cmp(&rv),
                // Unreachable while Equal: the leaf flag is mixed into node
                // values, so equal prefixes have equal lengths.
                None => Ordering::Greater,
            }
        } else {
            rho_state
        };
        if rho_state == Ordering::Greater && !eq_zeta {
            return;
        }
        if rho_state == Ordering::Less {
            // Every leaf below beats the current best: rebuild rho from the
            // first leaf found in this subtree.
            self.rho = None;
            self.rho_trace.truncate(depth);
            self.rho_trace.push(node_value);
            rho_state = Ordering::Equal;
        } else if self.rho.is_none() {
            self.rho_trace.push(node_value);
        }

        let Some((ts, tl)) = part.target_cell() else {
            // Discrete partition: a leaf.
            let enc = self.encode(&part.lab);
            match &self.rho {
                None => {
                    self.rho = Some(Leaf {
                        lab: part.lab.clone(),
                        enc: enc.clone(),
                    });
                }
                Some(rho) if rho_state == Ordering::Equal => match enc.cmp(&rho.enc) {
                    Ordering::Less => {
                        self.rho = Some(Leaf {
                            lab: part.lab.clone(),
                            enc: enc.clone(),
                        });
                    }
                    Ordering::Equal => {
                        let base = rho.lab.clone();
                        self.record_automorphism(&base, &part.lab);
                    }
                    Ordering::Greater => {}
                },
                Some(_) => {}
            }
            if eq_zeta && !on_first_path {
                if let Some(zeta) = &self.zeta {
                    if enc == zeta.enc {
                        let base = zeta.lab.clone();
                        self.record_automorphism(&base, &part.lab);
                    }
                }
            }
            if on_first_path {
                self.zeta = Some(Leaf {
                    lab: part.lab.clone(),
                    enc,
                });
            }
            return;
        };

        let candidates: Vec<u32> = part.lab[ts..ts + tl].to_vec();
        let mut explored: Vec<u32> = Vec::with_capacity(tl);
        for v in candidates {
            if self.pruned_by_stabilizer(path, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut child = part.clone();
            let s = child.individualize(v);
            let mut h = self.refine(&mut child, VecDeque::from([s as u32]));
            let target = child.target_cell();
            fnv_mix(
                &mut h,
                target.map_or(u64::MAX, |(cs, cl)| (cs as u64) << 20 | cl as u64),
            );
            path.push(v);
            self.node(child, h, depth + 1, rho_state, eq_zeta, path);
            path.pop();
        }
    }
}

/// Runs the canonical search, producing the certificate, the automorphism
/// group order, and the discovered generators.
pub fn canonize(g: &ColoredGraph) -> CanonicalForm {
    let order = g.order;
    let triangles = g.triangle_counts();
    let keys: Vec<(u32, u32)> = (0..order)
        .map(|v| {
            (
                ((g.colors[v] as u32) << 16) | (triangles[v] & 0xffff),
                v as u32,
            )
        })
        .collect();
    let mut part = Partition::from_keys(&keys);
    let mut search = Search {
        g,
        zeta: None,
        zeta_trace: Vec::new(),
        rho: None,
        rho_trace: Vec::new(),
        generators: Vec::new(),
    };
    let starts: Vec<u32> = {
        let mut v = Vec::new();
        let mut s = 0;
        while s < order {
            v.push(s as u32);
            s += part.len[s] as usize;
        }
        v
    };
    let mut h = search.refine(&mut part, VecDeque::from(starts));
    let t = part.target_cell();
    fnv_mix(
        &mut h,
        t.map_or(u64::MAX, |(cs, cl)| (cs as u64) << 20 | cl as u64),
    );
    search.node(part, h, 0, Ordering::Equal, true, &mut Vec::new());

    let rho = search.rho.expect("search visits at least one leaf");
    // Certificate: order, color histogram, then the canonical adjacency
    // bitmap. The histogram fixes each canonical position's color because
    // refinement never reorders the initial color classes.
    let mut bytes = Vec::new();
    bytes.extend_from_slice(&(order as u16).to_le_bytes());
    let mut hist: Vec<(u16, u32)> = Vec::new();
    for v in 0..order {
        let c = g.colors[v];
        match hist.iter_mut().find(|(hc, _)| *hc == c) {
            Some((_, count)) => *count += 1,
            None => hist.push((c, 1)),
        }
    }
    hist.sort_unstable();
    for (c, count) in hist {
        bytes.extend_from_slice(&c.to_le_bytes());
        bytes.extend_from_slice(&count.to_le_bytes());
    }
    for w in &rho.enc {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let aut_order = group_order(order, &search.generators);
    CanonicalForm {
        certificate: Certificate(bytes),
        aut_order,
        generators: search.generators,
    }
}

// ---------------------------------------------------------------------------
// Orbit-stabilizer chain for group orders.

fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

/// Applies `a` then `b`.
fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().map(|&x| b[x as usize]).collect()
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

struct ChainLevel {
    base: usize,
    /// rep[q] maps base to q; set once, never replaced.
    rep: Vec<Option<Vec<u32>>>,
    orbit: Vec<u32>,
    processed: usize,
    verified: HashSet<(u32, u32)>,
}

struct Chain {
    n: usize,
    /// All residues, tagged with the level they belong to.
    gens: Vec<(usize, Vec<u32>)>,
    levels: Vec<ChainLevel>,
}

impl Chain {
    fn new(n: usize) -> Chain {
        Chain {
            n,
            gens: Vec::new(),
            levels: Vec::new(),
        }
    }

    fn strip(&self, mut g: Vec<u32>) -> (usize, Vec<u32>) {
        for (i, level) in self.levels.iter().enumerate() {
            let q = g[level.base] as usize;
            match &level.rep[q] {
                Some(r) => g = compose(&g, &invert(r)),
                None => return (i, g),
            }
        }
        (self.levels.len(), g)
    }

    /// Strips g and stores a nonidentity residue, invalidating the orbits of
    /// every level it can now act on. Returns false for redundant input.
    fn place(&mut self, g: Vec<u32>) -> bool {
        let (lvl, residue) = self.strip(g);
        if is_identity(&residue) {
            return false;
        }
        if lvl == self.levels.len() {
            let base = residue
                .iter()
                .enumerate()
                .position(|(i, &x)| i as u32 != x)
                .expect("residue is not the identity");
            let mut rep = vec![None; self.n];
            rep[base] = Some((0..self.n as u32).collect());
            self.levels.push(ChainLevel {
                base,
                rep,
                orbit: vec![base as u32],
                processed: 0,
                verified: HashSet::new(),
            });
        }
        self.gens.push((lvl, residue));
        for level in &mut self.levels[..=lvl] {
            level.processed = 0;
        }
        true
    }

    /// BFS closure of one level's orbit under its effective generators
    /// (everything stored at this level or deeper).
    fn rebuild_orbit(&mut self, i: usize) {
        let gen_ids: Vec<usize> = (0..self.gens.len())
            .filter(|&g| self.gens[g].0 >= i)
            .collect();
        while self.levels[i].processed < self.levels[i].orbit.len() {
            let q = self.levels[i].orbit[self.levels[i].processed] as usize;
            self.levels[i].processed += 1;
            let rq = self.levels[i].rep[q]
                .clone()
                .expect("orbit points have reps");
            for &gid in &gen_ids {
                let g = &self.gens[gid].1;
                let t = g[q] as usize;
                if self.levels[i].rep[t].is_none() {
                    self.levels[i].rep[t] = Some(compose(&rq, g));
                    self.levels[i].orbit.push(t as u32);
                }
            }
        }
    }

    /// Verifies Schreier generators until the chain is closed: at the
    /// fixpoint every Schreier generator strips to the identity, so the
    /// levels form a genuine stabilizer chain.
    fn close(&mut self) {
        'outer: loop {
            for i in 0..self.levels.len() {
                self.rebuild_orbit(i);
            }
            for i in 0..self.levels.len() {
                let gen_ids: Vec<u32> = (0..self.gens.len() as u32)
                    .filter(|&g| self.gens[g as usize].0 >= i)
                    .collect();
                for qi in 0..self.levels[i].orbit.len() {
                    let q = self.levels[i].orbit[qi];
                    for &gid in &gen_ids {
                        if self.levels[i].verified.contains(&(q, gid)) {
                            continue;
                        }
                        self.levels[i].verified.insert((q, gid));
                        let g = &self.gens[gid as usize].1;
                        let rq = self.levels[i].rep[q as usize]
                            .as_ref()
                            .expect("orbit point has rep");
                        let t = g[q as usize] as usize;
                        let rt = self.levels[i].rep[t]
                            .as_ref()
                            .expect("orbit closed under effective generators");
                        let schreier = compose(&compose(rq, g), &invert(rt));
                        if self.place(schreier) {
                            continue 'outer;
                        }
                    }
                }
            }
            return;
        }
    }

    fn order(&self) -> BigInt {
        let mut order = BigInt::from(1);
        for level in &self.levels {
            order *= BigInt::from(level.orbit.len());
        }
        order
    }
}

/// Order of the permutation group generated by `gens`.
pub fn group_order(npoints: usize, gens: &[Vec<u32>]) -> BigInt {
    let mut chain = Chain::new(npoints);
    for g in gens {
        assert_eq!(g.len(), npoints);
        if chain.place(g.clone()) {
            chain.close();
        }
    }
    chain.order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_latin_square, random_paratopism_image, SplitMix64};

    #[test]
    fn graph_shape_formulas() {
        let m = MolsList::single(LatinSquare::cyclic(3));
        let g = encode_graph(&m.to_oa(), EquivalenceMode::SpeciesMols);
        assert_eq!(g.order(), 3 + 9 + 9);
        assert_eq!(g.edge_count(), 3 * 3 + 9 * 3);
        let pair9 = encode_graph(
            &MolsList::single(LatinSquare::elementary_abelian(9)).to_oa(),
            EquivalenceMode::SpeciesMols,
        );
        assert_eq!(pair9.order(), 3 + 27 + 81);
    }

    fn brute_aut_order(g: &ColoredGraph) -> u64 {
        let mut count = 0;
        crate::perm::for_each_perm(g.order(), |p| {
            let images: Vec<u32> = p.images().iter().map(|&x| x as u32).collect();
            if g.is_automorphism(&images) {
                count += 1;
            }
        });
        count
    }

    fn brute_isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> bool {
        if a.order() != b.order() {
            return false;
        }
        let mut found = false;
        crate::perm::for_each_perm(a.order(), |p| {
            if found {
                return;
            }
            let ok = (0..a.order()).all(|v| b.color(p.apply(v)) == a.color(v))
                && (0..a.order()).all(|x| {
                    (x + 1..a.order())
                        .all(|y| a.has_edge(x, y) == b.has_edge(p.apply(x), p.apply(y)))
                });
            if ok {
                found = true;
            }
        });
        found
    }

    fn random_colored_graph(order: usize, ncolors: u16, rng: &mut SplitMix64) -> ColoredGraph {
        let colors = (0..order)
            .map(|_| (rng.below(ncolors as usize)) as u16)
            .collect();
        let mut g = ColoredGraph::new(order, colors);
        for a in 0..order {
            for b in a + 1..order {
                if rng.below(2) == 1 {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    #[test]
    fn canonize_agrees_with_brute_force_on_small_graphs() {
        let mut rng = SplitMix64::new(101);
        for trial in 0..80 {
            let order = 2 + rng.below(6);
            let g = random_colored_graph(order, 1 + rng.below(3) as u16, &mut rng);
            let form = canonize(&g);
            assert_eq!(
                form.aut_order,
                BigInt::from(brute_aut_order(&g)),
                "trial {trial}: aut order mismatch"
            );
            // A random relabeling must give the same certificate.
            let p = crate::random::random_perm(order, &mut rng);
            let mut colors = vec![0u16; order];
            for v in 0..order {
                colors[p.apply(v)] = g.color(v);
            }
            let mut h = ColoredGraph::new(order, colors);
            for a in 0..order {
                for b in a + 1..order {
                    if g.has_edge(a, b) {
                        h.add_edge(p.apply(a), p.apply(b));
                    }
                }
            }
            assert_eq!(
                form.certificate,
                canonize(&h).certificate,
                "trial {trial}: relabel"
            );
        }
    }

    #[test]
    fn certificates_separate_nonisomorphic_graphs() {
        let mut rng = SplitMix64::new(103);
        for _ in 0..50 {
            let order = 2 + rng.below(5);
            let a = random_colored_graph(order, 2, &mut rng);
            let b = random_colored_graph(order, 2, &mut rng);
            assert_eq!(
                canonize(&a).certificate == canonize(&b).certificate,
                brute_isomorphic(&a, &b)
            );
        }
    }

    #[test]
    fn paratopic_lists_share_certificates() {
        let mut rng = SplitMix64::new(107);
        let base = MolsList::single(random_latin_square(5, &mut rng));
        let cert = mols_certificate(&base, EquivalenceMode::SpeciesMols);
        for _ in 0..20 {
            let image = random_paratopism_image(&base, &mut rng);
            assert_eq!(cert, mols_certificate(&image, EquivalenceMode::SpeciesMols));
        }
    }

    #[test]
    fn distinct_species_get_distinct_certificates() {
        let z4 = square_species_certificate(&LatinSquare::cyclic(4));
        let ea4 = square_species_certificate(&LatinSquare::elementary_abelian(4));
        assert_ne!(z4, ea4);
    }

    #[test]
    fn known_small_group_orders() {
        // Species sizes 6 * 24^3 / par for order 4 must partition the 576
        // squares into 432 + 144, forcing par(Z4) = 192 and par(EA4) = 576.
        let z4 = par_order(&MolsList::single(LatinSquare::cyclic(4)));
        assert_eq!(z4, BigInt::from(192));
        let ea4 = par_order(&MolsList::single(LatinSquare::elementary_abelian(4)));
        assert_eq!(ea4, BigInt::from(576));
        // Z5: atp = 5^2 * |Aut(Z5)| = 100; par adds the 6 conjugate roles.
        let z5 = MolsList::single(LatinSquare::cyclic(5));
        assert_eq!(par_order(&z5), BigInt::from(600));
        assert_eq!(atp_order(&z5), BigInt::from(100));
    }

    #[test]
    fn atp_divides_par() {
        let mut rng = SplitMix64::new(109);
        for _ in 0..10 {
            let l = random_latin_square(6, &mut rng);
            let m = MolsList::single(l);
            let par = par_order(&m);
            let atp = atp_order(&m);
            assert_eq!(&par % &atp, BigInt::from(0));
        }
    }

    #[test]
    fn chain_on_known_groups() {
        let s5 = group_order(5, &[vec![1, 0, 2, 3, 4], vec![1, 2, 3, 4, 0]]);
        assert_eq!(s5, BigInt::from(120));
        let v4 = group_order(4, &[vec![1, 0, 3, 2], vec![2, 3, 0, 1]]);
        assert_eq!(v4, BigInt::from(4));
        assert_eq!(group_order(3, &[]), BigInt::from(1));
        // A3 = <(012)> on 5 points with a fixed tail.
        let a3 = group_order(5, &[vec![1, 2, 0, 3, 4]]);
        assert_eq!(a3, BigInt::from(3));
    }

    #[test]
    fn chain_matches_brute_force_on_random_groups() {
        let mut rng = SplitMix64::new(113);
        for _ in 0..30 {
            let n = 4 + rng.below(3);
            let gens: Vec<Vec<u32>> = (0..2)
                .map(|_| {
                    let p = crate::random::random_perm(n, &mut rng);
                    (0..n).map(|i| p.apply(i) as u32).collect()
                })
                .collect();
            // Brute force: close the generated set under composition.
            let mut group: HashSet<Vec<u32>> = HashSet::new();
            group.insert((0..n as u32).collect());
            loop {
                let mut new = Vec::new();
                for g in &group {
                    for h in &gens {
                        let gh = compose(g, h);
                        if !group.contains(&gh) {
                            new.push(gh);
                        }
                    }
                }
                if new.is_empty() {
                    break;
                }
                group.extend(new);
            }
            assert_eq!(group_order(n, &gens), BigInt::from(group.len()));
        }
    }
}
