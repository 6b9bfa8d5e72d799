//! Exact cover solving with Knuth's Algorithm X over dancing links.
//!
//! An instance is a set of items (the universe) and a collection of subsets;
//! a solution is a subcollection of subsets partitioning the universe. The
//! solver is deterministic: items are chosen by fewest remaining covering
//! subsets (ties to the lowest item index) and subsets are tried in input
//! order, so enumeration order is a function of the instance alone.

use std::ops::ControlFlow;

/// An exact cover instance over items `0..items`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: usize,
    subsets: Vec<Vec<u32>>,
}

/// Errors raised while building an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    /// A subset refers to an item index outside the universe.
    ItemOutOfRange { subset: usize, item: u32 },
    /// A subset lists the same item twice.
    DuplicateItem { subset: usize, item: u32 },
}

impl std::fmt::Display for InstanceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InstanceError::ItemOutOfRange { subset, item } => {
                write!(
                    f,
                    "subset {subset} references item {item} outside the universe"
                )
            }
            InstanceError::DuplicateItem { subset, item } => {
                write!(f, "subset {subset} lists item {item} more than once")
            }
        }
    }
}

impl std::error::Error for InstanceError {}

impl Instance {
    /// Builds an instance, checking that every subset references valid,
    /// distinct items.
    pub fn new(items: usize, subsets: Vec<Vec<u32>>) -> Result<Self, InstanceError> {
        let mut seen = vec![false; items];
        for (si, subset) in subsets.iter().enumerate() {
            for &item in subset {
                if (item as usize) >= items {
                    return Err(InstanceError::ItemOutOfRange { subset: si, item });
                }
                if seen[item as usize] {
                    // reset marks before bailing out
                    for &j in subset {
                        if (j as usize) < items {
                            seen[j as usize] = false;
                        }
                    }
                    return Err(InstanceError::DuplicateItem { subset: si, item });
                }
                seen[item as usize] = true;
            }
            for &item in subset {
                seen[item as usize] = false;
            }
        }
        Ok(Instance { items, subsets })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn subsets(&self) -> &[Vec<u32>] {
        &self.subsets
    }

    /// Counts all exact covers.
    pub fn count_solutions(&self) -> u64 {
        let mut count = 0u64;
        self.for_each_solution(|_| {
            count += 1;
            ControlFlow::Continue(())
        });
        count
    }

    /// Collects every exact cover as a sorted list of subset indices.
    pub fn solutions(&self) -> Vec<Vec<u32>> {
        let mut all = Vec::new();
        self.for_each_solution(|sol| {
            let mut s = sol.to_vec();
            s.sort_unstable();
            all.push(s);
            ControlFlow::Continue(())
        });
        all
    }

    /// Visits every exact cover; the callback receives the chosen subset
    /// indices in search order and may stop the enumeration early.
    pub fn for_each_solution<F>(&self, mut visit: F)
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        let mut links = Links::build(self);
        let mut stack = Vec::new();
        let _ = links.search(&mut stack, &mut visit);
    }
}

/// Node arena for the four-way linked lists. Index 0 is the root header;
/// indices `1..=items` are the item headers; the rest are row nodes.
struct Links {
    left: Vec<u32>,
    right: Vec<u32>,
    up: Vec<u32>,
    down: Vec<u32>,
    /// For a row node, the header it belongs to; unused for headers.
    header: Vec<u32>,
    /// For a row node, the subset it represents; for a header, its size.
    tag: Vec<u32>,
}

impl Links {
    fn build(inst: &Instance) -> Links {
        let n_nodes = 1 + inst.items + inst.subsets.iter().map(Vec::len).sum::<usize>();
        let mut l = Links {
            left: vec![0; n_nodes],
            right: vec![0; n_nodes],
            up: vec![0; n_nodes],
            down: vec![0; n_nodes],
            header: vec![0; n_nodes],
            tag: vec![0; n_nodes],
        };
        // Header ring.
        for h in 0..=inst.items {
            l.left[h] = if h == 0 {
                inst.items as u32
            } else {
                (h - 1) as u32
            };
            l.right[h] = if h == inst.items { 0 } else { (h + 1) as u32 };
            l.up[h] = h as u32;
            l.down[h] = h as u32;
        }
        // Row nodes.
        let mut next = inst.items + 1;
        for (si, subset) in inst.subsets.iter().enumerate() {
            let first = next;
            for &item in subset {
                let node = next;
                next += 1;
                let h = item as usize + 1;
                l.header[node] = h as u32;
                l.tag[node] = si as u32;
                // vertical insert above the header (i.e. at the list tail)
                let tail = l.up[h];
                l.up[node] = tail;
                l.down[node] = h as u32;
                l.down[tail as usize] = node as u32;
                l.up[h] = node as u32;
                l.tag[h] += 1;
                // horizontal ring within the row
                if node == first {
                    l.left[node] = node as u32;
                    l.right[node] = node as u32;
                } else {
                    let prev = node - 1;
                    let head = l.right[prev];
                    l.right[node] = head;
                    l.left[node] = prev as u32;
                    l.right[prev] = node as u32;
                    l.left[head as usize] = node as u32;
                }
            }
        }
        l
    }

    fn cover(&mut self, h: usize) {
        self.right[self.left[h] as usize] = self.right[h];
        self.left[self.right[h] as usize] = self.left[h];
        let mut i = self.down[h] as usize;
        while i != h {
            let mut j = self.right[i] as usize;
            while j != i {
                self.down[self.up[j] as usize] = self.down[j];
                self.up[self.down[j] as usize] = self.up[j];
                self.tag[self.header[j] as usize] -= 1;
                j = self.right[j] as usize;
            }
            i = self.down[i] as usize;
        }
    }

    fn uncover(&mut self, h: usize) {
        let mut i = self.up[h] as usize;
        while i != h {
            let mut j = self.left[i] as usize;
            while j != i {
                self.tag[self.header[j] as usize] += 1;
                self.down[self.up[j] as usize] = j as u32;
                self.up[self.down[j] as usize] = j as u32;
                j = self.left[j] as usize;
            }
            i = self.up[i] as usize;
        }
        self.right[self.left[h] as usize] = h as u32;
        self.left[self.right[h] as usize] = h as u32;
    }

    fn search<F>(&mut self, stack: &mut Vec<u32>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> ControlFlow<()>,
    {
        if self.right[0] == 0 {
            return visit(stack);
        }
        // MRV: fewest covering subsets, ties to the leftmost header.
        let mut best = self.right[0] as usize;
        let mut h = self.right[best] as usize;
        while h != 0 {
            if self.tag[h] < self.tag[best] {
                best = h;
            }
            h = self.right[h] as usize;
        }
        if self.tag[best] == 0 {
            return ControlFlow::Continue(());
        }
        self.cover(best);
        let mut row = self.down[best] as usize;
        while row != best {
            stack.push(self.tag[row]);
            let mut j = self.right[row] as usize;
            while j != row {
                self.cover(self.header[j] as usize);
                j = self.right[j] as usize;
            }
            let flow = self.search(stack, visit);
            let mut j = self.left[row] as usize;
            while j != row {
                self.uncover(self.header[j] as usize);
                j = self.left[j] as usize;
            }
            stack.pop();
            flow?;
            row = self.down[row] as usize;
        }
        self.uncover(best);
        ControlFlow::Continue(())
    }
}
