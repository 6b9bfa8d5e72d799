//! Permutations of `0..n` for n at most 10.

/// A permutation of `0..n`, stored in one-line notation: `perm[i]` is the
/// image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u8).collect())
    }

    /// Builds a permutation from its one-line images, checking bijectivity.
    pub fn from_images(images: Vec<u8>) -> Option<Perm> {
        let n = images.len();
        let mut seen = [false; 16];
        for &x in &images {
            if x as usize >= n || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm(inv)
    }

    /// Composition applying `self` first, then `after`.
    pub fn then(&self, after: &Perm) -> Perm {
        assert_eq!(self.len(), after.len());
        Perm(self.0.iter().map(|&x| after.0[x as usize]).collect())
    }

    /// Lengths of the cycles, sorted ascending.
    pub fn cycle_type(&self) -> Vec<u8> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u8;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                len += 1;
                i = self.apply(i);
            }
            lengths.push(len);
        }
        lengths.sort_unstable();
        lengths
    }
}

/// Calls `f` with every permutation of `0..n`, in lexicographic order of the
/// one-line notation.
pub fn for_each_perm<F: FnMut(&Perm)>(n: usize, mut f: F) {
    let mut images: Vec<u8> = (0..n as u8).collect();
    loop {
        f(&Perm(images.clone()));
        // next_permutation
        if n < 2 {
            return;
        }
        let mut i = n - 1;
        while i > 0 && images[i - 1] >= images[i] {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        let mut j = n - 1;
        while images[j] <= images[i - 1] {
            j -= 1;
        }
        images.swap(i - 1, j);
        images[i..].reverse();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_compose() {
        let p = Perm::from_images(vec![2, 0, 1, 3]).unwrap();
        assert!(p.then(&p.inverse()).is_identity());
        assert!(p.inverse().then(&p).is_identity());
        let q = Perm::from_images(vec![1, 0, 3, 2]).unwrap();
        let pq = p.then(&q);
        for i in 0..4 {
            assert_eq!(pq.apply(i), q.apply(p.apply(i)));
        }
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_none());
        assert!(Perm::from_images(vec![0, 3]).is_none());
    }

    #[test]
    fn cycle_type_counts() {
        let p = Perm::from_images(vec![1, 0, 3, 4, 2]).unwrap();
        assert_eq!(p.cycle_type(), vec![2, 3]);
        assert_eq!(Perm::identity(4).cycle_type(), vec![1, 1, 1, 1]);
    }

    #[test]
    fn perm_enumeration_is_exhaustive() {
        let mut count = 0;
        let mut last: Option<Vec<u8>> = None;
        for_each_perm(4, |p| {
            if let Some(prev) = &last {
                assert!(prev < &p.images().to_vec());
            }
            last = Some(p.images().to_vec());
            count += 1;
        });
        assert_eq!(count, 24);
    }
}
