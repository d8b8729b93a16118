//! Occupation-number basis of a chain, ordered lexicographically from the top.

use crate::error::{Error, Result};

/// Largest basis handled.
pub const MAX_DIM: u128 = 5_000_000;
/// Longest chain handled.
pub const MAX_SITES: usize = 12;

const BITS: usize = 5;
const MASK: u64 = (1 << BITS) - 1;
/// Largest single-site occupation representable in the packed key.
pub const MAX_OCCUPATION: usize = MASK as usize;

/// Fock states stored as packed keys, site 0 in the most significant field.
///
/// Descending keys coincide with descending lexicographic order of the occupation
/// lists, e.g. `(2,0), (1,1), (0,2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    sites: usize,
    n_cap: usize,
    states: Vec<u64>,
}

/// Number of occupation lists of `sites` entries in `0..=cap` summing to `n`.
pub fn capped_dimension(sites: usize, n: usize, cap: usize) -> u128 {
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for _ in 0..sites {
        let mut next = vec![0u128; n + 1];
        for (total, w) in ways.iter().enumerate() {
            if *w == 0 {
                continue;
            }
            for k in 0..=cap.min(n - total) {
                next[total + k] += w;
            }
        }
        ways = next;
    }
    ways[n]
}

impl Basis {
    /// Fixed-`N` sector.
    pub fn new(sites: usize, bosons: usize, n_cap: usize) -> Result<Self> {
        Self::check(sites, n_cap)?;
        let dim = capped_dimension(sites, bosons, n_cap);
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow { dim, limit: MAX_DIM });
        }
        if dim == 0 {
            return Err(Error::invalid(
                "n_cap",
                format!("{bosons} bosons do not fit on {sites} sites at cap {n_cap}"),
            ));
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut occ = vec![0u8; sites];
        enumerate(&mut occ, 0, bosons, n_cap, &mut states);
        Ok(Self { sites, n_cap, states })
    }

    /// Union of the sectors `N = 0..=max_bosons`, in descending key order.
    pub fn all_sectors(sites: usize, max_bosons: usize, n_cap: usize) -> Result<Self> {
        Self::check(sites, n_cap)?;
        let dim: u128 = (0..=max_bosons).map(|n| capped_dimension(sites, n, n_cap)).sum();
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow { dim, limit: MAX_DIM });
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut occ = vec![0u8; sites];
        for n in 0..=max_bosons {
            enumerate(&mut occ, 0, n, n_cap, &mut states);
        }
        states.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { sites, n_cap, states })
    }

    fn check(sites: usize, n_cap: usize) -> Result<()> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::invalid("sites", format!("need 1..={MAX_SITES}, got {sites}")));
        }
        if n_cap > MAX_OCCUPATION {
            return Err(Error::invalid(
                "n_cap",
                format!("at most {MAX_OCCUPATION}, got {n_cap}"),
            ));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_cap(&self) -> usize {
        self.n_cap
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.states
    }

    fn shift(&self, site: usize) -> usize {
        BITS * (self.sites - 1 - site)
    }

    #[inline]
    pub fn occupation(&self, key: u64, site: usize) -> usize {
        ((key >> self.shift(site)) & MASK) as usize
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        let key = self.states[index];
        (0..self.sites).map(|i| self.occupation(key, i)).collect()
    }

    pub fn total(&self, key: u64) -> usize {
        (0..self.sites).map(|i| self.occupation(key, i)).sum()
    }

    /// Packed key of an occupation list.
    pub fn key(&self, occ: &[usize]) -> u64 {
        occ.iter()
            .enumerate()
            .fold(0, |k, (i, &n)| k | ((n as u64) << self.shift(i)))
    }

    /// Key after moving one boson from `from` to `to`; `None` if blocked.
    #[inline]
    pub fn hop(&self, key: u64, from: usize, to: usize) -> Option<u64> {
        let (nf, nt) = (self.occupation(key, from), self.occupation(key, to));
        (nf > 0 && nt < self.n_cap).then(|| key - (1 << self.shift(from)) + (1 << self.shift(to)))
    }

    pub fn index(&self, key: u64) -> Option<usize> {
        self.states.binary_search_by(|probe| key.cmp(probe)).ok()
    }
}

fn enumerate(occ: &mut [u8], site: usize, left: usize, cap: usize, out: &mut Vec<u64>) {
    let sites = occ.len();
    if site + 1 == sites {
        if left <= cap {
            occ[site] = left as u8;
            out.push(pack(occ));
        }
        return;
    }
    let room = cap * (sites - site - 1);
    for n in (0..=left.min(cap)).rev() {
        if left - n > room {
            break;
        }
        occ[site] = n as u8;
        enumerate(occ, site + 1, left - n, cap, out);
    }
}

fn pack(occ: &[u8]) -> u64 {
    occ.iter().fold(0, |k, &n| (k << BITS) | n as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sites_two_bosons() {
        let b = Basis::new(2, 2, 2).unwrap();
        let occ: Vec<_> = (0..b.len()).map(|i| b.occupations(i)).collect();
        assert_eq!(occ, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(Basis::new(3, 3, 3).unwrap().len(), 10);
        assert_eq!(Basis::new(8, 8, 8).unwrap().len(), 6435);
        assert_eq!(capped_dimension(8, 8, 8), 6435);
        assert_eq!(capped_dimension(4, 4, 1), 1);
    }

    #[test]
    fn ordering_and_lookup_are_consistent() {
        let b = Basis::new(5, 6, 3).unwrap();
        assert_eq!(b.len() as u128, capped_dimension(5, 6, 3));
        for w in b.keys().windows(2) {
            assert!(w[0] > w[1]);
        }
        for i in 0..b.len() {
            let occ = b.occupations(i);
            assert!(occ.iter().all(|&n| n <= 3));
            assert_eq!(occ.iter().sum::<usize>(), 6);
            assert_eq!(b.index(b.key(&occ)), Some(i));
        }
    }

    #[test]
    fn multi_sector_union() {
        let b = Basis::all_sectors(3, 3, 3).unwrap();
        assert_eq!(b.len(), 1 + 3 + 6 + 10);
    }

    #[test]
    fn overflow_and_bad_inputs() {
        assert!(matches!(Basis::new(12, 30, 30), Err(Error::DimensionOverflow { .. })));
        assert!(Basis::new(13, 2, 2).is_err());
        assert!(Basis::new(2, 5, 2).is_err());
    }
}
