//! Coordinate basis: strictly increasing up-spin positions on the ring.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{binomial, Real};

/// Sorted up-spin sites `0 <= x_1 < ... < x_N <= L - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration(Vec<usize>);

impl Configuration {
    pub fn new<T: Real>(sites: Vec<usize>, params: &ModelParams<T>) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidConfiguration {
            sites: sites.iter().map(|&s| s as i64).collect(),
            reason: reason.to_string(),
        };
        if sites.len() != params.n {
            return Err(invalid(&format!("expected {} sites", params.n)));
        }
        if sites.iter().any(|&s| s >= params.l) {
            return Err(invalid(&format!("sites must lie in [0, {})", params.l)));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sites must be strictly increasing"));
        }
        Ok(Self(sites))
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, site: usize) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    /// Sites as signed exponents.
    pub fn exponents(&self) -> Vec<i64> {
        self.0.iter().map(|&s| s as i64).collect()
    }

    /// Occupation bitmask (bit `s` set when site `s` holds an up-spin).
    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &s| m | (1u64 << s))
    }

    pub(crate) fn from_mask(mask: u64) -> Self {
        Self((0..64).filter(|s| mask >> s & 1 == 1).collect())
    }

    /// Rotation by `shift` sites around a ring of length `l`, re-sorted.
    pub fn rotate(&self, shift: i64, l: usize) -> Self {
        let mut v: Vec<usize> = self
            .0
            .iter()
            .map(|&s| (s as i64 + shift).rem_euclid(l as i64) as usize)
            .collect();
        v.sort_unstable();
        Self(v)
    }
}

/// All C(L, N) configurations in lexicographic order.
pub fn enumerate_configurations<T: Real>(params: &ModelParams<T>) -> Vec<Configuration> {
    (0..params.l)
        .combinations(params.n)
        .map(Configuration)
        .collect()
}

/// Position of `x` in the lexicographic enumeration.
pub fn config_rank<T: Real>(x: &Configuration, params: &ModelParams<T>) -> Result<usize> {
    let x = Configuration::new(x.0.clone(), params)?;
    let (l, n) = (params.l, params.n);
    let mut rank = 0;
    let mut next = 0;
    for (i, &site) in x.0.iter().enumerate() {
        for v in next..site {
            rank += binomial(l - 1 - v, n - 1 - i);
        }
        next = site + 1;
    }
    Ok(rank)
}

/// Inverse of [`config_rank`].
pub fn config_unrank<T: Real>(mut rank: usize, params: &ModelParams<T>) -> Result<Configuration> {
    let (l, n) = (params.l, params.n);
    if rank >= params.dimension() {
        return Err(Error::InvalidParams(format!(
            "rank {rank} out of range for C({l}, {n})"
        )));
    }
    let mut sites = Vec::with_capacity(n);
    let mut v = 0;
    for i in 0..n {
        loop {
            let block = binomial(l - 1 - v, n - 1 - i);
            if rank < block {
                break;
            }
            rank -= block;
            v += 1;
        }
        sites.push(v);
        v += 1;
    }
    Ok(Configuration(sites))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(l: usize, n: usize) -> ModelParams<f64> {
        ModelParams::new(l, n, 0.0).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let c: Vec<Vec<usize>> = enumerate_configurations(&p(3, 1))
            .into_iter()
            .map(|c| c.0)
            .collect();
        assert_eq!(c, vec![vec![0], vec![1], vec![2]]);
        let c: Vec<Vec<usize>> = enumerate_configurations(&p(4, 2))
            .into_iter()
            .map(|c| c.0)
            .collect();
        assert_eq!(
            c,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(enumerate_configurations(&p(21, 3)).len(), 1330);
    }

    #[test]
    fn rank_examples() {
        let params = p(4, 2);
        let r = |s: Vec<usize>| config_rank(&Configuration::new(s, &params).unwrap(), &params).unwrap();
        assert_eq!(r(vec![0, 1]), 0);
        assert_eq!(r(vec![2, 3]), 5);
        assert_eq!(r(vec![0, 2]), 1);
    }

    #[test]
    fn rank_round_trips_exhaustively() {
        for (n, l) in [(1, 5), (2, 7), (3, 7)] {
            let params = p(l, n);
            for (i, c) in enumerate_configurations(&params).iter().enumerate() {
                assert_eq!(config_rank(c, &params).unwrap(), i);
                assert_eq!(&config_unrank(i, &params).unwrap(), c);
            }
        }
    }

    #[test]
    fn invalid_configurations() {
        let params = p(5, 2);
        assert!(Configuration::new(vec![1, 1], &params).is_err());
        assert!(Configuration::new(vec![3, 1], &params).is_err());
        assert!(Configuration::new(vec![1, 5], &params).is_err());
        assert!(Configuration::new(vec![1], &params).is_err());
        assert!(config_unrank(10, &params).is_err());
    }

    #[test]
    fn rotation_and_mask() {
        let params = p(7, 3);
        let c = Configuration::new(vec![0, 3, 6], &params).unwrap();
        assert_eq!(c.rotate(1, 7).sites(), &[0, 1, 4]);
        assert_eq!(Configuration::from_mask(c.mask()), c);
        assert!(c.contains(3) && !c.contains(2));
    }
}
