//! Kruskal-Wallis H test with midrank tie correction.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub p_value: f64,
}

/// Two-sample Kruskal-Wallis test.
pub fn kruskal_wallis(a: &[f64], b: &[f64]) -> Result<KruskalWallis> {
    kruskal_wallis_groups(&[a, b])
}

/// Kruskal-Wallis test over any number of groups; `p` comes from the
/// chi-square distribution with `groups - 1` degrees of freedom.
pub fn kruskal_wallis_groups(groups: &[&[f64]]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::InvalidConfig("need at least two groups".to_string()));
    }
    if let Some(g) = groups.iter().find(|g| g.len() < 2) {
        return Err(Error::SampleTooSmall(g.len()));
    }
    if groups.iter().flat_map(|g| g.iter()).any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("sample contains NaN".to_string()));
    }

    let mut pooled: Vec<(f64, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(gi, g)| g.iter().map(move |&v| (v, gi)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = pooled.len();

    let mut rank_sums = vec![0.0; groups.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // Ranks i+1 ..= j+1 share their average.
        let midrank = (i + j + 2) as f64 / 2.0;
        for &(_, g) in &pooled[i..=j] {
            rank_sums[g] += midrank;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let nf = n as f64;
    let correction = 1.0 - tie_term / (nf * nf * nf - nf);
    if correction <= 0.0 {
        // Every observation identical.
        return Ok(KruskalWallis {
            h: 0.0,
            p_value: 1.0,
        });
    }
    let spread: f64 = rank_sums
        .iter()
        .zip(groups)
        .map(|(r, g)| r * r / g.len() as f64)
        .sum();
    let h = ((12.0 / (nf * (nf + 1.0)) * spread - 3.0 * (nf + 1.0)) / correction).max(0.0);
    let df = (groups.len() - 1) as f64;
    let chi = ChiSquared::new(df).expect("df >= 1");
    let p_value = chi.sf(h).clamp(0.0, 1.0);
    Ok(KruskalWallis { h, p_value })
}
