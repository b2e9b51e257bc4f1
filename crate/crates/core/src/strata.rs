//! Conjugacy classes of SU(2) representations in U(N).
//!
//! A representation is fixed up to conjugation by its isotypic multiplicities
//! `m_d` (irreducible `V_d` has dimension `d + 1`), so the families are the
//! integer partitions of `N`. The orbit of a family is `U(N)/∏ U(m_d)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiplicities `d ↦ m_d`; zero entries are not stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiplicityFamily {
    mults: BTreeMap<usize, usize>,
}

impl MultiplicityFamily {
    pub fn new(mults: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (d, m) in mults {
            if m > 0 {
                *map.entry(d).or_insert(0) += m;
            }
        }
        Self { mults: map }
    }

    /// From partition parts; a part of size `s` is one copy of `V_{s−1}`.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput("partition part of size 0".into()));
        }
        Ok(Self::new(parts.iter().map(|&s| (s - 1, 1))))
    }

    /// The two-level type `V₁ ⊕ V₀^{⊕(N−2)}`.
    pub fn two_level(n: usize) -> Self {
        Self::new([(1, 1), (0, n.saturating_sub(2))])
    }

    pub fn multiplicity(&self, d: usize) -> usize {
        self.mults.get(&d).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mults.iter().map(|(&d, &m)| (d, m))
    }

    /// `Σ m_d (d + 1)`.
    pub fn dim(&self) -> usize {
        self.iter().map(|(d, m)| m * (d + 1)).sum()
    }

    /// Part sizes in non-increasing order.
    pub fn parts(&self) -> Vec<usize> {
        self.mults.iter().rev().flat_map(|(&d, &m)| std::iter::repeat_n(d + 1, m)).collect()
    }
}

impl std::fmt::Display for MultiplicityFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms: Vec<String> = self.mults.iter().rev().map(|(d, m)| format!("m{d}={m}")).collect();
        write!(f, "{{{}}}", terms.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumInfo {
    pub mults: MultiplicityFamily,
    pub faithful: bool,
    /// `m_d` for each occurring `d`, ascending in `d`: the stabilizer is `∏ U(m_d)`.
    pub stabilizer: Vec<usize>,
    pub orbit_dim: usize,
}

/// Every multiplicity family of total dimension `n`, in reverse lexicographic
/// order of the partition parts.
pub fn enumerate_families(n: usize) -> Vec<MultiplicityFamily> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    partitions(n, n, &mut parts, &mut out);
    out
}

fn partitions(rest: usize, max: usize, parts: &mut Vec<usize>, out: &mut Vec<MultiplicityFamily>) {
    if rest == 0 {
        out.push(MultiplicityFamily::from_parts(parts).expect("positive parts"));
        return;
    }
    for s in (1..=max.min(rest)).rev() {
        parts.push(s);
        partitions(rest - s, s, parts, out);
        parts.pop();
    }
}

/// Injective iff an irreducible of even dimension (odd `d`) occurs.
pub fn is_faithful(m: &MultiplicityFamily) -> bool {
    m.iter().any(|(d, k)| d % 2 == 1 && k > 0)
}

pub fn stratum_info(m: &MultiplicityFamily, n: usize) -> Result<StratumInfo> {
    let found = m.dim();
    if found != n {
        return Err(Error::DimMismatch { expected: n, found });
    }
    let stabilizer: Vec<usize> = m.iter().map(|(_, k)| k).collect();
    let orbit_dim = n * n - stabilizer.iter().map(|k| k * k).sum::<usize>();
    Ok(StratumInfo { mults: m.clone(), faithful: is_faithful(m), stabilizer, orbit_dim })
}

/// Faithful strata by decreasing orbit dimension; ties keep family order.
pub fn enumerate_strata(n: usize) -> Result<Vec<StratumInfo>> {
    if n < 2 {
        return Err(Error::NoFaithfulStrata(n));
    }
    let mut strata: Vec<StratumInfo> = enumerate_families(n)
        .iter()
        .filter(|m| is_faithful(m))
        .map(|m| stratum_info(m, n).expect("family sums to n"))
        .collect();
    strata.sort_by_key(|s| std::cmp::Reverse(s.orbit_dim));
    Ok(strata)
}

/// All families, faithful or not, in the same order as [`enumerate_strata`].
pub fn enumerate_all_strata(n: usize) -> Result<Vec<StratumInfo>> {
    if n == 0 {
        return Err(Error::InvalidDim(n));
    }
    let mut strata: Vec<StratumInfo> =
        enumerate_families(n).iter().map(|m| stratum_info(m, n).expect("family sums to n")).collect();
    strata.sort_by_key(|s| std::cmp::Reverse(s.orbit_dim));
    Ok(strata)
}

/// `4N − 5`, the orbit dimension of `V₁ ⊕ V₀^{⊕(N−2)}`.
pub fn two_level_stratum_dim(n: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::InvalidDim(n));
    }
    Ok(4 * n - 5)
}

/// Aligned text table of strata.
pub fn strata_table(strata: &[StratumInfo]) -> String {
    let rows: Vec<[String; 5]> = strata
        .iter()
        .map(|s| {
            let parts: Vec<String> = s.mults.parts().iter().map(ToString::to_string).collect();
            [
                s.mults.to_string(),
                format!("({})", parts.join(",")),
                s.faithful.to_string(),
                format!("{:?}", s.stabilizer),
                s.orbit_dim.to_string(),
            ]
        })
        .collect();
    let header = ["family", "parts", "faithful", "stabilizer", "orbit_dim"];
    let mut widths = header.map(str::len);
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&header);
    for r in &rows {
        line(&r.each_ref().map(String::as_str));
    }
    out
}
