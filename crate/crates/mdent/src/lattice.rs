//! Exact monomer-dimer counts on finite boxes, tori, and punctured boxes.
//!
//! Two independent counting paths are provided on purpose. The brute-force
//! path decides every edge in turn (include it in the matching or not) and is
//! kept maximally simple so it can serve as the ground-truth oracle. The
//! transfer path sweeps cells in memory order carrying a broken-profile
//! bitmask of "already covered by a dimer reaching forward", with a
//! generating polynomial in the dimer count as the state value; it handles
//! long boxes far beyond brute-force range. Counts are exact big integers
//! throughout.
//!
//! Points carry 1-based coordinates, so a box with dims `(m1, ..., md)` has
//! points `(x1, ..., xd)` with `1 <= xi <= mi`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Box,
    Torus,
    PuncturedBox,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Box => "box",
            GraphKind::Torus => "torus",
            GraphKind::PuncturedBox => "punctured-box",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    NoDims,
    ZeroDim,
    SiteOutOfRange(Vec<usize>),
    DeletionsNotAllowed(GraphKind),
    TransferNeedsBox,
    GuardExceeded { quantity: &'static str, value: usize, limit: usize },
    EmptyCount { ell: usize },
    CensusNeedsTwoDims,
}

impl LatticeError {
    /// Guard violations are resource refusals, not ill-formed requests;
    /// callers map them to a distinct exit status.
    pub fn is_guard(&self) -> bool {
        matches!(self, LatticeError::GuardExceeded { .. })
    }
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::NoDims => write!(f, "at least one dimension is required"),
            LatticeError::ZeroDim => write!(f, "every dimension must be at least 1"),
            LatticeError::SiteOutOfRange(p) => {
                write!(f, "site {p:?} lies outside the box (coordinates are 1-based)")
            }
            LatticeError::DeletionsNotAllowed(kind) => {
                write!(f, "deleted sites are not supported on kind '{}'", kind.as_str())
            }
            LatticeError::TransferNeedsBox => {
                write!(f, "transfer counting supports boxes (with optional punctures) only")
            }
            LatticeError::GuardExceeded { quantity, value, limit } => {
                write!(f, "size guard exceeded: {quantity} = {value} > {limit}")
            }
            LatticeError::EmptyCount { ell } => {
                write!(f, "no matchings with {ell} dimers exist on this graph")
            }
            LatticeError::CensusNeedsTwoDims => {
                write!(f, "profile census requires at least two dimensions")
            }
        }
    }
}

impl std::error::Error for LatticeError {}

/// Resource ceilings for the exact counters. Exceeding one is an error,
/// never a silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct SizeGuards {
    /// Maximum number of (alive) sites for brute-force enumeration.
    pub bruteforce_max_sites: usize,
    /// Maximum cross-section (product of all dims but the last) for the
    /// transfer sweep; this is the width of the state bitmask.
    pub transfer_max_window: usize,
}

impl Default for SizeGuards {
    fn default() -> SizeGuards {
        SizeGuards { bruteforce_max_sites: 30, transfer_max_window: 24 }
    }
}

/// A finite induced subgraph of `Z^d`: a box, a torus, or a box with some
/// sites deleted. Vertices are indexed densely in memory order (first
/// coordinate fastest).
#[derive(Debug, Clone)]
pub struct LatticeGraph {
    pub kind: GraphKind,
    pub dims: Vec<usize>,
    points: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl LatticeGraph {
    pub fn nsites(&self) -> usize {
        self.points.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn point(&self, idx: usize) -> &[usize] {
        &self.points[idx]
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.points.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }
}

/// Exact matching counts of one graph: `counts[l]` is the number of
/// matchings with exactly `l` dimers, as a big integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    pub kind: GraphKind,
    pub dims: Vec<usize>,
    pub nsites: usize,
    pub counts: Vec<BigUint>,
}

impl CountTable {
    /// Largest dimer count with a nonzero entry.
    pub fn max_ell(&self) -> usize {
        self.counts
            .iter()
            .rposition(|c| !c.is_zero())
            .unwrap_or(0)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut counts = serde_json::Map::new();
        for (ell, c) in self.counts.iter().enumerate() {
            counts.insert(ell.to_string(), serde_json::Value::String(c.to_string()));
        }
        serde_json::json!({
            "dims": self.dims,
            "kind": self.kind.as_str(),
            "nsites": self.nsites,
            "counts": counts,
        })
    }
}

/// Tilings of a layered box classified by their per-layer horizontal dimer
/// counts `h` (one entry per layer) and inter-layer vertical counts `v` (one
/// entry per adjacent layer pair). Layers are slices along the last
/// dimension.
#[derive(Debug, Clone)]
pub struct ProfileCensus {
    pub dims: Vec<usize>,
    pub ell: usize,
    pub profiles: BTreeMap<(Vec<u32>, Vec<u32>), BigUint>,
}

impl ProfileCensus {
    pub fn total(&self) -> BigUint {
        self.profiles.values().sum()
    }

    /// Cross-section size: number of sites in one layer.
    pub fn layer_size(&self) -> usize {
        self.dims[..self.dims.len() - 1].iter().product()
    }
}

fn validate_dims(dims: &[usize]) -> Result<(), LatticeError> {
    if dims.is_empty() {
        return Err(LatticeError::NoDims);
    }
    if dims.iter().any(|&m| m == 0) {
        return Err(LatticeError::ZeroDim);
    }
    Ok(())
}

fn validate_sites(dims: &[usize], sites: &[Vec<usize>]) -> Result<(), LatticeError> {
    for p in sites {
        if p.len() != dims.len() || p.iter().zip(dims).any(|(&x, &m)| x == 0 || x > m) {
            return Err(LatticeError::SiteOutOfRange(p.clone()));
        }
    }
    Ok(())
}

fn checked_site_count(dims: &[usize]) -> Result<usize, LatticeError> {
    dims.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).ok_or(
        LatticeError::GuardExceeded {
            quantity: "site count",
            value: usize::MAX,
            limit: usize::MAX,
        },
    )
}

fn flat_index(dims: &[usize], point: &[usize]) -> usize {
    let mut idx = 0;
    let mut stride = 1;
    for (&x, &m) in point.iter().zip(dims) {
        idx += (x - 1) * stride;
        stride *= m;
    }
    idx
}

fn unflatten(dims: &[usize], mut idx: usize) -> Vec<usize> {
    dims.iter()
        .map(|&m| {
            let x = idx % m + 1;
            idx /= m;
            x
        })
        .collect()
}

/// Builds the induced graph of a box, torus, or punctured box.
pub fn build_graph(
    kind: GraphKind,
    dims: &[usize],
    deleted_sites: &[Vec<usize>],
) -> Result<LatticeGraph, LatticeError> {
    validate_dims(dims)?;
    validate_sites(dims, deleted_sites)?;
    if !deleted_sites.is_empty() && kind != GraphKind::PuncturedBox {
        return Err(LatticeError::DeletionsNotAllowed(kind));
    }
    let n = checked_site_count(dims)?;
    let deleted: BTreeSet<usize> = deleted_sites.iter().map(|p| flat_index(dims, p)).collect();

    let mut alive_index = vec![usize::MAX; n];
    let mut points = Vec::with_capacity(n - deleted.len());
    for idx in 0..n {
        if !deleted.contains(&idx) {
            alive_index[idx] = points.len();
            points.push(unflatten(dims, idx));
        }
    }

    let mut edge_set = BTreeSet::new();
    for (u, p) in points.iter().enumerate() {
        for axis in 0..dims.len() {
            let m = dims[axis];
            let next = if p[axis] < m {
                Some(p[axis] + 1)
            } else if kind == GraphKind::Torus {
                Some(1)
            } else {
                None
            };
            if let Some(x) = next {
                let mut q = p.clone();
                q[axis] = x;
                let qidx = flat_index(dims, &q);
                if deleted.contains(&qidx) {
                    continue;
                }
                let v = alive_index[qidx];
                if u != v {
                    edge_set.insert((u.min(v), u.max(v)));
                }
            }
        }
    }

    Ok(LatticeGraph { kind, dims: dims.to_vec(), points, edges: edge_set.into_iter().collect() })
}

fn bruteforce_guard(g: &LatticeGraph, guards: &SizeGuards) -> Result<(), LatticeError> {
    if g.nsites() > guards.bruteforce_max_sites {
        return Err(LatticeError::GuardExceeded {
            quantity: "site count",
            value: g.nsites(),
            limit: guards.bruteforce_max_sites,
        });
    }
    Ok(())
}

/// Ground-truth matching counts by deciding each edge in turn. Every leaf of
/// the decision tree is one matching, so the cost is proportional to the
/// number of matchings, not to `2^edges`.
pub fn matching_counts_bruteforce(g: &LatticeGraph) -> Result<CountTable, LatticeError> {
    matching_counts_bruteforce_with(g, &SizeGuards::default())
}

pub fn matching_counts_bruteforce_with(
    g: &LatticeGraph,
    guards: &SizeGuards,
) -> Result<CountTable, LatticeError> {
    bruteforce_guard(g, guards)?;
    let mut counts = vec![BigUint::zero(); g.nsites() / 2 + 1];
    let mut free = vec![true; g.nsites()];
    fn rec(edges: &[(usize, usize)], idx: usize, free: &mut [bool], ell: usize, counts: &mut [BigUint]) {
        if idx == edges.len() {
            counts[ell] += 1u32;
            return;
        }
        rec(edges, idx + 1, free, ell, counts);
        let (a, b) = edges[idx];
        if free[a] && free[b] {
            free[a] = false;
            free[b] = false;
            rec(edges, idx + 1, free, ell + 1, counts);
            free[a] = true;
            free[b] = true;
        }
    }
    rec(&g.edges, 0, &mut free, 0, &mut counts);
    Ok(CountTable { kind: g.kind, dims: g.dims.clone(), nsites: g.nsites(), counts })
}

/// Matching counts of a box (optionally punctured) by a broken-profile
/// transfer sweep. Cells are visited in memory order; the state mask records
/// which of the next `N'` cells a placed dimer already covers, where `N'` is
/// the cross-section size.
pub fn matching_counts_transfer(
    dims: &[usize],
    deleted_sites: &[Vec<usize>],
) -> Result<CountTable, LatticeError> {
    matching_counts_transfer_with(dims, deleted_sites, &SizeGuards::default())
}

pub fn matching_counts_transfer_with(
    dims: &[usize],
    deleted_sites: &[Vec<usize>],
    guards: &SizeGuards,
) -> Result<CountTable, LatticeError> {
    validate_dims(dims)?;
    validate_sites(dims, deleted_sites)?;
    let d = dims.len();
    let nprime: usize = dims[..d - 1].iter().product();
    if nprime > guards.transfer_max_window || nprime >= 32 {
        return Err(LatticeError::GuardExceeded {
            quantity: "cross-section size",
            value: nprime,
            limit: guards.transfer_max_window.min(31),
        });
    }
    let n = checked_site_count(dims)?;
    let deleted: BTreeSet<usize> = deleted_sites.iter().map(|p| flat_index(dims, p)).collect();
    let strides: Vec<usize> = {
        let mut s = vec![1; d];
        for a in 1..d {
            s[a] = s[a - 1] * dims[a - 1];
        }
        s
    };

    let mut states: HashMap<u32, Vec<BigUint>> = HashMap::new();
    states.insert(0, vec![BigUint::one()]);
    let mut coord = vec![0usize; d]; // 0-based coordinates of the current cell

    for t in 0..n {
        let mut next: HashMap<u32, Vec<BigUint>> = HashMap::with_capacity(states.len() * 2);
        let push = |mask: u32, poly: &[BigUint], shift: usize, next: &mut HashMap<u32, Vec<BigUint>>| {
            let entry = next.entry(mask).or_default();
            if entry.len() < poly.len() + shift {
                entry.resize(poly.len() + shift, BigUint::zero());
            }
            for (i, c) in poly.iter().enumerate() {
                entry[i + shift] += c;
            }
        };
        let dead = deleted.contains(&t);
        for (mask, poly) in states.drain() {
            if mask & 1 == 1 {
                push(mask >> 1, &poly, 0, &mut next);
                continue;
            }
            // Monomer (or a deleted cell, which carries nothing).
            push(mask >> 1, &poly, 0, &mut next);
            if dead {
                continue;
            }
            for axis in 0..d {
                if coord[axis] + 1 == dims[axis] {
                    continue;
                }
                let target = t + strides[axis];
                if deleted.contains(&target) {
                    continue;
                }
                if axis + 1 == d {
                    // The partner cell enters the window only after the shift.
                    push((mask >> 1) | (1 << (nprime - 1)), &poly, 1, &mut next);
                } else {
                    let bit = 1u32 << strides[axis];
                    if mask & bit == 0 {
                        push((mask | bit) >> 1, &poly, 1, &mut next);
                    }
                }
            }
        }
        states = next;
        for (c, &m) in coord.iter_mut().zip(dims) {
            *c += 1;
            if *c < m {
                break;
            }
            *c = 0;
        }
    }

    let nsites = n - deleted.len();
    let mut counts = vec![BigUint::zero(); nsites / 2 + 1];
    for (mask, poly) in states {
        assert_eq!(mask, 0, "a dimer escaped the box");
        for (ell, c) in poly.into_iter().enumerate() {
            counts[ell] += c;
        }
    }
    let kind = if deleted_sites.is_empty() { GraphKind::Box } else { GraphKind::PuncturedBox };
    Ok(CountTable { kind, dims: dims.to_vec(), nsites, counts })
}

/// `ln(counts[l]) / nsites`: the entropy-per-site certificate carried by one
/// finite count. Exact big-integer logarithm via the leading 53 bits.
pub fn entropy_estimate(table: &CountTable, ell: usize) -> Result<f64, LatticeError> {
    let count = table.counts.get(ell).ok_or(LatticeError::EmptyCount { ell })?;
    if count.is_zero() {
        return Err(LatticeError::EmptyCount { ell });
    }
    Ok(ln_biguint(count) / table.nsites as f64)
}

fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        n.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 53;
        let top = (n >> shift).to_f64().expect("53 bits fit");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Classifies every `l`-dimer tiling of a box by its layer profile: `h[j]`
/// dimers inside layer `j` and `v[j]` dimers joining layers `j` and `j+1`.
pub fn profile_census(dims: &[usize], ell: usize) -> Result<ProfileCensus, LatticeError> {
    profile_census_with(dims, ell, &SizeGuards::default())
}

pub fn profile_census_with(
    dims: &[usize],
    ell: usize,
    guards: &SizeGuards,
) -> Result<ProfileCensus, LatticeError> {
    validate_dims(dims)?;
    if dims.len() < 2 {
        return Err(LatticeError::CensusNeedsTwoDims);
    }
    let g = build_graph(GraphKind::Box, dims, &[])?;
    bruteforce_guard(&g, guards)?;
    let layers = dims[dims.len() - 1];
    let layer_of = |idx: usize| g.point(idx)[dims.len() - 1] - 1;

    let mut profiles = BTreeMap::new();
    let mut free = vec![true; g.nsites()];
    let mut h = vec![0u32; layers];
    let mut v = vec![0u32; layers.saturating_sub(1)];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &LatticeGraph,
        layer_of: &dyn Fn(usize) -> usize,
        idx: usize,
        free: &mut [bool],
        placed: usize,
        target: usize,
        h: &mut [u32],
        v: &mut [u32],
        profiles: &mut BTreeMap<(Vec<u32>, Vec<u32>), BigUint>,
    ) {
        if placed > target {
            return;
        }
        if idx == g.edges().len() {
            if placed == target {
                let key = (h.to_vec(), v.to_vec());
                *profiles.entry(key).or_insert_with(BigUint::zero) += 1u32;
            }
            return;
        }
        rec(g, layer_of, idx + 1, free, placed, target, h, v, profiles);
        let (a, b) = g.edges()[idx];
        if free[a] && free[b] {
            free[a] = false;
            free[b] = false;
            let (la, lb) = (layer_of(a), layer_of(b));
            if la == lb {
                h[la] += 1;
            } else {
                v[la.min(lb)] += 1;
            }
            rec(g, layer_of, idx + 1, free, placed + 1, target, h, v, profiles);
            if la == lb {
                h[la] -= 1;
            } else {
                v[la.min(lb)] -= 1;
            }
            free[a] = true;
            free[b] = true;
        }
    }
    rec(&g, &layer_of, 0, &mut free, 0, ell, &mut h, &mut v, &mut profiles);
    Ok(ProfileCensus { dims: dims.to_vec(), ell, profiles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn box_counts(dims: &[usize]) -> CountTable {
        let g = build_graph(GraphKind::Box, dims, &[]).unwrap();
        matching_counts_bruteforce(&g).unwrap()
    }

    fn binom(n: usize, k: usize) -> BigUint {
        num_integer::binomial(BigUint::from(n), BigUint::from(k))
    }

    #[test]
    fn path_torus_and_punctured_structure() {
        let path = build_graph(GraphKind::Box, &[4], &[]).unwrap();
        assert_eq!(path.nsites(), 4);
        assert_eq!(path.edges().len(), 3);

        let torus = build_graph(GraphKind::Torus, &[4, 4], &[]).unwrap();
        assert_eq!(torus.nsites(), 16);
        assert_eq!(torus.edges().len(), 32);
        assert!(torus.degrees().iter().all(|&d| d == 4));

        let punctured =
            build_graph(GraphKind::PuncturedBox, &[2, 3], &[vec![1, 1]]).unwrap();
        assert_eq!(punctured.nsites(), 5);
        assert_eq!(punctured.edges().len(), 5);
    }

    #[test]
    fn box_edges_are_a_subset_of_torus_edges() {
        for dims in [vec![3usize], vec![3, 3], vec![2, 4]] {
            let b = build_graph(GraphKind::Box, &dims, &[]).unwrap();
            let t = build_graph(GraphKind::Torus, &dims, &[]).unwrap();
            let torus_edges: BTreeSet<_> = t.edges().iter().collect();
            assert!(b.edges().iter().all(|e| torus_edges.contains(e)));
        }
    }

    #[test]
    fn graph_validation_errors() {
        assert_eq!(build_graph(GraphKind::Box, &[], &[]).unwrap_err(), LatticeError::NoDims);
        assert_eq!(build_graph(GraphKind::Box, &[0], &[]).unwrap_err(), LatticeError::ZeroDim);
        assert_eq!(
            build_graph(GraphKind::Torus, &[3, 3], &[vec![1, 1]]).unwrap_err(),
            LatticeError::DeletionsNotAllowed(GraphKind::Torus),
        );
        assert_eq!(
            build_graph(GraphKind::PuncturedBox, &[2, 2], &[vec![3, 1]]).unwrap_err(),
            LatticeError::SiteOutOfRange(vec![3, 1]),
        );
    }

    #[test]
    fn bruteforce_reference_counts() {
        let path = box_counts(&[4]);
        assert_eq!(path.counts, vec![1u32.into(), 3u32.into(), 1u32.into()]);

        let square = box_counts(&[2, 2]);
        assert_eq!(square.counts[2], 2u32.into());

        let rect = box_counts(&[2, 3]);
        assert_eq!(rect.counts[3], 3u32.into());
    }

    #[test]
    fn one_dimensional_closed_form() {
        for m in 1..=12 {
            let table = box_counts(&[m]);
            for ell in 0..=m / 2 {
                assert_eq!(table.counts[ell], binom(m - ell, ell), "m={m}, ell={ell}");
            }
        }
    }

    #[test]
    fn transfer_matches_bruteforce() {
        let cases: &[&[usize]] = &[
            &[1],
            &[5],
            &[2, 2],
            &[3, 2],
            &[2, 3],
            &[3, 3],
            &[4, 4],
            &[1, 6],
            &[2, 2, 2],
            &[2, 2, 3],
            &[3, 1, 3],
        ];
        for &dims in cases {
            let brute = box_counts(dims);
            let transfer = matching_counts_transfer(dims, &[]).unwrap();
            assert_eq!(brute.counts, transfer.counts, "dims {dims:?}");
            assert_eq!(brute.nsites, transfer.nsites);
        }
    }

    #[test]
    fn transfer_matches_bruteforce_on_punctured_boxes() {
        for (dims, hole) in [
            (vec![2usize, 3], vec![1usize, 1]),
            (vec![3, 3], vec![2, 2]),
            (vec![4, 3], vec![4, 1]),
        ] {
            let g = build_graph(GraphKind::PuncturedBox, &dims, &[hole.clone()]).unwrap();
            let brute = matching_counts_bruteforce(&g).unwrap();
            let transfer = matching_counts_transfer(&dims, &[hole]).unwrap();
            assert_eq!(brute.counts, transfer.counts, "dims {dims:?}");
        }
    }

    #[test]
    fn transfer_eight_path_is_binomial() {
        let table = matching_counts_transfer(&[8], &[]).unwrap();
        for ell in 0..=4 {
            assert_eq!(table.counts[ell], binom(8 - ell, ell));
        }
    }

    #[test]
    fn transfer_handles_long_boxes() {
        // 2 x 40 strip: far beyond brute force; sanity-check structure only.
        let table = matching_counts_transfer(&[2, 40], &[]).unwrap();
        assert_eq!(table.nsites, 80);
        assert_eq!(table.counts[0], 1u32.into());
        assert!(!table.counts[40].is_zero());
    }

    #[test]
    fn guards_are_enforced() {
        let g = build_graph(GraphKind::Box, &[6, 6], &[]).unwrap();
        assert!(matching_counts_bruteforce(&g).unwrap_err().is_guard());
        assert!(matching_counts_transfer(&[5, 5, 2], &[]).unwrap_err().is_guard());
    }

    #[test]
    fn entropy_reference_values() {
        let path = box_counts(&[4]);
        assert!((entropy_estimate(&path, 1).unwrap() - 3f64.ln() / 4.0).abs() < 1e-15);
        assert_eq!(entropy_estimate(&path, 0).unwrap(), 0.0);
        assert_eq!(entropy_estimate(&path, 3), Err(LatticeError::EmptyCount { ell: 3 }));

        let square = box_counts(&[2, 2]);
        assert!((entropy_estimate(&square, 2).unwrap() - 2f64.ln() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_handles_huge_counts() {
        let table = matching_counts_transfer(&[2, 40], &[]).unwrap();
        let nearest = entropy_estimate(&table, 30).unwrap();
        assert!(nearest.is_finite() && nearest > 0.0);
        // Cross-check the big-integer logarithm against digit length.
        let digits = table.counts[30].to_string().len() as f64;
        let ln10 = std::f64::consts::LN_10;
        assert!((nearest * 80.0 - digits * ln10).abs() < ln10 + 1e-9);
    }

    #[test]
    fn census_reference_profiles() {
        let census = profile_census(&[2, 2], 2).unwrap();
        assert_eq!(census.profiles.len(), 2);
        assert_eq!(census.profiles[&(vec![1, 1], vec![0])], 1u32.into());
        assert_eq!(census.profiles[&(vec![0, 0], vec![2])], 1u32.into());

        let empty = profile_census(&[2, 2], 0).unwrap();
        assert_eq!(empty.profiles.len(), 1);
        assert_eq!(empty.profiles[&(vec![0, 0], vec![0])], 1u32.into());

        let strip = profile_census(&[2, 3], 3).unwrap();
        assert_eq!(strip.total(), 3u32.into());
    }

    #[test]
    fn census_marginal_and_layer_constraints() {
        for (dims, ell) in [(vec![2usize, 3], 2usize), (vec![3, 3], 3), (vec![2, 2, 2], 2)] {
            let census = profile_census(&dims, ell).unwrap();
            let table = box_counts(&dims);
            assert_eq!(census.total(), table.counts[ell], "marginal at {dims:?}, ell={ell}");
            let nprime = census.layer_size() as u32;
            let layers = dims[dims.len() - 1];
            for (h, v) in census.profiles.keys() {
                let load: u32 = h.iter().sum::<u32>() + v.iter().sum::<u32>();
                assert_eq!(load as usize, ell);
                for j in 0..layers {
                    let below = if j > 0 { v[j - 1] } else { 0 };
                    let above = if j + 1 < layers { v[j] } else { 0 };
                    assert!(below + above + 2 * h[j] <= nprime);
                }
            }
        }
    }

    #[test]
    fn census_rejects_one_dimension() {
        assert_eq!(profile_census(&[5], 1).unwrap_err(), LatticeError::CensusNeedsTwoDims);
    }

    #[test]
    fn dimension_permutation_symmetry() {
        let a = box_counts(&[2, 3, 2]);
        let b = box_counts(&[3, 2, 2]);
        let c = box_counts(&[2, 2, 3]);
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts, c.counts);
    }

    #[test]
    fn box_counts_within_torus_counts() {
        for dims in [vec![4usize], vec![3, 3], vec![2, 4]] {
            let b = box_counts(&dims);
            let tg = build_graph(GraphKind::Torus, &dims, &[]).unwrap();
            let t = matching_counts_bruteforce(&tg).unwrap();
            for ell in 0..b.counts.len() {
                assert!(b.counts[ell] <= t.counts[ell], "dims {dims:?}, ell={ell}");
            }
        }
    }

    #[test]
    fn log_concavity_on_reference_graphs() {
        for dims in [vec![6usize], vec![3, 4], vec![2, 2, 3]] {
            let table = box_counts(&dims);
            for ell in 1..table.counts.len() - 1 {
                assert!(
                    &table.counts[ell] * &table.counts[ell]
                        >= &table.counts[ell - 1] * &table.counts[ell + 1],
                    "dims {dims:?}, ell={ell}"
                );
            }
        }
    }

    #[test]
    fn json_shape() {
        let json = box_counts(&[4]).to_json();
        assert_eq!(json["kind"], "box");
        assert_eq!(json["nsites"], 4);
        assert_eq!(json["counts"]["1"], "3");
        let punctured = matching_counts_transfer(&[2, 3], &[vec![1, 1]]).unwrap().to_json();
        assert_eq!(punctured["kind"], "punctured-box");
        assert_eq!(punctured["nsites"], 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_boxes_agree_and_stay_log_concave(
            m1 in 1usize..=4,
            m2 in 1usize..=4,
        ) {
            let dims = vec![m1, m2];
            let brute = box_counts(&dims);
            let transfer = matching_counts_transfer(&dims, &[]).unwrap();
            prop_assert_eq!(&brute.counts, &transfer.counts);
            prop_assert_eq!(&brute.counts[0], &BigUint::one());
            for ell in 1..brute.counts.len() - 1 {
                prop_assert!(
                    &brute.counts[ell] * &brute.counts[ell]
                        >= &brute.counts[ell - 1] * &brute.counts[ell + 1]
                );
            }
        }
    }
}
