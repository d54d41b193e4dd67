//! Brute-force canonical form of a monomial.
//!
//! The input is plain data: each factor lists its slots as `(name, upper)`
//! pairs together with generators of its signed slot-permutation group
//! (`perm[i]` is the old position whose content moves to position `i`).
//! Dummy names are the names occurring twice in the monomial.
//!
//! The orbit is every combination of
//! 1. one group element per factor (the group is closed by breadth-first
//!    search over the generators),
//! 2. a subset of dummy pairs whose upper/lower positions are exchanged
//!    (only for names in `flippable`),
//! 3. a bijection from the dummy names onto the first `k` names of `pool`
//!    that are not free in the monomial.
//!
//! Elements are compared by the sequence of `(variance, rank)` over all
//! slots in factor order, upper before lower, with names ranked by their
//! position in `pool`. The minimum is returned with its sign; if the
//! minimum is reached with both signs the monomial is zero (`None`).

use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// One factor: slots and symmetry generators.
#[derive(Clone, Debug)]
pub struct OracleFactor {
    pub slots: Vec<(String, bool)>,
    pub generators: Vec<(Vec<usize>, i8)>,
}

#[derive(Debug, PartialEq, Eq)]
pub enum OrbitError {
    TooManySlots(usize),
    PoolTooSmall,
}

/// Largest monomial the oracle accepts.
pub const MAX_SLOTS: usize = 8;

/// All elements of the group generated by `gens` on `n` points.
pub fn close_group(n: usize, gens: &[(Vec<usize>, i8)]) -> Vec<(Vec<usize>, i8)> {
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeMap<Vec<usize>, i8> = BTreeMap::new();
    seen.insert(id.clone(), 1);
    let mut queue = VecDeque::new();
    queue.push_back(id);
    while let Some(p) = queue.pop_front() {
        let s = seen[&p];
        for (g, gs) in gens {
            // Apply g after p: position i receives the content that p put at g[i].
            let q: Vec<usize> = (0..n).map(|i| p[g[i]]).collect();
            let qs = s * gs;
            match seen.get(&q) {
                None => {
                    seen.insert(q.clone(), qs);
                    queue.push_back(q);
                }
                Some(_) => {}
            }
        }
    }
    seen.into_iter().collect()
}

/// True if the generated group contains the identity with sign −1, i.e.
/// the symmetry forces the tensor to vanish.
pub fn group_is_degenerate(n: usize, gens: &[(Vec<usize>, i8)]) -> bool {
    // Closure with sign tracking over (perm, sign) pairs.
    let id: Vec<usize> = (0..n).collect();
    let mut seen: BTreeSet<(Vec<usize>, i8)> = BTreeSet::new();
    seen.insert((id.clone(), 1));
    let mut queue = VecDeque::new();
    queue.push_back((id.clone(), 1i8));
    while let Some((p, s)) = queue.pop_front() {
        for (g, gs) in gens {
            let q: Vec<usize> = (0..n).map(|i| p[g[i]]).collect();
            let item = (q, s * gs);
            if seen.insert(item.clone()) {
                queue.push_back(item);
            }
        }
    }
    seen.contains(&(id, -1))
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x.clone());
            out.push(p);
        }
    }
    out
}

/// Canonical representative: `Ok(Some((sign, slots per factor)))`, or
/// `Ok(None)` when the monomial vanishes by symmetry.
#[allow(clippy::type_complexity)]
pub fn canonical(
    factors: &[OracleFactor],
    pool: &[String],
    flippable: &BTreeSet<String>,
) -> Result<Option<(i8, Vec<Vec<(String, bool)>>)>, OrbitError> {
    let total: usize = factors.iter().map(|f| f.slots.len()).sum();
    if total > MAX_SLOTS {
        return Err(OrbitError::TooManySlots(total));
    }
    for f in factors {
        if group_is_degenerate(f.slots.len(), &f.generators) {
            return Ok(None);
        }
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for f in factors {
        for (n, _) in &f.slots {
            *counts.entry(n.as_str()).or_default() += 1;
        }
    }
    let mut dummies: Vec<String> = Vec::new();
    for f in factors {
        for (n, _) in &f.slots {
            if counts[n.as_str()] == 2 && !dummies.contains(n) {
                dummies.push(n.clone());
            }
        }
    }
    let free: BTreeSet<&str> = counts.iter().filter(|(_, &c)| c == 1).map(|(n, _)| *n).collect();
    let targets: Vec<String> = pool.iter().filter(|n| !free.contains(n.as_str())).take(dummies.len()).cloned().collect();
    if targets.len() < dummies.len() {
        return Err(OrbitError::PoolTooSmall);
    }
    let rank = |n: &str| pool.iter().position(|p| p == n).unwrap_or(usize::MAX);

    let groups: Vec<Vec<(Vec<usize>, i8)>> = factors.iter().map(|f| close_group(f.slots.len(), &f.generators)).collect();
    let flip_names: Vec<&String> = dummies.iter().filter(|d| flippable.contains(*d)).collect();
    let relabelings = permutations(&targets);

    let mut best: Option<(Vec<(bool, usize)>, BTreeSet<i8>, Vec<Vec<(String, bool)>>)> = None;
    let mut choice = vec![0usize; factors.len()];
    loop {
        let mut sign = 1i8;
        let mut permuted: Vec<Vec<(String, bool)>> = Vec::new();
        for (k, f) in factors.iter().enumerate() {
            let (perm, s) = &groups[k][choice[k]];
            sign *= s;
            permuted.push(perm.iter().map(|&i| f.slots[i].clone()).collect());
        }
        for mask in 0..(1usize << flip_names.len()) {
            let flipped: BTreeSet<&str> =
                flip_names.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, n)| n.as_str()).collect();
            for relabel in &relabelings {
                let map: BTreeMap<&str, &str> =
                    dummies.iter().map(String::as_str).zip(relabel.iter().map(String::as_str)).collect();
                let image: Vec<Vec<(String, bool)>> = permuted
                    .iter()
                    .map(|slots| {
                        slots
                            .iter()
                            .map(|(n, up)| {
                                let up = if flipped.contains(n.as_str()) { !up } else { *up };
                                (map.get(n.as_str()).map(|s| s.to_string()).unwrap_or_else(|| n.clone()), up)
                            })
                            .collect()
                    })
                    .collect();
                let key: Vec<(bool, usize)> = image.iter().flatten().map(|(n, up)| (!up, rank(n))).collect();
                match &mut best {
                    Some((k, signs, _)) if *k == key => {
                        signs.insert(sign);
                    }
                    Some((k, _, _)) if *k < key => {}
                    _ => best = Some((key, [sign].into_iter().collect(), image)),
                }
            }
        }
        // Next group-element combination.
        let mut k = 0;
        loop {
            if k == factors.len() {
                let (_, signs, image) = best.expect("orbit is never empty");
                return Ok(if signs.len() == 2 { None } else { Some((*signs.iter().next().unwrap(), image)) });
            }
            choice[k] += 1;
            if choice[k] < groups[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}
