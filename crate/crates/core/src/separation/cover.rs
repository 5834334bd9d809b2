//! Exact minimum set cover over a universe of at most 128 elements.
//!
//! Branch and bound: a greedy cover seeds the incumbent, each node branches
//! on the uncovered element with the fewest candidate sets, and nodes are
//! pruned by a packing bound (uncovered elements no single set can pair up
//! each need their own set) and by a memo of the best depth at which each
//! uncovered mask has already been explored.

use std::collections::HashMap;

use serde::Serialize;

pub type Mask = u128;

/// Search statistics that certify optimality: the search ran to exhaustion,
/// so no cover smaller than the returned one exists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoverProof {
    pub greedy_upper_bound: usize,
    pub root_lower_bound: usize,
    /// Incumbent sizes in the order they were found.
    pub incumbents: Vec<usize>,
    pub nodes_explored: u64,
    pub candidate_sets: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    /// Indices into the input set list.
    pub chosen: Vec<usize>,
    pub proof: CoverProof,
}

fn bits(m: Mask) -> impl Iterator<Item = usize> {
    (0..128).filter(move |i| m >> i & 1 == 1)
}

/// Drops empty sets and sets contained in another (keeping the first of equals).
fn undominated(sets: &[Mask]) -> Vec<usize> {
    (0..sets.len())
        .filter(|&i| {
            sets[i] != 0
                && !(0..sets.len()).any(|j| {
                    j != i && sets[i] & sets[j] == sets[i] && (sets[i] != sets[j] || j < i)
                })
        })
        .collect()
}

struct Search<'a> {
    sets: &'a [Mask],
    containing: Vec<Vec<usize>>,
    best: Vec<usize>,
    memo: HashMap<Mask, usize>,
    proof: CoverProof,
}

impl Search<'_> {
    /// Uncovered elements chosen greedily so that no set holds two of them.
    fn packing_bound(&self, uncovered: Mask) -> usize {
        let mut order: Vec<usize> = bits(uncovered).collect();
        order.sort_by_key(|&e| (self.containing[e].len(), e));
        let mut blocked: Mask = 0;
        let mut count = 0;
        for e in order {
            if blocked >> e & 1 == 1 {
                continue;
            }
            count += 1;
            for &s in &self.containing[e] {
                blocked |= self.sets[s];
            }
        }
        count
    }

    fn run(&mut self, uncovered: Mask, chosen: &mut Vec<usize>) {
        self.proof.nodes_explored += 1;
        if uncovered == 0 {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
                self.proof.incumbents.push(chosen.len());
            }
            return;
        }
        if chosen.len() + self.packing_bound(uncovered) >= self.best.len() {
            return;
        }
        match self.memo.get(&uncovered) {
            Some(&d) if d <= chosen.len() => return,
            _ => {
                self.memo.insert(uncovered, chosen.len());
            }
        }
        let pivot = bits(uncovered)
            .min_by_key(|&e| (self.containing[e].len(), e))
            .expect("uncovered is nonempty");
        let mut options = self.containing[pivot].clone();
        options.sort_by_key(|&s| (std::cmp::Reverse((self.sets[s] & uncovered).count_ones()), s));
        for s in options {
            chosen.push(s);
            self.run(uncovered & !self.sets[s], chosen);
            chosen.pop();
        }
    }
}

fn greedy(sets: &[Mask], universe: Mask) -> Option<Vec<usize>> {
    let mut uncovered = universe;
    let mut chosen = Vec::new();
    while uncovered != 0 {
        let (i, gain) = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (i, (s & uncovered).count_ones()))
            .max_by_key(|&(i, g)| (g, std::cmp::Reverse(i)))?;
        if gain == 0 {
            return None;
        }
        chosen.push(i);
        uncovered &= !sets[i];
    }
    Some(chosen)
}

/// A minimum cover of `universe` by `sets`; `None` when no cover exists.
pub fn min_cover(sets: &[Mask], universe: Mask) -> Option<Cover> {
    let keep = undominated(&sets.iter().map(|s| s & universe).collect::<Vec<_>>());
    let reduced: Vec<Mask> = keep.iter().map(|&i| sets[i] & universe).collect();
    let initial = greedy(&reduced, universe)?;
    let mut containing = vec![Vec::new(); 128];
    for (i, s) in reduced.iter().enumerate() {
        for e in bits(*s) {
            containing[e].push(i);
        }
    }
    let mut search = Search {
        sets: &reduced,
        containing,
        best: initial.clone(),
        memo: HashMap::new(),
        proof: CoverProof {
            greedy_upper_bound: initial.len(),
            candidate_sets: reduced.len(),
            ..CoverProof::default()
        },
    };
    search.proof.root_lower_bound = search.packing_bound(universe);
    search.run(universe, &mut Vec::new());
    let mut chosen: Vec<usize> = search.best.iter().map(|&i| keep[i]).collect();
    chosen.sort_unstable();
    Some(Cover { chosen, proof: search.proof })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(elems: &[usize]) -> Mask {
        elems.iter().fold(0, |m, &e| m | 1 << e)
    }

    fn brute_force(sets: &[Mask], universe: Mask) -> Option<usize> {
        (0u32..1 << sets.len())
            .filter(|pick| {
                (0..sets.len()).filter(|i| pick >> i & 1 == 1).fold(0, |m, i| m | sets[i]) & universe == universe
            })
            .map(|pick| pick.count_ones() as usize)
            .min()
    }

    #[test]
    fn beats_greedy_on_the_classic_trap() {
        // greedy takes the four-element set first and then needs two more
        let sets = [mask(&[0, 1, 3, 4]), mask(&[0, 1, 2]), mask(&[3, 4, 5])];
        let universe = mask(&[0, 1, 2, 3, 4, 5]);
        let cover = min_cover(&sets, universe).unwrap();
        assert_eq!(cover.chosen, vec![1, 2]);
        assert_eq!(cover.proof.greedy_upper_bound, 3);
    }

    #[test]
    fn uncoverable_universe() {
        assert!(min_cover(&[mask(&[0])], mask(&[0, 1])).is_none());
    }

    #[test]
    fn agrees_with_brute_force_on_pseudorandom_families() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let k = 4 + (next() % 9) as usize;
            let universe: Mask = (1 << k) - 1;
            let count = 3 + (next() % 9) as usize;
            let sets: Vec<Mask> = (0..count).map(|_| next() as Mask & universe).collect();
            let expected = brute_force(&sets, universe);
            let got = min_cover(&sets, universe).map(|c| c.chosen.len());
            assert_eq!(got, expected, "sets {sets:?}");
        }
    }
}
