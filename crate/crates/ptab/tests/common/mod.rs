//! Formula, map and discourse generators shared by the integration suites.
#![allow(dead_code)] // each test binary uses its own slice of these

use ptab::{AtomId, Discourse, Formula, Literal, PresupMap};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn atom(name: &str) -> AtomId {
    AtomId::new(name).unwrap()
}

/// The first `n` single-letter atoms: a, b, c, ...
pub fn atom_pool(n: usize) -> Vec<AtomId> {
    (0..n)
        .map(|i| atom(&((b'a' + i as u8) as char).to_string()))
        .collect()
}

/// Every formula over `atoms` with at most `max_connectives` connectives,
/// grouped bottom-up by connective count. Exhaustive for the family.
pub fn enumerate_family(atoms: &[AtomId], max_connectives: usize) -> Vec<Formula> {
    let mut by_count: Vec<Vec<Formula>> =
        vec![atoms.iter().map(|a| Formula::Atom(a.clone())).collect()];
    for count in 1..=max_connectives {
        let mut level = Vec::new();
        for f in &by_count[count - 1] {
            level.push(f.clone().negate());
        }
        for left_count in 0..count {
            let right_count = count - 1 - left_count;
            for l in &by_count[left_count] {
                for r in &by_count[right_count] {
                    level.push(l.clone().and(r.clone()));
                    level.push(l.clone().or(r.clone()));
                    level.push(l.clone().implies(r.clone()));
                }
            }
        }
        by_count.push(level);
    }
    by_count.into_iter().flatten().collect()
}

/// A uniformly shaped random formula with exactly `connectives` connectives.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[AtomId], connectives: usize) -> Formula {
    if connectives == 0 {
        return Formula::Atom(atoms.choose(rng).expect("nonempty pool").clone());
    }
    match rng.gen_range(0..4) {
        0 => random_formula(rng, atoms, connectives - 1).negate(),
        op => {
            let left_budget = rng.gen_range(0..connectives);
            let right_budget = connectives - 1 - left_budget;
            let left = random_formula(rng, atoms, left_budget);
            let right = random_formula(rng, atoms, right_budget);
            match op {
                1 => left.and(right),
                2 => left.or(right),
                _ => left.implies(right),
            }
        }
    }
}

/// A valid annotation map: up to `max_annotated` sources drawn from
/// `source_pool`, each presupposing a (possibly negated) atom that is not a
/// source itself, so chains cannot arise. Conflicting targets (`p` vs `~p`)
/// are deliberately possible.
pub fn random_valid_map<R: Rng>(
    rng: &mut R,
    source_pool: &[AtomId],
    target_pool: &[AtomId],
    max_annotated: usize,
) -> PresupMap {
    let mut sources: Vec<AtomId> = source_pool.to_vec();
    sources.shuffle(rng);
    sources.truncate(rng.gen_range(0..=max_annotated.min(sources.len())));
    let targets: Vec<&AtomId> =
        target_pool.iter().filter(|a| !sources.contains(a)).collect();
    let mut map = PresupMap::new();
    if targets.is_empty() {
        return map;
    }
    for source in sources {
        let target = (*targets.choose(rng).expect("nonempty targets")).clone();
        let presup = if rng.gen_bool(0.5) {
            Literal::positive(target)
        } else {
            Literal::negative(target)
        };
        map.annotate(source, presup).expect("sources are distinct");
    }
    map
}

/// A random discourse: up to `max_sentences` formulas over `pool` sharing
/// one valid annotation map.
pub fn random_discourse<R: Rng>(
    rng: &mut R,
    pool: &[AtomId],
    max_sentences: usize,
    max_connectives: usize,
) -> Discourse {
    let presup_map = random_valid_map(rng, pool, pool, 2);
    let sentences = rng.gen_range(1..=max_sentences);
    let formulas = (0..sentences)
        .map(|_| {
            let size = rng.gen_range(0..=max_connectives);
            random_formula(rng, pool, size)
        })
        .collect();
    Discourse { formulas, presup_map }
}
