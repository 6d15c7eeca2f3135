use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{grid, prop_names, FuzzConfig};
use crate::formula::{Coalition, Dilemma, Formula, FormulaSet, SacrificeMap};
use crate::rational::{ratio, Rational};

pub(crate) struct Sampler<'c> {
    pub rng: ChaCha8Rng,
    cfg: &'c FuzzConfig,
    agents: Vec<String>,
    props: Vec<String>,
    pub pool: Vec<Formula>,
}

fn literal(rng: &mut ChaCha8Rng, props: &[String]) -> Formula {
    let p = Formula::prop(props.choose(rng).expect("props nonempty").clone());
    if rng.gen_bool(0.5) {
        p
    } else {
        Formula::not(p)
    }
}

fn boolean(rng: &mut ChaCha8Rng, props: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 3) {
        return literal(rng, props);
    }
    let l = boolean(rng, props, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(l),
        1 => Formula::and(l, boolean(rng, props, depth - 1)),
        2 => Formula::or(l, boolean(rng, props, depth - 1)),
        _ => Formula::implies(l, boolean(rng, props, depth - 1)),
    }
}

impl<'c> Sampler<'c> {
    pub fn new(cfg: &'c FuzzConfig, agents: &[String], rng: ChaCha8Rng) -> Self {
        let mut s = Sampler {
            rng,
            cfg,
            agents: agents.to_vec(),
            props: prop_names(cfg.num_props),
            pool: Vec::new(),
        };
        s.pool = (0..cfg.pool_size).map(|i| s.pool_formula(i)).collect();
        s
    }

    /// Literals first, then boolean combinations, with every fourth entry a
    /// dilemma over literals.
    fn pool_formula(&mut self, i: usize) -> Formula {
        if i < self.props.len().min(2) {
            return Formula::prop(self.props[i].clone());
        }
        if i % 4 == 3 {
            let members: FormulaSet = (0..self.rng.gen_range(1..=2))
                .map(|_| literal(&mut self.rng, &self.props))
                .collect();
            let d = Dilemma::new(self.coalition(), members, self.sacrifice()).expect("nonempty");
            return if self.rng.gen_bool(0.5) {
                Formula::strict(d)
            } else {
                Formula::weak(d)
            };
        }
        boolean(&mut self.rng, &self.props, self.cfg.formula_depth)
    }

    /// Every atom and its negation, at most the first three atoms.
    pub fn literals(&self) -> FormulaSet {
        self.props
            .iter()
            .take(3)
            .flat_map(|p| [Formula::prop(p.clone()), Formula::not(Formula::prop(p.clone()))])
            .collect()
    }

    pub fn pick(&mut self) -> Formula {
        self.pool.choose(&mut self.rng).expect("pool nonempty").clone()
    }

    pub fn coalition(&mut self) -> Coalition {
        let n = self.agents.len();
        let mask = self.rng.gen_range(1..1u64 << n.min(16));
        Coalition::new(
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.agents[i].clone()),
        )
        .expect("mask nonzero")
    }

    pub fn superset(&mut self, c: &Coalition) -> Coalition {
        let extra: Vec<String> = self
            .agents
            .iter()
            .filter(|a| !c.contains(a) && self.rng.gen_bool(0.5))
            .cloned()
            .collect();
        c.union(&Coalition::new(c.agents().map(str::to_string).chain(extra)).expect("nonempty"))
    }

    fn bound(&mut self) -> Rational {
        let lo = &self.cfg.cost_min - ratio(1, 2);
        let hi = &self.cfg.cost_max + ratio(1, 2);
        let g = grid(&lo, &hi);
        g[self.rng.gen_range(0..g.len())].clone()
    }

    /// Either a wildcard-only map or explicit bounds for every agent.
    pub fn sacrifice(&mut self) -> SacrificeMap {
        if self.rng.gen_ratio(1, 4) {
            return SacrificeMap::uniform(self.bound());
        }
        let agents = self.agents.clone();
        SacrificeMap::new(agents.into_iter().map(|a| (a, self.bound())).collect(), None)
    }

    /// A map pointwise at least `s`.
    pub fn raise(&mut self, s: &SacrificeMap) -> SacrificeMap {
        let mut step = || ratio(self.rng.gen_range(0..=2), 2);
        if s.bounds().is_empty() {
            let w = s.wildcard().expect("sampled maps resolve").clone();
            return SacrificeMap::uniform(w + step());
        }
        let bounds: BTreeMap<String, Rational> =
            s.bounds().iter().map(|(a, v)| (a.clone(), v + step())).collect();
        SacrificeMap::new(bounds, s.wildcard().map(|w| w + step()))
    }

    /// Between `lo` and `hi` distinct pool members (fewer if the pool is small).
    pub fn members(&mut self, lo: usize, hi: usize) -> FormulaSet {
        let k = self.rng.gen_range(lo..=hi);
        let mut picked: Vec<Formula> = self.pool.clone();
        picked.shuffle(&mut self.rng);
        let mut set = FormulaSet::new(Vec::new());
        for f in picked {
            if set.len() == k {
                break;
            }
            let next = FormulaSet::new(set.iter().cloned().chain([f]));
            set = next;
        }
        set
    }

    /// A formula and an implication partner likely to be valid: `f` itself,
    /// `f | g`, `g | f`, `f & g` or an unrelated `g`.
    pub fn image(&mut self, f: &Formula) -> Formula {
        let g = self.pick();
        match self.rng.gen_range(0..5) {
            0 => f.clone(),
            1 => Formula::or(f.clone(), g),
            2 => Formula::or(g, f.clone()),
            3 => Formula::and(f.clone(), g),
            _ => g,
        }
    }

    /// A candidate theorem for necessitation, usually valid by shape.
    pub fn candidate_theorem(&mut self) -> Formula {
        let f = self.pick();
        let g = self.pick();
        match self.rng.gen_range(0..5) {
            0 => Formula::or(f.clone(), Formula::not(f)),
            1 => Formula::implies(f.clone(), f),
            2 => Formula::implies(Formula::and(f.clone(), g), f),
            3 => Formula::implies(f.clone(), Formula::or(g, f)),
            _ => f,
        }
    }
}

/// The pool used for instances on one game of a run.
pub fn formula_pool(cfg: &FuzzConfig, game_index: u64) -> Vec<Formula> {
    let agents = super::agent_names(cfg.num_agents);
    Sampler::new(cfg, &agents, super::stream(cfg.seed, 2 * game_index + 1)).pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pool_shape() {
        let cfg = FuzzConfig::default();
        let pool = formula_pool(&cfg, 0);
        assert_eq!(pool.len(), cfg.pool_size);
        assert_eq!(pool[0], Formula::prop("p"));
        assert!(matches!(pool[3], Formula::StrictDilemma(_) | Formula::WeakDilemma(_)));
        assert_eq!(pool, formula_pool(&cfg, 0));
    }

    #[test]
    fn raise_is_pointwise_above() {
        let cfg = FuzzConfig::default();
        let agents = super::super::agent_names(2);
        let mut s = Sampler::new(&cfg, &agents, super::super::stream(3, 1));
        for _ in 0..50 {
            let lo = s.sacrifice();
            let hi = s.raise(&lo);
            let a = lo.resolve_over(agents.iter().map(String::as_str)).unwrap();
            let b = hi.resolve_over(agents.iter().map(String::as_str)).unwrap();
            assert!(a.iter().all(|(k, v)| *v <= b[k]));
        }
    }

    #[test]
    fn members_are_distinct() {
        let cfg = FuzzConfig::default();
        let agents = super::super::agent_names(2);
        let mut s = Sampler::new(&cfg, &agents, super::super::stream(5, 1));
        for _ in 0..50 {
            let m = s.members(2, 3);
            assert!((2..=3).contains(&m.len()));
        }
    }
}
