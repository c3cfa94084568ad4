//! Exhaustive enumeration of the reachable design space.
//!
//! The enumerator walks every action sequence from the seed to a terminal
//! state. Distinct sequences frequently reach the same configuration, so
//! subtrees are memoized by configuration digest: each unique configuration
//! is explored once, while sequence counts are still exact (the digest is a
//! sufficient key because every action activates exactly one node, making
//! the decision step a function of the configuration). Objective samples are
//! deduplicated the same way — one sample per unique terminal design.

use std::collections::HashMap;

use crate::env::{EpisodeState, TerminalKind, TrussEnv};
use crate::model::{config_key, ConfigKey, Configuration};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration cap of zero admits no designs")]
    CapExceeded,
}

/// What an exhaustive (or capped) enumeration found.
#[derive(Clone, Debug)]
pub struct SearchSpaceSummary {
    /// Action sequences ending in a terminal state (saturating).
    pub raw_terminal_sequences: u64,
    /// Unique terminal configurations.
    pub unique_terminals: u64,
    /// Unique terminals whose structure could not be solved.
    pub unstable_terminals: u64,
    /// Unique stable terminals that ran out of actions before reaching the
    /// horizon or target; they carry zero reward, so they are tallied here
    /// rather than entering the objective distribution.
    pub dead_end_terminals: u64,
    /// Objectives of unique, stable, positively-rewarded terminal designs,
    /// sorted ascending.
    pub samples: Vec<f64>,
    /// The best design and its objective.
    pub best: Option<(Configuration, f64)>,
    /// True when the enumeration stopped at the cap.
    pub truncated: bool,
}

impl SearchSpaceSummary {
    pub fn best_objective(&self) -> Option<f64> {
        self.samples.first().copied()
    }
}

struct Enumerator<'e> {
    env: &'e TrussEnv,
    cap: Option<u64>,
    memo: HashMap<ConfigKey, u64>,
    summary: SearchSpaceSummary,
}

impl Enumerator<'_> {
    fn record_terminal(&mut self, state: &EpisodeState, kind: TerminalKind) {
        self.summary.unique_terminals += 1;
        match kind {
            TerminalKind::DeadEnd => {
                if self.env.objective(state).is_finite() {
                    self.summary.dead_end_terminals += 1;
                } else {
                    self.summary.unstable_terminals += 1;
                }
            }
            TerminalKind::Horizon | TerminalKind::Target => {
                let objective = self.env.objective(state);
                if objective.is_finite() {
                    self.summary.samples.push(objective);
                    let improves = self
                        .summary
                        .best
                        .as_ref()
                        .map_or(true, |(_, incumbent)| objective < *incumbent);
                    if improves {
                        self.summary.best = Some((state.config.clone(), objective));
                    }
                } else {
                    self.summary.unstable_terminals += 1;
                }
            }
        }
    }

    fn at_cap(&self) -> bool {
        self.cap.is_some_and(|cap| self.summary.samples.len() as u64 >= cap)
    }

    /// Returns the number of terminal sequences below `state`.
    fn dfs(&mut self, state: &EpisodeState) -> u64 {
        let key = config_key(&state.config);
        if let Some(&count) = self.memo.get(&key) {
            return count;
        }
        let actions = self.env.legal_actions(state);
        if let Some(kind) = self.env.terminal_kind_with(state, !actions.is_empty()) {
            self.record_terminal(state, kind);
            self.memo.insert(key, 1);
            return 1;
        }
        let mut sequences: u64 = 0;
        let mut complete = true;
        for action in &actions {
            if self.at_cap() {
                self.summary.truncated = true;
                complete = false;
                break;
            }
            let child = self.env.step_trusted(state, action);
            sequences = sequences.saturating_add(self.dfs(&child));
        }
        if complete {
            // Partial subtrees must not be memoized; a capped run would
            // otherwise undercount on revisit.
            self.memo.insert(key, sequences);
        }
        sequences
    }
}

/// Walks every action sequence from the environment's seed, deduplicating
/// objective evaluation and sampling by configuration, and stops once `cap`
/// unique stable designs have been collected (`truncated` is then set).
pub fn exhaustive_enumerate(
    env: &TrussEnv,
    cap: Option<u64>,
) -> Result<SearchSpaceSummary, OracleError> {
    if cap == Some(0) {
        return Err(OracleError::CapExceeded);
    }
    let mut enumerator = Enumerator {
        env,
        cap,
        memo: HashMap::new(),
        summary: SearchSpaceSummary {
            raw_terminal_sequences: 0,
            unique_terminals: 0,
            unstable_terminals: 0,
            dead_end_terminals: 0,
            samples: Vec::new(),
            best: None,
            truncated: false,
        },
    };
    let root = env.initial_state();
    enumerator.summary.raw_terminal_sequences = enumerator.dfs(&root);
    let mut summary = enumerator.summary;
    summary.samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(summary)
}

/// Share of enumerated designs no better than `achieved`:
/// `100 · |{d ∈ samples : d ≥ achieved}| / |samples|`. The global optimum
/// scores 100%.
pub fn percentile_score(achieved: f64, summary: &SearchSpaceSummary) -> f64 {
    assert!(!summary.samples.is_empty(), "percentile of an empty distribution");
    let below = summary.samples.partition_point(|d| *d < achieved);
    100.0 * (summary.samples.len() - below) as f64 / summary.samples.len() as f64
}

/// `100 · optimal / achieved`; equals 100 exactly when the achieved design
/// is optimal.
pub fn objective_ratio(optimal: f64, achieved: f64) -> f64 {
    assert!(achieved > 0.0, "objective ratio requires a positive achieved value");
    100.0 * optimal / achieved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::{
        DesignDomain, Element, ElementProperties, PointLoad, Support,
    };

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn toy_env(horizon: u32, width: i64, height: i64) -> TrussEnv {
        let seed = Configuration::new(
            [pt(0, 0), pt(1, 0), pt(0, 1)],
            [
                Element::new(pt(0, 0), pt(1, 0)).unwrap(),
                Element::new(pt(1, 0), pt(0, 1)).unwrap(),
                Element::new(pt(0, 1), pt(0, 0)).unwrap(),
            ],
        )
        .unwrap();
        let domain = DesignDomain {
            width,
            height,
            supports: vec![
                Support { at: pt(0, 0), fix_x: true, fix_y: true },
                Support { at: pt(0, 1), fix_x: true, fix_y: false },
            ],
            loads: vec![PointLoad { at: pt(1, 0), fx: 10.0, fy: -10.0 }],
            passive_regions: vec![],
            v_max: None,
            horizon: Some(horizon),
            target_node: None,
            max_element_length: None,
            self_weight_density: 0.0,
        };
        TrussEnv::new(domain, ElementProperties { young_modulus: 1000.0, area: 1.0 }, seed)
            .unwrap()
    }

    #[test]
    fn horizon_one_counts_the_root_actions() {
        let env = toy_env(1, 2, 2);
        let k = env.legal_actions(&env.initial_state()).len() as u64;
        let summary = exhaustive_enumerate(&env, None).unwrap();
        assert_eq!(summary.raw_terminal_sequences, k);
        assert!(!summary.truncated);
        assert_eq!(
            summary.samples.len() as u64 + summary.unstable_terminals,
            summary.unique_terminals
        );
    }

    #[test]
    fn memoized_enumeration_matches_plain_search() {
        // Independent re-enumeration without memoization or ordering
        // assumptions: breadth-first, counting sequences and unique terminal
        // configurations directly.
        let env = toy_env(2, 3, 2);
        let summary = exhaustive_enumerate(&env, None).unwrap();

        let mut frontier = vec![env.initial_state()];
        let mut sequences = 0u64;
        let mut terminal_keys = std::collections::BTreeSet::new();
        while let Some(state) = frontier.pop() {
            let actions = env.legal_actions(&state);
            if env.terminal_kind_with(&state, !actions.is_empty()).is_some() {
                sequences += 1;
                terminal_keys.insert(config_key(&state.config));
                continue;
            }
            for action in &actions {
                frontier.push(env.step_trusted(&state, action));
            }
        }
        assert_eq!(summary.raw_terminal_sequences, sequences);
        assert_eq!(summary.unique_terminals, terminal_keys.len() as u64);
    }

    #[test]
    fn cap_truncates_and_zero_cap_errors() {
        let env = toy_env(2, 3, 3);
        assert!(matches!(exhaustive_enumerate(&env, Some(0)), Err(OracleError::CapExceeded)));
        let capped = exhaustive_enumerate(&env, Some(5)).unwrap();
        assert!(capped.truncated);
        assert_eq!(capped.samples.len(), 5);
        let full = exhaustive_enumerate(&env, None).unwrap();
        assert!(!full.truncated);
        assert!(full.samples.len() > 5);
    }

    #[test]
    fn best_is_the_minimum_sample() {
        let env = toy_env(2, 3, 2);
        let summary = exhaustive_enumerate(&env, None).unwrap();
        let (_, best) = summary.best.as_ref().unwrap();
        assert_eq!(*best, summary.samples[0]);
        assert_eq!(percentile_score(*best, &summary), 100.0);
    }

    #[test]
    fn percentile_examples() {
        let summary = SearchSpaceSummary {
            raw_terminal_sequences: 4,
            unique_terminals: 4,
            unstable_terminals: 0,
            dead_end_terminals: 0,
            samples: vec![1.0, 2.0, 3.0, 4.0],
            best: None,
            truncated: false,
        };
        assert_eq!(percentile_score(1.0, &summary), 100.0);
        assert_eq!(percentile_score(3.0, &summary), 50.0);
        assert_eq!(percentile_score(5.0, &summary), 0.0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(objective_ratio(2.0, 2.0), 100.0);
        assert_eq!(objective_ratio(1.0, 2.0), 50.0);
    }
}
