//! The episodic design environment: states, transitions, terminal detection,
//! and objective evaluation with caching.
//!
//! An environment owns one design task. Transitions are deterministic: a
//! grammar action applied to a configuration yields exactly one successor.
//! Episodes end either after a fixed number of decision steps (`horizon`),
//! when a prescribed target node becomes active (progressive construction),
//! or when no legal action remains (dead end). Terminal designs are scored
//! by their worst nodal displacement; the score is cached by configuration
//! digest so a design is solved at most once per environment.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use crate::fe::{max_abs_displacement, self_weight_loads, solve_static, FeError, LoadVector};
use crate::grammar::{apply_action, enumerate_actions, Action};
use crate::model::{
    config_key, is_statically_determinate, ConfigKey, Configuration, DesignDomain,
    ElementProperties, ModelError,
};

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("illegal action: {0}")]
    IllegalAction(String),
    #[error("episode is already terminal")]
    TerminalState,
}

/// One point in an episode: the configuration built so far and the number of
/// decisions taken to reach it.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeState {
    pub config: Configuration,
    pub t: u32,
}

/// Why a state is terminal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalKind {
    /// The decision horizon was reached.
    Horizon,
    /// The prescribed target node became active.
    Target,
    /// No legal action remains.
    DeadEnd,
}

/// A normalized terminal reward in `[0, 1]`. Stable designs map through
/// `r = 1 / (1 + objective)`; unstable or dead-end terminals score zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Reward(f64);

impl Reward {
    pub const ZERO: Reward = Reward(0.0);

    pub fn from_objective(objective: f64) -> Reward {
        if objective.is_finite() {
            Reward(1.0 / (1.0 + objective))
        } else {
            Reward::ZERO
        }
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// The design environment for one task: domain, member properties, seed, and
/// the memoized objective evaluator.
pub struct TrussEnv {
    domain: DesignDomain,
    properties: ElementProperties,
    seed: Configuration,
    external_loads: LoadVector,
    cache: RefCell<HashMap<ConfigKey, f64>>,
    fe_evals: Cell<u64>,
}

impl TrussEnv {
    /// Builds an environment, validating the task as a whole: the domain and
    /// properties are well-formed, the seed is a valid statically determinate
    /// configuration inside the grid, external loads sit on seed nodes, the
    /// target (if any) is not already active, and no seed member enters a
    /// passive region or exceeds the member length cap.
    pub fn new(
        domain: DesignDomain,
        properties: ElementProperties,
        seed: Configuration,
    ) -> Result<Self, EnvError> {
        domain.validate()?;
        properties.validate()?;
        seed.validate()?;
        let err = |m: String| Err(EnvError::InvalidSeed(m));
        if seed.element_count() == 0 {
            return err("seed has no elements".into());
        }
        for p in seed.active_nodes() {
            if !domain.contains(p) {
                return err(format!("seed node {p} lies outside the grid"));
            }
        }
        if !is_statically_determinate(&seed, &domain) {
            return err("seed is not statically determinate (m + r ≠ 2n)".into());
        }
        for l in &domain.loads {
            if !seed.contains_node(l.at) {
                return err(format!("external load at {} is not on a seed node", l.at));
            }
        }
        if let Some(target) = domain.target_node {
            if seed.contains_node(target) {
                return err(format!("target node {target} is already active in the seed"));
            }
        }
        for e in seed.elements() {
            for r in &domain.passive_regions {
                if crate::geometry::segment_touches_region(e.segment(), r) {
                    return err(format!("seed element {e} enters a passive region"));
                }
            }
            if let Some(lmax) = domain.max_element_length {
                if e.length() > lmax {
                    return err(format!("seed element {e} exceeds the member length cap"));
                }
            }
        }
        let external_loads = LoadVector::from_domain(&domain);
        Ok(TrussEnv {
            domain,
            properties,
            seed,
            external_loads,
            cache: RefCell::new(HashMap::new()),
            fe_evals: Cell::new(0),
        })
    }

    pub fn domain(&self) -> &DesignDomain {
        &self.domain
    }

    pub fn properties(&self) -> &ElementProperties {
        &self.properties
    }

    pub fn seed(&self) -> &Configuration {
        &self.seed
    }

    pub fn initial_state(&self) -> EpisodeState {
        EpisodeState { config: self.seed.clone(), t: 0 }
    }

    /// Actions available at `s`. Empty when the episode is over, whether by
    /// horizon, target, or dead end.
    pub fn legal_actions(&self, s: &EpisodeState) -> Vec<Action> {
        if self.terminal_kind_cheap(s).is_some() {
            return Vec::new();
        }
        enumerate_actions(&s.config, &self.domain, &self.properties)
    }

    /// Horizon/target terminal checks only; no action enumeration.
    fn terminal_kind_cheap(&self, s: &EpisodeState) -> Option<TerminalKind> {
        if let Some(horizon) = self.domain.horizon {
            if s.t >= horizon {
                return Some(TerminalKind::Horizon);
            }
        }
        if let Some(target) = self.domain.target_node {
            if s.config.contains_node(target) {
                return Some(TerminalKind::Target);
            }
        }
        None
    }

    /// Full terminal classification. Enumerates actions to detect dead ends;
    /// callers that already hold the action list should use
    /// [`TrussEnv::terminal_kind_with`].
    pub fn terminal_kind(&self, s: &EpisodeState) -> Option<TerminalKind> {
        self.terminal_kind_cheap(s).or_else(|| {
            enumerate_actions(&s.config, &self.domain, &self.properties)
                .is_empty()
                .then_some(TerminalKind::DeadEnd)
        })
    }

    /// Terminal classification given an already-computed action list.
    pub fn terminal_kind_with(
        &self,
        s: &EpisodeState,
        actions_available: bool,
    ) -> Option<TerminalKind> {
        self.terminal_kind_cheap(s)
            .or((!actions_available).then_some(TerminalKind::DeadEnd))
    }

    pub fn is_terminal(&self, s: &EpisodeState) -> bool {
        self.terminal_kind(s).is_some()
    }

    /// Applies a legal action, returning the successor state.
    pub fn step(&self, s: &EpisodeState, a: &Action) -> Result<EpisodeState, EnvError> {
        if self.terminal_kind_cheap(s).is_some() {
            return Err(EnvError::TerminalState);
        }
        if !crate::grammar::action_is_legal(&s.config, &self.domain, &self.properties, a) {
            return Err(EnvError::IllegalAction(format!("{a}")));
        }
        let config = apply_action(&s.config, a)
            .map_err(|e| EnvError::IllegalAction(e.to_string()))?;
        Ok(EpisodeState { config, t: s.t + 1 })
    }

    /// Like [`TrussEnv::step`] for actions known to come from
    /// [`TrussEnv::legal_actions`]; skips the legality re-check.
    pub(crate) fn step_trusted(&self, s: &EpisodeState, a: &Action) -> EpisodeState {
        let config = apply_action(&s.config, a).expect("enumerated action must apply");
        EpisodeState { config, t: s.t + 1 }
    }

    /// The design objective of a configuration: the worst absolute nodal
    /// displacement under the environment's load case (external loads plus
    /// self-weight when the domain has a nonzero density). Unstable or
    /// unevaluable configurations score `+∞`. Results are cached by
    /// configuration digest; the cache-miss count is the number of
    /// finite-element evaluations performed.
    pub fn objective_of(&self, config: &Configuration) -> f64 {
        let key = config_key(config);
        if let Some(&v) = self.cache.borrow().get(&key) {
            return v;
        }
        let mut loads = self.external_loads.clone();
        if self.domain.self_weight_density > 0.0 {
            loads.merge(&self_weight_loads(
                config,
                &self.properties,
                self.domain.self_weight_density,
            ));
        }
        self.fe_evals.set(self.fe_evals.get() + 1);
        let value = match solve_static(config, &self.properties, &loads, &self.domain) {
            Ok(u) => max_abs_displacement(&u),
            Err(FeError::UnstableStructure { .. }) | Err(FeError::InvalidInput(_)) => {
                f64::INFINITY
            }
        };
        self.cache.borrow_mut().insert(key, value);
        value
    }

    pub fn objective(&self, s: &EpisodeState) -> f64 {
        self.objective_of(&s.config)
    }

    /// Terminal reward for a state whose terminal kind is already known.
    pub fn terminal_reward_with(&self, s: &EpisodeState, kind: TerminalKind) -> Reward {
        match kind {
            TerminalKind::DeadEnd => Reward::ZERO,
            TerminalKind::Horizon | TerminalKind::Target => {
                Reward::from_objective(self.objective(s))
            }
        }
    }

    /// Terminal reward of `s`. Panics if `s` is not terminal.
    pub fn terminal_reward(&self, s: &EpisodeState) -> Reward {
        let kind = self.terminal_kind(s).expect("terminal_reward requires a terminal state");
        self.terminal_reward_with(s, kind)
    }

    /// Number of finite-element evaluations performed so far (cache misses).
    pub fn fe_evaluations(&self) -> u64 {
        self.fe_evals.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::model::{Element, Support};

    fn pt(x: i64, y: i64) -> Point {
        Point::new(x, y)
    }

    fn el(a: (i64, i64), b: (i64, i64)) -> Element {
        Element::new(pt(a.0, a.1), pt(b.0, b.1)).unwrap()
    }

    fn triangle() -> Configuration {
        Configuration::new(
            [pt(0, 0), pt(1, 0), pt(0, 1)],
            [el((0, 0), (1, 0)), el((1, 0), (0, 1)), el((0, 1), (0, 0))],
        )
        .unwrap()
    }

    fn props() -> ElementProperties {
        ElementProperties { young_modulus: 1000.0, area: 1.0 }
    }

    fn horizon_env(horizon: u32) -> TrussEnv {
        let domain = DesignDomain {
            width: 3,
            height: 3,
            supports: vec![
                Support { at: pt(0, 0), fix_x: true, fix_y: true },
                Support { at: pt(0, 1), fix_x: true, fix_y: false },
            ],
            loads: vec![crate::model::PointLoad { at: pt(1, 0), fx: 10.0, fy: -10.0 }],
            passive_regions: vec![],
            v_max: None,
            horizon: Some(horizon),
            target_node: None,
            max_element_length: None,
            self_weight_density: 0.0,
        };
        TrussEnv::new(domain, props(), triangle()).unwrap()
    }

    #[test]
    fn step_increments_time_and_grows_the_truss() {
        let env = horizon_env(2);
        let s0 = env.initial_state();
        let actions = env.legal_actions(&s0);
        assert!(!actions.is_empty());
        let s1 = env.step(&s0, &actions[0]).unwrap();
        assert_eq!(s1.t, 1);
        assert_eq!(s1.config.node_count(), 4);
    }

    #[test]
    fn distinct_actions_give_distinct_keys() {
        let env = horizon_env(2);
        let s0 = env.initial_state();
        let actions = env.legal_actions(&s0);
        assert!(actions.len() >= 2);
        let a = env.step(&s0, &actions[0]).unwrap();
        let b = env.step(&s0, &actions[1]).unwrap();
        assert_ne!(config_key(&a.config), config_key(&b.config));
    }

    #[test]
    fn stepping_a_terminal_state_fails() {
        let env = horizon_env(1);
        let s0 = env.initial_state();
        let actions = env.legal_actions(&s0);
        let s1 = env.step(&s0, &actions[0]).unwrap();
        assert_eq!(env.terminal_kind(&s1), Some(TerminalKind::Horizon));
        assert!(matches!(env.step(&s1, &actions[0]), Err(EnvError::TerminalState)));
        assert!(env.legal_actions(&s1).is_empty());
    }

    #[test]
    fn progressive_mode_terminates_on_target() {
        let domain = DesignDomain {
            width: 3,
            height: 2,
            supports: vec![
                Support { at: pt(0, 0), fix_x: true, fix_y: true },
                Support { at: pt(0, 1), fix_x: true, fix_y: false },
            ],
            loads: vec![],
            passive_regions: vec![],
            v_max: None,
            horizon: None,
            target_node: Some(pt(2, 0)),
            max_element_length: None,
            self_weight_density: 1.0,
        };
        let env = TrussEnv::new(domain, props(), triangle()).unwrap();
        let s0 = env.initial_state();
        assert_eq!(env.terminal_kind(&s0), None);
        // Walk until the target activates; every prefix must be non-terminal.
        let mut s = s0;
        let mut guard = 0;
        while env.terminal_kind(&s) != Some(TerminalKind::Target) {
            let actions = env.legal_actions(&s);
            let next = actions
                .iter()
                .find(|a| a.node == pt(2, 0))
                .or_else(|| actions.first())
                .expect("no dead end expected on this toy");
            s = env.step(&s, next).unwrap();
            guard += 1;
            assert!(guard < 10, "target should be reachable quickly");
        }
        assert!(s.config.contains_node(pt(2, 0)));
    }

    #[test]
    fn objective_is_cached_by_configuration() {
        let env = horizon_env(2);
        let s0 = env.initial_state();
        let before = env.fe_evaluations();
        let a = env.objective(&s0);
        let mid = env.fe_evaluations();
        let b = env.objective(&s0);
        assert_eq!(mid, before + 1);
        assert_eq!(env.fe_evaluations(), mid);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn reward_examples() {
        assert_eq!(Reward::from_objective(0.0).value(), 1.0);
        assert_eq!(Reward::from_objective(1.0).value(), 0.5);
        assert_eq!(Reward::from_objective(f64::INFINITY).value(), 0.0);
    }

    #[test]
    fn reward_orders_inversely_to_objective() {
        let mut last = f64::INFINITY;
        for obj in [0.0, 0.01, 0.5, 3.0, 1e6] {
            let r = Reward::from_objective(obj).value();
            assert!(r < last);
            assert!((0.0..=1.0).contains(&r));
            last = r;
        }
    }

    #[test]
    fn seed_validation_failures() {
        // Seed with load on a node it does not contain.
        let mut domain = horizon_env(1).domain().clone();
        domain.loads.push(crate::model::PointLoad { at: pt(2, 2), fx: 1.0, fy: 0.0 });
        assert!(matches!(
            TrussEnv::new(domain, props(), triangle()),
            Err(EnvError::InvalidSeed(_))
        ));
    }
}
