//! The tree search engine: selection, expansion, simulation, and
//! backpropagation over the design environment.
//!
//! Selection scores children with a weighted UCT rule,
//! `(1−α)·(vΣ/n) + α·√(2·ln Σnₗ / n)`, where `α` trades the mean return of a
//! branch against the confidence radius of rarely visited siblings. An
//! extended variant blends in the best return seen through a branch and the
//! reward variance. Rewards live in `[0, 1]`, so at `α = 0.5` the weighted
//! rule ranks children exactly like classical UCT with exploration constant
//! `c = 1` (every score is halved).

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::env::{EpisodeState, Reward, TerminalKind, TrussEnv};
use crate::geometry::{covers_node_stats, reset_covers_node_stats, HotPathStats};
use crate::grammar::Action;
use crate::model::{config_key, ConfigKey, Configuration};

#[derive(Debug, thiserror::Error)]
pub enum MctsError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("no stable design was observed during training")]
    NoStableDesign,
}

/// Which selection rule to use.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UctVariant {
    #[default]
    Standard,
    Extended,
}

/// Search hyperparameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Exploitation–exploration weight in `[0, 1]`.
    pub alpha: f64,
    /// Mean-vs-best blend in `[0, 1]`; only used by the extended rule.
    pub beta: f64,
    pub uct: UctVariant,
    /// Number of training episodes.
    pub episodes: u32,
    pub rng_seed: u64,
    /// When set, every state created during expansion or simulation is
    /// solved immediately, not just terminal states. Costs many more
    /// finite-element evaluations for purely diagnostic objective values.
    pub eager_objective_evaluation: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            alpha: 0.3,
            beta: 0.0,
            uct: UctVariant::Standard,
            episodes: 1000,
            rng_seed: 0,
            eager_objective_evaluation: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), MctsError> {
        let err = |m: String| Err(MctsError::InvalidConfig(m));
        if !(0.0..=1.0).contains(&self.alpha) {
            return err(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return err(format!("beta must lie in [0, 1], got {}", self.beta));
        }
        if self.episodes == 0 {
            return err("episodes must be ≥ 1".into());
        }
        Ok(())
    }
}

/// Weighted UCT score of a visited child.
pub fn uct_score(v_sum: f64, n: u64, parent_total: u64, alpha: f64) -> f64 {
    let mean = v_sum / n as f64;
    let explore = (2.0 * (parent_total as f64).ln() / n as f64).sqrt();
    (1.0 - alpha) * mean + alpha * explore
}

/// Reward variance of a visit stream from its running sums, clamped at zero.
pub fn reward_variance(v_sum: f64, v_sq_sum: f64, n: u64) -> f64 {
    let mean = v_sum / n as f64;
    (v_sq_sum / n as f64 - mean * mean).max(0.0)
}

/// Extended UCT score: blends the branch mean with the best reward seen
/// through the branch, and widens exploration by the reward variance.
pub fn uct_score_extended(
    v_sum: f64,
    v_best: f64,
    v_sq_sum: f64,
    n: u64,
    parent_total: u64,
    alpha: f64,
    beta: f64,
) -> f64 {
    let mean = v_sum / n as f64;
    let exploit = (1.0 - beta) * mean + beta * v_best;
    let explore = (2.0 * (parent_total as f64).ln() / n as f64
        + reward_variance(v_sum, v_sq_sum, n))
    .sqrt();
    (1.0 - alpha) * exploit + alpha * explore
}

pub type NodeId = usize;

/// One node of the search tree: a design state plus its visit statistics.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub state: EpisodeState,
    pub key: ConfigKey,
    /// Action that produced this node from its parent; `None` at the root.
    pub action: Option<Action>,
    pub n: u64,
    pub v_sum: f64,
    pub v_best: f64,
    pub v_sq_sum: f64,
    /// `None` until expanded; an expanded dead end has an empty list.
    pub children: Option<Vec<NodeId>>,
    pub terminal: Option<TerminalKind>,
    /// Episodes whose simulation launched from this node.
    pub rollouts_from_here: u64,
    /// Objective recorded at creation when eager evaluation is on.
    pub objective: Option<f64>,
}

impl TreeNode {
    fn new(state: EpisodeState, action: Option<Action>) -> Self {
        let key = config_key(&state.config);
        TreeNode {
            state,
            key,
            action,
            n: 0,
            v_sum: 0.0,
            v_best: 0.0,
            v_sq_sum: 0.0,
            children: None,
            terminal: None,
            rollouts_from_here: 0,
            objective: None,
        }
    }
}

/// Arena-allocated search tree; node 0 is the root.
#[derive(Clone, Debug, Default)]
pub struct SearchTree {
    nodes: Vec<TreeNode>,
}

impl SearchTree {
    pub const ROOT: NodeId = 0;

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, node: TreeNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

/// Wall-clock time spent in each phase of the search.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimings {
    pub selection: Duration,
    pub expansion: Duration,
    pub simulation: Duration,
    pub backpropagation: Duration,
    pub total: Duration,
}

impl PhaseTimings {
    /// Time not attributable to any of the four phases.
    pub fn other(&self) -> Duration {
        self.total.saturating_sub(
            self.selection + self.expansion + self.simulation + self.backpropagation,
        )
    }
}

/// The best terminal design observed during training, with the action
/// sequence that builds it from the seed.
#[derive(Clone, Debug)]
pub struct BestDesign {
    pub objective: f64,
    pub config: Configuration,
    pub actions: Vec<Action>,
}

/// The deterministic policy read off the tree after training: at each layer,
/// the visited child with the highest mean return.
#[derive(Clone, Debug, Default)]
pub struct GreedyPolicy {
    pub actions: Vec<Action>,
    pub config: Option<Configuration>,
}

/// Learning-curve sample after one episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub episode: u32,
    /// Best objective seen so far; `+∞` until a stable terminal appears.
    pub best_objective: f64,
    /// Cumulative finite-element evaluations.
    pub fe_evals: u64,
}

/// Everything a training run produces.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub config: SearchConfig,
    pub episodes: Vec<EpisodeRecord>,
    pub best: Option<BestDesign>,
    pub greedy: GreedyPolicy,
    /// Finite-element evaluations performed by this run (cache misses).
    pub fe_evals: u64,
    /// Finite-element evaluations that had been performed when the run's
    /// final best design first appeared — the cost required to achieve the
    /// policy, as opposed to the cost of the full episode budget.
    pub fe_evals_to_best: u64,
    pub timings: PhaseTimings,
    pub covers_node: HotPathStats,
    pub tree_size: usize,
}

impl RunResult {
    /// An empty result (zero episodes); timing tables render as all-zero.
    pub fn empty(config: SearchConfig) -> Self {
        RunResult {
            config,
            episodes: Vec::new(),
            best: None,
            greedy: GreedyPolicy::default(),
            fe_evals: 0,
            fe_evals_to_best: 0,
            timings: PhaseTimings::default(),
            covers_node: HotPathStats::default(),
            tree_size: 0,
        }
    }
}

/// Returns the best observed design and its action sequence.
pub fn extract_best_design(result: &RunResult) -> Result<(&Configuration, &[Action]), MctsError> {
    result
        .best
        .as_ref()
        .map(|b| (&b.config, b.actions.as_slice()))
        .ok_or(MctsError::NoStableDesign)
}

/// An in-progress search. Step-level methods are public so the four phases
/// can be driven and inspected independently; [`train`] is the packaged loop.
pub struct Search<'e> {
    env: &'e TrussEnv,
    cfg: SearchConfig,
    tree: SearchTree,
    rng: ChaCha8Rng,
    episode: u32,
    records: Vec<EpisodeRecord>,
    best: Option<BestDesign>,
    timings: PhaseTimings,
    started: Instant,
    fe_at_start: u64,
    covers_at_start: HotPathStats,
}

impl<'e> Search<'e> {
    pub fn new(env: &'e TrussEnv, cfg: &SearchConfig) -> Result<Self, MctsError> {
        cfg.validate()?;
        let mut tree = SearchTree::default();
        tree.push(TreeNode::new(env.initial_state(), None));
        Ok(Search {
            env,
            cfg: *cfg,
            tree,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            episode: 0,
            records: Vec::with_capacity(cfg.episodes as usize),
            best: None,
            timings: PhaseTimings::default(),
            started: Instant::now(),
            fe_at_start: env.fe_evaluations(),
            covers_at_start: covers_node_stats(),
        })
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn episodes_run(&self) -> u32 {
        self.episode
    }

    /// Descends from the root through expanded nodes, following the UCT
    /// argmax over visited children and jumping into unvisited children
    /// first (they carry an implicit infinite score). Stops at the first
    /// unexpanded or terminal node. Ties break on child order, which is the
    /// deterministic action enumeration order.
    pub fn select_path(&self) -> Vec<NodeId> {
        let mut path = vec![SearchTree::ROOT];
        loop {
            let node = self.tree.node(*path.last().unwrap());
            if node.terminal.is_some() {
                return path;
            }
            let Some(children) = &node.children else { return path };
            if children.is_empty() {
                return path;
            }
            let next = match children.iter().find(|&&c| self.tree.node(c).n == 0) {
                Some(&unvisited) => unvisited,
                None => {
                    let total: u64 = children.iter().map(|&c| self.tree.node(c).n).sum();
                    let mut best = children[0];
                    let mut best_score = f64::NEG_INFINITY;
                    for &c in children {
                        let score = self.score(self.tree.node(c), total);
                        if score > best_score {
                            best_score = score;
                            best = c;
                        }
                    }
                    best
                }
            };
            path.push(next);
        }
    }

    fn score(&self, node: &TreeNode, parent_total: u64) -> f64 {
        match self.cfg.uct {
            UctVariant::Standard => {
                uct_score(node.v_sum, node.n, parent_total, self.cfg.alpha)
            }
            UctVariant::Extended => uct_score_extended(
                node.v_sum,
                node.v_best,
                node.v_sq_sum,
                node.n,
                parent_total,
                self.cfg.alpha,
                self.cfg.beta,
            ),
        }
    }

    /// Expands a node: classifies it terminal, or creates one child per
    /// legal action. Re-expansion is a no-op returning the existing
    /// children.
    pub fn expand(&mut self, id: NodeId) -> Vec<NodeId> {
        if let Some(children) = &self.tree.node(id).children {
            return children.clone();
        }
        let state = self.tree.node(id).state.clone();
        let actions = self.env.legal_actions(&state);
        if let Some(kind) = self.env.terminal_kind_with(&state, !actions.is_empty()) {
            let node = &mut self.tree.nodes[id];
            node.terminal = Some(kind);
            node.children = Some(Vec::new());
            return Vec::new();
        }
        let mut ids = Vec::with_capacity(actions.len());
        for action in actions {
            let child_state = self.env.step_trusted(&state, &action);
            let mut child = TreeNode::new(child_state, Some(action));
            if self.cfg.eager_objective_evaluation {
                child.objective = Some(self.env.objective_of(&child.state.config));
            }
            ids.push(self.tree.push(child));
        }
        self.tree.nodes[id].children = Some(ids.clone());
        ids
    }

    /// Random playout from `state` to a terminal state under the uniform
    /// rollout policy. Returns the terminal state, the actions taken, and
    /// the terminal kind.
    pub fn rollout(&mut self, state: EpisodeState) -> (EpisodeState, Vec<Action>, TerminalKind) {
        let mut current = state;
        let mut taken = Vec::new();
        loop {
            let actions = self.env.legal_actions(&current);
            if let Some(kind) = self.env.terminal_kind_with(&current, !actions.is_empty()) {
                return (current, taken, kind);
            }
            let action = actions[self.rng.gen_range(0..actions.len())];
            current = self.env.step_trusted(&current, &action);
            if self.cfg.eager_objective_evaluation {
                self.env.objective_of(&current.config);
            }
            taken.push(action);
        }
    }

    /// Updates the statistics of every node on `path` with reward `r`.
    pub fn backpropagate(&mut self, path: &[NodeId], r: Reward) {
        for &id in path {
            let node = &mut self.tree.nodes[id];
            node.n += 1;
            node.v_sum += r.value();
            node.v_best = node.v_best.max(r.value());
            node.v_sq_sum += r.value() * r.value();
        }
    }

    /// One full episode: select, expand, simulate, backpropagate.
    pub fn run_episode(&mut self) {
        let t0 = Instant::now();
        let mut path = self.select_path();
        let leaf = *path.last().unwrap();
        self.timings.selection += t0.elapsed();

        let t1 = Instant::now();
        let children = self.expand(leaf);
        self.timings.expansion += t1.elapsed();

        let t2 = Instant::now();
        let (reward, terminal_state, actions_to_terminal, kind) = if children.is_empty() {
            // Leaf is terminal (by horizon, target, or dead end).
            let kind = self.tree.node(leaf).terminal.expect("expand marked terminal");
            let state = self.tree.node(leaf).state.clone();
            let reward = self.env.terminal_reward_with(&state, kind);
            let actions = self.path_actions(&path);
            (reward, state, actions, kind)
        } else {
            let launch = children[self.rng.gen_range(0..children.len())];
            path.push(launch);
            self.tree.nodes[launch].rollouts_from_here += 1;
            let launch_state = self.tree.node(launch).state.clone();
            let (terminal, rolled, kind) = self.rollout(launch_state);
            let reward = self.env.terminal_reward_with(&terminal, kind);
            let mut actions = self.path_actions(&path);
            actions.extend(rolled);
            (reward, terminal, actions, kind)
        };
        self.timings.simulation += t2.elapsed();

        let t3 = Instant::now();
        self.backpropagate(&path, reward);
        self.timings.backpropagation += t3.elapsed();

        if kind != TerminalKind::DeadEnd {
            let objective = self.env.objective(&terminal_state);
            if objective.is_finite()
                && self.best.as_ref().map_or(true, |b| objective < b.objective)
            {
                self.best = Some(BestDesign {
                    objective,
                    config: terminal_state.config.clone(),
                    actions: actions_to_terminal,
                });
            }
        }

        self.episode += 1;
        self.records.push(EpisodeRecord {
            episode: self.episode,
            best_objective: self.best.as_ref().map_or(f64::INFINITY, |b| b.objective),
            fe_evals: self.env.fe_evaluations() - self.fe_at_start,
        });
    }

    fn path_actions(&self, path: &[NodeId]) -> Vec<Action> {
        path.iter()
            .filter_map(|&id| self.tree.node(id).action)
            .collect()
    }

    /// Greedy tree policy: argmax mean return among visited children, layer
    /// by layer, until an unexpanded or terminal node.
    fn greedy_policy(&self) -> GreedyPolicy {
        let mut actions = Vec::new();
        let mut id = SearchTree::ROOT;
        loop {
            let node = self.tree.node(id);
            let Some(children) = &node.children else { break };
            let best = children
                .iter()
                .filter(|&&c| self.tree.node(c).n > 0)
                .max_by(|&&a, &&b| {
                    let ma = self.tree.node(a).v_sum / self.tree.node(a).n as f64;
                    let mb = self.tree.node(b).v_sum / self.tree.node(b).n as f64;
                    ma.partial_cmp(&mb).unwrap()
                });
            let Some(&next) = best else { break };
            actions.push(self.tree.node(next).action.expect("non-root has an action"));
            id = next;
        }
        GreedyPolicy {
            actions,
            config: (id != SearchTree::ROOT)
                .then(|| self.tree.node(id).state.config.clone()),
        }
    }

    /// Finalizes the run.
    pub fn finish(mut self) -> RunResult {
        self.timings.total = self.started.elapsed();
        let covers_now = covers_node_stats();
        let fe_evals = self.env.fe_evaluations() - self.fe_at_start;
        let fe_evals_to_best = match &self.best {
            Some(best) => self
                .records
                .iter()
                .find(|r| r.best_objective == best.objective)
                .map_or(fe_evals, |r| r.fe_evals),
            None => fe_evals,
        };
        RunResult {
            config: self.cfg,
            greedy: self.greedy_policy(),
            best: self.best,
            episodes: self.records,
            fe_evals,
            fe_evals_to_best,
            timings: self.timings,
            covers_node: HotPathStats {
                calls: covers_now.calls - self.covers_at_start.calls,
                nanos: covers_now.nanos - self.covers_at_start.nanos,
            },
            tree_size: self.tree.len(),
        }
    }
}

/// Runs a full training: `episodes` iterations of the four phases, tracking
/// the best terminal design, the learning curve, finite-element evaluation
/// counts, and per-phase wall-clock timings.
pub fn train(env: &TrussEnv, cfg: &SearchConfig) -> Result<RunResult, MctsError> {
    reset_covers_node_stats();
    let mut search = Search::new(env, cfg)?;
    for _ in 0..cfg.episodes {
        search.run_episode();
    }
    Ok(search.finish())
}
