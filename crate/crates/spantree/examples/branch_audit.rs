//! Scratch analysis: locate the global optimum inside the layer-1/layer-2
//! mean-reward rankings, the structure that decides whether UCT can funnel
//! to it.
use std::collections::HashMap;

use spantree::bench::resolve_case;
use spantree::env::{EpisodeState, TrussEnv};
use spantree::model::config_key;

fn subtree(env: &TrussEnv, root: EpisodeState) -> (f64, f64, u64) {
    // (min objective, mean positive reward, unique positive terminals)
    let mut mn = f64::INFINITY;
    let mut sum_r = 0.0;
    let mut cnt = 0u64;
    let mut seen = HashMap::new();
    let mut stack = vec![root];
    while let Some(s) = stack.pop() {
        let key = config_key(&s.config);
        if seen.insert(key, ()).is_some() {
            continue;
        }
        let acts = env.legal_actions(&s);
        if let Some(kind) = env.terminal_kind_with(&s, !acts.is_empty()) {
            let r = env.terminal_reward_with(&s, kind).value();
            if r > 0.0 {
                sum_r += r;
                cnt += 1;
                let obj = env.objective(&s);
                if obj < mn {
                    mn = obj;
                }
            }
            continue;
        }
        for a2 in &acts {
            stack.push(env.step(&s, a2).unwrap());
        }
    }
    (mn, sum_r / cnt.max(1) as f64, cnt)
}

fn main() {
    let arg = std::env::args().nth(1).unwrap();
    let spec = resolve_case(&arg).unwrap();
    let env = spec.env().unwrap();
    let root = env.initial_state();
    let actions = env.legal_actions(&root);

    let mut l1: Vec<(usize, f64, f64, u64)> = Vec::new();
    for (i, a) in actions.iter().enumerate() {
        let child = env.step(&root, a).unwrap();
        let (mn, mean, cnt) = subtree(&env, child);
        l1.push((i, mn, mean, cnt));
    }
    let best = l1.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    l1.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap());
    let l1_rank = l1.iter().position(|x| x.1 <= best + 1e-12).unwrap();
    let total: u64 = l1.iter().map(|x| x.3).sum();

    // Within the optimum's L1 branch: rank its L2 parent by mean.
    let opt_action = &actions[l1[l1_rank].0];
    let opt_child = env.step(&root, opt_action).unwrap();
    let l2_actions = env.legal_actions(&opt_child);
    let mut l2: Vec<(f64, f64)> = Vec::new();
    for a in &l2_actions {
        let grand = env.step(&opt_child, a).unwrap();
        let (mn, mean, _) = subtree(&env, grand);
        l2.push((mn, mean));
    }
    l2.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    let l2_rank = l2.iter().position(|x| x.0 <= best + 1e-12).unwrap();

    println!(
        "{}: optimum {:.5} | space {} | B1 {} | opt L1 rank {}/{} | opt L2 rank {}/{}",
        spec.name,
        best,
        total,
        actions.len(),
        l1_rank,
        actions.len(),
        l2_rank,
        l2_actions.len()
    );
}
