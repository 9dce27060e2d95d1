//! Property tests for chunk sets, propagation and conflict repair.

use std::collections::{BTreeSet, HashSet};

use gbsat::{ChunkSet, Lit, Merge, Mode, SolveResult, Solver, SolverConfig, Strategy as Repair, Undo, Var};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Op {
    Insert(u32),
    Remove(u32),
    Union(Vec<u32>),
    Difference(Vec<u32>),
    Subset(Vec<u32>),
    Intersects(Vec<u32>),
    Substitute(u32, Vec<u32>),
}

fn ids() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(prop_oneof![0u32..80, 0u32..2000], 0..12)
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0u32..2000).prop_map(Op::Insert),
        (0u32..2000).prop_map(Op::Remove),
        ids().prop_map(Op::Union),
        ids().prop_map(Op::Difference),
        ids().prop_map(Op::Subset),
        ids().prop_map(Op::Intersects),
        ((0u32..80), ids()).prop_map(|(a, b)| Op::Substitute(a, b)),
    ]
}

fn to_set(v: &[u32]) -> ChunkSet {
    v.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // 256 cases of up to 500 operations: well over 10^5 operations in total.
    #[test]
    fn chunkset_matches_sorted_vec(ops in prop::collection::vec(op(), 400..500)) {
        let mut s = ChunkSet::new();
        let mut m: BTreeSet<u32> = BTreeSet::new();
        for o in ops {
            match o {
                Op::Insert(x) => prop_assert_eq!(s.insert(x), m.insert(x)),
                Op::Remove(x) => prop_assert_eq!(s.remove(x), m.remove(&x)),
                Op::Union(v) => {
                    s.union_with(&to_set(&v));
                    m.extend(v);
                }
                Op::Difference(v) => {
                    s.difference_with(&to_set(&v));
                    for x in v {
                        m.remove(&x);
                    }
                }
                Op::Subset(v) => {
                    let o: BTreeSet<u32> = v.iter().copied().collect();
                    prop_assert_eq!(s.is_subset(&to_set(&v)), m.is_subset(&o));
                    prop_assert_eq!(to_set(&v).is_subset(&s), o.is_subset(&m));
                }
                Op::Intersects(v) => {
                    let o: BTreeSet<u32> = v.iter().copied().collect();
                    prop_assert_eq!(s.intersects(&to_set(&v)), !m.is_disjoint(&o));
                    let i: Vec<u32> = s.intersection(&to_set(&v)).iter().collect();
                    let j: Vec<u32> = m.intersection(&o).copied().collect();
                    prop_assert_eq!(i, j);
                }
                Op::Substitute(x, v) => {
                    let had = m.remove(&x);
                    if had {
                        m.extend(v.iter().copied());
                    }
                    prop_assert_eq!(s.substitute(x, &to_set(&v)), had);
                }
            }
            prop_assert_eq!(s.len(), m.len());
            prop_assert_eq!(s.is_empty(), m.is_empty());
            prop_assert_eq!(s.first(), m.iter().next().copied());
        }
        let got: Vec<u32> = s.iter().collect();
        let want: Vec<u32> = m.into_iter().collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn chunkset_union_subset_laws(a in ids(), b in ids()) {
        let (sa, sb) = (to_set(&a), to_set(&b));
        let u = sa.union(&sb);
        prop_assert!(sa.is_subset(&u) && sb.is_subset(&u));
        prop_assert!(u.is_subset_of_union(&sa, &sb));
        prop_assert_eq!(sa.union(&ChunkSet::new()), sa.clone());
        prop_assert_eq!(sa.union(&sa), sa.clone());
        prop_assert!(sa.difference(&sb).is_subset(&sa));
        prop_assert!(!sa.difference(&sb).intersects(&sb));
    }
}

fn formula_strategy(max_vars: usize, max_clauses: usize) -> impl Strategy<Value = (usize, Vec<Vec<i32>>)> {
    (3..=max_vars).prop_flat_map(move |n| {
        let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        let clause = prop::collection::vec(lit, 1..=4);
        (Just(n), prop::collection::vec(clause, 1..=max_clauses))
    })
}

fn to_lits(f: &[Vec<i32>]) -> Vec<Vec<Lit>> {
    f.iter()
        .map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect())
        .collect()
}

/// Unit propagation by repeated full clause scans. `None` on conflict.
fn naive_fixpoint(f: &[Vec<Lit>], start: &[Lit]) -> Option<HashSet<Lit>> {
    let mut a: HashSet<Lit> = HashSet::new();
    for &l in start {
        if a.contains(&!l) {
            return None;
        }
        a.insert(l);
    }
    loop {
        let mut changed = false;
        for c in f {
            if c.iter().any(|l| a.contains(l)) {
                continue;
            }
            let mut free: Vec<Lit> = c.iter().copied().filter(|l| !a.contains(&!*l)).collect();
            free.sort();
            free.dedup();
            match free.len() {
                0 => return None,
                1 => {
                    a.insert(free[0]);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(a);
        }
    }
}

fn all_modes() -> Vec<SolverConfig> {
    vec![
        SolverConfig::new(Mode::Ncb),
        SolverConfig::new(Mode::Cb),
        SolverConfig::new(Mode::Gb),
        SolverConfig {
            blockers: Some(false),
            ..SolverConfig::new(Mode::Gb)
        },
        SolverConfig {
            merge: Merge::Eager,
            ..SolverConfig::new(Mode::Gb)
        },
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bcp_matches_naive_fixpoint(
        (n, f) in formula_strategy(50, 120),
        picks in prop::collection::vec((0usize..50, any::<bool>()), 1..20),
    ) {
        let f = to_lits(&f);
        let script: Vec<Lit> = picks.iter().map(|&(v, p)| Var::from_index(v % n).lit(p)).collect();
        for mut cfg in all_modes() {
            cfg.decisions = script.clone();
            let mut s = Solver::new(n, &f, cfg).unwrap();
            if s.is_unsat() {
                prop_assert!(naive_fixpoint(&f, &[]).is_none() || f.iter().any(|c| c.is_empty()));
                continue;
            }
            let mut decided: Vec<Lit> = Vec::new();
            loop {
                let conflict = s.propagate();
                let naive = naive_fixpoint(&f, &decided);
                match conflict {
                    Some(_) => {
                        prop_assert!(naive.is_none(), "bcp conflict, naive none");
                        break;
                    }
                    None => {
                        let naive = naive.expect("naive conflict, bcp none");
                        let got: HashSet<Lit> = s.trail().lits().iter().copied().collect();
                        prop_assert_eq!(got, naive);
                    }
                }
                let Some(d) = s.decide() else { break };
                decided.push(d);
            }
        }
    }
}

fn brute_models(n: usize, f: &[Vec<Lit>]) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|&a| {
            f.iter()
                .all(|c| c.iter().any(|l| ((a >> l.var().index()) & 1 == 1) == l.is_positive()))
        })
        .collect()
}

fn gb_configs() -> Vec<SolverConfig> {
    let mut v = Vec::new();
    for merge in [Merge::None, Merge::Eager, Merge::Lazy] {
        for bb in [false, true] {
            v.push(SolverConfig {
                merge,
                bb,
                ..SolverConfig::new(Mode::Gb)
            });
        }
    }
    v.push(SolverConfig::new(Mode::Cb));
    v.push(SolverConfig::new(Mode::Ncb));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    /// Steps the engine by hand and checks every repair.
    #[test]
    fn repairs_are_sound_and_progress((n, f) in formula_strategy(12, 55)) {
        let f = to_lits(&f);
        let models = brute_models(n, &f);
        for mut cfg in gb_configs() {
            cfg.check = true;
            let label = cfg.label();
            let bb = cfg.bb;
            let mut s = Solver::new(n, &f, cfg).unwrap();
            if s.is_unsat() {
                prop_assert!(models.is_empty());
                continue;
            }
            let mut root: HashSet<Var> = HashSet::new();
            let mut steps = 0;
            let verdict = loop {
                steps += 1;
                prop_assert!(steps < 100_000, "{} does not terminate", label);
                let now: HashSet<Var> = s
                    .trail()
                    .lits()
                    .iter()
                    .map(|l| l.var())
                    .filter(|&v| s.trail().gamma(v).is_empty())
                    .collect();
                prop_assert!(root.is_subset(&now), "{}: root literals lost", label);
                root = now;
                let Some(c) = s.propagate() else {
                    if s.decide().is_none() {
                        break true;
                    }
                    continue;
                };
                let t = s.trail();
                let conflict_lits = s.clauses().lits(c).to_vec();
                prop_assert!(conflict_lits.iter().all(|&l| t.is_false(l)));
                let Some(plan) = s.plan_repair(c, Repair::Native) else {
                    break false;
                };
                let t = s.trail();
                // D is falsified before the undo.
                prop_assert!(plan.learned.iter().all(|&l| t.is_false(l)));
                // D is implied by the formula.
                prop_assert!(models.iter().all(|&a| plan
                    .learned
                    .iter()
                    .any(|l| ((a >> l.var().index()) & 1 == 1) == l.is_positive())));
                let removed: HashSet<Lit> = plan.unassigned.iter().map(|&l| !l).collect();
                if !bb {
                    // Exactly one literal of D is undone.
                    let k = plan.learned.iter().filter(|l| removed.contains(l)).count();
                    prop_assert_eq!(k, 1, "{}: {:?}", label, plan);
                    prop_assert!(removed.contains(&plan.asserting));
                }
                // Progress: a new clause or the chunk at the conflict level.
                let level = plan.conflict_level;
                let top_undone = plan.undone_chunks.iter().any(|ck| t.chunk_level(ck) == level);
                prop_assert!(plan.new_clause || top_undone, "{}: no progress", label);
                s.apply_repair(&plan);
                let t = s.trail();
                for l in plan.unassigned.iter().filter(|l| l.var() != plan.asserting.var()) {
                    prop_assert!(!t.is_assigned(l.var()), "{}: {} reassigned after {:?}", label, l, plan);
                }
                if !bb {
                    prop_assert!(t.is_true(plan.asserting));
                }
            };
            prop_assert_eq!(verdict, !models.is_empty(), "{}", label);
            prop_assert!(s.violations().is_empty(), "{}: {}", label, s.violations()[0]);
        }
    }

    #[test]
    fn restart_keeps_only_root_literals((n, f) in formula_strategy(20, 60), k in 1usize..6) {
        let f = to_lits(&f);
        for mode in [Mode::Gb, Mode::Cb, Mode::Ncb] {
            let mut s = Solver::new(n, &f, SolverConfig { check: true, ..SolverConfig::new(mode) }).unwrap();
            if s.is_unsat() {
                continue;
            }
            for _ in 0..k {
                if s.propagate().is_some() || s.decide().is_none() {
                    break;
                }
            }
            if s.propagate().is_some() {
                continue;
            }
            let root: BTreeSet<Lit> = s
                .trail()
                .lits()
                .iter()
                .copied()
                .filter(|l| s.trail().gamma(l.var()).is_empty())
                .collect();
            s.restart();
            let after: BTreeSet<Lit> = s.trail().lits().iter().copied().collect();
            prop_assert_eq!(after, root);
            prop_assert_eq!(s.trail().chunks().live_count(), 0);
            prop_assert!(s.violations().is_empty());
        }
    }

    #[test]
    fn outcome_independent_of_purging((n, f) in formula_strategy(14, 60)) {
        let f = to_lits(&f);
        let models = brute_models(n, &f);
        let mut s = Solver::new(n, &f, SolverConfig { check: true, ..SolverConfig::new(Mode::Gb) }).unwrap();
        let r = s.solve();
        prop_assert_eq!(r.is_sat(), !models.is_empty());
        if let SolveResult::Sat(m) = r {
            prop_assert!(gbsat::model_satisfies(&m, &f));
        }
        prop_assert!(s.violations().is_empty());
    }

    #[test]
    fn undo_unassigns_exactly_dependents((n, f) in formula_strategy(16, 50), pick in 0usize..8) {
        let f = to_lits(&f);
        let mut s = Solver::new(n, &f, SolverConfig { check: true, ..SolverConfig::new(Mode::Gb) }).unwrap();
        if s.is_unsat() {
            return Ok(());
        }
        let c = loop {
            match s.propagate() {
                Some(c) => break c,
                None => if s.decide().is_none() { return Ok(()); },
            }
        };
        let Some(plan) = s.plan_repair(c, Repair::Native) else { return Ok(()) };
        let Undo::Chunks(ref g) = plan.undo else { unreachable!() };
        let t = s.trail();
        let expect: BTreeSet<Lit> = t.lits().iter().copied().filter(|l| t.gamma(l.var()).intersects(g)).collect();
        prop_assert_eq!(plan.unassigned.iter().copied().collect::<BTreeSet<_>>(), expect);
        let _ = pick;
        s.apply_repair(&plan);
        // No survivor's reason mentions an unassigned premise.
        let t = s.trail();
        for &l in t.lits() {
            if let Some(r) = t.reason(l.var()) {
                for &q in s.clauses().lits(r) {
                    prop_assert!(q == l || t.is_false(q));
                }
            }
        }
        prop_assert!(s.violations().is_empty(), "{}", s.violations()[0]);
    }
}

fn run_to_conflict(s: &mut Solver) -> Option<gbsat::ClauseRef> {
    loop {
        match s.propagate() {
            Some(c) => return Some(c),
            None => s.decide()?,
        };
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    /// The simulation profiles pick the unique lightest chunk set among all
    /// subsets of live chunks, and it undoes what the level-based repair
    /// undoes.
    #[test]
    fn closed_forms_are_powerset_argmin((n, f) in formula_strategy(14, 60), skip in 0usize..4) {
        use gbsat::{evaluate_weight, WeightProfile};
        let f = to_lits(&f);
        let mut checked = 0;
        for (profile, reference) in [
            (WeightProfile::CbSim, Repair::CbReference),
            (WeightProfile::NcbSim, Repair::NcbReference),
        ] {
            let cfg = SolverConfig { weights: profile.clone(), check: true, ..SolverConfig::new(Mode::Gb) };
            let mut s = Solver::new(n, &f, cfg).unwrap();
            if s.is_unsat() {
                continue;
            }
            // Repair a few conflicts first so the state is not trivial.
            let mut ok = true;
            for _ in 0..skip {
                let plan = run_to_conflict(&mut s).and_then(|c| s.plan_repair(c, Repair::Native));
                match plan {
                    Some(p) => s.apply_repair(&p),
                    None => ok = false,
                }
                if !ok {
                    break;
                }
            }
            let Some(c) = run_to_conflict(&mut s).filter(|_| ok) else { continue };
            let Some(plan) = s.plan_repair(c, Repair::Native) else { continue };
            checked += 1;
            let Undo::Chunks(ref best) = plan.undo else { unreachable!() };
            let live: Vec<u32> = s.trail().chunks().live_ids().collect();
            if live.len() > 10 {
                continue;
            }
            let ctx = s.weight_context(c, &profile);
            let wb = evaluate_weight(&profile, s.trail(), best, &ctx);
            for mask in 1u32..(1 << live.len()) {
                let set: ChunkSet = (0..live.len()).filter(|i| mask >> i & 1 == 1).map(|i| live[i]).collect();
                let w = evaluate_weight(&profile, s.trail(), &set, &ctx);
                if set == *best {
                    continue;
                }
                prop_assert!(w > wb, "{:?} weighs {} vs {:?} at {}", set, w, best, wb);
            }
            let r = s.plan_repair(c, reference).unwrap();
            prop_assert_eq!(&r.unassigned, &plan.unassigned);
            prop_assert_eq!(&r.learned, &plan.learned);
        }
        let _ = checked;
    }
}
