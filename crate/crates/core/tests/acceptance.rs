//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints a PASS/FAIL line even when it passes.

use std::time::{Duration, Instant};

use rand_core::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use recolor_core::convexity::{complete_to_convex, is_convex, is_cover, recoloring_cost};
use recolor_core::fixtures::{gadget_three_two_one, poor_bound_star};
use recolor_core::oracle::{exact_opt, gen_instance, Algorithm, GenParams, Shape};
use recolor_core::penalty::{lower_bound, penalty_of_recoloring};
use recolor_core::string_approx::two_approx_string;
use recolor_core::tree_approx::{
    bicolored_constrained_opt, classify_case, compute_gadget, reduce, three_tree_approx, CaseWitness,
};
use recolor_core::{Coloring, Cover, Instance, Rational, Weight};

type Outcome = Result<String, String>;

fn params(shape: Shape, n: usize, c: usize, seed: u64) -> GenParams {
    GenParams { n, c, shape, seed, ..GenParams::default() }
}

/// Size and palette drawn from the seed, so suites mix small and large cases.
fn sized(shape: Shape, max_n: usize, max_c: usize, seed: u64) -> Instance {
    let mut rng = Pcg64::seed_from_u64(seed ^ 0x5eed);
    let (min_n, min_c) = shape.minimum();
    let n = min_n + (rng.next_u64() % (max_n - min_n + 1) as u64) as usize;
    let c = min_c + (rng.next_u64() % (max_c - min_c + 1) as u64) as usize;
    gen_instance(&params(shape, n, c, seed)).expect("generator")
}

fn opt(inst: &Instance) -> Weight {
    exact_opt(inst).expect("within oracle cap").1
}

fn bound_check(algo: Algorithm, inst: &Instance, ctx: &str) -> Result<(), String> {
    let run = algo.run(inst).map_err(|e| format!("{ctx}: {algo} failed: {e}"))?;
    let opt = opt(inst);
    let s = &run.solution;
    if !is_cover(inst, &s.cover) {
        return Err(format!("{ctx}: {algo} output is not a cover"));
    }
    if !is_convex(inst, &s.coloring) || !s.coloring.is_total() {
        return Err(format!("{ctx}: {algo} completion is not total and convex"));
    }
    if s.cover_weight > opt * algo.bound() as i128 {
        return Err(format!("{ctx}: {algo} weight {} > {} x OPT {}", s.cover_weight, algo.bound(), opt));
    }
    Ok(())
}

fn penalty_identity() -> Outcome {
    let mut rng = Pcg64::seed_from_u64(1);
    let shapes = [Shape::RandomTree, Shape::Path, Shape::Star, Shape::Caterpillar];
    let pairs = 1200;
    for i in 0..pairs {
        let inst = sized(shapes[i % 4], 16, 5, 10_000 + i as u64);
        // random cover: grow a random prefix of a shuffled vertex order until it covers
        let mut order: Vec<usize> = inst.vertices().collect();
        for k in (1..order.len()).rev() {
            order.swap(k, (rng.next_u64() % (k as u64 + 1)) as usize);
        }
        let start = (rng.next_u64() % (order.len() as u64 + 1)) as usize;
        let mut cover: Cover = order[..start].iter().copied().collect();
        for &v in &order[start..] {
            if is_cover(&inst, &cover) {
                break;
            }
            cover.insert(v);
        }
        let completion = complete_to_convex(&inst, &inst.coloring().without(&cover)).map_err(|e| e.to_string())?;
        let p = penalty_of_recoloring(&inst, &completion).map_err(|e| e.to_string())?;
        let cost = recoloring_cost(&inst, &completion);
        if p != cost * 2 {
            return Err(format!("pair {i}: penalty {p} != 2 x cost {cost}"));
        }
    }
    Ok(format!("{pairs} pairs, penalty = 2 x cost on all"))
}

fn lower_bound_soundness() -> Outcome {
    let shapes = [Shape::RandomTree, Shape::Path, Shape::Star, Shape::Caterpillar, Shape::Case2Spider, Shape::Case3bFamily];
    let count = 1200;
    for i in 0..count {
        let inst = sized(shapes[i % shapes.len()], 12, 4, 20_000 + i as u64);
        let report = lower_bound(&inst);
        let o = opt(&inst);
        if report.sum_p_star > o * 2 {
            return Err(format!("instance {i}: sum p* {} > 2 x OPT {}", report.sum_p_star, o));
        }
    }
    let star = poor_bound_star();
    let lb = lower_bound(&star).lower_bound;
    let o = opt(&star);
    if lb != Rational::from_integer(1) || o != Weight(11) {
        return Err(format!("poor-bound star: bound {lb}, OPT {o}; expected 1 and 11"));
    }
    Ok(format!("{count} instances n <= 12 sound; poor-bound star: bound 1 vs OPT 11"))
}

fn string_suite() -> Vec<Instance> {
    (0..1000)
        .map(|i| {
            let mut rng = Pcg64::seed_from_u64(30_000 + i);
            let n = 1 + (rng.next_u64() % 14) as usize;
            let c = 1 + (rng.next_u64() % 4) as usize;
            gen_instance(&params(Shape::Path, n, c, 30_000 + i)).expect("generator")
        })
        .collect()
}

/// Mean time per instance for each group, fastest of several rounds. Rounds
/// interleave the groups so machine noise hits all sizes alike, and each
/// group cycles through distinct instances so repeated runs cannot train the
/// branch predictor on one input.
fn time_scans(groups: &[Vec<Instance>]) -> Vec<Duration> {
    let mut best = vec![Duration::MAX; groups.len()];
    for _ in 0..15 {
        for (g, insts) in groups.iter().enumerate() {
            let t = Instant::now();
            for inst in insts {
                std::hint::black_box(two_approx_string(std::hint::black_box(inst)).unwrap());
            }
            best[g] = best[g].min(t.elapsed() / insts.len() as u32);
        }
    }
    best
}

fn string_two_approx() -> Outcome {
    let suite = string_suite();
    for (i, inst) in suite.iter().enumerate() {
        let out = two_approx_string(inst).map_err(|e| e.to_string())?;
        if !is_convex(inst, &out.coloring) {
            return Err(format!("string {i}: output not convex"));
        }
        if out.cost > out.sum_p_star {
            return Err(format!("string {i}: cost {} > sum p* {}", out.cost, out.sum_p_star));
        }
        let o = opt(inst);
        if out.cost > o * 2 {
            return Err(format!("string {i}: cost {} > 2 x OPT {o}", out.cost));
        }
    }
    let groups: Vec<Vec<Instance>> = [1000, 2000, 4000]
        .iter()
        .map(|&n| (0..32).map(|s| gen_instance(&params(Shape::Path, n, 4, 100 + s)).unwrap()).collect())
        .collect();
    let times = time_scans(&groups);
    let growth: Vec<f64> = times.windows(2).map(|w| w[1].as_secs_f64() / w[0].as_secs_f64()).collect();
    if growth.iter().any(|&g| g > 2.5) {
        return Err(format!("time growth per doubling {growth:.2?} exceeds 2.5 ({times:?})"));
    }
    Ok(format!("{} strings within bounds; time growth per doubling {growth:.2?}", suite.len()))
}

fn local_ratio_baselines() -> Outcome {
    let suite = string_suite();
    for (i, inst) in suite.iter().enumerate() {
        bound_check(Algorithm::String3, inst, &format!("string {i}"))?;
    }
    let trees = 1000;
    for i in 0..trees {
        let inst = sized(Shape::RandomTree, 10, 4, 40_000 + i);
        bound_check(Algorithm::Tree4, &inst, &format!("tree {i}"))?;
    }
    Ok(format!("string3 on {} strings, tree4 on {trees} trees: no violations", suite.len()))
}

fn tree_three_approx() -> Outcome {
    let mut cases = [0usize; 5];
    let mut count = 0;
    let mut tally = |inst: &Instance| {
        for round in three_tree_approx(inst).map(|o| o.trace.rounds).unwrap_or_default() {
            let k = ["cover", "case1", "case2", "case3a", "case3b"].iter().position(|t| *t == round.witness.tag()).unwrap();
            cases[k] += 1;
        }
    };
    for i in 0..1000 {
        let inst = sized(Shape::RandomTree, 10, 4, 50_000 + i);
        bound_check(Algorithm::Tree3, &inst, &format!("tree {i}"))?;
        tally(&inst);
        count += 1;
    }
    for i in 0..200 {
        let inst = sized(Shape::Case2Spider, 14, 5, 60_000 + i);
        bound_check(Algorithm::Tree3, &inst, &format!("spider {i}"))?;
        tally(&inst);
        count += 1;
    }
    for i in 0..200 {
        let inst = sized(Shape::Case3bFamily, 14, 4, 70_000 + i);
        bound_check(Algorithm::Tree3, &inst, &format!("case3b {i}"))?;
        tally(&inst);
        count += 1;
    }
    if cases[1..].contains(&0) {
        return Err(format!("some reduction never ran: rounds per case {:?}", &cases[1..]));
    }
    Ok(format!(
        "{count} trees within 3 x OPT; rounds case1/2/3a/3b = {}/{}/{}/{}",
        cases[1], cases[2], cases[3], cases[4]
    ))
}

fn gadget_exactness() -> Outcome {
    let configs = 240;
    for i in 0..configs {
        let inst = sized(Shape::Case3bFamily, 14, 4, 80_000 + i);
        let witness = classify_case(&inst).map_err(|e| e.to_string())?;
        let CaseWitness::Case3b { ref subtree, .. } = witness else {
            return Err(format!("config {i}: generator produced {}", witness.tag()));
        };
        if subtree.len() > 8 {
            return Err(format!("config {i}: subtree of {} vertices", subtree.len()));
        }
        let g = compute_gadget(&inst, &witness).map_err(|e| e.to_string())?;
        let (reduced, _) = reduce(&inst, witness).map_err(|e| e.to_string())?;
        let (before, after) = (opt(&inst), opt(&reduced));
        if after != before - g.c_min {
            return Err(format!("config {i}: OPT(T') = {after}, OPT(T) - c_min = {before} - {}", g.c_min));
        }
    }
    Ok(format!("{configs} configurations: OPT(T') = OPT(T) - c_min on all"))
}

/// Minimum over all total colorings with colors `{a, b}`, root fixed, that are convex.
fn bicolored_brute_force(inst: &Instance, root: usize, root_color: usize, other: usize) -> Weight {
    let n = inst.len();
    let mut best = Weight(i128::MAX);
    for mask in 0u32..(1 << n) {
        if mask >> root & 1 == 1 {
            continue;
        }
        let col = Coloring::total((0..n).map(|v| if mask >> v & 1 == 1 { other } else { root_color }).collect());
        if is_convex(inst, &col) {
            best = best.min(recoloring_cost(inst, &col));
        }
    }
    best
}

fn bicolored_optimizer() -> Outcome {
    let count = 200;
    let mut rng = Pcg64::seed_from_u64(7);
    for i in 0..count {
        let mut p = params(Shape::RandomTree, 1 + (i as usize % 12), 2, 90_000 + i);
        p.zero_weight_fraction = Rational::new(1, 5);
        let inst = gen_instance(&p).unwrap();
        let root = (rng.next_u64() % inst.len() as u64) as usize;
        let palette = inst.palette_len();
        for root_color in 0..palette {
            let other = if palette == 2 { 1 - root_color } else { root_color };
            let (col, cost) = bicolored_constrained_opt(&inst, root, root_color).map_err(|e| e.to_string())?;
            let brute = bicolored_brute_force(&inst, root, root_color, other);
            if cost != brute || col.get(root) != Some(root_color) || recoloring_cost(&inst, &col) != cost {
                return Err(format!("tree {i}, root {root}, color {root_color}: got {cost}, brute force {brute}"));
            }
        }
    }
    Ok(format!("{count} trees (n <= 12), both root colors, equal to brute force"))
}

fn three_two_one_fixture() -> Outcome {
    let inst = gadget_three_two_one();
    let witness = classify_case(&inst).map_err(|e| e.to_string())?;
    let g = compute_gadget(&inst, &witness).map_err(|e| e.to_string())?;
    let costs = (g.c_high, g.c_medium, g.c_min);
    let weights = (g.root_weight(), g.leaf_weight());
    if costs != (Weight(3), Weight(2), Weight(1)) || weights != (Weight(1), Weight(2)) {
        return Err(format!("costs {costs:?}, gadget weights {weights:?}"));
    }
    Ok("costs (3, 2, 1) give gadget weights (1, 2)".into())
}

fn complexity_envelope() -> Outcome {
    let mut worst = Duration::ZERO;
    let mut max_rounds = 0;
    for seed in 0..3 {
        let inst = gen_instance(&params(Shape::Caterpillar, 500, 10, seed)).unwrap();
        let t = Instant::now();
        let out = three_tree_approx(&inst).map_err(|e| e.to_string())?;
        worst = worst.max(t.elapsed());
        let rounds = out.trace.rounds.len();
        if rounds > inst.len() {
            return Err(format!("seed {seed}: {rounds} rounds > n"));
        }
        if !is_convex(&inst, &out.solution.coloring) {
            return Err(format!("seed {seed}: output not convex"));
        }
        max_rounds = max_rounds.max(rounds);
    }
    if worst > Duration::from_secs(5) {
        return Err(format!("slowest run took {worst:?}"));
    }
    Ok(format!("n = 500, c = 10: slowest {worst:.1?}, at most {max_rounds} rounds"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("penalty identity", penalty_identity),
        ("lower bound soundness", lower_bound_soundness),
        ("string 2-approximation", string_two_approx),
        ("local-ratio baselines", local_ratio_baselines),
        ("tree 3-approximation", tree_three_approx),
        ("gadget exactness", gadget_exactness),
        ("bicolored optimizer", bicolored_optimizer),
        ("(3, 2, 1) gadget fixture", three_two_one_fixture),
        ("complexity envelope", complexity_envelope),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("[PASS] {} {name}: {detail} ({:.2?})", i + 1, t.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
