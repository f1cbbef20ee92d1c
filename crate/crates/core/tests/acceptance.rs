//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits with
//! a failure status if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sceptic_core::detectors::{
    enumerate_events, isolated_point_witness, monotone_witness, DetectorKind, Direction, EventParams, StopLossWidth,
    Weighting,
};
use sceptic_core::increase::{
    darboux_sums, decompose_cycles, e_cd_witness, layer_program, CycleTracker, Exit, FirstProcess, IncreaseSchedule,
    IncreaseWitness, SecondProcess, Termination, LAYER_TOL,
};
use sceptic_core::path::{
    gen_adapted_walk, gen_constant, gen_random_walk, gen_ratchet, gen_violation, Path, Violation,
};
use sceptic_core::trading::{
    buy_and_hold, check_positive, stop_at_threshold, superpose_weighted, CapitalProcess, ElementaryStrategy,
    Positivity, Stopped, POSITIVITY_TOL,
};
use sceptic_core::upper_prob::coherence_check;
use sceptic_core::wlln::{
    capital_bound, play_game, wlln_certificate, Adaptive, FixedMoves, GameConfig, Reality, SeededRandom, StakeAdversary,
};

const REL_TOL: f64 = 1e-9;
const NEUTRALITY_SE: f64 = 4.0;
const NEUTRALITY_PATHS: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn at_least(value: f64, bound: f64) -> bool {
    value >= bound - REL_TOL * bound.abs().max(1.0)
}

fn line(points: &[(f64, f64)]) -> Path {
    Path::new(
        points.iter().map(|p| p.0).collect(),
        points.iter().map(|p| p.1).collect(),
    )
    .unwrap()
}

fn wlln_tightness() -> Outcome {
    let start = Instant::now();
    let cfg = GameConfig::new(4, 1.0).unwrap();
    let t = play_game(&cfg, &mut FixedMoves(vec![1.0; 4])).unwrap();
    let elapsed = start.elapsed();
    let stakes_ok = t.stakes == [0.0, 0.5, 1.0, 1.5];
    let capitals_ok = t.capitals == [1.0, 1.0, 1.5, 2.5, 4.0];
    let tight = t.slacks().iter().all(|&s| s == 0.0);
    outcome(
        stakes_ok && capitals_ok && tight && elapsed < Duration::from_millis(1),
        format!(
            "stakes {:?}, capitals {:?}, zero slack {tight}, {:.1} µs",
            t.stakes,
            t.capitals,
            elapsed.as_secs_f64() * 1e6
        ),
    )
}

fn reality_for(kind: usize, seed: u64, c: f64, n: usize) -> Box<dyn Reality> {
    match kind {
        0 => Box::new(SeededRandom::new(seed)),
        1 => Box::new(StakeAdversary::new(seed)),
        2 => Box::new(FixedMoves(vec![c; n])),
        3 => Box::new(FixedMoves((0..n).map(|i| if i % 2 == 0 { c } else { -c }).collect())),
        4 => {
            // push the running sum back to zero whenever Sceptic has a stake
            Box::new(Adaptive(move |v: sceptic_core::wlln::RoundView<'_>| {
                let sum: f64 = v.moves.iter().sum();
                if v.stake > 0.0 {
                    (-sum).max(-c)
                } else {
                    c
                }
            }))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new(Adaptive(move |v: sceptic_core::wlln::RoundView<'_>| {
                if rng.gen_bool(0.5) {
                    if v.stake > 0.0 {
                        -c
                    } else {
                        c
                    }
                } else if rng.gen_bool(0.5) {
                    c
                } else {
                    -c
                }
            }))
        }
    }
}

fn wlln_sweep() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = f64::INFINITY;
    let mut min_capital = f64::INFINITY;
    let mut failures = 0usize;
    let instances = 100_000;
    for i in 0..instances {
        let c = [0.5, 1.0, 2.0][i % 3];
        let n = rng.gen_range(1..=200);
        let cfg = GameConfig::new(n, c).unwrap();
        let mut reality = reality_for(i % 6, rng.gen(), c, n);
        let t = play_game(&cfg, reality.as_mut()).unwrap();
        let sums = t.prefix_sums();
        let mut bad = false;
        for (k, (&cap, &sum)) in t.capitals.iter().zip(&sums).enumerate() {
            let bound = capital_bound(&cfg, k, sum);
            worst = worst.min((cap - bound) / bound.max(1.0));
            min_capital = min_capital.min(cap);
            bad |= !at_least(cap, bound) || cap < -POSITIVITY_TOL;
        }
        failures += usize::from(bad);
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!(
            "{instances} games, {failures} violations, worst relative slack {worst:.3e}, min capital {min_capital:.3e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn wlln_certificate_check() -> Outcome {
    let cert = wlln_certificate(0.04, 0.5, 1.0).unwrap();
    let cfg = GameConfig::new(cert.rounds as usize, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_final = f64::INFINITY;
    let mut min_sum = f64::INFINITY;
    for i in 0..1000 {
        let t = if i % 2 == 0 {
            let mut x: Vec<f64> = (0..cfg.rounds).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            while x.iter().sum::<f64>() < 50.0 {
                let j = rng.gen_range(0..x.len());
                let need = 50.0 - x.iter().sum::<f64>();
                x[j] = (x[j] + need).min(1.0);
            }
            play_game(&cfg, &mut FixedMoves(x)).unwrap()
        } else {
            // hurt Sceptic whenever possible while keeping Σx ≥ 50 reachable
            let rounds = cfg.rounds;
            let mut coin = ChaCha8Rng::seed_from_u64(rng.gen());
            play_game(
                &cfg,
                &mut Adaptive(move |v: sceptic_core::wlln::RoundView<'_>| {
                    let sum: f64 = v.moves.iter().sum();
                    let after = (rounds - v.moves.len() - 1) as f64;
                    let floor = (50.0 - sum - after + 1e-9).clamp(-1.0, 1.0);
                    if v.stake > 0.0 {
                        floor
                    } else {
                        coin.gen_range(floor..=1.0)
                    }
                }),
            )
            .unwrap()
        };
        min_sum = min_sum.min(t.moves.iter().sum());
        min_final = min_final.min(t.final_capital());
    }
    outcome(
        cert.rounds == 100 && min_sum >= 50.0 - 1e-9 && at_least(min_final, 25.0),
        format!("N = {}, min Σx = {min_sum:.3}, min K_N = {min_final:.4}", cert.rounds),
    )
}

fn coherence() -> Outcome {
    let mut owned: Vec<Box<dyn CapitalProcess>> = Vec::new();
    for &b in &[0.0, 5.0, -1.0] {
        for &d in &[1.0, -0.5] {
            owned.push(Box::new(isolated_point_witness(
                EventParams::new(b, 0.0, d, 1e-3).unwrap(),
            )));
            owned.push(Box::new(isolated_point_witness(
                EventParams::new(b, 0.5, d, 0.25).unwrap(),
            )));
        }
    }
    for dir in [Direction::Up, Direction::Down] {
        owned.push(Box::new(monotone_witness(0.0, 1.0, 1e-3, dir).unwrap()));
        owned.push(Box::new(monotone_witness(0.7, 0.25, 0.1, dir).unwrap()));
        let fam = enumerate_events(
            DetectorKind::Monotone { direction: dir },
            &[0.0, 0.5, 2.0],
            &[0.5, 1.0],
            Weighting::Geometric,
            StopLossWidth::default(),
        )
        .unwrap();
        owned.push(Box::new(fam.superposition));
    }
    let fam = enumerate_events(
        DetectorKind::IsolatedPoint { b: 0.0 },
        &[0.0, 1.0],
        &[1.0, -1.0, 0.5],
        Weighting::Uniform,
        StopLossWidth::Constant(0.01),
    )
    .unwrap();
    owned.push(Box::new(fam.superposition));
    owned.push(Box::new(buy_and_hold(1.0, 0.0, 3.0)));
    owned.push(Box::new(buy_and_hold(0.2, 0.3, -2.0)));
    let witness = isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, 0.05).unwrap());
    owned.push(Box::new(stop_at_threshold(&witness, 1.1, 1.0).unwrap()));
    for k in [2, 4] {
        let s = IncreaseSchedule::new(k, 2.0, 1.0).unwrap();
        owned.push(Box::new(FirstProcess { schedule: s }));
        owned.push(Box::new(SecondProcess { schedule: s }));
        for m in 1..=s.layers {
            owned.push(Box::new(layer_program(0.0, 0.0, m, s.epsilon, s.delta).unwrap()));
        }
    }
    let inner = superpose_weighted(
        "pair",
        vec![
            (0.5, Box::new(witness.clone()) as Box<dyn CapitalProcess>),
            (0.25, Box::new(monotone_witness(0.0, 1.0, 0.5, Direction::Up).unwrap())),
        ],
    )
    .unwrap();
    owned.push(Box::new(Stopped::new(inner, 1.5, 1.0).unwrap()));

    let library: Vec<&dyn CapitalProcess> = owned.iter().map(|b| b.as_ref()).collect();
    let paths: Vec<Path> = [0.0, 5.0, -1.0, 0.5]
        .iter()
        .flat_map(|&l| [1.0, 10.0].map(|h| gen_constant(l, h).unwrap()))
        .collect();
    let verdict = coherence_check(&library, &paths).unwrap();
    outcome(
        verdict.pass,
        format!(
            "{} processes × {} constant paths, counterexample {:?}",
            verdict.processes, verdict.paths, verdict.counterexample
        ),
    )
}

fn mixed_basic_corpus() -> Vec<Path> {
    let mut corpus = Vec::new();
    for seed in 0..300 {
        corpus.push(gen_random_walk(seed, 256, 1.0, 0.0625, 0.0).unwrap());
    }
    for &touch in &[0.25, 1.0, 3.0] {
        for &d in &[1.0, -1.0, 0.5] {
            corpus.push(
                gen_violation(Violation::IsolatedLevelPoint {
                    b: 0.0,
                    d,
                    touch_at: touch,
                })
                .unwrap(),
            );
        }
    }
    for &a in &[0.0, 0.5, 2.0] {
        corpus.push(gen_violation(Violation::MonotoneRun { a, d: 1.0 }).unwrap());
    }
    corpus.push(gen_ratchet(&[0.3, 0.0, 1.2, 0.05], 0.1, 0.5).unwrap());
    for &l in &[0.0, 1.0, -0.5] {
        corpus.push(gen_constant(l, 4.0).unwrap());
    }
    corpus
}

fn isolated_point_payoff() -> Outcome {
    let path = gen_violation(Violation::IsolatedLevelPoint {
        b: 0.0,
        d: 1.0,
        touch_at: 1.0,
    })
    .unwrap();
    let w = isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, 1e-3).unwrap());
    let trace = w.evaluate(&path).unwrap();
    let factor = trace.final_value / trace.initial;
    let exact = trace.final_value == 1.001;
    let factor_ok = (factor - 1001.0).abs() <= 1e-12 * 1001.0;

    let corpus = mixed_basic_corpus();
    let mut witnesses: Vec<Box<dyn CapitalProcess>> = Vec::new();
    for &b in &[0.0, 0.25, -0.5] {
        for &a in &[0.0, 1.0, 10.0] {
            for &d in &[1.0, -1.0, 0.5] {
                for &eps in &[1e-3, 0.0625] {
                    witnesses.push(Box::new(isolated_point_witness(
                        EventParams::new(b, a, d, eps).unwrap(),
                    )));
                }
            }
        }
    }
    witnesses.push(Box::new(
        enumerate_events(
            DetectorKind::IsolatedPoint { b: 0.0 },
            &[0.0, 1.0, 4.0, 16.0],
            &[1.0, -1.0, 0.5, 2.0],
            Weighting::Geometric,
            StopLossWidth::default(),
        )
        .unwrap()
        .superposition,
    ));
    let mut negatives = 0;
    let mut min_seen = f64::INFINITY;
    for w in &witnesses {
        for p in &corpus {
            let t = w.evaluate(p).unwrap();
            min_seen = min_seen.min(t.min_value);
            if check_positive(&t) != Positivity::Positive {
                negatives += 1;
            }
        }
    }
    outcome(
        exact && factor_ok && negatives == 0,
        format!(
            "final {} (exact {exact}), factor {factor}, {} witness-path pairs, {negatives} negative, min capital {min_seen:.3e}",
            trace.final_value,
            witnesses.len() * corpus.len()
        ),
    )
}

struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn new() -> Self {
        Moments {
            n: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }
    fn se(&self) -> f64 {
        (self.m2 / (self.n as f64 - 1.0) / self.n as f64).sqrt()
    }
}

fn neutral(name: &str, m: &Moments, initial: f64, report: &mut Vec<String>) -> bool {
    let se = m.se();
    let dev = m.mean - initial;
    let ok = if se == 0.0 {
        dev == 0.0
    } else {
        dev.abs() <= NEUTRALITY_SE * se
    };
    report.push(format!(
        "{name}: mean {:.5} vs {initial:.5} ({:+.2} SE)",
        m.mean,
        if se > 0.0 { dev / se } else { 0.0 }
    ));
    ok
}

fn martingale_neutrality() -> Outcome {
    let start = Instant::now();
    // lattice step 1/16: every stop level below sits on the lattice
    let h = 0.0625;
    let basic: Vec<(&str, Box<dyn CapitalProcess>)> = vec![
        (
            "isolated(D=1)",
            Box::new(isolated_point_witness(EventParams::new(0.0, 8.0, 1.0, h).unwrap())),
        ),
        (
            "isolated(D=-0.5)",
            Box::new(isolated_point_witness(
                EventParams::new(0.25, 0.0, -0.5, 2.0 * h).unwrap(),
            )),
        ),
        (
            "monotone-up",
            Box::new(monotone_witness(16.0, 0.5, 0.125, Direction::Up).unwrap()),
        ),
        (
            "monotone-down",
            Box::new(monotone_witness(4.0, 1.0, h, Direction::Down).unwrap()),
        ),
        (
            "isolated-family",
            Box::new(
                enumerate_events(
                    DetectorKind::IsolatedPoint { b: 0.0 },
                    &[0.0, 8.0, 32.0],
                    &[0.25, 0.5, 1.0, -0.5],
                    Weighting::Geometric,
                    StopLossWidth::Constant(h),
                )
                .unwrap()
                .superposition,
            ),
        ),
        (
            "monotone-family",
            Box::new(
                enumerate_events(
                    DetectorKind::Monotone {
                        direction: Direction::Up,
                    },
                    &[0.0, 16.0, 64.0],
                    &[0.25, 1.0],
                    Weighting::Geometric,
                    StopLossWidth::Constant(h),
                )
                .unwrap()
                .superposition,
            ),
        ),
    ];
    let mut moments: Vec<Moments> = basic.iter().map(|_| Moments::new()).collect();
    for seed in 0..NEUTRALITY_PATHS as u64 {
        let path = gen_random_walk(seed, 128, 1.0, h, 0.0).unwrap();
        for ((_, p), m) in basic.iter().zip(moments.iter_mut()) {
            m.push(p.evaluate(&path).unwrap().final_value);
        }
    }
    let mut report = Vec::new();
    let mut pass = true;
    for ((name, p), m) in basic.iter().zip(&moments) {
        pass &= neutral(name, m, p.initial_capital(), &mut report);
    }

    let witness = IncreaseWitness {
        schedule: IncreaseSchedule::new(4, 1e9, 0.25).unwrap(),
        target_factor: 1.0,
        decrease: false,
    };
    let s = witness.schedule;
    let (mut first, mut second) = (Moments::new(), Moments::new());
    for seed in 0..NEUTRALITY_PATHS as u64 {
        let mut tracker = CycleTracker::new(s);
        let path = gen_adapted_walk(seed, 600, 1.0, s.epsilon, 0.0, |v| tracker.levels(v)).unwrap();
        let out = witness.evaluate(&path).unwrap();
        first.push(out.first.trace.final_value);
        second.push(out.second.final_value);
    }
    pass &= neutral("increase-first", &first, s.first_initial(), &mut report);
    pass &= neutral("increase-second", &second, s.second_initial(), &mut report);
    let elapsed = start.elapsed();
    outcome(
        pass && elapsed < Duration::from_secs(120),
        format!(
            "{NEUTRALITY_PATHS} paths each; {}; {:.1} s",
            report.join("; "),
            elapsed.as_secs_f64()
        ),
    )
}

/// Paths on which all `N` cycles resolve: ratchets (random, adversarial and
/// with upper exits) and level-adapted random walks.
fn resolved_corpus(s: &IncreaseSchedule, target: usize, seed: u64) -> (Vec<Path>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = s.cycles;
    let tr = s.truncation();
    let mut corpus = Vec::new();
    let push = |p: Path, corpus: &mut Vec<Path>| {
        if decompose_cycles(&p, s, false).unwrap().termination == Termination::AllResolved {
            corpus.push(p);
        }
    };
    for _ in 0..target * 3 / 10 {
        let rises: Vec<f64> = (0..n + 2).map(|_| rng.gen_range(0.0..1.5 * tr)).collect();
        push(
            gen_ratchet(&rises, s.epsilon, rng.gen_range(0.1..2.0)).unwrap(),
            &mut corpus,
        );
    }
    for i in 0..target / 10 {
        let rises: Vec<f64> = (0..n + 2)
            .map(|j| match i % 4 {
                0 => {
                    if j % 2 == 0 {
                        0.0
                    } else {
                        tr
                    }
                }
                1 => {
                    if j < n / 2 {
                        0.0
                    } else {
                        tr
                    }
                }
                2 => s.delta * rng.gen_range(0..=s.layers) as f64,
                _ => {
                    if rng.gen_bool(0.8) {
                        0.0
                    } else {
                        tr
                    }
                }
            })
            .collect();
        push(gen_ratchet(&rises, s.epsilon, 1.0).unwrap(), &mut corpus);
    }
    for _ in 0..target / 20 {
        let rises: Vec<f64> = (0..n + 2)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    s.rise * 1.3
                } else {
                    rng.gen_range(0.0..tr)
                }
            })
            .collect();
        push(gen_ratchet(&rises, s.epsilon, 1.0).unwrap(), &mut corpus);
    }
    let mut walks = 0;
    let mut attempt = 0u64;
    while corpus.len() < target && attempt < 20 * target as u64 {
        let mut tracker = CycleTracker::new(*s);
        let path = gen_adapted_walk(seed ^ (attempt << 20), 400 * n, 1.0, s.epsilon / 2.0, 0.0, |v| {
            tracker.levels(v)
        })
        .unwrap();
        attempt += 1;
        let before = corpus.len();
        push(path, &mut corpus);
        walks += corpus.len() - before;
    }
    (corpus, walks)
}

fn layer_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let eps = (-rng.gen_range(1.0..12.0f64)).exp();
        let layers = rng.gen_range(1..=256usize);
        let delta = (eps.sqrt() - eps) / layers as f64;
        let m = rng.gen_range(1..=layers);
        let level = rng.gen_range(-5.0..5.0);
        let t0 = rng.gen_range(0.0..3.0);
        let w = layer_program(t0, level, m, eps, delta).unwrap();
        let up = line(&[(0.0, level), (t0 + 0.5, level), (t0 + 1.5, level + m as f64 * delta)]);
        let up_more = line(&[
            (0.0, level),
            (t0 + 0.5, level),
            (t0 + 1.5, level + m as f64 * delta + 1.0),
        ]);
        let down = line(&[(0.0, level), (t0 + 0.5, level), (t0 + 1.5, level - eps)]);
        worst = worst
            .max((w.evaluate(&up).unwrap().final_value - delta).abs())
            .max((w.evaluate(&up_more).unwrap().final_value - delta).abs())
            .max(w.evaluate(&down).unwrap().final_value.abs());
    }
    let layers_ok = worst <= LAYER_TOL;

    let mut cycles = 0;
    let mut shifted = 0;
    let mut mismatches = 0;
    for (k, seed) in [(2u32, 21u64), (4, 22)] {
        let s = IncreaseSchedule::new(k, 1e9, 1.0).unwrap();
        let (corpus, _) = resolved_corpus(&s, 200, seed);
        let first = FirstProcess { schedule: s };
        for p in &corpus {
            let d = decompose_cycles(p, &s, false).unwrap();
            let run = first.run(p, &d).unwrap();
            for (c, pay) in d.cycles.iter().zip(&run.payoffs) {
                if c.exit == Exit::Unresolved {
                    continue;
                }
                cycles += 1;
                let rise = c.rise_in_cycle.unwrap();
                if rise != c.increment.unwrap() {
                    shifted += 1;
                }
                let x = rise.min(s.truncation());
                let q = x / s.delta;
                let expect = s.delta * q.floor();
                let tie = (q - q.round()).abs() < 1e-9;
                let ok = (pay.payoff - expect).abs() <= LAYER_TOL
                    || (tie && (pay.payoff - s.delta * q.round()).abs() <= LAYER_TOL);
                mismatches += usize::from(!ok);
            }
        }
    }
    outcome(
        layers_ok && mismatches == 0,
        format!(
            "1000 layers, worst deviation {worst:.2e}; {cycles} corpus cycles, {mismatches} mismatches ({shifted} cycles after an upper exit use the in-cycle rise)"
        ),
    )
}

fn schedule_pins() -> Outcome {
    let s = IncreaseSchedule::new(4, 2.0, 1.0).unwrap();
    let en = s.second_initial();
    let floor_ok = s.cycles == ((4.0f64).exp() / 2.0).floor() as usize && s.cycles == 27;
    let en_ok = (en - 0.494455).abs() < 5e-7 && en <= 1.0 / 2.0;
    let w = e_cd_witness(2.0, 1.0, 4, 2.0);
    let path = gen_violation(Violation::SemiStrictIncrease { c: 2.0, d: 1.0 }).unwrap();
    let (final_value, factor) = match &w {
        Ok(w) => {
            let out = w.evaluate(&path).unwrap();
            (out.second.final_value, out.report.factors.second)
        }
        Err(_) => (f64::NAN, f64::NAN),
    };
    let trace_ok = (final_value - (en + 1.0)).abs() <= 1e-12 && (factor - 3.022).abs() < 5e-4 && factor >= 2.0;
    outcome(
        floor_ok && en_ok && w.is_ok() && trace_ok,
        format!(
            "N = {}, εN = {en:.6}, second final {final_value:.6}, factor {factor:.4}",
            s.cycles
        ),
    )
}

fn first_process_bound() -> Outcome {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for (k, seed) in [(2u32, 91u64), (4, 92)] {
        let s = IncreaseSchedule::new(k, 1e9, 1.0).unwrap();
        let witness = IncreaseWitness {
            schedule: s,
            target_factor: 1.0,
            decrease: false,
        };
        let (corpus, walks) = resolved_corpus(&s, 1000, seed);
        let mut worst_slack = f64::INFINITY;
        let mut violations = 0;
        let mut min_trace = f64::INFINITY;
        let mut max_stake = 0.0f64;
        let mut max_bundle = 0.0f64;
        for p in &corpus {
            let out = witness.evaluate(p).unwrap();
            let (lhs, rhs) = (out.report.bound_lhs.unwrap(), out.report.bound_rhs.unwrap());
            worst_slack = worst_slack.min(lhs - rhs);
            violations += usize::from(!at_least(lhs, rhs));
            min_trace = min_trace.min(out.first.trace.min_value).min(out.second.min_value);
            max_stake = max_stake.max(out.first.max_stake());
            max_bundle = max_bundle.max(out.first.max_bundle());
        }
        let ok = corpus.len() >= 1000
            && violations == 0
            && min_trace >= -POSITIVITY_TOL
            && max_stake <= s.log_inv_epsilon() * (1.0 + 1e-12)
            && max_bundle <= s.sqrt_epsilon * (1.0 + 1e-12);
        pass &= ok;
        details.push(format!(
            "k={k}: {} paths ({walks} walks), {violations} violations, worst slack {worst_slack:.4}, min capital {min_trace:.4}, max stake {max_stake:.4} ≤ {k}, max bundle {max_bundle:.4} ≤ {:.4}",
            corpus.len(),
            s.sqrt_epsilon
        ));
    }
    let elapsed = start.elapsed();
    outcome(
        pass && elapsed < Duration::from_secs(120),
        format!("{}; {:.1} s", details.join("; "), elapsed.as_secs_f64()),
    )
}

fn darboux_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0;
    let mut worst_identity = 0.0f64;
    for _ in 0..1000 {
        let eps = (-rng.gen_range(0.2..20.0f64)).exp();
        let layers = rng.gen_range(1..=2000usize);
        let width = eps.sqrt() - eps;
        let delta = width / layers as f64;
        let sums = darboux_sums(eps, delta).unwrap();
        let integral = eps / 2.0 * (1.0 / eps).ln();
        bad += usize::from(!(sums.lower <= integral && integral <= sums.upper));
        let identity = delta - eps * delta / eps.sqrt();
        worst_identity = worst_identity.max(((sums.upper - sums.lower) - identity).abs() / identity);
    }
    let mut monotone = true;
    for k in [1.0, 2.0, 4.0, 8.0, 12.0f64] {
        let eps = (-k).exp();
        let mut prev = f64::NEG_INFINITY;
        for j in 0..12 {
            let layers = 1usize << j;
            let l = darboux_sums(eps, (eps.sqrt() - eps) / layers as f64).unwrap().lower;
            monotone &= l >= prev && l <= eps / 2.0 * k;
            prev = l;
        }
    }
    outcome(
        bad == 0 && monotone && worst_identity < 1e-9,
        format!("1000 schedules, {bad} outside the sandwich, monotone under doubling {monotone}, telescoping error {worst_identity:.1e}"),
    )
}

fn subadditivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut exact = true;
    let mut finals_ok = true;
    for _ in 0..200 {
        let count = rng.gen_range(1..=12);
        let mut members: Vec<(f64, Box<dyn CapitalProcess>)> = Vec::new();
        let mut expected = 0.0;
        for n in 1..=count {
            let eps = rng.gen_range(1e-4..0.5);
            let w = 0.5f64.powi(n);
            let p = isolated_point_witness(EventParams::new(0.0, rng.gen_range(0.0..2.0), 1.0, eps).unwrap());
            expected += w * p.initial_capital();
            members.push((w, Box::new(p)));
        }
        let sup = superpose_weighted("union", members).unwrap();
        exact &= sup.initial_capital() == expected;
        let path = gen_random_walk(rng.gen(), 64, 0.1, 0.25, 0.0).unwrap();
        let run = sup.run(&path).unwrap();
        let direct: f64 = run
            .members
            .iter()
            .zip(sup.weights())
            .map(|(t, w)| w * t.final_value)
            .sum();
        finals_ok &= (run.composite.final_value - direct).abs() <= 1e-12;
    }

    let mut inflate_exact = true;
    let mut reached = 0;
    let mut lemma_ok = true;
    for i in 0..500 {
        let eps_prime = rng.gen_range(1e-3..0.5);
        let c = rng.gen_range(0.01..0.6);
        let base: ElementaryStrategy = if i % 2 == 0 {
            isolated_point_witness(EventParams::new(0.0, 0.0, 1.0, c).unwrap())
        } else {
            monotone_witness(rng.gen_range(0.0..3.0), 1.0, c, Direction::Up).unwrap()
        };
        let stopped = stop_at_threshold(&base, 1.0 + eps_prime, 1.0).unwrap();
        inflate_exact &= stopped.initial_capital() == base.initial_capital() * (1.0 + eps_prime);
        let path = if i % 5 == 0 {
            gen_violation(Violation::IsolatedLevelPoint {
                b: 0.0,
                d: 1.0,
                touch_at: 1.0,
            })
            .unwrap()
        } else {
            gen_random_walk(rng.gen(), 200, 0.05, 1.0, 0.0).unwrap()
        };
        let original = base.evaluate(&path).unwrap();
        if original.max_value() >= 1.0 / (1.0 + eps_prime) {
            reached += 1;
            lemma_ok &= stopped.evaluate(&path).unwrap().final_value >= 1.0 - POSITIVITY_TOL;
        }
    }
    outcome(
        exact && finals_ok && inflate_exact && lemma_ok && reached > 0,
        format!(
            "initial capitals exact {exact}, composite finals consistent {finals_ok}, inflation exact {inflate_exact}, {reached} threshold crossings all end ≥ 1: {lemma_ok}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("weak-law tightness pin", wlln_tightness),
        ("weak-law universal sweep", wlln_sweep),
        ("weak-law certificate", wlln_certificate_check),
        ("coherence on constant paths", coherence),
        ("isolated-point witness payoff", isolated_point_payoff),
        ("martingale neutrality", martingale_neutrality),
        ("layer algebra and cycle payoffs", layer_algebra),
        ("increase schedule pins", schedule_pins),
        ("first-process pathwise bound", first_process_bound),
        ("Darboux sandwich", darboux_sandwich),
        ("subadditivity bookkeeping", subadditivity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "[{}] {:>2}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
