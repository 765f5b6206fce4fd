use dyngap::harness::{run_monte_carlo, McConfig};
use dyngap::perception::{detect_gaps, detect_ungaps, simplify_gaps};
use dyngap::sim::scenario::{AgentSpec, EgoSpec, Limits, SensorSpec, WallSpec};
use dyngap::sim::{raycast_scan, run_episode, ControlSpec, Scenario};
use dyngap::{polar, PlannerConfig, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn clutter(rng: &mut ChaCha8Rng) -> Scenario {
    let agents = (0..rng.gen_range(0..6))
        .map(|_| {
            let c = polar(rng.gen_range(0.8..4.5), rng.gen_range(-3.1..3.1));
            AgentSpec {
                center: [c.x, c.y],
                radius: rng.gen_range(0.1..0.6),
                waypoints: Vec::new(),
                speed: 0.0,
                looped: false,
                start_time: 0.0,
            }
        })
        .collect();
    let walls = (0..rng.gen_range(0..4))
        .map(|_| {
            let a = polar(rng.gen_range(0.8..6.0), rng.gen_range(-3.1..3.1));
            let b = a + polar(rng.gen_range(0.5..4.0), rng.gen_range(-3.1..3.1));
            WallSpec {
                points: vec![[a.x, a.y], [b.x, b.y]],
                closed: false,
            }
        })
        .collect();
    Scenario {
        name: "clutter".into(),
        ego: EgoSpec {
            start: [0.0, 0.0],
            theta: rng.gen_range(-3.1..3.1),
            goal: [5.0, 0.0],
            radius: 0.2,
            v_max: 1.0,
        },
        sensor: SensorSpec::default(),
        limits: Limits::default(),
        control: ControlSpec::default(),
        walls,
        agents,
    }
}

#[test]
fn raw_gaps_never_claim_occupied_directions() {
    let cfg = PlannerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..1000 {
        let sc = clutter(&mut rng);
        let scan = raycast_scan(&sc.initial_world(), 360, 5.0);
        let raw = detect_gaps(&scan, &cfg);
        assert_eq!(raw, detect_gaps(&scan, &cfg));
        let n = scan.len();
        for g in &raw.gaps {
            let (i, j) = (g.right.model_id as usize, g.left.model_id as usize);
            if i == j {
                continue;
            }
            let floor = scan.ranges[i].min(scan.ranges[j]);
            let mut k = (i + 1) % n;
            while k != j {
                assert!(scan.ranges[k] >= floor, "case {case}: beam {k} in {i}..{j}");
                k = (k + 1) % n;
            }
        }
    }
}

#[test]
fn ungaps_join_two_different_gaps() {
    let cfg = PlannerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut seen = 0;
    for _ in 0..500 {
        let sc = clutter(&mut rng);
        let scan = raycast_scan(&sc.initial_world(), 360, 5.0);
        let mut gaps = simplify_gaps(&detect_gaps(&scan, &cfg), &cfg);
        let v = polar(0.8, rng.gen_range(-3.1..3.1));
        for g in gaps.iter_mut() {
            if rng.gen_bool(0.7) {
                g.left.v = v;
                g.right.v = v;
            }
        }
        let ungaps = detect_ungaps(&mut gaps, &Vec2::zeros(), &cfg);
        for u in &ungaps {
            seen += 1;
            let owner = |id: u64| {
                gaps.iter()
                    .position(|g| g.left.model_id == id || g.right.model_id == id)
            };
            let a = owner(u.left_of_prev.model_id).expect("left point belongs to a gap");
            let b = owner(u.right_of_next.model_id).expect("right point belongs to a gap");
            assert_ne!(a, b);
        }
    }
    assert!(seen > 0);
}

#[test]
fn monte_carlo_is_seeded() {
    let mc = |seed| McConfig {
        trials: 400,
        seed,
        threads: 2,
        ..Default::default()
    };
    let a = run_monte_carlo(&mc(21));
    let b = run_monte_carlo(&mc(21));
    let c = run_monte_carlo(&mc(22));
    assert_eq!(a, b);
    assert_ne!(a.trials, c.trials);
    assert_eq!(a.tally.total(), 400);
}

#[test]
fn halving_dt_keeps_collisions() {
    let text = r#"
name = "ram"
control = { mode = "constant", velocity = [0.8, 0.0] }
limits = { timeout = 8.0 }

[ego]
start = [0.0, 0.0]
goal = [20.0, 0.0]

[[agents]]
center = [5.0, 0.0]
radius = 0.3
waypoints = [[-5.0, 0.0]]
speed = 0.5
"#;
    let sc = Scenario::parse(text).unwrap();
    let cfg = PlannerConfig::default();
    let coarse = run_episode(&sc, &cfg, 0);
    let mut fine = sc.clone();
    fine.limits.dt /= 2.0;
    let fine = run_episode(&fine, &cfg, 0);
    assert!(coarse.summary.collisions > 0);
    assert!(fine.summary.collisions >= coarse.summary.collisions);
}
