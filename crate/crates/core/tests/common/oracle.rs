//! Brute-force re-implementations of the PSO and MTO sweep rules.

use swarmnet::mto::{MtoConfig, MtoState};
use swarmnet::pso::{CoefficientDraw, GlobalBestUpdate, Particle, PsoConfig, Swarm};
use swarmnet::rng::SequenceSource;
use swarmnet::{Bounds, Candidate, ObjectiveSpec, Population};

const TOL: f64 = 1e-12;

pub fn bowl(x: &[f64]) -> f64 {
    let y = x.get(1).copied().unwrap_or(0.0);
    (x[0] - 1.0).powi(2) + 2.0 * (y + 0.5).powi(2) + 0.3 * x[0] * y
}

fn spec(d: usize) -> ObjectiveSpec {
    ObjectiveSpec::new(Bounds::uniform(d, -2.0, 2.0).unwrap(), bowl)
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOL)
}

// ---------- PSO ----------

#[derive(Clone, Debug)]
struct P {
    x: Vec<f64>,
    v: Vec<f64>,
    f: f64,
    px: Vec<f64>,
    pf: f64,
}

/// Coefficients for one particle: a shared scalar pair, or `d` values of r1
/// followed by `d` values of r2.
fn coefficients(draws: &mut Draws, d: usize, per_component: bool) -> (Vec<f64>, Vec<f64>) {
    if per_component {
        let r1 = (0..d).map(|_| draws.next()).collect();
        let r2 = (0..d).map(|_| draws.next()).collect();
        (r1, r2)
    } else {
        let (r1, r2) = (draws.next(), draws.next());
        (vec![r1; d], vec![r2; d])
    }
}

fn pso_move(p: &P, g: &[f64], r1: &[f64], r2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (chi, c1, c2) = (0.72984, 2.02, 2.02);
    let mut v = Vec::new();
    let mut x = Vec::new();
    for i in 0..p.x.len() {
        let vi = chi * (p.v[i] + c1 * r1[i] * (p.px[i] - p.x[i]) + c2 * r2[i] * (g[i] - p.x[i]));
        v.push(vi);
        x.push((p.x[i] + vi).clamp(-2.0, 2.0));
    }
    (v, x)
}

/// One sweep. Synchronous: every particle moves against the old global best,
/// which is refreshed afterwards. Asynchronous: the global best is refreshed
/// after each particle.
fn brute_pso(ps: &[P], g: &[f64], gf: f64, draws: &mut Draws, sync: bool, per_component: bool) -> (Vec<P>, Vec<f64>, f64) {
    let (mut g, mut gf) = (g.to_vec(), gf);
    let mut out = Vec::new();
    for p in ps {
        let (r1, r2) = coefficients(draws, p.x.len(), per_component);
        let (v, x) = pso_move(p, &g, &r1, &r2);
        let f = bowl(&x);
        let (px, pf) = if f < p.pf { (x.clone(), f) } else { (p.px.clone(), p.pf) };
        if !sync && f < gf {
            gf = f;
            g = x.clone();
        }
        out.push(P { x, v, f, px, pf });
    }
    if sync {
        for p in &out {
            if p.f < gf {
                gf = p.f;
                g = p.x.clone();
            }
        }
    }
    (out, g, gf)
}

fn toy_particles(d: usize) -> Vec<P> {
    let raw: [([f64; 2], [f64; 2], [f64; 2]); 4] = [
        ([0.5, -1.0], [0.1, 0.2], [0.4, -0.8]),
        ([-1.5, 1.2], [-0.3, 0.05], [-1.0, 0.9]),
        ([1.9, 0.4], [0.6, -0.4], [1.7, 0.0]),
        ([0.0, 0.0], [0.0, 0.0], [0.0, 0.0]),
    ];
    raw.iter()
        .map(|(x, v, px)| {
            let x = x[..d].to_vec();
            let px = px[..d].to_vec();
            let f = bowl(&x);
            let pf = bowl(&px).min(f);
            let px = if bowl(&px) <= f { px } else { x.clone() };
            P { x, v: v[..d].to_vec(), f, px, pf }
        })
        .collect()
}

fn as_swarm(ps: &[P]) -> Swarm {
    let particles = ps
        .iter()
        .map(|p| {
            let mut q = Particle::at(p.x.clone(), p.v.clone(), p.f);
            q.best_position = p.px.clone();
            q.best_loss = p.pf;
            q
        })
        .collect();
    Swarm::from_particles(particles)
}

pub fn check_pso(mode: GlobalBestUpdate, per_component: bool, d: usize) {
    let ps = toy_particles(d);
    let draws: Vec<f64> = (0..64).map(|k| ((k * 29 + 13) % 97) as f64 / 97.0).collect();
    let mut swarm = as_swarm(&ps);
    let cfg = PsoConfig {
        global_best_update: mode,
        particles: ps.len(),
        coefficients: if per_component {
            CoefficientDraw::PerComponent
        } else {
            CoefficientDraw::PerParticle
        },
        ..PsoConfig::default()
    };
    let mut want = ps;
    let (mut g, mut gf) = (swarm.global_best.clone(), swarm.global_best_loss);
    let mut oracle_draws = Draws(&draws, 0);
    let mut rng = SequenceSource::new(draws.clone());
    for _ in 0..3 {
        swarm.sweep(&spec(d), &cfg, &mut rng).unwrap();
        let sync = mode == GlobalBestUpdate::Synchronous;
        (want, g, gf) = brute_pso(&want, &g, gf, &mut oracle_draws, sync, per_component);
        assert_eq!(draws.len() - rng.remaining(), oracle_draws.1, "draw count");
        for (got, want) in swarm.particles.iter().zip(&want) {
            assert!(close(&got.velocity, &want.v), "{:?} vs {:?}", got.velocity, want.v);
            assert!(close(&got.position, &want.x), "{:?} vs {:?}", got.position, want.x);
            assert!((got.loss - want.f).abs() <= TOL);
            assert!(close(&got.best_position, &want.px));
            assert!((got.best_loss - want.pf).abs() <= TOL);
        }
        assert!(close(&swarm.global_best, &g));
        assert!((swarm.global_best_loss - gf).abs() <= TOL);
    }
}

// ---------- MTO ----------

#[derive(Clone, Debug)]
struct A {
    x: Vec<f64>,
    f: f64,
    stalled: bool,
}

struct Draws<'a>(&'a [f64], usize);

impl Draws<'_> {
    fn next(&mut self) -> f64 {
        self.1 += 1;
        self.0[self.1 - 1]
    }

    /// Signs for every coordinate first, then magnitudes.
    fn direction(&mut self, d: usize) -> Vec<f64> {
        let s: Vec<f64> = (0..d).map(|_| if self.next() >= 0.5 { 1.0 } else { -1.0 }).collect();
        s.iter().map(|s| s * self.next()).collect()
    }
}

fn step(x: &[f64], size: f64, r: &[f64]) -> Vec<f64> {
    x.iter().zip(r).map(|(a, b)| (a + size * b).clamp(-2.0, 2.0)).collect()
}

/// x_n plus the sum over i in lo..=hi of (x_i - x_n) / (n - i + 1).
fn pull(agents: &[A], n: usize, lo: usize, hi: usize) -> Vec<f64> {
    let xn = &agents[n - 1].x;
    let mut out = xn.clone();
    for i in lo..=hi {
        for j in 0..out.len() {
            out[j] += (agents[i - 1].x[j] - xn[j]) / (n - i + 1) as f64;
        }
    }
    out.iter().map(|v| v.clamp(-2.0, 2.0)).collect()
}

/// One sweep written out band by band from the rank boundaries.
fn brute_mto_sweep(agents: &[A], f: fn(&[f64]) -> f64, draws: &[f64]) -> (Vec<A>, usize) {
    let (delta, big_delta, phi) = (1.0, 0.3, 1.0);
    let big_n = agents.len();
    let half = big_n / 2;
    let os = half - 1;
    let d = agents[0].x.len();
    let mut rng = Draws(draws, 0);
    let mut next: Vec<A> = Vec::new();

    let mut best = agents[0].clone();
    for s in [delta, big_delta] {
        let r = rng.direction(d);
        let x = step(&best.x, s, &r);
        let fx = f(&x);
        if fx <= best.f {
            best = A { x, f: fx, stalled: false };
        }
    }
    next.push(A { stalled: false, ..best });

    for n in 2..=big_n {
        let (x, pulled_fpct) = if n <= half - 1 {
            if agents[n - 1].stalled {
                let r = rng.direction(d);
                (step(&agents[n - 1].x, phi, &r), false)
            } else {
                (pull(agents, n, 1, n - 1), true)
            }
        } else if n <= half + 2 {
            (pull(agents, n, n - os, n - 1), false)
        } else {
            (pull(agents, n, n - os, big_n - os), false)
        };
        let fx = f(&x);
        next.push(A { x, f: fx, stalled: pulled_fpct && fx >= agents[n - 1].f });
    }

    // stable, so ties keep their pre-sort order
    next.sort_by(|a, b| a.f.total_cmp(&b.f));
    (next, rng.1)
}

/// Two wells at x0 = -1 and x0 = +1 with a ridge between, so pulls across
/// the ridge stall.
pub fn wells(x: &[f64]) -> f64 {
    let y = x.get(1).copied().unwrap_or(0.0);
    (x[0] * x[0] - 1.0).powi(2) + 0.1 * x[0] + 0.5 * y * y
}

fn toy_agents(big_n: usize, d: usize, f: fn(&[f64]) -> f64) -> Vec<A> {
    let mut a: Vec<A> = (0..big_n)
        .map(|k| {
            let t = k as f64;
            let p = [((t * 1.37 + 0.3) % 3.8) - 1.9, ((t * 0.71 + 1.1) % 3.6) - 1.8];
            let x = p[..d].to_vec();
            A { f: f(&x), x, stalled: false }
        })
        .collect();
    a.sort_by(|p, q| p.f.total_cmp(&q.f));
    a
}

fn as_state(agents: &[A]) -> MtoState {
    let pop = Population::from_candidates(
        agents
            .iter()
            .map(|a| Candidate { position: a.x.clone(), loss: a.f })
            .collect(),
    );
    MtoState::new(pop).unwrap()
}

fn assert_same(state: &MtoState, want: &[A]) {
    assert_eq!(state.ranked().len(), want.len());
    for (got, want) in state.ranked().iter().zip(want) {
        assert!(close(&got.position, &want.x), "{:?} vs {:?}", got.position, want.x);
        assert!((got.loss - want.f).abs() <= TOL);
    }
    let stalled: Vec<bool> = want.iter().map(|a| a.stalled).collect();
    assert_eq!(state.stalled(), stalled.as_slice());
}

/// Runs `sweeps` library sweeps next to the oracle; returns how many
/// defense moves fired.
pub fn check_mto(big_n: usize, d: usize, f: fn(&[f64]) -> f64, sweeps: usize) -> usize {
    let cfg = MtoConfig {
        population: big_n,
        ..MtoConfig::default()
    };
    let objective = ObjectiveSpec::new(Bounds::uniform(d, -2.0, 2.0).unwrap(), f);
    let draws: Vec<f64> = (0..10_000).map(|k| ((k * 37 + 11) % 101) as f64 / 101.0).collect();
    let mut want = toy_agents(big_n, d, f);
    let mut state = as_state(&want);
    let mut offset = 0;
    let mut defenses = 0;
    for _ in 0..sweeps {
        let rest = &draws[offset..];
        let mut rng = SequenceSource::new(rest.to_vec());
        state.sweep(&objective, &cfg, &mut rng).unwrap();
        let (next, used) = brute_mto_sweep(&want, f, rest);
        assert_eq!(rest.len() - rng.remaining(), used, "draw count");
        assert_same(&state, &next);
        defenses += (used - 4 * d) / (2 * d);
        offset += used;
        want = next;
    }
    defenses
}
