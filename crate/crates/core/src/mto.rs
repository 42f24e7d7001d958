//! Mother Tree Optimization and its climate-change variant (MTOCL).
//!
//! The population is kept ranked by ascending loss and split into four
//! bands, each with its own move:
//!
//! | band | ranks (1-based)            | move |
//! |------|----------------------------|------|
//! | TMT  | 1                          | two greedy random steps, sizes `root_signal` then `mfn_signal` |
//! | FPCT | `2 ..= N/2 - 1`            | pull toward every better-ranked agent |
//! | FCT  | `N/2 ..= N/2 + 2`          | pull toward the `N/2 - 1` agents ranked just above |
//! | LPCT | `N/2 + 3 ..= N`            | pull toward ranks `n - (N/2 - 1) ..= N/2 + 1` |
//!
//! A pull from rank `n` toward ranks `lo..=hi` is
//! `x_n + sum_{i=lo}^{hi} (x_i - x_n) / (n - i + 1)`, computed on the
//! pre-sweep snapshot.
//!
//! With the defense mechanism on, an FPCT agent whose previous pull did not
//! lower its loss takes a random step of size `defense_step` instead.
//!
//! MTOCL splits the sweep budget into `climate_events + 1` epochs. Between
//! epochs the worst `elimination` fraction is replaced by random agents and
//! every kept agent is distorted (each coordinate multiplied by a fresh
//! uniform draw in `[0, 1]`).

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::objective::{Bounds, ObjectiveSpec};
use crate::optimizer::OptimizationResult;
use crate::population::{evaluate_all, init_population, random_position, rank_order, Candidate, Population};
use crate::rng::UniformSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MtoConfig {
    pub population: usize,
    /// Step of the first TMT move.
    pub root_signal: f64,
    /// Step of the second TMT move.
    pub mfn_signal: f64,
    pub defense_step: f64,
    pub defense: bool,
    /// Number of climate events; 0 runs plain MTO.
    pub climate_events: usize,
    /// Fraction of the population replaced at each climate event.
    pub elimination: f64,
    /// Total number of sweeps across all epochs.
    pub iterations: usize,
}

impl Default for MtoConfig {
    fn default() -> Self {
        Self {
            population: 20,
            root_signal: 1.0,
            mfn_signal: 0.3,
            defense_step: 1.0,
            defense: true,
            climate_events: 5,
            elimination: 0.2,
            iterations: 500,
        }
    }
}

impl MtoConfig {
    /// Plain MTO: no climate events, `iterations` sweeps.
    pub fn plain(self, iterations: usize) -> Self {
        Self {
            climate_events: 0,
            iterations,
            ..self
        }
    }

    pub fn with_iterations(self, iterations: usize) -> Self {
        Self { iterations, ..self }
    }

    pub fn is_plain(&self) -> bool {
        self.climate_events == 0
    }

    pub fn validate(&self) -> Result<()> {
        group_topology(self.population)?;
        if !(0.0..1.0).contains(&self.elimination) {
            return Err(Error::config(format!(
                "elimination fraction must lie in [0, 1), got {}",
                self.elimination
            )));
        }
        for (name, v) in [
            ("root_signal", self.root_signal),
            ("mfn_signal", self.mfn_signal),
            ("defense_step", self.defense_step),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        Ok(())
    }

    /// Sweeps per epoch: `iterations / (climate_events + 1)`.
    pub fn kin_signals(&self) -> usize {
        self.iterations / (self.climate_events + 1)
    }

    /// Sweep count of every epoch; the remainder goes to the last one.
    pub fn epoch_lengths(&self) -> Vec<usize> {
        let k = self.kin_signals();
        let mut lengths = vec![k; self.climate_events + 1];
        *lengths.last_mut().unwrap() += self.iterations - k * (self.climate_events + 1);
        lengths
    }

    /// Agents replaced at each climate event, `floor(elimination * N)`.
    pub fn eliminated(&self) -> usize {
        ((self.elimination * self.population as f64) + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Tmt,
    Fpct,
    Fct,
    Lpct,
}

/// Band sizes and 1-based rank ranges for a population of `population`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTopology {
    pub population: usize,
    pub offspring: usize,
    pub feeders: usize,
    pub non_feeders: usize,
    pub fct_count: usize,
    pub pct_count: usize,
    pub fpct: RangeInclusive<usize>,
    pub fct: RangeInclusive<usize>,
    pub lpct: RangeInclusive<usize>,
}

impl GroupTopology {
    pub fn group_of(&self, rank: usize) -> Option<Group> {
        match rank {
            1 => Some(Group::Tmt),
            r if self.fpct.contains(&r) => Some(Group::Fpct),
            r if self.fct.contains(&r) => Some(Group::Fct),
            r if self.lpct.contains(&r) => Some(Group::Lpct),
            _ => None,
        }
    }
}

pub fn group_topology(population: usize) -> Result<GroupTopology> {
    if population < 6 || !population.is_multiple_of(2) {
        return Err(Error::config(format!(
            "population must be even and at least 6, got {population}"
        )));
    }
    let half = population / 2;
    let feeders = half + 1;
    Ok(GroupTopology {
        population,
        offspring: half - 1,
        feeders,
        non_feeders: population - feeders,
        fct_count: 3,
        pct_count: population - 4,
        fpct: 2..=half - 1,
        fct: half..=half + 2,
        lpct: half + 3..=population,
    })
}

/// Random direction: `d` sign draws `u`, then `d` magnitude draws `w`;
/// component `i` is `(2*round(u_i) - 1) * w_i`.
pub fn random_direction<R: UniformSource + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    let signs: Vec<f64> = (0..d).map(|_| 2.0 * rng.next_uniform().round() - 1.0).collect();
    signs.into_iter().map(|s| s * rng.next_uniform()).collect()
}

/// `clamp(x + step * direction)`.
pub fn step_along(position: &[f64], step: f64, direction: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    check_len(position.len(), direction.len())?;
    check_len(bounds.dimension(), position.len())?;
    let mut x: Vec<f64> = position
        .iter()
        .zip(direction)
        .map(|(x, r)| x + step * r)
        .collect();
    bounds.clamp_in_place(&mut x);
    Ok(x)
}

/// Two greedy exploitation moves of the top agent. Each move is kept only if
/// it does not increase the loss. Costs two evaluations.
pub fn update_tmt<R: UniformSource + ?Sized>(
    best: &Candidate,
    cfg: &MtoConfig,
    spec: &ObjectiveSpec,
    rng: &mut R,
) -> Result<Candidate> {
    let mut current = best.clone();
    for step in [cfg.root_signal, cfg.mfn_signal] {
        let direction = random_direction(spec.dimension(), rng);
        let proposal = Candidate::evaluated(
            step_along(&current.position, step, &direction, spec.bounds())?,
            spec,
        );
        if proposal.loss <= current.loss {
            current = proposal;
        }
    }
    Ok(current)
}

/// `clamp(x + defense_step * R)`.
pub fn apply_defense<R: UniformSource + ?Sized>(
    position: &[f64],
    cfg: &MtoConfig,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let direction = random_direction(position.len(), rng);
    step_along(position, cfg.defense_step, &direction, bounds)
}

/// `x_n + sum_{i=lo}^{hi} (x_i - x_n) / (n - i + 1)` over 1-based ranks.
fn weighted_pull(rank: usize, lo: usize, hi: usize, ranked: &[Candidate], bounds: &Bounds) -> Vec<f64> {
    let x_n = &ranked[rank - 1].position;
    let mut out = x_n.clone();
    for i in lo..=hi {
        let w = 1.0 / (rank - i + 1) as f64;
        for (o, (xi, xn)) in out.iter_mut().zip(ranked[i - 1].position.iter().zip(x_n)) {
            *o += w * (xi - xn);
        }
    }
    bounds.clamp_in_place(&mut out);
    out
}

fn require_group(topo: &GroupTopology, rank: usize, want: Group) -> Result<()> {
    match topo.group_of(rank) {
        Some(g) if g == want => Ok(()),
        other => Err(Error::Internal(format!(
            "rank {rank} belongs to {other:?}, not {want:?}"
        ))),
    }
}

/// Pull of an FPCT agent toward all better ranks `1..=n-1`.
pub fn update_fpct(rank: usize, ranked: &[Candidate], bounds: &Bounds) -> Result<Vec<f64>> {
    let topo = group_topology(ranked.len())?;
    require_group(&topo, rank, Group::Fpct)?;
    Ok(weighted_pull(rank, 1, rank - 1, ranked, bounds))
}

/// Pull of an FCT agent toward ranks `n - N_os ..= n - 1`.
pub fn update_fct(rank: usize, ranked: &[Candidate], bounds: &Bounds) -> Result<Vec<f64>> {
    let topo = group_topology(ranked.len())?;
    require_group(&topo, rank, Group::Fct)?;
    Ok(weighted_pull(rank, rank - topo.offspring, rank - 1, ranked, bounds))
}

/// Pull of an LPCT agent toward ranks `n - N_os ..= N - N_os`.
pub fn update_lpct(rank: usize, ranked: &[Candidate], bounds: &Bounds) -> Result<Vec<f64>> {
    let topo = group_topology(ranked.len())?;
    require_group(&topo, rank, Group::Lpct)?;
    Ok(weighted_pull(
        rank,
        rank - topo.offspring,
        topo.population - topo.offspring,
        ranked,
        bounds,
    ))
}

/// Ranked population plus per-agent defense state, as carried between sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct MtoState {
    agents: Vec<Candidate>,
    /// `stalled[k]` is set when agent `k` made an FPCT pull that did not
    /// lower its loss.
    stalled: Vec<bool>,
    topology: GroupTopology,
    evaluations: usize,
}

impl MtoState {
    pub fn new(population: Population) -> Result<Self> {
        let topology = group_topology(population.len())?;
        let evaluations = population.len();
        let agents = population.into_members();
        Ok(Self {
            stalled: vec![false; agents.len()],
            agents,
            topology,
            evaluations,
        })
    }

    pub fn initialize<R: UniformSource + ?Sized>(
        spec: &ObjectiveSpec,
        cfg: &MtoConfig,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        Self::new(init_population(cfg.population, spec, rng)?)
    }

    /// Agents in rank order.
    pub fn ranked(&self) -> &[Candidate] {
        &self.agents
    }

    pub fn best(&self) -> &Candidate {
        &self.agents[0]
    }

    pub fn stalled(&self) -> &[bool] {
        &self.stalled
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// One kin-recognition sweep: every agent moves by its band's rule using
    /// the pre-sweep ranking, then all are re-evaluated and re-ranked.
    ///
    /// Draw order: the two TMT directions, then defense directions for
    /// stalled FPCT agents in rank order.
    pub fn sweep<R: UniformSource + ?Sized>(
        &mut self,
        spec: &ObjectiveSpec,
        cfg: &MtoConfig,
        rng: &mut R,
    ) -> Result<()> {
        let snapshot = &self.agents;
        let bounds = spec.bounds();
        let n_agents = snapshot.len();

        let tmt = update_tmt(&snapshot[0], cfg, spec, rng)?;
        self.evaluations += 2;

        let mut moved = Vec::with_capacity(n_agents - 1);
        let mut pulled_fpct = vec![false; n_agents];
        for rank in 2..=n_agents {
            let x = match self.topology.group_of(rank) {
                Some(Group::Fpct) if cfg.defense && self.stalled[rank - 1] => {
                    apply_defense(&snapshot[rank - 1].position, cfg, bounds, rng)?
                }
                Some(Group::Fpct) => {
                    pulled_fpct[rank - 1] = true;
                    update_fpct(rank, snapshot, bounds)?
                }
                Some(Group::Fct) => update_fct(rank, snapshot, bounds)?,
                Some(Group::Lpct) => update_lpct(rank, snapshot, bounds)?,
                Some(Group::Tmt) | None => unreachable!("ranks 2..=N fall in the three lower bands"),
            };
            moved.push(x);
        }
        let losses = evaluate_all(spec, &moved);
        self.evaluations += moved.len();

        let mut next = Vec::with_capacity(n_agents);
        let mut stalled = Vec::with_capacity(n_agents);
        next.push(tmt);
        stalled.push(false);
        for (k, (position, loss)) in moved.into_iter().zip(losses).enumerate() {
            let rank = k + 2;
            stalled.push(pulled_fpct[rank - 1] && loss >= snapshot[rank - 1].loss);
            next.push(Candidate { position, loss });
        }
        self.install(next, stalled);
        Ok(())
    }

    /// Distorts the kept agents, replaces the worst `cfg.eliminated()` with
    /// random ones, and re-ranks. Population size is unchanged.
    ///
    /// Draw order: distortion factors for ranks `1..=keep`, then the
    /// replacement positions.
    pub fn climate_event<R: UniformSource + ?Sized>(
        &mut self,
        spec: &ObjectiveSpec,
        cfg: &MtoConfig,
        rng: &mut R,
    ) -> Result<()> {
        let n = self.agents.len();
        let replaced = cfg.eliminated().min(n);
        let keep = n - replaced;
        let bounds = spec.bounds();
        let mut positions: Vec<Vec<f64>> = self.agents[..keep]
            .iter()
            .map(|c| {
                let mut x: Vec<f64> = c.position.iter().map(|v| v * rng.next_uniform()).collect();
                bounds.clamp_in_place(&mut x);
                x
            })
            .collect();
        positions.extend((0..replaced).map(|_| random_position(bounds, rng)));
        let losses = evaluate_all(spec, &positions);
        self.evaluations += n;
        let next = positions
            .into_iter()
            .zip(losses)
            .map(|(position, loss)| Candidate { position, loss })
            .collect();
        self.install(next, vec![false; n]);
        Ok(())
    }

    fn install(&mut self, agents: Vec<Candidate>, stalled: Vec<bool>) {
        let order = rank_order(agents.iter().map(|c| c.loss));
        let mut slots: Vec<Option<(Candidate, bool)>> =
            agents.into_iter().zip(stalled).map(Some).collect();
        let (agents, stalled) = order
            .into_iter()
            .map(|i| slots[i].take().expect("rank order is a permutation"))
            .unzip();
        self.agents = agents;
        self.stalled = stalled;
    }
}

/// Runs MTO (`climate_events == 0`) or MTOCL and returns the final rank-1
/// agent.
pub fn run_mto<R: UniformSource + ?Sized>(
    spec: &ObjectiveSpec,
    cfg: &MtoConfig,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let mut state = MtoState::initialize(spec, cfg, rng)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(state.best().loss);
    let epochs = cfg.epoch_lengths();
    let last = epochs.len() - 1;
    for (epoch, &sweeps) in epochs.iter().enumerate() {
        for _ in 0..sweeps {
            state.sweep(spec, cfg, rng)?;
            trace.push(state.best().loss);
        }
        if epoch < last && sweeps > 0 {
            state.climate_event(spec, cfg, rng)?;
        }
    }
    let best = state.best().clone();
    Ok(OptimizationResult {
        best_position: best.position,
        best_loss: best.loss,
        evaluations: state.evaluations(),
        trace,
    })
}
