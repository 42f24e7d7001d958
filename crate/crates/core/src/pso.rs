//! Canonical particle swarm optimization with a constriction factor.
//!
//! Each particle carries a velocity and remembers its own best position.
//! Per sweep, every particle draws fresh uniform coefficients and moves by
//!
//! ```text
//! v' = chi * (v + c1*r1*(p_local - x) + c2*r2*(p_global - x))
//! x' = clamp(x + v')
//! ```
//!
//! with an independent `r1`, `r2` for every coordinate.
//!
//! Velocities are not clamped; positions are saturated into the box after
//! every move.
//!
//! Draw order per run: every particle's position (coordinate by coordinate),
//! then every particle's initial velocity, then per sweep and per particle in
//! index order all `d` values of `r1` followed by all `d` values of `r2`.
//!
//! [`CoefficientDraw::PerParticle`] instead shares one scalar pair across all
//! coordinates of a move. That keeps each move inside the span of the
//! velocity and the two attractor offsets, so on smooth problems the swarm
//! tends to collapse into a low-dimensional subspace and stall.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::objective::{Bounds, ObjectiveSpec};
use crate::optimizer::OptimizationResult;
use crate::population::{evaluate_all, random_position};
use crate::rng::UniformSource;

/// When the swarm's global best absorbs new particle results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlobalBestUpdate {
    /// After the whole sweep, in particle-index order. Every particle in a
    /// sweep sees the same global best, so evaluations can run in parallel.
    #[default]
    Synchronous,
    /// Immediately after each particle moves, so later particles in the same
    /// sweep follow an already-improved global best.
    Asynchronous,
}

/// Granularity of the random coefficients `r1`, `r2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientDraw {
    /// An independent pair for every coordinate.
    #[default]
    PerComponent,
    /// One scalar pair per particle per sweep, shared by all coordinates.
    PerParticle,
}

impl CoefficientDraw {
    pub fn as_str(self) -> &'static str {
        match self {
            CoefficientDraw::PerParticle => "per-particle",
            CoefficientDraw::PerComponent => "per-component",
        }
    }
}

impl fmt::Display for CoefficientDraw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CoefficientDraw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "per-particle" => Ok(CoefficientDraw::PerParticle),
            "per-component" => Ok(CoefficientDraw::PerComponent),
            other => Err(Error::config(format!(
                "unknown coefficient draw `{other}`, expected per-particle or per-component"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub chi: f64,
    pub c1: f64,
    pub c2: f64,
    pub particles: usize,
    pub iterations: usize,
    pub global_best_update: GlobalBestUpdate,
    pub coefficients: CoefficientDraw,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            chi: 0.72984,
            c1: 2.02,
            c2: 2.02,
            particles: 20,
            iterations: 500,
            global_best_update: GlobalBestUpdate::Synchronous,
            coefficients: CoefficientDraw::PerComponent,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.chi > 0.0 && self.chi < 1.0) {
            return Err(Error::config(format!("chi must lie in (0, 1), got {}", self.chi)));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::config(format!(
                "acceleration coefficients must be positive, got c1={} c2={}",
                self.c1, self.c2
            )));
        }
        if self.particles < 2 {
            return Err(Error::config(format!(
                "swarm needs at least 2 particles, got {}",
                self.particles
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub loss: f64,
    pub best_position: Vec<f64>,
    pub best_loss: f64,
}

impl Particle {
    /// A particle at rest whose local best is its current position.
    pub fn at(position: Vec<f64>, velocity: Vec<f64>, loss: f64) -> Self {
        Self {
            best_position: position.clone(),
            best_loss: loss,
            position,
            velocity,
            loss,
        }
    }

    /// Adopts the current position as local best if it is strictly better.
    fn absorb(&mut self) {
        if self.loss < self.best_loss {
            self.best_loss = self.loss;
            self.best_position.clone_from(&self.position);
        }
    }
}

/// Constricted velocity update with explicit coefficients `r1`, `r2`.
pub fn constricted_velocity(
    particle: &Particle,
    global_best: &[f64],
    cfg: &PsoConfig,
    r1: f64,
    r2: f64,
) -> Result<Vec<f64>> {
    velocity_with(particle, global_best, cfg, |_| (r1, r2))
}

fn velocity_with(
    particle: &Particle,
    global_best: &[f64],
    cfg: &PsoConfig,
    r: impl Fn(usize) -> (f64, f64),
) -> Result<Vec<f64>> {
    let d = particle.position.len();
    check_len(d, particle.velocity.len())?;
    check_len(d, particle.best_position.len())?;
    check_len(d, global_best.len())?;
    Ok((0..d)
        .map(|i| {
            let x = particle.position[i];
            let (r1, r2) = r(i);
            cfg.chi
                * (particle.velocity[i]
                    + cfg.c1 * r1 * (particle.best_position[i] - x)
                    + cfg.c2 * r2 * (global_best[i] - x))
        })
        .collect())
}

/// Velocity update drawing its coefficients from `rng`, `r1` before `r2`.
pub fn update_velocity<R: UniformSource + ?Sized>(
    particle: &Particle,
    global_best: &[f64],
    cfg: &PsoConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    match cfg.coefficients {
        CoefficientDraw::PerParticle => {
            let r1 = rng.next_uniform();
            let r2 = rng.next_uniform();
            constricted_velocity(particle, global_best, cfg, r1, r2)
        }
        CoefficientDraw::PerComponent => {
            let d = particle.position.len();
            let r1: Vec<f64> = (0..d).map(|_| rng.next_uniform()).collect();
            let r2: Vec<f64> = (0..d).map(|_| rng.next_uniform()).collect();
            velocity_with(particle, global_best, cfg, |i| (r1[i], r2[i]))
        }
    }
}

/// `clamp(x + v')`.
pub fn update_position(particle: &Particle, velocity: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    check_len(bounds.dimension(), particle.position.len())?;
    check_len(particle.position.len(), velocity.len())?;
    let mut x: Vec<f64> = particle
        .position
        .iter()
        .zip(velocity)
        .map(|(x, v)| x + v)
        .collect();
    bounds.clamp_in_place(&mut x);
    Ok(x)
}

/// A swarm mid-run. Exposed so single sweeps can be driven and inspected.
#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub global_best: Vec<f64>,
    pub global_best_loss: f64,
    evaluations: usize,
}

impl Swarm {
    /// Random positions, small random velocities (each coordinate uniform in
    /// `±width/10`).
    pub fn initialize<R: UniformSource + ?Sized>(
        spec: &ObjectiveSpec,
        cfg: &PsoConfig,
        rng: &mut R,
    ) -> Result<Self> {
        cfg.validate()?;
        let bounds = spec.bounds();
        let positions: Vec<Vec<f64>> = (0..cfg.particles)
            .map(|_| random_position(bounds, rng))
            .collect();
        let velocities: Vec<Vec<f64>> = (0..cfg.particles)
            .map(|_| {
                (0..bounds.dimension())
                    .map(|i| {
                        let vmax = bounds.width(i) / 10.0;
                        rng.uniform_in(-vmax, vmax)
                    })
                    .collect()
            })
            .collect();
        let losses = evaluate_all(spec, &positions);
        let particles: Vec<Particle> = positions
            .into_iter()
            .zip(velocities)
            .zip(losses)
            .map(|((x, v), f)| Particle::at(x, v, f))
            .collect();
        Ok(Self::from_particles(particles))
    }

    /// Wraps existing particles; the global best is the best local best.
    pub fn from_particles(particles: Vec<Particle>) -> Self {
        let mut best = 0;
        for (i, p) in particles.iter().enumerate() {
            if p.best_loss < particles[best].best_loss {
                best = i;
            }
        }
        Self {
            global_best: particles[best].best_position.clone(),
            global_best_loss: particles[best].best_loss,
            evaluations: particles.len(),
            particles,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// One pass over all particles.
    pub fn sweep<R: UniformSource + ?Sized>(
        &mut self,
        spec: &ObjectiveSpec,
        cfg: &PsoConfig,
        rng: &mut R,
    ) -> Result<()> {
        match cfg.global_best_update {
            GlobalBestUpdate::Synchronous => {
                let mut moved = Vec::with_capacity(self.particles.len());
                for p in &mut self.particles {
                    let v = update_velocity(p, &self.global_best, cfg, rng)?;
                    let x = update_position(p, &v, spec.bounds())?;
                    p.velocity = v;
                    moved.push(x);
                }
                let losses = evaluate_all(spec, &moved);
                self.evaluations += moved.len();
                for ((p, x), f) in self.particles.iter_mut().zip(moved).zip(losses) {
                    p.position = x;
                    p.loss = f;
                    p.absorb();
                }
                for i in 0..self.particles.len() {
                    self.absorb_global(i);
                }
            }
            GlobalBestUpdate::Asynchronous => {
                for i in 0..self.particles.len() {
                    let p = &mut self.particles[i];
                    let v = update_velocity(p, &self.global_best, cfg, rng)?;
                    let x = update_position(p, &v, spec.bounds())?;
                    p.loss = spec.evaluate(&x);
                    p.velocity = v;
                    p.position = x;
                    p.absorb();
                    self.evaluations += 1;
                    self.absorb_global(i);
                }
            }
        }
        Ok(())
    }

    fn absorb_global(&mut self, i: usize) {
        let p = &self.particles[i];
        if p.loss < self.global_best_loss {
            self.global_best_loss = p.loss;
            self.global_best.clone_from(&p.position);
        }
    }
}

/// Runs `cfg.iterations` sweeps and returns the global best.
pub fn run_pso<R: UniformSource + ?Sized>(
    spec: &ObjectiveSpec,
    cfg: &PsoConfig,
    rng: &mut R,
) -> Result<OptimizationResult> {
    let mut swarm = Swarm::initialize(spec, cfg, rng)?;
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(swarm.global_best_loss);
    for _ in 0..cfg.iterations {
        swarm.sweep(spec, cfg, rng)?;
        trace.push(swarm.global_best_loss);
    }
    Ok(OptimizationResult {
        best_loss: swarm.global_best_loss,
        evaluations: swarm.evaluations(),
        best_position: swarm.global_best,
        trace,
    })
}
