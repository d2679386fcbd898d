//! Swarm state in structure-of-arrays layout and the per-particle update rules.
//!
//! Vector fields are stored axis-major: the component of particle `i` on axis
//! `d` lives at `d * particle_cnt + i`, so all particles' axis-0 values are
//! contiguous, then axis 1, and so on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::marker::PhantomData;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{ConfigError, PsoError};
use crate::fitness::FitnessFn;
use crate::params::PsoParams;
use crate::rng::{scale, uniform01, RngDraw, RngKey, Slot};
use crate::runtime::lock::{SpinGuard, SpinLock};

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    particles: usize,
    dims: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    fitness: Vec<f64>,
    pbest_pos: Vec<f64>,
    pbest_fit: Vec<f64>,
}

impl SwarmState {
    /// A zeroed state; pbest fitness starts at `-inf`.
    pub fn zeroed(particles: usize, dims: usize) -> Self {
        let len = particles * dims;
        Self {
            particles,
            dims,
            positions: vec![0.0; len],
            velocities: vec![0.0; len],
            fitness: vec![f64::NEG_INFINITY; particles],
            pbest_pos: vec![0.0; len],
            pbest_fit: vec![f64::NEG_INFINITY; particles],
        }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Flat index of `(particle, axis)`.
    #[inline]
    pub fn index(&self, particle: usize, axis: usize) -> usize {
        axis * self.particles + particle
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn pbest_positions(&self) -> &[f64] {
        &self.pbest_pos
    }

    pub fn pbest_fitness(&self) -> &[f64] {
        &self.pbest_fit
    }

    pub fn position(&self, particle: usize, axis: usize) -> f64 {
        self.positions[self.index(particle, axis)]
    }

    pub fn velocity(&self, particle: usize, axis: usize) -> f64 {
        self.velocities[self.index(particle, axis)]
    }

    pub fn pbest_position(&self, particle: usize, axis: usize) -> f64 {
        self.pbest_pos[self.index(particle, axis)]
    }

    /// Copies particle `i`'s position into `out` (length `dims`).
    pub fn gather_position(&self, particle: usize, out: &mut [f64]) {
        for (d, o) in out.iter_mut().enumerate().take(self.dims) {
            *o = self.positions[d * self.particles + particle];
        }
    }

    pub fn scatter_position(&mut self, particle: usize, src: &[f64]) {
        for (d, &x) in src.iter().enumerate().take(self.dims) {
            self.positions[d * self.particles + particle] = x;
        }
    }

    pub fn set_velocity(&mut self, particle: usize, src: &[f64]) {
        for (d, &v) in src.iter().enumerate().take(self.dims) {
            self.velocities[d * self.particles + particle] = v;
        }
    }

    pub fn set_pbest(&mut self, particle: usize, fit: f64, pos: &[f64]) {
        self.pbest_fit[particle] = fit;
        for (d, &x) in pos.iter().enumerate().take(self.dims) {
            self.pbest_pos[d * self.particles + particle] = x;
        }
    }

    /// Velocity update for particle `i` with per-axis random factors.
    pub fn update_velocity(
        &mut self,
        particle: usize,
        params: &PsoParams,
        gbest_pos: &[f64],
        r1: &[f64],
        r2: &[f64],
    ) {
        for d in 0..self.dims {
            let k = self.index(particle, d);
            self.velocities[k] = velocity_rule(
                params,
                self.velocities[k],
                self.positions[k],
                self.pbest_pos[k],
                gbest_pos[d],
                r1[d],
                r2[d],
            );
        }
    }

    /// Position update for particle `i` from its current velocity.
    pub fn update_position(&mut self, particle: usize, params: &PsoParams) {
        for d in 0..self.dims {
            let k = self.index(particle, d);
            self.positions[k] = position_rule(params, self.positions[k], self.velocities[k]);
        }
    }

    /// Records `fit` for particle `i` and replaces its best on strict improvement.
    pub fn update_pbest(&mut self, particle: usize, fit: f64) -> bool {
        self.fitness[particle] = fit;
        if fit > self.pbest_fit[particle] {
            self.pbest_fit[particle] = fit;
            for d in 0..self.dims {
                let k = self.index(particle, d);
                self.pbest_pos[k] = self.positions[k];
            }
            true
        } else {
            false
        }
    }

    /// Bitwise comparison of every field.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        fn same(a: &[f64], b: &[f64]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
        }
        self.particles == other.particles
            && self.dims == other.dims
            && same(&self.positions, &other.positions)
            && same(&self.velocities, &other.velocities)
            && same(&self.fitness, &other.fitness)
            && same(&self.pbest_pos, &other.pbest_pos)
            && same(&self.pbest_fit, &other.pbest_fit)
    }
}

/// Velocity rule, `w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)`, saturated to `[min_v, max_v]`.
#[inline(always)]
pub fn velocity_rule(
    params: &PsoParams,
    v: f64,
    x: f64,
    pbest: f64,
    gbest: f64,
    r1: f64,
    r2: f64,
) -> f64 {
    let next = params.inertia() * v
        + params.cognitive() * r1 * (pbest - x)
        + params.social() * r2 * (gbest - x);
    clamp(next, params.min_v(), params.max_v())
}

/// Position rule, `x + v`, saturated to `[min_pos, max_pos]`.
#[inline(always)]
pub fn position_rule(params: &PsoParams, x: f64, v: f64) -> f64 {
    clamp(x + v, params.min_pos(), params.max_pos())
}

#[inline(always)]
fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}

/// Best record of the whole swarm.
#[derive(Debug, Clone, PartialEq)]
pub struct BestRecord {
    pub fit: f64,
    pub pos: Vec<f64>,
    /// Particle the record was taken from.
    pub particle: usize,
    /// Iteration the record was set in (0 for initialization).
    pub iteration: u32,
}

/// A group winner offered to the global best.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub fit: f64,
    pub particle: usize,
}

impl Candidate {
    /// Padding entry that loses against every real candidate.
    pub const SENTINEL: Self = Self {
        fit: f64::NEG_INFINITY,
        particle: usize::MAX,
    };

    pub fn is_sentinel(&self) -> bool {
        self.particle == usize::MAX
    }

    /// The better of two candidates: larger fitness, ties to the lower particle index.
    #[inline(always)]
    pub fn max(self, other: Self) -> Self {
        if other.fit > self.fit || (other.fit == self.fit && other.particle < self.particle) {
            other
        } else {
            self
        }
    }
}

/// Swarm-wide best fitness and position behind the global lock word.
pub struct GlobalBest {
    record: SpinLock<BestRecord>,
    fit: AtomicU64,
}

impl GlobalBest {
    pub fn new(record: BestRecord) -> Self {
        Self {
            fit: AtomicU64::new(record.fit.to_bits()),
            record: SpinLock::new(record),
        }
    }

    /// Best fitness, as published by the last holder of the lock.
    #[inline]
    pub fn fit(&self) -> f64 {
        f64::from_bits(self.fit.load(Ordering::Acquire))
    }

    pub fn record(&mut self) -> &BestRecord {
        self.record.get_mut()
    }

    pub fn into_record(self) -> BestRecord {
        self.record.into_inner()
    }

    /// Lock word state, `0` free and `1` held.
    pub fn lock_value(&self) -> u32 {
        self.record.word().value()
    }

    pub fn lock(&self, relax: fn()) -> BestGuard<'_> {
        BestGuard {
            guard: self.record.lock(relax),
            fit: &self.fit,
        }
    }

    pub(crate) fn copy_pos_into(&mut self, out: &mut [f64]) {
        out.copy_from_slice(&self.record.get_mut().pos);
    }
}

impl fmt::Debug for GlobalBest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GlobalBest")
            .field("fit", &self.fit())
            .field("lock", &self.lock_value())
            .finish_non_exhaustive()
    }
}

/// Exclusive access to the best record; the published fitness follows every update.
pub struct BestGuard<'a> {
    guard: SpinGuard<'a, BestRecord>,
    fit: &'a AtomicU64,
}

impl BestGuard<'_> {
    pub fn record(&self) -> &BestRecord {
        &self.guard
    }

    /// Replaces the record; `fill_pos` writes the winner's position.
    pub fn set(&mut self, candidate: Candidate, iteration: u32, fill_pos: impl FnOnce(&mut [f64])) {
        let rec = &mut *self.guard;
        rec.fit = candidate.fit;
        rec.particle = candidate.particle;
        rec.iteration = iteration;
        fill_pos(&mut rec.pos);
        self.fit.store(candidate.fit.to_bits(), Ordering::Release);
    }
}

impl fmt::Debug for BestGuard<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self.record(), f)
    }
}

/// Initializes positions and velocities from iteration-0 draws, evaluates every
/// particle and takes the best (lowest index on ties) as the global best.
pub fn init_swarm(
    params: &PsoParams,
    key: RngKey,
    fitness: &FitnessFn,
) -> Result<(SwarmState, GlobalBest), PsoError> {
    check_domain(params, fitness)?;
    let (n, dims) = (params.particles(), params.dims());
    let mut state = SwarmState::zeroed(n, dims);
    let mut buf = vec![0.0; dims];
    let mut best = Candidate::SENTINEL;
    for i in 0..n {
        for (d, x) in buf.iter_mut().enumerate() {
            let k = d * n + i;
            let u = uniform01(key, RngDraw::new(0, i as u32, d as u32, Slot::InitPos));
            *x = scale(u, params.min_pos(), params.max_pos());
            state.positions[k] = *x;
            state.pbest_pos[k] = *x;
            let u = uniform01(key, RngDraw::new(0, i as u32, d as u32, Slot::InitVel));
            state.velocities[k] = scale(u, params.min_v(), params.max_v());
        }
        let fit = fitness.evaluate(&buf)?;
        state.fitness[i] = fit;
        state.pbest_fit[i] = fit;
        if fit > best.fit || best.is_sentinel() {
            best = Candidate { fit, particle: i };
        }
    }
    let mut pos = vec![0.0; dims];
    state.gather_position(best.particle, &mut pos);
    let best = GlobalBest::new(BestRecord {
        fit: best.fit,
        pos,
        particle: best.particle,
        iteration: 0,
    });
    Ok((state, best))
}

fn check_domain(params: &PsoParams, fitness: &FitnessFn) -> Result<(), ConfigError> {
    if params.min_pos() < fitness.lower() || params.max_pos() > fitness.upper() {
        return Err(ConfigError::OutsideDomain {
            fitness: fitness.name().into(),
            min_pos: params.min_pos(),
            max_pos: params.max_pos(),
            lower: fitness.lower(),
            upper: fitness.upper(),
        });
    }
    Ok(())
}

/// Component access to one particle.
pub(crate) trait ParticleSlots {
    fn pos(&self, d: usize) -> f64;
    fn set_pos(&mut self, d: usize, x: f64);
    fn vel(&self, d: usize) -> f64;
    fn set_vel(&mut self, d: usize, v: f64);
    fn pbest_pos(&self, d: usize) -> f64;
    fn set_pbest_pos(&mut self, d: usize, x: f64);
    fn pbest_fit(&self) -> f64;
    fn set_pbest_fit(&mut self, fit: f64);
    fn set_fit(&mut self, fit: f64);
}

/// Everything a lane needs to advance one particle by one iteration.
#[derive(Clone, Copy)]
pub(crate) struct StepContext<'a> {
    pub params: &'a PsoParams,
    pub fitness: &'a FitnessFn,
    pub key: RngKey,
    pub iteration: u32,
    /// Global best position as of the start of the iteration.
    pub gbest_pos: &'a [f64],
}

impl StepContext<'_> {
    /// Velocity, position, fitness and personal-best update for one particle.
    /// Returns the new fitness. `buf` must hold `dims` values.
    #[inline(always)]
    pub fn advance<P: ParticleSlots>(&self, p: &mut P, particle: usize, buf: &mut [f64]) -> f64 {
        let params = self.params;
        for (d, slot) in buf.iter_mut().enumerate() {
            let draw = RngDraw::new(self.iteration, particle as u32, d as u32, Slot::R1);
            let r1 = uniform01(self.key, draw);
            let r2 = uniform01(self.key, RngDraw { slot: Slot::R2, ..draw });
            let x = p.pos(d);
            let v = velocity_rule(params, p.vel(d), x, p.pbest_pos(d), self.gbest_pos[d], r1, r2);
            p.set_vel(d, v);
            let next = position_rule(params, x, v);
            p.set_pos(d, next);
            *slot = next;
        }
        let fit = self.fitness.evaluate_unchecked(buf);
        p.set_fit(fit);
        if fit > p.pbest_fit() {
            p.set_pbest_fit(fit);
            for (d, &x) in buf.iter().enumerate() {
                p.set_pbest_pos(d, x);
            }
        }
        fit
    }
}

pub(crate) struct StateParticle<'a> {
    state: &'a mut SwarmState,
    particle: usize,
}

impl<'a> StateParticle<'a> {
    pub fn new(state: &'a mut SwarmState, particle: usize) -> Self {
        Self { state, particle }
    }

    #[inline(always)]
    fn k(&self, d: usize) -> usize {
        d * self.state.particles + self.particle
    }
}

impl ParticleSlots for StateParticle<'_> {
    #[inline(always)]
    fn pos(&self, d: usize) -> f64 {
        self.state.positions[self.k(d)]
    }
    #[inline(always)]
    fn set_pos(&mut self, d: usize, x: f64) {
        let k = self.k(d);
        self.state.positions[k] = x;
    }
    #[inline(always)]
    fn vel(&self, d: usize) -> f64 {
        self.state.velocities[self.k(d)]
    }
    #[inline(always)]
    fn set_vel(&mut self, d: usize, v: f64) {
        let k = self.k(d);
        self.state.velocities[k] = v;
    }
    #[inline(always)]
    fn pbest_pos(&self, d: usize) -> f64 {
        self.state.pbest_pos[self.k(d)]
    }
    #[inline(always)]
    fn set_pbest_pos(&mut self, d: usize, x: f64) {
        let k = self.k(d);
        self.state.pbest_pos[k] = x;
    }
    #[inline(always)]
    fn pbest_fit(&self) -> f64 {
        self.state.pbest_fit[self.particle]
    }
    #[inline(always)]
    fn set_pbest_fit(&mut self, fit: f64) {
        self.state.pbest_fit[self.particle] = fit;
    }
    #[inline(always)]
    fn set_fit(&mut self, fit: f64) {
        self.state.fitness[self.particle] = fit;
    }
}

/// Shared view of a [`SwarmState`] for concurrent lanes.
///
/// Lanes write only their own particle's slots, and a particle is never touched
/// by two lanes in the same phase. Reads of other particles happen only after a
/// barrier or a full synchronization point has ordered them after the writes.
pub(crate) struct SharedSwarm<'a> {
    particles: usize,
    dims: usize,
    positions: *mut f64,
    velocities: *mut f64,
    fitness: *mut f64,
    pbest_pos: *mut f64,
    pbest_fit: *mut f64,
    _state: PhantomData<&'a mut SwarmState>,
}

// SAFETY: see the access discipline on the type.
unsafe impl Send for SharedSwarm<'_> {}
unsafe impl Sync for SharedSwarm<'_> {}

impl<'a> SharedSwarm<'a> {
    pub fn new(state: &'a mut SwarmState) -> Self {
        Self {
            particles: state.particles,
            dims: state.dims,
            positions: state.positions.as_mut_ptr(),
            velocities: state.velocities.as_mut_ptr(),
            fitness: state.fitness.as_mut_ptr(),
            pbest_pos: state.pbest_pos.as_mut_ptr(),
            pbest_fit: state.pbest_fit.as_mut_ptr(),
            _state: PhantomData,
        }
    }

    /// # Safety
    ///
    /// The caller must be the only lane accessing `particle` for the lifetime of
    /// the returned handle, and `particle < particles`.
    #[inline(always)]
    pub unsafe fn particle(&self, particle: usize) -> SharedParticle<'_> {
        debug_assert!(particle < self.particles);
        SharedParticle {
            stride: self.particles,
            pos: self.positions.add(particle),
            vel: self.velocities.add(particle),
            pbest_pos: self.pbest_pos.add(particle),
            fit: self.fitness.add(particle),
            pbest_fit: self.pbest_fit.add(particle),
            _swarm: PhantomData,
        }
    }

    /// # Safety
    ///
    /// No lane may be writing `particle` concurrently.
    pub unsafe fn read_position(&self, particle: usize, out: &mut [f64]) {
        debug_assert!(particle < self.particles && out.len() == self.dims);
        for (d, o) in out.iter_mut().enumerate() {
            *o = *self.positions.add(d * self.particles + particle);
        }
    }
}

/// One particle's slots: base pointers already offset to the particle, axis
/// `d` at `d * stride`.
pub(crate) struct SharedParticle<'a> {
    stride: usize,
    pos: *mut f64,
    vel: *mut f64,
    pbest_pos: *mut f64,
    fit: *mut f64,
    pbest_fit: *mut f64,
    _swarm: PhantomData<&'a SharedSwarm<'a>>,
}

// SAFETY (all methods): `d < dims` is the caller's loop bound and the handle
// has exclusive access to its particle's slots.
impl ParticleSlots for SharedParticle<'_> {
    #[inline(always)]
    fn pos(&self, d: usize) -> f64 {
        unsafe { *self.pos.add(d * self.stride) }
    }
    #[inline(always)]
    fn set_pos(&mut self, d: usize, x: f64) {
        unsafe { *self.pos.add(d * self.stride) = x }
    }
    #[inline(always)]
    fn vel(&self, d: usize) -> f64 {
        unsafe { *self.vel.add(d * self.stride) }
    }
    #[inline(always)]
    fn set_vel(&mut self, d: usize, v: f64) {
        unsafe { *self.vel.add(d * self.stride) = v }
    }
    #[inline(always)]
    fn pbest_pos(&self, d: usize) -> f64 {
        unsafe { *self.pbest_pos.add(d * self.stride) }
    }
    #[inline(always)]
    fn set_pbest_pos(&mut self, d: usize, x: f64) {
        unsafe { *self.pbest_pos.add(d * self.stride) = x }
    }
    #[inline(always)]
    fn pbest_fit(&self) -> f64 {
        unsafe { *self.pbest_fit }
    }
    #[inline(always)]
    fn set_pbest_fit(&mut self, fit: f64) {
        unsafe { *self.pbest_fit = fit }
    }
    #[inline(always)]
    fn set_fit(&mut self, fit: f64) {
        unsafe { *self.fit = fit }
    }
}
