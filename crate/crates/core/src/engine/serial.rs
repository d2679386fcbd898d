use crate::swarm::{Candidate, GlobalBest, StateParticle, StepContext, SwarmState};

/// One iteration, particles in index order. The global best is updated online
/// after each particle whose personal best strictly beats it.
pub(super) fn step(ctx: &StepContext<'_>, state: &mut SwarmState, best: &mut GlobalBest, buf: &mut [f64]) {
    for i in 0..state.particles() {
        ctx.advance(&mut StateParticle::new(state, i), i, buf);
        let pbest = state.pbest_fitness()[i];
        if pbest > best.fit() {
            let candidate = Candidate {
                fit: pbest,
                particle: i,
            };
            best.lock(core::hint::spin_loop).set(candidate, ctx.iteration, |pos| {
                for (d, x) in pos.iter_mut().enumerate() {
                    *x = state.pbest_position(i, d);
                }
            });
        }
    }
}
