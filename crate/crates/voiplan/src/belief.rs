//! Sequential importance resampling (SIR) over unweighted particle sets.
//!
//! A [`ParticleBelief`] is a bag of sampled states. Between resampling steps
//! every particle carries equal weight, which keeps the representation
//! trivially serializable and makes root-state sampling for tree search a
//! uniform draw.
//!
//! The closed-loop update is the classic three-step SIR cycle: propagate
//! every particle through the generative model, weight each successor by the
//! likelihood of the observation actually received, then systematically
//! resample back to an unweighted set. Systematic resampling uses a single
//! uniform offset, so the whole update consumes a bounded, seed-deterministic
//! amount of randomness.
//!
//! When an observation is so unlikely that every particle's weight
//! collapses, the update refuses to fabricate a posterior and reports
//! [`Error::ParticleDepletion`] instead, leaving the particle set untouched
//! so the caller can decide how to recover (the experiment harness falls
//! back to an open-loop propagation of the pre-update set).

use rand::RngCore;

use crate::pomdp::{uniform_f64, uniform_index, DenseBelief, GenerativeModel};
use crate::{Error, MIN_OBSERVATION_PROB};

/// An unweighted particle approximation of a belief state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticleBelief {
    particles: Vec<usize>,
}

impl ParticleBelief {
    /// Builds a belief of `count` particles drawn independently from the
    /// model's initial-state distribution.
    pub fn from_initial(
        model: &dyn GenerativeModel,
        count: usize,
        rng: &mut dyn RngCore,
    ) -> Self {
        let particles = (0..count).map(|_| model.sample_initial(rng)).collect();
        ParticleBelief { particles }
    }

    /// Builds a belief of `count` particles from an explicit distribution by
    /// largest-remainder apportionment: state `s` receives
    /// `floor(p_s · count)` particles, and the leftover slots go to the
    /// states with the largest fractional quotas (lowest index on ties).
    /// Deterministic — no randomness is involved.
    pub fn stratified_from_dense(belief: &DenseBelief, count: usize) -> Self {
        let n = belief.len();
        let mut allocation = vec![0usize; n];
        let mut fractions: Vec<(usize, f64)> = Vec::with_capacity(n);
        let mut assigned = 0usize;
        for s in 0..n {
            let quota = belief.prob(s) * count as f64;
            let floor = quota.floor() as usize;
            allocation[s] = floor;
            assigned += floor;
            fractions.push((s, quota - floor as f64));
        }
        // Largest fractional part first; ties broken toward the lower state
        // index. The sort is stable, so sorting on the fraction alone keeps
        // index order within ties.
        fractions.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        for &(s, _) in fractions.iter().take(count.saturating_sub(assigned)) {
            allocation[s] += 1;
        }

        let mut particles = Vec::with_capacity(count);
        for (s, &copies) in allocation.iter().enumerate() {
            particles.extend(std::iter::repeat(s).take(copies));
        }
        ParticleBelief { particles }
    }

    /// Number of particles.
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    /// True when the belief holds no particles.
    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// The raw particle states, in storage order.
    pub fn particles(&self) -> &[usize] {
        &self.particles
    }

    /// Draws a state uniformly from the particle set (every particle has
    /// equal weight between updates).
    pub fn sample_state(&self, rng: &mut dyn RngCore) -> usize {
        self.particles[uniform_index(rng, self.particles.len())]
    }

    /// Empirical state distribution over `num_states` states.
    pub fn state_frequencies(&self, num_states: usize) -> Vec<f64> {
        let mut freq = vec![0.0; num_states];
        let weight = 1.0 / self.particles.len() as f64;
        for &s in &self.particles {
            freq[s] += weight;
        }
        freq
    }

    /// Open-loop (prediction-only) update: every particle steps through the
    /// model's marginal transition, in storage order, and no reweighting
    /// happens because no observation is conditioned on.
    pub fn propagate_open(
        &mut self,
        model: &dyn GenerativeModel,
        action: usize,
        rng: &mut dyn RngCore,
    ) {
        for particle in &mut self.particles {
            let (next, _reward) = model.step_open(*particle, action, rng);
            *particle = next;
        }
    }

    /// Closed-loop SIR update conditioning on `observation`.
    ///
    /// Propagates every particle (in storage order), weights each successor
    /// by `model.observation_weight`, and systematically resamples back to
    /// an equal-weight set of the same size using one uniform offset.
    ///
    /// If the total successor weight falls below a small floor the
    /// observation is effectively impossible under this particle set; the
    /// update returns [`Error::ParticleDepletion`] and leaves `self` exactly
    /// as it was, so callers can still recover from the pre-update set.
    pub fn sir_update(
        &mut self,
        model: &dyn GenerativeModel,
        action: usize,
        observation: usize,
        rng: &mut dyn RngCore,
    ) -> Result<(), Error> {
        let n = self.particles.len();
        let mut successors = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut total = 0.0;
        for &particle in &self.particles {
            let (next, _reward) = model.step_open(particle, action, rng);
            let w = model.observation_weight(next, action, observation);
            successors.push(next);
            weights.push(w);
            total += w;
        }
        if total < MIN_OBSERVATION_PROB {
            return Err(Error::ParticleDepletion {
                action,
                observation,
                total_weight: total,
            });
        }

        // Systematic resampling: thresholds (k + u)/n over the cumulative
        // weights, one shared uniform offset u. Low variance, O(n), and a
        // single RNG draw.
        let offset = uniform_f64(rng);
        let mut resampled = Vec::with_capacity(n);
        let mut cumulative = weights[0];
        let mut index = 0;
        for k in 0..n {
            let target = (k as f64 + offset) / n as f64 * total;
            while cumulative <= target && index + 1 < n {
                index += 1;
                cumulative += weights[index];
            }
            resampled.push(successors[index]);
        }
        self.particles = resampled;
        Ok(())
    }
}
