#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "cgid/cgid.hpp"
#include "cgid/sem.hpp"

namespace cgid {

struct WitnessOptions {
    std::size_t restarts = 16;
    int hill_steps = 400;
    int lm_iterations = 150;
    std::uint64_t seed = 1;
    /// Checked between restarts; the search gives up once exceeded.
    double time_limit_seconds = 60.0;
    /// Restarts evaluated concurrently. Results do not depend on it.
    int threads = 1;
    int latent_card = 2;
    std::size_t state_budget = 1'000'000;
    /// Required agreement on every input table (max-norm).
    double agreement_tolerance = 1e-6;
    /// Required disagreement on the target at some realization.
    double min_gap = 0.02;
};

/// Result of recomputing a candidate pair from scratch.
struct WitnessCheck {
    double input_mismatch = 0.0;  // max_i ‖Q1[A_i] − Q2[A_i]‖∞
    double gap = 0.0;             // max |P1_x(y|z) − P2_x(y|z)|
    Assignment realization;       // where the gap is attained (x ∪ y ∪ z)
    double target_first = 0.0;
    double target_second = 0.0;
};

struct ModelPair {
    DiscreteSEM first;
    DiscreteSEM second;
    WitnessCheck check;
    std::size_t restart = 0;
};

WitnessCheck check_witness(const DiscreteSEM& first, const DiscreteSEM& second, const QSpec& spec,
                           const ConditionalQuery& q, std::size_t budget = kDefaultStateBudget);

/// Looks for two positive models that agree on every Q[A_i] but disagree on
/// P_x(y | z). Each restart draws a random first model, hill-climbs the
/// second one's tables on (target gap − penalty · input mismatch), then
/// polishes agreement with damped Gauss-Newton steps. A pair is returned
/// only after check_witness confirms both tolerances; nullopt proves
/// nothing.
std::optional<ModelPair> witness_search(const CausalGraph& g, const QSpec& spec, const ConditionalQuery& q,
                                        const WitnessOptions& options = {});

}  // namespace cgid
