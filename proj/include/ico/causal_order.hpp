#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "ico/worldlines.hpp"

namespace ico {

// Numerical knobs shared across the scenario machinery.
struct NumericPolicy {
    double quad_rel_tol = 1e-9;
    double cross_tol = 1e-8; // eps_cross
    int grid = 192;
    double degenerate_factor = 10.0; // reject |delta_tau| < factor * quad tol * scale
};

struct EventRecord {
    int id = 0; // 1 = crossing with gamma1, 2 = crossing with gamma2
    double tau = 0;
    Vec point;
    double lambda0 = 0;
    double lambda_other = 0;
    double residual = 0;
};

// One classical branch: metric, the three curves, the two detected events,
// and the causal-order sign s = sign(tau2 - tau1).
struct BranchConfig {
    MetricField metric;
    Worldline gamma0, gamma1, gamma2;
    EventRecord event1, event2;
    double delta_tau = 0;
    int s = 0;
};

struct BranchedScenario {
    BranchConfig branch_a, branch_b;
    std::complex<double> alpha{1.0, 0.0}, beta{0.0, 0.0};
};

// Validates the input (timelike curves, exactly one crossing per system,
// orientation) and fills in events, delta_tau and s. Throws ScenarioError.
BranchConfig build_branch(const MetricField& metric, const Worldline& gamma0,
                          const Worldline& gamma1, const Worldline& gamma2,
                          const NumericPolicy& policy = {});

BranchedScenario make_scenario(BranchConfig a, BranchConfig b, std::complex<double> alpha,
                               std::complex<double> beta);

// s^A s^B: +1 definite, -1 indefinite.
int order_product(const BranchedScenario& sc);

// Pushforward of each branch (metric and all three curves) through its own
// map; events re-detected from scratch; amplitudes unchanged.
BranchedScenario apply_quantum_diffeo(const BranchedScenario& sc, const Diffeomorphism& phi_a,
                                      const Diffeomorphism& phi_b,
                                      const NumericPolicy& policy = {});

struct AlignmentMaps {
    Diffeomorphism phi_a, phi_b;
};

// Maps mapping each branch's event points onto shared targets (branch A's
// points): phi_a = identity, phi_b = rigid translation plus a chain of
// bump-localized translations. Throws ConstructionError when the deformation
// would disturb the already-aligned event.
AlignmentMaps align_events(const BranchedScenario& sc);

struct ReparametrizationReport {
    double delta = 0;            // shift applied to branch B's clock
    double tau_star = 0;         // common tau_1 after the shift
    double tau2_a = 0;           // branch A's tau_2
    double tau2_b_shifted = 0;   // branch B's tau_2 + delta
    bool straddles = false;      // tau2 values on strictly opposite sides of tau_star
};

// Aligns tau_1 across branches by a clock shift and reports where the tau_2
// values land. Requires an indefinite scenario; throws ProtocolError otherwise.
ReparametrizationReport reparametrization_no_go_check(const BranchedScenario& sc);

ChartBox scenario_bbox(const BranchedScenario& sc, int samples = 64);

// Randomized diffeomorphisms: compositions of translations, boosts,
// sinusoidal shears and bump-localized deformations sized to the scenario's
// chart region, each draw certified invertible.
class DiffeoSampler {
  public:
    DiffeoSampler(int dim, const ChartBox& domain, std::uint64_t seed);
    Diffeomorphism draw();

  private:
    Diffeomorphism draw_primitive();
    int dim_;
    ChartBox domain_;
    std::mt19937_64 rng_;
};

struct SweepResult {
    int trials = 0;
    int passes = 0;
    std::uint64_t seed = 0;
    double max_rel_tau_dev = 0;
    bool s_constant = true;
    bool product_constant = true;
    double seconds = 0;
    std::string first_failure;
};

// Applies `trials` independent random diffeomorphism pairs and checks that
// per-branch proper times (relative 1e-6), signs and the order product are
// invariant. Deterministic for a fixed seed.
SweepResult run_invariance_sweep(const BranchedScenario& sc, int trials, std::uint64_t seed,
                                 const NumericPolicy& policy = {}, double tau_rel_tol = 1e-6);

} // namespace ico
