#include "ico/causal_order.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ico/errors.hpp"

namespace ico {

namespace {

EventRecord event_from_coincidence(const Coincidence& c, int id, double tau) {
    EventRecord e;
    e.id = id;
    e.tau = tau;
    e.point = c.point;
    e.lambda0 = c.lambda0;
    e.lambda_other = c.lambda_other;
    e.residual = c.residual;
    return e;
}

} // namespace

BranchConfig build_branch(const MetricField& metric, const Worldline& gamma0,
                          const Worldline& gamma1, const Worldline& gamma2,
                          const NumericPolicy& policy) {
    if (metric.dim != gamma0.dim || metric.dim != gamma1.dim || metric.dim != gamma2.dim)
        throw ConfigError("build_branch: metric and curves must share one chart dimension");

    check_timelike(gamma0, metric);
    check_timelike(gamma1, metric);
    check_timelike(gamma2, metric);

    const auto c1 = detect_coincidences(gamma0, gamma1, policy.cross_tol, policy.grid);
    const auto c2 = detect_coincidences(gamma0, gamma2, policy.cross_tol, policy.grid);
    if (c1.size() != 1 || c2.size() != 1) {
        std::ostringstream os;
        os << "build_branch: expected exactly one crossing per system, found "
           << c1.size() << " with gamma1 and " << c2.size() << " with gamma2";
        throw ScenarioError(os.str());
    }

    for (const Coincidence* c : {&c1[0], &c2[0]}) {
        const Vec v0 = gamma0.velocity(c->lambda0);
        const Worldline& other = (c == &c1[0]) ? gamma1 : gamma2;
        const Vec vi = other.velocity(c->lambda_other);
        if (!orientation_sign(metric, c->point, v0, vi))
            throw ScenarioError("build_branch: system tangent not future-pointing at crossing");
    }

    const double tau1 =
        proper_time(gamma0, metric, gamma0.lambda_min, c1[0].lambda0, policy.quad_rel_tol);
    const double tau2 =
        proper_time(gamma0, metric, gamma0.lambda_min, c2[0].lambda0, policy.quad_rel_tol);

    const double delta_tau = tau2 - tau1;
    const double resolution = policy.degenerate_factor * policy.quad_rel_tol *
                              std::max({1.0, std::fabs(tau1), std::fabs(tau2)});
    if (std::fabs(delta_tau) < resolution)
        throw ScenarioError("build_branch: degenerate causal order, |delta_tau| below the "
                            "integrator's resolution");

    BranchConfig b{metric, gamma0, gamma1, gamma2,
                   event_from_coincidence(c1[0], 1, tau1),
                   event_from_coincidence(c2[0], 2, tau2), delta_tau,
                   delta_tau > 0 ? +1 : -1};
    return b;
}

BranchedScenario make_scenario(BranchConfig a, BranchConfig b, std::complex<double> alpha,
                               std::complex<double> beta) {
    const double n2 = std::norm(alpha) + std::norm(beta);
    if (std::fabs(n2 - 1.0) > 1e-12)
        throw ConfigError("make_scenario: amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
    return {std::move(a), std::move(b), alpha, beta};
}

int order_product(const BranchedScenario& sc) { return sc.branch_a.s * sc.branch_b.s; }

BranchedScenario apply_quantum_diffeo(const BranchedScenario& sc, const Diffeomorphism& phi_a,
                                      const Diffeomorphism& phi_b,
                                      const NumericPolicy& policy) {
    auto transform = [&](const BranchConfig& br, const Diffeomorphism& phi) {
        const MetricField g = pushforward_metric(phi, br.metric);
        return build_branch(g, pushforward_curve(phi, br.gamma0),
                            pushforward_curve(phi, br.gamma1),
                            pushforward_curve(phi, br.gamma2), policy);
    };
    BranchedScenario out;
    out.branch_a = transform(sc.branch_a, phi_a);
    out.branch_b = transform(sc.branch_b, phi_b);
    out.alpha = sc.alpha;
    out.beta = sc.beta;
    return out;
}

namespace {

double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
    const Vec ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 < 1e-30) return norm(p - a);
    double f = dot(p - a, ab) / len2;
    f = std::min(1.0, std::max(0.0, f));
    return norm(p - (a + f * ab));
}

} // namespace

AlignmentMaps align_events(const BranchedScenario& sc) {
    const int dim = sc.branch_a.metric.dim;
    const Vec pa1 = sc.branch_a.event1.point;
    const Vec pa2 = sc.branch_a.event2.point;
    const Vec pb1 = sc.branch_b.event1.point;
    const Vec pb2 = sc.branch_b.event2.point;

    Diffeomorphism phi_b = identity_diffeo(dim);
    bool have_map = false;

    const Vec shift = pa1 - pb1;
    if (norm(shift) > 1e-9) {
        phi_b = translation_diffeo(shift);
        have_map = true;
    }

    const Vec moved_e2 = pb2 + shift;
    const Vec residual = pa2 - moved_e2;
    if (norm(residual) > 1e-9) {
        const double clearance = dist_point_segment(pa1, moved_e2, pa2);
        if (clearance < 1e-6)
            throw ConstructionError("align_events: second-event deformation would overlap the "
                                    "aligned first event");
        const double radius = 0.8 * clearance;
        if (norm(pa1 - pa2) < 2.0 * radius && norm(pa1 - pa2) < norm(residual))
            throw ConstructionError("align_events: events closer than the deformation scale");

        const double amp_cap = 0.5 * radius / kBumpMaxSlope;
        const int steps = static_cast<int>(std::ceil(norm(residual) / amp_cap));
        const Vec step = (1.0 / steps) * residual;
        for (int k = 0; k < steps; ++k) {
            const Vec center = moved_e2 + static_cast<double>(k) * step;
            const Diffeomorphism nudge = bump_translation(center, step, radius);
            phi_b = have_map ? compose(nudge, phi_b) : nudge;
            have_map = true;
        }
    }

    return {identity_diffeo(dim), phi_b};
}

ReparametrizationReport reparametrization_no_go_check(const BranchedScenario& sc) {
    if (order_product(sc) != -1)
        throw ProtocolError("reparametrization_no_go_check: not applicable, scenario has "
                            "definite causal order");
    ReparametrizationReport r;
    r.delta = sc.branch_a.event1.tau - sc.branch_b.event1.tau;
    r.tau_star = sc.branch_a.event1.tau;
    r.tau2_a = sc.branch_a.event2.tau;
    r.tau2_b_shifted = sc.branch_b.event2.tau + r.delta;
    r.straddles = (r.tau2_a - r.tau_star) * (r.tau2_b_shifted - r.tau_star) < 0;
    return r;
}

ChartBox scenario_bbox(const BranchedScenario& sc, int samples) {
    ChartBox box;
    for (const BranchConfig* br : {&sc.branch_a, &sc.branch_b})
        for (const Worldline* w : {&br->gamma0, &br->gamma1, &br->gamma2})
            for (int k = 0; k <= samples; ++k) {
                const double lambda =
                    w->lambda_min + (w->lambda_max - w->lambda_min) * k / samples;
                box.expand(w->position(lambda));
            }
    return box;
}

DiffeoSampler::DiffeoSampler(int dim, const ChartBox& domain, std::uint64_t seed)
    : dim_(dim), domain_(domain), rng_(seed) {
    domain_.inflate(0.2 * domain_.scale() + 0.5);
}

Diffeomorphism DiffeoSampler::draw_primitive() {
    std::uniform_int_distribution<int> kind_dist(0, 4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int kind = kind_dist(rng_);
    switch (kind) {
        case 0: {
            Vec offset = Vec::zero(dim_);
            for (int i = 0; i < dim_; ++i) offset[i] = 6.0 * (unit(rng_) - 0.5);
            return translation_diffeo(offset);
        }
        case 1: {
            std::uniform_int_distribution<int> axis_dist(1, dim_ - 1);
            return boost_diffeo(dim_, 1.2 * (unit(rng_) - 0.5), axis_dist(rng_));
        }
        case 2: {
            std::uniform_int_distribution<int> axis_dist(0, dim_ - 1);
            int ta = axis_dist(rng_);
            int sa = axis_dist(rng_);
            if (sa == ta) sa = (sa + 1) % dim_;
            const double freq = 0.2 + 2.0 * unit(rng_);
            const double amp = (0.05 + 0.3 * unit(rng_)) / freq;
            return sin_shear_diffeo(dim_, ta, sa, amp, freq, 2.0 * M_PI * unit(rng_));
        }
        case 3: {
            const Vec center = domain_.sample(rng_);
            const double radius = (0.1 + 0.3 * unit(rng_)) * domain_.scale();
            Vec offset = Vec::zero(dim_);
            double len = 0;
            for (int i = 0; i < dim_; ++i) {
                offset[i] = unit(rng_) - 0.5;
                len += offset[i] * offset[i];
            }
            len = std::sqrt(len);
            const double amp = 0.4 * radius / kBumpMaxSlope * unit(rng_);
            offset *= (len > 1e-12 ? amp / len : 0.0);
            return bump_translation(center, offset, radius);
        }
        default: {
            const Vec center = domain_.sample(rng_);
            const double radius = (0.1 + 0.3 * unit(rng_)) * domain_.scale();
            Mat m = Mat::identity(dim_);
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j) m.at(i, j) += 0.1 * (unit(rng_) - 0.5);
            return make_bump_localized(linear_diffeo(m, center, "core"), center, radius);
        }
    }
}

Diffeomorphism DiffeoSampler::draw() {
    std::uniform_int_distribution<int> count_dist(1, 3);
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            const int count = count_dist(rng_);
            Diffeomorphism phi = draw_primitive();
            for (int k = 1; k < count; ++k) phi = compose(draw_primitive(), phi);

            std::vector<Vec> probes;
            for (int k = 0; k < 24; ++k) probes.push_back(domain_.sample(rng_));
            check_diffeo_on_samples(phi, probes);
            return phi;
        } catch (const ConstructionError&) {
            continue; // redraw
        }
    }
    throw ConstructionError("DiffeoSampler: failed to produce a certified map");
}

SweepResult run_invariance_sweep(const BranchedScenario& sc, int trials, std::uint64_t seed,
                                 const NumericPolicy& policy, double tau_rel_tol) {
    const auto t_start = std::chrono::steady_clock::now();

    SweepResult result;
    result.trials = trials;
    result.seed = seed;

    const ChartBox box = scenario_bbox(sc);
    std::mt19937_64 master(seed);
    std::vector<std::uint64_t> trial_seeds;
    for (int t = 0; t < trials; ++t) trial_seeds.push_back(master());

    const double base_tau[4] = {sc.branch_a.event1.tau, sc.branch_a.event2.tau,
                                sc.branch_b.event1.tau, sc.branch_b.event2.tau};
    const int base_product = order_product(sc);

    for (int t = 0; t < trials; ++t) {
        bool pass = true;
        std::string note;
        try {
            DiffeoSampler sampler_a(sc.branch_a.metric.dim, box, trial_seeds[t]);
            DiffeoSampler sampler_b(sc.branch_b.metric.dim, box, trial_seeds[t] ^ 0x9e3779b97f4a7c15ULL);
            const BranchedScenario mapped =
                apply_quantum_diffeo(sc, sampler_a.draw(), sampler_b.draw(), policy);

            const double tau[4] = {mapped.branch_a.event1.tau, mapped.branch_a.event2.tau,
                                   mapped.branch_b.event1.tau, mapped.branch_b.event2.tau};
            for (int i = 0; i < 4; ++i) {
                const double dev =
                    std::fabs(tau[i] - base_tau[i]) / std::max(1.0, std::fabs(base_tau[i]));
                result.max_rel_tau_dev = std::max(result.max_rel_tau_dev, dev);
                if (dev > tau_rel_tol) pass = false;
            }
            if (mapped.branch_a.s != sc.branch_a.s || mapped.branch_b.s != sc.branch_b.s) {
                result.s_constant = false;
                pass = false;
            }
            if (order_product(mapped) != base_product) {
                result.product_constant = false;
                pass = false;
            }
        } catch (const Error& e) {
            pass = false;
            note = e.what();
        }
        if (pass)
            ++result.passes;
        else if (result.first_failure.empty())
            result.first_failure = note.empty() ? "invariance violated" : note;
    }

    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

} // namespace ico
