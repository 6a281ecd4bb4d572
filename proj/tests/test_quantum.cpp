#include <cmath>
#include <complex>

#include "doctest.h"
#include "ico/errors.hpp"
#include "ico/quantum.hpp"
#include "ico/scenarios.hpp"
#include "support/oracles.hpp"

using namespace ico;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QuantumState lone_spin(const std::array<Complex, 2>& amps) {
    QuantumState s = make_state({make_register(RegisterRole::Spin, {0.0, 1.0})});
    s.amplitudes[0] = amps[0];
    s.amplitudes[1] = amps[1];
    return s;
}

// Expected |psi3> for an indefinite scenario, assembled from the displayed
// final state with the library's register layout but none of its machinery.
QuantumState expected_psi3(const BranchedScenario& sc, double tau1, double tau2, double omega) {
    std::vector<LabeledRegister> regs;
    regs.push_back(make_register(RegisterRole::Control, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::MetricLabel, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::Memory1, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Memory2, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Spin, {0.0, 1.0}));
    QuantumState s = make_state(regs);

    // b2 = exp(-i omega tau2 sigma_z / 2) b0 with b0 back-evolved from |+x>.
    const std::array<Complex, 2> b1{kInvSqrt2, kInvSqrt2};
    const std::array<Complex, 2> b0 = oracle::spin_rotation_z(b1, -omega * tau1);
    const std::array<Complex, 2> b2 = oracle::spin_rotation_z(b0, omega * tau2);

    const int i1 = s.registers[2].index_of(tau1);
    const int i2 = s.registers[2].index_of(tau2);
    const bool a_first_is_1 = sc.branch_a.event1.tau < sc.branch_a.event2.tau;
    const int a_m1 = a_first_is_1 ? i1 : i2;
    const int a_m2 = a_first_is_1 ? i2 : i1;
    for (int k = 0; k < 2; ++k) {
        s.amplitudes[s.flat_index({0, 0, a_m1, a_m2, k})] = sc.alpha * b2[k];
        s.amplitudes[s.flat_index({1, 1, a_m2, a_m1, k})] = sc.beta * b2[k];
    }
    return s;
}

} // namespace

TEST_CASE("spin_evolve: identity at delta_tau = 0, minus one at a full turn") {
    const QuantumState plus_x = lone_spin({kInvSqrt2, kInvSqrt2});
    CHECK(max_amplitude_diff(spin_evolve(plus_x, 0.0, 1.3), plus_x) < 1e-15);

    // omega delta_tau = 2 pi: back to |+x| up to the global phase -1
    const QuantumState full = spin_evolve(plus_x, 2.0 * M_PI, 1.0);
    CHECK(std::abs(full.amplitudes[0] + plus_x.amplitudes[0]) < 1e-12);
    CHECK(std::abs(full.amplitudes[1] + plus_x.amplitudes[1]) < 1e-12);
}

TEST_CASE("spin_evolve: half turn sends |+x> to |-x>, matching the 2x2 oracle") {
    const QuantumState plus_x = lone_spin({kInvSqrt2, kInvSqrt2});
    const QuantumState half = spin_evolve(plus_x, M_PI, 1.0);
    const auto expect = oracle::spin_rotation_z({kInvSqrt2, kInvSqrt2}, M_PI);
    CHECK(std::abs(half.amplitudes[0] - expect[0]) < 1e-12);
    CHECK(std::abs(half.amplitudes[1] - expect[1]) < 1e-12);
    // orthogonal to b1 as the protocol requires
    const Complex overlap = std::conj(kInvSqrt2) * half.amplitudes[0] +
                            std::conj(kInvSqrt2) * half.amplitudes[1];
    CHECK(std::abs(overlap) < 1e-12);
    // and proportional to |-x>
    CHECK(std::abs(half.amplitudes[0] + half.amplitudes[1]) < 1e-12);
}

TEST_CASE("spin_evolve preserves the norm") {
    QuantumState s = lone_spin({Complex{0.3, 0.4}, Complex{-0.5, std::sqrt(0.5)}});
    for (double dt : {0.1, 1.7, 12.0}) CHECK(std::fabs(spin_evolve(s, dt, 2.1).norm() - 1.0) < 1e-12);
}

TEST_CASE("protocol on a single branch produces a product state") {
    const BranchedScenario sc = superposed_paths_switch({}, 1.0, 0.0);
    const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));
    const QuantumState expect = expected_psi3(sc, tr.tau1_star, tr.tau2_star, tr.omega);
    CHECK(max_amplitude_diff(tr.psi3, expect) < 1e-12);
    CHECK(std::fabs(tr.psi3.norm() - 1.0) < 1e-12);
}

TEST_CASE("protocol matches the displayed psi2 and psi3 for a balanced superposition") {
    const BranchedScenario sc = superposed_paths_switch({}, kInvSqrt2, kInvSqrt2);
    const double omega = omega_for_pi(sc);
    const ProtocolTrace tr = run_switch_protocol_trace(sc, omega);
    CHECK(tr.spin_orthogonal);

    // psi2: first lab entered at tau1* in both branches, spin in b1
    QuantumState psi2_expect = tr.psi2; // same registers
    for (Complex& a : psi2_expect.amplitudes) a = Complex{0, 0};
    const int i0 = tr.psi2.registers[2].index_of(0.0);
    const int i1 = tr.psi2.registers[2].index_of(tr.tau1_star);
    const Complex b1k{kInvSqrt2, 0}; // both components of b1 = |+x>
    for (int k = 0; k < 2; ++k) {
        psi2_expect.amplitudes[psi2_expect.flat_index({0, 0, i1, i0, k})] = sc.alpha * b1k;
        psi2_expect.amplitudes[psi2_expect.flat_index({1, 1, i0, i1, k})] = sc.beta * b1k;
    }
    CHECK(max_amplitude_diff(tr.psi2, psi2_expect) < 1e-12);

    const QuantumState psi3_expect = expected_psi3(sc, tr.tau1_star, tr.tau2_star, omega);
    CHECK(max_amplitude_diff(tr.psi3, psi3_expect) < 1e-12);
}

TEST_CASE("protocol on a definite scenario factors spin and memories") {
    const BranchedScenario sc = definite_control({}, 0.6, Complex{0.0, 0.8});
    const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));

    // both branches record identical memories: reduced memory states are pure
    const int m1 = tr.psi3.register_index(RegisterRole::Memory1);
    const int m2 = tr.psi3.register_index(RegisterRole::Memory2);
    CHECK(reduced_density(tr.psi3, m1).purity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(reduced_density(tr.psi3, m2).purity() == doctest::Approx(1.0).epsilon(1e-12));

    // referee output: |s=+1> on memory1, sum label on memory2
    const QuantumState ref = tr.referee_out;
    const double delta = tr.tau2_star - tr.tau1_star;
    const int want = ref.registers[m1].index_of(delta);
    double weight = 0;
    for (int i = 0; i < ref.dim(); ++i) {
        const auto digits = ref.digits_of(i);
        if (digits[m1] == want) weight += std::norm(ref.amplitudes[i]);
    }
    CHECK(weight == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("protocol on a reversed-definite scenario lands on the s = -1 pole") {
    // both branches meet agent 2 first
    const MetricField flat = minkowski_metric(2);
    const Worldline g0 = static_worldline(2, Vec{0.0}, 0.0, 4.0, CurveRole::TestParticle);
    const Worldline g1 = uniform_worldline(2, Vec{-1.0}, Vec{0.5}, 0.0, 4.0, CurveRole::System1);
    const Worldline g2 = uniform_worldline(2, Vec{-0.5}, Vec{0.5}, 0.0, 4.0, CurveRole::System2);
    const BranchConfig reversed = build_branch(flat, g0, g1, g2);
    REQUIRE(reversed.s == -1);
    const BranchedScenario sc = make_scenario(reversed, reversed, kInvSqrt2, kInvSqrt2);

    const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));
    const Postselection ps = postselect_order_qubit(tr.referee_out);
    const BlochVector b = tomography(ps.order_qubit);
    CHECK(b.z == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(classify_order(b) == OrderClass::DefiniteOrder);
}

TEST_CASE("protocol refuses scenarios violating the timing idealization") {
    // two definite branches with different crossing proper times
    const MetricField flat = minkowski_metric(2);
    const Worldline lab1 = static_worldline(2, Vec{1.0}, 0.0, 8.0, CurveRole::System1);
    const Worldline lab2 = static_worldline(2, Vec{-1.0}, 0.0, 8.0, CurveRole::System2);
    auto branch_with_speed = [&](double reach) {
        const double speed = reach / 3.0;
        const Worldline g0 =
            uniform_worldline(2, Vec{reach}, Vec{-speed}, 0.0, 6.0, CurveRole::TestParticle);
        return build_branch(flat, g0, lab1, lab2);
    };
    const BranchedScenario sc =
        make_scenario(branch_with_speed(2.0), branch_with_speed(2.2), kInvSqrt2, kInvSqrt2);
    CHECK_THROWS_AS(run_switch_protocol(sc, 1.0), ProtocolError);
}

TEST_CASE("untuned omega leaves spin and memory entangled") {
    const BranchedScenario sc = superposed_paths_switch({}, kInvSqrt2, kInvSqrt2);
    const ProtocolTrace tuned = run_switch_protocol_trace(sc, omega_for_pi(sc));
    CHECK(tuned.spin_orthogonal);
    const int spin = tuned.psi3.register_index(RegisterRole::Spin);
    CHECK(reduced_density(tuned.psi3, spin).purity() == doctest::Approx(1.0).epsilon(1e-12));

    const ProtocolTrace off = run_switch_protocol_trace(sc, 0.7 * omega_for_pi(sc));
    CHECK_FALSE(off.spin_orthogonal);
    CHECK(reduced_density(off.psi3, spin).purity() < 1.0 - 1e-3);
}

TEST_CASE("referee relabels the four memory pairs injectively") {
    const double tau1 = 1.25, tau2 = 3.5;
    std::vector<LabeledRegister> regs;
    regs.push_back(make_register(RegisterRole::Control, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::MetricLabel, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::Memory1, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Memory2, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Spin, {0.0, 1.0}));

    // displayed examples: |t1>|t2> -> |t2-t1>|t1+t2>, |t2>|t1> -> |t1-t2>|t2+t1>
    auto image_of = [&](double a, double b) {
        QuantumState s = make_state(regs);
        s.amplitudes[s.flat_index({0, 0, s.registers[2].index_of(a),
                                   s.registers[3].index_of(b), 0})] = 1.0;
        const QuantumState out = referee_transform(s);
        for (int i = 0; i < out.dim(); ++i)
            if (std::abs(out.amplitudes[i]) > 0.5) return out.digits_of(i);
        return std::vector<int>{};
    };

    const auto img12 = image_of(tau1, tau2);
    QuantumState probe = referee_transform(make_state(regs));
    CHECK(probe.registers[2].labels[img12[2]] == doctest::Approx(tau2 - tau1));
    CHECK(probe.registers[3].labels[img12[3]] == doctest::Approx(tau1 + tau2));
    const auto img21 = image_of(tau2, tau1);
    CHECK(probe.registers[2].labels[img21[2]] == doctest::Approx(tau1 - tau2));
    CHECK(probe.registers[3].labels[img21[3]] == doctest::Approx(tau2 + tau1));

    // enumeration: all four pairs map to distinct outputs
    std::vector<std::vector<int>> images;
    for (double a : {tau1, tau2})
        for (double b : {tau1, tau2}) images.push_back(image_of(a, b));
    for (size_t i = 0; i < images.size(); ++i)
        for (size_t j = i + 1; j < images.size(); ++j) CHECK(images[i] != images[j]);
}

TEST_CASE("property: referee is an isometry on the populated subspace") {
    const double tau1 = 0.75, tau2 = 2.0;
    std::vector<LabeledRegister> regs;
    regs.push_back(make_register(RegisterRole::Control, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::MetricLabel, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::Memory1, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Memory2, {0.0, tau1, tau2}));
    regs.push_back(make_register(RegisterRole::Spin, {0.0, 1.0}));

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        // random state supported on memory labels {tau1, tau2} x {tau1, tau2}
        QuantumState s = make_state(regs);
        for (int i = 0; i < s.dim(); ++i) {
            const auto d = s.digits_of(i);
            if (d[2] == 0 || d[3] == 0) continue;
            s.amplitudes[i] = Complex{u(rng), u(rng)};
        }
        const double n = s.norm();
        for (Complex& a : s.amplitudes) a /= n;

        const QuantumState out = referee_transform(s);
        CHECK(std::fabs(out.norm() - 1.0) < 1e-12);

        // linearity against a second state
        QuantumState t = make_state(regs);
        t.amplitudes[t.flat_index({0, 0, 1, 2, 0})] = Complex{M_SQRT1_2, 0};
        t.amplitudes[t.flat_index({1, 1, 2, 1, 1})] = Complex{0, M_SQRT1_2};
        QuantumState mix = make_state(regs);
        for (int i = 0; i < mix.dim(); ++i)
            mix.amplitudes[i] = 0.6 * s.amplitudes[i] + 0.8 * t.amplitudes[i];
        const QuantumState out_mix = referee_transform(mix);
        const QuantumState out_t = referee_transform(t);
        double worst = 0;
        for (int i = 0; i < out_mix.dim(); ++i)
            worst = std::max(worst, std::abs(out_mix.amplitudes[i] - 0.6 * out.amplitudes[i] -
                                             0.8 * out_t.amplitudes[i]));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("referee rejects unpopulated memories") {
    std::vector<LabeledRegister> regs;
    regs.push_back(make_register(RegisterRole::Control, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::MetricLabel, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::Memory1, {0.0, 1.0, 2.0}));
    regs.push_back(make_register(RegisterRole::Memory2, {0.0, 1.0, 2.0}));
    regs.push_back(make_register(RegisterRole::Spin, {0.0, 1.0}));
    QuantumState s = make_state(regs);
    s.amplitudes[s.flat_index({0, 0, 0, 1, 0})] = 1.0; // memory1 still blank
    CHECK_THROWS_AS(referee_transform(s), ProtocolError);
}

TEST_CASE("postselection on |phi+> reproduces Eq.-style order qubits") {
    auto run_case = [&](Complex alpha, Complex beta) {
        const BranchedScenario sc = superposed_paths_switch({}, alpha, beta);
        const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));
        return postselect_order_qubit(tr.referee_out, alpha, beta);
    };

    // alpha = 1: pure |s=+1><s=+1|
    const Postselection lone = run_case(1.0, 0.0);
    CHECK(std::abs(lone.order_qubit.at(0, 0) - Complex{1, 0}) < 1e-12);
    CHECK(std::abs(lone.order_qubit.at(1, 1)) < 1e-12);

    // balanced: Bloch (1, 0, 0); success probability exactly one half
    const Postselection bal = run_case(kInvSqrt2, kInvSqrt2);
    CHECK(bal.probability == doctest::Approx(0.5).epsilon(1e-12));
    const BlochVector bb = tomography(bal.order_qubit);
    CHECK(bb.x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(bb.y) < 1e-10);
    CHECK(std::fabs(bb.z) < 1e-10);

    // alpha = 1/sqrt2, beta = i/sqrt2: Bloch (0, 1, 0)
    const Postselection imag = run_case(kInvSqrt2, Complex{0, kInvSqrt2});
    CHECK(imag.probability == doctest::Approx(0.5).epsilon(1e-12));
    const BlochVector bi = tomography(imag.order_qubit);
    CHECK(std::fabs(bi.x) < 1e-10);
    CHECK(bi.y == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(bi.z) < 1e-10);
}

TEST_CASE("postselection failure on the orthogonal control-metric state") {
    // definite order with alpha = -beta puts all weight on |phi->
    const BranchedScenario sc = definite_control({}, kInvSqrt2, -kInvSqrt2);
    const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));
    CHECK_THROWS_AS(postselect_order_qubit(tr.referee_out), ProtocolError);
}

TEST_CASE("tomography on eigenstates and the maximally mixed state") {
    DensityMatrix rho;
    rho.dim = 2;
    rho.m = {Complex{1, 0}, 0, 0, Complex{0, 0}};
    BlochVector b = tomography(rho);
    CHECK(b.x == doctest::Approx(0.0));
    CHECK(b.z == doctest::Approx(1.0));

    rho.m = {Complex{0.5, 0}, 0, 0, Complex{0.5, 0}};
    b = tomography(rho);
    CHECK(b.length() < 1e-15);

    rho.m = {Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}, Complex{0.5, 0}};
    b = tomography(rho);
    CHECK(b.x == doctest::Approx(1.0));
    CHECK(std::fabs(b.y) < 1e-15);
    CHECK(std::fabs(b.z) < 1e-15);
}

TEST_CASE("sampled tomography converges towards the exact expectations") {
    DensityMatrix rho = density_from_pure({Complex{0.8, 0.0}, Complex{0.0, 0.6}});
    const BlochVector exact = tomography(rho);
    const BlochVector est = tomography_sampled(rho, 2000000, 99);
    CHECK(std::fabs(est.x - exact.x) < 5e-3);
    CHECK(std::fabs(est.y - exact.y) < 5e-3);
    CHECK(std::fabs(est.z - exact.z) < 5e-3);
}

TEST_CASE("classifier maps the four canonical Bloch points correctly") {
    CHECK(classify_order({0, 0, 1}) == OrderClass::DefiniteOrder);
    CHECK(classify_order({0, 0, -1}) == OrderClass::DefiniteOrder);
    CHECK(classify_order({0, 0, 0.3}) == OrderClass::ClassicalMixture);
    CHECK(classify_order({1, 0, 0}) == OrderClass::PureIndefinite);
    CHECK(classify_order({0.3, 0, 0.2}) == OrderClass::MixedIndefinite);
    CHECK_THROWS_AS(classify_order({1.2, 0, 0.4}), ProtocolError);
}

TEST_CASE("z-tomography alone cannot split mixtures from superpositions") {
    DensityMatrix mixture;
    mixture.dim = 2;
    mixture.m = {Complex{0.5, 0}, 0, 0, Complex{0.5, 0}};
    const DensityMatrix pure = density_from_pure({kInvSqrt2, kInvSqrt2});

    const BlochVector bm = tomography(mixture);
    const BlochVector bp = tomography(pure);
    CHECK(bm.z == doctest::Approx(bp.z).epsilon(1e-12)); // identical z statistics
    CHECK(classify_order(bm) == OrderClass::ClassicalMixture);
    CHECK(classify_order(bp) == OrderClass::PureIndefinite); // x/y split them
}

TEST_CASE("property: protocol output is invariant under quantum diffeomorphisms") {
    const BranchedScenario sc =
        superposed_paths_switch({}, kInvSqrt2, std::polar(kInvSqrt2, 1.05));
    const ProtocolTrace base = run_switch_protocol_trace(sc, omega_for_pi(sc));

    DiffeoSampler sampler_a(2, scenario_bbox(sc), 71);
    DiffeoSampler sampler_b(2, scenario_bbox(sc), 72);
    for (int trial = 0; trial < 5; ++trial) {
        const BranchedScenario mapped =
            apply_quantum_diffeo(sc, sampler_a.draw(), sampler_b.draw());
        const ProtocolTrace tr = run_switch_protocol_trace(mapped, base.omega);
        CHECK(max_amplitude_diff(tr.psi3, base.psi3) < 1e-9);
    }
}

TEST_CASE("property: indefinite scenarios with two live amplitudes never classify definite") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(0.15, 0.85);
    for (int trial = 0; trial < 8; ++trial) {
        const double w = u(rng);
        const double phase = 2.0 * M_PI * u(rng);
        const Complex alpha{std::sqrt(w), 0};
        const Complex beta = std::polar(std::sqrt(1.0 - w), phase);
        const BranchedScenario sc = superposed_paths_switch({}, alpha, beta);
        const ProtocolTrace tr = run_switch_protocol_trace(sc, omega_for_pi(sc));
        const Postselection ps = postselect_order_qubit(tr.referee_out);
        CHECK(classify_order(tomography(ps.order_qubit)) != OrderClass::DefiniteOrder);
    }
}
