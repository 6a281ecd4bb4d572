#include "ico/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ico/errors.hpp"

namespace ico {

namespace {
constexpr double kLabelMatchTol = 1e-10;
constexpr double kLabelSeparation = 1e-9;
constexpr double kAmplitudeLeakTol = 1e-12;
} // namespace

const char* register_role_name(RegisterRole role) {
    switch (role) {
        case RegisterRole::Control: return "control";
        case RegisterRole::MetricLabel: return "metric_label";
        case RegisterRole::Spin: return "spin";
        case RegisterRole::Memory1: return "memory1";
        case RegisterRole::Memory2: return "memory2";
    }
    return "?";
}

int LabeledRegister::index_of(double label) const {
    for (size_t i = 0; i < labels.size(); ++i)
        if (std::fabs(labels[i] - label) <= kLabelMatchTol) return static_cast<int>(i);
    std::ostringstream os;
    os << "register " << register_role_name(role) << ": no basis state with label " << label;
    throw ProtocolError(os.str());
}

LabeledRegister make_register(RegisterRole role, std::vector<double> labels) {
    std::sort(labels.begin(), labels.end());
    for (size_t i = 0; i + 1 < labels.size(); ++i)
        if (labels[i + 1] - labels[i] <= kLabelSeparation)
            throw ProtocolError("make_register: labels closer than the orthogonality separation");
    return {role, std::move(labels)};
}

double QuantumState::norm() const {
    double s = 0;
    for (const Complex& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

int QuantumState::register_index(RegisterRole role) const {
    for (size_t i = 0; i < registers.size(); ++i)
        if (registers[i].role == role) return static_cast<int>(i);
    return -1;
}

int QuantumState::flat_index(const std::vector<int>& digits) const {
    int flat = 0;
    for (size_t r = 0; r < registers.size(); ++r) flat = flat * registers[r].dim() + digits[r];
    return flat;
}

std::vector<int> QuantumState::digits_of(int flat) const {
    std::vector<int> digits(registers.size());
    for (size_t r = registers.size(); r-- > 0;) {
        digits[r] = flat % registers[r].dim();
        flat /= registers[r].dim();
    }
    return digits;
}

QuantumState make_state(std::vector<LabeledRegister> registers) {
    int dim = 1;
    for (const LabeledRegister& r : registers) dim *= r.dim();
    QuantumState s;
    s.registers = std::move(registers);
    s.amplitudes.assign(static_cast<size_t>(dim), Complex{0, 0});
    return s;
}

double max_amplitude_diff(const QuantumState& x, const QuantumState& y) {
    if (x.dim() != y.dim())
        throw ProtocolError("max_amplitude_diff: register shapes differ");
    double worst = 0;
    for (int i = 0; i < x.dim(); ++i)
        worst = std::max(worst, std::abs(x.amplitudes[i] - y.amplitudes[i]));
    return worst;
}

double DensityMatrix::trace_real() const {
    double t = 0;
    for (int i = 0; i < dim; ++i) t += at(i, i).real();
    return t;
}

double DensityMatrix::purity() const {
    double p = 0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) p += std::real(at(i, j) * at(j, i));
    return p;
}

DensityMatrix density_from_pure(const std::vector<Complex>& amps) {
    DensityMatrix rho;
    rho.dim = static_cast<int>(amps.size());
    rho.m.resize(amps.size() * amps.size());
    for (int i = 0; i < rho.dim; ++i)
        for (int j = 0; j < rho.dim; ++j) rho.at(i, j) = amps[i] * std::conj(amps[j]);
    return rho;
}

void check_density(const DensityMatrix& rho, double tol) {
    for (int i = 0; i < rho.dim; ++i)
        for (int j = 0; j < rho.dim; ++j)
            if (std::abs(rho.at(i, j) - std::conj(rho.at(j, i))) > tol)
                throw ProtocolError("check_density: matrix not Hermitian");
    if (std::fabs(rho.trace_real() - 1.0) > tol)
        throw ProtocolError("check_density: trace differs from one");
    if (rho.dim == 2) {
        // eigenvalues of a Hermitian 2x2 in closed form
        const double tr = rho.trace_real();
        const double d = std::real(rho.at(0, 0) * rho.at(1, 1) - rho.at(0, 1) * rho.at(1, 0));
        const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * d));
        if (0.5 * (tr - disc) < -1e-10)
            throw ProtocolError("check_density: negative eigenvalue");
    }
}

double BlochVector::length() const { return std::sqrt(x * x + y * y + z * z); }

const char* order_class_name(OrderClass c) {
    switch (c) {
        case OrderClass::DefiniteOrder: return "definite";
        case OrderClass::ClassicalMixture: return "classical_mixture";
        case OrderClass::PureIndefinite: return "pure_indefinite";
        case OrderClass::MixedIndefinite: return "mixed_indefinite";
    }
    return "?";
}

QuantumState spin_evolve(const QuantumState& state, double delta_tau, double omega) {
    const int spin = state.register_index(RegisterRole::Spin);
    if (spin < 0 || state.registers[spin].dim() != 2)
        throw ProtocolError("spin_evolve: state has no two-level spin register");

    const double half = 0.5 * omega * delta_tau;
    const Complex phase0 = std::polar(1.0, -half); // acts on |0> (sigma_z = +1)
    const Complex phase1 = std::polar(1.0, +half);

    QuantumState out = state;
    for (int i = 0; i < state.dim(); ++i) {
        const std::vector<int> digits = state.digits_of(i);
        out.amplitudes[i] *= (digits[spin] == 0) ? phase0 : phase1;
    }
    return out;
}

namespace {

// Change the spin register between the z basis and the orthonormal basis
// {b, b_perp}: columns of U are the basis vectors.
QuantumState apply_spin_basis(const QuantumState& state, const std::array<Complex, 2>& b,
                              const std::array<Complex, 2>& bperp, bool to_b_basis) {
    const int spin = state.register_index(RegisterRole::Spin);
    QuantumState out = state;
    // U = [b bperp]; to_b_basis applies U^dagger, back applies U.
    for (int i = 0; i < state.dim(); ++i) {
        std::vector<int> digits = state.digits_of(i);
        if (digits[spin] != 0) continue;
        std::vector<int> other = digits;
        other[spin] = 1;
        const int i1 = state.flat_index(other);
        const Complex a0 = state.amplitudes[i];
        const Complex a1 = state.amplitudes[i1];
        if (to_b_basis) {
            out.amplitudes[i] = std::conj(b[0]) * a0 + std::conj(b[1]) * a1;
            out.amplitudes[i1] = std::conj(bperp[0]) * a0 + std::conj(bperp[1]) * a1;
        } else {
            out.amplitudes[i] = b[0] * a0 + bperp[0] * a1;
            out.amplitudes[i1] = b[1] * a0 + bperp[1] * a1;
        }
    }
    return out;
}

// The measure-and-record step: conditioned on the control value (branch) and
// on the spin being b1 / b1-perp, the agent's memory is relabeled 0 -> tau1*
// or 0 -> tau2* (a label transposition, hence unitary).
QuantumState record_crossing(const QuantumState& state, int control_value,
                             RegisterRole memory_role, const std::array<Complex, 2>& b1,
                             double tau1, double tau2) {
    const int control = state.register_index(RegisterRole::Control);
    const int mem = state.register_index(memory_role);
    const int spin = state.register_index(RegisterRole::Spin);
    if (control < 0 || mem < 0 || spin < 0)
        throw ProtocolError("record_crossing: missing register");

    const std::array<Complex, 2> b1perp{-std::conj(b1[1]), std::conj(b1[0])};
    QuantumState rotated = apply_spin_basis(state, b1, b1perp, true);

    const LabeledRegister& mreg = rotated.registers[mem];
    const int idx_blank = mreg.index_of(0.0);
    const int idx_tau1 = mreg.index_of(tau1);
    const int idx_tau2 = mreg.index_of(tau2);

    // Transposition blank <-> tau on the memory register, conditioned on the
    // branch and on the spin outcome.
    QuantumState swapped = rotated;
    for (Complex& a : swapped.amplitudes) a = Complex{0, 0};
    for (int i = 0; i < rotated.dim(); ++i) {
        const Complex a = rotated.amplitudes[i];
        if (a == Complex{0, 0}) continue;
        std::vector<int> digits = rotated.digits_of(i);
        if (digits[control] == control_value) {
            const int target = (digits[spin] == 0) ? idx_tau1 : idx_tau2;
            if (digits[mem] == idx_blank)
                digits[mem] = target;
            else if (digits[mem] == target)
                digits[mem] = idx_blank;
        }
        swapped.amplitudes[rotated.flat_index(digits)] += a;
    }

    return apply_spin_basis(swapped, b1, b1perp, false);
}

std::array<Complex, 2> evolve_spin_vector(const std::array<Complex, 2>& v, double angle) {
    return {std::polar(1.0, -0.5 * angle) * v[0], std::polar(1.0, +0.5 * angle) * v[1]};
}

} // namespace

double omega_for_pi(const BranchedScenario& sc) {
    const double ta1 = std::min(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    const double ta2 = std::max(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    return M_PI / (ta2 - ta1);
}

ProtocolTrace run_switch_protocol_trace(const BranchedScenario& sc, double omega) {
    // Per-branch crossing times, sorted.
    const double a_first = std::min(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    const double a_second = std::max(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    const double b_first = std::min(sc.branch_b.event1.tau, sc.branch_b.event2.tau);
    const double b_second = std::max(sc.branch_b.event1.tau, sc.branch_b.event2.tau);
    if (std::fabs(a_first - b_first) > 1e-6 || std::fabs(a_second - b_second) > 1e-6)
        throw ProtocolError("run_switch_protocol: timing idealization violated, the branches' "
                            "crossing proper times do not match");

    ProtocolTrace tr;
    tr.omega = omega;
    tr.tau1_star = std::min(a_first, b_first);
    tr.tau2_star = std::min(a_second, b_second);
    const double delta = tr.tau2_star - tr.tau1_star;
    if (delta <= kLabelSeparation)
        throw ProtocolError("run_switch_protocol: crossing times too close to label memories");

    // Spin conventions: b1 = |+x>, b0 back-evolved by omega tau1*, b2 evolved
    // onward by omega (tau2* - tau1*).
    const std::array<Complex, 2> plus_x{Complex{1.0 / std::sqrt(2.0), 0},
                                        Complex{1.0 / std::sqrt(2.0), 0}};
    tr.b1 = plus_x;
    tr.b0 = evolve_spin_vector(tr.b1, -omega * tr.tau1_star);
    tr.b2 = evolve_spin_vector(tr.b1, omega * delta);
    const Complex overlap = std::conj(tr.b1[0]) * tr.b2[0] + std::conj(tr.b1[1]) * tr.b2[1];
    tr.spin_orthogonal = std::abs(overlap) <= 1e-9;

    // Which agent is crossed first in each branch.
    const bool a_first_is_agent1 = sc.branch_a.event1.tau < sc.branch_a.event2.tau;
    const bool b_first_is_agent1 = sc.branch_b.event1.tau < sc.branch_b.event2.tau;

    std::vector<LabeledRegister> regs;
    regs.push_back(make_register(RegisterRole::Control, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::MetricLabel, {0.0, 1.0}));
    regs.push_back(make_register(RegisterRole::Memory1, {0.0, tr.tau1_star, tr.tau2_star}));
    regs.push_back(make_register(RegisterRole::Memory2, {0.0, tr.tau1_star, tr.tau2_star}));
    regs.push_back(make_register(RegisterRole::Spin, {0.0, 1.0}));

    QuantumState psi = make_state(regs);
    const int blank = psi.registers[2].index_of(0.0);
    for (int spin_idx = 0; spin_idx < 2; ++spin_idx) {
        psi.amplitudes[psi.flat_index({0, 0, blank, blank, spin_idx})] =
            sc.alpha * tr.b0[spin_idx];
        psi.amplitudes[psi.flat_index({1, 1, blank, blank, spin_idx})] =
            sc.beta * tr.b0[spin_idx];
    }
    tr.psi1 = psi;

    // First crossing at tau1*.
    psi = spin_evolve(psi, tr.tau1_star, omega);
    psi = record_crossing(psi, 0, a_first_is_agent1 ? RegisterRole::Memory1 : RegisterRole::Memory2,
                          tr.b1, tr.tau1_star, tr.tau2_star);
    psi = record_crossing(psi, 1, b_first_is_agent1 ? RegisterRole::Memory1 : RegisterRole::Memory2,
                          tr.b1, tr.tau1_star, tr.tau2_star);
    tr.psi2 = psi;

    // Second crossing at tau2*.
    psi = spin_evolve(psi, delta, omega);
    psi = record_crossing(psi, 0, a_first_is_agent1 ? RegisterRole::Memory2 : RegisterRole::Memory1,
                          tr.b1, tr.tau1_star, tr.tau2_star);
    psi = record_crossing(psi, 1, b_first_is_agent1 ? RegisterRole::Memory2 : RegisterRole::Memory1,
                          tr.b1, tr.tau1_star, tr.tau2_star);
    tr.psi3 = psi;

    for (const QuantumState* st : {&tr.psi1, &tr.psi2, &tr.psi3})
        if (std::fabs(st->norm() - 1.0) > 1e-9)
            throw ProtocolError("run_switch_protocol: norm drift (internal error)");

    tr.referee_out = referee_transform(tr.psi3);
    return tr;
}

QuantumState run_switch_protocol(const BranchedScenario& sc, double omega) {
    return run_switch_protocol_trace(sc, omega).psi3;
}

QuantumState referee_transform(const QuantumState& state) {
    const int m1 = state.register_index(RegisterRole::Memory1);
    const int m2 = state.register_index(RegisterRole::Memory2);
    if (m1 < 0 || m2 < 0) throw ProtocolError("referee_transform: missing memory registers");

    // The two proper-time labels, shared by both memories.
    auto times_of = [](const LabeledRegister& reg) {
        std::vector<double> t;
        for (double v : reg.labels)
            if (std::fabs(v) > kLabelMatchTol) t.push_back(v);
        if (t.size() != 2)
            throw ProtocolError("referee_transform: memory register must carry two "
                                "proper-time labels");
        return t;
    };
    const std::vector<double> t1 = times_of(state.registers[m1]);
    const std::vector<double> t2 = times_of(state.registers[m2]);
    if (std::fabs(t1[0] - t2[0]) > kLabelMatchTol || std::fabs(t1[1] - t2[1]) > kLabelMatchTol)
        throw ProtocolError("referee_transform: memory label sets differ");
    const double tau1 = t1[0], tau2 = t1[1];

    std::vector<LabeledRegister> out_regs = state.registers;
    out_regs[m1] = make_register(RegisterRole::Memory1, {tau2 - tau1, 0.0, tau1 - tau2});
    out_regs[m2] = make_register(RegisterRole::Memory2, {2 * tau1, tau1 + tau2, 2 * tau2});
    QuantumState out = make_state(std::move(out_regs));

    for (int i = 0; i < state.dim(); ++i) {
        const Complex a = state.amplitudes[i];
        if (a == Complex{0, 0}) continue;
        std::vector<int> digits = state.digits_of(i);
        const double la = state.registers[m1].labels[digits[m1]];
        const double lb = state.registers[m2].labels[digits[m2]];
        if (std::fabs(la) <= kLabelMatchTol || std::fabs(lb) <= kLabelMatchTol) {
            if (std::abs(a) > kAmplitudeLeakTol)
                throw ProtocolError("referee_transform: memory register not populated with a "
                                    "proper-time label");
            continue;
        }
        digits[m1] = out.registers[m1].index_of(lb - la);
        digits[m2] = out.registers[m2].index_of(la + lb);
        out.amplitudes[out.flat_index(digits)] += a;
    }
    return out;
}

DensityMatrix reduced_density(const QuantumState& state, int register_index) {
    const int d = state.registers[register_index].dim();
    DensityMatrix rho;
    rho.dim = d;
    rho.m.assign(static_cast<size_t>(d) * d, Complex{0, 0});
    for (int i = 0; i < state.dim(); ++i) {
        const Complex ai = state.amplitudes[i];
        if (ai == Complex{0, 0}) continue;
        std::vector<int> di = state.digits_of(i);
        for (int k = 0; k < d; ++k) {
            std::vector<int> dj = di;
            dj[register_index] = k;
            const Complex aj = state.amplitudes[state.flat_index(dj)];
            rho.at(di[register_index], k) += ai * std::conj(aj);
        }
    }
    return rho;
}

Postselection postselect_order_qubit(const QuantumState& state) {
    const int control = state.register_index(RegisterRole::Control);
    const int metric = state.register_index(RegisterRole::MetricLabel);
    const int m1 = state.register_index(RegisterRole::Memory1);
    if (control < 0 || metric < 0 || m1 < 0)
        throw ProtocolError("postselect_order_qubit: missing registers");

    // Project control (x) metric onto |phi+>, building the unnormalized state
    // of the remaining registers.
    QuantumState rest = state; // keep shapes, zero control/metric to slot 0
    for (Complex& a : rest.amplitudes) a = Complex{0, 0};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double prob = 0;
    for (int i = 0; i < state.dim(); ++i) {
        const Complex a = state.amplitudes[i];
        if (a == Complex{0, 0}) continue;
        std::vector<int> digits = state.digits_of(i);
        if (digits[control] != digits[metric]) continue; // <phi+| kills cross terms
        digits[control] = 0;
        digits[metric] = 0;
        rest.amplitudes[rest.flat_index(digits)] += inv_sqrt2 * a;
    }
    for (const Complex& a : rest.amplitudes) prob += std::norm(a);
    if (prob < 1e-14)
        throw ProtocolError("postselect_order_qubit: post-selection on |phi+> has zero "
                            "probability");
    const double inv = 1.0 / std::sqrt(prob);
    for (Complex& a : rest.amplitudes) a *= inv;

    // Reduce onto memory1 and restrict to the {+delta, -delta} block.
    const DensityMatrix full = reduced_density(rest, m1);
    const LabeledRegister& reg = state.registers[m1];
    const double delta = *std::max_element(reg.labels.begin(), reg.labels.end());
    const int idx_plus = reg.index_of(delta);
    const int idx_minus = reg.index_of(-delta);

    double outside = 0;
    for (int i = 0; i < full.dim; ++i)
        if (i != idx_plus && i != idx_minus) outside += std::fabs(full.at(i, i).real());
    if (outside > 1e-9)
        throw ProtocolError("postselect_order_qubit: state leaks outside the |s=+-1> span");

    Postselection out;
    out.probability = prob;
    out.order_qubit.dim = 2;
    out.order_qubit.m = {full.at(idx_plus, idx_plus), full.at(idx_plus, idx_minus),
                         full.at(idx_minus, idx_plus), full.at(idx_minus, idx_minus)};
    // renormalize away the numerical leak
    const double tr = out.order_qubit.trace_real();
    for (Complex& c : out.order_qubit.m) c /= tr;
    check_density(out.order_qubit);
    return out;
}

Postselection postselect_order_qubit(const QuantumState& state, Complex amp_plus,
                                     Complex amp_minus) {
    Postselection out = postselect_order_qubit(state);
    const DensityMatrix expect = density_from_pure({amp_plus, amp_minus});
    double worst = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            worst = std::max(worst, std::abs(out.order_qubit.at(i, j) - expect.at(i, j)));
    if (worst > 1e-9)
        throw ProtocolError("postselect_order_qubit: reduced state does not match the declared "
                            "amplitudes");
    return out;
}

BlochVector tomography(const DensityMatrix& rho) {
    if (rho.dim != 2) throw ProtocolError("tomography: expected a 2x2 density matrix");
    BlochVector b;
    b.x = 2.0 * rho.at(0, 1).real();
    b.y = -2.0 * rho.at(0, 1).imag();
    b.z = rho.at(0, 0).real() - rho.at(1, 1).real();
    return b;
}

BlochVector tomography_sampled(const DensityMatrix& rho, long shots, std::uint64_t seed) {
    if (shots <= 0) return tomography(rho);
    const BlochVector exact = tomography(rho);
    std::mt19937_64 rng(seed);
    auto estimate = [&](double expectation) {
        std::binomial_distribution<long> dist(shots, 0.5 * (1.0 + expectation));
        return 2.0 * static_cast<double>(dist(rng)) / static_cast<double>(shots) - 1.0;
    };
    return {estimate(exact.x), estimate(exact.y), estimate(exact.z)};
}

OrderClass classify_order(const BlochVector& b, double eps) {
    const double len = b.length();
    if (len > 1.0 + eps)
        throw ProtocolError("classify_order: Bloch vector outside the unit ball");
    const double to_plus =
        std::sqrt(b.x * b.x + b.y * b.y + (b.z - 1.0) * (b.z - 1.0));
    const double to_minus =
        std::sqrt(b.x * b.x + b.y * b.y + (b.z + 1.0) * (b.z + 1.0));
    if (to_plus < eps || to_minus < eps) return OrderClass::DefiniteOrder;
    if (std::fabs(b.x) < eps && std::fabs(b.y) < eps && std::fabs(b.z) < 1.0 - eps)
        return OrderClass::ClassicalMixture;
    if (std::fabs(len - 1.0) < eps) return OrderClass::PureIndefinite;
    return OrderClass::MixedIndefinite;
}

} // namespace ico
