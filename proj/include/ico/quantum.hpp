#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "ico/causal_order.hpp"

namespace ico {

using Complex = std::complex<double>;

enum class RegisterRole { Control, MetricLabel, Spin, Memory1, Memory2 };
const char* register_role_name(RegisterRole role);

// A finite register whose basis states carry real labels (proper-time
// readings for the memories, 0/1 for two-level registers). Distinct labels
// are orthonormal by fiat and must be separated by more than 1e-9.
struct LabeledRegister {
    RegisterRole role;
    std::vector<double> labels; // sorted ascending

    int dim() const { return static_cast<int>(labels.size()); }
    // Index of the basis state with the given label (within 1e-10);
    // throws ProtocolError when absent.
    int index_of(double label) const;
};

LabeledRegister make_register(RegisterRole role, std::vector<double> labels);

// A pure state over the tensor product of its registers, row-major index
// order (first register is the slowest index). States are immutable values;
// operations return new states.
struct QuantumState {
    std::vector<LabeledRegister> registers;
    std::vector<Complex> amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const;
    int register_index(RegisterRole role) const; // -1 when absent

    // Mixed-radix helpers over register dimensions.
    int flat_index(const std::vector<int>& digits) const;
    std::vector<int> digits_of(int flat) const;
};

QuantumState make_state(std::vector<LabeledRegister> registers);
// Largest absolute amplitude difference; states must share register shapes.
double max_amplitude_diff(const QuantumState& x, const QuantumState& y);

struct DensityMatrix {
    int dim = 0;
    std::vector<Complex> m; // row major

    Complex& at(int i, int j) { return m[static_cast<size_t>(i * dim + j)]; }
    Complex at(int i, int j) const { return m[static_cast<size_t>(i * dim + j)]; }
    double trace_real() const;
    double purity() const; // tr rho^2
};

DensityMatrix density_from_pure(const std::vector<Complex>& amps);
// Hermiticity/trace/positivity validation (2x2); throws ProtocolError.
void check_density(const DensityMatrix& rho, double tol = 1e-10);

struct BlochVector {
    double x = 0, y = 0, z = 0;
    double length() const;
};

enum class OrderClass { DefiniteOrder, ClassicalMixture, PureIndefinite, MixedIndefinite };
const char* order_class_name(OrderClass c);

// exp(-i omega delta_tau sigma_z / 2) on the spin register.
QuantumState spin_evolve(const QuantumState& state, double delta_tau, double omega);

// Full protocol run: the particle's spin precesses with proper time, each
// agent measures it in the fixed {b1, b1-perp} basis at their crossing and
// records the inferred proper time in their memory register.
struct ProtocolTrace {
    QuantumState psi1, psi2, psi3;
    QuantumState referee_out;
    double tau1_star = 0, tau2_star = 0;
    double omega = 0;
    bool spin_orthogonal = false; // |<b1|b2>| <= 1e-9, i.e. omega tuned to pi
    std::array<Complex, 2> b0, b1, b2;
};

ProtocolTrace run_switch_protocol_trace(const BranchedScenario& sc, double omega);
// |psi3> only.
QuantumState run_switch_protocol(const BranchedScenario& sc, double omega);

// omega with omega * (tau2* - tau1*) = pi.
double omega_for_pi(const BranchedScenario& sc);

// Referee post-processing |a>_1 |b>_2 -> |b - a>_1 |a + b>_2 on the product
// label set {tau1*, tau2*}^2. Defines |s = +-1> := |+-(tau2* - tau1*)>_1.
QuantumState referee_transform(const QuantumState& state);

struct Postselection {
    DensityMatrix order_qubit; // basis {|s=+1>, |s=-1>}
    double probability = 0;
};

// Projects control (x) metric onto |phi+> = (|0>|gA> + |1>|gB>)/sqrt(2),
// renormalizes and traces out everything but the order qubit.
Postselection postselect_order_qubit(const QuantumState& state);
// Same, additionally asserting the reduced state matches the declared
// amplitudes of the |s=+1>/|s=-1> components.
Postselection postselect_order_qubit(const QuantumState& state, Complex amp_plus,
                                     Complex amp_minus);

// (tr rho sigma_x, tr rho sigma_y, tr rho sigma_z), exact.
BlochVector tomography(const DensityMatrix& rho);
// Binomial shot-noise estimate with `shots` measurements per axis.
BlochVector tomography_sampled(const DensityMatrix& rho, long shots, std::uint64_t seed);

OrderClass classify_order(const BlochVector& b, double eps = 1e-6);

// Partial trace onto one register.
DensityMatrix reduced_density(const QuantumState& state, int register_index);

} // namespace ico
