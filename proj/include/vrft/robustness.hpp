#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vrft/lti.hpp"
#include "vrft/sysid.hpp"

namespace vrft {

// Input/output pair of the sensitivity function: xi = S zeta.
struct SensitivitySignals {
    Signal zeta; // u + C y
    Signal xi;   // u
};

struct RobustnessSpec {
    double ms_desired = 1.8;     // M_Sd
    double penalty_weight = 1e6; // c
    int ir_order = 100;          // M used inside cost evaluations
};

// Largest singular value of the lower-triangular Toeplitz matrix built from
// the impulse response. Power iteration on S'S, tolerance 1e-9, <= 500 steps.
double toeplitz_hinf(const ImpulseResponseEstimate& ir);
double toeplitz_hinf(const std::vector<double>& coeffs);

SensitivitySignals sensitivity_signals(const DataSet& data, const TransferFunction& C);

double estimate_ms(const DataSet& data, const TransferFunction& C, const RobustnessSpec& spec,
                   const KernelParams& kp);

// 0.5 * max(0, ms_hat - ms_desired)^2
double penalty_h(double ms_hat, double ms_desired);

// safety / ||G||_inf estimated from the plant's impulse response.
double stabilizing_gain(const ImpulseResponseEstimate& probe_ir, double safety = 0.5);

// Repeated-evaluation form of estimate_ms for linearly parameterized
// controllers: zeta(rho) = u + sum_i rho_i (Cbar_i y) is affine in rho, so the
// normal equations assemble from precomputed Gram blocks instead of rebuilding
// the N x (M+1) regressor per candidate. Agrees with estimate_ms to rounding.
class MsEstimator {
public:
    MsEstimator(const DataSet& data, const std::vector<TransferFunction>& basis, int ir_order,
                const KernelParams& kp);

    // +inf when the solve fails or produces non-finite coefficients.
    double operator()(const Eigen::VectorXd& rho) const;

    int ir_order() const { return order_; }

private:
    int order_;
    double noise_var_;
    Eigen::MatrixXd kernel_sqrt_;                    // A with A A' = K
    std::vector<std::vector<Eigen::MatrixXd>> gram_; // A' Phi_a' Phi_b A
    std::vector<Eigen::VectorXd> rhs_;               // A' Phi_a' u
};

} // namespace vrft
