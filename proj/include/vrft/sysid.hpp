#pragma once

#include <vector>

#include "vrft/lti.hpp"

namespace vrft {

struct ImpulseResponseEstimate {
    std::vector<double> coeffs; // s(0..M)
    int order = 0;              // M
    double tail_magnitude = 0.0;

    static ImpulseResponseEstimate from_coeffs(std::vector<double> s);
};

// TC-kernel regularization: K_ij = scale * decay^max(i,j).
struct KernelParams {
    double scale = 1.0;
    double decay = 0.9;
    double noise_var = 1e-3;
};

// Regularized least squares over the convolution regressor of `input`:
//   s_hat = argmin ||y - Phi s||^2 + noise_var * s' K^{-1} s
// solved in whitened coordinates through an analytic square root of K.
ImpulseResponseEstimate fir_estimate(const Signal& input, const Signal& output, int order,
                                     const KernelParams& kp);

// Deterministic GCV grid search over (decay, scale); noise_var fixed from the
// residual variance of an unregularized fit. Prediction-oriented choice.
KernelParams tune_kernel(const Signal& input, const Signal& output, int order);

// Weak-shrinkage kernel for induced-norm estimation. GCV shrinks estimates
// toward zero, which is right for prediction but biases the largest singular
// value low; gain computations need the nearly-raw least-squares solution.
KernelParams norm_kernel(const Signal& input, const Signal& output, int order);

// Residual variance ||y - Phi s_ls||^2 / (N - M - 1) of the unregularized fit.
double ls_residual_variance(const Signal& input, const Signal& output, int order);

// True iff the first coefficient exceeding threshold_fraction * max|s| has
// sign opposite to the coefficient sum.
bool nmp_detect(const ImpulseResponseEstimate& ir, double threshold_fraction = 0.1);

} // namespace vrft
