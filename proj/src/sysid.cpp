#include "vrft/sysid.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "vrft/errors.hpp"

namespace vrft {

namespace {

Eigen::MatrixXd convolution_regressor(const Signal& input, int order) {
    const auto n = static_cast<Eigen::Index>(input.size());
    const Eigen::Index m = order + 1;
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = j; k < n; ++k) phi(k, j) = input.samples[k - j];
    return phi;
}

// A with A A' = K for the TC kernel K_ij = scale * decay^max(i,j).
// Reversing the index order turns K into a Brownian-motion (min) kernel,
// whose square root is lower-triangular with sqrt-increment columns.
Eigen::MatrixXd kernel_sqrt(int order, double scale, double decay) {
    const Eigen::Index m = order + 1;
    Eigen::VectorXd increments(m);
    double prev = 0.0;
    for (Eigen::Index b = 0; b < m; ++b) {
        const double t = scale * std::pow(decay, static_cast<double>(order) - b);
        increments[b] = std::sqrt(std::max(0.0, t - prev));
        prev = t;
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index b = 0; b + i < m; ++b) a(i, b) = increments[b];
    return a;
}

void check_estimation_inputs(const Signal& input, const Signal& output, int order) {
    if (order < 0) throw Error("fir order must be >= 0");
    if (input.size() != output.size()) throw Error("input/output length mismatch");
    if (static_cast<int>(input.size()) <= order + 1)
        throw Error("need more samples than coefficients");
    double amax = 0.0;
    for (double x : input.samples) amax = std::max(amax, std::abs(x));
    if (amax == 0.0) throw EstimationFailed("input is identically zero");
}

Eigen::VectorXd to_vec(const Signal& s) {
    return Eigen::Map<const Eigen::VectorXd>(s.samples.data(),
                                             static_cast<Eigen::Index>(s.size()));
}

} // namespace

ImpulseResponseEstimate ImpulseResponseEstimate::from_coeffs(std::vector<double> s) {
    ImpulseResponseEstimate ir;
    ir.order = static_cast<int>(s.size()) - 1;
    const std::size_t n = s.size();
    ir.tail_magnitude = n >= 2 ? 0.5 * (std::abs(s[n - 1]) + std::abs(s[n - 2]))
                               : (n == 1 ? std::abs(s[0]) : 0.0);
    ir.coeffs = std::move(s);
    return ir;
}

ImpulseResponseEstimate fir_estimate(const Signal& input, const Signal& output, int order,
                                     const KernelParams& kp) {
    check_estimation_inputs(input, output, order);
    if (!(kp.scale > 0.0) || !(kp.decay > 0.0) || !(kp.decay < 1.0) || !(kp.noise_var > 0.0))
        throw Error("invalid kernel parameters");

    const Eigen::MatrixXd phi = convolution_regressor(input, order);
    const Eigen::MatrixXd a = kernel_sqrt(order, kp.scale, kp.decay);
    const Eigen::MatrixXd g = a.transpose() * (phi.transpose() * phi) * a;
    const Eigen::VectorXd rhs = a.transpose() * (phi.transpose() * to_vec(output));
    const Eigen::Index m = order + 1;
    const Eigen::MatrixXd lhs = g + kp.noise_var * Eigen::MatrixXd::Identity(m, m);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
    if (ldlt.info() != Eigen::Success) throw EstimationFailed("regularized solve failed");
    const Eigen::VectorXd s = a * ldlt.solve(rhs);
    if (!s.allFinite()) throw EstimationFailed("non-finite solution");
    return ImpulseResponseEstimate::from_coeffs(
        std::vector<double>(s.data(), s.data() + s.size()));
}

double ls_residual_variance(const Signal& input, const Signal& output, int order) {
    check_estimation_inputs(input, output, order);
    const Eigen::MatrixXd phi = convolution_regressor(input, order);
    const Eigen::VectorXd y = to_vec(output);
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    if (qr.rank() < phi.cols()) throw EstimationFailed("rank-deficient regressor");
    const Eigen::VectorXd resid = y - phi * qr.solve(y);
    const double dof = static_cast<double>(phi.rows() - phi.cols());
    return resid.squaredNorm() / dof;
}

KernelParams tune_kernel(const Signal& input, const Signal& output, int order) {
    check_estimation_inputs(input, output, order);
    const Eigen::MatrixXd phi = convolution_regressor(input, order);
    const Eigen::VectorXd y = to_vec(output);
    const Eigen::MatrixXd ptp = phi.transpose() * phi;
    const Eigen::VectorXd pty = phi.transpose() * y;
    const double n = static_cast<double>(phi.rows());
    const Eigen::Index m = order + 1;

    const double noise_var = std::max(ls_residual_variance(input, output, order), 1e-300);

    static constexpr double kDecays[] = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
    static constexpr double kScales[] = {0.1, 1.0, 10.0};
    KernelParams best;
    double best_gcv = std::numeric_limits<double>::infinity();
    for (double decay : kDecays) {
        for (double scale : kScales) {
            const Eigen::MatrixXd a = kernel_sqrt(order, scale, decay);
            const Eigen::MatrixXd g = a.transpose() * ptp * a;
            const Eigen::MatrixXd lhs = g + noise_var * Eigen::MatrixXd::Identity(m, m);
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
            if (ldlt.info() != Eigen::Success) continue;
            const Eigen::VectorXd t = ldlt.solve(a.transpose() * pty);
            const Eigen::VectorXd resid = y - phi * (a * t);
            const double trace_h = ldlt.solve(g).trace();
            const double denom = n - trace_h;
            if (denom <= 0.0) continue;
            const double gcv = n * resid.squaredNorm() / (denom * denom);
            if (gcv < best_gcv) {
                best_gcv = gcv;
                best = KernelParams{scale, decay, noise_var};
            }
        }
    }
    if (!std::isfinite(best_gcv)) throw EstimationFailed("kernel tuning failed on all grid points");
    return best;
}

KernelParams norm_kernel(const Signal& input, const Signal& output, int order) {
    return KernelParams{10.0, 0.95, std::max(ls_residual_variance(input, output, order), 1e-300)};
}

bool nmp_detect(const ImpulseResponseEstimate& ir, double threshold_fraction) {
    double amax = 0.0, sum = 0.0;
    for (double c : ir.coeffs) {
        if (!std::isfinite(c)) throw DegenerateIR("non-finite impulse response");
        amax = std::max(amax, std::abs(c));
        sum += c;
    }
    if (amax == 0.0) throw DegenerateIR("all-zero impulse response");
    const double threshold = threshold_fraction * amax;
    for (double c : ir.coeffs) {
        if (std::abs(c) > threshold) return (c > 0.0) != (sum > 0.0);
    }
    return false;
}

} // namespace vrft
