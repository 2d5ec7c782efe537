#include "vrft/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrft/errors.hpp"

namespace vrft {

namespace {

// w = S v for the lower-triangular Toeplitz S of the coefficients.
void toeplitz_apply(const std::vector<double>& s, const Eigen::VectorXd& v, Eigen::VectorXd& w) {
    const Eigen::Index m = v.size();
    for (Eigen::Index k = 0; k < m; ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i <= k; ++i) acc += s[i] * v[k - i];
        w[k] = acc;
    }
}

void toeplitz_apply_transpose(const std::vector<double>& s, const Eigen::VectorXd& w,
                              Eigen::VectorXd& v) {
    const Eigen::Index m = w.size();
    for (Eigen::Index j = 0; j < m; ++j) {
        double acc = 0.0;
        for (Eigen::Index k = j; k < m; ++k) acc += s[k - j] * w[k];
        v[j] = acc;
    }
}

Eigen::MatrixXd tc_kernel_sqrt(int order, double scale, double decay) {
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

Eigen::MatrixXd convolution_regressor(const Signal& input, int order) {
    const auto n = static_cast<Eigen::Index>(input.size());
    const Eigen::Index m = order + 1;
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = j; k < n; ++k) phi(k, j) = input.samples[k - j];
    return phi;
}

double sigma_max_power_iteration(const std::vector<double>& s) {
    const Eigen::Index m = static_cast<Eigen::Index>(s.size());
    for (double c : s)
        if (!std::isfinite(c)) throw Error("non-finite impulse response entries");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
    Eigen::VectorXd sv(m), bv(m);
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        toeplitz_apply(s, v, sv);
        toeplitz_apply_transpose(s, sv, bv);
        const double norm = bv.norm();
        if (norm == 0.0) return 0.0;
        v = bv / norm;
        if (std::abs(norm - lambda) <= 1e-9 * norm) {
            lambda = norm;
            break;
        }
        lambda = norm;
    }
    return std::sqrt(lambda);
}

} // namespace

double toeplitz_hinf(const std::vector<double>& coeffs) {
    if (coeffs.empty()) throw Error("empty impulse response");
    return sigma_max_power_iteration(coeffs);
}

double toeplitz_hinf(const ImpulseResponseEstimate& ir) { return toeplitz_hinf(ir.coeffs); }

SensitivitySignals sensitivity_signals(const DataSet& data, const TransferFunction& C) {
    if (data.u.size() != data.y.size()) throw Error("dataset u/y length mismatch");
    SensitivitySignals out;
    out.xi = data.u;
    out.zeta = simulate(C, data.y);
    for (std::size_t k = 0; k < out.zeta.size(); ++k) out.zeta[k] += data.u[k];
    return out;
}

double estimate_ms(const DataSet& data, const TransferFunction& C, const RobustnessSpec& spec,
                   const KernelParams& kp) {
    const SensitivitySignals sig = sensitivity_signals(data, C);
    const ImpulseResponseEstimate ir = fir_estimate(sig.zeta, sig.xi, spec.ir_order, kp);
    return toeplitz_hinf(ir);
}

double penalty_h(double ms_hat, double ms_desired) {
    if (!std::isfinite(ms_hat) || !std::isfinite(ms_desired))
        throw Error("penalty_h requires finite inputs");
    const double excess = std::max(0.0, ms_hat - ms_desired);
    return 0.5 * excess * excess;
}

double stabilizing_gain(const ImpulseResponseEstimate& probe_ir, double safety) {
    if (!(safety > 0.0 && safety < 1.0)) throw Error("safety factor must be in (0,1)");
    const double norm = toeplitz_hinf(probe_ir);
    if (norm <= 0.0) throw DegenerateIR("zero-norm impulse response");
    return safety / norm;
}

MsEstimator::MsEstimator(const DataSet& data, const std::vector<TransferFunction>& basis,
                         int ir_order, const KernelParams& kp)
    : order_(ir_order), noise_var_(kp.noise_var) {
    if (basis.empty()) throw Error("empty controller basis");
    kernel_sqrt_ = tc_kernel_sqrt(ir_order, kp.scale, kp.decay);

    std::vector<Signal> signals;
    signals.reserve(basis.size() + 1);
    signals.push_back(data.u);
    for (const auto& b : basis) signals.push_back(simulate(b, data.y));

    const std::size_t n = signals.size();
    std::vector<Eigen::MatrixXd> phis(n);
    for (std::size_t a = 0; a < n; ++a) phis[a] = convolution_regressor(signals[a], ir_order);

    const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(
        data.u.samples.data(), static_cast<Eigen::Index>(data.u.size()));

    gram_.assign(n, std::vector<Eigen::MatrixXd>(n));
    rhs_.assign(n, Eigen::VectorXd());
    for (std::size_t a = 0; a < n; ++a) {
        rhs_[a] = kernel_sqrt_.transpose() * (phis[a].transpose() * u);
        for (std::size_t b = a; b < n; ++b) {
            gram_[a][b] =
                kernel_sqrt_.transpose() * (phis[a].transpose() * phis[b]) * kernel_sqrt_;
            if (b != a) gram_[b][a] = gram_[a][b].transpose();
        }
    }
}

double MsEstimator::operator()(const Eigen::VectorXd& rho) const {
    const std::size_t n = gram_.size();
    if (static_cast<std::size_t>(rho.size()) + 1 != n) throw Error("rho dimension mismatch");
    Eigen::VectorXd c(n);
    c[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) c[static_cast<Eigen::Index>(i)] = rho[i - 1];

    const Eigen::Index m = order_ + 1;
    Eigen::MatrixXd lhs = noise_var_ * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (std::size_t a = 0; a < n; ++a) {
        const double ca = c[static_cast<Eigen::Index>(a)];
        rhs += ca * rhs_[a];
        for (std::size_t b = 0; b < n; ++b)
            lhs += (ca * c[static_cast<Eigen::Index>(b)]) * gram_[a][b];
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
    if (ldlt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    const Eigen::VectorXd s = kernel_sqrt_ * ldlt.solve(rhs);
    if (!s.allFinite()) return std::numeric_limits<double>::infinity();
    return sigma_max_power_iteration(std::vector<double>(s.data(), s.data() + s.size()));
}

} // namespace vrft
