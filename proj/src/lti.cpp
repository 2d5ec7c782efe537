#include "vrft/lti.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vrft/rng.hpp"

namespace vrft {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Drop numerically-zero leading coefficients relative to the largest one.
std::vector<double> trim_leading(std::vector<double> p) {
    const double tol = 1e-12 * std::max(1e-300, max_abs(p));
    std::size_t first = 0;
    while (first + 1 < p.size() && std::abs(p[first]) <= tol) ++first;
    return std::vector<double>(p.begin() + first, p.end());
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// a + b with right-aligned (constant-term) matching.
std::vector<double> poly_add(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::max(a.size(), b.size());
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[n - a.size() + i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[n - b.size() + i] += b[i];
    return out;
}

std::vector<double> poly_neg(std::vector<double> a) {
    for (double& x : a) x = -x;
    return a;
}

std::complex<double> poly_eval(const std::vector<double>& p, std::complex<double> z) {
    std::complex<double> acc(0.0, 0.0);
    for (double c : p) acc = acc * z + c;
    return acc;
}

void check_same_rate(const TransferFunction& a, const TransferFunction& b) {
    if (a.sample_time() != b.sample_time())
        throw Error("transfer functions have different sample times");
}

} // namespace

TransferFunction::TransferFunction(std::vector<double> num, std::vector<double> den,
                                   double sample_time)
    : sample_time_(sample_time) {
    den = trim_leading(std::move(den));
    if (den.empty() || den[0] == 0.0 || !std::isfinite(den[0]))
        throw Error("transfer function denominator is degenerate");
    num = trim_leading(std::move(num));
    if (num.empty()) num = {0.0};
    const double lead = den[0];
    for (double& c : den) c /= lead;
    for (double& c : num) c /= lead;
    for (double c : den)
        if (!std::isfinite(c)) throw Error("non-finite denominator coefficient");
    for (double c : num)
        if (!std::isfinite(c)) throw Error("non-finite numerator coefficient");
    num_ = std::move(num);
    den_ = std::move(den);
}

std::complex<double> freq_response(const TransferFunction& tf, double omega) {
    const std::complex<double> z = std::polar(1.0, omega);
    const std::complex<double> d = poly_eval(tf.den(), z);
    if (std::abs(d) < 1e-300)
        throw PoleOnUnitCircle("denominator vanishes at omega = " + std::to_string(omega));
    return poly_eval(tf.num(), z) / d;
}

Signal simulate(const TransferFunction& tf, const Signal& input) {
    if (!tf.is_causal()) throw NotProper("cannot simulate a non-causal transfer function");
    if (tf.sample_time() != input.sample_time)
        throw Error("sample time mismatch between system and signal");
    const auto& den = tf.den();
    const std::size_t n = den.size() - 1;
    // numerator padded to denominator length so b[i] multiplies u(k-i)
    std::vector<double> b(den.size(), 0.0);
    const auto& num = tf.num();
    std::copy(num.begin(), num.end(), b.begin() + (den.size() - num.size()));

    Signal out;
    out.sample_time = input.sample_time;
    out.samples.assign(input.size(), 0.0);
    const auto& u = input.samples;
    auto& y = out.samples;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double acc = b[0] * u[k];
        const std::size_t lags = std::min(n, k);
        for (std::size_t i = 1; i <= lags; ++i) acc += b[i] * u[k - i] - den[i] * y[k - i];
        y[k] = acc;
    }
    return out;
}

std::pair<TransferFunction, TransferFunction> closed_loop(const TransferFunction& C,
                                                          const TransferFunction& G) {
    check_same_rate(C, G);
    const auto open_num = poly_mul(C.num(), G.num());
    const auto open_den = poly_mul(C.den(), G.den());
    const auto loop_den = poly_add(open_den, open_num);
    if (max_abs(loop_den) <= 1e-12 * std::max(1.0, max_abs(open_den)))
        throw DegenerateLoop("1 + CG is identically zero");
    TransferFunction T(open_num, loop_den, C.sample_time());
    TransferFunction S(open_den, loop_den, C.sample_time());
    return {std::move(T), std::move(S)};
}

TransferFunction tf_add(const TransferFunction& a, const TransferFunction& b) {
    check_same_rate(a, b);
    const auto num = poly_add(poly_mul(a.num(), b.den()), poly_mul(b.num(), a.den()));
    return TransferFunction(num, poly_mul(a.den(), b.den()), a.sample_time());
}

TransferFunction tf_mul(const TransferFunction& a, const TransferFunction& b) {
    check_same_rate(a, b);
    return TransferFunction(poly_mul(a.num(), b.num()), poly_mul(a.den(), b.den()),
                            a.sample_time());
}

TransferFunction tf_scale(const TransferFunction& a, double k) {
    auto num = a.num();
    for (double& c : num) c *= k;
    return TransferFunction(num, a.den(), a.sample_time());
}

TransferFunction tf_sub_from_one(const TransferFunction& a) {
    const auto num = poly_add(a.den(), poly_neg(a.num()));
    return TransferFunction(num, a.den(), a.sample_time());
}

TransferFunction tf_invert(const TransferFunction& a) {
    if (max_abs(a.num()) == 0.0) throw NotInvertible("zero numerator");
    return TransferFunction(a.den(), a.num(), a.sample_time());
}

double dc_gain(const TransferFunction& tf) {
    const auto d = poly_eval(tf.den(), {1.0, 0.0});
    if (std::abs(d) <= 1e-9 * std::max(1.0, max_abs(tf.den())))
        throw Integrator("pole at z = 1");
    const auto g = poly_eval(tf.num(), {1.0, 0.0}) / d;
    return g.real();
}

std::vector<double> true_impulse_response(const TransferFunction& tf, int order) {
    if (order < 0) throw Error("impulse response order must be >= 0");
    Signal impulse;
    impulse.sample_time = tf.sample_time();
    impulse.samples.assign(static_cast<std::size_t>(order) + 1, 0.0);
    impulse.samples[0] = 1.0;
    return simulate(tf, impulse).samples;
}

std::vector<double> pole_magnitudes(const TransferFunction& tf) {
    const auto& den = tf.den();
    const std::size_t n = den.size() - 1;
    std::vector<double> mags;
    if (n == 0) return mags;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) companion(0, i) = -den[i + 1]; // den[0] == 1
    for (std::size_t i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    const auto eig = companion.eigenvalues();
    mags.reserve(n);
    for (Eigen::Index i = 0; i < eig.size(); ++i) mags.push_back(std::abs(eig[i]));
    return mags;
}

bool is_stable(const TransferFunction& tf) {
    for (double m : pole_magnitudes(tf))
        if (m >= 1.0) return false;
    return true;
}

double hinf_grid_oracle(const TransferFunction& tf, int n_grid) {
    if (n_grid < 512) throw Error("hinf_grid_oracle requires n_grid >= 512");
    if (!is_stable(tf)) throw Unstable("hinf_grid_oracle requires a stable system");

    const auto mag = [&](double w) { return std::abs(freq_response(tf, w)); };
    constexpr double pi = 3.14159265358979323846;
    double best_w = 0.0, best = -1.0;
    for (int i = 0; i < n_grid; ++i) {
        const double w = pi * i / (n_grid - 1);
        const double m = mag(w);
        if (m > best) {
            best = m;
            best_w = w;
        }
    }
    // golden-section refinement within the bracketing grid cells
    const double step = pi / (n_grid - 1);
    double a = std::max(0.0, best_w - step), b = std::min(pi, best_w + step);
    const double gr = 0.61803398874989484820;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = mag(x1), f2 = mag(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = mag(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = mag(x2);
        }
    }
    return std::max(best, std::max(f1, f2));
}

namespace {

// Maximal-length feedback taps (1-based bit positions), one primitive
// polynomial per register order.
const std::array<std::vector<int>, kPrbsMaxOrder + 1> kLfsrTaps = [] {
    std::array<std::vector<int>, kPrbsMaxOrder + 1> taps{};
    taps[3] = {3, 2};
    taps[4] = {4, 3};
    taps[5] = {5, 3};
    taps[6] = {6, 5};
    taps[7] = {7, 6};
    taps[8] = {8, 6, 5, 4};
    taps[9] = {9, 5};
    taps[10] = {10, 7};
    taps[11] = {11, 9};
    taps[12] = {12, 6, 4, 1};
    taps[13] = {13, 4, 3, 1};
    taps[14] = {14, 5, 3, 1};
    taps[15] = {15, 14};
    taps[16] = {16, 15, 13, 4};
    taps[17] = {17, 14};
    taps[18] = {18, 11};
    taps[19] = {19, 6, 2, 1};
    taps[20] = {20, 17};
    return taps;
}();

} // namespace

Signal prbs(std::size_t n, int register_order, double amplitude, std::uint64_t seed,
            double sample_time) {
    if (register_order < kPrbsMinOrder || register_order > kPrbsMaxOrder)
        throw Error("prbs register order out of range");
    if (n < 1) throw Error("prbs length must be >= 1");
    const auto& taps = kLfsrTaps[register_order];
    const std::uint64_t mask = (1ull << register_order) - 1ull;
    std::uint64_t state = seed & mask;
    if (state == 0) state = 1;

    Signal out;
    out.sample_time = sample_time;
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.samples[k] = (state & 1ull) ? amplitude : -amplitude;
        std::uint64_t fb = 0;
        for (int t : taps) fb ^= (state >> (t - 1)) & 1ull;
        state = ((state << 1) | fb) & mask;
    }
    return out;
}

double signal_power(const Signal& signal) {
    if (signal.size() == 0) return 0.0;
    double acc = 0.0;
    for (double x : signal.samples) acc += x * x;
    return acc / static_cast<double>(signal.size());
}

Signal awgn_add(const Signal& signal, const NoiseModel& noise) {
    if (std::isinf(noise.snr_db)) return signal;
    if (!std::isfinite(noise.snr_db)) throw Error("snr_db must be finite or +inf");
    const double power = signal_power(signal);
    if (power <= 0.0) throw ZeroPower("cannot scale noise to a zero-power signal");
    const double variance = power / std::pow(10.0, noise.snr_db / 10.0);
    const double sigma = std::sqrt(variance);
    Rng rng(noise.seed);
    Signal out = signal;
    for (double& x : out.samples) x += sigma * rng.normal();
    return out;
}

} // namespace vrft
