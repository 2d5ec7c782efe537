#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vrft/errors.hpp"

namespace vrft {

// Uniformly sampled real sequence.
struct Signal {
    std::vector<double> samples;
    double sample_time = 1.0;

    Signal() = default;
    Signal(std::vector<double> s, double ts = 1.0) : samples(std::move(s)), sample_time(ts) {}

    std::size_t size() const { return samples.size(); }
    double operator[](std::size_t i) const { return samples[i]; }
    double& operator[](std::size_t i) { return samples[i]; }
};

// One experiment batch {u, y}, optionally with the reference r that produced it.
struct DataSet {
    Signal u;
    Signal y;
    std::optional<Signal> r;
    std::string label;
};

struct NoiseModel {
    double snr_db = 20.0; // +infinity means "no noise"
    std::uint64_t seed = 0;
};

// Rational discrete-time system in the forward shift operator z.
// Coefficients are stored in descending powers of z with the denominator
// normalized to a unit leading coefficient. Objects with deg(num) > deg(den)
// are permitted but flagged non-causal; they cannot be simulated directly.
class TransferFunction {
public:
    TransferFunction() : num_{0.0}, den_{1.0} {}
    TransferFunction(std::vector<double> num, std::vector<double> den, double sample_time = 1.0);

    static TransferFunction constant(double k, double sample_time = 1.0) {
        return TransferFunction({k}, {1.0}, sample_time);
    }

    const std::vector<double>& num() const { return num_; }
    const std::vector<double>& den() const { return den_; }
    double sample_time() const { return sample_time_; }
    bool is_causal() const { return num_.size() <= den_.size(); }
    int degree() const { return static_cast<int>(den_.size()) - 1; }

private:
    std::vector<double> num_;
    std::vector<double> den_;
    double sample_time_;
};

// Evaluation of num(e^{jw})/den(e^{jw}).
std::complex<double> freq_response(const TransferFunction& tf, double omega);

// Direct-form difference equation with zero initial conditions.
Signal simulate(const TransferFunction& tf, const Signal& input);

// T = CG/(1+CG), S = 1/(1+CG) over the common uncancelled denominator.
std::pair<TransferFunction, TransferFunction> closed_loop(const TransferFunction& C,
                                                          const TransferFunction& G);

TransferFunction tf_add(const TransferFunction& a, const TransferFunction& b);
TransferFunction tf_mul(const TransferFunction& a, const TransferFunction& b);
TransferFunction tf_scale(const TransferFunction& a, double k);
TransferFunction tf_sub_from_one(const TransferFunction& a);
TransferFunction tf_invert(const TransferFunction& a);

double dc_gain(const TransferFunction& tf);

// s(0..M) via unit-impulse simulation.
std::vector<double> true_impulse_response(const TransferFunction& tf, int order);

// Magnitudes of the denominator roots (companion-matrix eigenvalues).
std::vector<double> pole_magnitudes(const TransferFunction& tf);
bool is_stable(const TransferFunction& tf);

// Frequency-sweep H-infinity norm with golden-section refinement around the
// grid maximizer. Test/validation oracle; requires a stable system.
double hinf_grid_oracle(const TransferFunction& tf, int n_grid = 4096);

// Maximum-length shift-register sequence mapped to +-amplitude.
Signal prbs(std::size_t n, int register_order, double amplitude, std::uint64_t seed,
            double sample_time = 1.0);

constexpr int kPrbsMinOrder = 3;
constexpr int kPrbsMaxOrder = 20;

// Additive white Gaussian noise at the model's SNR relative to the mean
// square of `signal`.
Signal awgn_add(const Signal& signal, const NoiseModel& noise);

double signal_power(const Signal& signal);

} // namespace vrft
