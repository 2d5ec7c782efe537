#include "vrft/vrft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vrft/errors.hpp"

namespace vrft {

namespace {

constexpr double kRankTol = 1e-12;

Eigen::VectorXd to_vec(const Signal& s) {
    return Eigen::Map<const Eigen::VectorXd>(s.samples.data(),
                                             static_cast<Eigen::Index>(s.size()));
}

Eigen::MatrixXd basis_regressor(const ControllerBasis& basis, const Signal& error) {
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(error.size()),
                        static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i)
        phi.col(static_cast<Eigen::Index>(i)) = to_vec(simulate(basis.basis[i], error));
    return phi;
}

Eigen::VectorXd solve_ls(const Eigen::MatrixXd& phi, const Eigen::VectorXd& target) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    qr.setThreshold(kRankTol);
    if (qr.rank() < phi.cols()) throw SingularRegressor("rank-deficient VRFT regressor");
    return qr.solve(target);
}

bool same_coeffs(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, scale)) return false;
    return true;
}

std::vector<double> poles_to_poly(const std::vector<double>& poles) {
    std::vector<double> den{1.0};
    for (double p : poles) {
        std::vector<double> next(den.size() + 1, 0.0);
        for (std::size_t i = 0; i < den.size(); ++i) {
            next[i] += den[i];
            next[i + 1] -= p * den[i];
        }
        den = std::move(next);
    }
    return den;
}

struct FlexibleWork {
    const DataSet& data;
    const ControllerBasis& basis;
    std::vector<Signal> basis_outputs; // Cbar_i y
    double sample_time;

    FlexibleWork(const DataSet& d, const ControllerBasis& b) : data(d), basis(b) {
        sample_time = d.y.sample_time;
        basis_outputs.reserve(b.size());
        for (const auto& tf : b.basis) basis_outputs.push_back(simulate(tf, d.y));
    }

    Signal combine(const ControllerParams& rho) const {
        Signal w;
        w.sample_time = sample_time;
        w.samples.assign(data.u.size(), 0.0);
        for (std::size_t i = 0; i < basis_outputs.size(); ++i)
            for (std::size_t k = 0; k < w.size(); ++k)
                w[k] += rho[static_cast<Eigen::Index>(i)] * basis_outputs[i][k];
        return w;
    }
};

TransferFunction monomial_over(const std::vector<double>& den_poly, int power,
                               double sample_time) {
    std::vector<double> num(static_cast<std::size_t>(power) + 1, 0.0);
    num[0] = 1.0;
    return TransferFunction(num, den_poly, sample_time);
}

// Constrained LS for eta: min ||A eta - w||^2 subject to Td(1, eta) = 1.
// Returns {eta, residual squared norm}.
std::pair<Eigen::VectorXd, double> solve_eta(const FlexibleWork& work, const ControllerParams& rho,
                                             const std::vector<double>& den_poly, int m) {
    const Signal w = work.combine(rho);
    Signal g = w;
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += work.data.u[k];

    Eigen::MatrixXd a(static_cast<Eigen::Index>(g.size()), m);
    for (int j = 0; j < m; ++j) {
        const TransferFunction fj = monomial_over(den_poly, m - 1 - j, work.sample_time);
        a.col(j) = to_vec(simulate(fj, g));
    }
    const Eigen::VectorXd target = to_vec(w);

    double den_at_1 = 0.0;
    for (double c : den_poly) den_at_1 += c;
    if (std::abs(den_at_1) < 1e-12) throw SingularRegressor("reference model pole at z = 1");
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(m, 1.0 / den_at_1);

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = a.transpose() * a;
    kkt.topRightCorner(m, 1) = c;
    kkt.bottomLeftCorner(1, m) = c.transpose();
    Eigen::VectorXd rhs(m + 1);
    rhs.head(m) = a.transpose() * target;
    rhs[m] = 1.0;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) throw SingularRegressor("singular constrained eta system");
    const Eigen::VectorXd eta = lu.solve(rhs).head(m);
    const double resid = (a * eta - target).squaredNorm();
    return {eta, resid};
}

std::pair<Eigen::VectorXd, double> solve_rho(const FlexibleWork& work,
                                             const Eigen::VectorXd& eta,
                                             const std::vector<double>& den_poly) {
    const TransferFunction td(std::vector<double>(eta.data(), eta.data() + eta.size()), den_poly,
                              work.sample_time);
    const Signal tu = simulate(td, work.data.u);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(tu.size()),
                      static_cast<Eigen::Index>(work.basis.size()));
    for (std::size_t i = 0; i < work.basis.size(); ++i) {
        const Signal filtered = simulate(td, work.basis_outputs[i]);
        for (std::size_t k = 0; k < tu.size(); ++k)
            b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
                work.basis_outputs[i][k] - filtered[k];
    }
    const Eigen::VectorXd rho = solve_ls(b, to_vec(tu));
    const double resid = (to_vec(tu) - b * rho).squaredNorm();
    return {rho, resid};
}

// min over the free pole of the constrained eta residual, grid + golden.
struct PoleRefit {
    double pole;
    Eigen::VectorXd eta;
    double cost;
};

PoleRefit refit_pole(const FlexibleWork& work, const ControllerParams& rho,
                     const std::vector<double>& fixed_poles, double current_pole, double lo,
                     double hi, int m) {
    const auto eval = [&](double p) {
        std::vector<double> poles = fixed_poles;
        poles.push_back(p);
        const auto den = poles_to_poly(poles);
        auto [eta, resid] = solve_eta(work, rho, den, m);
        return PoleRefit{p, std::move(eta), resid};
    };

    PoleRefit best = eval(lo);
    const int grid_points = 35;
    for (int i = 1; i < grid_points; ++i) {
        PoleRefit cand = eval(lo + (hi - lo) * i / (grid_points - 1));
        if (cand.cost < best.cost) best = std::move(cand);
    }
    constexpr double gr = 0.61803398874989484820;
    double a = std::max(lo, best.pole - 0.03), b = std::min(hi, best.pole + 0.03);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    PoleRefit f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 35; ++it) {
        if (f1.cost < f2.cost) {
            b = x2;
            x2 = x1;
            f2 = std::move(f1);
            x1 = b - gr * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = std::move(f2);
            x2 = a + gr * (b - a);
            f2 = eval(x2);
        }
    }
    PoleRefit refined = f1.cost < f2.cost ? std::move(f1) : std::move(f2);
    if (refined.cost < best.cost) best = std::move(refined);
    PoleRefit current = eval(current_pole);
    return current.cost <= best.cost ? std::move(current) : std::move(best);
}

} // namespace

ControllerBasis pi_basis(double ts) {
    ControllerBasis b;
    b.class_name = "PI";
    b.basis.push_back(TransferFunction::constant(1.0, ts));
    b.basis.push_back(TransferFunction({1.0, 0.0}, {1.0, -1.0}, ts)); // z/(z-1)
    return b;
}

ControllerBasis pid_basis(double ts) {
    ControllerBasis b = pi_basis(ts);
    b.class_name = "PID";
    b.basis.push_back(TransferFunction({1.0, -1.0}, {1.0, 0.0}, ts)); // (z-1)/z
    return b;
}

TransferFunction controller_tf(const ControllerParams& rho, const ControllerBasis& basis) {
    if (static_cast<std::size_t>(rho.size()) != basis.size())
        throw Error("rho dimension does not match basis");
    TransferFunction acc = tf_scale(basis.basis[0], rho[0]);
    for (std::size_t i = 1; i < basis.size(); ++i)
        acc = tf_add(acc, tf_scale(basis.basis[i], rho[static_cast<Eigen::Index>(i)]));
    return acc;
}

TransferFunction flexible_td(const std::vector<double>& eta, const std::vector<double>& poles,
                             double sample_time) {
    return TransferFunction(eta, poles_to_poly(poles), sample_time);
}

TransferFunction design_filter(const TransferFunction& td) {
    return tf_mul(td, tf_sub_from_one(td));
}

Signal filtered_virtual_error(const Signal& y, const TransferFunction& td,
                              const TransferFunction& filter) {
    const TransferFunction one_minus_td = tf_sub_from_one(td);
    if (same_coeffs(filter.num(), design_filter(td).num()) &&
        same_coeffs(filter.den(), design_filter(td).den())) {
        return simulate(tf_mul(one_minus_td, one_minus_td), y);
    }
    const TransferFunction composed = tf_mul(filter, tf_mul(one_minus_td, tf_invert(td)));
    if (!composed.is_causal())
        throw NotProper("filter does not make the virtual-error composition proper");
    return simulate(composed, y);
}

ControllerParams vrft_ls(const DataSet& data, const TransferFunction& td,
                         const ControllerBasis& basis, const TransferFunction& filter) {
    const Signal ul = simulate(filter, data.u);
    const Signal el = filtered_virtual_error(data.y, td, filter);
    return solve_ls(basis_regressor(basis, el), to_vec(ul));
}

ControllerParams vrft_iv(const DataSet& data1, const DataSet& data2, const TransferFunction& td,
                         const ControllerBasis& basis, const TransferFunction& filter) {
    if (data1.u.size() != data2.u.size()) throw Error("IV batches must have equal length");
    const Signal ul = simulate(filter, data1.u);
    const Eigen::MatrixXd phi1 = basis_regressor(basis, filtered_virtual_error(data1.y, td, filter));
    const Eigen::MatrixXd phi2 = basis_regressor(basis, filtered_virtual_error(data2.y, td, filter));
    const Eigen::MatrixXd m = phi2.transpose() * phi1;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) throw SingularRegressor("near-singular instrument cross-moment");
    return lu.solve(phi2.transpose() * to_vec(ul));
}

double cost_jvr(const ControllerParams& rho, const DataSet& data, const TransferFunction& td,
                const ControllerBasis& basis, const TransferFunction& filter) {
    const Signal ul = simulate(filter, data.u);
    const Signal el = filtered_virtual_error(data.y, td, filter);
    const Eigen::MatrixXd phi = basis_regressor(basis, el);
    return (to_vec(ul) - phi * rho).squaredNorm();
}

JvrCache::JvrCache(const DataSet& data, const TransferFunction& td, const ControllerBasis& basis,
                   const TransferFunction& filter) {
    const Signal ul = simulate(filter, data.u);
    const Signal el = filtered_virtual_error(data.y, td, filter);
    const Eigen::MatrixXd phi = basis_regressor(basis, el);
    const Eigen::VectorXd t = to_vec(ul);
    gram_ = phi.transpose() * phi;
    cross_ = phi.transpose() * t;
    offset_ = t.squaredNorm();
}

double JvrCache::operator()(const ControllerParams& rho) const {
    return rho.dot(gram_ * rho) - 2.0 * cross_.dot(rho) + offset_;
}

VrftFlexibleResult vrft_flexible(const DataSet& data, const FlexibleReferenceModel& flex,
                                 const ControllerBasis& basis, int max_alternations, double tol,
                                 const std::optional<DataSet>& iv_data) {
    if (flex.eta.empty() || flex.poles.empty()) throw Error("flexible reference model is empty");
    const int m = static_cast<int>(flex.eta.size());

    // free pole = smallest magnitude; the rest stay fixed
    std::size_t free_idx = 0;
    for (std::size_t i = 1; i < flex.poles.size(); ++i)
        if (std::abs(flex.poles[i]) < std::abs(flex.poles[free_idx])) free_idx = i;
    std::vector<double> fixed_poles;
    double dominant = 0.0;
    for (std::size_t i = 0; i < flex.poles.size(); ++i) {
        if (i != free_idx) {
            fixed_poles.push_back(flex.poles[i]);
            dominant = std::max(dominant, std::abs(flex.poles[i]));
        }
    }
    double pole = flex.poles[free_idx];
    const double pole_hi = std::max(pole, dominant - 0.02);
    const double pole_lo = 0.0;

    FlexibleWork work(data, basis);

    // standard filtered VRFT against Td(eta0) seeds rho
    const TransferFunction td0 = flexible_td(flex.eta, flex.poles, flex.sample_time);
    const TransferFunction l0 = design_filter(td0);
    ControllerParams rho =
        iv_data ? vrft_iv(data, *iv_data, td0, basis, l0) : vrft_ls(data, td0, basis, l0);

    PoleRefit state = refit_pole(work, rho, fixed_poles, pole, pole_lo, pole_hi, m);
    pole = state.pole;
    Eigen::VectorXd eta = state.eta;
    double cost = state.cost;

    int alternations = 0;
    int increases = 0;
    for (int alt = 0; alt < max_alternations; ++alt) {
        std::vector<double> poles = fixed_poles;
        poles.push_back(pole);
        const auto den = poles_to_poly(poles);

        auto [rho_next, cost_rho] = solve_rho(work, eta, den);
        rho = rho_next;

        PoleRefit next = refit_pole(work, rho, fixed_poles, pole, pole_lo, pole_hi, m);
        pole = next.pole;
        eta = next.eta;
        ++alternations;

        if (next.cost > cost * (1.0 + 1e-12)) {
            if (++increases >= 3) throw AlternationDiverged("flexible criterion diverged");
        } else {
            increases = 0;
        }
        const double drop = cost - next.cost;
        cost = next.cost;
        if (drop >= 0.0 && drop < tol) break;
    }

    VrftFlexibleResult out;
    std::vector<double> final_poles = fixed_poles;
    final_poles.push_back(pole);
    out.eta.assign(eta.data(), eta.data() + eta.size());
    out.rho = rho;
    out.td = flexible_td(out.eta, final_poles, flex.sample_time);
    out.free_pole = pole;
    out.cost = cost;
    out.alternations = alternations;
    return out;
}

} // namespace vrft
