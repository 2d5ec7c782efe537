#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vrft/lti.hpp"

namespace vrft {

using ControllerParams = Eigen::VectorXd;

// Linearly parameterized controller class C(z, rho) = rho' Cbar(z).
struct ControllerBasis {
    std::vector<TransferFunction> basis;
    std::string class_name;

    std::size_t size() const { return basis.size(); }
};

ControllerBasis pi_basis(double sample_time = 1.0);
ControllerBasis pid_basis(double sample_time = 1.0);

// rho' Cbar(z) over the product of the basis denominators, uncancelled.
TransferFunction controller_tf(const ControllerParams& rho, const ControllerBasis& basis);

// Reference model family Td(z, eta) = eta' F(z): monomial numerator basis
// over the fixed denominator prod (z - p). The smallest-magnitude pole is the
// free one refit during the flexible criterion.
struct FlexibleReferenceModel {
    std::vector<double> eta;   // initial numerator coefficients, descending powers
    std::vector<double> poles; // denominator roots
    double sample_time = 1.0;
};

TransferFunction flexible_td(const std::vector<double>& eta, const std::vector<double>& poles,
                             double sample_time = 1.0);

struct VrftFlexibleResult {
    std::vector<double> eta;
    ControllerParams rho;
    TransferFunction td; // Td(z, eta_hat), unit DC gain
    double free_pole = 0.0;
    double cost = 0.0;
    int alternations = 0;
};

// L = Td (1 - Td): the filter condition with the spectral ratio taken as 1.
TransferFunction design_filter(const TransferFunction& td);

// e_L = L (Td^{-1} - 1) y. For the default L = Td (1 - Td) the composition is
// simplified analytically to (1 - Td)^2; any other proper composition is
// simulated as-is, improper compositions are rejected.
Signal filtered_virtual_error(const Signal& y, const TransferFunction& td,
                              const TransferFunction& filter);

ControllerParams vrft_ls(const DataSet& data, const TransferFunction& td,
                         const ControllerBasis& basis, const TransferFunction& filter);

// Instrumental-variables estimate from two batches with identical reference
// sequences; the second batch's regressor is the instrument.
ControllerParams vrft_iv(const DataSet& data1, const DataSet& data2, const TransferFunction& td,
                         const ControllerBasis& basis, const TransferFunction& filter);

// Alternating least squares on the bilinear flexible criterion
//   J(eta, rho) = || eta'F(z) (u + rho'Cbar y) - rho'Cbar y ||^2
// with the reference model constrained to unit DC gain and the free
// denominator pole refit by a scalar line search after each eta-solve.
// rho is initialized by the standard filtered VRFT against Td(eta0);
// max_alternations = 0 keeps that rho and only refits the reference model.
VrftFlexibleResult vrft_flexible(const DataSet& data, const FlexibleReferenceModel& flex,
                                 const ControllerBasis& basis, int max_alternations = 50,
                                 double tol = 1e-9,
                                 const std::optional<DataSet>& iv_data = std::nullopt);

// ||u_L - Phi rho||^2 (sum of squares).
double cost_jvr(const ControllerParams& rho, const DataSet& data, const TransferFunction& td,
                const ControllerBasis& basis, const TransferFunction& filter);

// Precomputed quadratic form of cost_jvr for repeated evaluation.
class JvrCache {
public:
    JvrCache(const DataSet& data, const TransferFunction& td, const ControllerBasis& basis,
             const TransferFunction& filter);
    double operator()(const ControllerParams& rho) const;

private:
    Eigen::MatrixXd gram_;
    Eigen::VectorXd cross_;
    double offset_;
};

} // namespace vrft
