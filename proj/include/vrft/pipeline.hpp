#pragma once

#include <optional>

#include "vrft/robustness.hpp"
#include "vrft/swarm.hpp"
#include "vrft/sysid.hpp"
#include "vrft/vrft.hpp"

namespace vrft {

struct DesignSpec {
    TransferFunction td_initial;                    // minimum-phase reference model
    std::optional<FlexibleReferenceModel> flexible; // used when the probe IR looks NMP
    ControllerBasis basis;
    RobustnessSpec robustness;
    SearchSpace space;
    SwarmConfig swarm;
    Algorithm algorithm = Algorithm::IGWO;
    int flexible_alternations = 0; // forwarded to vrft_flexible
    int report_ir_order = 200;     // M for the reported (step-1/final) estimates
};

struct DesignResult {
    ControllerParams rho_step1;
    double ms_step1 = 0.0;
    bool used_flexible = false;
    TransferFunction td_used;
    KernelParams kernel; // frozen for every in-loop sensitivity estimate

    bool step2_ran = false;
    ControllerParams rho_final;
    double ms_final = 0.0;
    double jvr_final = 0.0;
    double jsi_final = 0.0;
    bool feasible = true; // penalty exactly zero at the returned optimum
    int iterations_to_converge = 0;
    std::vector<double> history;
    long evaluations = 0;
    double step2_seconds = 0.0;
};

// J^SI = J^VR + c * H(Ms_hat). Reference evaluation path; the optimizer runs
// on the cached equivalents.
double cost_jsi(const ControllerParams& rho, const DataSet& data, const TransferFunction& td,
                const ControllerBasis& basis, const TransferFunction& filter,
                const RobustnessSpec& robustness, const KernelParams& kernel);

DesignResult step1(const DataSet& data, const std::optional<DataSet>& iv_data,
                   const ImpulseResponseEstimate& probe_ir, const DesignSpec& spec);

void step2(const DataSet& data, DesignResult& result, const DesignSpec& spec);

DesignResult design(const DataSet& data, const std::optional<DataSet>& iv_data,
                    const ImpulseResponseEstimate& probe_ir, const DesignSpec& spec);

} // namespace vrft
