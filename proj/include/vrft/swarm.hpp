#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "vrft/lti.hpp"

namespace vrft {

struct SearchSpace {
    double lower = 0.0; // applied per dimension
    double upper = 1.0;
    int dim = 1;
};

struct PsoParams {
    double cognitive = 1.49; // C1
    double social = 1.49;    // C2
    double inertia_min = 0.1;
    double inertia_max = 1.1;
};

struct AbcParams {
    int abandonment_limit = 90; // L
    double acceleration = 1.0;  // a
};

struct SwarmConfig {
    int agents = 50;
    int max_iterations = 100;
    std::uint64_t seed = 1;
    PsoParams pso;
    AbcParams abc;
    int threads = 1; // parallel cost evaluation within one generation
};

struct OptResult {
    Eigen::VectorXd best_position;
    double best_cost = 0.0;
    std::vector<double> history; // best cost after each iteration, non-increasing
    long evaluations = 0;
};

using CostFunction = std::function<double(const Eigen::VectorXd&)>;

// Initial agent positions around a center: center + R * U(0,1) per dimension,
// R = |max(lower, upper)| / 2, clipped to the box.
std::vector<Eigen::VectorXd> center_spawn(const Eigen::VectorXd& center, const SearchSpace& space,
                                          int agents, std::uint64_t seed);

OptResult pso(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions = {});
OptResult abc(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions = {});
OptResult gwo(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions = {});
OptResult igwo(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
               const std::vector<Eigen::VectorXd>& initial_positions = {});

enum class Algorithm { PSO, ABC, GWO, IGWO };

OptResult optimize(Algorithm which, const CostFunction& f, const SearchSpace& space,
                   const SwarmConfig& config,
                   const std::vector<Eigen::VectorXd>& initial_positions = {});

const char* algorithm_name(Algorithm which);
Algorithm algorithm_from_name(const std::string& name);

// First index whose trailing consecutive decreases all stay below delta.
int convergence_iteration(const std::vector<double>& history, double delta);

} // namespace vrft
