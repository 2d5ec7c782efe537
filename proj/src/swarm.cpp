#include "vrft/swarm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "vrft/errors.hpp"
#include "vrft/rng.hpp"

namespace vrft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const SearchSpace& space, const SwarmConfig& config) {
    if (!(space.lower < space.upper)) throw Error("search space requires lower < upper");
    if (space.dim < 1) throw Error("search space dimension must be >= 1");
    if (config.agents < 4) throw Error("swarm needs at least 4 agents");
    if (config.max_iterations < 1) throw Error("max_iterations must be >= 1");
}

double spawn_radius(const SearchSpace& space) {
    return std::abs(std::max(space.lower, space.upper)) / 2.0;
}

Eigen::VectorXd clip(Eigen::VectorXd x, const SearchSpace& space) {
    for (Eigen::Index d = 0; d < x.size(); ++d)
        x[d] = std::clamp(x[d], space.lower, space.upper);
    return x;
}

std::vector<Eigen::VectorXd> uniform_spawn(const SearchSpace& space, int agents, Rng& rng) {
    std::vector<Eigen::VectorXd> out(agents);
    for (auto& x : out) {
        x.resize(space.dim);
        for (int d = 0; d < space.dim; ++d) x[d] = rng.uniform(space.lower, space.upper);
    }
    return out;
}

// Evaluates all candidates; non-finite costs become +inf. The draw phase is
// finished before this runs, so parallel scheduling cannot change results.
std::vector<double> evaluate_all(const CostFunction& f, const std::vector<Eigen::VectorXd>& xs,
                                 int threads, long& evaluations) {
    std::vector<double> costs(xs.size(), kInf);
    const auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const double c = f(xs[i]);
            costs[i] = std::isfinite(c) ? c : kInf;
        }
    };
    const int nthreads = std::min<int>(threads, static_cast<int>(xs.size()));
    if (nthreads <= 1) {
        eval_range(0, xs.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        const std::size_t chunk = (xs.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            const std::size_t lo = t * chunk;
            const std::size_t hi = std::min(xs.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(eval_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    evaluations += static_cast<long>(xs.size());
    return costs;
}

std::vector<Eigen::VectorXd> initial_or_uniform(const std::vector<Eigen::VectorXd>& initial,
                                                const SearchSpace& space, int agents, Rng& rng) {
    if (initial.empty()) return uniform_spawn(space, agents, rng);
    if (static_cast<int>(initial.size()) != agents)
        throw Error("initial position count does not match agents");
    for (const auto& x : initial)
        if (x.size() != space.dim) throw Error("initial position dimension mismatch");
    return initial;
}

struct BestTracker {
    Eigen::VectorXd position;
    double cost = kInf;

    void offer(const Eigen::VectorXd& x, double c) {
        if (c < cost) {
            cost = c;
            position = x;
        }
    }
};

} // namespace

std::vector<Eigen::VectorXd> center_spawn(const Eigen::VectorXd& center, const SearchSpace& space,
                                          int agents, std::uint64_t seed) {
    if (center.size() != space.dim) throw Error("center dimension does not match space");
    Rng rng(seed);
    const double radius = spawn_radius(space);
    std::vector<Eigen::VectorXd> out(agents);
    for (auto& x : out) {
        x.resize(space.dim);
        for (int d = 0; d < space.dim; ++d) x[d] = center[d] + radius * rng.uniform();
        x = clip(std::move(x), space);
    }
    return out;
}

OptResult pso(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions) {
    check_config(space, config);
    Rng rng(config.seed);
    const int n = config.agents;
    const double vspan = spawn_radius(space);

    std::vector<Eigen::VectorXd> x = initial_or_uniform(initial_positions, space, n, rng);
    std::vector<Eigen::VectorXd> v(n);
    for (auto& vi : v) {
        vi.resize(space.dim);
        for (int d = 0; d < space.dim; ++d) vi[d] = rng.uniform(-vspan, vspan);
    }

    OptResult result;
    std::vector<double> cost = evaluate_all(f, x, config.threads, result.evaluations);
    std::vector<Eigen::VectorXd> pbest = x;
    std::vector<double> pbest_cost = cost;
    BestTracker best;
    for (int i = 0; i < n; ++i) best.offer(x[i], cost[i]);

    result.history.reserve(config.max_iterations);
    for (int it = 0; it < config.max_iterations; ++it) {
        const double frac =
            config.max_iterations > 1 ? static_cast<double>(it) / (config.max_iterations - 1) : 0.0;
        const double w = config.pso.inertia_max - (config.pso.inertia_max - config.pso.inertia_min) * frac;
        for (int i = 0; i < n; ++i) {
            for (int d = 0; d < space.dim; ++d) {
                const double r1 = rng.uniform();
                const double r2 = rng.uniform();
                v[i][d] = w * v[i][d] + config.pso.cognitive * r1 * (pbest[i][d] - x[i][d]) +
                          config.pso.social * r2 * (best.position[d] - x[i][d]);
            }
            x[i] = clip(x[i] + v[i], space);
        }
        cost = evaluate_all(f, x, config.threads, result.evaluations);
        for (int i = 0; i < n; ++i) {
            if (cost[i] < pbest_cost[i]) {
                pbest_cost[i] = cost[i];
                pbest[i] = x[i];
            }
            best.offer(x[i], cost[i]);
        }
        result.history.push_back(best.cost);
    }
    result.best_position = best.position;
    result.best_cost = best.cost;
    return result;
}

OptResult abc(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions) {
    check_config(space, config);
    Rng rng(config.seed);
    const int n = config.agents;
    const double accel = config.abc.acceleration;

    std::vector<Eigen::VectorXd> x = initial_or_uniform(initial_positions, space, n, rng);
    OptResult result;
    std::vector<double> cost = evaluate_all(f, x, config.threads, result.evaluations);
    std::vector<int> trials(n, 0);
    BestTracker best;
    for (int i = 0; i < n; ++i) best.offer(x[i], cost[i]);

    const auto fitness = [](double c) { return c >= 0.0 ? 1.0 / (1.0 + c) : 1.0 + std::abs(c); };

    const auto neighbor_candidate = [&](int i, int source) {
        const int dim = rng.uniform_int(space.dim);
        int partner = rng.uniform_int(n - 1);
        if (partner >= i) ++partner;
        const double phi = rng.uniform(-accel, accel);
        Eigen::VectorXd cand = x[source];
        cand[dim] += phi * (x[source][dim] - x[partner][dim]);
        return clip(std::move(cand), space);
    };

    result.history.reserve(config.max_iterations);
    for (int it = 0; it < config.max_iterations; ++it) {
        // employed bees: one candidate per source, drawn against the current generation
        std::vector<Eigen::VectorXd> cands(n);
        for (int i = 0; i < n; ++i) cands[i] = neighbor_candidate(i, i);
        std::vector<double> cand_cost = evaluate_all(f, cands, config.threads, result.evaluations);
        for (int i = 0; i < n; ++i) {
            if (cand_cost[i] < cost[i]) {
                x[i] = cands[i];
                cost[i] = cand_cost[i];
                trials[i] = 0;
            } else {
                ++trials[i];
            }
            best.offer(x[i], cost[i]);
        }

        // onlooker bees: roulette wheel on the fitness transform
        double fit_sum = 0.0;
        std::vector<double> fit(n);
        for (int i = 0; i < n; ++i) {
            fit[i] = fitness(cost[i]);
            fit_sum += fit[i];
        }
        std::vector<int> chosen(n, 0);
        std::vector<Eigen::VectorXd> ocands(n);
        for (int k = 0; k < n; ++k) {
            double ticket = rng.uniform() * fit_sum;
            int sel = n - 1;
            for (int i = 0; i < n; ++i) {
                ticket -= fit[i];
                if (ticket <= 0.0) {
                    sel = i;
                    break;
                }
            }
            chosen[k] = sel;
            ocands[k] = neighbor_candidate(sel, sel);
        }
        cand_cost = evaluate_all(f, ocands, config.threads, result.evaluations);
        for (int k = 0; k < n; ++k) {
            const int s = chosen[k];
            if (cand_cost[k] < cost[s]) {
                x[s] = ocands[k];
                cost[s] = cand_cost[k];
                trials[s] = 0;
            } else {
                ++trials[s];
            }
            best.offer(x[s], cost[s]);
        }

        // scouts: abandon exhausted sources
        std::vector<int> scout_idx;
        std::vector<Eigen::VectorXd> scouts;
        for (int i = 0; i < n; ++i) {
            if (trials[i] > config.abc.abandonment_limit) {
                Eigen::VectorXd fresh(space.dim);
                for (int d = 0; d < space.dim; ++d) fresh[d] = rng.uniform(space.lower, space.upper);
                scout_idx.push_back(i);
                scouts.push_back(std::move(fresh));
            }
        }
        if (!scouts.empty()) {
            cand_cost = evaluate_all(f, scouts, config.threads, result.evaluations);
            for (std::size_t k = 0; k < scouts.size(); ++k) {
                const int i = scout_idx[k];
                x[i] = scouts[k];
                cost[i] = cand_cost[k];
                trials[i] = 0;
                best.offer(x[i], cost[i]);
            }
        }
        result.history.push_back(best.cost);
    }
    result.best_position = best.position;
    result.best_cost = best.cost;
    return result;
}

namespace {

// Leader-guided candidate position shared by GWO and I-GWO.
Eigen::VectorXd gwo_candidate(const Eigen::VectorXd& x, const Eigen::VectorXd* leaders[3],
                              double a, const SearchSpace& space, Rng& rng) {
    Eigen::VectorXd cand(x.size());
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        double acc = 0.0;
        for (int l = 0; l < 3; ++l) {
            const double A = 2.0 * a * rng.uniform() - a;
            const double C = 2.0 * rng.uniform();
            const double lead = (*leaders[l])[d];
            acc += lead - A * std::abs(C * lead - x[d]);
        }
        cand[d] = acc / 3.0;
    }
    return clip(std::move(cand), space);
}

struct LeaderSet {
    Eigen::VectorXd alpha, beta, delta;
    double alpha_cost = kInf, beta_cost = kInf, delta_cost = kInf;

    void offer(const Eigen::VectorXd& x, double c) {
        if (c < alpha_cost) {
            delta = beta;
            delta_cost = beta_cost;
            beta = alpha;
            beta_cost = alpha_cost;
            alpha = x;
            alpha_cost = c;
        } else if (c < beta_cost) {
            delta = beta;
            delta_cost = beta_cost;
            beta = x;
            beta_cost = c;
        } else if (c < delta_cost) {
            delta = x;
            delta_cost = c;
        }
    }
};

} // namespace

OptResult gwo(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
              const std::vector<Eigen::VectorXd>& initial_positions) {
    check_config(space, config);
    Rng rng(config.seed);
    const int n = config.agents;

    std::vector<Eigen::VectorXd> x = initial_or_uniform(initial_positions, space, n, rng);
    OptResult result;
    std::vector<double> cost = evaluate_all(f, x, config.threads, result.evaluations);
    LeaderSet leaders;
    for (int i = 0; i < n; ++i) leaders.offer(x[i], cost[i]);

    result.history.reserve(config.max_iterations);
    for (int it = 0; it < config.max_iterations; ++it) {
        const double a = 2.0 - 2.0 * static_cast<double>(it) / config.max_iterations;
        const Eigen::VectorXd* lead[3] = {&leaders.alpha, &leaders.beta, &leaders.delta};
        for (int i = 0; i < n; ++i) x[i] = gwo_candidate(x[i], lead, a, space, rng);
        cost = evaluate_all(f, x, config.threads, result.evaluations);
        for (int i = 0; i < n; ++i) leaders.offer(x[i], cost[i]);
        result.history.push_back(leaders.alpha_cost);
    }
    result.best_position = leaders.alpha;
    result.best_cost = leaders.alpha_cost;
    return result;
}

OptResult igwo(const CostFunction& f, const SearchSpace& space, const SwarmConfig& config,
               const std::vector<Eigen::VectorXd>& initial_positions) {
    check_config(space, config);
    Rng rng(config.seed);
    const int n = config.agents;

    std::vector<Eigen::VectorXd> x = initial_or_uniform(initial_positions, space, n, rng);
    OptResult result;
    std::vector<double> cost = evaluate_all(f, x, config.threads, result.evaluations);
    LeaderSet leaders;
    for (int i = 0; i < n; ++i) leaders.offer(x[i], cost[i]);

    result.history.reserve(config.max_iterations);
    for (int it = 0; it < config.max_iterations; ++it) {
        const double a = 2.0 - 2.0 * static_cast<double>(it) / config.max_iterations;
        const Eigen::VectorXd* lead[3] = {&leaders.alpha, &leaders.beta, &leaders.delta};

        // draw phase: one leader-guided and one dimension-learning candidate per wolf
        std::vector<Eigen::VectorXd> cand_gwo(n), cand_dlh(n);
        for (int i = 0; i < n; ++i) {
            cand_gwo[i] = gwo_candidate(x[i], lead, a, space, rng);
            const double radius = (x[i] - cand_gwo[i]).norm();

            std::vector<int> neighborhood;
            double nearest_dist = kInf;
            int nearest = i;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dist = (x[i] - x[j]).norm();
                if (dist <= radius) neighborhood.push_back(j);
                if (dist < nearest_dist) {
                    nearest_dist = dist;
                    nearest = j;
                }
            }
            if (neighborhood.empty()) neighborhood.push_back(nearest);

            Eigen::VectorXd dlh(space.dim);
            for (int d = 0; d < space.dim; ++d) {
                const int nb = neighborhood[rng.uniform_int(static_cast<int>(neighborhood.size()))];
                const int rw = rng.uniform_int(n);
                dlh[d] = x[i][d] + rng.uniform() * (x[nb][d] - x[rw][d]);
            }
            cand_dlh[i] = clip(std::move(dlh), space);
        }

        const std::vector<double> cost_gwo =
            evaluate_all(f, cand_gwo, config.threads, result.evaluations);
        const std::vector<double> cost_dlh =
            evaluate_all(f, cand_dlh, config.threads, result.evaluations);

        for (int i = 0; i < n; ++i) {
            const bool take_gwo = cost_gwo[i] <= cost_dlh[i];
            const double cand_cost = take_gwo ? cost_gwo[i] : cost_dlh[i];
            if (cand_cost < cost[i]) {
                x[i] = take_gwo ? cand_gwo[i] : cand_dlh[i];
                cost[i] = cand_cost;
            }
            leaders.offer(x[i], cost[i]);
        }
        result.history.push_back(leaders.alpha_cost);
    }
    result.best_position = leaders.alpha;
    result.best_cost = leaders.alpha_cost;
    return result;
}

OptResult optimize(Algorithm which, const CostFunction& f, const SearchSpace& space,
                   const SwarmConfig& config,
                   const std::vector<Eigen::VectorXd>& initial_positions) {
    switch (which) {
        case Algorithm::PSO: return pso(f, space, config, initial_positions);
        case Algorithm::ABC: return abc(f, space, config, initial_positions);
        case Algorithm::GWO: return gwo(f, space, config, initial_positions);
        case Algorithm::IGWO: return igwo(f, space, config, initial_positions);
    }
    throw Error("unknown algorithm");
}

const char* algorithm_name(Algorithm which) {
    switch (which) {
        case Algorithm::PSO: return "pso";
        case Algorithm::ABC: return "abc";
        case Algorithm::GWO: return "gwo";
        case Algorithm::IGWO: return "igwo";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "pso") return Algorithm::PSO;
    if (name == "abc") return Algorithm::ABC;
    if (name == "gwo") return Algorithm::GWO;
    if (name == "igwo") return Algorithm::IGWO;
    throw Error("unknown algorithm name: " + name);
}

int convergence_iteration(const std::vector<double>& history, double delta) {
    if (history.empty()) throw Error("empty history");
    const int n = static_cast<int>(history.size());
    if (n == 1) return 0;
    int last_big = -1;
    for (int j = 1; j < n; ++j)
        if (history[j - 1] - history[j] >= delta) last_big = j;
    if (last_big == n - 1) return n - 1; // still improving at the end
    return std::max(1, last_big + 1);
}

} // namespace vrft
