#pragma once
// Mixing-distribution estimation for the latent mismatch proportion Q.
// Within each conditioning cell the observed (K, M) pairs are a binomial
// mixture; the mixing density is recovered by marginal maximum likelihood
// under either a conjugate Beta family or a penalized exponential-family
// spline on a fixed support grid.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sievecox/datamodel.hpp"
#include "sievecox/errors.hpp"
#include "sievecox/math.hpp"
#include "sievecox/optim.hpp"

namespace sievecox {

// ---------------------------------------------------------------------------
// Support grid

struct SupportGrid {
    std::vector<double> q;  // strictly increasing, inside (0,1)

    // G interval midpoints (g - 0.5) / G; excludes the endpoints so Beta
    // densities with shape < 1 stay integrable under the midpoint rule.
    static SupportGrid midpoints(int G = 500) {
        if (G < 50)
            throw Error(ErrorCode::DomainError, "support grid needs G >= 50");
        SupportGrid grid;
        grid.q.resize(std::size_t(G));
        for (int g = 0; g < G; ++g)
            grid.q[std::size_t(g)] = (double(g) + 0.5) / double(G);
        return grid;
    }

    std::size_t size() const { return q.size(); }
};

// ---------------------------------------------------------------------------
// Beta-binomial marginal

// log P(K = k | M = m) when Q ~ Beta(alpha, beta) and K | Q ~ Binomial(m, Q).
// Includes the binomial coefficient: constant in (alpha, beta), so the MLE is
// unchanged, and reported log-likelihoods stay comparable across families.
inline double betabinom_logpmf(long long k, long long m, double alpha,
                               double beta) {
    if (k < 0 || k > m || m < 0)
        throw Error(ErrorCode::DomainError, "betabinom requires 0 <= k <= m");
    if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
        !std::isfinite(beta))
        throw Error(ErrorCode::DomainError,
                    "betabinom requires finite alpha, beta > 0");
    return log_choose(m, k) +
           log_beta(double(k) + alpha, double(m - k) + beta) -
           log_beta(alpha, beta);
}

// ---------------------------------------------------------------------------
// Cell observations

// (K, M) pairs for one conditioning cell, deduplicated with multiplicities so
// bootstrap resamples do not pay for repeated rows.
struct CellObservations {
    std::vector<long long> k;
    std::vector<long long> m;
    std::vector<double> weight;

    std::size_t unique_count() const { return k.size(); }
    double total_weight() const {
        return std::accumulate(weight.begin(), weight.end(), 0.0);
    }

    static CellObservations from_pairs(
        std::vector<std::pair<long long, long long>> pairs) {
        std::sort(pairs.begin(), pairs.end());
        CellObservations obs;
        for (std::size_t i = 0; i < pairs.size();) {
            std::size_t j = i;
            while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
            obs.k.push_back(pairs[i].first);
            obs.m.push_back(pairs[i].second);
            obs.weight.push_back(double(j - i));
            i = j;
        }
        return obs;
    }
};

// ---------------------------------------------------------------------------
// Beta family fit

struct BetaPrior {
    double alpha = 1.0;
    double beta = 1.0;
    double loglik = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool boundary = false;  // clamped at [1e-4, 1e4]
};

namespace detail {

constexpr double kBetaParamLo = 1e-4;
constexpr double kBetaParamHi = 1e4;

inline double betabinom_cell_loglik(const CellObservations& obs, double alpha,
                                    double beta, Eigen::VectorXd* grad_ab) {
    double value = 0.0;
    double ga = 0.0, gb = 0.0;
    const double dig_a = digamma(alpha);
    const double dig_b = digamma(beta);
    const double dig_ab = digamma(alpha + beta);
    for (std::size_t i = 0; i < obs.k.size(); ++i) {
        const double w = obs.weight[i];
        const double k = double(obs.k[i]);
        const double mk = double(obs.m[i] - obs.k[i]);
        value += w * (log_choose(obs.m[i], obs.k[i]) +
                      log_beta(k + alpha, mk + beta) - log_beta(alpha, beta));
        if (grad_ab) {
            const double dig_mab = digamma(double(obs.m[i]) + alpha + beta);
            ga += w * (digamma(k + alpha) - dig_mab - dig_a + dig_ab);
            gb += w * (digamma(mk + beta) - dig_mab - dig_b + dig_ab);
        }
    }
    if (grad_ab) {
        grad_ab->resize(2);
        (*grad_ab)(0) = ga;
        (*grad_ab)(1) = gb;
    }
    return value;
}

// Method-of-moments style starting point; deterministic.
inline std::pair<double, double> beta_moment_init(const CellObservations& obs) {
    double sw = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < obs.k.size(); ++i) {
        if (obs.m[i] == 0) continue;
        mean += obs.weight[i] * double(obs.k[i]) / double(obs.m[i]);
        sw += obs.weight[i];
    }
    mean = sw > 0.0 ? mean / sw : 0.5;
    double var = 0.0;
    for (std::size_t i = 0; i < obs.k.size(); ++i) {
        if (obs.m[i] == 0) continue;
        const double d = double(obs.k[i]) / double(obs.m[i]) - mean;
        var += obs.weight[i] * d * d;
    }
    var = sw > 1.0 ? var / (sw - 1.0) : 0.0;
    mean = std::clamp(mean, 1e-3, 1.0 - 1e-3);
    var = std::clamp(var, 1e-6, mean * (1.0 - mean) * 0.999);
    const double s = std::clamp(mean * (1.0 - mean) / var - 1.0, 0.5, 100.0);
    return {std::max(mean * s, 1e-2), std::max((1.0 - mean) * s, 1e-2)};
}

}  // namespace detail

// Marginal MLE of (alpha, beta); optimizes on the log scale so the search is
// unconstrained, then clamps to [1e-4, 1e4] with a boundary flag.
inline BetaPrior fit_beta_prior(const CellObservations& obs) {
    std::size_t usable = 0;
    for (std::size_t i = 0; i < obs.k.size(); ++i)
        if (obs.m[i] >= 1) usable += std::size_t(obs.weight[i] + 0.5);
    if (usable < 2)
        throw Error(ErrorCode::InsufficientCell,
                    "beta prior fit needs at least 2 observations with M >= 1");

    const auto [a0, b0] = detail::beta_moment_init(obs);
    Eigen::VectorXd x0(2);
    x0 << std::log(a0), std::log(b0);

    auto objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
        const double alpha =
            std::clamp(std::exp(u(0)), 1e-8, 1e8);  // guard the line search
        const double beta = std::clamp(std::exp(u(1)), 1e-8, 1e8);
        Eigen::VectorXd gab;
        const double value = detail::betabinom_cell_loglik(obs, alpha, beta, &gab);
        grad.resize(2);
        grad(0) = gab(0) * alpha;
        grad(1) = gab(1) * beta;
        return value;
    };

    OptimOptions opts;
    opts.grad_tol = 1e-6;
    opts.max_iter = 500;
    const OptimResult res = bfgs_maximize(objective, x0, opts);

    BetaPrior prior;
    prior.alpha = std::exp(res.x(0));
    prior.beta = std::exp(res.x(1));
    prior.iterations = res.iterations;
    prior.grad_inf_norm = res.grad_inf_norm;
    prior.converged = res.converged;
    if (prior.alpha < detail::kBetaParamLo || prior.alpha > detail::kBetaParamHi ||
        prior.beta < detail::kBetaParamLo || prior.beta > detail::kBetaParamHi) {
        prior.boundary = true;
        prior.alpha = std::clamp(prior.alpha, detail::kBetaParamLo,
                                 detail::kBetaParamHi);
        prior.beta =
            std::clamp(prior.beta, detail::kBetaParamLo, detail::kBetaParamHi);
    }
    prior.loglik =
        detail::betabinom_cell_loglik(obs, prior.alpha, prior.beta, nullptr);
    return prior;
}

// ---------------------------------------------------------------------------
// Natural cubic spline basis

// df columns evaluated at the grid points: a linear column plus truncated
// cubic terms constrained to be linear beyond the boundary knots. Knots sit
// at equally spaced quantiles of the grid. Columns are centered and scaled
// over the grid; constant shifts are absorbed by the normalizer, so this only
// re-parameterizes the coefficients and keeps the ridge penalty on one scale.
inline Eigen::MatrixXd natural_spline_basis(const std::vector<double>& points,
                                            int df) {
    if (df < 2) throw Error(ErrorCode::DomainError, "spline basis needs df >= 2");
    const int n_knots = df + 1;
    const std::size_t n = points.size();
    if (n < std::size_t(n_knots))
        throw Error(ErrorCode::DomainError, "fewer grid points than knots");

    std::vector<double> knots(std::size_t(n_knots));
    for (int j = 0; j < n_knots; ++j) {
        const double p = double(j) / double(n_knots - 1);
        knots[std::size_t(j)] = quantile_type7({points.data(), n}, p);
    }

    const double xi_last = knots.back();
    const double xi_prev = knots[std::size_t(n_knots - 2)];
    auto cube_plus = [](double v) { return v > 0.0 ? v * v * v : 0.0; };
    auto d_term = [&](double x, double xi) {
        return (cube_plus(x - xi) - cube_plus(x - xi_last)) / (xi_last - xi);
    };

    Eigen::MatrixXd basis(Eigen::Index(n), df);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = points[i];
        basis(Eigen::Index(i), 0) = x;
        for (int c = 1; c < df; ++c) {
            const double xi = knots[std::size_t(c - 1)];
            basis(Eigen::Index(i), c) = d_term(x, xi) - d_term(x, xi_prev);
        }
    }
    for (int c = 0; c < df; ++c) {
        const double mean = basis.col(c).mean();
        basis.col(c).array() -= mean;
        const double sd = std::sqrt(basis.col(c).squaredNorm() / double(n - 1));
        if (sd > 0.0) basis.col(c) /= sd;
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Penalized spline marginal likelihood

// Caches the binomial likelihood rows (they do not depend on gamma) so each
// objective evaluation is a pair of passes over an n-by-G matrix.
class SplineLikelihood {
public:
    SplineLikelihood(const SupportGrid& grid, const Eigen::MatrixXd& basis,
                     const CellObservations& obs, double c0)
        : grid_(&grid), basis_(&basis), obs_(&obs), c0_(c0) {
        const std::size_t G = grid.size();
        const std::size_t n = obs.k.size();
        std::vector<double> log_q(G), log_1mq(G);
        for (std::size_t g = 0; g < G; ++g) {
            log_q[g] = std::log(grid.q[g]);
            log_1mq[g] = std::log1p(-grid.q[g]);
        }
        scaled_lik_.resize(n * G);
        row_const_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double k = double(obs.k[i]);
            const double mk = double(obs.m[i] - obs.k[i]);
            double* row = scaled_lik_.data() + i * G;
            double row_max = -std::numeric_limits<double>::infinity();
            for (std::size_t g = 0; g < G; ++g) {
                row[g] = k * log_q[g] + mk * log_1mq[g];
                row_max = std::max(row_max, row[g]);
            }
            for (std::size_t g = 0; g < G; ++g)
                row[g] = std::exp(row[g] - row_max);
            row_const_[i] = log_choose(obs.m[i], obs.k[i]) + row_max;
        }
        mass_.resize(G);
        post_sum_.resize(G);
    }

    double c0() const { return c0_; }

    // value of the penalized marginal log-likelihood and its exact gradient
    double eval(const Eigen::VectorXd& gamma, Eigen::VectorXd& grad) {
        const std::size_t G = grid_->size();
        const std::size_t n = obs_->k.size();

        Eigen::VectorXd eta = (*basis_) * gamma;
        const double eta_max = eta.maxCoeff();
        double norm = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            mass_[g] = std::exp(eta(Eigen::Index(g)) - eta_max);
            norm += mass_[g];
        }
        for (std::size_t g = 0; g < G; ++g) mass_[g] /= norm;

        std::fill(post_sum_.begin(), post_sum_.end(), 0.0);
        double value = 0.0;
        double total_weight = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = obs_->weight[i];
            const double* row = scaled_lik_.data() + i * G;
            double dot = 0.0;
            for (std::size_t g = 0; g < G; ++g) dot += row[g] * mass_[g];
            if (dot <= 0.0) {
                // fully underflowed row: the prior puts ~zero mass where the
                // likelihood lives; treat as an essentially impossible point
                value += w * (row_const_[i] - 700.0);
                continue;
            }
            value += w * (row_const_[i] + std::log(dot));
            const double scale = w / dot;
            for (std::size_t g = 0; g < G; ++g)
                post_sum_[g] += scale * row[g] * mass_[g];
            total_weight += w;
        }

        value -= c0_ * gamma.squaredNorm();

        Eigen::Map<const Eigen::VectorXd> post(post_sum_.data(), Eigen::Index(G));
        Eigen::Map<const Eigen::VectorXd> g_mass(mass_.data(), Eigen::Index(G));
        grad = basis_->transpose() * (post - total_weight * g_mass).eval();
        grad -= 2.0 * c0_ * gamma;
        return value;
    }

    // normalized mass vector for a coefficient vector
    std::vector<double> mass_for(const Eigen::VectorXd& gamma) const {
        Eigen::VectorXd eta = (*basis_) * gamma;
        const double eta_max = eta.maxCoeff();
        std::vector<double> mass(grid_->size());
        double norm = 0.0;
        for (std::size_t g = 0; g < mass.size(); ++g) {
            mass[g] = std::exp(eta(Eigen::Index(g)) - eta_max);
            norm += mass[g];
        }
        for (double& v : mass) v /= norm;
        return mass;
    }

private:
    const SupportGrid* grid_;
    const Eigen::MatrixXd* basis_;
    const CellObservations* obs_;
    double c0_;
    std::vector<double> scaled_lik_;  // n x G, row max scaled to 1
    std::vector<double> row_const_;
    std::vector<double> mass_;
    std::vector<double> post_sum_;
};

inline std::pair<double, Eigen::VectorXd> spline_marginal_loglik(
    const Eigen::VectorXd& gamma, const SupportGrid& grid,
    const Eigen::MatrixXd& basis, const CellObservations& obs, double c0) {
    SplineLikelihood lik(grid, basis, obs, c0);
    Eigen::VectorXd grad;
    const double value = lik.eval(gamma, grad);
    return {value, std::move(grad)};
}

struct SplinePrior {
    Eigen::VectorXd gamma;
    std::vector<double> mass;  // normalized over the grid
    int df = 0;
    double c0 = 0.0;
    double loglik = 0.0;  // penalized objective at the optimum
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline SplinePrior fit_spline_prior(const CellObservations& obs,
                                    const SupportGrid& grid,
                                    const Eigen::MatrixXd& basis, double c0) {
    if (c0 < 0.0)
        throw Error(ErrorCode::DomainError, "penalty weight must be >= 0");
    double usable = 0.0;
    for (std::size_t i = 0; i < obs.k.size(); ++i)
        if (obs.m[i] >= 1) usable += obs.weight[i];
    if (usable < 2.0)
        throw Error(ErrorCode::InsufficientCell,
                    "spline prior fit needs at least 2 observations");

    SplineLikelihood lik(grid, basis, obs, c0);
    auto objective = [&](const Eigen::VectorXd& g, Eigen::VectorXd& grad) {
        return lik.eval(g, grad);
    };
    OptimOptions opts;
    opts.grad_tol = 1e-6;
    opts.max_iter = 500;
    const OptimResult res =
        bfgs_maximize(objective, Eigen::VectorXd::Zero(basis.cols()), opts);

    SplinePrior prior;
    prior.gamma = res.x;
    prior.mass = lik.mass_for(res.x);
    prior.df = int(basis.cols());
    prior.c0 = c0;
    prior.loglik = res.value;
    prior.grad_inf_norm = res.grad_inf_norm;
    prior.iterations = res.iterations;
    prior.converged = res.converged;
    return prior;
}

// ---------------------------------------------------------------------------
// Conditioning cells

// Which discrete variables define the cells the mixing distribution is
// estimated in. Continuous follow-up time participates only through bins.
struct ConditioningSpec {
    bool by_arm = true;
    std::vector<int> covariate_indices;  // must be discrete in the data
    bool by_stratum = false;
    std::vector<double> time_bin_edges;  // empty = time not used

    bool uses_time() const { return !time_bin_edges.empty(); }
};

using CellKey = std::vector<int>;

// Resolves records to cell keys. Covariate level maps are learned from the
// dataset; a conditioning covariate with more than max_levels distinct values
// is treated as continuous and rejected.
class CellIndexer {
public:
    static constexpr std::size_t max_levels = 50;

    CellIndexer() = default;

    CellIndexer(const Dataset& data, const ConditioningSpec& spec)
        : spec_(spec) {
        for (int idx : spec.covariate_indices) {
            if (idx < 0 || idx >= data.p())
                throw Error(ErrorCode::InvalidConfig,
                            "conditioning covariate index out of range");
            std::vector<double> levels;
            for (const auto& rec : data.records)
                levels.push_back(rec.x[std::size_t(idx)]);
            std::sort(levels.begin(), levels.end());
            levels.erase(std::unique(levels.begin(), levels.end()),
                         levels.end());
            if (levels.size() > max_levels)
                throw Error(ErrorCode::InvalidConfig,
                            "conditioning covariate x" + std::to_string(idx + 1) +
                                " is not discrete; bin it first");
            covariate_levels_.push_back(std::move(levels));
        }
        if (spec.uses_time())
            for (std::size_t i = 0; i + 1 < spec.time_bin_edges.size(); ++i)
                if (!(spec.time_bin_edges[i] < spec.time_bin_edges[i + 1]))
                    throw Error(ErrorCode::InvalidConfig,
                                "time bin edges must be increasing");
    }

    CellKey key_of(const SubjectRecord& rec) const {
        CellKey key;
        if (spec_.by_arm) key.push_back(rec.arm);
        for (std::size_t j = 0; j < spec_.covariate_indices.size(); ++j) {
            const double v =
                rec.x[std::size_t(spec_.covariate_indices[j])];
            const auto& levels = covariate_levels_[j];
            const auto it = std::lower_bound(levels.begin(), levels.end(), v);
            key.push_back(int(it - levels.begin()));
        }
        if (spec_.by_stratum) key.push_back(rec.stratum);
        if (spec_.uses_time()) {
            int bin = 0;
            for (std::size_t i = 1; i < spec_.time_bin_edges.size(); ++i)
                if (rec.time > spec_.time_bin_edges[i]) bin = int(i);
            key.push_back(bin);
        }
        return key;
    }

    std::string label_of(const CellKey& key) const {
        std::string label;
        std::size_t pos = 0;
        auto append = [&](const std::string& part) {
            if (!label.empty()) label += ",";
            label += part;
        };
        if (spec_.by_arm) append("Z=" + std::to_string(key[pos++]));
        for (std::size_t j = 0; j < spec_.covariate_indices.size(); ++j) {
            const double v = covariate_levels_[j][std::size_t(key[pos])];
            std::ostringstream ss;
            ss << "x" << (spec_.covariate_indices[j] + 1) << "=" << v;
            append(ss.str());
            ++pos;
        }
        if (spec_.by_stratum) append("S=" + std::to_string(key[pos++]));
        if (spec_.uses_time()) append("Tbin=" + std::to_string(key[pos++]));
        if (label.empty()) label = "all";
        return label;
    }

    const ConditioningSpec& spec() const { return spec_; }

private:
    ConditioningSpec spec_;
    std::vector<std::vector<double>> covariate_levels_;
};

// ---------------------------------------------------------------------------
// Per-cell prior fitting

enum class PriorFamily { beta, spline };

inline const char* prior_family_name(PriorFamily f) {
    return f == PriorFamily::beta ? "beta" : "spline";
}

struct MixingPrior {
    std::vector<double> mass;  // over the shared grid; nonneg, sums to 1
    PriorFamily family = PriorFamily::spline;
    std::string cell_label;
    std::size_t n_obs = 0;
    double loglik = 0.0;
    bool converged = true;
    bool boundary = false;
    bool pooled_fallback = false;
    // family parameters, for dumps and diagnostics
    double alpha = 0.0, beta = 0.0;
    Eigen::VectorXd gamma;
};

inline std::vector<double> beta_mass_on_grid(const SupportGrid& grid,
                                             double alpha, double beta) {
    std::vector<double> logm(grid.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        logm[g] = (alpha - 1.0) * std::log(grid.q[g]) +
                  (beta - 1.0) * std::log1p(-grid.q[g]);
        mx = std::max(mx, logm[g]);
    }
    double norm = 0.0;
    std::vector<double> mass(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        mass[g] = std::exp(logm[g] - mx);
        norm += mass[g];
    }
    for (double& v : mass) v /= norm;
    return mass;
}

struct PriorSet {
    SupportGrid grid;
    Eigen::MatrixXd basis;  // spline family only
    std::map<CellKey, MixingPrior> cells;
    CellIndexer indexer;
    WarningList warnings;

    const MixingPrior* prior_for(const CellKey& key) const {
        const auto it = cells.find(key);
        return it == cells.end() ? nullptr : &it->second;
    }
};

struct PriorOptions {
    PriorFamily family = PriorFamily::spline;
    int grid_size = 500;
    int df = 10;
    double c0 = 1.0;
};

namespace detail {

inline MixingPrior fit_cell_prior(const CellObservations& obs,
                                  const SupportGrid& grid,
                                  const Eigen::MatrixXd& basis,
                                  const PriorOptions& opts) {
    MixingPrior prior;
    prior.family = opts.family;
    prior.n_obs = std::size_t(obs.total_weight() + 0.5);
    if (opts.family == PriorFamily::beta) {
        const BetaPrior fit = fit_beta_prior(obs);
        prior.mass = beta_mass_on_grid(grid, fit.alpha, fit.beta);
        prior.alpha = fit.alpha;
        prior.beta = fit.beta;
        prior.loglik = fit.loglik;
        prior.converged = fit.converged;
        prior.boundary = fit.boundary;
    } else {
        const SplinePrior fit = fit_spline_prior(obs, grid, basis, opts.c0);
        prior.mass = fit.mass;
        prior.gamma = fit.gamma;
        prior.loglik = fit.loglik;
        prior.converged = fit.converged;
    }
    return prior;
}

}  // namespace detail

// Fits one mixing distribution per conditioning cell among sequenced
// endpoints. Cells with fewer than two sequenced endpoints fall back to the
// pooled all-endpoint prior, with a warning naming the cell.
inline PriorSet fit_priors(const Dataset& data, const ConditioningSpec& spec,
                           const PriorOptions& opts) {
    PriorSet set;
    set.grid = SupportGrid::midpoints(opts.grid_size);
    set.indexer = CellIndexer(data, spec);
    if (opts.family == PriorFamily::spline)
        set.basis = natural_spline_basis(set.grid.q, opts.df);

    std::map<CellKey, std::vector<std::pair<long long, long long>>> cell_pairs;
    std::vector<std::pair<long long, long long>> all_pairs;
    for (const auto& rec : data.records) {
        if (!rec.has_marks()) continue;
        cell_pairs[set.indexer.key_of(rec)].emplace_back(rec.k, rec.m);
        all_pairs.emplace_back(rec.k, rec.m);
    }
    if (all_pairs.empty())
        throw Error(ErrorCode::NoEndpointData,
                    "no sequenced endpoints to fit priors on");

    MixingPrior pooled;
    bool pooled_ready = false;
    auto ensure_pooled = [&]() {
        if (pooled_ready) return;
        pooled = detail::fit_cell_prior(CellObservations::from_pairs(all_pairs),
                                        set.grid, set.basis, opts);
        pooled.cell_label = "pooled";
        pooled_ready = true;
    };

    for (auto& [key, pairs] : cell_pairs) {
        const std::string label = set.indexer.label_of(key);
        if (pairs.size() >= 2) {
            MixingPrior prior = detail::fit_cell_prior(
                CellObservations::from_pairs(pairs), set.grid, set.basis, opts);
            prior.cell_label = label;
            if (!prior.converged)
                set.warnings.push_back(
                    {"ConvergenceWarning",
                     "prior fit did not reach tolerance in cell " + label});
            if (prior.boundary)
                set.warnings.push_back(
                    {"BoundaryFit", "beta parameters clamped in cell " + label});
            set.cells.emplace(key, std::move(prior));
        } else {
            ensure_pooled();
            MixingPrior prior = pooled;
            prior.cell_label = label;
            prior.pooled_fallback = true;
            set.warnings.push_back(
                {"PooledFallback",
                 "cell " + label + " has fewer than 2 sequenced endpoints; "
                 "using the pooled prior"});
            set.cells.emplace(key, std::move(prior));
        }
    }
    return set;
}

}  // namespace sievecox
