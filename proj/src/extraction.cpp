#include "tbd/extraction.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tbd {

namespace {

using Points = Eigen::Matrix<double, 4, Eigen::Dynamic>;
constexpr double kMinMixing = 1e-8;

std::size_t draw_index(const Eigen::VectorXd& mass, Rng& rng) {
    const double total = mass.sum();
    std::uniform_real_distribution<double> u(0.0, total);
    const double target = u(rng);
    double acc = 0.0;
    Eigen::Index last = -1;
    for (Eigen::Index i = 0; i < mass.size(); ++i) {
        if (!(mass(i) > 0.0)) continue;
        acc += mass(i);
        last = i;
        if (acc > target) return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(last);
}

/// Weighted k-means++ seeding on standardized coordinates.
std::vector<Eigen::Vector4d> seed_centers(const Points& x, const Eigen::VectorXd& w, int k, Rng& rng) {
    const double total = w.sum();
    const Eigen::Vector4d mean = x * w / total;
    Eigen::Vector4d var = Eigen::Vector4d::Zero();
    for (Eigen::Index i = 0; i < x.cols(); ++i) var += w(i) * (x.col(i) - mean).cwiseAbs2();
    var /= total;
    const Eigen::Vector4d inv_scale = var.cwiseMax(1e-12).cwiseSqrt().cwiseInverse();

    std::vector<Eigen::Vector4d> centers;
    centers.push_back(x.col(static_cast<Eigen::Index>(draw_index(w, rng))));
    Eigen::VectorXd d2 = Eigen::VectorXd::Constant(x.cols(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k) {
        const Eigen::Vector4d& c = centers.back();
        for (Eigen::Index i = 0; i < x.cols(); ++i)
            d2(i) = std::min(d2(i), (x.col(i) - c).cwiseProduct(inv_scale).squaredNorm());
        const Eigen::VectorXd mass = w.cwiseProduct(d2);
        if (!(mass.sum() > 0.0)) break;
        centers.push_back(x.col(static_cast<Eigen::Index>(draw_index(mass, rng))));
    }
    return centers;
}

/// Weighted k-means refinement of the seeds; returns the final hard labels.
std::vector<int> lloyd_labels(const Points& x, const Eigen::VectorXd& w, std::vector<Eigen::Vector4d> centers,
                              int iterations = 25) {
    const double total = w.sum();
    const Eigen::Vector4d mean = x * w / total;
    Eigen::Vector4d var = Eigen::Vector4d::Zero();
    for (Eigen::Index i = 0; i < x.cols(); ++i) var += w(i) * (x.col(i) - mean).cwiseAbs2();
    const Eigen::Vector4d inv_scale = (var / total).cwiseMax(1e-12).cwiseSqrt().cwiseInverse();
    const auto k = centers.size();
    std::vector<int> labels(static_cast<std::size_t>(x.cols()), 0);
    for (int it = 0; it < iterations; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = (x.col(i) - centers[c]).cwiseProduct(inv_scale).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            changed = changed || labels[static_cast<std::size_t>(i)] != best;
            labels[static_cast<std::size_t>(i)] = best;
        }
        if (!changed && it > 0) break;
        std::vector<Eigen::Vector4d> sums(k, Eigen::Vector4d::Zero());
        std::vector<double> mass(k, 0.0);
        for (Eigen::Index i = 0; i < x.cols(); ++i) {
            const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
            sums[c] += w(i) * x.col(i);
            mass[c] += w(i);
        }
        for (std::size_t c = 0; c < k; ++c)
            if (mass[c] > 0.0) centers[c] = sums[c] / mass[c];
    }
    return labels;
}

struct ComponentCache {
    Eigen::Matrix4d inverse;
    double log_norm = 0.0;  ///< log pi - 0.5 log|2 pi Sigma|
    double log_det = 0.0;
};

}  // namespace

EmResult fit_weighted_gmm(const Points& points, const Eigen::VectorXd& weights, int components, Rng& rng,
                          const EmOptions& options) {
    if (points.cols() != weights.size()) throw std::invalid_argument("fit_weighted_gmm: size mismatch");
    if (components <= 0) throw std::invalid_argument("fit_weighted_gmm: need at least one component");
    if ((weights.array() < 0.0).any() || !(weights.sum() > 0.0))
        throw std::invalid_argument("fit_weighted_gmm: weights must be nonnegative with positive sum");

    const Eigen::Index n = points.cols();
    const std::vector<Eigen::Vector4d> seeds = seed_centers(points, weights, components, rng);
    const int k = static_cast<int>(seeds.size());
    const double total = weights.sum();
    const Eigen::Matrix4d psi = options.prior_scale.asDiagonal();
    constexpr double kDim = 4.0;
    const double dof = kDim + 1.0;  // inverse-Wishart exponent with nu0 = 0

    EmResult result;
    result.reduced = k < components;

    const std::vector<int> labels = lloyd_labels(points, weights, seeds);
    std::vector<GaussianComponent> comps(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& comp = comps[static_cast<std::size_t>(c)];
        double nk = 0.0;
        Eigen::Vector4d sum = Eigen::Vector4d::Zero();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[static_cast<std::size_t>(i)] != c) continue;
            nk += weights(i);
            sum += weights(i) * points.col(i);
        }
        comp.mean = nk > 0.0 ? Eigen::Vector4d(sum / nk) : seeds[static_cast<std::size_t>(c)];
        Eigen::Matrix4d scatter = psi;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[static_cast<std::size_t>(i)] != c) continue;
            const Eigen::Vector4d dv = points.col(i) - comp.mean;
            scatter += weights(i) * dv * dv.transpose();
        }
        comp.weight = std::max(nk / total, kMinMixing);
        comp.covariance = scatter / (nk + dof);
    }

    Eigen::MatrixXd resp(k, n);
    std::vector<ComponentCache> cache(static_cast<std::size_t>(k));
    const double log_2pi = std::log(2.0 * std::numbers::pi);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        // E-step and objective at the current parameters
        double penalty = 0.0;
        for (int c = 0; c < k; ++c) {
            auto& comp = comps[static_cast<std::size_t>(c)];
            auto& cc = cache[static_cast<std::size_t>(c)];
            const Eigen::LLT<Eigen::Matrix4d> llt(comp.covariance);
            cc.inverse = llt.solve(Eigen::Matrix4d::Identity());
            cc.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            cc.log_norm = (comp.weight > 0.0 ? std::log(comp.weight) : -std::numeric_limits<double>::infinity()) -
                          0.5 * (kDim * log_2pi + cc.log_det);
            penalty += -0.5 * dof * cc.log_det - 0.5 * (psi * cc.inverse).trace();
        }
        double loglik = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double peak = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const auto& cc = cache[static_cast<std::size_t>(c)];
                const Eigen::Vector4d dv = points.col(i) - comps[static_cast<std::size_t>(c)].mean;
                resp(c, i) = cc.log_norm - 0.5 * dv.dot(cc.inverse * dv);
                peak = std::max(peak, resp(c, i));
            }
            double s = 0.0;
            for (int c = 0; c < k; ++c) {
                resp(c, i) = std::exp(resp(c, i) - peak);
                s += resp(c, i);
            }
            resp.col(i) /= s;
            loglik += weights(i) * (peak + std::log(s));
        }
        const double objective = loglik + penalty;
        const bool converged = !result.objective.empty() &&
                               std::abs(objective - result.objective.back()) <=
                                   options.relative_tolerance * std::abs(objective);
        result.objective.push_back(objective);
        if (converged) break;

        // M-step (MAP under the inverse-Wishart prior)
        for (int c = 0; c < k; ++c) {
            auto& comp = comps[static_cast<std::size_t>(c)];
            const Eigen::VectorXd rw = resp.row(c).transpose().cwiseProduct(weights);
            const double nk = rw.sum();
            comp.weight = nk / total;
            if (nk > 0.0) comp.mean = points * rw / nk;
            Eigen::Matrix4d scatter = psi;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!(rw(i) > 0.0)) continue;
                const Eigen::Vector4d dv = points.col(i) - comp.mean;
                scatter += rw(i) * dv * dv.transpose();
            }
            comp.covariance = scatter / (nk + dof);
        }
    }

    for (const auto& comp : comps) {
        if (comp.weight > kMinMixing)
            result.components.push_back(comp);
        else
            result.reduced = true;
    }
    return result;
}

std::vector<TargetState> extract_states(const ParticleCloud& cloud, std::size_t n_components, Rng& rng,
                                        bool* reduced) {
    if (reduced) *reduced = false;
    if (n_components == 0) return {};
    std::vector<Eigen::Index> live;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(cloud.size()); ++i)
        if (cloud.weights()(i) > 0.0) live.push_back(i);
    if (live.empty()) {
        if (reduced) *reduced = true;
        return {};
    }
    Points x(4, static_cast<Eigen::Index>(live.size()));
    Eigen::VectorXd w(static_cast<Eigen::Index>(live.size()));
    for (std::size_t j = 0; j < live.size(); ++j) {
        x.col(static_cast<Eigen::Index>(j)) = cloud.states().col(live[j]).head<4>();
        w(static_cast<Eigen::Index>(j)) = cloud.weights()(live[j]);
    }
    w *= static_cast<double>(live.size()) / w.sum();

    const EmResult fit = fit_weighted_gmm(x, w, static_cast<int>(n_components), rng);
    if (reduced) *reduced = fit.reduced;
    std::vector<TargetState> out;
    out.reserve(fit.components.size());
    for (const auto& comp : fit.components) {
        TargetState s;
        s.kinematics = comp.mean;
        out.push_back(s);
    }
    return out;
}

}  // namespace tbd
