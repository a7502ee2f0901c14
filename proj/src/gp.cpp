#include "hmobo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>

#include "hmobo/error.hpp"
#include "hmobo/random.hpp"

namespace hmobo {

namespace {

constexpr double kFirstJitter = 1e-8;
constexpr double kMaxJitter = 1e-4;

struct Factorization {
    Eigen::MatrixXd lower;
    double jitter;
};

Factorization factorize(const Eigen::MatrixXd& K) {
    const Eigen::Index n = K.rows();
    double jitter = 0.0;
    for (;;) {
        Eigen::LLT<Eigen::MatrixXd> llt(K + jitter * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
        jitter = jitter == 0.0 ? kFirstJitter : jitter * 10.0;
        if (jitter > kMaxJitter * (1.0 + 1e-9)) fail(ErrorKind::Numerical, "covariance not positive definite after jitter 1e-4");
    }
}

}  // namespace

GPHyperparams::Packed GPHyperparams::pack() const {
    Packed v;
    v.head<4>() = lengthscales.array().log();
    v[4] = std::log(signal_variance);
    v[5] = std::log(noise_variance);
    v[6] = mean_const;
    return v;
}

GPHyperparams GPHyperparams::unpack(const Packed& v) {
    GPHyperparams t;
    t.lengthscales = v.head<4>().array().exp();
    t.signal_variance = std::exp(v[4]);
    t.noise_variance = std::exp(v[5]);
    t.mean_const = v[6];
    return t;
}

GPHyperparams::Packed GPHyperparams::lower_bounds() {
    Packed v;
    v.head<4>().setConstant(std::log(kMinLengthscale));
    v[4] = std::log(kMinSignalVariance);
    v[5] = std::log(kMinNoiseVariance);
    v[6] = -kMaxAbsMean;
    return v;
}

GPHyperparams::Packed GPHyperparams::upper_bounds() {
    Packed v;
    v.head<4>().setConstant(std::log(kMaxLengthscale));
    v[4] = std::log(kMaxSignalVariance);
    v[5] = std::log(kMaxNoiseVariance);
    v[6] = kMaxAbsMean;
    return v;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixX4d& X, const GPHyperparams& theta) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = theta.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            K(i, j) = K(j, i) = kernel_matern52(X.row(i).transpose(), X.row(j).transpose(), theta);
        }
    }
    return K;
}

GPModel GPModel::condition(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, const GPHyperparams& theta) {
    if (X.rows() < 1 || X.rows() != y.size()) fail(ErrorKind::InsufficientData, "GP needs matching, non-empty X and y");
    GPModel m;
    m.X_ = X;
    m.theta_ = theta;
    m.y_mean_ = y.mean();
    const double n = static_cast<double>(y.size());
    const double var = y.size() > 1 ? (y.array() - m.y_mean_).square().sum() / (n - 1.0) : 0.0;
    m.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    m.y_std_ = (y.array() - m.y_mean_) / m.y_scale_;

    Eigen::MatrixXd K = gram_matrix(X, theta);
    K.diagonal().array() += theta.noise_variance;
    auto f = factorize(K);
    m.chol_ = std::move(f.lower);
    m.jitter_ = f.jitter;
    const Eigen::VectorXd half = m.chol_.triangularView<Eigen::Lower>().solve((m.y_std_.array() - theta.mean_const).matrix());
    m.alpha_ = m.chol_.transpose().triangularView<Eigen::Upper>().solve(half);
    return m;
}

double GPModel::log_marginal_likelihood() const {
    const Eigen::VectorXd resid = y_std_.array() - theta_.mean_const;
    const double n = static_cast<double>(size());
    return -0.5 * resid.dot(alpha_) - chol_.diagonal().array().log().sum() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

Prediction GPModel::predict(const UnitPoint& x) const {
    const Eigen::Index n = size();
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i) kstar[i] = kernel_matern52(X_.row(i).transpose(), x, theta_);
    const double mean_std = theta_.mean_const + kstar.dot(alpha_);
    const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(kstar);
    double var_std = theta_.signal_variance - v.squaredNorm();
    if (var_std < 0.0) {
        if (var_std < -1e-8) std::clog << "hmobo: clamping negative GP variance " << var_std << '\n';
        var_std = 0.0;
    }
    return {y_mean_ + y_scale_ * mean_std, y_scale_ * y_scale_ * var_std};
}

GPHyperparams::Packed log_marginal_likelihood_grad(const GPModel& model) {
    const auto& X = model.inputs();
    const auto& theta = model.hyperparams();
    const Eigen::Index n = model.size();
    const Eigen::MatrixXd& chol = model.cholesky_factor();
    const Eigen::MatrixXd half = chol.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
    const Eigen::MatrixXd Kinv = chol.transpose().triangularView<Eigen::Upper>().solve(half);
    const Eigen::VectorXd& alpha = model.alpha();
    // dL/dtheta = 0.5 tr(W dK/dtheta) with W = alpha alpha^T - K^-1.
    const Eigen::MatrixXd W = alpha * alpha.transpose() - Kinv;

    GPHyperparams::Packed g = GPHyperparams::Packed::Zero();
    const double sqrt5 = std::sqrt(5.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        // Diagonal: k(x, x) = sf2, so only the signal-variance term is nonzero.
        g[4] += 0.5 * W(i, i) * theta.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::Vector4d scaled = (X.row(i) - X.row(j)).transpose().cwiseQuotient(theta.lengthscales);
            const double r = scaled.norm();
            const double decay = std::exp(-sqrt5 * r);
            const double kij = theta.signal_variance * (1.0 + sqrt5 * r + 5.0 * r * r / 3.0) * decay;
            // dk/dlog(l_m) = sf2 * (5/3) (1 + sqrt5 r) e^{-sqrt5 r} (d_m / l_m)^2
            const double common = theta.signal_variance * (5.0 / 3.0) * (1.0 + sqrt5 * r) * decay;
            const double w = W(i, j);  // symmetric pair counted twice, times 0.5
            g.head<4>() += w * common * scaled.array().square().matrix();
            g[4] += w * kij;
        }
    }
    g[5] = 0.5 * theta.noise_variance * W.trace();
    g[6] = alpha.sum();
    return g;
}

namespace {

struct Candidate {
    GPModel model;
    double lml;
};

std::optional<Candidate> try_condition(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, const GPHyperparams::Packed& v) {
    try {
        GPModel m = GPModel::condition(X, y, GPHyperparams::unpack(v));
        const double lml = m.log_marginal_likelihood();
        if (!std::isfinite(lml)) return std::nullopt;
        return Candidate{std::move(m), lml};
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Numerical) return std::nullopt;
        throw;
    }
}

/// Bound-constrained iRprop- ascent on the log marginal likelihood.
std::optional<Candidate> ascend(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, GPHyperparams::Packed v,
                                const FitOptions& options) {
    const auto lo = GPHyperparams::lower_bounds();
    const auto hi = GPHyperparams::upper_bounds();
    v = v.cwiseMax(lo).cwiseMin(hi);

    auto current = try_condition(X, y, v);
    if (!current) return std::nullopt;
    std::optional<Candidate> best = current;

    GPHyperparams::Packed step = GPHyperparams::Packed::Constant(0.1);
    GPHyperparams::Packed prev_grad = GPHyperparams::Packed::Zero();
    for (int it = 0; it < options.max_iterations; ++it) {
        GPHyperparams::Packed g = log_marginal_likelihood_grad(current->model);
        // Project: a coordinate pinned at a bound with outward gradient is stationary.
        for (int d = 0; d < 7; ++d) {
            if ((v[d] <= lo[d] && g[d] < 0.0) || (v[d] >= hi[d] && g[d] > 0.0)) g[d] = 0.0;
        }
        if (g.cwiseAbs().maxCoeff() < options.gradient_tolerance) break;
        for (int d = 0; d < 7; ++d) {
            const double sign_change = g[d] * prev_grad[d];
            if (sign_change > 0.0) {
                step[d] = std::min(step[d] * 1.2, 1.0);
            } else if (sign_change < 0.0) {
                step[d] = std::max(step[d] * 0.5, 1e-10);
                g[d] = 0.0;
            }
            if (g[d] > 0.0) v[d] += step[d];
            else if (g[d] < 0.0) v[d] -= step[d];
        }
        v = v.cwiseMax(lo).cwiseMin(hi);
        prev_grad = g;
        auto next = try_condition(X, y, v);
        if (!next) break;
        current = std::move(next);
        if (current->lml > best->lml) best = current;
    }
    return best;
}

}  // namespace

GPModel fit(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, const FitOptions& options) {
    if (X.rows() < 2) fail(ErrorKind::InsufficientData, "GP fit needs at least 2 observations");
    if (X.rows() != y.size()) fail(ErrorKind::InsufficientData, "GP fit: X and y sizes differ");
    for (Eigen::Index i = 0; i < X.rows(); ++i) validate_unit(X.row(i).transpose());

    const auto lo = GPHyperparams::lower_bounds();
    const auto hi = GPHyperparams::upper_bounds();
    Rng rng = Rng::stream({options.seed, 0x6770666974ULL});

    std::optional<Candidate> best;
    for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
        GPHyperparams::Packed start;
        if (restart == 0) {
            start = GPHyperparams{}.pack();
        } else {
            for (int d = 0; d < 7; ++d) start[d] = lo[d] + rng.uniform() * (hi[d] - lo[d]);
            // Random means far from the standardized center waste restarts.
            start[6] = 0.0;
        }
        auto result = ascend(X, y, start, options);
        if (result && (!best || result->lml > best->lml)) best = std::move(result);
    }
    if (!best) fail(ErrorKind::Numerical, "GP fit: no restart produced a factorizable covariance");
    return std::move(best->model);
}

Eigen::MatrixX2d posterior_draws(std::span<const GPModel, 2> models, const UnitPoint& x,
                                 const Eigen::MatrixX2d& base_samples) {
    Eigen::MatrixX2d draws(base_samples.rows(), 2);
    for (int j = 0; j < 2; ++j) {
        const Prediction p = models[j].predict(x);
        draws.col(j) = (p.mean + std::sqrt(p.variance) * base_samples.col(j).array()).matrix();
    }
    return draws;
}

}  // namespace hmobo
