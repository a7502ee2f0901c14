#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include "hmobo/design_domain.hpp"

namespace hmobo {

/// Matern-5/2 ARD hyperparameters. Lengthscales are in unit-cube coordinates;
/// variances and the constant mean live in standardized-target units.
struct GPHyperparams {
    Eigen::Vector4d lengthscales = Eigen::Vector4d::Constant(0.5);
    double signal_variance = 1.0;
    double noise_variance = 1e-2;
    double mean_const = 0.0;

    static constexpr double kMinLengthscale = 0.05;
    static constexpr double kMaxLengthscale = 10.0;
    static constexpr double kMinSignalVariance = 0.05;
    static constexpr double kMaxSignalVariance = 20.0;
    static constexpr double kMinNoiseVariance = 1e-6;
    static constexpr double kMaxNoiseVariance = 1.0;
    static constexpr double kMaxAbsMean = 3.0;

    /// Optimization coordinates: log lengthscales (4), log signal variance,
    /// log noise variance, then the raw constant mean.
    using Packed = Eigen::Matrix<double, 7, 1>;
    Packed pack() const;
    static GPHyperparams unpack(const Packed& v);
    static Packed lower_bounds();
    static Packed upper_bounds();
};

/// Scaled distance r = sqrt(sum_i ((a_i - b_i) / l_i)^2).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar scaled_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                          const Eigen::Vector4d& lengthscales) {
    using Scalar = typename DerivedA::Scalar;
    return ((a - b).array() / lengthscales.template cast<Scalar>().array()).matrix().norm();
}

template <typename Scalar>
Scalar matern52_profile(Scalar r) {
    const Scalar s5r = std::sqrt(Scalar(5)) * r;
    return (Scalar(1) + s5r + Scalar(5) * r * r / Scalar(3)) * std::exp(-s5r);
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kernel_matern52(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                                          const GPHyperparams& theta) {
    using Scalar = typename DerivedA::Scalar;
    return Scalar(theta.signal_variance) * matern52_profile(scaled_distance(a, b, theta.lengthscales));
}

/// Gram matrix of the rows of X (noise-free).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixX4d& X, const GPHyperparams& theta);

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Single-output GP conditioned on unit-cube inputs.
class GPModel {
public:
    /// Conditions on (X, y) at fixed hyperparameters; y is standardized internally.
    static GPModel condition(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, const GPHyperparams& theta);

    const Eigen::MatrixX4d& inputs() const { return X_; }
    const Eigen::VectorXd& standardized_targets() const { return y_std_; }
    double target_mean() const { return y_mean_; }
    double target_scale() const { return y_scale_; }
    const GPHyperparams& hyperparams() const { return theta_; }
    /// Lower factor of K + (noise + jitter) I.
    const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }
    double jitter() const { return jitter_; }
    Eigen::Index size() const { return X_.rows(); }

    /// Log marginal likelihood of the standardized targets.
    double log_marginal_likelihood() const;

    /// Latent posterior at x in original target units.
    Prediction predict(const UnitPoint& x) const;

private:
    Eigen::MatrixX4d X_;
    Eigen::VectorXd y_std_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    GPHyperparams theta_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

struct FitOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
    int max_iterations = 400;
    double gradient_tolerance = 1e-6;
};

/// ML-II fit from seeded restarts; keeps the best log marginal likelihood.
/// Throws InsufficientData for n < 2 and Numerical if no restart factorizes.
GPModel fit(const Eigen::MatrixX4d& X, const Eigen::VectorXd& y, const FitOptions& options = {});

inline Prediction predict(const GPModel& model, const UnitPoint& x) { return model.predict(x); }

/// Analytic gradient of the log marginal likelihood in GPHyperparams::Packed coordinates.
GPHyperparams::Packed log_marginal_likelihood_grad(const GPModel& model);

/// Joint objective draws mean_j + sd_j z_ij for independent per-objective
/// models. base_samples holds one row of standard normals per draw.
Eigen::MatrixX2d posterior_draws(std::span<const GPModel, 2> models, const UnitPoint& x,
                                 const Eigen::MatrixX2d& base_samples);

}  // namespace hmobo
