#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace photonstat::numerics {

/// Evaluates the model at every data point for one parameter vector.
using ModelFn = std::function<std::vector<double>(std::span<const double> params)>;

struct FitProblem {
    ModelFn model;
    std::vector<double> observed;
    /// Per-point weights (inverse variances). Empty means unit weights.
    std::vector<double> weights;
    std::vector<double> initial;
    std::vector<double> lower;  ///< empty: unbounded
    std::vector<double> upper;  ///< empty: unbounded
    std::vector<std::string> names;  ///< used in diagnostics only
    int max_iterations = 200;
    double tolerance = 1e-10;  ///< on relative parameter change
};

struct FitResult {
    std::vector<double> params;
    Eigen::MatrixXd covariance;  ///< (J^T W J)^-1 at the solution, not rescaled
    double chi2 = 0.0;           ///< weighted sum of squared residuals
    double residual_norm = 0.0;  ///< sqrt(chi2)
    double reduced_chi2 = 0.0;
    int iterations = 0;
    bool converged = false;

    double sigma(std::size_t i) const;
};

/// Raised when the normal equations lose rank (a parameter has no effect on
/// the model) or when the model returns non-finite values.
class FitError : public std::runtime_error {
public:
    FitError(const std::string& what, std::vector<double> last_params)
        : std::runtime_error(what), last_params_(std::move(last_params)) {}
    const std::vector<double>& last_params() const noexcept { return last_params_; }

private:
    std::vector<double> last_params_;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Nielsen's damping update)
/// on a forward-difference Jacobian. Bounds are enforced by projection.
/// Hitting the iteration cap returns converged = false with the last iterate.
FitResult least_squares(const FitProblem& problem);

/// Forward-difference Jacobian with step max(1e-6 |p|, 1e-9), stepping
/// backwards when the forward step would leave the upper bound.
Eigen::MatrixXd finite_difference_jacobian(const ModelFn& model, std::span<const double> params,
                                           std::span<const double> base_prediction,
                                           std::span<const double> upper = {});

}  // namespace photonstat::numerics
