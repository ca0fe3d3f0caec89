#include "photonstat/numerics/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace photonstat::numerics {

namespace {

std::string param_name(const FitProblem& p, std::size_t i) {
    if (i < p.names.size() && !p.names[i].empty()) return p.names[i];
    return "p" + std::to_string(i);
}

void check_problem(const FitProblem& p) {
    const std::size_t n = p.initial.size();
    if (!p.model) throw std::invalid_argument("least_squares: model is empty");
    if (n == 0) throw std::invalid_argument("least_squares: no parameters");
    if (p.observed.size() < n) {
        throw std::invalid_argument("least_squares: fewer data points than parameters");
    }
    if (!p.weights.empty() && p.weights.size() != p.observed.size()) {
        throw std::invalid_argument("least_squares: weights/observed size mismatch");
    }
    if ((!p.lower.empty() && p.lower.size() != n) || (!p.upper.empty() && p.upper.size() != n)) {
        throw std::invalid_argument("least_squares: bounds size mismatch");
    }
    if (!(p.tolerance > 0.0)) throw std::invalid_argument("least_squares: tolerance must be > 0");
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = p.lower.empty() ? -INFINITY : p.lower[i];
        const double hi = p.upper.empty() ? INFINITY : p.upper[i];
        if (!(p.initial[i] >= lo && p.initial[i] <= hi)) {
            throw std::invalid_argument("least_squares: initial value of '" + param_name(p, i) +
                                        "' outside its bounds");
        }
    }
}

void project(const FitProblem& p, std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!p.lower.empty()) x[i] = std::max(x[i], p.lower[i]);
        if (!p.upper.empty()) x[i] = std::min(x[i], p.upper[i]);
    }
}

struct Evaluation {
    std::vector<double> prediction;
    Eigen::VectorXd residual;  // sqrt(w) (y - f)
    double cost = 0.0;
};

Evaluation evaluate(const FitProblem& p, std::span<const double> x) {
    Evaluation e;
    e.prediction = p.model(x);
    if (e.prediction.size() != p.observed.size()) {
        throw FitError("least_squares: model returned wrong number of points",
                       std::vector<double>(x.begin(), x.end()));
    }
    const auto m = static_cast<Eigen::Index>(p.observed.size());
    e.residual.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double w = p.weights.empty() ? 1.0 : p.weights[static_cast<std::size_t>(i)];
        const double f = e.prediction[static_cast<std::size_t>(i)];
        if (!std::isfinite(f)) {
            throw FitError("least_squares: model produced a non-finite value",
                           std::vector<double>(x.begin(), x.end()));
        }
        e.residual[i] = std::sqrt(w) * (p.observed[static_cast<std::size_t>(i)] - f);
    }
    e.cost = e.residual.squaredNorm();
    return e;
}

}  // namespace

double FitResult::sigma(std::size_t i) const {
    const auto k = static_cast<Eigen::Index>(i);
    if (k >= covariance.rows()) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(std::max(0.0, covariance(k, k)));
}

Eigen::MatrixXd finite_difference_jacobian(const ModelFn& model, std::span<const double> params,
                                           std::span<const double> base_prediction,
                                           std::span<const double> upper) {
    const auto m = static_cast<Eigen::Index>(base_prediction.size());
    const auto n = static_cast<Eigen::Index>(params.size());
    Eigen::MatrixXd jac(m, n);
    std::vector<double> shifted(params.begin(), params.end());
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        double h = std::max(1e-6 * std::abs(params[ju]), 1e-9);
        if (!upper.empty() && params[ju] + h > upper[ju]) h = -h;
        shifted[ju] = params[ju] + h;
        const std::vector<double> f = model(shifted);
        shifted[ju] = params[ju];
        const double step = (params[ju] + h) - params[ju];
        for (Eigen::Index i = 0; i < m; ++i) {
            jac(i, j) = (f[static_cast<std::size_t>(i)] - base_prediction[static_cast<std::size_t>(i)]) / step;
        }
    }
    return jac;
}

FitResult least_squares(const FitProblem& problem) {
    check_problem(problem);
    const std::size_t n = problem.initial.size();
    const auto m = static_cast<Eigen::Index>(problem.observed.size());

    Eigen::VectorXd sqrt_w = Eigen::VectorXd::Ones(m);
    if (!problem.weights.empty()) {
        for (Eigen::Index i = 0; i < m; ++i) sqrt_w[i] = std::sqrt(problem.weights[static_cast<std::size_t>(i)]);
    }

    std::vector<double> x = problem.initial;
    Evaluation cur = evaluate(problem, x);

    double lambda = 0.0;  // first attempt is an undamped Gauss-Newton step
    double nu = 2.0;
    FitResult result;
    Eigen::MatrixXd normal;

    auto build_normal = [&](const std::vector<double>& at, const Evaluation& ev,
                            Eigen::MatrixXd& a, Eigen::VectorXd& g) {
        Eigen::MatrixXd jac = finite_difference_jacobian(problem.model, at, ev.prediction, problem.upper);
        jac = sqrt_w.asDiagonal() * jac;
        for (std::size_t j = 0; j < n; ++j) {
            if (jac.col(static_cast<Eigen::Index>(j)).squaredNorm() == 0.0) {
                std::ostringstream os;
                os << "least_squares: singular normal equations; parameter '" << param_name(problem, j)
                   << "' does not affect the model at " << at[j];
                throw FitError(os.str(), at);
            }
        }
        a = jac.transpose() * jac;
        g = jac.transpose() * ev.residual;
    };

    Eigen::VectorXd grad;
    int iter = 0;
    bool converged = cur.cost == 0.0;
    while (!converged && iter < problem.max_iterations) {
        ++iter;
        build_normal(x, cur, normal, grad);
        const double max_diag = normal.diagonal().maxCoeff();
        // Parameters on a bound whose descent direction points outward are
        // held for this iteration so they do not distort the others' step.
        std::vector<bool> held(n, false);
        for (std::size_t j = 0; j < n; ++j) {
            const auto k = static_cast<Eigen::Index>(j);
            const bool at_lo = !problem.lower.empty() && x[j] <= problem.lower[j] && grad[k] <= 0.0;
            const bool at_hi = !problem.upper.empty() && x[j] >= problem.upper[j] && grad[k] >= 0.0;
            held[j] = at_lo || at_hi;
        }
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = normal;
            Eigen::VectorXd rhs = grad;
            for (std::size_t j = 0; j < n; ++j) {
                const auto k = static_cast<Eigen::Index>(j);
                damped(k, k) += lambda * std::max(normal(k, k), 1e-12 * max_diag);
                if (held[j]) {
                    damped.row(k).setZero();
                    damped.col(k).setZero();
                    damped(k, k) = 1.0;
                    rhs[k] = 0.0;
                }
            }
            const Eigen::VectorXd delta = damped.ldlt().solve(rhs);
            std::vector<double> trial(n);
            bool finite = delta.allFinite();
            for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + delta[static_cast<Eigen::Index>(j)];
            project(problem, trial);

            Evaluation next;
            bool ok = false;
            if (finite) {
                try {
                    next = evaluate(problem, trial);
                    ok = next.cost < cur.cost;
                } catch (const FitError&) {
                    ok = false;
                }
            }
            if (ok) {
                double max_rel = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    const double d = std::abs(trial[j] - x[j]);
                    max_rel = std::max(max_rel, d / (std::abs(trial[j]) + problem.tolerance));
                }
                if (lambda > 0.0) {
                    const Eigen::VectorXd step = Eigen::Map<const Eigen::VectorXd>(trial.data(), static_cast<Eigen::Index>(n)) -
                                                 Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
                    const double predicted = step.dot(2.0 * grad - normal * step);
                    const double rho = predicted > 0.0 ? (cur.cost - next.cost) / predicted : 0.0;
                    lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
                    nu = 2.0;
                }
                x = std::move(trial);
                cur = std::move(next);
                accepted = true;
                if (max_rel < problem.tolerance || cur.cost == 0.0) converged = true;
            } else {
                if (lambda == 0.0) {
                    lambda = 1e-3;
                } else {
                    lambda *= nu;
                    nu *= 2.0;
                }
                if (lambda > 1e16) {
                    // No representable step lowers the cost: x is a minimum to
                    // working precision.
                    converged = true;
                    break;
                }
            }
        }
    }

    Eigen::VectorXd g_final;
    build_normal(x, cur, normal, g_final);
    Eigen::MatrixXd cov = normal.completeOrthogonalDecomposition().pseudoInverse();
    cov = 0.5 * (cov + cov.transpose());

    result.params = x;
    result.covariance = cov;
    result.chi2 = cur.cost;
    result.residual_norm = std::sqrt(cur.cost);
    const auto dof = static_cast<double>(problem.observed.size() - n);
    result.reduced_chi2 = dof > 0 ? cur.cost / dof : 0.0;
    result.iterations = iter;
    result.converged = converged;
    return result;
}

}  // namespace photonstat::numerics
