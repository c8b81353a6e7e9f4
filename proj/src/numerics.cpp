#include "lte/numerics.hpp"

#include <algorithm>
#include <limits>

namespace lte {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::Input: return "input";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NonDifferentiable: return "non-differentiable";
    case ErrorKind::GradientDivergence: return "gradient-divergence";
    case ErrorKind::ModelInconsistency: return "model-inconsistency";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::PhaseBoundary: return "phase-boundary";
    case ErrorKind::StepRejected: return "step-rejected";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Integrator: return "integrator";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

double compensated_sum(std::span<const double> xs)
{
    CompensatedSum acc;
    for (double x : xs)
        acc.add(x);
    return acc.value();
}

double log_sum_exp(std::span<const double> xs)
{
    if (xs.empty())
        return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(xs.begin(), xs.end());
    CompensatedSum acc;
    for (double x : xs)
        acc.add(std::exp(x - m));
    return m + std::log(acc.value());
}

Vec fd_gradient(const ScalarField& f, const Vec& x)
{
    Vec g(x.size());
    Vec xp = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = fd_step(x[k]);
        xp[k] = x[k] + h;
        const double fp = f(xp);
        xp[k] = x[k] - h;
        const double fm = f(xp);
        xp[k] = x[k];
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

Mat fd_hessian_richardson(const ScalarField& f, const Vec& x, double h)
{
    const Eigen::Index n = x.size();
    auto central = [&](double step) {
        Mat hess(n, n);
        const double f0 = f(x);
        Vec xp = x;
        auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
            xp[i] += si * step;
            xp[j] += sj * step;
            const double v = f(xp);
            xp = x;
            return v;
        };
        for (Eigen::Index i = 0; i < n; ++i) {
            hess(i, i) = (at(i, 1, i, 0) - 2.0 * f0 + at(i, -1, i, 0)) / (step * step);
            for (Eigen::Index j = 0; j < i; ++j)
                hess(i, j) = hess(j, i)
                    = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4.0 * step * step);
        }
        return hess;
    };
    const Mat coarse = central(h);
    const Mat fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

Mat fd_hessian(const ScalarField& f, const Vec& x)
{
    const Eigen::Index n = x.size();
    Mat hess(n, n);
    const double f0 = f(x);
    Vec xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = fd_step(x[i]);
        xp[i] = x[i] + hi;
        const double fp = f(xp);
        xp[i] = x[i] - hi;
        const double fm = f(xp);
        xp[i] = x[i];
        hess(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
        for (Eigen::Index j = 0; j < i; ++j) {
            const double hj = fd_step(x[j]);
            auto at = [&](double si, double sj) {
                xp[i] = x[i] + si * hi;
                xp[j] = x[j] + sj * hj;
                const double v = f(xp);
                xp[i] = x[i];
                xp[j] = x[j];
                return v;
            };
            const double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * hi * hj);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    }
    return hess;
}

Mat fd_jacobian_sym(const VectorField& g, const Vec& x)
{
    const Eigen::Index n = x.size();
    Mat jac(n, n);
    Vec xp = x;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = fd_step(x[k]);
        xp[k] = x[k] + h;
        const Vec gp = g(xp);
        xp[k] = x[k] - h;
        const Vec gm = g(xp);
        xp[k] = x[k];
        jac.col(k) = (gp - gm) / (2.0 * h);
    }
    return 0.5 * (jac + jac.transpose());
}

double SampleMoments::variance_standard_error() const
{
    return count > 1 ? variance * std::sqrt(2.0 / static_cast<double>(count - 1)) : 0.0;
}

SampleMoments sample_moments(std::span<const double> xs)
{
    SampleMoments m;
    m.count = xs.size();
    if (xs.empty())
        return m;
    const double n = static_cast<double>(xs.size());
    m.mean = compensated_sum(xs) / n;
    CompensatedSum s2, s3, s4;
    for (double x : xs) {
        const double d = x - m.mean;
        const double d2 = d * d;
        s2.add(d2);
        s3.add(d2 * d);
        s4.add(d2 * d2);
    }
    const double m2 = s2.value() / n;
    m.variance = xs.size() > 1 ? s2.value() / (n - 1.0) : 0.0;
    if (m2 > 0.0) {
        m.skewness = (s3.value() / n) / std::pow(m2, 1.5);
        m.excess_kurtosis = (s4.value() / n) / (m2 * m2) - 3.0;
    }
    return m;
}

double sample_covariance(std::span<const double> xs, std::span<const double> ys)
{
    const std::size_t n = std::min(xs.size(), ys.size());
    if (n < 2)
        return 0.0;
    const double mx = compensated_sum(xs.first(n)) / static_cast<double>(n);
    const double my = compensated_sum(ys.first(n)) / static_cast<double>(n);
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i)
        acc.add((xs[i] - mx) * (ys[i] - my));
    return acc.value() / static_cast<double>(n - 1);
}

double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 500 && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    // Endpoints are candidates too: the maximiser of a concave function may sit on the boundary.
    double best = 0.5 * (a + b);
    double fbest = f(best);
    for (double cand : {a, b, c, d}) {
        const double fv = f(cand);
        if (fv > fbest) {
            fbest = fv;
            best = cand;
        }
    }
    return best;
}

} // namespace lte
