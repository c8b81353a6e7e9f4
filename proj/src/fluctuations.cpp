#include "lte/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lte {

ControlField control_field(const HydroState& st, const HydroScenario& sc)
{
    return ControlField{CellGrid{sc.cells, sc.length}, st.theta};
}

ControlField uniform_field(const CellGrid& g, const Vec& theta)
{
    if (g.cells < 1)
        throw Error(ErrorKind::Input, "grid needs at least one cell");
    return ControlField{g, theta.replicate(1, g.cells)};
}

CovarianceField::CovarianceField(const ControlField& field, const std::function<Mat(const Vec&)>& susceptibility)
    : grid_(field.grid), dim_(static_cast<int>(field.theta.rows())), theta_(field.theta), chi_(susceptibility)
{
    if (field.theta.cols() != grid_.cells)
        throw Error(ErrorKind::Input, "control field does not match its grid");
    cov_.reserve(static_cast<std::size_t>(grid_.cells));
    chol_.reserve(static_cast<std::size_t>(grid_.cells));
    for (int i = 0; i < grid_.cells; ++i) {
        Mat c = susceptibility(field.theta.col(i));
        Eigen::LLT<Mat> llt(c);
        if (!c.allFinite() || llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0))
            throw Error(ErrorKind::PhaseBoundary, "covariance not positive definite at cell " + std::to_string(i)
                    + " (x = " + std::to_string(grid_.center(i)) + ")");
        chol_.push_back(llt.matrixL().toDenseMatrix());
        cov_.push_back(std::move(c));
    }
}

FluctuationSample sample_field(const CovarianceField& cov, const CounterRng& rng, std::uint64_t sample)
{
    const int n = cov.dim();
    const int m = cov.grid().cells;
    const double scale = 1.0 / std::sqrt(cov.grid().spacing());
    FluctuationSample s;
    s.index = sample;
    s.xi.resize(n, m);
    Vec z(n);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < n; ++k)
            z[k] = rng.normal(static_cast<std::uint64_t>(i), sample, static_cast<std::uint64_t>(k));
        s.xi.col(i) = scale * (cov.factor(i) * z);
    }
    return s;
}

namespace {

double bump(double u)
{
    if (std::abs(u) >= 1.0)
        return 0.0;
    const double v = 1.0 - u * u;
    return v * v;
}

template <class F>
Smearing discretize_impl(const F& f, const CellGrid& g)
{
    const double tol = 1e-12 * (1.0 + g.length);
    if (f.support_lo() < -tol || f.support_hi() > g.length + tol)
        throw Error(ErrorKind::Input, "test function support is clipped by the domain boundary");
    const double h = g.spacing();
    Smearing s;
    s.spacing = h;
    std::vector<Vec> cols;
    const int first = std::max(0, static_cast<int>(std::floor(f.support_lo() / h)) - 1);
    const int last = std::min(g.cells - 1, static_cast<int>(std::ceil(f.support_hi() / h)) + 1);
    for (int i = first; i <= last; ++i) {
        const Vec v = f(g.center(i));
        if (v.cwiseAbs().maxCoeff() > 0.0) {
            s.cells.push_back(i);
            cols.push_back(h * v);
        }
    }
    const Eigen::Index n = cols.empty() ? f.base_dim() : cols.front().size();
    s.weights.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
        s.weights.col(static_cast<Eigen::Index>(k)) = cols[k];
    return s;
}

struct PlainAdapter {
    const TestFunction& f;
    Vec operator()(double x) const { return f(x); }
    double support_lo() const { return f.support_lo(); }
    double support_hi() const { return f.support_hi(); }
    Eigen::Index base_dim() const { return f.weights.size(); }
};

struct ScaledAdapter {
    const ScaledTestFunction& f;
    Vec operator()(double x) const { return f(x); }
    double support_lo() const { return f.support_lo(); }
    double support_hi() const { return f.support_hi(); }
    Eigen::Index base_dim() const { return f.base.weights.size(); }
};

} // namespace

Vec TestFunction::operator()(double x) const
{
    return weights * bump((x - center) / radius);
}

double TestFunction::norm_squared() const { return radius * weights.squaredNorm() * 256.0 / 315.0; }

Vec ScaledTestFunction::operator()(double x) const
{
    if (!(eps > 0.0))
        throw Error(ErrorKind::Input, "test function scale must be positive");
    return std::pow(eps, -0.5 * kFieldDim) * base(base.center + (x - x0) / eps);
}

double Smearing::norm_squared() const
{
    return cells.empty() ? 0.0 : weights.squaredNorm() / spacing;
}

Smearing discretize(const TestFunction& f, const CellGrid& g)
{
    if (!(f.radius > 0.0))
        throw Error(ErrorKind::Input, "test function radius must be positive");
    return discretize_impl(PlainAdapter{f}, g);
}

Smearing discretize(const ScaledTestFunction& f, const CellGrid& g)
{
    if (!(f.eps > 0.0) || !(f.base.radius > 0.0))
        throw Error(ErrorKind::Input, "test function scale and radius must be positive");
    return discretize_impl(ScaledAdapter{f}, g);
}

double smear(const FluctuationSample& s, const Smearing& f)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < f.cells.size(); ++k)
        for (Eigen::Index c = 0; c < f.weights.rows(); ++c)
            acc.add(f.weights(c, static_cast<Eigen::Index>(k)) * s.xi(c, f.cells[k]));
    return acc.value();
}

std::vector<double> smeared_draws(const CovarianceField& cov, const Smearing& f, const CounterRng& rng,
    std::size_t count, Exec exec)
{
    if (f.weights.rows() != cov.dim() && !f.cells.empty())
        throw Error(ErrorKind::Input, "test function weights do not match the field dimension");
    // ξ(f) = Σᵢ (Cᵢᵀ wᵢ)·zᵢ/√h.
    const double scale = 1.0 / std::sqrt(cov.grid().spacing());
    Mat loadings(cov.dim(), static_cast<Eigen::Index>(f.cells.size()));
    for (std::size_t k = 0; k < f.cells.size(); ++k)
        loadings.col(static_cast<Eigen::Index>(k))
            = scale * cov.factor(f.cells[k]).transpose() * f.weights.col(static_cast<Eigen::Index>(k));
    std::vector<double> out(count);
    kernels::smeared_draws(loadings, f.cells, rng, 0, out, exec);
    return out;
}

double smeared_variance(const CovarianceField& cov, const Smearing& f)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < f.cells.size(); ++k) {
        const Vec w = f.weights.col(static_cast<Eigen::Index>(k));
        acc.add(w.dot(cov.covariance(f.cells[k]) * w));
    }
    return acc.value() / cov.grid().spacing();
}

std::complex<double> characteristic_estimate(std::span<const double> draws)
{
    if (draws.empty())
        throw Error(ErrorKind::InsufficientData, "characteristic_estimate needs samples");
    CompensatedSum re, im;
    for (double x : draws) {
        re.add(std::cos(x));
        im.add(std::sin(x));
    }
    const double n = static_cast<double>(draws.size());
    return {re.value() / n, im.value() / n};
}

double gaussian_prediction(double variance) { return std::exp(-0.5 * variance); }

namespace {

/// Value of θ₁ interpolated linearly between cell centres, and its slope.
std::pair<Vec, double> local_theta(const CovarianceField& cov, double x)
{
    const CellGrid& g = cov.grid();
    const double h = g.spacing();
    const double u = x / h - 0.5;
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, g.cells - 2);
    const double w = u - i;
    const Vec t = (1.0 - w) * cov.theta().col(i) + w * cov.theta().col(i + 1);
    const double grad = (cov.theta().col(i + 1) - cov.theta().col(i)).norm() / h;
    return {t, grad};
}

void check_eps(const CovarianceField& cov, const std::vector<double>& eps_list)
{
    if (eps_list.empty())
        throw Error(ErrorKind::Input, "empty scale list");
    const double h = cov.grid().spacing();
    for (double e : eps_list)
        if (!(e >= 10.0 * h * (1.0 - 1e-12)))
            throw Error(ErrorKind::Input, "precondition violated: scale " + std::to_string(e)
                    + " is below the grid resolution floor 10h = " + std::to_string(10.0 * h));
}

} // namespace

PunctualReport punctual_covariance_check(const CovarianceField& cov, const TestFunction& f, double x,
    const std::vector<double>& eps_list, std::size_t samples, const CounterRng& rng, Exec exec)
{
    check_eps(cov, eps_list);
    if (cov.grid().cells < 2)
        throw Error(ErrorKind::Input, "punctual check needs at least two cells");
    if (!(x > 0.0 && x < cov.grid().length))
        throw Error(ErrorKind::Input, "punctual check point must be interior");
    if (samples < 2)
        throw Error(ErrorKind::InsufficientData, "punctual check needs at least two samples");
    const auto [theta_x, grad] = local_theta(cov, x);
    const Mat chi = cov.susceptibility(theta_x);
    const double target = f.radius * 256.0 / 315.0 * f.weights.dot(chi * f.weights);

    PunctualReport rep;
    rep.x = x;
    rep.samples = samples;
    rep.gradient = grad;
    std::vector<double> sorted = eps_list;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    bool all_consistent = true;
    for (double e : sorted) {
        const Smearing sm = discretize(ScaledTestFunction{f, x, e}, cov.grid());
        const std::vector<double> draws = smeared_draws(cov, sm, rng, samples, exec);
        const SampleMoments mom = sample_moments(draws);
        PunctualEntry en;
        en.eps = e;
        en.target = target;
        en.exact_variance = smeared_variance(cov, sm);
        en.bias = en.exact_variance - target;
        en.sample_variance = mom.variance;
        en.standard_error = mom.variance_standard_error();
        en.skewness = mom.skewness;
        en.excess_kurtosis = mom.excess_kurtosis;
        en.sampling_consistent = std::abs(en.sample_variance - en.exact_variance) <= 3.0 * en.standard_error;
        all_consistent = all_consistent && en.sampling_consistent;
        rep.entries.push_back(en);
    }

    // Bias must shrink with ε until it reaches round-off.
    const double floor = 1e-12 * (1.0 + std::abs(target));
    bool shrinking = true;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < rep.entries.size(); ++k) {
        const double b = std::abs(rep.entries[k].bias);
        if (k > 0) {
            const double prev = std::abs(rep.entries[k - 1].bias);
            if (prev > floor && !(b < prev))
                shrinking = false;
        }
        if (b > floor) {
            lx.push_back(std::log(rep.entries[k].eps));
            ly.push_back(std::log(b));
        }
    }
    rep.bias_slope = std::numeric_limits<double>::quiet_NaN();
    if (lx.size() >= 2) {
        const double mx = compensated_sum(lx) / static_cast<double>(lx.size());
        const double my = compensated_sum(ly) / static_cast<double>(ly.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < lx.size(); ++k) {
            sxy += (lx[k] - mx) * (ly[k] - my);
            sxx += (lx[k] - mx) * (lx[k] - mx);
        }
        rep.bias_slope = sxy / sxx;
    }
    const PunctualEntry& last = rep.entries.back();
    rep.allowance = 5.0 * std::pow(last.eps * grad, 2) * std::abs(target);
    rep.final_within = std::abs(last.sample_variance - target) <= 3.0 * last.standard_error + rep.allowance;
    const bool slope_ok = std::isnan(rep.bias_slope) || lx.size() < rep.entries.size()
        || (rep.bias_slope >= 1.0 && rep.bias_slope <= 4.0);
    rep.passed = all_consistent && shrinking && rep.final_within && slope_ok;
    return rep;
}

ScalingReport scaling_invariance_check(const CovarianceField& cov, const TestFunction& f, double x0,
    const std::vector<double>& eps_list, std::size_t samples, const CounterRng& rng, Exec exec)
{
    check_eps(cov, eps_list);
    for (int i = 1; i < cov.grid().cells; ++i)
        if ((cov.theta().col(i) - cov.theta().col(0)).cwiseAbs().maxCoeff() != 0.0)
            throw Error(ErrorKind::Input, "scaling check needs a uniform control field");
    ScalingReport rep;
    rep.samples = samples;
    const double band = 3.0 / std::sqrt(static_cast<double>(samples));
    bool each_ok = true;
    double nmin = std::numeric_limits<double>::infinity(), nmax = -nmin;
    for (double e : eps_list) {
        const Smearing sm = discretize(ScaledTestFunction{f, x0, e}, cov.grid());
        const std::vector<double> draws = smeared_draws(cov, sm, rng, samples, exec);
        ScalingEntry en;
        en.eps = e;
        en.norm_squared = sm.norm_squared();
        en.estimate = characteristic_estimate(draws);
        en.prediction = gaussian_prediction(smeared_variance(cov, sm));
        each_ok = each_ok && std::abs(en.estimate - en.prediction) <= band;
        nmin = std::min(nmin, en.norm_squared);
        nmax = std::max(nmax, en.norm_squared);
        rep.entries.push_back(en);
    }
    for (std::size_t a = 0; a < rep.entries.size(); ++a)
        for (std::size_t b = a + 1; b < rep.entries.size(); ++b)
            rep.max_pairwise = std::max(rep.max_pairwise, std::abs(rep.entries[a].estimate - rep.entries[b].estimate));
    rep.max_norm_spread = nmax - nmin;
    rep.passed = each_ok && rep.max_pairwise <= band && rep.max_norm_spread <= 1e-4;
    return rep;
}

} // namespace lte
