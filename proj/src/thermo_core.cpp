#include "lte/thermo_core.hpp"

#include "lte/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kScanPoints = 401;
constexpr double kArgumentTol = 1e-10;

std::string vec_str(const Vec& v)
{
    std::ostringstream os;
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << v[i];
    os << ')';
    return os.str();
}

/// Damped Newton ascent for a concave objective with gradient and Hessian.
Vec newton_ascent(const ScalarField& g, const VectorField& grad, const std::function<Mat(const Vec&)>& hess,
    Vec x, const Box& domain)
{
    double gx = g(x);
    if (!std::isfinite(gx))
        throw Error(ErrorKind::Domain, "Newton ascent started outside the finite region of the objective");
    for (int it = 0; it < 200; ++it) {
        const Vec dg = grad(x);
        if (dg.cwiseAbs().maxCoeff() < 1e-11)
            return x;
        const Mat h = hess(x);
        Vec step = h.ldlt().solve(-dg);
        if (!step.allFinite() || dg.dot(step) <= 0.0)
            step = dg; // fall back to steepest ascent
        else if (step.cwiseAbs().maxCoeff() < kArgumentTol * (1.0 + x.cwiseAbs().maxCoeff()))
            return domain.contains(x + step) && std::isfinite(g(x + step)) ? Vec(x + step) : x;
        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
            const Vec trial = x + t * step;
            if (!domain.contains(trial))
                continue;
            const double gt = g(trial);
            if (std::isfinite(gt) && gt >= gx - 1e-14 * (1.0 + std::abs(gx))) {
                x = trial;
                gx = gt;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            return x;
        if (t * step.cwiseAbs().maxCoeff() < kArgumentTol)
            return x;
    }
    return x;
}

} // namespace

Box Box::interval(double lo, double hi)
{
    Box b;
    b.lo = Vec::Constant(1, lo);
    b.hi = Vec::Constant(1, hi);
    return b;
}

Box Box::unbounded(int n)
{
    Box b;
    b.lo = Vec::Constant(n, -kInf);
    b.hi = Vec::Constant(n, kInf);
    return b;
}

bool Box::empty() const
{
    if (lo.size() == 0 || lo.size() != hi.size())
        return true;
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i]))
            return true;
    return false;
}

bool Box::contains(const Vec& x) const
{
    if (x.size() != lo.size())
        return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] >= lo[i] && x[i] <= hi[i]))
            return false;
    return true;
}

bool Box::on_boundary(const Vec& x, double tol) const
{
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::isfinite(lo[i]) && std::abs(x[i] - lo[i]) <= tol * (1.0 + std::abs(lo[i])))
            return true;
        if (std::isfinite(hi[i]) && std::abs(x[i] - hi[i]) <= tol * (1.0 + std::abs(hi[i])))
            return true;
    }
    return false;
}

std::string_view to_string(Representation r) noexcept
{
    switch (r) {
    case Representation::ClosedForm: return "closed-form";
    case Representation::Tabulated: return "tabulated";
    case Representation::NumericConjugate: return "numeric-conjugate";
    }
    return "unknown";
}

void Tabulated1D::validate(std::size_t min_points) const
{
    if (x.size() != y.size())
        throw Error(ErrorKind::Input, "tabulated function: x and y sizes differ");
    if (x.size() < min_points)
        throw Error(ErrorKind::Input, "tabulated function needs at least " + std::to_string(min_points) + " points");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
            throw Error(ErrorKind::Input, "tabulated function has non-finite entries");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw Error(ErrorKind::Input, "tabulated grid is not strictly increasing");
    }
}

double Tabulated1D::operator()(double at) const
{
    if (at < x.front() || at > x.back())
        return -kInf;
    auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    if (j >= x.size())
        return y.back();
    if (j == 0)
        return y.front();
    const double w = (at - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * y[j - 1] + w * y[j];
}

double Tabulated1D::slope(double at) const
{
    auto it = std::upper_bound(x.begin(), x.end(), at);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    j = std::clamp<std::size_t>(j, 1, x.size() - 1);
    return (y[j] - y[j - 1]) / (x[j] - x[j - 1]);
}

Tabulated1D Tabulated1D::sample(const std::function<double(double)>& f, double lo, double hi, std::size_t points)
{
    Tabulated1D t;
    t.x.resize(points);
    t.y.resize(points);
    for (std::size_t i = 0; i < points; ++i) {
        t.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        t.y[i] = f(t.x[i]);
    }
    return t;
}

EntropyFunction::EntropyFunction(int dim, Box domain, Box control_domain, ScalarField value, VectorField gradient,
    std::function<Mat(const Vec&)> hessian, Representation rep)
    : dim_(dim)
    , domain_(std::move(domain))
    , control_domain_(std::move(control_domain))
    , value_(std::move(value))
    , gradient_(std::move(gradient))
    , hessian_(std::move(hessian))
    , rep_(rep)
{
    if (dim_ < 1 || domain_.dim() != dim_ || control_domain_.dim() != dim_)
        throw Error(ErrorKind::Input, "entropy function: inconsistent dimensions");
}

Vec EntropyFunction::gradient(const StateDensity& q) const
{
    return gradient_ ? gradient_(q.q) : fd_gradient(value_, q.q);
}

Mat EntropyFunction::hessian(const StateDensity& q) const
{
    if (hessian_)
        return hessian_(q.q);
    if (gradient_)
        return fd_jacobian_sym(gradient_, q.q);
    return fd_hessian(value_, q.q);
}

ReducedPressure::ReducedPressure(int dim, Box control_domain, ScalarField value, VectorField gradient,
    std::function<Mat(const Vec&)> hessian, Representation rep)
    : dim_(dim)
    , control_domain_(std::move(control_domain))
    , value_(std::move(value))
    , gradient_(std::move(gradient))
    , hessian_(std::move(hessian))
    , rep_(rep)
{
    if (dim_ < 1 || control_domain_.dim() != dim_)
        throw Error(ErrorKind::Input, "reduced pressure: inconsistent dimensions");
}

Vec ReducedPressure::gradient(const ControlVariable& t) const
{
    return gradient_ ? gradient_(t.theta) : fd_gradient(value_, t.theta);
}

Mat ReducedPressure::hessian(const ControlVariable& t) const
{
    if (hessian_)
        return hessian_(t.theta);
    if (gradient_)
        return fd_jacobian_sym(gradient_, t.theta);
    return fd_hessian(value_, t.theta);
}

LegendreResult legendre_transform(const EntropyFunction& s, const ControlVariable& theta)
{
    const Box& dom = s.domain();
    if (dom.empty())
        throw Error(ErrorKind::Input, "legendre_transform: empty entropy domain");
    if (theta.dim() != s.dim())
        throw Error(ErrorKind::Input, "legendre_transform: dimension mismatch");
    if (!s.control_domain().contains(theta.theta))
        throw Error(ErrorKind::Domain, "legendre_transform: theta " + vec_str(theta.theta)
                + " outside the control space; the supremum is not attained");

    if (s.dim() == 1) {
        const double lo = dom.lo[0];
        const double hi = dom.hi[0];
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw Error(ErrorKind::Input, "legendre_transform: 1-D scan needs a bounded domain");
        const double th = theta[0];
        Vec probe(1);
        auto objective = [&](double q) {
            probe[0] = q;
            const double v = s.value_fn()(probe);
            return std::isfinite(v) ? v - th * q : -kInf;
        };
        std::size_t best = 0;
        double fbest = -kInf;
        const double dq = (hi - lo) / static_cast<double>(kScanPoints - 1);
        for (std::size_t i = 0; i < kScanPoints; ++i) {
            const double f = objective(lo + dq * static_cast<double>(i));
            if (f > fbest) {
                fbest = f;
                best = i;
            }
        }
        if (!std::isfinite(fbest))
            throw Error(ErrorKind::Input, "legendre_transform: entropy is not finite anywhere on its domain");
        const double a = lo + dq * static_cast<double>(best == 0 ? 0 : best - 1);
        const double b = std::min(hi, lo + dq * static_cast<double>(best + 1));
        double qs = golden_section_max(objective, a, b, kArgumentTol);
        // Value comparisons resolve the argmax only to ~sqrt(eps); polish on s'(q) = θ.
        for (int it = 0; it < 8; ++it) {
            probe[0] = qs;
            const double r0 = s.gradient(StateDensity(probe))[0] - th;
            const double d = s.hessian(StateDensity(probe))(0, 0);
            if (!(std::isfinite(r0) && std::isfinite(d) && d < 0.0) || r0 == 0.0)
                break;
            const double next = qs - r0 / d;
            if (!(next > a && next < b))
                break;
            probe[0] = next;
            const double r1 = s.gradient(StateDensity(probe))[0] - th;
            if (!(std::abs(r1) < std::abs(r0)))
                break;
            qs = next;
        }
        LegendreResult r;
        r.pi = objective(qs);
        r.q_star = StateDensity(Vec::Constant(1, qs));
        return r;
    }

    Vec start(s.dim());
    for (int i = 0; i < s.dim(); ++i) {
        const bool flo = std::isfinite(dom.lo[i]);
        const bool fhi = std::isfinite(dom.hi[i]);
        start[i] = (flo && fhi) ? 0.5 * (dom.lo[i] + dom.hi[i]) : flo ? dom.lo[i] + 1.0 : fhi ? dom.hi[i] - 1.0 : 0.0;
    }
    const Vec& th = theta.theta;
    auto g = [&](const Vec& q) { return s.value_fn()(q) - th.dot(q); };
    auto dg = [&](const Vec& q) -> Vec { return s.gradient(StateDensity(q)) - th; };
    auto hg = [&](const Vec& q) -> Mat { return s.hessian(StateDensity(q)); };
    const Vec qs = newton_ascent(g, dg, hg, start, dom);
    LegendreResult r;
    r.pi = g(qs);
    r.q_star = StateDensity(qs);
    return r;
}

ReducedPressure numeric_conjugate(const EntropyFunction& s)
{
    auto value = [s](const Vec& t) { return legendre_transform(s, ControlVariable(t)).pi; };
    auto gradient = [s](const Vec& t) -> Vec { return -legendre_transform(s, ControlVariable(t)).q_star.q; };
    return ReducedPressure(s.dim(), s.control_domain(), value, gradient, {}, Representation::NumericConjugate);
}

OneSidedSlopes one_sided_slopes(const std::function<double(double)>& f, double x, double step)
{
    const double f0 = f(x);
    const double dl1 = (f0 - f(x - step)) / step;
    const double dl2 = (f0 - f(x - 2.0 * step)) / (2.0 * step);
    const double dr1 = (f(x + step) - f0) / step;
    const double dr2 = (f(x + 2.0 * step) - f0) / (2.0 * step);
    return {2.0 * dl1 - dl2, 2.0 * dr1 - dr2};
}

bool is_kink(const OneSidedSlopes& s)
{
    const double scale = 1.0 + std::max(std::abs(s.left), std::abs(s.right));
    return std::abs(s.right - s.left) > 1e-6 * scale;
}

namespace {

void require_pure_phase_1d(const ReducedPressure& pi, const ControlVariable& theta, const char* who)
{
    if (pi.dim() != 1)
        return;
    Vec probe(1);
    auto f = [&](double t) {
        probe[0] = t;
        return pi.value_fn()(probe);
    };
    const OneSidedSlopes sl = one_sided_slopes(f, theta[0], fd_step(theta[0]));
    if (is_kink(sl)) {
        std::ostringstream os;
        os << who << ": pi is not differentiable at theta = " << theta[0] << " (one-sided slopes " << sl.left
           << ", " << sl.right << "); phase coexistence, use tangent_set";
        throw Error(ErrorKind::NonDifferentiable, os.str());
    }
}

} // namespace

StateDensity q_of_theta(const ReducedPressure& pi, const ControlVariable& theta)
{
    if (theta.dim() != pi.dim())
        throw Error(ErrorKind::Input, "q_of_theta: dimension mismatch");
    require_pure_phase_1d(pi, theta, "q_of_theta");
    return StateDensity(-pi.gradient(theta));
}

ControlVariable theta_of_q(const EntropyFunction& s, const StateDensity& q, BetaPolicy policy)
{
    if (q.dim() != s.dim())
        throw Error(ErrorKind::Input, "theta_of_q: dimension mismatch");
    if (!s.domain().contains(q.q))
        throw Error(ErrorKind::Input, "theta_of_q: q " + vec_str(q.q) + " outside the entropy domain");
    if (s.domain().on_boundary(q.q))
        throw Error(ErrorKind::GradientDivergence, "theta_of_q: q " + vec_str(q.q) + " on the domain boundary");
    Vec t = s.gradient(q);
    if (!t.allFinite())
        throw Error(ErrorKind::GradientDivergence, "theta_of_q: entropy gradient diverges at q " + vec_str(q.q));
    if (policy == BetaPolicy::RequirePositive && !(t[0] > 0.0))
        throw Error(ErrorKind::ModelInconsistency,
            "theta_of_q: theta_1 = " + std::to_string(t[0]) + " <= 0 at q " + vec_str(q.q));
    return ControlVariable(std::move(t));
}

Mat pure_phase_hessian(const ReducedPressure& pi, const ControlVariable& theta)
{
    require_pure_phase_1d(pi, theta, "pure_phase_hessian");
    Mat h = pi.hessian(theta);
    if (!h.allFinite())
        throw Error(ErrorKind::NonDifferentiable, "pure_phase_hessian: non-finite Hessian at " + vec_str(theta.theta));
    return h;
}

double hessian_pair_check(const EntropyFunction& s, const ReducedPressure& pi, const ControlVariable& theta)
{
    const StateDensity q = q_of_theta(pi, theta);
    const Mat sh = s.hessian(q);
    if (!sh.allFinite())
        throw Error(ErrorKind::Singular, "hessian_pair_check: s'' not finite at q " + vec_str(q.q));
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sh + sh.transpose()));
    const double big = es.eigenvalues().cwiseAbs().maxCoeff();
    const double small = es.eigenvalues().cwiseAbs().minCoeff();
    if (!(small > 1e-12 * std::max(1.0, big)))
        throw Error(ErrorKind::Singular, "hessian_pair_check: s'' singular at q " + vec_str(q.q)
                + " (coexistence or critical point)");
    const Mat ph = pi.hessian(theta);
    return max_abs(ph * sh + Mat::Identity(s.dim(), s.dim()));
}

std::vector<double> TangentSet::extremal_slopes() const
{
    if (degenerate)
        return {r_min};
    return {r_min, r_max};
}

std::vector<double> TangentSet::pure_phase_densities() const
{
    if (degenerate)
        return {-r_min};
    return {-r_max, -r_min};
}

bool TangentSet::supports(const Tabulated1D& pi, double tol) const
{
    const double p0 = pi(theta);
    for (std::size_t k = 0; k < pi.size(); ++k) {
        const double d = pi.x[k] - theta;
        for (double r : {r_min, r_max})
            if (pi.y[k] - p0 < r * d - tol)
                return false;
    }
    return true;
}

TangentSet tangent_set(const Tabulated1D& pi, double theta)
{
    pi.validate(5);
    auto it = std::lower_bound(pi.x.begin(), pi.x.end(), theta);
    std::size_t i = static_cast<std::size_t>(it - pi.x.begin());
    if (i > 0 && (i == pi.size() || std::abs(pi.x[i - 1] - theta) < std::abs(pi.x[i] - theta)))
        --i;
    if (i >= pi.size() || std::abs(pi.x[i] - theta) > 1e-9 * (1.0 + std::abs(theta)))
        throw Error(ErrorKind::Input, "tangent_set: theta is not a node of the tabulation grid");
    if (i < 2 || i + 2 >= pi.size())
        throw Error(ErrorKind::InsufficientData, "tangent_set: theta too close to the grid edge");

    const auto& x = pi.x;
    const auto& y = pi.y;
    auto extrapolate = [](double d1, double d2, double h1, double h2) { return d1 - h1 * (d2 - d1) / h2; };
    const double hl1 = x[i] - x[i - 1];
    const double hl2 = x[i - 1] - x[i - 2];
    const double left = extrapolate((y[i] - y[i - 1]) / hl1, (y[i] - y[i - 2]) / (hl1 + hl2), hl1, hl2);
    const double hr1 = x[i + 1] - x[i];
    const double hr2 = x[i + 2] - x[i + 1];
    const double right = extrapolate((y[i + 1] - y[i]) / hr1, (y[i + 2] - y[i]) / (hr1 + hr2), hr1, hr2);

    const double plain_left = (y[i] - y[i - 1]) / hl1;
    const double plain_right = (y[i + 1] - y[i]) / hr1;
    if (plain_right < plain_left - 1e-12 * (1.0 + std::abs(plain_left)))
        throw Error(ErrorKind::Input, "tangent_set: tabulated pi is not convex at theta");

    TangentSet ts;
    ts.theta = x[i];
    // A breakpoint between nodes can push the extrapolants out of order; fall back to plain quotients.
    const OneSidedSlopes sl = right >= left ? OneSidedSlopes{left, right} : OneSidedSlopes{plain_left, plain_right};
    if (!is_kink(sl)) {
        ts.r_min = ts.r_max = 0.5 * (sl.left + sl.right);
        ts.degenerate = true;
        return ts;
    }
    ts.r_min = sl.left;
    ts.r_max = sl.right;
    ts.degenerate = false;
    return ts;
}

Tabulated1D concave_envelope_table(const Tabulated1D& raw)
{
    raw.validate(3);
    // Andrew's monotone chain, upper hull.
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            const double cross = (raw.x[b] - raw.x[a]) * (raw.y[i] - raw.y[a]) - (raw.y[b] - raw.y[a]) * (raw.x[i] - raw.x[a]);
            if (cross >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }
    Tabulated1D env;
    env.x = raw.x;
    env.y.resize(raw.size());
    std::size_t seg = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        while (seg + 1 < hull.size() && raw.x[hull[seg + 1]] < raw.x[i])
            ++seg;
        if (seg + 1 >= hull.size() || hull[seg] == i) {
            env.y[i] = raw.y[i];
            continue;
        }
        const std::size_t a = hull[seg];
        const std::size_t b = hull[seg + 1];
        if (b == i) {
            env.y[i] = raw.y[i];
            continue;
        }
        const double w = (raw.x[i] - raw.x[a]) / (raw.x[b] - raw.x[a]);
        env.y[i] = (1.0 - w) * raw.y[a] + w * raw.y[b];
    }
    return env;
}

EntropyFunction concave_envelope(const Tabulated1D& raw)
{
    Tabulated1D env = concave_envelope_table(raw);
    const double slope_hi = env.slope(env.x.front());
    const double slope_lo = env.slope(env.x.back());
    auto value = [env](const Vec& q) { return env(q[0]); };
    auto gradient = [env](const Vec& q) -> Vec { return Vec::Constant(1, env.slope(q[0])); };
    auto hessian = [](const Vec&) -> Mat { return Mat::Zero(1, 1); };
    return EntropyFunction(1, Box::interval(env.x.front(), env.x.back()), Box::interval(slope_lo, slope_hi), value,
        gradient, hessian, Representation::Tabulated);
}

Tabulated1D discrete_conjugate(const Tabulated1D& s, const std::vector<double>& theta_grid)
{
    s.validate(2);
    Tabulated1D out;
    out.x = theta_grid;
    out.y.resize(theta_grid.size());
    kernels::discrete_conjugate(s.x, s.y, theta_grid, out.y);
    return out;
}

Tabulated1D discrete_biconjugate(const Tabulated1D& pi, const std::vector<double>& q_grid)
{
    pi.validate(2);
    std::vector<double> neg(pi.y.size());
    std::transform(pi.y.begin(), pi.y.end(), neg.begin(), [](double v) { return -v; });
    Tabulated1D out;
    out.x = q_grid;
    out.y.resize(q_grid.size());
    kernels::discrete_conjugate(pi.x, neg, q_grid, out.y);
    for (double& v : out.y)
        v = -v;
    return out;
}

double pressure_from_pi(double pi_value, double temperature)
{
    if (!(temperature > 0.0))
        throw Error(ErrorKind::Input, "pressure_from_pi: temperature must be positive");
    return pi_value * temperature;
}

} // namespace lte
