#include "lte/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lte {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- paramagnet ------------------------------------------------------------

double log_2cosh(double x)
{
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a));
}

double sech2(double x)
{
    const double c = std::cosh(x);
    return std::isfinite(c) ? 1.0 / (c * c) : 0.0;
}

// ---- free fermions -----------------------------------------------------------

struct BandAverages {
    double pi, energy, number, ee, en, nn;
};

/// Band averages (1/2π)∫dp over the Brillouin zone. The integrands are analytic and periodic,
/// so the trapezoid rule converges geometrically; N doubles until every moment is stable.
BandAverages band_averages(double hopping, double t1, double t2, bool with_fluct)
{
    constexpr int kMoments = 6;
    CompensatedSum sum[kMoments];
    auto add_nodes = [&](int n, int first, int stride) {
        for (int j = first; j < n; j += stride) {
            const double e = -2.0 * hopping * std::cos(-M_PI + 2.0 * M_PI * j / n);
            const double a = t1 * e + t2;
            const double f = fermi(a);
            const double g = fermi(-a);
            sum[0].add(softplus(-a));
            sum[1].add(e * f);
            sum[2].add(f);
            if (with_fluct) {
                sum[3].add(e * e * f * g);
                sum[4].add(e * f * g);
                sum[5].add(f * g);
            }
        }
    };
    auto averages = [&](int n) {
        double v[kMoments];
        for (int m = 0; m < kMoments; ++m)
            v[m] = sum[m].value() / n;
        return BandAverages{v[0], v[1], v[2], v[3], v[4], v[5]};
    };
    auto close = [](const BandAverages& x, const BandAverages& y) {
        const double dx[kMoments] = {x.pi, x.energy, x.number, x.ee, x.en, x.nn};
        const double dy[kMoments] = {y.pi, y.energy, y.number, y.ee, y.en, y.nn};
        for (int m = 0; m < kMoments; ++m)
            if (std::abs(dx[m] - dy[m]) > 1e-15 * (1.0 + std::abs(dy[m])))
                return false;
        return true;
    };
    int n = 64;
    add_nodes(n, 0, 1);
    BandAverages prev = averages(n);
    // 2^22 nodes resolve Fermi edges down to θ₁ of order 10⁵.
    while (n < (1 << 22)) {
        n *= 2;
        add_nodes(n, 1, 2);
        const BandAverages cur = averages(n);
        if (close(cur, prev))
            return cur;
        prev = cur;
    }
    return prev;
}

// ---- double well -------------------------------------------------------------

double dw_raw(double q)
{
    const double u = q * q - 1.0;
    return -u * u;
}

double dw_raw_slope(double q) { return -4.0 * q * (q * q - 1.0); }

/// Outer-branch root of s₀'(q) = θ: q ≤ −1 for θ > 0, q ≥ 1 for θ < 0.
double dw_contact(double theta)
{
    if (theta == 0.0)
        return 0.0;
    const double sgn = theta > 0.0 ? -1.0 : 1.0;
    // On the outer branch s₀' is monotone and s₀'' = −(12q² − 4) < 0.
    double q = sgn * (1.0 + std::abs(theta) / 8.0);
    q = sgn * std::min(std::abs(q), 2.5);
    for (int it = 0; it < 100; ++it) {
        const double f = dw_raw_slope(q) - theta;
        const double df = -(12.0 * q * q - 4.0);
        double next = q - f / df;
        if (sgn * next < 1.0)
            next = sgn * 1.0;
        if (std::abs(next - q) < 1e-15 * (1.0 + std::abs(q))) {
            q = next;
            break;
        }
        q = next;
    }
    return q;
}

} // namespace

// ---- Paramagnet ----------------------------------------------------------------

EntropyFunction Paramagnet::entropy() const
{
    const double eps = splitting;
    auto value = [eps](const Vec& q) {
        const double x = q[0] / eps;
        if (x < -1.0 || x > 1.0)
            return -kInf;
        const double p = 0.5 * (1.0 + x);
        return -(xlogx(p) + xlogx(1.0 - p));
    };
    auto gradient = [eps](const Vec& q) -> Vec { return Vec::Constant(1, -std::atanh(q[0] / eps) / eps); };
    auto hessian = [eps](const Vec& q) -> Mat {
        const double x = q[0] / eps;
        return Mat::Constant(1, 1, -1.0 / (eps * eps * (1.0 - x * x)));
    };
    return EntropyFunction(1, Box::interval(-eps, eps), Box::unbounded(1), value, gradient, hessian);
}

ReducedPressure Paramagnet::pressure() const
{
    const double eps = splitting;
    auto value = [eps](const Vec& t) { return log_2cosh(t[0] * eps); };
    auto gradient = [eps](const Vec& t) -> Vec { return Vec::Constant(1, eps * std::tanh(t[0] * eps)); };
    auto hessian = [eps](const Vec& t) -> Mat { return Mat::Constant(1, 1, eps * eps * sech2(t[0] * eps)); };
    return ReducedPressure(1, Box::unbounded(1), value, gradient, hessian);
}

// ---- Quadratic -------------------------------------------------------------------

EntropyFunction QuadraticModel::entropy() const
{
    const double w = half_width;
    auto value = [w](const Vec& q) { return std::abs(q[0]) <= w ? -0.5 * q[0] * q[0] : -kInf; };
    auto gradient = [](const Vec& q) -> Vec { return -q; };
    auto hessian = [](const Vec&) -> Mat { return -Mat::Identity(1, 1); };
    return EntropyFunction(1, Box::interval(-w, w), Box::interval(-w, w), value, gradient, hessian);
}

ReducedPressure QuadraticModel::pressure() const
{
    auto value = [](const Vec& t) { return 0.5 * t[0] * t[0]; };
    auto gradient = [](const Vec& t) -> Vec { return t; };
    auto hessian = [](const Vec&) -> Mat { return Mat::Identity(1, 1); };
    return ReducedPressure(1, Box::interval(-half_width, half_width), value, gradient, hessian);
}

// ---- Free fermions -------------------------------------------------------------------

double FreeFermionChain::dispersion(double p) const { return -2.0 * hopping * std::cos(p); }

double FreeFermionChain::pi_infinity(const ControlVariable& theta) const
{
    return band_averages(hopping, theta[0], theta[1], false).pi;
}

StateDensity FreeFermionChain::density(const ControlVariable& theta) const
{
    const BandAverages b = band_averages(hopping, theta[0], theta[1], false);
    return StateDensity{b.energy, b.number};
}

Mat FreeFermionChain::susceptibility(const ControlVariable& theta) const
{
    const BandAverages b = band_averages(hopping, theta[0], theta[1], true);
    Mat m(2, 2);
    m << b.ee, b.en, b.en, b.nn;
    return m;
}

ReducedPressure FreeFermionChain::pressure() const
{
    const FreeFermionChain self = *this;
    auto value = [self](const Vec& t) { return self.pi_infinity(ControlVariable(t)); };
    auto gradient = [self](const Vec& t) -> Vec { return -self.density(ControlVariable(t)).q; };
    auto hessian = [self](const Vec& t) -> Mat { return self.susceptibility(ControlVariable(t)); };
    return ReducedPressure(2, Box::unbounded(2), value, gradient, hessian);
}

ControlVariable FreeFermionChain::control_of(const StateDensity& q) const
{
    if (q.dim() != 2)
        throw Error(ErrorKind::Input, "free fermions: q must have two components (e, n)");
    if (!(q[1] > 0.0 && q[1] < 1.0) || std::abs(q[0]) >= 2.0 * std::abs(hopping))
        throw Error(ErrorKind::Domain, "free fermions: q outside the interior of the admissible region");
    // Attainable energies at filling n lie strictly between the ground and highest states.
    if (std::abs(q[0]) >= 2.0 * std::abs(hopping) / M_PI * std::sin(M_PI * q[1]))
        throw Error(ErrorKind::Domain, "free fermions: energy outside the band-filling bounds at this density");
    // Minimise the convex φ(θ) = π(θ) + θ·q.
    auto phi = [&](const Vec& th) { return pi_infinity(ControlVariable(th)) + th.dot(q.q); };
    Vec t = Vec::Zero(2);
    double ft = phi(t);
    for (int it = 0; it < 200; ++it) {
        const BandAverages b = band_averages(hopping, t[0], t[1], true);
        Vec grad(2);
        grad << q[0] - b.energy, q[1] - b.number;
        if (grad.cwiseAbs().maxCoeff() < 1e-13)
            return ControlVariable(t);
        Mat h(2, 2);
        h << b.ee, b.en, b.en, b.nn;
        Vec step = -h.ldlt().solve(grad);
        if (!step.allFinite())
            step = -grad;
        else if (step.cwiseAbs().maxCoeff() < 1e-12 * (1.0 + t.cwiseAbs().maxCoeff()))
            return ControlVariable(Vec(t + step)); // quadrature noise floor reached
        double lam = 1.0;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt, lam *= 0.5) {
            const Vec trial = t + lam * step;
            const double ftr = phi(trial);
            if (std::isfinite(ftr) && ftr <= ft + 1e-15 * (1.0 + std::abs(ft))) {
                t = trial;
                ft = ftr;
                moved = true;
                break;
            }
        }
        if (!moved || t.cwiseAbs().maxCoeff() > 1e4)
            break;
    }
    const StateDensity reached = density(ControlVariable(t));
    if ((reached.q - q.q).cwiseAbs().maxCoeff() > 1e-9)
        throw Error(ErrorKind::Domain, "free fermions: q is not attained by any finite control");
    return ControlVariable(t);
}

EntropyFunction FreeFermionChain::entropy() const
{
    const FreeFermionChain self = *this;
    auto value = [self](const Vec& q) {
        try {
            const ControlVariable t = self.control_of(StateDensity(q));
            return self.pi_infinity(t) + t.theta.dot(q);
        } catch (const Error&) {
            return -kInf;
        }
    };
    auto gradient = [self](const Vec& q) -> Vec { return self.control_of(StateDensity(q)).theta; };
    // Richardson-extrapolated central differences of θ*(q); steps shrink near the edges.
    const double emax = 2.0 * std::abs(hopping);
    auto hessian = [self, emax](const Vec& q) -> Mat {
        const double room[2] = {emax - std::abs(q[0]), std::min(q[1], 1.0 - q[1])};
        Mat h(2, 2);
        for (int j = 0; j < 2; ++j) {
            double step = 1e-3 * std::min(1.0, 0.5 * room[j]);
            auto diff = [&](double d) {
                Vec a = q, b = q;
                a[j] += d;
                b[j] -= d;
                return Vec((self.control_of(StateDensity(a)).theta - self.control_of(StateDensity(b)).theta) / (2.0 * d));
            };
            // The attainable set is curved; shrink the stencil until it fits.
            for (int tries = 0;; ++tries) {
                try {
                    h.col(j) = (4.0 * diff(0.5 * step) - diff(step)) / 3.0;
                    break;
                } catch (const Error&) {
                    if (tries == 20)
                        throw;
                    step *= 0.25;
                }
            }
        }
        return Mat(0.5 * (h + h.transpose()));
    };
    Box dom;
    dom.lo = Vec(2);
    dom.hi = Vec(2);
    dom.lo << -2.0 * std::abs(hopping), 0.0;
    dom.hi << 2.0 * std::abs(hopping), 1.0;
    return EntropyFunction(2, dom, Box::unbounded(2), value, gradient, hessian, Representation::NumericConjugate);
}

double free_fermion_pi_infinity(const FreeFermionChain& m, const ControlVariable& theta)
{
    if (theta.dim() != 2)
        throw Error(ErrorKind::Input, "free_fermion_pi_infinity: theta must have two components");
    if (!(theta[0] > 0.0))
        throw Error(ErrorKind::Domain, "free_fermion_pi_infinity: theta_1 must be positive");
    return m.pi_infinity(theta);
}

// ---- Double well -----------------------------------------------------------------

double DoubleWell::raw(double q) const { return dw_raw(q); }

Tabulated1D DoubleWell::raw_table(std::size_t points) const
{
    return Tabulated1D::sample(dw_raw, -2.0, 2.0, points);
}

EntropyFunction DoubleWell::entropy() const
{
    auto value = [](const Vec& q) {
        const double x = q[0];
        if (x < -2.0 || x > 2.0)
            return -kInf;
        return std::abs(x) <= 1.0 ? 0.0 : dw_raw(x);
    };
    auto gradient = [](const Vec& q) -> Vec {
        const double x = q[0];
        return Vec::Constant(1, std::abs(x) <= 1.0 ? 0.0 : dw_raw_slope(x));
    };
    auto hessian = [](const Vec& q) -> Mat {
        const double x = q[0];
        return Mat::Constant(1, 1, std::abs(x) <= 1.0 ? 0.0 : -(12.0 * x * x - 4.0));
    };
    const double slope_edge = dw_raw_slope(2.0);
    return EntropyFunction(1, Box::interval(-2.0, 2.0), Box::interval(slope_edge, -slope_edge), value, gradient,
        hessian);
}

ReducedPressure DoubleWell::pressure() const
{
    auto value = [](const Vec& t) {
        const double q = dw_contact(t[0]);
        return (std::abs(q) <= 1.0 ? 0.0 : dw_raw(q)) - t[0] * q;
    };
    auto gradient = [](const Vec& t) -> Vec { return Vec::Constant(1, -dw_contact(t[0])); };
    auto hessian = [](const Vec& t) -> Mat {
        const double q = dw_contact(t[0]);
        const double s2 = -(12.0 * q * q - 4.0);
        return Mat::Constant(1, 1, std::abs(q) <= 1.0 ? kInf : -1.0 / s2);
    };
    const double slope_edge = dw_raw_slope(2.0);
    return ReducedPressure(1, Box::interval(slope_edge, -slope_edge), value, gradient, hessian);
}

// ---- catalog dispatch ----------------------------------------------------------------

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

std::string model_name(const Model& m)
{
    return std::visit(overloaded{
                          [](const Paramagnet&) { return std::string("paramagnet"); },
                          [](const QuadraticModel&) { return std::string("quadratic"); },
                          [](const FreeFermionChain&) { return std::string("free_fermion"); },
                          [](const SpinChainED&) { return std::string("spin_chain"); },
                          [](const DoubleWell&) { return std::string("double_well"); },
                      },
        m);
}

int model_dim(const Model& m)
{
    return std::visit(overloaded{
                          [](const FreeFermionChain&) { return 2; },
                          [](const SpinChainED&) { return 2; },
                          [](const auto&) { return 1; },
                      },
        m);
}

EntropyFunction model_entropy(const Model& m)
{
    return std::visit(overloaded{
                          [](const SpinChainED&) -> EntropyFunction {
                              throw Error(ErrorKind::Unsupported, "spin chain has no closed-form entropy density");
                          },
                          [](const auto& x) -> EntropyFunction { return x.entropy(); },
                      },
        m);
}

ReducedPressure model_pressure(const Model& m)
{
    return std::visit(overloaded{
                          [](const SpinChainED&) -> ReducedPressure {
                              throw Error(ErrorKind::Unsupported, "spin chain has no closed-form reduced pressure");
                          },
                          [](const auto& x) -> ReducedPressure { return x.pressure(); },
                      },
        m);
}

ClosedFormReport closed_form_check(const Model& m, const ControlVariable& theta)
{
    const EntropyFunction s = model_entropy(m);
    const ReducedPressure pi = model_pressure(m);
    if (theta.dim() != pi.dim())
        throw Error(ErrorKind::Input, "closed_form_check: dimension mismatch");
    if (!pi.control_domain().contains(theta.theta))
        throw Error(ErrorKind::Domain, "closed_form_check: theta outside the model's control space");
    ClosedFormReport r;
    r.pi = pi.value(theta);
    r.q = q_of_theta(pi, theta);
    r.s = r.pi + theta.theta.dot(r.q.q);
    const LegendreResult num = legendre_transform(s, theta);
    r.pi_numeric = num.pi;
    r.q_numeric = num.q_star;
    const double s_direct = s.value(r.q);
    r.max_deviation_from_numeric = std::max({std::abs(r.pi - r.pi_numeric),
        (r.q.q - r.q_numeric.q).cwiseAbs().maxCoeff(), std::abs(r.s - s_direct)});
    return r;
}

} // namespace lte
