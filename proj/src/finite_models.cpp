#include "lte/models.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace lte {

namespace {

void check_sites(int sites)
{
    if (sites < 2)
        throw Error(ErrorKind::Input, "finite realization needs at least 2 sites");
    if (sites > 12 || (1 << sites) > kMaxDenseDimension)
        throw Error(ErrorKind::Capacity, "dense realization with L = " + std::to_string(sites)
                + " exceeds the 2^L <= " + std::to_string(kMaxDenseDimension) + " cap");
}

inline int spin_z(std::uint32_t state, int site) { return ((state >> site) & 1u) ? 1 : -1; }

DenseRealization spin_chain(int sites, double exchange, double anisotropy, double field, bool with_magnetization)
{
    check_sites(sites);
    const int dim = 1 << sites;
    Mat h = Mat::Zero(dim, dim);
    Mat m = Mat::Zero(dim, dim);
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s) {
        double diag = 0.0;
        int mz = 0;
        for (int i = 0; i < sites; ++i) {
            const int j = (i + 1) % sites;
            mz += spin_z(s, i);
            diag += field * spin_z(s, i);
            diag += 0.25 * exchange * anisotropy * spin_z(s, i) * spin_z(s, j);
            if (spin_z(s, i) != spin_z(s, j)) {
                const std::uint32_t t = s ^ (1u << i) ^ (1u << j);
                h(t, s) += 0.5 * exchange;
            }
        }
        h(s, s) += diag;
        m(s, s) = 0.5 * mz;
    }
    DenseRealization r;
    r.sites = sites;
    r.charges.push_back(std::move(h));
    if (with_magnetization)
        r.charges.push_back(std::move(m));
    return r;
}

/// c†_a c_b |state⟩ with Jordan–Wigner signs; returns false when it annihilates.
bool hop(std::uint32_t state, int a, int b, std::uint32_t& out, double& sign)
{
    if (!((state >> b) & 1u))
        return false;
    const std::uint32_t removed = state & ~(1u << b);
    if (a != b && ((removed >> a) & 1u))
        return false;
    const int below_b = std::popcount(state & ((1u << b) - 1u));
    const int below_a = std::popcount(removed & ((1u << a) - 1u));
    sign = ((below_a + below_b) % 2) ? -1.0 : 1.0;
    out = removed | (1u << a);
    return true;
}

} // namespace

Mat ring_hopping_matrix(int sites, double hopping)
{
    if (sites < 2)
        throw Error(ErrorKind::Input, "ring needs at least 2 sites");
    Mat h = Mat::Zero(sites, sites);
    for (int i = 0; i < sites; ++i) {
        const int j = (i + 1) % sites;
        h(i, j) += -hopping;
        h(j, i) += -hopping;
    }
    return h;
}

std::vector<double> FreeFermionRealization::mode_energies() const
{
    std::vector<double> e(static_cast<std::size_t>(sites));
    for (int j = 0; j < sites; ++j)
        e[static_cast<std::size_t>(j)] = -2.0 * hopping * std::cos(2.0 * M_PI * j / sites);
    return e;
}

DenseRealization build_dense_fermion_chain(const FreeFermionChain& m, int sites)
{
    check_sites(sites);
    const int dim = 1 << sites;
    Mat h = Mat::Zero(dim, dim);
    Mat n = Mat::Zero(dim, dim);
    for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(dim); ++s) {
        n(s, s) = std::popcount(s);
        for (int i = 0; i < sites; ++i) {
            const int j = (i + 1) % sites;
            std::uint32_t t = 0;
            double sign = 0.0;
            if (hop(s, i, j, t, sign))
                h(t, s) += -m.hopping * sign;
            if (hop(s, j, i, t, sign))
                h(t, s) += -m.hopping * sign;
        }
    }
    DenseRealization r;
    r.sites = sites;
    r.label = "free_fermion_dense";
    r.charges.push_back(std::move(h));
    r.charges.push_back(std::move(n));
    return r;
}

FiniteRealization build_finite_model(const Model& model, int sites)
{
    if (const auto* ff = std::get_if<FreeFermionChain>(&model)) {
        FreeFermionRealization r;
        r.sites = sites;
        r.hopping = ff->hopping;
        r.single_particle = ring_hopping_matrix(sites, ff->hopping);
        return r;
    }
    if (const auto* sc = std::get_if<SpinChainED>(&model)) {
        DenseRealization r = spin_chain(sites, sc->exchange, sc->anisotropy, sc->field, true);
        r.label = "spin_chain";
        return r;
    }
    if (const auto* pm = std::get_if<Paramagnet>(&model)) {
        DenseRealization r = spin_chain(sites, 0.0, 0.0, pm->splitting, false);
        r.label = "paramagnet_sites";
        return r;
    }
    throw Error(ErrorKind::Unsupported, "model '" + model_name(model) + "' has no microscopic realization");
}

double max_commutator(const DenseRealization& r)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < r.charges.size(); ++i)
        for (std::size_t j = i + 1; j < r.charges.size(); ++j)
            worst = std::max(worst, max_abs(r.charges[i] * r.charges[j] - r.charges[j] * r.charges[i]));
    return worst;
}

} // namespace lte
