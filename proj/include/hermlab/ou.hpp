#pragma once

#include "core.hpp"
#include "fields.hpp"
#include "integrals.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

namespace hermlab {

struct InitialCondition {
    enum class Kind { constant, gaussian } kind = Kind::constant;
    double mean = 0.0;
    double var = 0.0;

    static InitialCondition constant(double c) { return {Kind::constant, c, 0.0}; }
    static InitialCondition gaussian(double m, double v)
    {
        detail::require(v >= 0.0, "initial-condition variance must be >= 0");
        return {Kind::gaussian, m, v};
    }

    double draw(Stream& s) const { return kind == Kind::constant ? mean : mean + std::sqrt(var) * s.normal(); }
};

struct OUSpec {
    double lambda = 1.0;
    double sigma = 1.0;
    int q = 2;
    double H = 0.7;
    InitialCondition xi = InitialCondition::constant(0.0);
    bool stationary = false;
    double M = 0.0;  // truncation horizon; 0 selects 10 / lambda
    std::size_t n_internal = std::size_t{1} << 14;

    double horizon() const { return M > 0.0 ? M : 10.0 / lambda; }

    void validate() const
    {
        detail::require(lambda > 0.0, "OU lambda must be > 0");
        detail::require(sigma > 0.0, "OU sigma must be > 0");
        detail::require(q >= 1, "OU order q must be >= 1");
        detail::require(H > 0.5 && H < 1.0, "OU Hurst index must lie in (1/2, 1)");
        detail::require(n_internal >= 64, "OU n_internal must be >= 64");
        if (stationary && lambda * horizon() < 5.0)
            throw DomainError("stationary OU truncation refused: lambda * M < 5");
    }
};

// Y(t_i) = e^{-lambda t_i} (xi + sigma sum_{cells <= t_i} e^{lambda u_mid} dZ)
// for a path Z on a 1-parameter grid starting at 0.
inline RandomField hou_from_path(const OUSpec& spec, const RandomField& Z, double xi)
{
    detail::require(Z.dim() == 1, "OU needs a 1-parameter path");
    const auto& g = Z.grid;
    detail::require(g.origin[0] == 0.0, "non-stationary OU grid must start at 0");
    RandomField Y;
    Y.grid = g;
    Y.meta = Z.meta;
    Y.meta.method = "hou";
    Y.values.resize(g.steps[0] + 1);
    Y.values[0] = xi;
    const double h = g.mesh(0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.steps[0]; ++i) {
        const double um = (static_cast<double>(i) + 0.5) * h;
        acc += std::exp(spec.lambda * um) * (Z.values[i + 1] - Z.values[i]);
        const double t = g.coord(0, i + 1);
        Y.values[i + 1] = std::exp(-spec.lambda * t) * (xi + spec.sigma * acc);
    }
    return Y;
}

class HouSimulator {
public:
    HouSimulator(OUSpec spec, GridSpec grid) : spec_(std::move(spec)), grid_(std::move(grid))
    {
        spec_.validate();
        detail::require(!spec_.stationary, "simulate_hou needs the stationary flag off");
        detail::require(grid_.dim() == 1 && grid_.origin[0] == 0.0, "simulate_hou needs a 1-parameter grid on [0, T]");
        gen_ = std::make_unique<HermiteSheetGenerator>(HermiteSpec(spec_.q, HurstMultiIndex({spec_.H})), grid_,
                                                       spec_.n_internal);
    }

    // The initial condition is drawn before the noise, from the same stream.
    RandomField sample(Stream& s, RandomField* path = nullptr) const
    {
        const double xi = spec_.xi.draw(s);
        RandomField Z = gen_->sample(s);
        RandomField Y = hou_from_path(spec_, Z, xi);
        if (path) *path = std::move(Z);
        return Y;
    }

private:
    OUSpec spec_;
    GridSpec grid_;
    std::unique_ptr<HermiteSheetGenerator> gen_;
};

inline RandomField simulate_hou(const OUSpec& spec, const GridSpec& grid, Stream& stream)
{
    return HouSimulator(spec, grid).sample(stream);
}

// X(t_i) = sigma sum_{cells in [-M, t_i]} e^{-lambda (t_i - u_mid)} dZ on the
// output grid [0, T]; the path lives on [-M, T] with the same mesh (M is
// rounded up to a whole number of cells).
class StationaryHouSimulator {
public:
    StationaryHouSimulator(OUSpec spec, GridSpec grid) : spec_(std::move(spec)), grid_(std::move(grid))
    {
        spec_.validate();
        detail::require(spec_.stationary, "simulate_stationary_hou needs the stationary flag on");
        detail::require(grid_.dim() == 1 && grid_.origin[0] == 0.0, "stationary OU grid must be [0, T]");
        const double h = grid_.mesh(0);
        lead_ = static_cast<std::size_t>(std::ceil(spec_.horizon() / h - 1e-9));
        const double M = static_cast<double>(lead_) * h;
        path_grid_ = GridSpec({-M}, {M + grid_.extent[0]}, {lead_ + grid_.steps[0]});
        gen_ = std::make_unique<HermiteSheetGenerator>(HermiteSpec(spec_.q, HurstMultiIndex({spec_.H})), path_grid_,
                                                       spec_.n_internal);
    }

    const GridSpec& path_grid() const noexcept { return path_grid_; }

    RandomField sample(Stream& s) const
    {
        const RandomField Z = gen_->sample(s);
        RandomField X;
        X.grid = grid_;
        X.meta = Z.meta;
        X.meta.method = "stationary_hou";
        X.values.resize(grid_.steps[0] + 1);
        const double h = path_grid_.mesh(0);
        const double lam = spec_.lambda;
        // running sum of e^{-lambda (t - u_mid)} dZ, advanced cell by cell
        double acc = 0.0;
        const double decay = std::exp(-lam * h);
        for (std::size_t i = 0; i < path_grid_.steps[0]; ++i) {
            acc = acc * decay + std::exp(-0.5 * lam * h) * (Z.values[i + 1] - Z.values[i]);
            if (i + 1 >= lead_) X.values[i + 1 - lead_] = spec_.sigma * acc;
        }
        return X;
    }

private:
    OUSpec spec_;
    GridSpec grid_;
    GridSpec path_grid_;
    std::size_t lead_ = 0;
    std::unique_ptr<HermiteSheetGenerator> gen_;
};

inline RandomField simulate_stationary_hou(const OUSpec& spec, const GridSpec& grid, Stream& stream)
{
    return StationaryHouSimulator(spec, grid).sample(stream);
}

enum class OUKind { nonstationary, stationary };

inline double ou_limit_covariance(OUKind kind, double t, double s, double lambda, double sigma)
{
    detail::require(t >= 0.0 && s >= 0.0, "OU covariance needs t, s >= 0");
    detail::require(lambda > 0.0 && sigma > 0.0, "OU covariance needs lambda, sigma > 0");
    const double c = sigma * sigma / (2.0 * lambda);
    if (kind == OUKind::stationary) return c * std::exp(-lambda * std::abs(t - s));
    return c * (std::exp(-lambda * std::abs(t - s)) - std::exp(-lambda * (t + s)));
}

// H -> 1 limits: e^{-lambda t} xi + (sigma/lambda)(1 - e^{-lambda t}) H_q(Z)/sqrt(q!)
// and, stationary, (sigma/lambda) H_q(Z)/sqrt(q!).
inline double ou_limit_rv_H1(OUKind kind, double t, double lambda, double sigma, const InitialCondition& xi, int q,
                             Stream& stream)
{
    detail::require(lambda > 0.0 && sigma > 0.0, "OU limit needs lambda, sigma > 0");
    detail::require(t >= 0.0, "OU limit needs t >= 0");
    if (kind == OUKind::stationary) return sigma / lambda * sample_hermite_limit_rv(q, stream);
    const double x0 = xi.draw(stream);
    return std::exp(-lambda * t) * x0 + sigma / lambda * (1.0 - std::exp(-lambda * t)) * sample_hermite_limit_rv(q, stream);
}

// The deterministic kernel of Y(t) - e^{-lambda t} xi, as an integrand.
inline Integrand ou_window(double lambda, double t, double lo = 0.0) { return Integrand::exp_window(lambda, t, lo); }

} // namespace hermlab
