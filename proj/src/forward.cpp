#include "fwi/forward.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fwi {

int Survey::num_data() const {
    int n = 0;
    for (const auto& s : sources) n += static_cast<int>(s.receivers.size());
    return n;
}

std::vector<int> Survey::data_offsets() const {
    std::vector<int> off(sources.size() + 1, 0);
    for (std::size_t k = 0; k < sources.size(); ++k)
        off[k + 1] = off[k] + static_cast<int>(sources[k].receivers.size());
    return off;
}

void Survey::validate(const Grid2D& grid, bool require_data) const {
    if (sources.empty()) throw std::invalid_argument("Survey: no sources");
    for (std::size_t k = 0; k < sources.size(); ++k) {
        const auto& s = sources[k];
        if (!grid.usable_node(s.ix, s.iz))
            throw std::invalid_argument("Survey: source " + std::to_string(k) +
                                        " is outside the core region");
        for (const auto& [rx, rz] : s.receivers) {
            if (!grid.usable_node(rx, rz))
                throw std::invalid_argument("Survey: receiver of source " +
                                            std::to_string(k) +
                                            " is outside the core region");
        }
    }
    if (require_data && num_data() == 0)
        throw std::invalid_argument("Survey: no receivers configured");
    for (double f : frequencies_hz)
        if (!(f > 0.0)) throw std::invalid_argument("Survey: frequencies must be positive");
}

WeightMatrix build_weights(const Survey& survey, WeightMode mode) {
    WeightMatrix wm;
    wm.w.assign(survey.num_data(), 1.0);
    if (mode == WeightMode::identity) return wm;
    // Offset mode: weight proportional to source-receiver distance, scaled so
    // the largest weight is 1.
    int i = 0;
    double maxw = 0.0;
    for (const auto& s : survey.sources) {
        for (const auto& [rx, rz] : s.receivers) {
            const double dx = rx - s.ix, dz = rz - s.iz;
            wm.w[i] = std::sqrt(dx * dx + dz * dz);
            maxw = std::max(maxw, wm.w[i]);
            ++i;
        }
    }
    if (maxw > 0.0)
        for (auto& v : wm.w) v /= maxw;
    return wm;
}

Wavefield solve_forward(const LuFactors& factor, const Grid2D& grid, const Survey& survey) {
    if (factor.size() != grid.num_nodes())
        throw std::invalid_argument("solve_forward: factorization does not match grid");
    Wavefield u;
    u.per_source.reserve(survey.sources.size());
    const double load = 1.0 / (grid.h * grid.h);
    for (const auto& s : survey.sources) {
        ComplexVector f(grid.num_nodes(), 0.0);
        f[grid.index(s.ix, s.iz)] = s.amplitude * load;
        u.per_source.push_back(factor.solve(f));
    }
    return u;
}

DataVector observe(const Grid2D& grid, const Survey& survey, const Wavefield& u) {
    if (u.per_source.size() != survey.sources.size())
        throw std::invalid_argument("observe: wavefield does not match survey");
    DataVector d;
    d.reserve(survey.num_data());
    for (std::size_t k = 0; k < survey.sources.size(); ++k) {
        for (const auto& [rx, rz] : survey.sources[k].receivers) {
            if (!grid.usable_node(rx, rz))
                throw std::invalid_argument("observe: receiver outside the core region");
            d.push_back(u.per_source[k][grid.index(rx, rz)]);
        }
    }
    return d;
}

Wavefield observe_adjoint(const Grid2D& grid, const Survey& survey, const DataVector& d) {
    if (static_cast<int>(d.size()) != survey.num_data())
        throw std::invalid_argument("observe_adjoint: data length mismatch");
    Wavefield u;
    u.per_source.assign(survey.sources.size(), ComplexVector(grid.num_nodes(), 0.0));
    int i = 0;
    for (std::size_t k = 0; k < survey.sources.size(); ++k) {
        for (const auto& [rx, rz] : survey.sources[k].receivers)
            u.per_source[k][grid.index(rx, rz)] += d[i++];
    }
    return u;
}

DataVector residual(const DataVector& d_obs, const DataVector& d_pred) {
    if (d_obs.size() != d_pred.size())
        throw std::invalid_argument("residual: length mismatch");
    DataVector r(d_obs.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = d_obs[i] - d_pred[i];
    return r;
}

double relative_misfit(const DataVector& d_pred, const DataVector& d_obs) {
    if (d_obs.size() != d_pred.size())
        throw std::invalid_argument("relative_misfit: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d_obs.size(); ++i) {
        num += std::norm(d_pred[i] - d_obs[i]);
        den += std::norm(d_obs[i]);
    }
    if (den == 0.0) return std::sqrt(num) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

}  // namespace fwi
