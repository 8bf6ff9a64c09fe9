#include "chargedpoint/param_set.hpp"

#include <cmath>
#include <unordered_set>

#include "chargedpoint/errors.hpp"

namespace chargedpoint {

std::size_t ParamSet::total_size() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
}

bool ParamSet::has_group(std::string_view name) const {
    for (const auto& g : groups) {
        if (g.name == name) return true;
    }
    return false;
}

ParamGroup& ParamSet::group(std::string_view name) {
    for (auto& g : groups) {
        if (g.name == name) return g;
    }
    throw StructuralMismatchError("no parameter group named '" + std::string(name) + "'");
}

const ParamGroup& ParamSet::group(std::string_view name) const {
    for (const auto& g : groups) {
        if (g.name == name) return g;
    }
    throw StructuralMismatchError("no parameter group named '" + std::string(name) + "'");
}

void validate(const ParamSet& set) {
    std::unordered_set<std::string> seen;
    for (const auto& g : set.groups) {
        if (!seen.insert(g.name).second) {
            throw StructuralMismatchError("duplicate parameter group '" + g.name + "'");
        }
        std::size_t prod = 1;
        for (std::size_t d : g.shape) prod *= d;
        if (g.shape.empty() || prod != g.values.size()) {
            throw StructuralMismatchError(
                "group '" + g.name + "': shape product " + std::to_string(prod) +
                " does not match flat length " + std::to_string(g.values.size()));
        }
    }
}

bool conformable(const ParamSet& a, const ParamSet& b) {
    if (a.groups.size() != b.groups.size()) return false;
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        if (a.groups[i].name != b.groups[i].name) return false;
        if (a.groups[i].shape != b.groups[i].shape) return false;
        if (a.groups[i].values.size() != b.groups[i].values.size()) return false;
    }
    return true;
}

void require_conformable(const ParamSet& a, const ParamSet& b) {
    if (a.groups.size() != b.groups.size()) {
        throw StructuralMismatchError(
            "parameter sets have " + std::to_string(a.groups.size()) + " vs " +
            std::to_string(b.groups.size()) + " groups");
    }
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        const auto& ga = a.groups[i];
        const auto& gb = b.groups[i];
        if (ga.name != gb.name) {
            throw StructuralMismatchError("group " + std::to_string(i) + ": name '" +
                                          ga.name + "' vs '" + gb.name + "'");
        }
        if (ga.shape != gb.shape || ga.values.size() != gb.values.size()) {
            throw StructuralMismatchError("group '" + ga.name + "': shapes differ");
        }
    }
}

ParamSet zeros_like(const ParamSet& set) {
    ParamSet out = set;
    for (auto& g : out.groups) {
        g.values.assign(g.values.size(), 0.0);
    }
    return out;
}

ParamSet axpy(double a, const ParamSet& x, const ParamSet& y) {
    require_conformable(x, y);
    ParamSet out = y;
    for (std::size_t i = 0; i < out.groups.size(); ++i) {
        auto& ov = out.groups[i].values;
        const auto& xv = x.groups[i].values;
        for (std::size_t k = 0; k < ov.size(); ++k) {
            ov[k] = a * xv[k] + ov[k];
        }
    }
    return out;
}

void axpy_in_place(double a, const ParamSet& x, ParamSet& y) {
    require_conformable(x, y);
    for (std::size_t i = 0; i < y.groups.size(); ++i) {
        auto& yv = y.groups[i].values;
        const auto& xv = x.groups[i].values;
        for (std::size_t k = 0; k < yv.size(); ++k) {
            yv[k] += a * xv[k];
        }
    }
}

double group_pnorm(const ParamGroup& group, double p) {
    if (!(p >= 1.0)) {
        throw InvalidParameterError("group_pnorm: p must be >= 1");
    }
    if (p == 1.0) {
        double s = 0.0;
        for (double v : group.values) s += std::abs(v);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (double v : group.values) s += v * v;
        return std::sqrt(s);
    }
    double s = 0.0;
    for (double v : group.values) s += std::pow(std::abs(v), p);
    return std::pow(s, 1.0 / p);
}

double pnorm_sum(const ParamSet& set, double p) {
    double s = 0.0;
    for (const auto& g : set.groups) s += group_pnorm(g, p);
    return s;
}

double flat_l2_norm(const ParamSet& set) {
    double s = 0.0;
    for (const auto& g : set.groups) {
        for (double v : g.values) s += v * v;
    }
    return std::sqrt(s);
}

ParamSet gaussian_noise_like(const ParamSet& like, double sigma, SeededRng& rng) {
    if (!(sigma > 0.0)) {
        throw InvalidParameterError("gaussian_noise_like: sigma must be > 0");
    }
    ParamSet out = like;
    for (auto& g : out.groups) {
        for (auto& v : g.values) v = rng.normal(sigma);
    }
    return out;
}

}  // namespace chargedpoint
