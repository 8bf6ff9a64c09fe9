#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "chargedpoint/rng.hpp"

namespace chargedpoint {

// One named tensor of parameters, stored flat with its logical shape kept
// alongside. All numerics in this library are double precision: the
// experiments span loss magnitudes from 1e-12 up to 1e9 and single precision
// cannot hold both ends.
struct ParamGroup {
    std::string name;
    std::vector<double> values;
    std::vector<std::size_t> shape;

    std::size_t size() const { return values.size(); }
};

// Ordered collection of ParamGroups. Order is part of the identity: two sets
// are conformable only when names, order, and shapes all agree.
struct ParamSet {
    std::vector<ParamGroup> groups;

    std::size_t total_size() const;
    bool has_group(std::string_view name) const;
    ParamGroup& group(std::string_view name);              // throws if absent
    const ParamGroup& group(std::string_view name) const;  // throws if absent
};

// Throws StructuralMismatchError if any group's shape product differs from its
// flat length, or if two groups share a name.
void validate(const ParamSet& set);

bool conformable(const ParamSet& a, const ParamSet& b);

// Throws StructuralMismatchError naming the first offending group.
void require_conformable(const ParamSet& a, const ParamSet& b);

// Same names and shapes, all values zero.
ParamSet zeros_like(const ParamSet& set);

// a*x + y, elementwise across all groups. x and y must be conformable.
ParamSet axpy(double a, const ParamSet& x, const ParamSet& y);

// y += a*x in place.
void axpy_in_place(double a, const ParamSet& x, ParamSet& y);

// (sum_i |v_i|^p)^(1/p) over one group. Requires p >= 1.
double group_pnorm(const ParamGroup& group, double p);

// Sum of per-group p-norms over the whole set (not the norm of the
// concatenation).
double pnorm_sum(const ParamSet& set, double p);

// 2-norm of all values concatenated across groups.
double flat_l2_norm(const ParamSet& set);

// Same structure as `like`, every value drawn i.i.d. from N(0, sigma^2).
ParamSet gaussian_noise_like(const ParamSet& like, double sigma, SeededRng& rng);

}  // namespace chargedpoint
