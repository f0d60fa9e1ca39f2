#pragma once

#include "ambistop/common.hpp"

#include <string>
#include <vector>

namespace ambistop {

// Finite scenario index set.
struct ScenarioSet {
    std::vector<std::string> labels;

    ScenarioSet() = default;
    explicit ScenarioSet(std::vector<std::string> l);
    explicit ScenarioSet(int n);  // labels "1".."n"

    int size() const { return static_cast<int>(labels.size()); }
};

// Probability vector on the scenario simplex. Entries are nonnegative and
// sum to one within 1e-12; construction goes through make_simplex.
class SimplexPoint {
public:
    SimplexPoint() = default;
    const Vector& weights() const { return w_; }
    double operator[](Eigen::Index i) const { return w_[i]; }
    Eigen::Index size() const { return w_.size(); }

    static SimplexPoint uniform(Eigen::Index n);
    static SimplexPoint vertex(Eigen::Index n, Eigen::Index i);

    friend SimplexPoint make_simplex(const Ref<const Vector>& raw);

private:
    explicit SimplexPoint(Vector w) : w_(std::move(w)) {}
    Vector w_;
};

// Clips negative entries at zero and renormalizes. Throws ZeroMass when the
// clipped vector has no mass left.
SimplexPoint make_simplex(const Ref<const Vector>& raw);

}  // namespace ambistop
