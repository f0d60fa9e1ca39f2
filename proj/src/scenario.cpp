#include "ambistop/scenario.hpp"

#include <set>

namespace ambistop {

ScenarioSet::ScenarioSet(std::vector<std::string> l) : labels(std::move(l)) {
    if (labels.empty()) throw std::invalid_argument("ScenarioSet: need at least one scenario");
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size())
        throw std::invalid_argument("ScenarioSet: labels must be distinct");
}

ScenarioSet::ScenarioSet(int n) {
    if (n < 1) throw std::invalid_argument("ScenarioSet: need at least one scenario");
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
}

SimplexPoint SimplexPoint::uniform(Eigen::Index n) {
    return make_simplex(Vector::Ones(n));
}

SimplexPoint SimplexPoint::vertex(Eigen::Index n, Eigen::Index i) {
    Vector w = Vector::Zero(n);
    w[i] = 1.0;
    return make_simplex(w);
}

SimplexPoint make_simplex(const Ref<const Vector>& raw) {
    if (raw.size() < 1) throw std::invalid_argument("make_simplex: empty vector");
    if (!raw.allFinite()) throw std::invalid_argument("make_simplex: entries must be finite");
    Vector w = raw.cwiseMax(0.0);
    double mass = w.sum();
    if (mass <= 0.0) throw ZeroMass("make_simplex: all entries <= 0");
    w /= mass;
    // guard against accumulated rounding: renormalize once more if needed
    double s = w.sum();
    if (std::abs(s - 1.0) > 1e-14) w /= s;
    return SimplexPoint(std::move(w));
}

}  // namespace ambistop
