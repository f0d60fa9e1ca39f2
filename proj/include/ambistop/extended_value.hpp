#pragma once

#include <cmath>
#include <ostream>

namespace ambistop {

// Real line extended by +inf/-inf markers. The markers arise only from the
// distortion conventions (negative arguments under power/log, vanishing
// densities with lambda in (0,1)); optimizer-facing code converts them to a
// large finite sentinel instead of feeding IEEE infinities into arithmetic.
class ExtendedValue {
public:
    static ExtendedValue finite(double v) { return ExtendedValue(v, 0); }
    static ExtendedValue pos_inf() { return ExtendedValue(0.0, +1); }
    static ExtendedValue neg_inf() { return ExtendedValue(0.0, -1); }

    bool is_finite() const { return tag_ == 0; }
    bool is_pos_inf() const { return tag_ > 0; }
    bool is_neg_inf() const { return tag_ < 0; }

    // value of a finite entry; callers check is_finite() first
    double value() const { return v_; }

    // finite sentinel for derivative-free search (1e18 with sign)
    static constexpr double kSentinel = 1e18;
    double sentinel() const {
        if (tag_ > 0) return kSentinel;
        if (tag_ < 0) return -kSentinel;
        return v_;
    }

    friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.tag_ != b.tag_) return false;
        return a.tag_ != 0 || a.v_ == b.v_;
    }
    friend bool operator<(const ExtendedValue& a, const ExtendedValue& b) {
        if (a.tag_ != b.tag_) return a.tag_ < b.tag_;
        return a.tag_ == 0 && a.v_ < b.v_;
    }
    friend bool operator<=(const ExtendedValue& a, const ExtendedValue& b) {
        return a < b || a == b;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedValue& x) {
        if (x.tag_ > 0) return os << "+inf";
        if (x.tag_ < 0) return os << "-inf";
        return os << x.v_;
    }

private:
    ExtendedValue(double v, int tag) : v_(v), tag_(tag) {}
    double v_;
    int tag_;  // 0 finite, +1 plus infinity, -1 minus infinity
};

}  // namespace ambistop
