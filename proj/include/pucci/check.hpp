#pragma once

#include <string>
#include <vector>

namespace pucci {

/// One verified assertion: what was measured against which threshold.
struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

inline bool all_passed(const std::vector<Check>& checks) {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

inline Check check_at_most(std::string name, double measured, double threshold, std::string detail = {}) {
    return {std::move(name), measured <= threshold, measured, threshold, std::move(detail)};
}

inline Check check_true(std::string name, bool ok, double measured = 0.0, std::string detail = {}) {
    return {std::move(name), ok, measured, 0.0, std::move(detail)};
}

template <class Seq>
bool strictly_decreasing(const Seq& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

template <class Seq>
bool strictly_increasing(const Seq& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

}  // namespace pucci
