#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ltbsm/gf2.hpp"
#include "ltbsm/rng.hpp"

namespace ltbsm::erasure {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// i.i.d. loss channel parameters: transmission eta, loss epsilon = 1 - eta
struct ChannelParams {
    double eta;
    double epsilon;

    explicit ChannelParams(double eta_) : eta(eta_), epsilon(1.0 - eta_) {
        if (!(eta >= 0.0 && eta <= 1.0))
            throw std::invalid_argument("eta must lie in [0, 1]");
    }
};

// surviving subset R of the n qubits; the complement is the lost set
struct LossPattern {
    size_t n = 0;
    gf2::BitVec surviving;

    LossPattern() = default;
    explicit LossPattern(size_t nq) : n(nq), surviving(nq) {}

    bool survives(size_t q) const { return surviving.get(q); }
    size_t surviving_count() const { return surviving.count(); }
    size_t lost_count() const { return n - surviving_count(); }

    std::vector<size_t> lost_indices() const;
    std::vector<size_t> surviving_indices() const;

    static LossPattern all_surviving(size_t n);
    static LossPattern from_mask(size_t n, uint64_t mask);  // n <= 64
};

// P(N -> R | eta) = eta^|R| (1-eta)^(|N|-|R|)
double subset_probability(size_t n, const LossPattern& r, double eta);

// each qubit survives independently with probability eta; identical key
// gives the identical pattern
LossPattern sample_loss(size_t n, double eta, rng::Key key);

// enumeration cap (qubits); default 22, override with LTBSM_ENUM_CAP
size_t enumeration_cap();

// all 2^n subsets in increasing bit-pattern order
void enumerate_patterns(size_t n, const std::function<void(const LossPattern&)>& fn);

}  // namespace ltbsm::erasure
