#include "ltbsm/erasure.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace ltbsm::erasure {

std::vector<size_t> LossPattern::lost_indices() const {
    std::vector<size_t> out;
    out.reserve(lost_count());
    for (size_t i = 0; i < n; ++i)
        if (!surviving.get(i)) out.push_back(i);
    return out;
}

std::vector<size_t> LossPattern::surviving_indices() const {
    std::vector<size_t> out;
    out.reserve(surviving_count());
    for (size_t i = 0; i < n; ++i)
        if (surviving.get(i)) out.push_back(i);
    return out;
}

LossPattern LossPattern::all_surviving(size_t n) {
    LossPattern p(n);
    for (size_t i = 0; i < n; ++i) p.surviving.set(i);
    return p;
}

LossPattern LossPattern::from_mask(size_t n, uint64_t mask) {
    if (n > 64) throw std::invalid_argument("from_mask limited to 64 qubits");
    LossPattern p(n);
    for (size_t i = 0; i < n; ++i)
        if ((mask >> i) & 1u) p.surviving.set(i);
    return p;
}

double subset_probability(size_t n, const LossPattern& r, double eta) {
    if (r.n != n) throw std::invalid_argument("pattern size mismatch");
    ChannelParams ch(eta);  // validates eta
    size_t k = r.surviving_count();
    return std::pow(ch.eta, static_cast<double>(k)) *
           std::pow(ch.epsilon, static_cast<double>(n - k));
}

LossPattern sample_loss(size_t n, double eta, rng::Key key) {
    ChannelParams ch(eta);
    LossPattern p(n);
    for (size_t i = 0; i < n; ++i)
        if (key.bernoulli(i, ch.eta)) p.surviving.set(i);
    return p;
}

size_t enumeration_cap() {
    static size_t cap = [] {
        if (const char* s = std::getenv("LTBSM_ENUM_CAP")) {
            long v = std::strtol(s, nullptr, 10);
            if (v >= 1 && v <= 30) return static_cast<size_t>(v);
        }
        return static_cast<size_t>(22);
    }();
    return cap;
}

void enumerate_patterns(size_t n, const std::function<void(const LossPattern&)>& fn) {
    size_t cap = enumeration_cap();
    if (n > cap)
        throw CapacityError("enumeration cap exceeded (" + std::to_string(n) + " > " +
                            std::to_string(cap) + " qubits); use Monte Carlo instead");
    uint64_t total = uint64_t(1) << n;
    LossPattern p(n);
    for (uint64_t mask = 0; mask < total; ++mask) {
        for (size_t i = 0; i < n; ++i) p.surviving.set(i, (mask >> i) & 1u);
        fn(p);
    }
}

}  // namespace ltbsm::erasure
