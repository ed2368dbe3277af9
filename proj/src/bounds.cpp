#include "ltbsm/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace ltbsm::bounds {

double static_bound_product(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0,1]");
    return 1.0 / (1.0 + p);
}

double adaptive_bound_product() { return 0.5; }

double static_symmetric_threshold(double p) {
    return 1.0 - 1.0 / std::sqrt(1.0 + p);
}

double adaptive_symmetric_threshold() { return 1.0 - 1.0 / std::sqrt(2.0); }

double bsm_sqm_threshold() { return 0.5; }

std::vector<TableEntry> table1_thresholds() {
    std::vector<TableEntry> rows;
    rows.push_back({"lobsm_p_0.5", static_symmetric_threshold(0.5),
                    adaptive_symmetric_threshold(), bsm_sqm_threshold()});
    for (double p : {0.5, 0.9, 1.0}) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "assisted_p_%.1f", p);
        rows.push_back({buf, static_symmetric_threshold(p), adaptive_symmetric_threshold(),
                        bsm_sqm_threshold()});
    }
    rows.push_back({"deterministic", 0.5, 0.5, 0.5});
    return rows;
}

std::pair<double, double> detection_window() {
    return {0.5, 1.0 / std::sqrt(2.0)};
}

std::optional<double> repeater_max_distance(double eta_b, double eta_d,
                                            double one_minus_threshold,
                                            double attenuation_db_per_km) {
    if (!(eta_b > 0.0 && eta_b <= 1.0 && eta_d > 0.0 && eta_d <= 1.0))
        throw std::invalid_argument("efficiencies must lie in (0, 1]");
    if (!(one_minus_threshold > 0.0 && one_minus_threshold <= 1.0))
        throw std::invalid_argument("per-photon requirement must lie in (0, 1]");
    if (!(attenuation_db_per_km > 0.0))
        throw std::invalid_argument("attenuation must be positive");
    double product = eta_b * eta_d;
    if (product <= one_minus_threshold) return std::nullopt;
    return (10.0 / attenuation_db_per_km) * std::log10(product / one_minus_threshold);
}

}  // namespace ltbsm::bounds
