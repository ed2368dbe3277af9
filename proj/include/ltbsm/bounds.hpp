#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ltbsm::bounds {

// symmetric-loss thresholds per physical BSM regime and protocol class
struct TableEntry {
    std::string regime;          // lobsm_p_0.5 | assisted_p_<p> | deterministic
    double static_bsm;
    double adaptive_bsm;
    double adaptive_bsm_sqm;
};
std::vector<TableEntry> table1_thresholds();

// product bound (1 - eps_a)(1 - eps_b) >= 1/(1+p) for static logical BSMs
double static_bound_product(double p);

// product bound 1/2 for adaptive BSM-only logical BSMs
double adaptive_bound_product();

// symmetric per-party thresholds implied by the product bounds
double static_symmetric_threshold(double p);   // 1 - 1/sqrt(1+p)
double adaptive_symmetric_threshold();         // 1 - 1/sqrt(2)
double bsm_sqm_threshold();                    // 1/2

// overall detection-probability window where only the BSM+SQM class helps
std::pair<double, double> detection_window();  // (1/2, 1/sqrt(2))

// maximum repeater internode distance: the fibre transmission must stay
// above (per-photon requirement) / (eta_b * eta_d); nullopt when infeasible
std::optional<double> repeater_max_distance(double eta_b, double eta_d,
                                            double one_minus_threshold,
                                            double attenuation_db_per_km = 0.2);

}  // namespace ltbsm::bounds
