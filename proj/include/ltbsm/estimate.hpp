#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltbsm/protocols.hpp"

namespace ltbsm::estimate {

enum class Method { Exact, ClosedForm, MonteCarlo };
std::string method_name(Method m);

struct EstimateResult {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    Method method = Method::Exact;
    uint64_t trials = 0;  // 0 for exact / closed-form
    std::optional<uint64_t> seed;
};

// Wilson score interval for k successes out of n at normal quantile z
std::pair<double, double> wilson_interval(uint64_t successes, uint64_t trials, double z);
inline constexpr double kZ95 = 1.959963984540054;
inline constexpr double kZ99 = 2.5758293035489004;

// probability that a logical measurement of the inner code succeeds at
// transmission eta: tree codes use the exact recursion, everything else the
// subset enumeration (capacity-capped)
double inner_measure_probability(const codes::StabilizerCode& inner,
                                 decodability::Logical which, double eta);

// success probability of the QPC(n,2)-variant protocol given the physical
// full-BSM probability p (per detected pair) and the four inner logical
// measurement success probabilities
EstimateResult qpc_closed_form(size_t n_blocks, double eta_a, double eta_b, double p,
                               double px_a, double pz_a, double px_b, double pz_b);

// logical BSM on the Bell-repetition code: per-pair recoveries are
// independent and one pair per operator suffices
EstimateResult bellrep_closed_form(size_t n_pairs, double eta_a, double eta_b,
                                   const lobsm::LobsmModel& m);

EstimateResult exact_success(protocols::ProtocolId id, const codes::CodeVariant& code,
                             const lobsm::ModelSpec& model, double eta_a, double eta_b,
                             const protocols::RunOptions& opts = {});

EstimateResult mc_success(protocols::ProtocolId id, const codes::CodeVariant& code,
                          const lobsm::ModelSpec& model, double eta_a, double eta_b,
                          uint64_t trials, uint64_t seed, unsigned threads = 1,
                          const protocols::RunOptions& opts = {});

// single Monte Carlo trial, exposed for determinism tests
bool mc_trial(protocols::ProtocolId id, const codes::CodeVariant& code,
              const lobsm::ModelSpec& model, double eta_a, double eta_b, rng::Key trial_key,
              const protocols::RunOptions& opts = {});

// ---------------------------------------------------------------------------
// threshold localization over a code family
struct FamilyMember {
    std::string size_label;
    std::string spec;
};

struct ThresholdQuery {
    protocols::ProtocolId protocol = protocols::ProtocolId::Static;
    std::vector<FamilyMember> family;
    lobsm::ModelSpec model;
    double target_success = 0.5;  // the 1 - eps' slack of the threshold definition
    double tolerance = 1e-3;      // bisection width in eps
    bool symmetric = true;
    double eta_b_fixed = 1.0;
    uint64_t trials = 20000;
    uint64_t seed = 1;
    unsigned threads = 1;
    protocols::RunOptions opts;
    size_t max_bisect_iters = 40;
    bool decode_predicate = false;  // decodability instead of a BSM protocol
};

struct SizeResult {
    std::string size_label;
    std::optional<double> epsilon_star;
    std::string flag;  // ok | non-monotone | too-weak
};

struct ThresholdResult {
    std::vector<SizeResult> sizes;
    std::optional<double> extrapolated;  // largest-size crossing
    double drift = 0.0;                  // |last - previous| crossing
    std::string flag;
};

ThresholdResult find_threshold(const ThresholdQuery& query);

}  // namespace ltbsm::estimate
