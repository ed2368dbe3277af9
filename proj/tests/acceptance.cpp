// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured numbers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ltbsm/bounds.hpp"
#include "ltbsm/estimate.hpp"

using namespace ltbsm;
using decodability::Logical;
using erasure::LossPattern;
using protocols::ProtocolId;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    std::string cmd = std::string(LTBSM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < s.size()) {
        size_t end = s.find('\n', start);
        if (end == std::string::npos) end = s.size();
        lines.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t end = line.find(',', start);
        if (end == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, end - start));
        start = end + 1;
    }
}

lobsm::ModelSpec model(const std::string& s) { return lobsm::parse_model_spec(s); }

}  // namespace

// ---------------------------------------------------------------------------
TEST_CASE("criterion 1: analytic threshold table") {
    auto r = run_cli("bounds --table");
    bool pass = r.exit_code == 0;
    auto lines = lines_of(r.out);
    REQUIRE(lines.size() >= 7);
    auto row = [&](size_t i) { return fields_of(lines[2 + i]); };

    auto close = [](double a, double b) { return std::abs(a - b) < 1e-12; };
    pass = pass && close(std::stod(row(0)[1]), 1.0 - std::sqrt(2.0 / 3.0));
    pass = pass && close(std::stod(row(0)[2]), 1.0 - 1.0 / std::sqrt(2.0));
    pass = pass && close(std::stod(row(0)[3]), 0.5);
    const double ps[] = {0.5, 0.9, 1.0};
    for (size_t i = 0; i < 3; ++i)
        pass = pass && close(std::stod(row(1 + i)[1]), 1.0 - 1.0 / std::sqrt(1.0 + ps[i]));
    pass = pass && close(std::stod(row(4)[1]), 0.5) && close(std::stod(row(4)[2]), 0.5) &&
           close(std::stod(row(4)[3]), 0.5);

    report(1, pass, "bounds --table reproduces the analytic thresholds to 1e-12");
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 2: QPC closed form vs enumeration vs Monte Carlo") {
    bool pass = true;
    double worst_gap = 0.0;
    int ci_misses = 0;
    for (const char* inner_spec : {"rep:1", "tree:2-2"}) {
        auto inner = std::get<codes::StabilizerCode>(codes::parse_code_spec(inner_spec));
        double eta_values[] = {0.7, 0.85, 1.0};
        for (size_t n = 1; n <= 5; ++n) {
            auto variant = codes::build_qpc2_variant(n, inner);
            codes::CodeVariant code(variant);
            for (double eta : eta_values) {
                decodability::Predicate px_pred{decodability::Predicate::kMeasurableX};
                decodability::Predicate pz_pred{decodability::Predicate::kMeasurableZ};
                double px = decodability::exact_probability(inner, eta, px_pred);
                double pz = decodability::exact_probability(inner, eta, pz_pred);
                double closed =
                    estimate::qpc_closed_form(n, eta, eta, 0.5, px, pz, px, pz).mean;
                double exact = estimate::exact_success(ProtocolId::AdaptiveQpcSqm, code,
                                                       model("zz-det"), eta, eta)
                                   .mean;
                worst_gap = std::max(worst_gap, std::abs(closed - exact));
                if (std::abs(closed - exact) >= 1e-12) pass = false;

                auto mc = estimate::mc_success(ProtocolId::AdaptiveQpcSqm, code,
                                               model("zz-det"), eta, eta, 100000, 20240811, 2);
                auto k = static_cast<uint64_t>(std::llround(mc.mean * 100000));
                auto [lo, hi] = estimate::wilson_interval(k, 100000, estimate::kZ99);
                if (!(closed >= lo && closed <= hi)) ++ci_misses;
            }
        }
    }
    // 30 independent 99% intervals: allow a single unlucky miss
    pass = pass && ci_misses <= 1;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "closed form = exact to %.2e across 30 configs, %d of 30 outside 99%% CI",
                  worst_gap, ci_misses);
    report(2, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 3: maximal loss tolerance beyond the BSM-only bound") {
    const double eps = 0.35, eta = 1.0 - eps;
    REQUIRE(eps > bounds::adaptive_symmetric_threshold());

    auto code = codes::parse_code_spec("qpc2var:40/inner=tree:12-12-15-3");
    auto mc = estimate::mc_success(ProtocolId::AdaptiveQpcSqm, code, model("zz-det"), eta,
                                   eta, 100000, 1234, 2);
    double half_width = (mc.ci_high - mc.ci_low) / 2.0;
    bool pass = mc.mean >= 0.9 && half_width < 0.01;

    // three independent routes agree: binomial closed form, block-product
    // exact route, and the simulation
    const auto& variant = std::get<codes::QpcVariantCode>(code);
    auto tp = codes::tree_measure_probabilities(*variant.inner.tree, eta);
    double closed =
        estimate::qpc_closed_form(40, eta, eta, 0.5, tp.px, tp.pz, tp.px, tp.pz).mean;
    double exact =
        estimate::exact_success(ProtocolId::AdaptiveQpcSqm, code, model("zz-det"), eta, eta)
            .mean;
    pass = pass && std::abs(closed - exact) < 1e-12 && std::abs(mc.mean - exact) < 4 * half_width;

    double worst_ref = 0.0;
    for (const char* ref : {"qpc:2,2", "qpc:4,2", "qpc:6,2"}) {
        auto ref_code = codes::parse_code_spec(ref);
        auto ref_mc = estimate::mc_success(ProtocolId::AdaptiveBsm, ref_code, model("zz-det"),
                                           eta, eta, 100000, 4321, 2);
        worst_ref = std::max(worst_ref, ref_mc.mean);
        if (ref_mc.mean >= 0.5) pass = false;
    }
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "qpc-sqm success %.4f (+-%.4f) >= 0.9 at eps=0.35; best BSM-only reference "
                  "%.4f < 0.5",
                  mc.mean, half_width, worst_ref);
    report(3, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 4: static threshold trend on surface codes") {
    estimate::ThresholdQuery q;
    q.protocol = ProtocolId::Static;
    q.family = {{"3", "surface:3"}, {"5", "surface:5"}};
    q.model = model("random-basis");
    q.target_success = 0.5;
    q.tolerance = 1e-3;
    q.trials = 400000;  // concentrates the d=5 crossing onto its limit point
    q.seed = 11;
    q.threads = 2;
    auto res = estimate::find_threshold(q);
    REQUIRE(res.sizes.size() == 2);
    REQUIRE(res.sizes[0].epsilon_star.has_value());
    REQUIRE(res.sizes[1].epsilon_star.has_value());
    double e3 = *res.sizes[0].epsilon_star;
    double e5 = *res.sizes[1].epsilon_star;
    double target = 1.0 - std::sqrt(2.0 / 3.0);
    bool pass = e5 > e3 && std::abs(e5 - target) <= 0.06;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "crossing d=3 %.4f < d=5 %.4f, |%.4f - %.5f| = %.4f <= 0.06", e3, e5, e5,
                  target, std::abs(e5 - target));
    report(4, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
namespace {

struct SuiteCode {
    std::string label;
    size_t n;
    std::vector<uint8_t> dec;        // decodable per surviving-set mask
    std::vector<uint8_t> mx, mz;     // measurability (empty for joint codes)
};

SuiteCode plain_suite_code(const std::string& spec) {
    auto code = std::get<codes::StabilizerCode>(codes::parse_code_spec(spec));
    SuiteCode out;
    out.label = spec;
    out.n = code.n;
    uint64_t total = uint64_t(1) << code.n;
    out.dec.resize(total);
    out.mx.resize(total);
    out.mz.resize(total);
    for (uint64_t mask = 0; mask < total; ++mask) {
        auto pat = LossPattern::from_mask(code.n, mask);
        out.dec[mask] = decodability::decodable(code, pat);
        out.mx[mask] = decodability::measurable(code, Logical::X, pat);
        out.mz[mask] = decodability::measurable(code, Logical::Z, pat);
    }
    return out;
}

SuiteCode joint_suite_code(size_t n_pairs) {
    auto code = codes::build_bell_repetition(n_pairs);
    SuiteCode out;
    out.label = code.label;
    out.n = 2 * n_pairs;
    uint64_t total = uint64_t(1) << out.n;
    out.dec.resize(total);
    for (uint64_t mask = 0; mask < total; ++mask)
        out.dec[mask] = decodability::decodable_joint(code, LossPattern::from_mask(out.n, mask));
    return out;
}

double prob_of(const std::vector<uint8_t>& flags, size_t n, double eta) {
    double total = 0.0;
    for (uint64_t mask = 0; mask < flags.size(); ++mask) {
        if (!flags[mask]) continue;
        size_t k = static_cast<size_t>(__builtin_popcountll(mask));
        total += std::pow(eta, static_cast<double>(k)) *
                 std::pow(1.0 - eta, static_cast<double>(n - k));
    }
    return total;
}

}  // namespace

TEST_CASE("criterion 5: fundamental inequality suite") {
    std::vector<SuiteCode> suite;
    for (const char* spec :
         {"rep:2", "rep:3", "rep:4", "qpc:2,2", "qpc:3,2", "qpc:2,3", "qpc:3,3", "tree:2",
          "tree:3", "tree:2-2", "tree:3-2", "tree:1-2-2", "surface:3"})
        suite.push_back(plain_suite_code(spec));
    suite.push_back(plain_suite_code("rep:1"));
    for (const char* spec : {"qpc2var:2/inner=rep:1", "qpc2var:2/inner=tree:2"}) {
        auto variant = std::get<codes::QpcVariantCode>(codes::parse_code_spec(spec));
        auto flat = variant.flattened();
        SuiteCode out;
        out.label = flat.label;
        out.n = flat.n;
        uint64_t total = uint64_t(1) << flat.n;
        out.dec.resize(total);
        out.mx.resize(total);
        out.mz.resize(total);
        for (uint64_t mask = 0; mask < total; ++mask) {
            auto pat = LossPattern::from_mask(flat.n, mask);
            out.dec[mask] = decodability::decodable(flat, pat);
            out.mx[mask] = decodability::measurable(flat, Logical::X, pat);
            out.mz[mask] = decodability::measurable(flat, Logical::Z, pat);
        }
        suite.push_back(std::move(out));
    }
    std::vector<SuiteCode> joint;
    for (size_t np : {size_t(2), size_t(3), size_t(4)}) joint.push_back(joint_suite_code(np));

    size_t violations = 0;
    auto monotone_and_exclusions = [&](const SuiteCode& c, bool with_logicals) {
        uint64_t total = uint64_t(1) << c.n;
        uint64_t full = total - 1;
        for (uint64_t r = 0; r < total; ++r) {
            uint64_t comp = full ^ r;
            if (c.dec[r] && c.dec[comp]) ++violations;                       // no-cloning
            if (with_logicals) {
                if (c.mx[r] && c.mz[comp]) ++violations;                     // postulate
                if (c.dec[r] && !(c.mx[r] && c.mz[r])) ++violations;         // dominates
                if (c.dec[r] && (c.mx[comp] || c.mz[comp])) ++violations;    // decode vs measure
            }
            for (size_t q = 0; q < c.n; ++q) {                               // Lemma 1
                if ((r >> q) & 1) continue;
                uint64_t bigger = r | (uint64_t(1) << q);
                if (c.dec[r] && !c.dec[bigger]) ++violations;
                if (with_logicals) {
                    if (c.mx[r] && !c.mx[bigger]) ++violations;
                    if (c.mz[r] && !c.mz[bigger]) ++violations;
                }
            }
        }
    };
    for (const auto& c : suite) monotone_and_exclusions(c, true);
    for (const auto& c : joint) monotone_and_exclusions(c, false);

    // probability-level inequalities on the epsilon grid
    double worst_excess = 0.0, worst_monotone = 0.0;
    auto grid_checks = [&](const SuiteCode& c, bool with_logicals) {
        double prev_dec = -1.0;
        for (int i = 0; i <= 20; ++i) {
            double eps = 0.05 * i;
            double pd1 = prob_of(c.dec, c.n, 1.0 - eps);
            double pd2 = prob_of(c.dec, c.n, eps);
            worst_excess = std::max(worst_excess, pd1 + pd2 - 1.0);
            if (with_logicals) {
                double px = prob_of(c.mx, c.n, 1.0 - eps);
                double pz = prob_of(c.mz, c.n, eps);
                worst_excess = std::max(worst_excess, px + pz - 1.0);
                worst_excess = std::max(worst_excess, pd1 + prob_of(c.mx, c.n, eps) - 1.0);
            }
            worst_monotone = std::max(worst_monotone, prev_dec - pd2);  // increasing in eta
            prev_dec = pd2;
        }
    };
    for (const auto& c : suite) grid_checks(c, true);
    for (const auto& c : joint) grid_checks(c, false);

    bool pass = violations == 0 && worst_excess <= 1e-12 && worst_monotone <= 1e-12;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%zu pattern violations, max inequality excess %.2e, max eta-monotonicity "
                  "violation %.2e over %zu codes",
                  violations, worst_excess, worst_monotone, suite.size() + joint.size());
    report(5, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 6: loss-product equivalence of BSM-only protocols") {
    struct Row {
        ProtocolId id;
        const char* code;
        const char* model;
    };
    const Row rows[] = {
        {ProtocolId::Static, "rep:3", "zz-det"},
        {ProtocolId::Static, "qpc:2,2", "random-basis"},
        {ProtocolId::Static, "qpc:3,2", "zz-det"},
        {ProtocolId::Static, "surface:3", "random-basis"},
        {ProtocolId::Static, "tree:2-2", "assisted:p=0.7"},
        {ProtocolId::Static, "bellrep:3", "zz-det"},
        {ProtocolId::AdaptiveBsm, "qpc:2,2", "zz-det"},
        {ProtocolId::AdaptiveBsm, "rep:3", "random-basis"},
    };
    bool pass = true;
    double worst = 0.0;
    for (const auto& row : rows) {
        auto code = codes::parse_code_spec(row.code);
        auto m = model(row.model);
        double a = estimate::exact_success(row.id, code, m, 0.9, 0.8).mean;
        double b = estimate::exact_success(row.id, code, m, 0.72, 1.0).mean;
        worst = std::max(worst, std::abs(a - b));
        if (std::abs(a - b) >= 1e-12) pass = false;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "exact(0.9, 0.8) = exact(0.72, 1.0) to %.2e on 8 instances", worst);
    report(6, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 7: repeater distances at 0.8 detection product") {
    double static_req = 1.0 - bounds::static_symmetric_threshold(0.5);
    auto d_static = bounds::repeater_max_distance(0.8, 1.0, static_req, 0.2);
    auto d_adaptive = bounds::repeater_max_distance(
        0.8, 1.0, 1.0 - bounds::adaptive_symmetric_threshold(), 0.2);
    auto d_sqm = bounds::repeater_max_distance(0.8, 1.0, 0.5, 0.2);

    bool pass = !d_static.has_value() && d_adaptive.has_value() && d_sqm.has_value() &&
                *d_adaptive >= 2.0 && *d_adaptive <= 3.0 && *d_sqm >= 9.5 && *d_sqm <= 10.5;

    // the CLI agrees
    auto r = run_cli("repeater --eta-b 0.8 --eta-d 1.0");
    auto lines = lines_of(r.out);
    pass = pass && r.exit_code == 0 && fields_of(lines[2])[2] == "infeasible";

    char buf[140];
    std::snprintf(buf, sizeof(buf),
                  "static infeasible; adaptive %.3f km in [2,3]; bsm+sqm %.3f km in [9.5,10.5]",
                  d_adaptive ? *d_adaptive : -1.0, d_sqm ? *d_sqm : -1.0);
    report(7, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 8: bell-repetition success at 60 percent loss") {
    bool pass = true;
    double closed60 = 0.0;
    for (size_t n : {size_t(60), size_t(80), size_t(100)}) {
        double v = estimate::bellrep_closed_form(n, 0.4, 0.4, lobsm::zz_deterministic()).mean;
        if (n == 60) closed60 = v;
        if (v <= 0.99) pass = false;
    }
    auto mc = estimate::mc_success(ProtocolId::Static, codes::parse_code_spec("bellrep:60"),
                                   model("zz-det"), 0.4, 0.4, 100000, 8080, 2);
    pass = pass && mc.mean > 0.99 && mc.ci_low > 0.99;
    char buf[140];
    std::snprintf(buf, sizeof(buf),
                  "closed form %.5f and Monte Carlo %.5f (ci_low %.5f) exceed 0.99 at eps=0.6",
                  closed60, mc.mean, mc.ci_low);
    report(8, pass, buf);
    CHECK(pass);
}

// ---------------------------------------------------------------------------
TEST_CASE("criterion 9: determinism under repetition and threading") {
    const std::string cmds[] = {
        "mc --protocol adaptive-qpc-sqm --code qpc2var:4/inner=tree:2-2 --model zz-det "
        "--eta 0.85 --trials 30000 --seed 99",
        "mc --protocol static --code surface:3 --model random-basis --eta-a 0.9 --eta-b 0.8 "
        "--trials 30000 --seed 7",
    };
    bool pass = true;
    for (const auto& base : cmds) {
        auto a = run_cli(base + " --threads 1");
        auto b = run_cli(base + " --threads 1");
        auto c = run_cli(base + " --threads 4");
        pass = pass && a.exit_code == 0 && a.out == b.out && a.out == c.out && !a.out.empty();
    }
    report(9, pass, "mc output byte-identical across repeats and thread counts {1,4}");
    CHECK(pass);
}
