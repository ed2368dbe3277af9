// ltbsm: loss-tolerant logical Bell-measurement toolkit, command line front end

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ltbsm/bounds.hpp"
#include "ltbsm/estimate.hpp"

using nlohmann::json;
namespace est = ltbsm::estimate;
namespace proto = ltbsm::protocols;

namespace {

constexpr const char* kCsvSchema = "# ltbsm-csv-v1";
constexpr const char* kJsonSchema = "ltbsm-json-v1";

// shortest decimal that round-trips to the same double
std::string fmt(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string fmt_km(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// value or inclusive range start:stop:step
std::vector<double> parse_values(const std::string& s) {
    size_t c1 = s.find(':');
    if (c1 == std::string::npos) return {std::stod(s)};
    size_t c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("range needs start:stop:step");
    double start = std::stod(s.substr(0, c1));
    double stop = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(s.substr(c2 + 1));
    if (step <= 0) throw std::invalid_argument("range step must be positive");
    std::vector<double> out;
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(std::min(v, stop));
    return out;
}

// RFC-4180 style quoting for fields carrying commas or quotes (code specs
// like qpc:3,2 need it)
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct Sink {
    std::string format = "csv";
    std::string out_path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void flush() {
        std::ostringstream os;
        if (format == "json") {
            json j;
            j["schema"] = kJsonSchema;
            j["rows"] = json::array();
            for (const auto& r : rows) {
                json obj;
                for (size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
                j["rows"].push_back(obj);
            }
            os << j.dump(2) << "\n";
        } else {
            os << kCsvSchema << "\n";
            for (size_t i = 0; i < header.size(); ++i)
                os << header[i] << (i + 1 < header.size() ? "," : "\n");
            for (const auto& r : rows)
                for (size_t i = 0; i < r.size(); ++i)
                    os << csv_field(r[i]) << (i + 1 < r.size() ? "," : "\n");
        }
        if (out_path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            f << os.str();
        }
    }
};

struct CommonArgs {
    std::string protocol = "static";
    std::string code_spec;
    std::string model_spec = "zz-det";
    std::string eta, eta_a, eta_b;
    std::string via = "adaptive-qpc-sqm";
    bool use_partial_zz = false;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--protocol", args.protocol, "static | adaptive-bsm | adaptive-qpc-sqm | teleport");
    cmd->add_option("--code", args.code_spec,
                    "code spec: rep:n qpc:n,m tree:b1-b2-... surface:d bellrep:n "
                    "qpc2var:n/inner=<spec>")
        ->required();
    cmd->add_option("--model", args.model_spec,
                    "zz-det | xx-det | random-basis | assisted:p=<v> | vector:<file>");
    cmd->add_option("--eta", args.eta, "symmetric transmission (value or start:stop:step)");
    cmd->add_option("--eta-a", args.eta_a, "side-a transmission");
    cmd->add_option("--eta-b", args.eta_b, "side-b transmission");
    cmd->add_option("--via", args.via, "underlying protocol for teleport");
    cmd->add_flag("--use-partial-zz", args.use_partial_zz,
                  "reuse ZZ outcomes of partially failed pair BSMs (qpc protocol)");
    cmd->add_option("--threads", args.threads, "Monte Carlo worker threads");
}

std::vector<std::pair<double, double>> eta_points(const CommonArgs& args) {
    std::vector<std::pair<double, double>> pts;
    if (!args.eta.empty()) {
        for (double v : parse_values(args.eta)) pts.emplace_back(v, v);
        return pts;
    }
    if (args.eta_a.empty() || args.eta_b.empty())
        throw std::invalid_argument("provide --eta or both --eta-a and --eta-b");
    auto as = parse_values(args.eta_a);
    auto bs = parse_values(args.eta_b);
    for (double a : as)
        for (double b : bs) pts.emplace_back(a, b);
    return pts;
}

const std::vector<std::string> kEstimateHeader = {
    "protocol", "code",   "model", "eta_a",  "eta_b",   "method",
    "trials",   "mean",   "ci_low", "ci_high", "seed"};

void emit_estimate_row(Sink& sink, const std::string& protocol, const std::string& code,
                       const std::string& model, double ea, double eb,
                       const est::EstimateResult& r) {
    sink.rows.push_back({protocol, code, model, fmt(ea), fmt(eb), est::method_name(r.method),
                         std::to_string(r.trials), fmt(r.mean), fmt(r.ci_low), fmt(r.ci_high),
                         r.seed ? std::to_string(*r.seed) : ""});
}

proto::RunOptions make_opts(const CommonArgs& args) {
    proto::RunOptions opts;
    opts.use_partial_zz = args.use_partial_zz;
    opts.teleport_via = proto::parse_protocol(args.via);
    return opts;
}

int run_point_command(const CommonArgs& args, Sink& sink, bool monte_carlo, uint64_t trials,
                      uint64_t seed) {
    auto code = ltbsm::codes::parse_code_spec(args.code_spec);
    auto model = ltbsm::lobsm::parse_model_spec(args.model_spec);
    auto protocol = proto::parse_protocol(args.protocol);
    auto opts = make_opts(args);
    sink.header = kEstimateHeader;
    for (auto [ea, eb] : eta_points(args)) {
        est::EstimateResult r =
            monte_carlo
                ? est::mc_success(protocol, code, model, ea, eb, trials, seed, args.threads,
                                  opts)
                : est::exact_success(protocol, code, model, ea, eb, opts);
        emit_estimate_row(sink, args.protocol, ltbsm::codes::code_label(code),
                          args.model_spec, ea, eb, r);
    }
    sink.flush();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"loss-tolerant logical Bell state measurement toolkit"};
    app.require_subcommand(1);

    Sink sink;
    app.add_option("--format", sink.format, "csv | json");
    app.add_option("--out", sink.out_path, "write output to a file instead of stdout");

    // ---- exact ----
    CommonArgs exact_args;
    auto* cmd_exact = app.add_subcommand("exact", "exact success probability by enumeration");
    add_common(cmd_exact, exact_args);

    // ---- mc ----
    CommonArgs mc_args;
    uint64_t mc_trials = 0, mc_seed = 0;
    auto* cmd_mc = app.add_subcommand("mc", "Monte Carlo success probability");
    add_common(cmd_mc, mc_args);
    cmd_mc->add_option("--trials", mc_trials, "number of trials")->required();
    cmd_mc->add_option("--seed", mc_seed, "run seed (required for reproducibility)")
        ->required();

    // ---- threshold ----
    CommonArgs th_args;
    std::string th_family, th_sizes, th_family_specs;
    double th_target = 0.5, th_tolerance = 1e-3, th_eta_b = -1.0;
    uint64_t th_trials = 20000, th_seed = 1;
    bool th_decode = false;
    auto* cmd_th = app.add_subcommand("threshold", "family threshold localization");
    cmd_th->add_option("--protocol", th_args.protocol, "protocol id");
    cmd_th->add_option("--family", th_family, "code spec template with @ as the size");
    cmd_th->add_option("--sizes", th_sizes, "comma-separated sizes substituted for @");
    cmd_th->add_option("--family-specs", th_family_specs,
                       "semicolon-separated explicit code specs (ordered by size)");
    cmd_th->add_option("--model", th_args.model_spec, "model spec");
    cmd_th->add_option("--target", th_target, "target success probability");
    cmd_th->add_option("--tolerance", th_tolerance, "bisection tolerance in epsilon");
    cmd_th->add_option("--trials", th_trials, "Monte Carlo trials per point");
    cmd_th->add_option("--seed", th_seed, "run seed");
    cmd_th->add_option("--eta-b", th_eta_b, "fix side-b transmission (default symmetric)");
    cmd_th->add_option("--threads", th_args.threads, "Monte Carlo worker threads");
    cmd_th->add_option("--via", th_args.via, "underlying protocol for teleport");
    cmd_th->add_flag("--use-partial-zz", th_args.use_partial_zz, "qpc partial-ZZ reuse");
    cmd_th->add_flag("--decode", th_decode,
                     "threshold of the decodability predicate instead of a BSM protocol");

    // ---- bounds ----
    bool bounds_table = false;
    auto* cmd_bounds = app.add_subcommand("bounds", "analytic threshold bounds");
    cmd_bounds->add_flag("--table", bounds_table, "emit the symmetric-loss threshold table");

    // ---- repeater ----
    double rp_eta_b = 1.0, rp_eta_d = 1.0, rp_atten = 0.2;
    std::string rp_product;
    auto* cmd_rep = app.add_subcommand("repeater", "repeater link-budget distances");
    cmd_rep->add_option("--eta-b", rp_eta_b, "source brightness");
    cmd_rep->add_option("--eta-d", rp_eta_d, "detector efficiency");
    cmd_rep->add_option("--attenuation", rp_atten, "fibre attenuation in dB/km");
    cmd_rep->add_option("--product", rp_product,
                        "sweep of eta_b*eta_d values (value or start:stop:step)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (cmd_exact->parsed()) return run_point_command(exact_args, sink, false, 0, 0);
        if (cmd_mc->parsed()) return run_point_command(mc_args, sink, true, mc_trials, mc_seed);

        if (cmd_th->parsed()) {
            est::ThresholdQuery q;
            q.protocol = proto::parse_protocol(th_args.protocol);
            q.model = ltbsm::lobsm::parse_model_spec(th_args.model_spec);
            q.target_success = th_target;
            q.tolerance = th_tolerance;
            q.trials = th_trials;
            q.seed = th_seed;
            q.threads = th_args.threads;
            q.opts.use_partial_zz = th_args.use_partial_zz;
            q.opts.teleport_via = proto::parse_protocol(th_args.via);
            q.decode_predicate = th_decode;
            if (th_eta_b >= 0.0) {
                q.symmetric = false;
                q.eta_b_fixed = th_eta_b;
            }
            if (!th_family_specs.empty()) {
                std::istringstream ss(th_family_specs);
                std::string spec;
                size_t idx = 1;
                while (std::getline(ss, spec, ';'))
                    q.family.push_back({std::to_string(idx++), spec});
            } else {
                if (th_family.empty() || th_sizes.empty())
                    throw std::invalid_argument(
                        "threshold needs --family with --sizes, or --family-specs");
                std::istringstream ss(th_sizes);
                std::string size;
                while (std::getline(ss, size, ',')) {
                    std::string spec = th_family;
                    size_t at;
                    while ((at = spec.find('@')) != std::string::npos)
                        spec.replace(at, 1, size);
                    q.family.push_back({size, spec});
                }
            }
            est::ThresholdResult res = est::find_threshold(q);
            sink.header = {"family", "size", "epsilon_star", "tolerance", "target", "flag"};
            std::string family_label = th_family_specs.empty() ? th_family : th_family_specs;
            for (const auto& s : res.sizes)
                sink.rows.push_back({family_label, s.size_label,
                                     s.epsilon_star ? fmt(*s.epsilon_star) : "NA",
                                     fmt(th_tolerance), fmt(th_target), s.flag});
            sink.rows.push_back({family_label, "summary",
                                 res.extrapolated ? fmt(*res.extrapolated) : "NA",
                                 fmt(th_tolerance), fmt(th_target),
                                 res.flag + ";drift=" + fmt(res.drift)});
            sink.flush();
            return 0;
        }

        if (cmd_bounds->parsed()) {
            (void)bounds_table;  // the table is the only output mode
            sink.header = {"regime", "static", "adaptive_bsm", "adaptive_bsm_sqm"};
            for (const auto& row : ltbsm::bounds::table1_thresholds())
                sink.rows.push_back({row.regime, fmt(row.static_bsm), fmt(row.adaptive_bsm),
                                     fmt(row.adaptive_bsm_sqm)});
            sink.flush();
            return 0;
        }

        if (cmd_rep->parsed()) {
            sink.header = {"eta_b_eta_d", "regime", "L_km"};
            std::vector<double> products;
            if (!rp_product.empty())
                products = parse_values(rp_product);
            else
                products = {rp_eta_b * rp_eta_d};
            struct Regime {
                const char* name;
                double per_photon;
            };
            const Regime regimes[] = {
                {"static", 1.0 - ltbsm::bounds::static_symmetric_threshold(0.5)},
                {"adaptive-bsm", 1.0 - ltbsm::bounds::adaptive_symmetric_threshold()},
                {"bsm-sqm", 1.0 - ltbsm::bounds::bsm_sqm_threshold()},
            };
            for (double prod : products)
                for (const auto& r : regimes) {
                    auto d = ltbsm::bounds::repeater_max_distance(prod, 1.0, r.per_photon,
                                                                  rp_atten);
                    sink.rows.push_back({fmt(prod), r.name, d ? fmt_km(*d) : "infeasible"});
                }
            sink.flush();
            return 0;
        }
    } catch (const ltbsm::erasure::CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
