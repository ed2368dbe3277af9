#include "ltbsm/lobsm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ltbsm::lobsm {

namespace {
constexpr double kTol = 1e-12;
}

void LobsmModel::validate() const {
    auto in01 = [](double v) { return v >= -kTol && v <= 1.0 + kTol; };
    if (!(in01(p) && in01(p_xx) && in01(p_zz) && in01(p_both)))
        throw std::invalid_argument("lobsm model probabilities must lie in [0,1]");
    if (p_both > p + kTol) throw std::invalid_argument("lobsm model violates p_both <= p");
    if (p_xx + p_zz > 1.0 + p + kTol)
        throw std::invalid_argument("lobsm model violates p_xx + p_zz <= 1 + p");
    if (p_both > std::min(p_xx, p_zz) + kTol)
        throw std::invalid_argument("lobsm model violates p_both <= min(p_xx, p_zz)");
    if (p_both < p_xx + p_zz - 1.0 - kTol)
        throw std::invalid_argument("lobsm model violates p_both >= p_xx + p_zz - 1");
}

LobsmModel zz_deterministic() { return LobsmModel{0.5, 0.5, 1.0, 0.5}; }
LobsmModel xx_deterministic() { return LobsmModel{0.5, 1.0, 0.5, 0.5}; }
LobsmModel random_basis() { return LobsmModel{0.5, 0.75, 0.75, 0.5}; }

LobsmModel assisted(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("assisted: p must be in [0,1]");
    return LobsmModel{p, (1.0 + p) / 2.0, (1.0 + p) / 2.0, p};
}

std::vector<NamedModel> standard_models() {
    return {
        {"zz-det", zz_deterministic()},
        {"xx-det", xx_deterministic()},
        {"random-basis", random_basis()},
        {"assisted:p=0.5", assisted(0.5)},
        {"assisted:p=1.0", assisted(1.0)},
    };
}

Outcome sample_outcome(const LobsmModel& m, bool a_detected, bool b_detected, double u01) {
    if (!a_detected || !b_detected) return Outcome::PhotonLost;
    double w_both = m.p_both;
    double w_xx = m.p_xx - m.p_both;
    double w_zz = m.p_zz - m.p_both;
    if (u01 < w_both) return Outcome::Both;
    if (u01 < w_both + w_xx) return Outcome::XXOnly;
    if (u01 < w_both + w_xx + w_zz) return Outcome::ZZOnly;
    return Outcome::Neither;
}

void VectorModel::validate() const {
    if (per_pair.empty()) throw std::invalid_argument("vector model must not be empty");
    for (const auto& m : per_pair) m.validate();
}

ModelSpec parse_model_spec(const std::string& spec) {
    ModelSpec out;
    out.label = spec;
    if (spec == "zz-det") {
        out.scalar = zz_deterministic();
    } else if (spec == "xx-det") {
        out.scalar = xx_deterministic();
    } else if (spec == "random-basis") {
        out.scalar = random_basis();
    } else if (spec == "deterministic") {
        out.scalar = assisted(1.0);
    } else if (spec.rfind("assisted:p=", 0) == 0) {
        out.scalar = assisted(std::stod(spec.substr(11)));
    } else if (spec.rfind("vector:", 0) == 0) {
        std::ifstream f(spec.substr(7));
        if (!f) throw std::invalid_argument("cannot open vector model file");
        out.is_vector = true;
        out.vec.label = spec;
        std::string line;
        while (std::getline(f, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            LobsmModel m{};
            char comma;
            if (!(ss >> m.p >> comma >> m.p_xx >> comma >> m.p_zz >> comma >> m.p_both))
                throw std::invalid_argument("bad vector model line: '" + line + "'");
            out.vec.per_pair.push_back(m);
        }
        out.vec.validate();
        return out;
    } else {
        throw std::invalid_argument("unknown model spec: '" + spec + "'");
    }
    out.scalar.validate();
    return out;
}

}  // namespace ltbsm::lobsm
