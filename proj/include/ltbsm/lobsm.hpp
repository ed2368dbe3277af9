#pragma once

#include <string>
#include <vector>

#include "ltbsm/rng.hpp"

namespace ltbsm::lobsm {

// Physical linear-optical BSM capability per photon pair. p is the intrinsic
// full success probability; p_xx / p_zz are the recovery probabilities of the
// individual stabilizer outcomes given two-photon detection, p_both of both.
struct LobsmModel {
    double p;
    double p_xx;
    double p_zz;
    double p_both;

    // throws std::invalid_argument when the capability constraints fail:
    //   p_both <= p <= 1,  p_xx + p_zz <= 1 + p,  inclusion-exclusion bounds
    void validate() const;

    // same capability with the XX and ZZ roles swapped
    LobsmModel mirrored() const { return LobsmModel{p, p_zz, p_xx, p_both}; }
};

LobsmModel zz_deterministic();
LobsmModel xx_deterministic();
LobsmModel random_basis();
LobsmModel assisted(double p);

struct NamedModel {
    std::string name;
    LobsmModel model;
};
std::vector<NamedModel> standard_models();

enum class Outcome { PhotonLost, Neither, XXOnly, ZZOnly, Both };

inline bool includes_xx(Outcome o) { return o == Outcome::XXOnly || o == Outcome::Both; }
inline bool includes_zz(Outcome o) { return o == Outcome::ZZOnly || o == Outcome::Both; }

// PhotonLost unless both photons detected; otherwise Both / XXOnly / ZZOnly /
// Neither with the model's probabilities, driven by one uniform draw
Outcome sample_outcome(const LobsmModel& m, bool a_detected, bool b_detected, double u01);

// per-pair heterogeneous capabilities (one model per pair)
struct VectorModel {
    std::string label;
    std::vector<LobsmModel> per_pair;

    void validate() const;
    const LobsmModel& at(size_t pair) const { return per_pair[pair % per_pair.size()]; }
};

// model specs: zz-det | xx-det | random-basis | assisted:p=<float> |
// vector:<file> (one "p,p_xx,p_zz,p_both" line per pair)
struct ModelSpec {
    std::string label;
    bool is_vector = false;
    LobsmModel scalar{};
    VectorModel vec{};

    const LobsmModel& pair_model(size_t pair) const {
        return is_vector ? vec.at(pair) : scalar;
    }
};
ModelSpec parse_model_spec(const std::string& spec);

}  // namespace ltbsm::lobsm
