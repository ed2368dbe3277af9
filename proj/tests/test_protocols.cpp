#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ltbsm/protocols.hpp"

using namespace ltbsm;
using codes::StabilizerCode;
using decodability::Logical;
using erasure::LossPattern;
using protocols::ProtocolId;

namespace {

LossPattern mask_pattern(size_t n, uint64_t mask) { return LossPattern::from_mask(n, mask); }

struct SqmIssuingStrategy : protocols::AdaptiveStrategy {
    protocols::Action next(const protocols::StrategyState&) const override {
        protocols::Action a;
        a.kind = protocols::Action::kSqm;
        return a;
    }
};

}  // namespace

TEST_CASE("protocol id parsing") {
    CHECK(protocols::parse_protocol("static") == ProtocolId::Static);
    CHECK(protocols::parse_protocol("adaptive-bsm") == ProtocolId::AdaptiveBsm);
    CHECK(protocols::parse_protocol("adaptive-qpc-sqm") == ProtocolId::AdaptiveQpcSqm);
    CHECK(protocols::parse_protocol("teleport") == ProtocolId::Teleport);
    CHECK_THROWS_AS(protocols::parse_protocol("nope"), std::invalid_argument);
    CHECK(protocols::protocol_name(ProtocolId::AdaptiveQpcSqm) == "adaptive-qpc-sqm");
}

TEST_CASE("sqm logical measurement") {
    auto rep3 = codes::build_repetition(3);
    CHECK(protocols::sqm_logical_measure(rep3, Logical::Z, mask_pattern(3, 0b011)));
    for (uint64_t r = 0; r < 7; ++r)
        CHECK(!protocols::sqm_logical_measure(rep3, Logical::X, mask_pattern(3, r)));
    auto t22 = codes::build_tree_code({2, 2});
    CHECK(protocols::sqm_logical_measure(t22, Logical::Z, mask_pattern(6, 0b001101)));
}

TEST_CASE("static protocol with a deterministic BSM always succeeds losslessly") {
    auto model = lobsm::parse_model_spec("deterministic");
    for (const char* spec : {"rep:3", "surface:3", "qpc:2,2", "tree:2-2"}) {
        auto code = std::get<StabilizerCode>(codes::parse_code_spec(spec));
        auto all = LossPattern::all_surviving(code.n);
        for (uint64_t s = 0; s < 10; ++s) {
            auto run = protocols::run_static_bsm(code, model, all, all, rng::Key(s));
            CHECK(run.success);
            CHECK(run.xx_recovered);
            CHECK(run.zz_recovered);
        }
    }
}

TEST_CASE("run replay determinism") {
    auto code = std::get<StabilizerCode>(codes::parse_code_spec("surface:3"));
    auto model = lobsm::parse_model_spec("random-basis");
    auto la = erasure::sample_loss(code.n, 0.8, rng::Key(5).derive(rng::kLossA));
    auto lb = erasure::sample_loss(code.n, 0.9, rng::Key(5).derive(rng::kLossB));
    auto r1 = protocols::run_static_bsm(code, model, la, lb, rng::Key(42));
    auto r2 = protocols::run_static_bsm(code, model, la, lb, rng::Key(42));
    CHECK(r1 == r2);
    auto r3 = protocols::run_static_bsm(code, model, la, lb, rng::Key(43));
    (void)r3;  // different seed may legally differ; only replay equality is contracted
}

TEST_CASE("verdict always equals xx and zz recovery") {
    auto code = std::get<StabilizerCode>(codes::parse_code_spec("qpc:3,2"));
    auto model = lobsm::parse_model_spec("zz-det");
    rng::Key key(777);
    for (uint64_t t = 0; t < 300; ++t) {
        auto kt = key.derive(rng::kTrial, t);
        auto la = erasure::sample_loss(code.n, 0.8, kt.derive(rng::kLossA));
        auto lb = erasure::sample_loss(code.n, 0.85, kt.derive(rng::kLossB));
        auto run = protocols::run_static_bsm(code, model, la, lb, kt);
        CHECK(run.success == (run.xx_recovered && run.zz_recovered));
    }
}

TEST_CASE("adaptive BSM-only protocol") {
    auto code = std::get<StabilizerCode>(codes::parse_code_spec("qpc:4,2"));
    auto model = lobsm::zz_deterministic();
    protocols::GreedyBsmStrategy strategy(model);
    auto all = LossPattern::all_surviving(code.n);

    size_t successes = 0;
    const size_t runs = 2000;
    for (uint64_t t = 0; t < runs; ++t) {
        auto run = protocols::run_adaptive_bsm_only(code, model, strategy, all, all,
                                                    rng::Key(900).derive(rng::kTrial, t));
        successes += run.success;
        CHECK(run.success == (run.xx_recovered && run.zz_recovered));
    }
    CHECK(successes > 0);
    CHECK(successes < runs);

    auto r1 = protocols::run_adaptive_bsm_only(code, model, strategy, all, all, rng::Key(1));
    auto r2 = protocols::run_adaptive_bsm_only(code, model, strategy, all, all, rng::Key(1));
    CHECK(r1 == r2);

    SqmIssuingStrategy bad;
    CHECK_THROWS_AS(protocols::run_adaptive_bsm_only(code, model, bad, all, all, rng::Key(2)),
                    protocols::ProtocolViolation);
}

TEST_CASE("qpc protocol block accounting") {
    auto variant = codes::build_qpc2_variant(3, codes::build_tree_code({2, 2}));
    auto model = lobsm::zz_deterministic();
    size_t nf = variant.flattened_n();
    auto all = LossPattern::all_surviving(nf);
    rng::Key key(5150);
    for (uint64_t t = 0; t < 500; ++t) {
        auto kt = key.derive(rng::kTrial, t);
        auto la = erasure::sample_loss(nf, 0.85, kt.derive(rng::kLossA));
        auto lb = erasure::sample_loss(nf, 0.85, kt.derive(rng::kLossB));
        auto run = protocols::run_adaptive_qpc_sqm(variant, model, la, lb, kt);
        CHECK(run.success == (run.xx_recovered && run.zz_recovered));

        bool any_x = false, all_sqm = true;
        for (size_t b = 0; b < 3; ++b) {
            any_x |= static_cast<bool>(run.block_is_x[b]);
            all_sqm &= static_cast<bool>(run.sqm_ok_a[b]) && static_cast<bool>(run.sqm_ok_b[b]);
        }
        CHECK(run.success == (any_x && all_sqm));
    }
    // lossless with a deterministic model every block is an X block
    auto run = protocols::run_adaptive_qpc_sqm(variant, lobsm::assisted(1.0), all, all,
                                               rng::Key(3));
    CHECK(run.success);
    for (size_t b = 0; b < 3; ++b) CHECK(run.block_is_x[b]);
}

TEST_CASE("partial-ZZ reuse never hurts") {
    auto variant = codes::build_qpc2_variant(4, codes::build_tree_code({2, 2}));
    auto model = lobsm::zz_deterministic();
    size_t nf = variant.flattened_n();
    rng::Key key(8888);
    size_t plain = 0, relaxed = 0;
    for (uint64_t t = 0; t < 3000; ++t) {
        auto kt = key.derive(rng::kTrial, t);
        auto la = erasure::sample_loss(nf, 0.75, kt.derive(rng::kLossA));
        auto lb = erasure::sample_loss(nf, 0.75, kt.derive(rng::kLossB));
        bool p = protocols::run_adaptive_qpc_sqm(variant, model, la, lb, kt, false).success;
        bool q = protocols::run_adaptive_qpc_sqm(variant, model, la, lb, kt, true).success;
        plain += p;
        relaxed += q;
        if (p) CHECK(q);  // the relaxed accounting dominates pointwise
    }
    CHECK(relaxed >= plain);
}

TEST_CASE("joint recovery fast rule equals the rank route") {
    for (size_t n : {size_t(1), size_t(2), size_t(3), size_t(4)}) {
        auto code = codes::build_bell_repetition(n);
        for (uint64_t sxx = 0; sxx < (uint64_t(1) << n); ++sxx)
            for (uint64_t szz = 0; szz < (uint64_t(1) << n); ++szz) {
                CHECK(protocols::joint_recovered_fast(n, sxx, szz, true) ==
                      protocols::joint_recovered_generic(code, sxx, szz, true));
                CHECK(protocols::joint_recovered_fast(n, sxx, szz, false) ==
                      protocols::joint_recovered_generic(code, sxx, szz, false));
            }
    }
}

TEST_CASE("teleport decoder mirrors the underlying BSM run") {
    auto code = codes::parse_code_spec("qpc2var:2/inner=tree:2-2");
    auto model = lobsm::parse_model_spec("zz-det");
    size_t nf = codes::code_physical_qubits(code);
    rng::Key key(616);
    protocols::RunOptions opts;
    opts.teleport_via = ProtocolId::AdaptiveQpcSqm;
    for (uint64_t t = 0; t < 200; ++t) {
        auto kt = key.derive(rng::kTrial, t);
        auto la = erasure::sample_loss(nf, 0.8, kt.derive(rng::kLossA));
        auto lb = erasure::sample_loss(nf, 0.8, kt.derive(rng::kLossB));
        auto direct = protocols::run_protocol(ProtocolId::AdaptiveQpcSqm, code, model, la, lb,
                                              kt, opts);
        auto tele = protocols::run_teleport_decode(ProtocolId::AdaptiveQpcSqm, code, model,
                                                   la, lb, kt, opts);
        CHECK(tele.success == direct.success);
        CHECK(tele.protocol == "teleport");
    }
    CHECK_THROWS_AS(protocols::run_teleport_decode(ProtocolId::Teleport, code, model,
                                                   LossPattern(nf), LossPattern(nf),
                                                   rng::Key(0), opts),
                    std::invalid_argument);
}

TEST_CASE("protocol and code kind mismatches are rejected") {
    auto bell = codes::parse_code_spec("bellrep:2");
    auto plain = codes::parse_code_spec("rep:2");
    auto model = lobsm::parse_model_spec("zz-det");
    LossPattern l2(2);
    CHECK_THROWS_AS(protocols::run_protocol(ProtocolId::AdaptiveQpcSqm, plain, model, l2, l2,
                                            rng::Key(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(protocols::run_protocol(ProtocolId::AdaptiveBsm, bell, model, l2, l2,
                                            rng::Key(0)),
                    std::invalid_argument);
}
