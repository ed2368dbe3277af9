#include "ltbsm/codes.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ltbsm::codes {

using gf2::Matrix;
using gf2::PauliOperator;

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_commutation_full(const std::vector<PauliOperator>& stabs) {
    for (size_t i = 0; i < stabs.size(); ++i)
        for (size_t j = i + 1; j < stabs.size(); ++j)
            require(gf2::symplectic_product(stabs[i], stabs[j]) == 0,
                    "stabilizers do not mutually commute");
}

// pairwise commutation restricted to support-overlapping pairs; pairs with
// disjoint support commute trivially
void check_commutation_buckets(size_t n, const std::vector<PauliOperator>& stabs) {
    std::vector<std::vector<uint32_t>> touching(n);
    for (uint32_t s = 0; s < stabs.size(); ++s)
        for (size_t q = 0; q < n; ++q)
            if (stabs[s].x.get(q) || stabs[s].z.get(q)) touching[q].push_back(s);
    std::map<std::pair<uint32_t, uint32_t>, bool> seen;
    for (size_t q = 0; q < n; ++q)
        for (size_t a = 0; a < touching[q].size(); ++a)
            for (size_t b = a + 1; b < touching[q].size(); ++b) {
                auto key = std::make_pair(touching[q][a], touching[q][b]);
                if (!seen.emplace(key, true).second) continue;
                require(gf2::symplectic_product(stabs[key.first], stabs[key.second]) == 0,
                        "stabilizers do not mutually commute");
            }
}

size_t tableau_rank(size_t n, const std::vector<PauliOperator>& stabs) {
    Matrix m(stabs.size(), 2 * n);
    for (size_t s = 0; s < stabs.size(); ++s)
        for (size_t q = 0; q < n; ++q) {
            if (stabs[s].x.get(q)) m.set(s, q);
            if (stabs[s].z.get(q)) m.set(s, n + q);
        }
    return gf2::rank(m);
}

}  // namespace

void StabilizerCode::validate() const {
    require(n >= 1, "code must have at least one qubit");
    require(logical_x.n == n && logical_z.n == n, "logical operator size mismatch");
    for (const auto& s : stabilizers) {
        require(s.n == n, "stabilizer size mismatch");
        require(gf2::symplectic_product(logical_x, s) == 0,
                "logical X anticommutes with a stabilizer");
        require(gf2::symplectic_product(logical_z, s) == 0,
                "logical Z anticommutes with a stabilizer");
    }
    require(gf2::symplectic_product(logical_x, logical_z) == 1,
            "logical X and Z must anticommute");
    require(stabilizers.size() == n - 1, "expected n-1 stabilizers");
    if (n <= kFullValidationCap) {
        check_commutation_full(stabilizers);
        require(tableau_rank(n, stabilizers) == n - 1, "stabilizers not independent");
    } else {
        check_commutation_buckets(n, stabilizers);
    }
}

void JointBellCode::validate() const {
    size_t n2 = 2 * n_pairs;
    for (const auto& s : stabilizers) {
        require(s.n == n2, "stabilizer size mismatch");
        require(gf2::symplectic_product(logical_xx, s) == 0, "logical XX anticommutes");
        require(gf2::symplectic_product(logical_zz, s) == 0, "logical ZZ anticommutes");
    }
    require(gf2::symplectic_product(logical_xx, logical_zz) == 0,
            "joint logicals must commute");
    require(stabilizers.size() == n2 - 2, "expected 2n-2 stabilizers");
    check_commutation_full(stabilizers);
    require(tableau_rank(n2, stabilizers) == n2 - 2, "stabilizers not independent");
}

// ---------------------------------------------------------------------------
StabilizerCode build_repetition(size_t n) {
    require(n >= 1, "rep: n must be >= 1");
    StabilizerCode c;
    c.n = n;
    c.label = "rep:" + std::to_string(n);
    for (size_t i = 0; i + 1 < n; ++i) {
        PauliOperator s(n);
        s.z.set(i);
        s.z.set(i + 1);
        c.stabilizers.push_back(std::move(s));
    }
    c.logical_x = PauliOperator(n);
    for (size_t i = 0; i < n; ++i) c.logical_x.x.set(i);
    c.logical_z = PauliOperator::single_z(n, 0);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// QPC(n,m): qubit (i,j) -> i*m + j. Stabilizers: Z_{i,j} Z_{i,j+1} within each
// block, and the X product over adjacent block pairs. Logical X is one full
// block of X's, logical Z one Z per block.
StabilizerCode build_qpc(size_t n, size_t m) {
    require(n >= 1 && m >= 1, "qpc: n and m must be >= 1");
    size_t nq = n * m;
    StabilizerCode c;
    c.n = nq;
    c.label = "qpc:" + std::to_string(n) + "," + std::to_string(m);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j + 1 < m; ++j) {
            PauliOperator s(nq);
            s.z.set(i * m + j);
            s.z.set(i * m + j + 1);
            c.stabilizers.push_back(std::move(s));
        }
    for (size_t i = 0; i + 1 < n; ++i) {
        PauliOperator s(nq);
        for (size_t j = 0; j < m; ++j) {
            s.x.set(i * m + j);
            s.x.set((i + 1) * m + j);
        }
        c.stabilizers.push_back(std::move(s));
    }
    c.logical_x = PauliOperator(nq);
    for (size_t j = 0; j < m; ++j) c.logical_x.x.set(j);
    c.logical_z = PauliOperator(nq);
    for (size_t i = 0; i < n; ++i) c.logical_z.z.set(i * m);
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// Tree graph code. The encoder entangles the input qubit with the depth-1
// vertices and measures it out, so the physical qubits are exactly the
// non-root vertices. Writing K(v) = X_v Z_parent(v) Z_children(v) for the
// graph generator (root factors dropped):
//   stabilizers: K(c_i) K(c_{i+1}) over adjacent depth-1 vertices, plus K(v)
//                for every vertex of depth >= 2
//   logical X:   product of Z over all depth-1 vertices
//   logical Z:   X on one depth-1 vertex times Z on its children
struct TreeBuild {
    std::shared_ptr<TreeMeta> meta;
    std::vector<uint32_t> parent;  // parent id, or UINT32_MAX for depth-1
};

static TreeBuild build_tree_meta(const std::vector<size_t>& branching) {
    require(!branching.empty(), "tree: branching must be non-empty");
    for (size_t b : branching) require(b >= 1, "tree: branching entries must be >= 1");
    auto meta = std::make_shared<TreeMeta>();
    meta->branching = branching;
    std::vector<uint32_t> parent;

    size_t level_count = branching[0];
    size_t level_start = 0;
    for (size_t i = 0; i < level_count; ++i) {
        parent.push_back(UINT32_MAX);
        meta->root_children.push_back(static_cast<uint32_t>(i));
    }
    size_t total = level_count;
    for (size_t depth = 1; depth < branching.size(); ++depth) {
        size_t b = branching[depth];
        size_t next_start = total;
        for (size_t v = level_start; v < level_start + level_count; ++v)
            for (size_t k = 0; k < b; ++k) parent.push_back(static_cast<uint32_t>(v));
        level_start = next_start;
        level_count *= b;
        total += level_count;
    }
    meta->n = total;
    meta->child_begin.assign(total, 0);
    meta->child_end.assign(total, 0);
    // children are contiguous in BFS order
    for (uint32_t v = 0; v < total; ++v) {
        if (parent[v] == UINT32_MAX) continue;
        uint32_t p = parent[v];
        if (meta->child_end[p] == 0) meta->child_begin[p] = v;
        meta->child_end[p] = v + 1;
    }
    return TreeBuild{std::move(meta), std::move(parent)};
}

StabilizerCode build_tree_code(const std::vector<size_t>& branching) {
    TreeBuild tb = build_tree_meta(branching);
    const TreeMeta& t = *tb.meta;
    size_t nq = t.n;

    auto graph_gen = [&](uint32_t v) {
        PauliOperator k(nq);
        k.x.set(v);
        if (tb.parent[v] != UINT32_MAX) k.z.set(tb.parent[v]);
        for (uint32_t c = t.child_begin[v]; c < t.child_end[v]; ++c) k.z.set(c);
        return k;
    };

    StabilizerCode c;
    c.n = nq;
    {
        std::string lbl = "tree:";
        for (size_t i = 0; i < branching.size(); ++i) {
            if (i) lbl += '-';
            lbl += std::to_string(branching[i]);
        }
        c.label = lbl;
    }
    for (size_t i = 0; i + 1 < t.root_children.size(); ++i) {
        PauliOperator s = graph_gen(t.root_children[i]);
        s.mul_inplace(graph_gen(t.root_children[i + 1]));
        c.stabilizers.push_back(std::move(s));
    }
    for (uint32_t v = 0; v < nq; ++v)
        if (tb.parent[v] != UINT32_MAX) c.stabilizers.push_back(graph_gen(v));

    c.logical_x = PauliOperator(nq);
    for (uint32_t rc : t.root_children) c.logical_x.z.set(rc);
    c.logical_z = PauliOperator(nq);
    uint32_t c1 = t.root_children[0];
    c.logical_z.x.set(c1);
    for (uint32_t g = t.child_begin[c1]; g < t.child_end[c1]; ++g) c.logical_z.z.set(g);

    c.tree = tb.meta;
    c.validate();
    return c;
}

TreeProbs tree_measure_probabilities(const TreeMeta& tree, double eta) {
    size_t d = tree.branching.size();
    // z[k]: P(Z outcome of a depth-k vertex obtainable), going leaves-up.
    // A vertex is read directly (eta) or indirectly via one child c: c must
    // survive and every child of c must itself be Z-obtainable.
    std::vector<double> z(d + 3, 1.0);
    for (size_t k = d; k >= 1; --k) {
        size_t nc = (k < d) ? tree.branching[k] : 0;
        double ik = 0.0;
        if (nc > 0) {
            size_t ngc = (k + 1 < d) ? tree.branching[k + 1] : 0;
            double per_child = eta * std::pow(z[k + 2], static_cast<double>(ngc));
            ik = 1.0 - std::pow(1.0 - per_child, static_cast<double>(nc));
        }
        z[k] = 1.0 - (1.0 - eta) * (1.0 - ik);
    }
    double b1 = static_cast<double>(tree.branching[0]);
    double px = std::pow(z[1], b1);
    size_t ngc = (d > 1) ? tree.branching[1] : 0;
    double per_child = eta * std::pow(z[2], static_cast<double>(ngc));
    double pz = 1.0 - std::pow(1.0 - per_child, b1);
    return TreeProbs{px, pz};
}

// ---------------------------------------------------------------------------
// Rotated surface code on a d x d grid, qubit (r,c) -> r*d + c. Plaquettes
// live on the (d+1) x (d+1) corner grid; bulk faces alternate X/Z in a
// checkerboard, weight-2 X faces close the top/bottom boundaries and
// weight-2 Z faces the left/right ones. Logical Z is the top row of Z's,
// logical X the left column of X's.
StabilizerCode build_rotated_surface(size_t d) {
    require(d >= 1 && d % 2 == 1, "surface: d must be odd");
    size_t nq = d * d;
    StabilizerCode c;
    c.n = nq;
    c.label = "surface:" + std::to_string(d);
    auto q = [d](size_t r, size_t col) { return r * d + col; };
    for (size_t r = 0; r <= d; ++r)
        for (size_t col = 0; col <= d; ++col) {
            bool is_x = (r + col) % 2 == 0;
            bool bulk = r >= 1 && r <= d - 1 && col >= 1 && col <= d - 1;
            bool top_bot = (r == 0 || r == d) && col >= 1 && col <= d - 1;
            bool left_right = (col == 0 || col == d) && r >= 1 && r <= d - 1;
            if (!(bulk || (top_bot && is_x) || (left_right && !is_x))) continue;
            PauliOperator s(nq);
            for (int dr = -1; dr <= 0; ++dr)
                for (int dc = -1; dc <= 0; ++dc) {
                    long rr = static_cast<long>(r) + dr;
                    long cc = static_cast<long>(col) + dc;
                    if (rr < 0 || cc < 0 || rr >= static_cast<long>(d) ||
                        cc >= static_cast<long>(d))
                        continue;
                    if (is_x)
                        s.x.set(q(rr, cc));
                    else
                        s.z.set(q(rr, cc));
                }
            c.stabilizers.push_back(std::move(s));
        }
    c.logical_z = PauliOperator(nq);
    for (size_t col = 0; col < d; ++col) c.logical_z.z.set(q(0, col));
    c.logical_x = PauliOperator(nq);
    for (size_t r = 0; r < d; ++r) c.logical_x.x.set(q(r, 0));
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
JointBellCode build_bell_repetition(size_t n) {
    require(n >= 1, "bellrep: n must be >= 1");
    size_t nq = 2 * n;
    JointBellCode c;
    c.n_pairs = n;
    c.label = "bellrep:" + std::to_string(n);
    auto qa = [](size_t i) { return 2 * i; };
    auto qb = [](size_t i) { return 2 * i + 1; };
    for (size_t i = 0; i + 1 < n; ++i) {
        PauliOperator sx(nq);
        sx.x.set(qa(i));
        sx.x.set(qb(i));
        sx.x.set(qa(i + 1));
        sx.x.set(qb(i + 1));
        c.stabilizers.push_back(std::move(sx));
        PauliOperator sz(nq);
        sz.z.set(qa(i));
        sz.z.set(qb(i));
        sz.z.set(qa(i + 1));
        sz.z.set(qb(i + 1));
        c.stabilizers.push_back(std::move(sz));
    }
    c.logical_xx = PauliOperator(nq);
    c.logical_xx.x.set(qa(0));
    c.logical_xx.x.set(qb(0));
    c.logical_zz = PauliOperator(nq);
    c.logical_zz.z.set(qa(0));
    c.logical_zz.z.set(qb(0));
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
QpcVariantCode build_qpc2_variant(size_t n_blocks, StabilizerCode inner) {
    require(n_blocks >= 1, "qpc2var: n_blocks must be >= 1");
    inner.validate();
    QpcVariantCode v;
    v.n_blocks = n_blocks;
    v.label = "qpc2var:" + std::to_string(n_blocks) + "/inner=" + inner.label;
    v.inner = std::move(inner);
    return v;
}

StabilizerCode QpcVariantCode::flattened() const {
    size_t nq = flattened_n();
    StabilizerCode c;
    c.n = nq;
    c.label = label + "/flattened";

    auto embed = [&](const gf2::PauliOperator& p, size_t offset) {
        PauliOperator out(nq);
        for (size_t i = 0; i < p.n; ++i) {
            if (p.x.get(i)) out.x.set(offset + i);
            if (p.z.get(i)) out.z.set(offset + i);
        }
        return out;
    };

    for (size_t b = 0; b < n_blocks; ++b) {
        for (const auto& s : inner.stabilizers) c.stabilizers.push_back(embed(s, inner_offset(b)));
        // in-block ZZ between q1 and the encoded q2
        PauliOperator zz = embed(inner.logical_z, inner_offset(b));
        zz.z.set(q1_index(b));
        c.stabilizers.push_back(std::move(zz));
    }
    for (size_t b = 0; b + 1 < n_blocks; ++b) {
        PauliOperator xx = embed(inner.logical_x, inner_offset(b));
        xx.mul_inplace(embed(inner.logical_x, inner_offset(b + 1)));
        xx.x.set(q1_index(b));
        xx.x.set(q1_index(b + 1));
        c.stabilizers.push_back(std::move(xx));
    }
    c.logical_x = embed(inner.logical_x, inner_offset(0));
    c.logical_x.x.set(q1_index(0));
    c.logical_z = PauliOperator(nq);
    for (size_t b = 0; b < n_blocks; ++b) c.logical_z.z.set(q1_index(b));
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

size_t parse_count(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(what);
        return static_cast<size_t>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("invalid " + what + ": '" + s + "'");
    }
}

}  // namespace

CodeVariant parse_code_spec(const std::string& spec) {
    size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("invalid code spec: '" + spec + "'");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "rep") return build_repetition(parse_count(rest, "rep size"));
    if (kind == "qpc") {
        auto parts = split(rest, ',');
        if (parts.size() != 2) throw std::invalid_argument("qpc spec needs n,m");
        return build_qpc(parse_count(parts[0], "qpc n"), parse_count(parts[1], "qpc m"));
    }
    if (kind == "tree") {
        std::vector<size_t> branching;
        for (const auto& tok : split(rest, '-'))
            branching.push_back(parse_count(tok, "tree branching"));
        return build_tree_code(branching);
    }
    if (kind == "surface") return build_rotated_surface(parse_count(rest, "surface d"));
    if (kind == "bellrep") return build_bell_repetition(parse_count(rest, "bellrep n"));
    if (kind == "qpc2var") {
        size_t slash = rest.find('/');
        if (slash == std::string::npos || rest.substr(slash + 1, 6) != "inner=")
            throw std::invalid_argument("qpc2var spec needs n/inner=<spec>");
        size_t nb = parse_count(rest.substr(0, slash), "qpc2var n");
        CodeVariant inner = parse_code_spec(rest.substr(slash + 7));
        auto* sc = std::get_if<StabilizerCode>(&inner);
        if (!sc) throw std::invalid_argument("qpc2var inner must be a plain stabilizer code");
        return build_qpc2_variant(nb, std::move(*sc));
    }
    throw std::invalid_argument("unknown code kind: '" + kind + "'");
}

size_t code_physical_qubits(const CodeVariant& code) {
    if (auto* s = std::get_if<StabilizerCode>(&code)) return s->n;
    if (auto* b = std::get_if<JointBellCode>(&code)) return 2 * b->n_pairs;
    return std::get<QpcVariantCode>(code).flattened_n();
}

const std::string& code_label(const CodeVariant& code) {
    if (auto* s = std::get_if<StabilizerCode>(&code)) return s->label;
    if (auto* b = std::get_if<JointBellCode>(&code)) return b->label;
    return std::get<QpcVariantCode>(code).label;
}

}  // namespace ltbsm::codes
