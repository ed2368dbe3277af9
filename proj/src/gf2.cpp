#include "ltbsm/gf2.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace ltbsm::gf2 {

// ---------------------------------------------------------------------------
// scalar reference kernels
// ---------------------------------------------------------------------------
namespace {

void xor_into_scalar(Word* dst, const Word* src, size_t nwords) {
    for (size_t i = 0; i < nwords; ++i) dst[i] ^= src[i];
}

unsigned and_parity_scalar(const Word* a, const Word* b, size_t nwords) {
    Word acc = 0;
    for (size_t i = 0; i < nwords; ++i) acc ^= a[i] & b[i];
    return static_cast<unsigned>(__builtin_popcountll(acc) & 1);
}

const Kernels g_scalar{&xor_into_scalar, &and_parity_scalar, "scalar"};

}  // namespace

const Kernels& scalar_kernels() { return g_scalar; }

#if defined(__x86_64__)
const Kernels* avx2_kernels_if_supported();  // defined in gf2_kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const Kernels* neon_kernels();  // defined in gf2_kernels_neon.cpp
#endif

std::vector<const Kernels*> available_kernels() {
    std::vector<const Kernels*> v{&g_scalar};
#if defined(__x86_64__)
    if (const Kernels* k = avx2_kernels_if_supported()) v.push_back(k);
#endif
#if defined(__aarch64__)
    if (const Kernels* k = neon_kernels()) v.push_back(k);
#endif
    return v;
}

namespace {

const Kernels* select_kernels() {
    const char* want = std::getenv("LTBSM_KERNEL");
    auto all = available_kernels();
    if (want) {
        for (const Kernels* k : all)
            if (std::strcmp(k->name, want) == 0) return k;
        return &g_scalar;  // unknown name: fall back rather than abort
    }
    return all.back();  // best available
}

}  // namespace

const Kernels& active_kernels() {
    static const Kernels* k = select_kernels();
    return *k;
}

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------
void Matrix::append_row(const BitVec& v) {
    if (v.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
    bits_.resize(bits_.size() + row_words_, 0);
    ++rows_;
    std::memcpy(row(rows_ - 1), v.data(), v.words() * sizeof(Word));
}

void Matrix::swap_rows(size_t a, size_t b) {
    if (a == b) return;
    Word* ra = row(a);
    Word* rb = row(b);
    for (size_t i = 0; i < row_words_; ++i) std::swap(ra[i], rb[i]);
}

size_t rank(const Matrix& m) {
    Matrix w = m;
    const auto& k = active_kernels();
    size_t r = 0;
    for (size_t c = 0; c < w.cols() && r < w.rows(); ++c) {
        size_t piv = r;
        while (piv < w.rows() && !w.get(piv, c)) ++piv;
        if (piv == w.rows()) continue;
        w.swap_rows(r, piv);
        for (size_t i = 0; i < w.rows(); ++i)
            if (i != r && w.get(i, c)) k.xor_into(w.row(i), w.row(r), w.row_words());
        ++r;
    }
    return r;
}

std::optional<BitVec> in_row_span(const BitVec& target, const Matrix& basis) {
    if (target.size() != basis.cols())
        throw std::invalid_argument("in_row_span: width mismatch");
    const auto& k = active_kernels();
    const size_t nr = basis.rows();

    // eliminate a working copy while tracking the combination of original
    // rows that produced each working row
    Matrix w = basis;
    Matrix comb(nr, nr);
    for (size_t i = 0; i < nr; ++i) comb.set(i, i);

    BitVec cur = target;
    BitVec coeff(nr);

    size_t r = 0;
    for (size_t c = 0; c < basis.cols() && r < nr; ++c) {
        size_t piv = r;
        while (piv < nr && !w.get(piv, c)) ++piv;
        if (piv == nr) continue;
        w.swap_rows(r, piv);
        comb.swap_rows(r, piv);
        for (size_t i = r + 1; i < nr; ++i)
            if (w.get(i, c)) {
                k.xor_into(w.row(i), w.row(r), w.row_words());
                k.xor_into(comb.row(i), comb.row(r), comb.row_words());
            }
        if (cur.get(c)) {
            k.xor_into(cur.data(), w.row(r), cur.words());
            k.xor_into(coeff.data(), comb.row(r), coeff.words());
        }
        ++r;
    }
    if (cur.any()) return std::nullopt;
    return coeff;
}

// ---------------------------------------------------------------------------
// PauliOperator
// ---------------------------------------------------------------------------
PauliOperator PauliOperator::single_x(size_t n, size_t q) {
    PauliOperator p(n);
    p.x.set(q);
    return p;
}

PauliOperator PauliOperator::single_z(size_t n, size_t q) {
    PauliOperator p(n);
    p.z.set(q);
    return p;
}

size_t PauliOperator::weight() const {
    size_t c = 0;
    for (size_t w = 0; w < x.words(); ++w)
        c += static_cast<size_t>(__builtin_popcountll(x.data()[w] | z.data()[w]));
    return c;
}

std::string PauliOperator::to_string() const {
    std::string s;
    s.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        bool xi = x.get(i), zi = z.get(i);
        s += xi ? (zi ? 'Y' : 'X') : (zi ? 'Z' : 'I');
    }
    return s;
}

unsigned symplectic_product(const PauliOperator& p, const PauliOperator& q) {
    if (p.n != q.n) throw std::invalid_argument("symplectic_product: length mismatch");
    return and_parity(p.x, q.z) ^ and_parity(p.z, q.x);
}

}  // namespace ltbsm::gf2
