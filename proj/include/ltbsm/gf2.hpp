#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ltbsm::gf2 {

using Word = uint64_t;
inline constexpr size_t kWordBits = 64;

inline size_t words_for(size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

// ---------------------------------------------------------------------------
// Kernel dispatch. The word-wise XOR and AND-parity loops are the hot inner
// loops of every rank / span query; they have a portable scalar form and a
// SIMD form picked once at startup (overridable with LTBSM_KERNEL=scalar).
// ---------------------------------------------------------------------------
struct Kernels {
    void (*xor_into)(Word* dst, const Word* src, size_t nwords);
    // parity of popcount(a & b)
    unsigned (*and_parity)(const Word* a, const Word* b, size_t nwords);
    const char* name;
};

const Kernels& active_kernels();
const Kernels& scalar_kernels();

// backend registry, one entry per compiled variant (scalar always present)
std::vector<const Kernels*> available_kernels();

// ---------------------------------------------------------------------------
// Bit vector
// ---------------------------------------------------------------------------
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t nbits) : nbits_(nbits), w_(words_for(nbits), 0) {}

    size_t size() const { return nbits_; }
    size_t words() const { return w_.size(); }
    Word* data() { return w_.data(); }
    const Word* data() const { return w_.data(); }

    bool get(size_t i) const { return (w_[i / kWordBits] >> (i % kWordBits)) & 1u; }
    void set(size_t i, bool v = true) {
        Word m = Word(1) << (i % kWordBits);
        if (v)
            w_[i / kWordBits] |= m;
        else
            w_[i / kWordBits] &= ~m;
    }
    void flip(size_t i) { w_[i / kWordBits] ^= Word(1) << (i % kWordBits); }

    void clear() { std::fill(w_.begin(), w_.end(), Word(0)); }

    void xor_with(const BitVec& other) {
        active_kernels().xor_into(w_.data(), other.w_.data(), w_.size());
    }

    bool any() const {
        for (Word w : w_)
            if (w) return true;
        return false;
    }
    size_t count() const {
        size_t c = 0;
        for (Word w : w_) c += static_cast<size_t>(__builtin_popcountll(w));
        return c;
    }

    bool operator==(const BitVec& o) const { return nbits_ == o.nbits_ && w_ == o.w_; }

  private:
    size_t nbits_ = 0;
    std::vector<Word> w_;
};

inline unsigned and_parity(const BitVec& a, const BitVec& b) {
    return active_kernels().and_parity(a.data(), b.data(), a.words());
}

// ---------------------------------------------------------------------------
// Dense bit matrix, row-major packed rows
// ---------------------------------------------------------------------------
class Matrix {
  public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols)
        : rows_(rows), cols_(cols), row_words_(words_for(cols)), bits_(rows * row_words_, 0) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t row_words() const { return row_words_; }

    Word* row(size_t r) { return bits_.data() + r * row_words_; }
    const Word* row(size_t r) const { return bits_.data() + r * row_words_; }

    bool get(size_t r, size_t c) const {
        return (row(r)[c / kWordBits] >> (c % kWordBits)) & 1u;
    }
    void set(size_t r, size_t c, bool v = true) {
        Word m = Word(1) << (c % kWordBits);
        if (v)
            row(r)[c / kWordBits] |= m;
        else
            row(r)[c / kWordBits] &= ~m;
    }

    void append_row(const BitVec& v);
    void xor_row_into(size_t src, size_t dst) {
        active_kernels().xor_into(row(dst), row(src), row_words_);
    }
    void swap_rows(size_t a, size_t b);

  private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t row_words_ = 0;
    std::vector<Word> bits_;
};

// GF(2) row rank; the input is copied, elimination happens on the copy.
size_t rank(const Matrix& m);

// Solve lambda . basis = target over GF(2). Returns the coefficient vector
// (length basis.rows()) or nullopt when target is outside the row span.
std::optional<BitVec> in_row_span(const BitVec& target, const Matrix& basis);

// ---------------------------------------------------------------------------
// Phase-free n-qubit Pauli operator as paired X/Z bit vectors
// ---------------------------------------------------------------------------
struct PauliOperator {
    size_t n = 0;
    BitVec x;
    BitVec z;

    PauliOperator() = default;
    explicit PauliOperator(size_t nq) : n(nq), x(nq), z(nq) {}

    static PauliOperator single_x(size_t n, size_t q);
    static PauliOperator single_z(size_t n, size_t q);

    void mul_inplace(const PauliOperator& other) {
        x.xor_with(other.x);
        z.xor_with(other.z);
    }
    PauliOperator operator*(const PauliOperator& other) const {
        PauliOperator r = *this;
        r.mul_inplace(other);
        return r;
    }

    bool identity() const { return !x.any() && !z.any(); }
    size_t weight() const;  // |support|
    std::string to_string() const;
};

// 0 iff p and q commute: <x_p, z_q> + <z_p, x_q> mod 2
unsigned symplectic_product(const PauliOperator& p, const PauliOperator& q);

}  // namespace ltbsm::gf2
