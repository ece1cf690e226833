#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace bondwit {

/// Largest prime below 2^23. Residues are held in doubles; with this modulus
/// a dot product of 64 residue pairs stays below 2^53 and is computed exactly.
inline constexpr std::int64_t kDefaultPrime = 8388593;

using ResidueRows = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::int64_t mod_reduce(std::int64_t v, std::int64_t p);
std::int64_t mod_inverse(std::int64_t a, std::int64_t p);

/// Streaming reduced row echelon form over Z/pZ.
///
/// Rows are pushed in batches; each batch is reduced against the current
/// basis with blocked matrix products, the survivors are eliminated among
/// themselves and the existing basis is back-substituted so the stored rows
/// stay in reduced form (identity on the pivot columns). The rank of an integer
/// matrix mod p never exceeds its rank over Q.
class ModularEchelon {
public:
    explicit ModularEchelon(std::size_t cols, std::int64_t prime = kDefaultPrime);

    std::size_t cols() const { return cols_; }
    std::size_t rank() const { return pivots_.size(); }
    bool full() const { return rank() == cols_; }
    std::int64_t prime() const { return p_; }

    /// Adds a batch of rows given as residues in [0, p). Returns, for each
    /// input row in order, whether it increased the rank.
    std::vector<bool> add_rows(ResidueRows batch);

private:
    void reduce_mod(ResidueRows& m) const;
    /// out -= coeff * basis  (mod p), chunked to keep partial sums exact.
    void subtract_product(ResidueRows& out, const ResidueRows& coeff, const ResidueRows& rows) const;

    std::size_t cols_;
    std::int64_t p_;
    double pd_;
    double inv_pd_;
    ResidueRows basis_;        // rank() × cols, valid leading rows
    std::vector<std::size_t> pivots_;
    std::vector<char> is_pivot_;
};

}  // namespace bondwit
