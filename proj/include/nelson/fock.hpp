#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nelson/grid.hpp"
#include "nelson/types.hpp"

namespace nelson {

// Truncated occupation-number basis over a subset of grid modes: all
// occupation vectors with total occupation <= n_max (and optional per-mode
// cap), ordered lexicographically. The vacuum is rank 0. Rank/unrank use a
// combinatorial count table, no hashing.
class FockBasis {
 public:
  FockBasis() = default;
  FockBasis(const ModeGrid* grid, std::vector<int> mode_ids, int n_max,
            std::optional<int> per_mode_cap = std::nullopt,
            Index hard_limit = 200000);

  const ModeGrid& grid() const { return *grid_; }
  const std::vector<int>& mode_ids() const { return mode_ids_; }
  int mode_count() const { return static_cast<int>(mode_ids_.size()); }
  int n_max() const { return n_max_; }
  int per_mode_cap() const { return cap_; }
  Index dim() const { return dim_; }

  // Occupation of local mode `i` (index into mode_ids) in basis state `s`.
  int occupation(Index s, int i) const { return occs_[s * mode_count() + i]; }
  int total_occupation(Index s) const;
  Index rank(const std::vector<std::uint8_t>& occ) const;
  std::vector<std::uint8_t> unrank(Index s) const;

  const Mode& mode(int i) const { return grid_->modes[mode_ids_[i]]; }

  // Scatter of a state on a sub-basis (same grid, mode subset, same caps)
  // into this basis, padding new modes with zero occupation.
  std::vector<Index> embedding_from(const FockBasis& smaller) const;
  VectorX embed(const FockBasis& smaller, const VectorX& v) const;

 private:
  const ModeGrid* grid_ = nullptr;
  std::vector<int> mode_ids_;
  int n_max_ = 0;
  int cap_ = 0;
  Index dim_ = 0;
  std::vector<std::uint8_t> occs_;          // dim x mode_count, row-major
  std::vector<std::vector<Index>> counts_;  // counts_[i][b]: #states for modes i.. with budget b
};

FockBasis enumerate_basis(const ModeGrid& grid, std::vector<int> mode_ids,
                          int n_max,
                          std::optional<int> per_mode_cap = std::nullopt,
                          Index hard_limit = 200000);
FockBasis enumerate_basis(const ModeGrid& grid, int n_max,
                          std::optional<int> per_mode_cap = std::nullopt,
                          Index hard_limit = 200000);

// b_i with matrix elements sqrt(occupation); creation is the transpose.
SpMat annihilation(const FockBasis& basis, int i);
SpMat creation(const FockBasis& basis, int i);

// Diagonal of the occupation of local mode i.
VectorX occupation_diagonal(const FockBasis& basis, int i);

struct FreeFieldOps {
  SpMat hf;                    // sum omega_i b_i^dag b_i
  std::array<SpMat, 3> pf;     // sum k_i b_i^dag b_i, per component
};

FreeFieldOps free_field_ops(const FockBasis& basis);

// Number operator restricted to the modes of a shell set.
SpMat shell_number_op(const FockBasis& basis,
                      const std::function<bool(const ShellId&)>& in_range);

// sum_{i in range} sqrt(w_i) f(k_i) b_i  (annihilation part only).
SpMat field_annihilator(const FockBasis& basis,
                        const std::function<double(const Mode&)>& coeff,
                        const std::function<bool(const ShellId&)>& in_range);

// field_annihilator + adjoint; hermitian for the real coefficients used
// throughout.
SpMat field_op(const FockBasis& basis,
               const std::function<double(const Mode&)>& coeff,
               const std::function<bool(const ShellId&)>& in_range);

// Projector onto total occupation <= n (as a 0/1 diagonal).
VectorX occupation_block_diagonal(const FockBasis& basis, int n);

SpMat identity_op(Index dim);

}  // namespace nelson
