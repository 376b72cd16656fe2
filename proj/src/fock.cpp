#include "nelson/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nelson {

FockBasis::FockBasis(const ModeGrid* grid, std::vector<int> mode_ids, int n_max,
                     std::optional<int> per_mode_cap, Index hard_limit)
    : grid_(grid), mode_ids_(std::move(mode_ids)), n_max_(n_max) {
  if (n_max < 0) throw DomainError("FockBasis: n_max >= 0 required");
  if (!std::is_sorted(mode_ids_.begin(), mode_ids_.end()))
    throw DomainError("FockBasis: mode ids must be ascending");
  cap_ = per_mode_cap.value_or(n_max);
  const int m = mode_count();

  // counts_[i][b] = number of occupation vectors for modes i..m-1 with total
  // budget b; counts_[m][b] = 1.
  counts_.assign(m + 1, std::vector<Index>(n_max_ + 1, 0));
  for (int b = 0; b <= n_max_; ++b) counts_[m][b] = 1;
  for (int i = m - 1; i >= 0; --i)
    for (int b = 0; b <= n_max_; ++b) {
      Index c = 0;
      for (int o = 0; o <= std::min(cap_, b); ++o) c += counts_[i + 1][b - o];
      counts_[i][b] = c;
    }
  dim_ = counts_.empty() ? 1 : counts_[0][n_max_];
  if (dim_ > hard_limit)
    throw DomainError("FockBasis: dimension " + std::to_string(dim_) +
                      " exceeds the hard limit " + std::to_string(hard_limit));

  // Enumerate in lexicographic order.
  occs_.assign(static_cast<std::size_t>(dim_) * std::max(m, 1), 0);
  std::vector<std::uint8_t> occ(m, 0);
  Index s = 0;
  // Iterative lexicographic generation: emit, then advance like an odometer
  // with variable digit budget.
  while (true) {
    if (m > 0) std::copy(occ.begin(), occ.end(), occs_.begin() + s * m);
    ++s;
    int i = m - 1;
    while (i >= 0) {
      int total = std::accumulate(occ.begin(), occ.end(), 0);
      if (occ[i] < cap_ && total < n_max_) {
        ++occ[i];
        break;
      }
      total -= occ[i];
      occ[i] = 0;
      --i;
    }
    if (i < 0) break;
  }
  if (s != dim_) throw SolverError("FockBasis: enumeration/count mismatch");
}

int FockBasis::total_occupation(Index s) const {
  int t = 0;
  for (int i = 0; i < mode_count(); ++i) t += occupation(s, i);
  return t;
}

Index FockBasis::rank(const std::vector<std::uint8_t>& occ) const {
  const int m = mode_count();
  if (static_cast<int>(occ.size()) != m) throw DomainError("rank: size mismatch");
  Index r = 0;
  int used = 0;
  for (int i = 0; i < m; ++i) {
    if (occ[i] > cap_) throw DomainError("rank: per-mode cap exceeded");
    if (used + occ[i] > n_max_)
      throw DomainError("rank: total occupation exceeded");
    for (int o = 0; o < occ[i]; ++o) r += counts_[i + 1][n_max_ - used - o];
    used += occ[i];
  }
  return r;
}

std::vector<std::uint8_t> FockBasis::unrank(Index s) const {
  if (s < 0 || s >= dim_) throw DomainError("unrank: index out of range");
  const int m = mode_count();
  return std::vector<std::uint8_t>(occs_.begin() + s * m,
                                   occs_.begin() + (s + 1) * m);
}

std::vector<Index> FockBasis::embedding_from(const FockBasis& smaller) const {
  if (smaller.grid_ != grid_) throw DomainError("embed: different grids");
  if (smaller.n_max_ != n_max_ || smaller.cap_ != cap_)
    throw DomainError("embed: different truncations");
  // Positions of the smaller basis modes inside this basis.
  std::vector<int> pos(smaller.mode_count());
  for (int i = 0; i < smaller.mode_count(); ++i) {
    auto it = std::lower_bound(mode_ids_.begin(), mode_ids_.end(),
                               smaller.mode_ids_[i]);
    if (it == mode_ids_.end() || *it != smaller.mode_ids_[i])
      throw DomainError("embed: mode set is not a subset");
    pos[i] = static_cast<int>(it - mode_ids_.begin());
  }
  std::vector<Index> map(smaller.dim());
  std::vector<std::uint8_t> occ(mode_count(), 0);
  for (Index s = 0; s < smaller.dim(); ++s) {
    std::fill(occ.begin(), occ.end(), 0);
    for (int i = 0; i < smaller.mode_count(); ++i)
      occ[pos[i]] = smaller.occupation(s, i);
    map[s] = rank(occ);
  }
  return map;
}

VectorX FockBasis::embed(const FockBasis& smaller, const VectorX& v) const {
  auto map = embedding_from(smaller);
  VectorX out = VectorX::Zero(dim());
  for (Index s = 0; s < smaller.dim(); ++s) out[map[s]] = v[s];
  return out;
}

FockBasis enumerate_basis(const ModeGrid& grid, std::vector<int> mode_ids,
                          int n_max, std::optional<int> per_mode_cap,
                          Index hard_limit) {
  return FockBasis(&grid, std::move(mode_ids), n_max, per_mode_cap, hard_limit);
}

FockBasis enumerate_basis(const ModeGrid& grid, int n_max,
                          std::optional<int> per_mode_cap, Index hard_limit) {
  std::vector<int> ids(grid.modes.size());
  std::iota(ids.begin(), ids.end(), 0);
  return FockBasis(&grid, std::move(ids), n_max, per_mode_cap, hard_limit);
}

SpMat annihilation(const FockBasis& basis, int i) {
  if (i < 0 || i >= basis.mode_count())
    throw DomainError("annihilation: mode index out of range");
  std::vector<Triplet> trips;
  std::vector<std::uint8_t> occ;
  for (Index s = 0; s < basis.dim(); ++s) {
    int o = basis.occupation(s, i);
    if (o == 0) continue;
    occ = basis.unrank(s);
    occ[i] -= 1;
    trips.emplace_back(basis.rank(occ), s, std::sqrt(static_cast<double>(o)));
  }
  SpMat b(basis.dim(), basis.dim());
  b.setFromTriplets(trips.begin(), trips.end());
  return b;
}

SpMat creation(const FockBasis& basis, int i) {
  return SpMat(annihilation(basis, i).transpose());
}

VectorX occupation_diagonal(const FockBasis& basis, int i) {
  VectorX d(basis.dim());
  for (Index s = 0; s < basis.dim(); ++s) d[s] = basis.occupation(s, i);
  return d;
}

namespace {

SpMat diagonal_op(const VectorX& d) {
  SpMat m(d.size(), d.size());
  std::vector<Triplet> trips;
  for (Index s = 0; s < d.size(); ++s)
    if (d[s] != 0.0) trips.emplace_back(s, s, d[s]);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

}  // namespace

FreeFieldOps free_field_ops(const FockBasis& basis) {
  VectorX hf = VectorX::Zero(basis.dim());
  std::array<VectorX, 3> pf = {VectorX::Zero(basis.dim()),
                               VectorX::Zero(basis.dim()),
                               VectorX::Zero(basis.dim())};
  for (int i = 0; i < basis.mode_count(); ++i) {
    const Mode& mode = basis.mode(i);
    VectorX n_i = occupation_diagonal(basis, i);
    hf += mode.omega() * n_i;
    for (int a = 0; a < 3; ++a) pf[a] += mode.k[a] * n_i;
  }
  return FreeFieldOps{diagonal_op(hf),
                      {diagonal_op(pf[0]), diagonal_op(pf[1]), diagonal_op(pf[2])}};
}

SpMat shell_number_op(const FockBasis& basis,
                      const std::function<bool(const ShellId&)>& in_range) {
  VectorX n = VectorX::Zero(basis.dim());
  for (int i = 0; i < basis.mode_count(); ++i)
    if (in_range(basis.mode(i).shell)) n += occupation_diagonal(basis, i);
  return diagonal_op(n);
}

SpMat field_annihilator(const FockBasis& basis,
                        const std::function<double(const Mode&)>& coeff,
                        const std::function<bool(const ShellId&)>& in_range) {
  SpMat acc(basis.dim(), basis.dim());
  for (int i = 0; i < basis.mode_count(); ++i) {
    const Mode& mode = basis.mode(i);
    if (!in_range(mode.shell)) continue;
    double c = std::sqrt(mode.w) * coeff(mode);
    if (!std::isfinite(c)) throw DomainError("field coefficient not finite");
    if (c != 0.0) acc += c * annihilation(basis, i);
  }
  return acc;
}

SpMat field_op(const FockBasis& basis,
               const std::function<double(const Mode&)>& coeff,
               const std::function<bool(const ShellId&)>& in_range) {
  SpMat a = field_annihilator(basis, coeff, in_range);
  return a + SpMat(a.transpose());
}

VectorX occupation_block_diagonal(const FockBasis& basis, int n) {
  VectorX d(basis.dim());
  for (Index s = 0; s < basis.dim(); ++s)
    d[s] = basis.total_occupation(s) <= n ? 1.0 : 0.0;
  return d;
}

SpMat identity_op(Index dim) {
  SpMat id(dim, dim);
  id.setIdentity();
  return id;
}

}  // namespace nelson
