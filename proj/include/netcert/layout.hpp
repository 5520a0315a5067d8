#pragma once

// SiteLayout: the ordered list of local dimensions of a multi-site register.
// Site 0 is the most significant index in the flat vector representation.

#include <cstdint>
#include <numeric>

#include "netcert/common.hpp"

namespace netcert {

class SiteLayout {
 public:
  SiteLayout() = default;

  explicit SiteLayout(std::vector<int> dims) : dims_(std::move(dims)) {
    require(!dims_.empty(), "layout needs at least one site");
    for (int d : dims_)
      require(d >= 2, "every site dimension must be at least 2");
  }

  int num_sites() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const { return dims_.at(static_cast<size_t>(site)); }
  const std::vector<int>& dims() const { return dims_; }

  std::int64_t total_dim() const {
    std::int64_t t = 1;
    for (int d : dims_) t *= d;
    return t;
  }

  // Stride of a site in the flat index (product of dimensions to its right).
  std::int64_t stride(int site) const {
    std::int64_t s = 1;
    for (size_t k = static_cast<size_t>(site) + 1; k < dims_.size(); ++k)
      s *= dims_[k];
    return s;
  }

  // Flat index from per-site indices.
  std::int64_t flat(const std::vector<int>& idx) const {
    std::int64_t f = 0;
    for (size_t s = 0; s < dims_.size(); ++s) f = f * dims_[s] + idx[s];
    return f;
  }

  // Per-site indices from a flat index.
  std::vector<int> unflat(std::int64_t f) const {
    std::vector<int> idx(dims_.size());
    for (size_t s = dims_.size(); s-- > 0;) {
      idx[s] = static_cast<int>(f % dims_[s]);
      f /= dims_[s];
    }
    return idx;
  }

  // Layout of the listed sites, in the listed order.
  SiteLayout select(const std::vector<int>& sites) const {
    std::vector<int> d;
    d.reserve(sites.size());
    for (int s : sites) {
      require(s >= 0 && s < num_sites(), "site index out of range");
      d.push_back(dims_[static_cast<size_t>(s)]);
    }
    return SiteLayout(d);
  }

  static SiteLayout concat(const SiteLayout& a, const SiteLayout& b) {
    std::vector<int> d = a.dims_;
    d.insert(d.end(), b.dims_.begin(), b.dims_.end());
    return SiteLayout(d);
  }

  static SiteLayout qubits(int n) {
    return SiteLayout(std::vector<int>(static_cast<size_t>(n), 2));
  }

  bool operator==(const SiteLayout& o) const { return dims_ == o.dims_; }
  bool operator!=(const SiteLayout& o) const { return !(*this == o); }

 private:
  std::vector<int> dims_;
};

}  // namespace netcert
