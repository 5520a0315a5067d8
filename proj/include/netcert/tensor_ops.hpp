#pragma once

// Register-level operations: tensor products, site-local operator
// application, partial trace, partial transpose, site permutation.
//
// The raw-vector helpers at the top are the computational core used by the
// simulation and extraction layers; the typed wrappers below enforce the
// value-type invariants.

#include <algorithm>
#include <cstdint>

#include <unsupported/Eigen/KroneckerProduct>

#include "netcert/common.hpp"
#include "netcert/layout.hpp"
#include "netcert/state.hpp"

namespace netcert {

namespace detail {

// Flat-index offsets of a site group. The group's sites are taken in the
// listed order, first listed site most significant within the group index.
inline std::vector<std::int64_t> group_offsets(const SiteLayout& layout,
                                               const std::vector<int>& sites) {
  std::int64_t gdim = 1;
  for (int s : sites) gdim *= layout.dim(s);
  std::vector<std::int64_t> off(static_cast<size_t>(gdim));
  for (std::int64_t m = 0; m < gdim; ++m) {
    std::int64_t rem = m, o = 0;
    for (size_t k = sites.size(); k-- > 0;) {
      const int d = layout.dim(sites[k]);
      o += (rem % d) * layout.stride(sites[k]);
      rem /= d;
    }
    off[static_cast<size_t>(m)] = o;
  }
  return off;
}

inline std::vector<int> complement_sites(const SiteLayout& layout,
                                         const std::vector<int>& sites) {
  std::vector<char> used(static_cast<size_t>(layout.num_sites()), 0);
  for (int s : sites) {
    require(s >= 0 && s < layout.num_sites(), "site index out of range");
    require(!used[static_cast<size_t>(s)], "site listed twice");
    used[static_cast<size_t>(s)] = 1;
  }
  std::vector<int> rest;
  for (int s = 0; s < layout.num_sites(); ++s)
    if (!used[static_cast<size_t>(s)]) rest.push_back(s);
  return rest;
}

// y = (op on `sites`) x, op square over the joint dimension of `sites`.
inline Vec apply_op_vec(const Vec& x, const SiteLayout& layout,
                        const std::vector<int>& sites, const Mat& op) {
  const auto off = group_offsets(layout, sites);
  const auto gdim = static_cast<std::int64_t>(off.size());
  require(op.rows() == gdim && op.cols() == gdim,
          "operator dimension does not match the selected sites");
  const auto rest = complement_sites(layout, sites);
  const auto rest_off = group_offsets(layout, rest);

  Vec y(x.size());
  Vec in(gdim), out(gdim);
  for (std::int64_t base : rest_off) {
    for (std::int64_t m = 0; m < gdim; ++m)
      in(m) = x(base + off[static_cast<size_t>(m)]);
    out.noalias() = op * in;
    for (std::int64_t m = 0; m < gdim; ++m)
      y(base + off[static_cast<size_t>(m)]) = out(m);
  }
  return y;
}

// Isometry application: op maps the joint space of `sites` into itself
// tensored with fresh registers of layout `extra`, which are appended (least
// significant) to the output layout. Row index convention of op:
// (group index m) * extra_dim + (extra index e).
inline Vec apply_isometry_vec(const Vec& x, const SiteLayout& layout,
                              const std::vector<int>& sites, const Mat& op,
                              const SiteLayout& extra) {
  const auto off = group_offsets(layout, sites);
  const auto gdim = static_cast<std::int64_t>(off.size());
  const std::int64_t edim = extra.total_dim();
  require(op.cols() == gdim && op.rows() == gdim * edim,
          "isometry dimensions do not match the selected sites");
  const auto rest = complement_sites(layout, sites);
  const auto rest_off = group_offsets(layout, rest);

  Vec y = Vec::Zero(x.size() * edim);
  Vec in(gdim), out(gdim * edim);
  for (std::int64_t base : rest_off) {
    for (std::int64_t m = 0; m < gdim; ++m)
      in(m) = x(base + off[static_cast<size_t>(m)]);
    out.noalias() = op * in;
    for (std::int64_t m = 0; m < gdim; ++m)
      for (std::int64_t e = 0; e < edim; ++e)
        y((base + off[static_cast<size_t>(m)]) * edim + e) =
            out(m * edim + e);
  }
  return y;
}

// Dense embedding of an operator on the listed sites into the full register
// (identity on the rest).
inline Mat embed_matrix(const SiteLayout& layout, const std::vector<int>& sites,
                        const Mat& op) {
  const auto off = group_offsets(layout, sites);
  const auto gdim = static_cast<std::int64_t>(off.size());
  require(op.rows() == gdim && op.cols() == gdim,
          "operator dimension does not match the selected sites");
  const auto rest = complement_sites(layout, sites);
  const auto rest_off = group_offsets(layout, rest);
  Mat out = Mat::Zero(layout.total_dim(), layout.total_dim());
  for (std::int64_t base : rest_off)
    for (std::int64_t m = 0; m < gdim; ++m)
      for (std::int64_t n = 0; n < gdim; ++n)
        out(base + off[static_cast<size_t>(m)],
            base + off[static_cast<size_t>(n)]) = op(m, n);
  return out;
}

// Permutation vector p with p[old_flat] = new_flat for reordering sites so
// that new position k holds old site order[k].
inline std::vector<std::int64_t> permutation_map(const SiteLayout& layout,
                                                 const std::vector<int>& order) {
  require(static_cast<int>(order.size()) == layout.num_sites(),
          "permutation must list every site exactly once");
  SiteLayout out = layout.select(order);
  const std::int64_t total = layout.total_dim();
  std::vector<std::int64_t> p(static_cast<size_t>(total));
  std::vector<int> new_idx(order.size());
  for (std::int64_t f = 0; f < total; ++f) {
    const auto idx = layout.unflat(f);
    for (size_t k = 0; k < order.size(); ++k)
      new_idx[k] = idx[static_cast<size_t>(order[k])];
    p[static_cast<size_t>(f)] = out.flat(new_idx);
  }
  return p;
}

}  // namespace detail

inline PureState tensor_product(const PureState& a, const PureState& b) {
  Vec v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes());
  return PureState(SiteLayout::concat(a.layout(), b.layout()), std::move(v),
                   a.subnormalized() || b.subnormalized());
}

inline LinOp tensor_product(const LinOp& a, const LinOp& b) {
  Mat m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return LinOp(SiteLayout::concat(a.layout(), b.layout()), std::move(m));
}

inline DensityOp tensor_product(const DensityOp& a, const DensityOp& b) {
  Mat m = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return DensityOp(SiteLayout::concat(a.layout(), b.layout()), std::move(m),
                   a.normalized() && b.normalized(),
                   a.is_state() && b.is_state());
}

// Applies `op` on the listed sites (in the listed order: op's own site 0 is
// sites[0]) of the target, leaving all other sites untouched. Equivalent to
// embedding op with identities and applying to the full register. Density
// operators transform by conjugation, rho -> op rho op^dag.
inline PureState apply_on_sites(const LinOp& op, const std::vector<int>& sites,
                                const PureState& target) {
  require(static_cast<int>(sites.size()) == op.layout().num_sites(),
          "site list length does not match operator layout");
  for (size_t k = 0; k < sites.size(); ++k) {
    require(sites[k] >= 0 && sites[k] < target.layout().num_sites(),
            "site index out of range");
    require(target.layout().dim(sites[k]) == op.layout().dim(static_cast<int>(k)),
            "operator site dimension does not match target site");
  }
  Vec v = detail::apply_op_vec(target.amplitudes(), target.layout(), sites,
                               op.matrix());
  return PureState(target.layout(), std::move(v),
                   target.subnormalized() || !op.unitary());
}

inline DensityOp apply_on_sites(const LinOp& op, const std::vector<int>& sites,
                                const DensityOp& target) {
  require(static_cast<int>(sites.size()) == op.layout().num_sites(),
          "site list length does not match operator layout");
  for (size_t k = 0; k < sites.size(); ++k) {
    require(sites[k] >= 0 && sites[k] < target.layout().num_sites(),
            "site index out of range");
    require(target.layout().dim(sites[k]) == op.layout().dim(static_cast<int>(k)),
            "operator site dimension does not match target site");
  }
  const auto& L = target.layout();
  Mat a = target.matrix();
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    a.col(c) = detail::apply_op_vec(a.col(c), L, sites, op.matrix());
  Mat b = a.adjoint();
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    b.col(c) = detail::apply_op_vec(b.col(c), L, sites, op.matrix());
  Mat m = b.adjoint();
  // Conjugation by any operator preserves positivity; unitaries also
  // preserve the trace.
  return DensityOp(L, std::move(m), target.normalized() && op.unitary(),
                   target.is_state());
}

// Reduced state on the listed sites (strictly ascending), tracing the rest.
inline DensityOp partial_trace(const DensityOp& rho,
                               const std::vector<int>& keep) {
  require(!keep.empty(), "cannot trace out all sites");
  for (size_t k = 0; k + 1 < keep.size(); ++k)
    require(keep[k] < keep[k + 1], "keep list must be strictly ascending");
  const auto& L = rho.layout();
  const auto keep_off = detail::group_offsets(L, keep);
  const auto rest = detail::complement_sites(L, keep);
  const auto rest_off = detail::group_offsets(L, rest);
  const auto kdim = static_cast<std::int64_t>(keep_off.size());

  Mat out = Mat::Zero(kdim, kdim);
  for (std::int64_t i = 0; i < kdim; ++i)
    for (std::int64_t j = 0; j < kdim; ++j) {
      cdouble acc = 0.0;
      for (std::int64_t t : rest_off)
        acc += rho.matrix()(keep_off[static_cast<size_t>(i)] + t,
                            keep_off[static_cast<size_t>(j)] + t);
      out(i, j) = acc;
    }
  // Numerical symmetrization keeps the Hermiticity invariant exact enough
  // after long accumulation chains.
  Mat herm = 0.5 * (out + out.adjoint());
  return DensityOp(L.select(keep), std::move(herm), rho.normalized(),
                   rho.is_state());
}

// Transpose of the listed sites only. The result is Hermitian and trace-1
// whenever the input is, but may fail positivity, so it is returned as a
// plain operator.
inline LinOp partial_transpose(const DensityOp& rho,
                               const std::vector<int>& sites) {
  const auto& L = rho.layout();
  const auto off = detail::group_offsets(L, sites);
  const auto gdim = static_cast<std::int64_t>(off.size());
  const auto rest = detail::complement_sites(L, sites);
  const auto rest_off = detail::group_offsets(L, rest);

  Mat out(L.total_dim(), L.total_dim());
  for (std::int64_t br : rest_off)
    for (std::int64_t bc : rest_off)
      for (std::int64_t m = 0; m < gdim; ++m)
        for (std::int64_t n = 0; n < gdim; ++n)
          out(br + off[static_cast<size_t>(n)],
              bc + off[static_cast<size_t>(m)]) =
              rho.matrix()(br + off[static_cast<size_t>(m)],
                           bc + off[static_cast<size_t>(n)]);
  return LinOp(L, std::move(out));
}

// Reorders sites so that new position k carries old site order[k].
inline PureState permute_sites(const PureState& psi,
                               const std::vector<int>& order) {
  const auto p = detail::permutation_map(psi.layout(), order);
  Vec v(psi.amplitudes().size());
  for (std::int64_t f = 0; f < v.size(); ++f)
    v(p[static_cast<size_t>(f)]) = psi.amplitudes()(f);
  return PureState(psi.layout().select(order), std::move(v),
                   psi.subnormalized());
}

inline DensityOp permute_sites(const DensityOp& rho,
                               const std::vector<int>& order) {
  const auto p = detail::permutation_map(rho.layout(), order);
  Mat m(rho.matrix().rows(), rho.matrix().cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(p[static_cast<size_t>(i)], p[static_cast<size_t>(j)]) =
          rho.matrix()(i, j);
  return DensityOp(rho.layout().select(order), std::move(m), rho.normalized(),
                   rho.is_state());
}

}  // namespace netcert
