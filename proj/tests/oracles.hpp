#pragma once

// Independent reference implementations used to cross-check the library.
//
// Everything here is written directly from definitions with naive index
// arithmetic (digit decomposition, explicit Kronecker products), sharing no
// code path with the library's stride/offset machinery. Keep it slow and
// obvious.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cdouble = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline std::vector<int> digits(std::int64_t flat, const std::vector<int>& dims) {
  std::vector<int> d(dims.size());
  for (size_t s = dims.size(); s-- > 0;) {
    d[s] = static_cast<int>(flat % dims[s]);
    flat /= dims[s];
  }
  return d;
}

inline std::int64_t undigits(const std::vector<int>& d,
                             const std::vector<int>& dims) {
  std::int64_t f = 0;
  for (size_t s = 0; s < dims.size(); ++s) f = f * dims[s] + d[s];
  return f;
}

inline std::int64_t total(const std::vector<int>& dims) {
  std::int64_t t = 1;
  for (int d : dims) t *= d;
  return t;
}

// Kronecker product by definition.
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j)
      out(i * b.size() + j) = a(i) * b(j);
  return out;
}

// Chain of Kronecker factors, site 0 leftmost (most significant).
inline Mat kron_chain(const std::vector<Mat>& factors) {
  Mat out = Mat::Identity(1, 1);
  for (const Mat& f : factors) out = kron(out, f);
  return out;
}

// Embeds an operator acting on the listed sites (listed order = operator's
// own site order) into the full register, identity elsewhere. Built entry by
// entry from the definition.
inline Mat embed(const Mat& op, const std::vector<int>& sites,
                 const std::vector<int>& dims) {
  std::vector<int> op_dims;
  for (int s : sites) op_dims.push_back(dims[static_cast<size_t>(s)]);
  const std::int64_t t = total(dims);
  Mat out = Mat::Zero(t, t);
  for (std::int64_t i = 0; i < t; ++i) {
    const auto di = digits(i, dims);
    for (std::int64_t j = 0; j < t; ++j) {
      const auto dj = digits(j, dims);
      bool rest_equal = true;
      for (size_t s = 0; s < dims.size(); ++s) {
        bool listed = false;
        for (int q : sites) listed |= (static_cast<size_t>(q) == s);
        if (!listed && di[s] != dj[s]) { rest_equal = false; break; }
      }
      if (!rest_equal) continue;
      std::vector<int> oi, oj;
      for (int s : sites) {
        oi.push_back(di[static_cast<size_t>(s)]);
        oj.push_back(dj[static_cast<size_t>(s)]);
      }
      out(i, j) = op(undigits(oi, op_dims), undigits(oj, op_dims));
    }
  }
  return out;
}

// Partial trace by definition.
inline Mat partial_trace(const Mat& rho, const std::vector<int>& dims,
                         const std::vector<int>& keep) {
  std::vector<int> keep_dims;
  for (int s : keep) keep_dims.push_back(dims[static_cast<size_t>(s)]);
  const std::int64_t kd = total(keep_dims);
  const std::int64_t t = total(dims);
  Mat out = Mat::Zero(kd, kd);
  for (std::int64_t i = 0; i < t; ++i) {
    const auto di = digits(i, dims);
    for (std::int64_t j = 0; j < t; ++j) {
      const auto dj = digits(j, dims);
      bool traced_equal = true;
      for (size_t s = 0; s < dims.size(); ++s) {
        bool kept = false;
        for (int q : keep) kept |= (static_cast<size_t>(q) == s);
        if (!kept && di[s] != dj[s]) { traced_equal = false; break; }
      }
      if (!traced_equal) continue;
      std::vector<int> ki, kj;
      for (int s : keep) {
        ki.push_back(di[static_cast<size_t>(s)]);
        kj.push_back(dj[static_cast<size_t>(s)]);
      }
      out(undigits(ki, keep_dims), undigits(kj, keep_dims)) += rho(i, j);
    }
  }
  return out;
}

// Partial transpose by definition: swap the listed sites' digits between row
// and column.
inline Mat partial_transpose(const Mat& rho, const std::vector<int>& dims,
                             const std::vector<int>& sites) {
  const std::int64_t t = total(dims);
  Mat out = Mat::Zero(t, t);
  for (std::int64_t i = 0; i < t; ++i) {
    auto di = digits(i, dims);
    for (std::int64_t j = 0; j < t; ++j) {
      auto dj = digits(j, dims);
      auto ri = di, rj = dj;
      for (int s : sites) {
        std::swap(ri[static_cast<size_t>(s)], rj[static_cast<size_t>(s)]);
      }
      out(undigits(ri, dims), undigits(rj, dims)) = rho(i, j);
    }
  }
  return out;
}

// Single-qubit Paulis, used all over the expected-value computations.
inline Mat sigma_z() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }
inline Mat sigma_x() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat sigma_y() {
  Mat m(2, 2);
  m << 0, cdouble(0, -1), cdouble(0, 1), 0;
  return m;
}
inline Mat id2() { return Mat::Identity(2, 2); }

}  // namespace oracle
