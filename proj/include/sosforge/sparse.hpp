#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sosforge/errors.hpp"

namespace sosforge {

using Index = std::int64_t;
using Degree = std::uint32_t;

// Compressed sparse column storage.
//
// Canonical form, maintained by every function in this header:
//   - colptr has cols+1 entries, colptr[0] == 0, colptr[cols] == nnz,
//     nondecreasing;
//   - row indices strictly increase within each column;
//   - no explicitly stored zeros.
template <typename Scalar>
struct SparseMat {
  Index rows = 0;
  Index cols = 0;
  std::vector<Scalar> vals;
  std::vector<Index> rowidx;
  std::vector<Index> colptr = {0};

  SparseMat() = default;
  SparseMat(Index r, Index c) : rows(r), cols(c), colptr(static_cast<std::size_t>(c) + 1, 0) {
    if (r < 0 || c < 0) throw DimensionError("SparseMat: negative dimension");
  }

  Index nnz() const { return static_cast<Index>(vals.size()); }

  bool operator==(const SparseMat& o) const {
    return rows == o.rows && cols == o.cols && vals == o.vals && rowidx == o.rowidx &&
           colptr == o.colptr;
  }
};

template <typename Scalar>
bool is_canonical(const SparseMat<Scalar>& a) {
  if (a.colptr.size() != static_cast<std::size_t>(a.cols) + 1) return false;
  if (a.colptr.front() != 0 || a.colptr.back() != a.nnz()) return false;
  if (a.rowidx.size() != a.vals.size()) return false;
  for (Index j = 0; j < a.cols; ++j) {
    if (a.colptr[j] > a.colptr[j + 1]) return false;
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      if (a.rowidx[k] < 0 || a.rowidx[k] >= a.rows) return false;
      if (k > a.colptr[j] && a.rowidx[k - 1] >= a.rowidx[k]) return false;
      if (a.vals[k] == Scalar(0)) return false;
    }
  }
  return true;
}

// Builds a canonical matrix from unordered triplets; duplicates are summed,
// entries that cancel to zero are dropped.
template <typename Scalar>
SparseMat<Scalar> from_triplets(const std::vector<Index>& ti, const std::vector<Index>& tj,
                                const std::vector<Scalar>& tv, Index rows, Index cols) {
  if (ti.size() != tj.size() || ti.size() != tv.size())
    throw ArgumentError("from_triplets: triplet arrays differ in length");
  for (std::size_t k = 0; k < ti.size(); ++k)
    if (ti[k] < 0 || ti[k] >= rows || tj[k] < 0 || tj[k] >= cols)
      throw IndexError("from_triplets: entry outside matrix");

  std::vector<std::size_t> order(ti.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tj[a] != tj[b]) return tj[a] < tj[b];
    return ti[a] < ti[b];
  });

  SparseMat<Scalar> out(rows, cols);
  out.vals.reserve(tv.size());
  out.rowidx.reserve(tv.size());
  std::size_t k = 0;
  for (Index j = 0; j < cols; ++j) {
    while (k < order.size() && tj[order[k]] == j) {
      Index i = ti[order[k]];
      Scalar v = tv[order[k]];
      ++k;
      while (k < order.size() && tj[order[k]] == j && ti[order[k]] == i) {
        v += tv[order[k]];
        ++k;
      }
      if (v != Scalar(0)) {
        out.vals.push_back(v);
        out.rowidx.push_back(i);
      }
    }
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense(const SparseMat<Scalar>& a) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d(a.rows, a.cols);
  d.setZero();
  for (Index j = 0; j < a.cols; ++j)
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) d(a.rowidx[k], j) = a.vals[k];
  return d;
}

template <typename Scalar>
SparseMat<Scalar> from_dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& d) {
  SparseMat<Scalar> out(d.rows(), d.cols());
  for (Index j = 0; j < out.cols; ++j) {
    for (Index i = 0; i < out.rows; ++i)
      if (d(i, j) != Scalar(0)) {
        out.vals.push_back(d(i, j));
        out.rowidx.push_back(i);
      }
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

// Single-entry lookup; zero when not stored.
template <typename Scalar>
Scalar coeff(const SparseMat<Scalar>& a, Index i, Index j) {
  if (i < 0 || i >= a.rows || j < 0 || j >= a.cols) throw IndexError("coeff: out of range");
  auto first = a.rowidx.begin() + a.colptr[j];
  auto last = a.rowidx.begin() + a.colptr[j + 1];
  auto it = std::lower_bound(first, last, i);
  if (it == last || *it != i) return Scalar(0);
  return a.vals[it - a.rowidx.begin()];
}

// Kronecker product; result column j1*B.cols+j2 pairs column j1 of A with
// column j2 of B, so canonical order is preserved directly. Products that
// cancel to zero are dropped.
template <typename Scalar>
SparseMat<Scalar> kron(const SparseMat<Scalar>& a, const SparseMat<Scalar>& b) {
  SparseMat<Scalar> out(a.rows * b.rows, a.cols * b.cols);
  out.vals.reserve(static_cast<std::size_t>(a.nnz()) * static_cast<std::size_t>(b.nnz()));
  out.rowidx.reserve(out.vals.capacity());
  for (Index ja = 0; ja < a.cols; ++ja) {
    for (Index jb = 0; jb < b.cols; ++jb) {
      for (Index ka = a.colptr[ja]; ka < a.colptr[ja + 1]; ++ka) {
        for (Index kb = b.colptr[jb]; kb < b.colptr[jb + 1]; ++kb) {
          Scalar v = a.vals[ka] * b.vals[kb];
          if (v == Scalar(0)) continue;
          out.vals.push_back(v);
          out.rowidx.push_back(a.rowidx[ka] * b.rows + b.rowidx[kb]);
        }
      }
      out.colptr[ja * b.cols + jb + 1] = out.nnz();
    }
  }
  return out;
}

namespace detail {
inline void check_permutation(const std::vector<Index>& perm, Index n, const char* who) {
  if (static_cast<Index>(perm.size()) != n) throw ArgumentError(std::string(who) + ": length mismatch");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw ArgumentError(std::string(who) + ": not a permutation");
    seen[static_cast<std::size_t>(p)] = 1;
  }
}
}  // namespace detail

// Column gather: result column j is A column idx[j]. idx need not be a
// permutation; repeats and omissions are allowed.
template <typename Scalar>
SparseMat<Scalar> gather_cols(const SparseMat<Scalar>& a, const std::vector<Index>& idx) {
  SparseMat<Scalar> out(a.rows, static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    Index src = idx[j];
    if (src < 0 || src >= a.cols) throw IndexError("gather_cols: source column out of range");
    out.vals.insert(out.vals.end(), a.vals.begin() + a.colptr[src], a.vals.begin() + a.colptr[src + 1]);
    out.rowidx.insert(out.rowidx.end(), a.rowidx.begin() + a.colptr[src],
                      a.rowidx.begin() + a.colptr[src + 1]);
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

// Result column perm[j] is A column j (scatter convention): B(:,perm(j)) = A(:,j).
template <typename Scalar>
SparseMat<Scalar> permute_cols(const SparseMat<Scalar>& a, const std::vector<Index>& perm) {
  detail::check_permutation(perm, a.cols, "permute_cols");
  std::vector<Index> inv(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) inv[static_cast<std::size_t>(perm[j])] = static_cast<Index>(j);
  return gather_cols(a, inv);
}

// Column scatter into a wider matrix: result column colmap[j] is A column j.
// colmap must be injective into [0, new_cols); untouched columns are zero.
template <typename Scalar>
SparseMat<Scalar> scatter_cols(const SparseMat<Scalar>& a, const std::vector<Index>& colmap,
                               Index new_cols) {
  if (static_cast<Index>(colmap.size()) != a.cols)
    throw ArgumentError("scatter_cols: map length mismatch");
  std::vector<Index> src(static_cast<std::size_t>(new_cols), Index{-1});
  for (std::size_t j = 0; j < colmap.size(); ++j) {
    Index t = colmap[j];
    if (t < 0 || t >= new_cols) throw IndexError("scatter_cols: target out of range");
    if (src[static_cast<std::size_t>(t)] != -1) throw ArgumentError("scatter_cols: map not injective");
    src[static_cast<std::size_t>(t)] = static_cast<Index>(j);
  }
  SparseMat<Scalar> out(a.rows, new_cols);
  for (Index t = 0; t < new_cols; ++t) {
    Index j = src[static_cast<std::size_t>(t)];
    if (j >= 0) {
      out.vals.insert(out.vals.end(), a.vals.begin() + a.colptr[j], a.vals.begin() + a.colptr[j + 1]);
      out.rowidx.insert(out.rowidx.end(), a.rowidx.begin() + a.colptr[j],
                        a.rowidx.begin() + a.colptr[j + 1]);
    }
    out.colptr[t + 1] = out.nnz();
  }
  return out;
}

// Column scatter with duplicate targets allowed; coinciding entries are summed.
template <typename Scalar>
SparseMat<Scalar> scatter_add_cols(const SparseMat<Scalar>& a, const std::vector<Index>& colmap,
                                   Index new_cols) {
  if (static_cast<Index>(colmap.size()) != a.cols)
    throw ArgumentError("scatter_add_cols: map length mismatch");
  std::vector<Index> ti, tj;
  std::vector<Scalar> tv;
  ti.reserve(a.vals.size());
  tj.reserve(a.vals.size());
  tv.reserve(a.vals.size());
  for (Index j = 0; j < a.cols; ++j) {
    Index t = colmap[static_cast<std::size_t>(j)];
    if (t < 0 || t >= new_cols) throw IndexError("scatter_add_cols: target out of range");
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      ti.push_back(a.rowidx[k]);
      tj.push_back(t);
      tv.push_back(a.vals[k]);
    }
  }
  return from_triplets(ti, tj, tv, a.rows, new_cols);
}

// Row scatter into a taller matrix. rowmap must be strictly increasing, which
// makes this a pure relabel: per-column order is already preserved.
template <typename Scalar>
SparseMat<Scalar> scatter_rows(const SparseMat<Scalar>& a, const std::vector<Index>& rowmap,
                               Index new_rows) {
  if (static_cast<Index>(rowmap.size()) != a.rows)
    throw ArgumentError("scatter_rows: map length mismatch");
  for (std::size_t i = 0; i < rowmap.size(); ++i) {
    if (rowmap[i] < 0 || rowmap[i] >= new_rows) throw IndexError("scatter_rows: target out of range");
    if (i > 0 && rowmap[i - 1] >= rowmap[i])
      throw ArgumentError("scatter_rows: map must be strictly increasing");
  }
  SparseMat<Scalar> out = a;
  out.rows = new_rows;
  for (auto& r : out.rowidx) r = rowmap[static_cast<std::size_t>(r)];
  return out;
}

// Row gather: result row i is A row idx[i]; idx entries must be distinct.
template <typename Scalar>
SparseMat<Scalar> gather_rows(const SparseMat<Scalar>& a, const std::vector<Index>& idx) {
  std::vector<Index> dest(static_cast<std::size_t>(a.rows), Index{-1});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= a.rows) throw IndexError("gather_rows: source row out of range");
    if (dest[static_cast<std::size_t>(idx[i])] != -1)
      throw ArgumentError("gather_rows: repeated source row");
    dest[static_cast<std::size_t>(idx[i])] = static_cast<Index>(i);
  }
  SparseMat<Scalar> out(static_cast<Index>(idx.size()), a.cols);
  std::vector<std::pair<Index, Scalar>> col;
  for (Index j = 0; j < a.cols; ++j) {
    col.clear();
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      Index d = dest[static_cast<std::size_t>(a.rowidx[k])];
      if (d >= 0) col.emplace_back(d, a.vals[k]);
    }
    std::sort(col.begin(), col.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [i, v] : col) {
      out.rowidx.push_back(i);
      out.vals.push_back(v);
    }
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

// Result row perm[i] is A row i: B(perm(i),:) = A(i,:).
template <typename Scalar>
SparseMat<Scalar> permute_rows(const SparseMat<Scalar>& a, const std::vector<Index>& perm) {
  detail::check_permutation(perm, a.rows, "permute_rows");
  std::vector<Index> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<Index>(i);
  return gather_rows(a, inv);
}

template <typename Scalar>
SparseMat<Scalar> hcat(const SparseMat<Scalar>& a, const SparseMat<Scalar>& b) {
  if (a.rows != b.rows) throw DimensionError("hcat: row counts differ");
  SparseMat<Scalar> out(a.rows, a.cols + b.cols);
  out.vals = a.vals;
  out.rowidx = a.rowidx;
  out.vals.insert(out.vals.end(), b.vals.begin(), b.vals.end());
  out.rowidx.insert(out.rowidx.end(), b.rowidx.begin(), b.rowidx.end());
  for (Index j = 0; j <= a.cols; ++j) out.colptr[j] = a.colptr[j];
  for (Index j = 1; j <= b.cols; ++j) out.colptr[a.cols + j] = a.nnz() + b.colptr[j];
  return out;
}

template <typename Scalar>
SparseMat<Scalar> vcat(const SparseMat<Scalar>& a, const SparseMat<Scalar>& b) {
  if (a.cols != b.cols) throw DimensionError("vcat: column counts differ");
  SparseMat<Scalar> out(a.rows + b.rows, a.cols);
  out.vals.reserve(a.vals.size() + b.vals.size());
  out.rowidx.reserve(a.vals.size() + b.vals.size());
  for (Index j = 0; j < a.cols; ++j) {
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      out.vals.push_back(a.vals[k]);
      out.rowidx.push_back(a.rowidx[k]);
    }
    for (Index k = b.colptr[j]; k < b.colptr[j + 1]; ++k) {
      out.vals.push_back(b.vals[k]);
      out.rowidx.push_back(a.rows + b.rowidx[k]);
    }
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

// Scales one column in place semantics; zero factor empties the column.
template <typename Scalar>
SparseMat<Scalar> scale_col(const SparseMat<Scalar>& a, Index j, Scalar f) {
  if (j < 0 || j >= a.cols) throw IndexError("scale_col: column out of range");
  SparseMat<Scalar> out(a.rows, a.cols);
  out.vals.reserve(a.vals.size());
  out.rowidx.reserve(a.vals.size());
  for (Index c = 0; c < a.cols; ++c) {
    for (Index k = a.colptr[c]; k < a.colptr[c + 1]; ++k) {
      Scalar v = (c == j) ? a.vals[k] * f : a.vals[k];
      if (v == Scalar(0)) continue;
      out.vals.push_back(v);
      out.rowidx.push_back(a.rowidx[k]);
    }
    out.colptr[c + 1] = out.nnz();
  }
  return out;
}

template <typename Scalar>
SparseMat<Scalar> scale(const SparseMat<Scalar>& a, Scalar f) {
  SparseMat<Scalar> out(a.rows, a.cols);
  out.vals.reserve(a.vals.size());
  out.rowidx.reserve(a.vals.size());
  for (Index c = 0; c < a.cols; ++c) {
    for (Index k = a.colptr[c]; k < a.colptr[c + 1]; ++k) {
      Scalar v = a.vals[k] * f;
      if (v == Scalar(0)) continue;
      out.vals.push_back(v);
      out.rowidx.push_back(a.rowidx[k]);
    }
    out.colptr[c + 1] = out.nnz();
  }
  return out;
}

// Elementwise sum; exact cancellations are pruned.
template <typename Scalar>
SparseMat<Scalar> add(const SparseMat<Scalar>& a, const SparseMat<Scalar>& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("add: shape mismatch");
  SparseMat<Scalar> out(a.rows, a.cols);
  out.vals.reserve(a.vals.size() + b.vals.size());
  out.rowidx.reserve(a.vals.size() + b.vals.size());
  for (Index j = 0; j < a.cols; ++j) {
    Index ka = a.colptr[j], kb = b.colptr[j];
    const Index ea = a.colptr[j + 1], eb = b.colptr[j + 1];
    while (ka < ea || kb < eb) {
      Index ia = ka < ea ? a.rowidx[ka] : a.rows;
      Index ib = kb < eb ? b.rowidx[kb] : a.rows;
      Index i;
      Scalar v;
      if (ia < ib) {
        i = ia;
        v = a.vals[ka++];
      } else if (ib < ia) {
        i = ib;
        v = b.vals[kb++];
      } else {
        i = ia;
        v = a.vals[ka++] + b.vals[kb++];
      }
      if (v != Scalar(0)) {
        out.vals.push_back(v);
        out.rowidx.push_back(i);
      }
    }
    out.colptr[j + 1] = out.nnz();
  }
  return out;
}

template <typename Scalar>
SparseMat<Scalar> transpose(const SparseMat<Scalar>& a) {
  SparseMat<Scalar> out(a.cols, a.rows);
  out.vals.resize(a.vals.size());
  out.rowidx.resize(a.vals.size());
  std::vector<Index> count(static_cast<std::size_t>(a.rows) + 1, 0);
  for (Index r : a.rowidx) ++count[static_cast<std::size_t>(r) + 1];
  for (Index i = 0; i < a.rows; ++i) count[static_cast<std::size_t>(i) + 1] += count[static_cast<std::size_t>(i)];
  out.colptr.assign(count.begin(), count.end());
  std::vector<Index> next(count.begin(), count.end() - 1);
  for (Index j = 0; j < a.cols; ++j) {
    for (Index k = a.colptr[j]; k < a.colptr[j + 1]; ++k) {
      Index pos = next[static_cast<std::size_t>(a.rowidx[k])]++;
      out.vals[static_cast<std::size_t>(pos)] = a.vals[k];
      out.rowidx[static_cast<std::size_t>(pos)] = j;
    }
  }
  return out;
}

// Half-open window copy: rows [r0,r1), columns [c0,c1).
template <typename Scalar>
SparseMat<Scalar> slice(const SparseMat<Scalar>& a, Index r0, Index r1, Index c0, Index c1) {
  if (r0 < 0 || r1 < r0 || r1 > a.rows || c0 < 0 || c1 < c0 || c1 > a.cols)
    throw IndexError("slice: window out of range");
  SparseMat<Scalar> out(r1 - r0, c1 - c0);
  for (Index j = c0; j < c1; ++j) {
    auto first = a.rowidx.begin() + a.colptr[j];
    auto last = a.rowidx.begin() + a.colptr[j + 1];
    auto lo = std::lower_bound(first, last, r0);
    auto hi = std::lower_bound(first, last, r1);
    for (auto it = lo; it != hi; ++it) {
      out.rowidx.push_back(*it - r0);
      out.vals.push_back(a.vals[it - a.rowidx.begin()]);
    }
    out.colptr[j - c0 + 1] = out.nnz();
  }
  return out;
}

}  // namespace sosforge
