#include "sosforge/sdpa_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sosforge/detail/format.hpp"

namespace sosforge {

namespace {

struct Entry {
  Index mat, blk, i, j;  // 1-based block/row/col, mat 0 is the objective
  double val;
  bool operator<(const Entry& o) const {
    if (mat != o.mat) return mat < o.mat;
    if (blk != o.blk) return blk < o.blk;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

// File block layout: one diagonal block of size 2*nfree (when nfree > 0)
// followed by the PSD blocks in order.
struct Layout {
  Index nfree;
  std::vector<Index> psd;  // sides
  Index nblocks() const { return (nfree > 0 ? 1 : 0) + static_cast<Index>(psd.size()); }
};

// Emits the file entries for one vectorized coefficient. Free variables fan
// out into the mirrored split pair; PSD slots emit the upper triangle only
// (the lower duplicate carries the same value by construction).
void collect(std::vector<Entry>& out, const Layout& lay, Index mat, Index slot, double val) {
  if (val == 0.0) return;
  if (slot < lay.nfree) {
    out.push_back({mat, 1, 2 * slot + 1, 2 * slot + 1, val});
    out.push_back({mat, 1, 2 * slot + 2, 2 * slot + 2, -val});
    return;
  }
  const Index fblk = lay.nfree > 0 ? 1 : 0;
  Index off = lay.nfree;
  for (std::size_t bdx = 0; bdx < lay.psd.size(); ++bdx) {
    const Index s = lay.psd[bdx];
    if (slot < off + s * s) {
      const Index local = slot - off;
      const Index c = local / s, r = local % s;
      if (r > c) return;  // lower-triangle duplicate
      out.push_back({mat, fblk + static_cast<Index>(bdx) + 1, r + 1, c + 1, val});
      return;
    }
    off += s * s;
  }
  throw IndexError("sdpa: slot out of range");
}

}  // namespace

std::string sdpa_text(const SdpProblem& sdp, const std::vector<std::string>& comments) {
  Layout lay{sdp.nfree, sdp.blocks};
  const Index m = sdp.A.rows;

  std::vector<Entry> entries;
  for (Index slot = 0; slot < sdp.nvec(); ++slot) collect(entries, lay, 0, slot, -sdp.c[slot]);
  for (Index col = 0; col < sdp.A.cols; ++col)
    for (Index t = sdp.A.colptr[col]; t < sdp.A.colptr[col + 1]; ++t)
      collect(entries, lay, sdp.A.rowidx[t] + 1, col, sdp.A.vals[t]);
  std::sort(entries.begin(), entries.end());

  std::string out;
  for (const auto& cmt : comments) out += "\"" + cmt + "\n";
  out += std::to_string(m) + "\n";
  out += std::to_string(lay.nblocks()) + "\n";
  {
    std::string line;
    if (lay.nfree > 0) line += std::to_string(-2 * lay.nfree);
    for (Index s : lay.psd) {
      if (!line.empty()) line += " ";
      line += std::to_string(s);
    }
    out += line + "\n";
  }
  {
    std::string line;
    for (Index i = 0; i < m; ++i) {
      if (i) line += " ";
      line += detail::fmt_g17(sdp.b[i]);
    }
    out += line + "\n";
  }
  for (const auto& e : entries)
    out += std::to_string(e.mat) + " " + std::to_string(e.blk) + " " + std::to_string(e.i) + " " +
           std::to_string(e.j) + " " + detail::fmt_g17(e.val) + "\n";
  return out;
}

void export_sdpa(const SdpProblem& sdp, const std::string& path,
                 const std::vector<std::string>& comments) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << sdpa_text(sdp, comments);
  if (!f) throw IoError("write failed: " + path);
}

namespace {

struct Tok {
  const std::string& text;
  std::size_t pos = 0;

  void skip() {
    for (;;) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos < text.size() && (text[pos] == '"' || text[pos] == '*')) {
        while (pos < text.size() && text[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  }
  bool done() {
    skip();
    return pos >= text.size();
  }
  double number(const char* what) {
    skip();
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(std::string("sdpa: expected ") + what, pos);
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }
  Index integer(const char* what) {
    double v = number(what);
    Index i = static_cast<Index>(v);
    if (static_cast<double>(i) != v) throw ParseError(std::string("sdpa: expected integer ") + what, pos);
    return i;
  }
};

}  // namespace

SdpProblem parse_sdpa_text(const std::string& text) {
  Tok tok{text};
  const Index m = tok.integer("constraint count");
  if (m < 0) throw ParseError("sdpa: negative constraint count", tok.pos);
  const Index nblocks = tok.integer("block count");
  if (nblocks < 0) throw ParseError("sdpa: negative block count", tok.pos);

  std::vector<Index> sizes;
  for (Index bdx = 0; bdx < nblocks; ++bdx) {
    Index s = tok.integer("block size");
    if (s == 0) throw ParseError("sdpa: zero block size", tok.pos);
    sizes.push_back(s);
  }
  Eigen::VectorXd b(m);
  for (Index i = 0; i < m; ++i) b[i] = tok.number("rhs value");

  // matno -> block -> list of (i, j, v), 0-based, i <= j
  struct Raw {
    Index mat, blk, i, j;
    double v;
  };
  std::vector<Raw> raw;
  while (!tok.done()) {
    Index mat = tok.integer("matrix number");
    Index blk = tok.integer("block number");
    Index i = tok.integer("row");
    Index j = tok.integer("column");
    double v = tok.number("value");
    if (mat < 0 || mat > m) throw ParseError("sdpa: matrix number out of range", tok.pos);
    if (blk < 1 || blk > nblocks) throw ParseError("sdpa: block number out of range", tok.pos);
    const Index side = std::abs(sizes[static_cast<std::size_t>(blk - 1)]);
    if (i < 1 || j < 1 || i > side || j > side) throw ParseError("sdpa: entry out of range", tok.pos);
    if (i > j) std::swap(i, j);
    if (sizes[static_cast<std::size_t>(blk - 1)] < 0 && i != j)
      throw ParseError("sdpa: off-diagonal entry in diagonal block", tok.pos);
    raw.push_back({mat, blk, i - 1, j - 1, v});
  }

  // Decide whether the first diagonal block is a split-pair encoding of free
  // variables: even size, and for every matrix the coefficient at slot 2k+1
  // is exactly the negation of the one at slot 2k.
  Index nfree = 0;
  bool fold = false;
  if (!sizes.empty() && sizes[0] < 0 && (-sizes[0]) % 2 == 0) {
    const Index half = -sizes[0] / 2;
    std::vector<double> plus(static_cast<std::size_t>((m + 1) * half), 0.0);
    std::vector<double> minus(static_cast<std::size_t>((m + 1) * half), 0.0);
    bool ok = true;
    for (const auto& e : raw) {
      if (e.blk != 1) continue;
      if (e.i / 2 >= half) {
        ok = false;
        break;
      }
      auto& side = (e.i % 2 == 0) ? plus : minus;
      side[static_cast<std::size_t>(e.mat * half + e.i / 2)] += e.v;
    }
    if (ok) {
      for (std::size_t k = 0; k < plus.size(); ++k)
        if (plus[k] != -minus[k]) {
          ok = false;
          break;
        }
    }
    if (ok) {
      fold = true;
      nfree = half;
    }
  }

  // Vector layout of the parsed problem.
  SdpProblem sdp;
  sdp.nfree = nfree;
  std::vector<Index> block_base(static_cast<std::size_t>(nblocks), -1);
  Index off = nfree;
  for (Index bdx = 0; bdx < nblocks; ++bdx) {
    if (bdx == 0 && fold) continue;  // folded into free variables
    block_base[static_cast<std::size_t>(bdx)] = off;
    const Index s = sizes[static_cast<std::size_t>(bdx)];
    if (s < 0) {
      for (Index k = 0; k < -s; ++k) sdp.blocks.push_back(1);
      off += -s;
    } else {
      sdp.blocks.push_back(s);
      off += s * s;
    }
  }
  const Index nvec = off;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(nvec);
  std::vector<Index> ai, aj;
  std::vector<double> av;
  auto place = [&](Index mat, Index slot, double v) {
    if (mat == 0) {
      c[slot] -= v;  // objective matrix is -c
    } else {
      ai.push_back(mat - 1);
      aj.push_back(slot);
      av.push_back(v);
    }
  };
  for (const auto& e : raw) {
    if (fold && e.blk == 1) {
      if (e.i % 2 == 0) place(e.mat, e.i / 2, e.v);  // minus slot implied
      continue;
    }
    const Index s = sizes[static_cast<std::size_t>(e.blk - 1)];
    const Index base = block_base[static_cast<std::size_t>(e.blk - 1)];
    if (s < 0) {
      place(e.mat, base + e.i, e.v);
    } else {
      place(e.mat, base + e.j * s + e.i, e.v);
      if (e.i != e.j) place(e.mat, base + e.i * s + e.j, e.v);
    }
  }
  sdp.A = from_triplets(ai, aj, av, m, nvec);
  sdp.b = std::move(b);
  sdp.c = std::move(c);
  return sdp;
}

SdpProblem parse_sdpa(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_sdpa_text(ss.str());
}

}  // namespace sosforge
