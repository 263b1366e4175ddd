#include "sosforge/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "sosforge/detail/format.hpp"
#include "sosforge/errors.hpp"

namespace sosforge {

namespace {

volatile std::int64_t g_sink = 0;  // keeps timed bodies observable

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Median of `reps` batch means; the batch size is calibrated so one batch
// takes ~20 ms, which keeps microsecond-scale operations clock-noise free.
template <class F>
double time_batched(F&& body, Index reps) {
  auto t0 = Clock::now();
  body();
  const double t1 = elapsed(t0);
  const Index batch =
      t1 >= 0.02 ? 1 : static_cast<Index>(std::ceil(0.02 / std::max(t1, 1e-7)));
  std::vector<double> xs;
  xs.reserve(reps);
  for (Index r = 0; r < reps; ++r) {
    t0 = Clock::now();
    for (Index i = 0; i < batch; ++i) body();
    xs.push_back(elapsed(t0) / static_cast<double>(batch));
  }
  std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
  return xs[xs.size() / 2];
}

std::vector<std::string> numbered(const std::string& stem, Index lo, Index hi) {
  std::vector<std::string> out;
  out.reserve(hi - lo);
  for (Index i = lo; i < hi; ++i) {
    std::string id = std::to_string(i + 1);
    out.push_back(stem + std::string(6 - std::min<std::size_t>(6, id.size()), '0') + id);
  }
  return out;
}

DPoly dense_instance(const std::vector<std::string>& dnames, std::mt19937_64& rng) {
  DPoly s;
  s.dvars = make_varset(dnames);
  s.ivars = make_varset({"x1", "x2"});
  s.basis = full_basis(s.ivars, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd C(s.dvars.size() + 1, s.basis.nmon());
  for (Index i = 0; i < C.rows(); ++i)
    for (Index j = 0; j < C.cols(); ++j) C(i, j) = u(rng);
  s.coeff = from_dense(C);
  return s;
}

PPoly dense_poly(std::mt19937_64& rng) {
  PPoly p;
  p.ivars = make_varset({"x1", "x2"});
  p.basis = full_basis(p.ivars, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd C(1, p.basis.nmon());
  for (Index j = 0; j < C.cols(); ++j) C(0, j) = u(rng);
  p.coeff = from_dense(C);
  return p;
}

PointMap random_point(const std::vector<const VarSet*>& sets, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointMap pt;
  for (const VarSet* vs : sets)
    for (const std::string& n : vs->names)
      if (!pt.count(n)) pt[n] = u(rng);
  return pt;
}

void audit_match(double got, double want, const std::string& op) {
  if (std::abs(got - want) > 1e-8 * (1.0 + std::abs(want)))
    throw Error("bench audit failed for op " + op);
}

}  // namespace

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SOSFORGE_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return 12345;
}

std::vector<BenchRecord> run_bench(const std::string& op, const BenchOptions& bo) {
  static const std::vector<std::string> kOps = {"add", "mul", "diff", "subs", "int"};
  if (std::find(kOps.begin(), kOps.end(), op) == kOps.end())
    throw ArgumentError("run_bench: unknown op " + op);
  if (bo.qs.empty()) throw ArgumentError("run_bench: empty q list");
  if (!std::is_sorted(bo.qs.begin(), bo.qs.end()))
    throw ArgumentError("run_bench: q list must be ascending");
  const Index reps = std::max<Index>(bo.reps, 5);

  std::vector<BenchRecord> out;
  for (Index q : bo.qs) {
    if (q < 0) throw ArgumentError("run_bench: q must be nonnegative");
    std::mt19937_64 rng(bo.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(q + 1)));

    const DPoly s1 = dense_instance(numbered("w", 0, q), rng);
    DPoly s2;
    PPoly p2;
    if (op == "add") {
      // second operand shares the upper half of s1's decision variables
      std::vector<std::string> dn = numbered("w", q / 2, q);
      std::vector<std::string> fresh = numbered("v", 0, q / 2);
      dn.insert(dn.end(), fresh.begin(), fresh.end());
      s2 = dense_instance(dn, rng);
    } else if (op == "mul") {
      p2 = dense_poly(rng);
    }
    const bool has_pvar = op == "add" || op == "mul" || op == "diff";

    DPoly rd;
    BenchRecord rec{op, "dpvar", q, 0.0, 0, 0};
    if (op == "add") {
      rd = add(s1, s2);
      rec.wall_time = time_batched([&] { g_sink += add(s1, s2).coeff.nnz(); }, reps);
      rec.peak_nnz = std::max({s1.coeff.nnz(), s2.coeff.nnz(), rd.coeff.nnz()});
    } else if (op == "mul") {
      rd = mul_poly(s1, p2, Side::Right);
      rec.wall_time = time_batched([&] { g_sink += mul_poly(s1, p2, Side::Right).coeff.nnz(); }, reps);
      rec.peak_nnz = std::max({s1.coeff.nnz(), p2.coeff.nnz(), rd.coeff.nnz()});
    } else if (op == "diff") {
      rd = diff(s1, "x2");
      rec.wall_time = time_batched([&] { g_sink += diff(s1, "x2").coeff.nnz(); }, reps);
      rec.peak_nnz = std::max(s1.coeff.nnz(), rd.coeff.nnz());
    } else if (op == "subs") {
      const PPoly half = ppoly_constant(0.5);
      rd = subs(s1, "x2", half);
      rec.wall_time = time_batched([&] { g_sink += subs(s1, "x2", half).coeff.nnz(); }, reps);
      rec.peak_nnz = std::max(s1.coeff.nnz(), rd.coeff.nnz());
    } else {
      rd = integrate(s1, "x2");
      rec.wall_time = time_batched([&] { g_sink += integrate(s1, "x2").coeff.nnz(); }, reps);
      rec.peak_nnz = std::max(s1.coeff.nnz(), rd.coeff.nnz());
    }
    rec.basis_rows = rd.basis.nmon();
    out.push_back(rec);

    if (!has_pvar) continue;

    const FlatPoly f1 = flatten(s1);
    FlatPoly f2;
    if (op == "add") f2 = flatten(s2);
    FlatPoly rp;
    BenchRecord pec{op, "pvar", q, 0.0, 0, 0};
    if (op == "add") {
      rp = flat_add(f1, f2);
      pec.wall_time = time_batched([&] { g_sink += flat_add(f1, f2).coeff.nnz(); }, reps);
      pec.peak_nnz = std::max({f1.coeff.nnz(), f2.coeff.nnz(), rp.coeff.nnz()});
    } else if (op == "mul") {
      rp = flat_mul(f1, p2, Side::Right);
      pec.wall_time = time_batched([&] { g_sink += flat_mul(f1, p2, Side::Right).coeff.nnz(); }, reps);
      pec.peak_nnz = std::max({f1.coeff.nnz(), p2.coeff.nnz(), rp.coeff.nnz()});
    } else {
      rp = flat_diff(f1, "x2");
      pec.wall_time = time_batched([&] { g_sink += flat_diff(f1, "x2").coeff.nnz(); }, reps);
      pec.peak_nnz = std::max(f1.coeff.nnz(), rp.coeff.nnz());
    }
    pec.basis_rows = rp.basis.nmon();
    out.push_back(pec);

    if (bo.audit) {
      for (int k = 0; k < 5; ++k) {
        PointMap pt = random_point({&rd.dvars, &rd.ivars, &rp.vars}, rng);
        audit_match(eval(rp, pt)(0, 0), eval(rd, pt)(0, 0), op);
      }
    }
  }
  return out;
}

std::string bench_csv(const std::vector<BenchRecord>& recs) {
  std::ostringstream os;
  os << "op,representation,q,wall_time,peak_nnz,basis_rows\n";
  for (const BenchRecord& r : recs)
    os << r.op << ',' << r.representation << ',' << r.q << ',' << detail::fmt_g17(r.wall_time)
       << ',' << r.peak_nnz << ',' << r.basis_rows << '\n';
  return os.str();
}

void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& recs) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  const std::string text = bench_csv(recs);
  const bool ok = std::fwrite(text.data(), 1, text.size(), fp) == text.size();
  std::fclose(fp);
  if (!ok) throw IoError("short write to " + path);
}

}  // namespace sosforge
