#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sosforge/dpoly.hpp"
#include "sosforge/flat.hpp"

namespace sosforge {

// One measurement: the named operation on the synthetic degree-4 instance
// with q decision variables, in the given representation.
struct BenchRecord {
  std::string op;              // add | mul | diff | subs | int
  std::string representation;  // dpvar | pvar
  Index q = 0;
  double wall_time = 0.0;  // seconds, median over repetitions
  Index peak_nnz = 0;      // largest coefficient nnz among operands and result
  Index basis_rows = 0;    // monomial rows of the result basis
};

// SOSFORGE_SEED when set, 12345 otherwise.
std::uint64_t default_seed();

struct BenchOptions {
  std::vector<Index> qs;  // ascending
  Index reps = 5;
  std::uint64_t seed = default_seed();
  bool audit = true;  // cross-check dpvar and pvar results by evaluation
};

// Synthetic instance of the scaling study: a scalar variable over the
// degree-4 full basis in two independent variables with a dense random
// coefficient matrix. For "add", the second operand shares half of the
// decision variables; "mul" multiplies by a dense degree-4 polynomial;
// diff/subs/int act on x2 (substitution value 0.5). subs and int exist only
// for the dpvar representation.
std::vector<BenchRecord> run_bench(const std::string& op, const BenchOptions& bo);

std::string bench_csv(const std::vector<BenchRecord>& recs);
void write_bench_csv(const std::string& path, const std::vector<BenchRecord>& recs);

}  // namespace sosforge
