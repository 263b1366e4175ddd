#pragma once

#include <string>
#include <vector>

#include "sosforge/sosprog.hpp"

namespace sosforge {

// Sparse SDPA (.dat-s) text for the problem, deterministic down to the byte:
// optional leading comment lines (each written with a '"' prefix), then the
// constraint count, block count, block size list, right-hand-side line, and
// entries "matno blkno i j value" sorted by that tuple, upper triangle only,
// all numbers rendered with %.17g.
//
// Encoding: the SDPA file's dual (max tr(F0 Y) s.t. tr(Fi Y) = rhs_i, Y >= 0)
// is this problem. Matrix 0 is -c, matrix i is row i of A, the rhs line is b.
// Free variables are carried exactly as a leading diagonal block of size
// 2*nfree holding the split x = x+ - x-; slots 2k/2k+1 receive +a/-a.
std::string sdpa_text(const SdpProblem& sdp, const std::vector<std::string>& comments = {});

void export_sdpa(const SdpProblem& sdp, const std::string& path,
                 const std::vector<std::string>& comments = {});

// Reads a sparse SDPA file back into standard form. Diagonal blocks become
// strings of 1x1 cone blocks, except that a leading diagonal block whose
// columns pair up with exactly mirrored coefficients (the split encoding
// written by sdpa_text) is folded back into free variables. varmap is empty.
SdpProblem parse_sdpa_text(const std::string& text);

SdpProblem parse_sdpa(const std::string& path);

}  // namespace sosforge
