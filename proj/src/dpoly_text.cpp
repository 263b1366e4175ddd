// Plain-text form of a DPoly.
//
//   dpoly <m1> <m2>
//   ivars [name ...]
//   dvars [name ...]
//   (i,j): <entry>        one line per matrix entry, row-major
//
// An entry is "0" or a signed sum of terms ordered by basis monomial, then by
// decision variable (constant part first). Each term is
//   [coeff '*'] [dvar '*'] factor ('*' factor)*
// with factor = ivar or ivar^e, exponents descending along the variable order,
// coefficient omitted when it is exactly 1, "^1" never printed. Coefficients
// print with %.17g, so a print/parse round trip is exact.

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "sosforge/detail/format.hpp"
#include "sosforge/dpoly.hpp"

namespace sosforge {

namespace {

struct Term {
  Index mon;   // basis row
  Index dvar;  // -1 for the constant slice
  double val;
};

// Terms of entry (i,j) ordered by (monomial, dvar row).
std::vector<Term> entry_terms(const DPoly& s, Index i, Index j) {
  const Index q = s.q(), n = s.nmon();
  std::vector<Term> terms;
  for (Index k = 0; k < n; ++k) {
    const Index c = j * n + k;
    for (Index t = s.coeff.colptr[c]; t < s.coeff.colptr[c + 1]; ++t) {
      const Index r = s.coeff.rowidx[t];
      if (r / (q + 1) != i) continue;
      terms.push_back({k, r % (q + 1) - 1, s.coeff.vals[t]});
    }
  }
  return terms;
}

void print_term(std::string& out, const DPoly& s, const Term& t, bool first) {
  double v = t.val;
  if (first) {
    if (v < 0) out += "-";
  } else {
    out += v < 0 ? " - " : " + ";
  }
  double mag = v < 0 ? -v : v;

  std::vector<std::string> factors;
  if (t.dvar >= 0) factors.push_back(s.dvars.names[static_cast<std::size_t>(t.dvar)]);
  for (Index col = 0; col < s.basis.degs.cols; ++col) {
    Degree e = coeff(s.basis.degs, t.mon, col);
    if (e == 0) continue;
    std::string f = s.ivars.names[static_cast<std::size_t>(col)];
    if (e != 1) f += "^" + std::to_string(e);
    factors.push_back(std::move(f));
  }
  bool wrote = false;
  if (mag != 1.0 || factors.empty()) {
    out += detail::fmt_g17(mag);
    wrote = true;
  }
  for (const auto& f : factors) {
    if (wrote) out += "*";
    out += f;
    wrote = true;
  }
}

}  // namespace

std::string entry_text(const DPoly& s, Index i, Index j) {
  if (i < 0 || i >= s.m1 || j < 0 || j >= s.m2) throw IndexError("entry_text: out of range");
  std::vector<Term> terms = entry_terms(s, i, j);
  if (terms.empty()) return "0";
  std::string out;
  for (std::size_t t = 0; t < terms.size(); ++t) print_term(out, s, terms[t], t == 0);
  return out;
}

std::string entry_text(const PPoly& p, Index i, Index j) {
  return entry_text(from_ppoly(p), i, j);
}

std::string to_text(const DPoly& s) {
  std::string out = "dpoly " + std::to_string(s.m1) + " " + std::to_string(s.m2) + "\n";
  out += "ivars";
  for (const auto& n : s.ivars.names) out += " " + n;
  out += "\ndvars";
  for (const auto& n : s.dvars.names) out += " " + n;
  out += "\n";
  for (Index i = 0; i < s.m1; ++i)
    for (Index j = 0; j < s.m2; ++j)
      out += "(" + std::to_string(i) + "," + std::to_string(j) + "): " + entry_text(s, i, j) + "\n";
  return out;
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  char take() { return pos < text.size() ? text[pos++] : '\0'; }
  void skip_spaces() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  [[noreturn]] void fail(const std::string& why) const { throw ParseError(why, pos); }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  void expect_word(const std::string& w) {
    if (text.compare(pos, w.size(), w) != 0) fail("expected '" + w + "'");
    pos += w.size();
  }
  long long integer() {
    skip_spaces();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) fail("expected integer");
    return std::stoll(text.substr(start, pos - start));
  }
  std::string ident() {
    skip_spaces();
    std::size_t start = pos;
    if (!(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("expected name");
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }
  double number() {
    std::size_t start = pos;
    const char* begin = text.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos += static_cast<std::size_t>(end - begin);
    (void)start;
    return v;
  }
  void expect_newline() {
    if (peek() == '\r') ++pos;
    if (peek() != '\n') fail("expected end of line");
    ++pos;
  }
};

}  // namespace

DPoly dpoly_from_text(const std::string& text) {
  Cursor c{text};
  c.expect_word("dpoly");
  c.skip_spaces();
  Index m1 = c.integer();
  c.skip_spaces();
  Index m2 = c.integer();
  c.expect_newline();

  c.expect_word("ivars");
  std::vector<std::string> inames;
  c.skip_spaces();
  while (c.peek() != '\n' && c.peek() != '\r' && c.peek() != '\0') {
    inames.push_back(c.ident());
    c.skip_spaces();
  }
  c.expect_newline();
  c.expect_word("dvars");
  std::vector<std::string> dnames;
  c.skip_spaces();
  while (c.peek() != '\n' && c.peek() != '\r' && c.peek() != '\0') {
    dnames.push_back(c.ident());
    c.skip_spaces();
  }
  c.expect_newline();
  VarSet ivars = make_varset(inames);
  VarSet dvars = make_varset(dnames);
  if (ivars.names != inames) throw ParseError("ivars not sorted and unique", 0);
  if (dvars.names != dnames) throw ParseError("dvars not sorted and unique", 0);
  for (const auto& d : dvars.names)
    if (var_index(ivars, d) >= 0) throw ParseError("name declared in both var lists: " + d, 0);

  DPoly out = dpoly_zero(m1, m2);
  for (Index i = 0; i < m1; ++i) {
    for (Index j = 0; j < m2; ++j) {
      c.expect('(');
      if (c.integer() != i) c.fail("unexpected entry row");
      c.expect(',');
      if (c.integer() != j) c.fail("unexpected entry column");
      c.expect(')');
      c.expect(':');
      c.skip_spaces();

      DPoly entry = dpoly_zero(1, 1);
      bool neg = false;
      if (c.peek() == '-') {
        neg = true;
        c.take();
        c.skip_spaces();
      }
      for (;;) {
        // one term
        double mag = 1.0;
        bool saw_coeff = false;
        std::string dvar;
        PPoly mono = ppoly_constant(1.0);
        bool any_factor = false;
        if (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.') {
          mag = c.number();
          saw_coeff = true;
          any_factor = true;
        }
        while (true) {
          if (saw_coeff || any_factor) {
            c.skip_spaces();
            if (c.peek() != '*') break;
            c.take();
            c.skip_spaces();
          }
          std::string name = c.ident();
          Degree e = 1;
          if (c.peek() == '^') {
            c.take();
            long long ev = c.integer();
            if (ev < 0) c.fail("negative exponent");
            e = static_cast<Degree>(ev);
          }
          if (var_index(dvars, name) >= 0) {
            if (e != 1) c.fail("decision variable exponent must be 1");
            if (!dvar.empty()) c.fail("term has two decision variables");
            dvar = name;
          } else if (var_index(ivars, name) >= 0) {
            mono = ppoly_mul(mono, ppoly_pow(ppoly_var(name), e));
          } else {
            c.fail("undeclared name: " + name);
          }
          any_factor = true;
          saw_coeff = true;  // factors now need '*' separators
        }
        if (!any_factor) {
          // bare "0" handled via the numeric branch; anything else is an error
          c.fail("expected term");
        }
        double val = neg ? -mag : mag;
        DPoly term = dvar.empty() ? from_ppoly(ppoly_scale(mono, val))
                                  : scale(mul_poly(dpoly_dvar(dvar), mono, Side::Right), val);
        if (val != 0.0) entry = add(entry, term);

        c.skip_spaces();
        if (c.peek() == '+') {
          neg = false;
          c.take();
          c.skip_spaces();
        } else if (c.peek() == '-') {
          neg = true;
          c.take();
          c.skip_spaces();
        } else {
          break;
        }
      }
      out = set_entry(out, i, j, entry);
      c.expect_newline();
    }
  }
  // Re-attach declared-but-unused variables so declarations round-trip.
  DPoly pad = dpoly_zero(m1, m2);
  pad.dvars = dvars;
  pad.ivars = ivars;
  pad.basis.vars = ivars;
  pad.basis.degs = SparseMat<Degree>(0, ivars.size());
  pad.coeff = SparseMat<double>(m1 * (dvars.size() + 1), 0);
  return add(out, pad);
}

}  // namespace sosforge
