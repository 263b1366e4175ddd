#include "sosforge/poly_parse.hpp"

#include <cctype>
#include <cstdlib>

namespace sosforge {

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& why) const { throw ParseError(why, pos); }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  PPoly expr() {
    bool neg = false;
    if (peek() == '-') {
      ++pos;
      neg = true;
    }
    PPoly acc = term();
    if (neg) acc = ppoly_scale(acc, -1.0);
    for (;;) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos;
        PPoly t = term();
        acc = ppoly_add(acc, c == '-' ? ppoly_scale(t, -1.0) : t);
      } else {
        return acc;
      }
    }
  }

  PPoly term() {
    PPoly acc = factor();
    while (peek() == '*') {
      ++pos;
      acc = ppoly_mul(acc, factor());
    }
    return acc;
  }

  PPoly factor() {
    PPoly b = base();
    if (peek() == '^') {
      ++pos;
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(pos < text.size() ? text[pos] : '\0')))
        fail("exponent must be a nonnegative integer");
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos < text.size() && (text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E'))
        fail("exponent must be a nonnegative integer");
      unsigned long e = std::stoul(text.substr(start, pos - start));
      return ppoly_pow(b, static_cast<Degree>(e));
    }
    return b;
  }

  PPoly base() {
    char c = peek();
    if (c == '(') {
      ++pos;
      PPoly inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text.c_str() + pos;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("expected number");
      pos += static_cast<std::size_t>(end - begin);
      // Reject implicit multiplication like "2x".
      if (pos < text.size() &&
          (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        fail("implicit multiplication is not supported; use '*'");
      return ppoly_constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      return ppoly_var(text.substr(start, pos - start));
    }
    fail("expected number, name, or '('");
  }
};

}  // namespace

PPoly parse_ppoly(const std::string& expr) {
  Parser p{expr};
  PPoly out = p.expr();
  p.skip_ws();
  if (p.pos != expr.size()) p.fail("trailing input");
  return out;
}

}  // namespace sosforge
