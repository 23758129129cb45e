#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "cmg/scalar_field.hpp"

namespace cmg::jetcalc {

// Recursive-descent parser for the expression grammar used in structure
// files and CLI flags:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-')* power
//   power  := atom ('^' integer)*
//   atom   := number | 'x' | 'y' | 'z'
//           | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//
// Whitespace is insignificant. Exponents must be integer literals.
class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (consume('+'))
        e = make_add(e, parse_term());
      else if (consume('-'))
        e = make_sub(e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (consume('*'))
        e = make_mul(e, parse_unary());
      else if (consume('/'))
        e = make_div(e, parse_unary());
      else
        return e;
    }
  }

  ExprPtr parse_unary() {
    bool negate = false;
    for (;;) {
      if (consume('-'))
        negate = !negate;
      else if (consume('+'))
        ;
      else
        break;
    }
    ExprPtr e = parse_power();
    return negate ? make_neg(e) : e;
  }

  ExprPtr parse_power() {
    ExprPtr e = parse_atom();
    while (consume('^')) e = make_pow_int(e, parse_int_literal());
    return e;
  }

  long long parse_int_literal() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      fail("exponent must be an integer literal");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      pos_ = start;
      fail("exponent must be an integer literal");
    }
    long long v = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc{}) {
      pos_ = start;
      fail("invalid integer exponent");
    }
    return v;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];

    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return e;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();

    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return make_coord(0);
      if (name == "y") return make_coord(1);
      if (name == "z") return make_coord(2);
      if (name == "sin" || name == "cos" || name == "exp") {
        if (!consume('(')) fail("expected '(' after function name");
        ExprPtr arg = parse_expr();
        if (!consume(')')) fail("expected ')'");
        if (name == "sin") return make_sin(arg);
        if (name == "cos") return make_cos(arg);
        return make_exp(arg);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }

    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // 'e' was not an exponent marker
      }
    }
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '.'))
      fail("malformed number literal");
    double v = 0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (res.ec != std::errc{}) fail("malformed number literal");
    return make_constant(v);
  }
};

inline ScalarField parse_expression(std::string_view text) {
  return ScalarField(ExpressionParser(text).parse());
}

}  // namespace cmg::jetcalc

namespace cmg {
using jetcalc::parse_expression;
}  // namespace cmg
