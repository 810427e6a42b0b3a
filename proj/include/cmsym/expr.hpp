#ifndef CMSYM_EXPR_HPP
#define CMSYM_EXPR_HPP

#include <cctype>
#include <cstddef>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cmsym/ratfunc.hpp"

namespace cmsym {

// Syntax tree for the expression dialect:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          exponent must be an integer literal
//   atom   := number | identifier | '(' expr ')'
// so '^' binds tighter than unary minus, which binds tighter than * and /.
struct ExprAst {
  enum class Kind { number, symbol, neg, add, sub, mul, div, pow };

  Kind kind;
  std::size_t position = 0;
  BigRational value;  // number
  std::string name;   // symbol
  std::string literal; // number, as written
  std::vector<std::unique_ptr<ExprAst>> children;
};

namespace detail {

class ExprParser {
public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  std::unique_ptr<ExprAst> parse() {
    skip_space();
    if (pos_ == text_.size())
      throw ParseError("empty expression", pos_);
    auto e = parse_sum();
    skip_space();
    if (pos_ != text_.size())
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    return e;
  }

private:
  using Ptr = std::unique_ptr<ExprAst>;

  static Ptr node(ExprAst::Kind k, std::size_t pos) {
    auto n = std::make_unique<ExprAst>();
    n->kind = k;
    n->position = pos;
    return n;
  }

  static Ptr binary(ExprAst::Kind k, std::size_t pos, Ptr l, Ptr r) {
    auto n = node(k, pos);
    n->children.push_back(std::move(l));
    n->children.push_back(std::move(r));
    return n;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Ptr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('+'))
        lhs = binary(ExprAst::Kind::add, at, std::move(lhs), parse_product());
      else if (accept('-'))
        lhs = binary(ExprAst::Kind::sub, at, std::move(lhs), parse_product());
      else
        return lhs;
    }
  }

  Ptr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      skip_space();
      std::size_t at = pos_;
      if (accept('*'))
        lhs = binary(ExprAst::Kind::mul, at, std::move(lhs), parse_unary());
      else if (accept('/'))
        lhs = binary(ExprAst::Kind::div, at, std::move(lhs), parse_unary());
      else {
        skip_space();
        if (pos_ < text_.size() &&
            (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '(' ||
             text_[pos_] == '.'))
          throw ParseError("missing operator (implicit multiplication is not allowed)", pos_);
        return lhs;
      }
    }
  }

  Ptr parse_unary() {
    skip_space();
    std::size_t at = pos_;
    if (accept('-')) {
      auto n = node(ExprAst::Kind::neg, at);
      n->children.push_back(parse_unary());
      return n;
    }
    return parse_power();
  }

  Ptr parse_power() {
    auto base = parse_atom();
    skip_space();
    std::size_t at = pos_;
    if (!accept('^'))
      return base;
    skip_space();
    std::size_t exp_at = pos_;
    auto exponent = parse_unary(); // right associative
    if (exponent->kind != ExprAst::Kind::number || !is_natural(exponent->value) ||
        exponent->literal.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("exponent must be a non-negative integer literal", exp_at);
    if (exponent->value > 1000)
      throw ParseError("exponent too large", exp_at);
    return binary(ExprAst::Kind::pow, at, std::move(base), std::move(exponent));
  }

  static bool is_natural(const BigRational &q) {
    return q.get_den() == 1 && q >= 0;
  }

  Ptr parse_atom() {
    skip_space();
    std::size_t at = pos_;
    if (pos_ == text_.size())
      throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (!accept(')'))
        throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      auto n = node(ExprAst::Kind::number, at);
      n->value = parse_decimal_literal(text_.substr(pos_), &used, pos_);
      n->literal = std::string(text_.substr(pos_, used));
      pos_ += used;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_ + 1;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      auto n = node(ExprAst::Kind::symbol, at);
      n->name = std::string(text_.substr(pos_, end - pos_));
      pos_ = end;
      return n;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline RatFunc evaluate_ast(const ExprAst &n, const Symbols &syms) {
  using K = ExprAst::Kind;
  switch (n.kind) {
  case K::number:
    return RatFunc::constant(syms, n.value);
  case K::symbol: {
    auto i = syms.find(n.name);
    if (!i)
      throw ParseError("unknown identifier '" + n.name + "'", n.position);
    return RatFunc::variable(syms, *i);
  }
  case K::neg:
    return -evaluate_ast(*n.children[0], syms);
  case K::add:
    return evaluate_ast(*n.children[0], syms) + evaluate_ast(*n.children[1], syms);
  case K::sub:
    return evaluate_ast(*n.children[0], syms) - evaluate_ast(*n.children[1], syms);
  case K::mul:
    return evaluate_ast(*n.children[0], syms) * evaluate_ast(*n.children[1], syms);
  case K::div: {
    RatFunc d = evaluate_ast(*n.children[1], syms);
    if (d.is_zero())
      throw ParseError("division by an identically zero expression", n.position);
    return evaluate_ast(*n.children[0], syms) / d;
  }
  case K::pow:
    return pow(evaluate_ast(*n.children[0], syms),
               static_cast<unsigned>(n.children[1]->value.get_num().get_ui()));
  }
  throw std::logic_error("unhandled expression node");
}

inline std::string render_poly(const MultiPoly &p) {
  if (p.is_zero())
    return "0";
  std::ostringstream os;
  bool first = true;
  const Symbols &syms = p.symbols();
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto &[m, c] = *it;
    BigRational mag = abs(c);
    if (first) {
      if (c < 0)
        os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || m.is_one()) {
      os << mag.get_str();
      wrote = true;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0)
        continue;
      if (wrote)
        os << "*";
      os << syms[i];
      if (m[i] > 1)
        os << "^" << m[i];
      wrote = true;
    }
  }
  return os.str();
}

} // namespace detail

inline std::unique_ptr<ExprAst> parse_ast(std::string_view text) {
  return detail::ExprParser(text).parse();
}

// Parses `text` into an exact rational function over `symbols`.
inline RatFunc parse_expr(std::string_view text, const Symbols &symbols) {
  auto ast = parse_ast(text);
  return detail::evaluate_ast(*ast, symbols);
}

// Renders numerator and denominator in descending graded-lex order. The
// output re-parses to an equal value.
inline std::string render_expr(const RatFunc &v) {
  std::string num = detail::render_poly(v.num());
  if (v.den().is_constant())
    return num;
  bool single = v.num().term_count() == 1;
  std::string out = single && num.front() != '-' ? num : "(" + num + ")";
  return out + "/(" + detail::render_poly(v.den()) + ")";
}

} // namespace cmsym

#endif
