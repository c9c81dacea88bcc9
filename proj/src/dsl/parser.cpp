#include "dsl/ast.hpp"

#include <cctype>
#include <charconv>

namespace emalg::dsl {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok type = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, s.substr(i, j - i), i});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, s.substr(i, j - i), i});
      i = j;
    } else if (std::string_view("()[],*+-/^").find(c) != std::string_view::npos) {
      out.push_back({Tok::Punct, std::string(1, c), i});
      ++i;
    } else {
      throw ParseError(ParseError::Kind::Lexical, i, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  NodePtr parse_all() {
    NodePtr e = parse_sum();
    if (peek().type != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    if (peek().type == Tok::End) {
      throw ParseError(ParseError::Kind::Lexical, peek().offset, "unexpected end of input");
    }
    throw ParseError(ParseError::Kind::Lexical, peek().offset, msg);
  }

  bool at_punct(char c, std::size_t ahead = 0) const {
    return peek(ahead).type == Tok::Punct && peek(ahead).text[0] == c;
  }

  void expect(char c) {
    if (!at_punct(c)) fail(std::string("expected '") + c + "'");
    next();
  }

  std::string ident() {
    if (peek().type != Tok::Ident) fail("expected a name");
    return next().text;
  }

  Index index() {
    if (peek().type == Tok::Number) {
      const Token& t = next();
      if (t.text != "1" && t.text != "2" && t.text != "3") {
        throw ParseError(ParseError::Kind::Lexical, t.offset, "concrete index must be 1, 2 or 3");
      }
      return Index(t.text[0] - '0');
    }
    return Index(ident());
  }

  // '[' idx (',' idx)* ']' with a fixed arity
  std::vector<Index> index_list(const std::string& head, std::size_t arity, std::size_t head_offset) {
    expect('[');
    std::vector<Index> out{index()};
    while (at_punct(',')) {
      next();
      out.push_back(index());
    }
    expect(']');
    if (out.size() != arity) {
      throw ParseError(ParseError::Kind::Arity, head_offset,
                       head + " expects " + std::to_string(arity) + " indices, got " + std::to_string(out.size()));
    }
    return out;
  }

  std::string point_arg() {
    expect('(');
    std::string p = ident();
    expect(')');
    return p;
  }

  std::vector<DerivRef> derivs() {
    std::vector<DerivRef> out;
    while (peek().type == Tok::Ident && peek().text == "d" && at_punct('[', 1)) {
      next();
      expect('[');
      std::string p = ident();
      expect(',');
      Index i = index();
      expect(']');
      out.push_back({p, i});
    }
    return out;
  }

  static NodePtr at(NodePtr n, std::size_t offset) {
    auto copy = std::make_shared<Node>(*n);
    copy->offset = offset;
    return copy;
  }

  NodePtr parse_sum() {
    const std::size_t start = peek().offset;
    std::vector<NodePtr> terms;
    bool negative = false;
    if (at_punct('+') || at_punct('-')) negative = next().text == "-";
    for (;;) {
      NodePtr p = parse_product();
      terms.push_back(negative ? at(scalar_mul(Coefficient(Rational(-1)), p), p->offset) : p);
      if (at_punct('+') || at_punct('-')) {
        negative = next().text == "-";
      } else {
        break;
      }
    }
    if (terms.size() == 1) return terms.front();
    return at(sum(std::move(terms)), start);
  }

  bool starts_factor() const {
    const Token& t = peek();
    return t.type == Tok::Ident || t.type == Tok::Number || at_punct('(');
  }

  NodePtr parse_product() {
    const std::size_t start = peek().offset;
    std::vector<NodePtr> factors{parse_factor()};
    for (;;) {
      if (at_punct('*')) {
        next();
        factors.push_back(parse_factor());
      } else if (starts_factor()) {
        factors.push_back(parse_factor());
      } else {
        break;
      }
    }
    if (factors.size() == 1) return factors.front();
    auto p = std::make_shared<Node>();
    p->kind = NodeKind::Product;
    p->children = std::move(factors);
    p->offset = start;
    return p;
  }

  int exponent() {
    if (!at_punct('^')) return 1;
    next();
    bool neg = false;
    if (at_punct('-')) {
      next();
      neg = true;
    }
    if (peek().type != Tok::Number) fail("expected an exponent");
    int v = std::stoi(next().text);
    return neg ? -v : v;
  }

  NodePtr parse_factor() {
    const Token& t = peek();
    const std::size_t off = t.offset;
    if (at_punct('(')) {
      next();
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (t.type == Tok::Number) {
      std::int64_t num = 0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), num);
      next();
      std::int64_t den = 1;
      if (at_punct('/')) {
        next();
        if (peek().type != Tok::Number) fail("expected a denominator");
        const std::string& d = next().text;
        std::from_chars(d.data(), d.data() + d.size(), den);
        if (den == 0) throw ParseError(ParseError::Kind::Lexical, off, "zero denominator");
      }
      return at(scalar(Coefficient(Rational(num, den))), off);
    }
    if (t.type != Tok::Ident) fail("expected a factor");
    const std::string head = next().text;

    if (head == "I") return at(scalar(Coefficient(Rational(1), 0, 0, exponent())), off);
    if (head == "hbar") return at(scalar(Coefficient(Rational(1), exponent(), 0, 0)), off);
    if (head == "eps0") return at(scalar(Coefficient(Rational(1), 0, exponent(), 0)), off);

    if (head == "comm" && at_punct('(')) {
      next();
      NodePtr a = parse_sum();
      expect(',');
      NodePtr b = parse_sum();
      expect(')');
      return at(comm(a, b), off);
    }
    if (head == "int" && at_punct('(')) {
      std::string p = point_arg();
      expect('(');
      NodePtr body = parse_sum();
      expect(')');
      return at(integral(p, body), off);
    }
    if (head == "sum" && at_punct('[')) {
      next();
      Index i = index();
      expect(']');
      if (i.concrete()) throw ParseError(ParseError::Kind::UnboundName, off, "cannot sum over a concrete index");
      expect('(');
      NodePtr body = parse_sum();
      expect(')');
      return at(sum_over(i.name, body), off);
    }
    if (head == "eps" && at_punct('[')) {
      auto ix = index_list("eps", 3, off);
      return at(epsilon(ix[0], ix[1], ix[2]), off);
    }
    if (head == "delta" && at_punct('[')) {
      auto ix = index_list("delta", 2, off);
      return at(kronecker(ix[0], ix[1]), off);
    }
    if ((head == "E" || head == "B") && at_punct('[')) {
      auto ix = index_list(head, 1, off);
      std::string p = point_arg();
      auto ds = derivs();
      for (const auto& d : ds) {
        if (d.point != p) {
          throw ParseError(ParseError::Kind::UnboundName, off,
                           "derivative point '" + d.point + "' does not match field point '" + p + "'");
        }
      }
      return at(field(head == "E" ? FieldKind::E : FieldKind::B, ix[0], p, ds), off);
    }
    if (head == "x" && at_punct('[')) {
      auto ix = index_list("x", 1, off);
      return at(coord(point_arg(), ix[0]), off);
    }
    if (head == "ddelta" && at_punct('(')) {
      next();
      std::string p = ident();
      expect(',');
      std::string q = ident();
      expect(')');
      auto ds = derivs();
      for (const auto& d : ds) {
        if (d.point != p && d.point != q) {
          throw ParseError(ParseError::Kind::UnboundName, off,
                           "derivative point '" + d.point + "' is not an argument of ddelta");
        }
      }
      return at(delta(p, q, ds), off);
    }
    if ((head == "P" || head == "J") && at_punct('[')) {
      auto ix = index_list(head, 1, off);
      return at(named(head[0], ix[0]), off);
    }
    throw ParseError(ParseError::Kind::UnboundName, off, "unknown name '" + head + "'");
  }
};

}  // namespace

NodePtr parse(const std::string& text) { return Parser(text).parse_all(); }

}  // namespace emalg::dsl
