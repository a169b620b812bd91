#include "comsearch/expr.hpp"

#include <cctype>

namespace comsearch {

char op_char(BinOp op) {
  switch (op) {
    case BinOp::Add: return '+';
    case BinOp::Sub: return '-';
    case BinOp::Mul: return '*';
    default: return '/';
  }
}

BinaryExprPtr BinaryExpr::quantity(int index) {
  auto e = std::make_shared<BinaryExpr>();
  e->kind = Kind::Quantity;
  e->index = index;
  return e;
}

BinaryExprPtr BinaryExpr::constant(Rational value) {
  auto e = std::make_shared<BinaryExpr>();
  e->kind = Kind::Constant;
  e->value = std::move(value);
  return e;
}

BinaryExprPtr BinaryExpr::pi() {
  auto e = std::make_shared<BinaryExpr>();
  e->kind = Kind::Pi;
  return e;
}

BinaryExprPtr BinaryExpr::binary(BinOp op, BinaryExprPtr l, BinaryExprPtr r) {
  auto e = std::make_shared<BinaryExpr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->left = std::move(l);
  e->right = std::move(r);
  return e;
}

std::optional<int> QuantitySurfaceMap::lookup(const std::string& surface, const Rational& value) const {
  for (size_t i = 0; i < surfaces.size(); i++)
    if (!surfaces[i].empty() && surfaces[i] == surface) return static_cast<int>(i);
  return lookup_value(value);
}

std::optional<int> QuantitySurfaceMap::lookup_value(const Rational& value) const {
  for (size_t i = 0; i < values.size(); i++)
    if (values[i] == value) return static_cast<int>(i);
  return std::nullopt;
}

bool QuantitySurfaceMap::is_pi_surface(const std::string& surface) const {
  for (auto& s : pi_surfaces)
    if (s == surface) return true;
  return false;
}

namespace {

struct Token {
  enum class Kind { Number, Placeholder, Pi, Op, LParen, RParen, End };
  Kind kind;
  Rational number;
  std::string surface;
  int placeholder = -1;
  char op = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, const QuantitySurfaceMap& qmap) : s_(text), qmap_(qmap) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) pos_++;
    if (pos_ >= s_.size()) {
      tok_ = Token{Token::Kind::End, {}, "", -1, 0};
      return;
    }
    char c = s_[pos_];
    if (c == '^') throw UnsupportedOperatorError("unsupported operator '^'");
    if (c == '*' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*')
      throw UnsupportedOperatorError("unsupported operator '**'");
    if (c == '+' || c == '-' || c == '*' || c == '/') {
      pos_++;
      tok_ = Token{Token::Kind::Op, {}, std::string(1, c), -1, c};
      return;
    }
    if (c == '(') {
      pos_++;
      tok_ = Token{Token::Kind::LParen, {}, "(", -1, 0};
      return;
    }
    if (c == ')') {
      pos_++;
      tok_ = Token{Token::Kind::RParen, {}, ")", -1, 0};
      return;
    }
    if (c == 'N' || c == 'n') {
      size_t j = pos_ + 1;
      std::string digits;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) digits += s_[j++];
      if (!digits.empty()) {
        int idx = std::stoi(digits);
        if (c == 'n') idx -= 1;  // n1 is the first quantity
        if (idx < 0) throw ParseError("bad placeholder index in '" + s_ + "'");
        pos_ = j;
        tok_ = Token{Token::Kind::Placeholder, {}, std::string(1, c) + digits, idx, 0};
        return;
      }
    }
    if (s_.compare(pos_, 2, "pi") == 0 || s_.compare(pos_, 2, "PI") == 0) {
      pos_ += 2;
      tok_ = Token{Token::Kind::Pi, {}, "pi", -1, 0};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      size_t j = pos_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) j++;
      if (j < s_.size() && s_[j] == '.') {
        j++;
        while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) j++;
      } else if (j < s_.size() && s_[j] == '/') {
        // fuse "a/b" into one literal only when it names a mapped quantity
        size_t k = j + 1;
        size_t dstart = k;
        while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) k++;
        if (k > dstart) {
          std::string frac = s_.substr(start, k - start);
          auto val = try_parse_rational(frac);
          if (val && qmap_.lookup(frac, *val)) {
            pos_ = k;
            tok_ = Token{Token::Kind::Number, *val, frac, -1, 0};
            return;
          }
        }
      }
      std::string lit = s_.substr(start, j - start);
      pos_ = j;
      tok_ = Token{Token::Kind::Number, parse_rational(lit), lit, -1, 0};
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' in equation");
  }

  const std::string& s_;
  const QuantitySurfaceMap& qmap_;
  size_t pos_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const QuantitySurfaceMap& qmap) : lex_(text, qmap), qmap_(qmap) {}

  BinaryExprPtr parse() {
    auto e = expr();
    if (lex_.peek().kind != Token::Kind::End) throw ParseError("trailing input in equation");
    return e;
  }

 private:
  BinaryExprPtr expr() {
    auto e = term();
    while (lex_.peek().kind == Token::Kind::Op && (lex_.peek().op == '+' || lex_.peek().op == '-')) {
      char op = lex_.next().op;
      e = BinaryExpr::binary(op == '+' ? BinOp::Add : BinOp::Sub, e, term());
    }
    return e;
  }

  BinaryExprPtr term() {
    auto e = factor();
    while (lex_.peek().kind == Token::Kind::Op && (lex_.peek().op == '*' || lex_.peek().op == '/')) {
      char op = lex_.next().op;
      e = BinaryExpr::binary(op == '*' ? BinOp::Mul : BinOp::Div, e, factor());
    }
    return e;
  }

  BinaryExprPtr factor() {
    Token t = lex_.next();
    switch (t.kind) {
      case Token::Kind::Number: {
        if (auto idx = qmap_.lookup(t.surface, t.number)) return BinaryExpr::quantity(*idx);
        if (qmap_.is_pi_surface(t.surface)) return BinaryExpr::pi();
        return BinaryExpr::constant(t.number);
      }
      case Token::Kind::Placeholder:
        return BinaryExpr::quantity(t.placeholder);
      case Token::Kind::Pi:
        return BinaryExpr::pi();
      case Token::Kind::LParen: {
        auto e = expr();
        if (lex_.next().kind != Token::Kind::RParen) throw ParseError("missing ')'");
        return e;
      }
      case Token::Kind::Op:
        throw ParseError(std::string("unexpected operator '") + t.op + "' (unary operators are not supported)");
      default:
        throw ParseError("unexpected end of equation");
    }
  }

  Lexer lex_;
  const QuantitySurfaceMap& qmap_;
};

}  // namespace

BinaryExprPtr parse_infix(const std::string& text, const QuantitySurfaceMap& qmap) {
  return Parser(text, qmap).parse();
}

namespace {

BinaryExprPtr parse_prefix_rec(const std::vector<std::string>& toks, size_t& pos) {
  if (pos >= toks.size()) throw ParseError("truncated prefix token sequence");
  const std::string& t = toks[pos++];
  if (t == "+" || t == "-" || t == "*" || t == "/") {
    BinOp op = t == "+" ? BinOp::Add : t == "-" ? BinOp::Sub : t == "*" ? BinOp::Mul : BinOp::Div;
    auto l = parse_prefix_rec(toks, pos);
    auto r = parse_prefix_rec(toks, pos);
    return BinaryExpr::binary(op, l, r);
  }
  if (t == "^" || t == "**") throw UnsupportedOperatorError("unsupported operator '" + t + "'");
  if (t == "pi" || t == "PI") return BinaryExpr::pi();
  if ((t[0] == 'N' || t[0] == 'n') && t.size() > 1) {
    int idx = std::stoi(t.substr(1));
    if (t[0] == 'n') idx -= 1;
    if (idx < 0) throw ParseError("bad placeholder token '" + t + "'");
    return BinaryExpr::quantity(idx);
  }
  return BinaryExpr::constant(parse_rational(t));
}

}  // namespace

BinaryExprPtr parse_prefix_tokens(const std::vector<std::string>& tokens) {
  size_t pos = 0;
  auto e = parse_prefix_rec(tokens, pos);
  if (pos != tokens.size()) throw ParseError("trailing prefix tokens");
  return e;
}

namespace {

int precedence(BinOp op) { return op == BinOp::Add || op == BinOp::Sub ? 1 : 2; }

void print_rec(const BinaryExprPtr& e, std::string& out, int required_prec) {
  switch (e->kind) {
    case BinaryExpr::Kind::Quantity:
      out += "N" + std::to_string(e->index);
      return;
    case BinaryExpr::Kind::Constant: {
      std::string s = rational_to_string(e->value);
      bool needs = s.find('/') != std::string::npos || s.find('-') != std::string::npos;
      if (needs) out += "(";
      out += s;
      if (needs) out += ")";
      return;
    }
    case BinaryExpr::Kind::Pi:
      out += "pi";
      return;
    case BinaryExpr::Kind::Binary: {
      int prec = precedence(e->op);
      bool needs = prec < required_prec;
      if (needs) out += "(";
      print_rec(e->left, out, prec);
      out += op_char(e->op);
      print_rec(e->right, out, prec + (e->op == BinOp::Sub || e->op == BinOp::Div ? 1 : 0));
      if (needs) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_binary_infix(const BinaryExprPtr& e) {
  std::string out;
  print_rec(e, out, 0);
  return out;
}

bool references_out_of_range(const BinaryExprPtr& e, int quantity_count) {
  if (e->kind == BinaryExpr::Kind::Quantity) return e->index >= quantity_count;
  if (e->kind != BinaryExpr::Kind::Binary) return false;
  return references_out_of_range(e->left, quantity_count) || references_out_of_range(e->right, quantity_count);
}

}  // namespace comsearch
