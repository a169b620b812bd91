#ifndef COMSEARCH_EXPR_HPP
#define COMSEARCH_EXPR_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "comsearch/rational.hpp"

namespace comsearch {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for ^ and ** so callers can classify the problem (power-operator filter).
struct UnsupportedOperatorError : ParseError {
  using ParseError::ParseError;
};

enum class BinOp { Add, Sub, Mul, Div };

char op_char(BinOp op);

// Surface equation tree: quantity references, constants, pi, binary nodes.
// No unary minus, no exponentiation.
struct BinaryExpr;
using BinaryExprPtr = std::shared_ptr<const BinaryExpr>;

struct BinaryExpr {
  enum class Kind { Quantity, Constant, Pi, Binary };
  Kind kind;
  int index = -1;         // Quantity
  Rational value;         // Constant
  BinOp op = BinOp::Add;  // Binary
  BinaryExprPtr left, right;

  static BinaryExprPtr quantity(int index);
  static BinaryExprPtr constant(Rational value);
  static BinaryExprPtr pi();
  static BinaryExprPtr binary(BinOp op, BinaryExprPtr l, BinaryExprPtr r);
};

// Maps numeric surfaces in an equation string onto quantity indices.
// Lookup is by exact surface first, then by value (first matching index).
struct QuantitySurfaceMap {
  std::vector<std::string> surfaces;  // by index; may be empty
  std::vector<Rational> values;       // by index
  // numeric surfaces to read as the pi symbol when they are not quantities
  // (gold annotations conventionally write pi as 3.14)
  std::vector<std::string> pi_surfaces;

  std::optional<int> lookup(const std::string& surface, const Rational& value) const;
  std::optional<int> lookup_value(const Rational& value) const;
  bool is_pi_surface(const std::string& surface) const;
};

// Standard infix grammar: + - * / with the usual precedence, left associativity,
// parentheses, numeric literals, N0/N1... (0-based) and n1/n2... (1-based)
// placeholders, and "pi". "a/b" over two integer literals is fused into a single
// quantity reference when the combined value matches a mapped quantity; otherwise
// it parses as division. ^ and ** raise UnsupportedOperatorError.
BinaryExprPtr parse_infix(const std::string& text, const QuantitySurfaceMap& qmap);

// Prefix token list ("-", "*", "N0", "N2", "N1") into a tree. Constant tokens are
// rational literals or "pi".
BinaryExprPtr parse_prefix_tokens(const std::vector<std::string>& tokens);

std::string print_binary_infix(const BinaryExprPtr& e);

// True when any node of the tree references a quantity index >= count.
bool references_out_of_range(const BinaryExprPtr& e, int quantity_count);

}  // namespace comsearch

#endif
