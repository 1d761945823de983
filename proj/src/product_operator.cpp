#include "dnp/product_operator.hpp"

#include <cctype>
#include <stdexcept>

namespace dnp {

namespace {

class Parser {
 public:
  Parser(const std::string& s, int n_electrons) : s_(s), ne_(n_electrons), n_(n_electrons + 1) {}

  Operator parse() {
    const int d = hilbert_dim(n_);
    Operator total = Operator::Zero(d, d);
    skip();
    if (at_end()) fail("empty expression");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      total += sign * term();
      first = false;
      skip();
    }
    return total;
  }

 private:
  Operator term() {
    double coef = 1.0;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      const std::size_t start = pos_;
      while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
      try {
        coef = std::stod(s_.substr(start, pos_ - start));
      } catch (const std::exception&) {
        fail("bad coefficient");
      }
      skip();
    }
    Operator out = identity_operator(n_);
    int factors = 0;
    while (!at_end() && (peek() == 'E' || peek() == 'N' || peek() == 'I')) {
      out = out * factor();
      ++factors;
      skip();
    }
    if (factors == 0) fail("expected an operator factor");
    return coef * out;
  }

  Operator factor() {
    const char kind = s_[pos_++];
    if (kind == 'I') return identity_operator(n_);
    if (at_end()) fail("missing axis");
    const Axis axis = parse_axis(s_[pos_++]);
    if (kind == 'N') return single_spin_operator(n_, {ne_, SpinKind::Nucleus}, axis);
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("electron index required");
    const int k = peek() - '0';
    ++pos_;
    if (k < 1 || k > ne_) fail("electron index out of range");
    return single_spin_operator(n_, {k - 1, SpinKind::Electron}, axis);
  }

  Axis parse_axis(char c) {
    switch (c) {
      case 'x': return Axis::X;
      case 'y': return Axis::Y;
      case 'z': return Axis::Z;
      case '+': return Axis::Plus;
      case '-': return Axis::Minus;
      default: fail("unknown axis"); return Axis::Z;
    }
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("product operator '" + s_ + "' at position " + std::to_string(pos_) + ": " + why);
  }

  const std::string& s_;
  int ne_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Operator parse_product_operator(const std::string& expr, int n_electrons) {
  if (n_electrons < 1 || n_electrons > 2) throw std::invalid_argument("n_electrons must be 1 or 2");
  return Parser(expr, n_electrons).parse();
}

}  // namespace dnp
