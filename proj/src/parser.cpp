#include "sttcbf/parser.hpp"

#include <cctype>
#include <charconv>

namespace sttcbf {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  FormulaPtr run() {
    skip_ws();
    if (pos_ == s_.size()) throw ParseError("empty formula", pos_);
    auto f = implies();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!eat(tok)) fail("expected '" + std::string(tok) + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  // Length of the identifier at pos_ (0 if none). Does not consume.
  std::size_t peek_ident() {
    skip_ws();
    std::size_t n = 0;
    if (pos_ < s_.size() && ident_start(s_[pos_])) {
      n = 1;
      while (pos_ + n < s_.size() && ident_char(s_[pos_ + n])) ++n;
    }
    return n;
  }

  // True if the keyword `kw` sits at pos_ and is followed by '['.
  bool at_bracketed_keyword(std::string_view kw) {
    const std::size_t n = peek_ident();
    if (n != kw.size() || s_.substr(pos_, n) != kw) return false;
    std::size_t p = pos_ + n;
    while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
    return p < s_.size() && s_[p] == '[';
  }

  double number() {
    skip_ws();
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto r = std::from_chars(first, last, v);
    if (r.ec != std::errc()) fail("expected number");
    pos_ = static_cast<std::size_t>(r.ptr - s_.data());
    return v;
  }

  std::pair<double, double> interval() {
    const std::size_t at = pos_;
    expect("[");
    const double a = number();
    expect(",");
    const double b = number();
    expect("]");
    if (a < 0.0 || b < a)
      throw IntervalError("invalid temporal interval [" + std::to_string(a) + "," + std::to_string(b) +
                          "] at position " + std::to_string(at) + ": need 0 <= a <= b");
    return {a, b};
  }

  FormulaPtr implies() {
    auto lhs = disj();
    if (eat("=>")) return make_implies(lhs, implies());
    return lhs;
  }

  FormulaPtr disj() {
    auto f = conj();
    while (eat("|")) f = make_or(f, conj());
    return f;
  }

  FormulaPtr conj() {
    auto f = unary();
    while (eat("&")) f = make_and(f, unary());
    return f;
  }

  FormulaPtr unary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of formula");
    if (s_[pos_] == '!') {
      ++pos_;
      return make_not(unary());
    }
    for (const char* kw : {"F", "G"}) {
      if (at_bracketed_keyword(kw)) {
        ++pos_;
        auto [a, b] = interval();
        auto body = unary();
        return kw[0] == 'F' ? make_eventually(a, b, body) : make_always(a, b, body);
      }
    }
    auto lhs = atom();
    if (at_bracketed_keyword("U")) {
      ++pos_;
      auto [a, b] = interval();
      return make_until(a, b, lhs, atom());
    }
    return lhs;
  }

  FormulaPtr atom() {
    skip_ws();
    if (eat("(")) {
      auto f = implies();
      expect(")");
      return f;
    }
    const std::size_t n = peek_ident();
    if (n == 0) {
      if (pos_ >= s_.size()) fail("unexpected end of formula");
      fail("expected identifier, 'true' or '('");
    }
    std::string id(s_.substr(pos_, n));
    pos_ += n;
    if (id == "true") return make_true();
    return make_pred(std::move(id));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace sttcbf
