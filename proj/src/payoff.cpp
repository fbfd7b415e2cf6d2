#include "superhedge/payoff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "superhedge/error.hpp"

namespace superhedge {

namespace payoff_detail {

enum class Op { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Max, Min, Abs, Pos, Sqrt, Exp, Log, Ind };
enum class Cmp { Le, Lt, Ge, Gt, Eq };

struct Node {
  Op op = Op::Num;
  double value = 0.0;      // Num literal or Pow exponent
  std::size_t var = 0;     // Var index
  Cmp cmp = Cmp::Le;       // Ind
  bool guarded = false;    // Sqrt clamps; Mul short-circuits on its Ind factor
  std::vector<std::shared_ptr<Node>> kids;
};

}  // namespace payoff_detail

namespace {

using payoff_detail::Cmp;
using payoff_detail::Node;
using payoff_detail::Op;
using NodePtr = std::shared_ptr<Node>;

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::Le: return "<=";
    case Cmp::Lt: return "<";
    case Cmp::Ge: return ">=";
    case Cmp::Gt: return ">";
    case Cmp::Eq: return "==";
  }
  return "?";
}

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print(const Node& n, const std::vector<std::string>& names, std::ostream& os, int min_prec);

void print_child(const Node& n, const std::vector<std::string>& names, std::ostream& os, int min_prec) {
  if (precedence(n) < min_prec) {
    os << '(';
    print(n, names, os, 0);
    os << ')';
  } else {
    print(n, names, os, min_prec);
  }
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Max: return "max";
    case Op::Min: return "min";
    case Op::Abs: return "abs";
    case Op::Pos: return "pos";
    case Op::Sqrt: return "sqrt";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Ind: return "ind";
    default: return "";
  }
}

void print(const Node& n, const std::vector<std::string>& names, std::ostream& os, int /*min_prec*/) {
  switch (n.op) {
    case Op::Num: os << format_number(n.value); break;
    case Op::Var: os << names[n.var]; break;
    case Op::Neg:
      os << '-';
      print_child(*n.kids[0], names, os, 3);
      break;
    case Op::Add:
    case Op::Sub:
      print_child(*n.kids[0], names, os, 1);
      os << (n.op == Op::Add ? " + " : " - ");
      print_child(*n.kids[1], names, os, 2);
      break;
    case Op::Mul:
    case Op::Div:
      print_child(*n.kids[0], names, os, 2);
      os << (n.op == Op::Mul ? "*" : "/");
      print_child(*n.kids[1], names, os, 3);
      break;
    case Op::Pow:
      print_child(*n.kids[0], names, os, 5);
      os << '^' << format_number(n.value);
      break;
    case Op::Ind:
      os << "ind(";
      print(*n.kids[0], names, os, 0);
      os << ' ' << cmp_text(n.cmp) << ' ';
      print(*n.kids[1], names, os, 0);
      os << ')';
      break;
    default:
      os << func_name(n.op) << '(';
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        if (i) os << ", ";
        print(*n.kids[i], names, os, 0);
      }
      os << ')';
      break;
  }
}

std::string node_text(const Node& n, const std::vector<std::string>& names) {
  std::ostringstream os;
  print(n, names, os, 0);
  return os.str();
}

std::vector<std::string> variable_names(std::size_t dim, std::size_t periods) {
  std::vector<std::string> names;
  for (std::size_t t = 1; t <= periods; ++t) {
    for (std::size_t j = 1; j <= dim; ++j) {
      if (periods == 1) names.push_back(dim == 1 ? "r" : "r" + std::to_string(j));
      else if (dim == 1) names.push_back("x" + std::to_string(t));
      else names.push_back("x" + std::to_string(t) + "_" + std::to_string(j));
    }
  }
  return names;
}

struct Token {
  enum Kind { Num, Ident, Sym, End } kind = End;
  std::string text;
  double value = 0.0;
  std::size_t pos = 0;
};

class Parser {
 public:
  Parser(const std::string& text, std::size_t dim, std::size_t periods)
      : text_(text), dim_(dim), periods_(periods), names_(variable_names(dim, periods)) {
    tokenize();
  }

  NodePtr parse() {
    auto root = expr();
    if (peek().kind != Token::End) error("unexpected '" + peek().text + "'", peek().pos);
    return root;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  [[noreturn]] void error(const std::string& msg, std::size_t pos) const {
    fail(ErrorKind::ParseError, "payoff syntax error at position " + std::to_string(pos) + ": " + msg + " in '" +
                                    text_ + "'");
  }

  void tokenize() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char ch = text_[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      Token t;
      t.pos = i;
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        std::size_t j = i;
        while (j < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '.')) ++j;
        if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
          if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
            while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
            j = k;
          }
        }
        t.kind = Token::Num;
        t.text = text_.substr(i, j - i);
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) error("bad number '" + t.text + "'", i);
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t j = i;
        while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) ++j;
        t.kind = Token::Ident;
        t.text = text_.substr(i, j - i);
        i = j;
      } else {
        t.kind = Token::Sym;
        const std::string two = text_.substr(i, 2);
        if (two == "<=" || two == ">=" || two == "==") {
          t.text = two;
          i += 2;
        } else if (std::string("+-*/^(),|<>").find(ch) != std::string::npos) {
          t.text = std::string(1, ch);
          ++i;
        } else {
          error(std::string("unexpected character '") + ch + "'", i);
        }
      }
      tokens_.push_back(t);
    }
    Token end;
    end.pos = text_.size();
    end.text = "end of input";
    tokens_.push_back(end);
  }

  const Token& peek() const { return tokens_[pos_]; }
  Token next() { return tokens_[pos_++]; }
  bool accept(const char* sym) {
    if (peek().kind == Token::Sym && peek().text == sym) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* sym) {
    if (!accept(sym)) error(std::string("expected '") + sym + "' but found '" + peek().text + "'", peek().pos);
  }

  static NodePtr make(Op op, std::vector<NodePtr> kids = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    while (true) {
      if (accept("+")) lhs = make(Op::Add, {lhs, term()});
      else if (accept("-")) lhs = make(Op::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    while (true) {
      if (accept("*")) lhs = make(Op::Mul, {lhs, unary()});
      else if (accept("/")) lhs = make(Op::Div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept("-")) return make(Op::Neg, {unary()});
    if (accept("+")) return unary();
    return factor();
  }

  NodePtr factor() {
    auto base = atom();
    if (accept("^")) {
      if (peek().kind != Token::Num) error("exponent must be a number", peek().pos);
      auto n = make(Op::Pow, {base});
      n->value = next().value;
      return n;
    }
    return base;
  }

  NodePtr atom() {
    const Token t = next();
    if (t.kind == Token::Num) {
      auto n = make(Op::Num);
      n->value = t.value;
      return n;
    }
    if (t.kind == Token::Sym && t.text == "(") {
      auto inner = expr();
      expect(")");
      return inner;
    }
    if (t.kind == Token::Sym && t.text == "|") {
      auto inner = expr();
      expect("|");
      return make(Op::Abs, {inner});
    }
    if (t.kind == Token::Ident) {
      if (peek().kind == Token::Sym && peek().text == "(") return call(t);
      const auto it = std::find(names_.begin(), names_.end(), t.text);
      std::size_t idx = static_cast<std::size_t>(it - names_.begin());
      // x1 is an alias of r in the one-period scalar case.
      if (it == names_.end() && periods_ == 1 && dim_ == 1 && t.text == "x1") idx = 0;
      else if (it == names_.end()) {
        fail(ErrorKind::ParseError, "unknown identifier '" + t.text + "' at position " + std::to_string(t.pos) +
                                        " (dimension " + std::to_string(dim_) + ", periods " +
                                        std::to_string(periods_) + ")");
      }
      auto n = make(Op::Var);
      n->var = idx;
      return n;
    }
    error("unexpected '" + t.text + "'", t.pos);
  }

  NodePtr call(const Token& name) {
    static const std::vector<std::pair<std::string, Op>> funcs = {
        {"max", Op::Max}, {"min", Op::Min},   {"abs", Op::Abs}, {"pos", Op::Pos},
        {"sqrt", Op::Sqrt}, {"exp", Op::Exp}, {"log", Op::Log}, {"ind", Op::Ind}};
    const auto it = std::find_if(funcs.begin(), funcs.end(), [&](const auto& f) { return f.first == name.text; });
    if (it == funcs.end()) {
      fail(ErrorKind::ParseError, "unknown function '" + name.text + "' at position " + std::to_string(name.pos));
    }
    expect("(");
    if (it->second == Op::Ind) {
      auto lhs = expr();
      const Token c = next();
      Cmp cmp;
      if (c.kind != Token::Sym) error("ind() needs a comparison", c.pos);
      if (c.text == "<=") cmp = Cmp::Le;
      else if (c.text == "<") cmp = Cmp::Lt;
      else if (c.text == ">=") cmp = Cmp::Ge;
      else if (c.text == ">") cmp = Cmp::Gt;
      else if (c.text == "==") cmp = Cmp::Eq;
      else error("ind() needs a comparison", c.pos);
      auto rhs = expr();
      expect(")");
      auto n = make(Op::Ind, {lhs, rhs});
      n->cmp = cmp;
      return n;
    }
    std::vector<NodePtr> args{expr()};
    while (accept(",")) args.push_back(expr());
    expect(")");
    const bool variadic = it->second == Op::Max || it->second == Op::Min;
    if ((variadic && args.size() < 2) || (!variadic && args.size() != 1)) {
      fail(ErrorKind::ParseError, "arity error: " + name.text + "() takes " + (variadic ? "two or more" : "one") +
                                      " argument(s), got " + std::to_string(args.size()));
    }
    return make(it->second, std::move(args));
  }

  const std::string& text_;
  std::size_t dim_, periods_;
  std::vector<std::string> names_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void mark_sqrt(Node& n, std::vector<std::string>& warnings, const std::vector<std::string>& names) {
  if (n.op == Op::Sqrt && !n.guarded) {
    n.guarded = true;
    warnings.push_back("'" + node_text(n, names) + "' is guarded by an indicator; negative radicands clamp to 0");
  }
  for (auto& k : n.kids) mark_sqrt(*k, warnings, names);
}

void mark_guards(Node& n, std::vector<std::string>& warnings, const std::vector<std::string>& names) {
  for (auto& k : n.kids) mark_guards(*k, warnings, names);
  if (n.op != Op::Mul) return;
  const bool left = n.kids[0]->op == Op::Ind;
  const bool right = n.kids[1]->op == Op::Ind;
  if (!left && !right) return;
  n.guarded = true;
  mark_sqrt(*n.kids[left ? 1 : 0], warnings, names);
}

struct Evaluator {
  std::span<const double> x;
  const std::vector<std::string>& names;

  [[noreturn]] void bad(const Node& n, const std::string& what) const {
    fail(ErrorKind::EvalError, what + " in '" + node_text(n, names) + "'");
  }

  double operator()(const Node& n) const {
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::Var: return x[n.var];
      case Op::Neg: return -(*this)(*n.kids[0]);
      case Op::Add: return (*this)(*n.kids[0]) + (*this)(*n.kids[1]);
      case Op::Sub: return (*this)(*n.kids[0]) - (*this)(*n.kids[1]);
      case Op::Mul: {
        if (n.guarded) {
          const bool left_ind = n.kids[0]->op == Op::Ind;
          const double ind = (*this)(*n.kids[left_ind ? 0 : 1]);
          if (ind == 0.0) return 0.0;
          return ind * (*this)(*n.kids[left_ind ? 1 : 0]);
        }
        return (*this)(*n.kids[0]) * (*this)(*n.kids[1]);
      }
      case Op::Div: {
        const double den = (*this)(*n.kids[1]);
        if (den == 0.0) bad(n, "division by zero");
        return (*this)(*n.kids[0]) / den;
      }
      case Op::Pow: {
        const double b = (*this)(*n.kids[0]);
        const double v = std::pow(b, n.value);
        if (!std::isfinite(v)) bad(n, "non-finite power");
        return v;
      }
      case Op::Max: {
        double v = (*this)(*n.kids[0]);
        for (std::size_t i = 1; i < n.kids.size(); ++i) v = std::max(v, (*this)(*n.kids[i]));
        return v;
      }
      case Op::Min: {
        double v = (*this)(*n.kids[0]);
        for (std::size_t i = 1; i < n.kids.size(); ++i) v = std::min(v, (*this)(*n.kids[i]));
        return v;
      }
      case Op::Abs: return std::abs((*this)(*n.kids[0]));
      case Op::Pos: return std::max((*this)(*n.kids[0]), 0.0);
      case Op::Sqrt: {
        const double v = (*this)(*n.kids[0]);
        if (v < 0.0) {
          if (n.guarded) return 0.0;
          bad(n, "square root of a negative value");
        }
        return std::sqrt(v);
      }
      case Op::Exp: {
        const double v = std::exp((*this)(*n.kids[0]));
        if (!std::isfinite(v)) bad(n, "exponential overflow");
        return v;
      }
      case Op::Log: {
        const double v = (*this)(*n.kids[0]);
        if (!(v > 0.0)) bad(n, "logarithm of a non-positive value");
        return std::log(v);
      }
      case Op::Ind: {
        const double a = (*this)(*n.kids[0]);
        const double b = (*this)(*n.kids[1]);
        bool r = false;
        switch (n.cmp) {
          case Cmp::Le: r = a <= b; break;
          case Cmp::Lt: r = a < b; break;
          case Cmp::Ge: r = a >= b; break;
          case Cmp::Gt: r = a > b; break;
          case Cmp::Eq: r = a == b; break;
        }
        return r ? 1.0 : 0.0;
      }
    }
    return 0.0;
  }
};

bool is_constant(const Node& n) {
  if (n.op == Op::Var) return false;
  return std::all_of(n.kids.begin(), n.kids.end(), [](const auto& k) { return is_constant(*k); });
}

double constant_value(const Node& n) {
  static const std::vector<std::string> none;
  return Evaluator{{}, none}(n);
}

std::optional<double> lipschitz(const Node& n) {
  if (is_constant(n)) return 0.0;
  switch (n.op) {
    case Op::Var: return 1.0;
    case Op::Neg:
    case Op::Abs:
    case Op::Pos: return lipschitz(*n.kids[0]);
    case Op::Add:
    case Op::Sub: {
      auto a = lipschitz(*n.kids[0]);
      auto b = lipschitz(*n.kids[1]);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Op::Max:
    case Op::Min: {
      double best = 0.0;
      for (const auto& k : n.kids) {
        auto l = lipschitz(*k);
        if (!l) return std::nullopt;
        best = std::max(best, *l);
      }
      return best;
    }
    case Op::Mul: {
      const bool lc = is_constant(*n.kids[0]);
      const bool rc = is_constant(*n.kids[1]);
      if (!lc && !rc) return std::nullopt;
      const double c = constant_value(*n.kids[lc ? 0 : 1]);
      auto l = lipschitz(*n.kids[lc ? 1 : 0]);
      if (!l) return std::nullopt;
      return std::abs(c) * *l;
    }
    case Op::Div: {
      if (!is_constant(*n.kids[1])) return std::nullopt;
      const double c = constant_value(*n.kids[1]);
      auto l = lipschitz(*n.kids[0]);
      if (!l) return std::nullopt;
      return *l / std::abs(c);
    }
    case Op::Pow:
      if (n.value == 1.0) return lipschitz(*n.kids[0]);
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace

PayoffExpr PayoffExpr::parse(const std::string& text, std::size_t dim, std::size_t periods) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) fail(ErrorKind::ParseError, "payoff text is empty");
  if (dim < 1 || periods < 1) fail(ErrorKind::ParameterError, "payoff needs dim >= 1 and periods >= 1");
  Parser parser(text, dim, periods);
  NodePtr root = parser.parse();
  PayoffExpr e;
  mark_guards(*root, e.warnings_, parser.names());
  e.root_ = root;
  e.source_ = text;
  e.dim_ = dim;
  e.periods_ = periods;
  return e;
}

double PayoffExpr::eval(std::span<const double> point) const {
  if (!root_) fail(ErrorKind::EvalError, "empty payoff");
  if (point.size() != arity()) {
    fail(ErrorKind::ShapeError, "payoff expects " + std::to_string(arity()) + " inputs, got " +
                                    std::to_string(point.size()));
  }
  static thread_local std::vector<std::string> names_cache;
  static thread_local std::pair<std::size_t, std::size_t> names_key{0, 0};
  if (names_key != std::make_pair(dim_, periods_)) {
    names_cache = variable_names(dim_, periods_);
    names_key = {dim_, periods_};
  }
  return Evaluator{point, names_cache}(*root_);
}

double PayoffExpr::eval_scalar(double r) const { return eval(std::span<const double>(&r, 1)); }

std::string PayoffExpr::to_string() const {
  if (!root_) return {};
  return node_text(*root_, variable_names(dim_, periods_));
}

std::optional<double> PayoffExpr::lipschitz_bound() const {
  if (!root_) return std::nullopt;
  return lipschitz(*root_);
}

std::vector<double> evaluate_on(const PayoffExpr& g, const DiscreteMeasure& mu) {
  std::vector<double> v(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) v[i] = g.eval(mu.atom(i));
  return v;
}

double observed_lipschitz(const PayoffExpr& g, const std::vector<Point>& points) {
  std::vector<double> vals(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) vals[i] = g.eval(points[i]);
  double best = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) dist += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      dist = std::sqrt(dist);
      if (dist > 0.0) best = std::max(best, std::abs(vals[i] - vals[j]) / dist);
    }
  }
  return best;
}

}  // namespace superhedge
