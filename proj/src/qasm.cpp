#include "qtp/qasm.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "qtp/error.hpp"
#include "qtp/io_util.hpp"

namespace qtp {
namespace {

enum class Tok { Ident, Int, Real, String, Symbol, Arrow, End };

struct Token {
  Tok type;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    Token t{Tok::End, "", line_, col_};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.type = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t start = pos_;
      bool real = false;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        real = true;
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        int sl = line_, sc = col_;
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          real = true;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        } else {
          pos_ = save;
          line_ = sl;
          col_ = sc;
        }
      }
      t.type = real ? Tok::Real : Tok::Int;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (c == '"') {
      advance();
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
      if (pos_ >= src_.size() || src_[pos_] != '"') {
        throw ParseError("unterminated string", t.line, t.column);
      }
      t.text = std::string(src_.substr(start, pos_ - start));
      advance();
      t.type = Tok::String;
      return t;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      t.type = Tok::Arrow;
      t.text = "->";
      return t;
    }
    static constexpr std::string_view kSymbols = ";,()[]+-*/^{}";
    if (kSymbols.find(c) != std::string_view::npos) {
      advance();
      t.type = Tok::Symbol;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Register {
  std::string name;
  int offset;
  int size;
};

// A gate argument: a whole register or one element of it.
struct Operand {
  const Register* reg;
  std::optional<int> index;
  int line;
  int column;
};

class Parser {
 public:
  Parser(std::string_view text, std::string name) : lex_(text), name_(std::move(name)) {
    cur_ = lex_.next();
  }

  ParseResult run() {
    if (is_ident("OPENQASM")) {
      next();
      if (cur_.type != Tok::Real && cur_.type != Tok::Int) fail("expected version number");
      if (cur_.text != "2.0" && cur_.text != "2") fail("only OpenQASM 2.0 is supported");
      next();
      expect(";");
    }
    while (cur_.type != Tok::End) statement();
    if (qregs_.empty()) throw ParseError("no qreg declared", cur_.line, cur_.column);
    Circuit c(total_qubits_, name_);
    for (auto& g : gates_) c.add(std::move(g));
    return ParseResult{std::move(c), std::move(warnings_)};
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur_.line, cur_.column); }
  [[noreturn]] void fail_at(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
  }

  void next() { cur_ = lex_.next(); }
  bool is_ident(std::string_view s) const { return cur_.type == Tok::Ident && cur_.text == s; }
  bool is_sym(std::string_view s) const { return cur_.type == Tok::Symbol && cur_.text == s; }

  void expect(std::string_view sym) {
    if (!is_sym(sym)) fail("expected '" + std::string(sym) + "'");
    next();
  }

  std::string expect_ident() {
    if (cur_.type != Tok::Ident) fail("expected identifier");
    std::string s = cur_.text;
    next();
    return s;
  }

  int expect_int() {
    if (cur_.type != Tok::Int) fail("expected integer");
    int v = 0;
    try {
      v = std::stoi(cur_.text);
    } catch (const std::exception&) {
      fail("integer out of range");
    }
    next();
    return v;
  }

  void statement() {
    if (cur_.type != Tok::Ident) fail("expected statement");
    const Token head = cur_;
    if (head.text == "include") {
      next();
      if (cur_.type != Tok::String) fail("expected file name");
      if (cur_.text != "qelib1.inc") fail("only qelib1.inc may be included");
      next();
      expect(";");
    } else if (head.text == "qreg" || head.text == "creg") {
      next();
      const std::string reg = expect_ident();
      expect("[");
      const int size = expect_int();
      if (size <= 0) fail_at("register size must be positive", head.line, head.column);
      expect("]");
      expect(";");
      if (head.text == "qreg") {
        for (const auto& r : qregs_) {
          if (r.name == reg) fail_at("duplicate register " + reg, head.line, head.column);
        }
        qregs_.push_back({reg, total_qubits_, size});
        total_qubits_ += size;
      } else {
        cregs_.push_back({reg, 0, size});
      }
    } else if (head.text == "barrier") {
      next();
      operand_list();
      expect(";");
    } else if (head.text == "measure") {
      next();
      operand();
      if (cur_.type != Tok::Arrow) fail("expected '->'");
      next();
      creg_operand();
      expect(";");
      warnings_.push_back("line " + std::to_string(head.line) + ": measure statement dropped");
    } else if (head.text == "gate" || head.text == "opaque") {
      fail("custom gate definitions are not supported");
    } else if (head.text == "if") {
      fail("classical control is not supported");
    } else if (head.text == "reset") {
      fail("reset is not supported");
    } else {
      gate_call();
    }
  }

  void gate_call() {
    const Token head = cur_;
    const auto kind = gate_from_name(head.text);
    if (!kind) fail("unknown gate '" + head.text + "'");
    next();
    std::vector<double> params;
    if (is_sym("(")) {
      next();
      if (!is_sym(")")) {
        params.push_back(expr());
        while (is_sym(",")) {
          next();
          params.push_back(expr());
        }
      }
      expect(")");
    }
    const auto& info = gate_info(*kind);
    if (static_cast<int>(params.size()) != info.param_count) {
      fail_at("gate " + head.text + " expects " + std::to_string(info.param_count) +
                  " parameter(s)",
              head.line, head.column);
    }
    auto args = operand_list();
    expect(";");
    if (static_cast<int>(args.size()) != info.arity) {
      fail_at("gate " + head.text + " expects " + std::to_string(info.arity) + " qubit(s)",
              head.line, head.column);
    }
    // Register broadcast: every whole-register operand must have the same size.
    int width = 1;
    bool broadcast = false;
    for (const auto& a : args) {
      if (a.index) continue;
      if (broadcast && a.reg->size != width) {
        fail_at("register size mismatch in broadcast", a.line, a.column);
      }
      width = a.reg->size;
      broadcast = true;
    }
    for (int k = 0; k < width; ++k) {
      GateInstance g{*kind, {}, params};
      for (const auto& a : args) g.qubits.push_back(a.reg->offset + (a.index ? *a.index : k));
      for (std::size_t i = 0; i < g.qubits.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          if (g.qubits[i] == g.qubits[j]) {
            fail_at("duplicate qubit in gate " + head.text, head.line, head.column);
          }
        }
      }
      gates_.push_back(std::move(g));
    }
  }

  std::vector<Operand> operand_list() {
    std::vector<Operand> out;
    out.push_back(operand());
    while (is_sym(",")) {
      next();
      out.push_back(operand());
    }
    return out;
  }

  Operand operand() {
    const Token t = cur_;
    const std::string reg = expect_ident();
    const Register* r = nullptr;
    for (const auto& q : qregs_) {
      if (q.name == reg) r = &q;
    }
    if (!r) fail_at("unknown quantum register '" + reg + "'", t.line, t.column);
    Operand op{r, std::nullopt, t.line, t.column};
    if (is_sym("[")) {
      next();
      const Token it = cur_;
      const int idx = expect_int();
      if (idx < 0 || idx >= r->size) {
        fail_at("qubit index " + std::to_string(idx) + " out of range for register " + reg,
                it.line, it.column);
      }
      op.index = idx;
      expect("]");
    }
    return op;
  }

  void creg_operand() {
    const Token t = cur_;
    const std::string reg = expect_ident();
    const Register* r = nullptr;
    for (const auto& c : cregs_) {
      if (c.name == reg) r = &c;
    }
    if (!r) fail_at("unknown classical register '" + reg + "'", t.line, t.column);
    if (is_sym("[")) {
      next();
      const int idx = expect_int();
      if (idx < 0 || idx >= r->size) fail("bit index out of range");
      expect("]");
    }
  }

  // expr := term (('+'|'-') term)*
  double expr() {
    double v = term();
    while (is_sym("+") || is_sym("-")) {
      const bool plus = is_sym("+");
      next();
      const double r = term();
      v = plus ? v + r : v - r;
    }
    return v;
  }

  double term() {
    double v = unary();
    while (is_sym("*") || is_sym("/")) {
      const bool mul = is_sym("*");
      next();
      const double r = unary();
      v = mul ? v * r : v / r;
    }
    return v;
  }

  double unary() {
    if (is_sym("-")) {
      next();
      return -unary();
    }
    if (is_sym("+")) {
      next();
      return unary();
    }
    return power();
  }

  double power() {
    const double base = primary();
    if (is_sym("^")) {
      next();
      return std::pow(base, unary());
    }
    return base;
  }

  double primary() {
    if (cur_.type == Tok::Int || cur_.type == Tok::Real) {
      const double v = std::strtod(cur_.text.c_str(), nullptr);
      next();
      return v;
    }
    if (is_sym("(")) {
      next();
      const double v = expr();
      expect(")");
      return v;
    }
    if (cur_.type == Tok::Ident) {
      const std::string id = cur_.text;
      if (id == "pi") {
        next();
        return std::numbers::pi;
      }
      double (*fn)(double) = nullptr;
      if (id == "sin") fn = [](double x) { return std::sin(x); };
      else if (id == "cos") fn = [](double x) { return std::cos(x); };
      else if (id == "tan") fn = [](double x) { return std::tan(x); };
      else if (id == "exp") fn = [](double x) { return std::exp(x); };
      else if (id == "ln") fn = [](double x) { return std::log(x); };
      else if (id == "sqrt") fn = [](double x) { return std::sqrt(x); };
      if (fn) {
        next();
        expect("(");
        const double v = expr();
        expect(")");
        return fn(v);
      }
      fail("unknown identifier '" + id + "' in expression");
    }
    fail("expected expression");
  }

  Lexer lex_;
  Token cur_;
  std::string name_;
  std::vector<Register> qregs_;
  std::vector<Register> cregs_;
  int total_qubits_ = 0;
  std::vector<GateInstance> gates_;
  std::vector<std::string> warnings_;
};

}  // namespace

ParseResult parse_qasm(std::string_view text, std::string name) {
  return Parser(text, std::move(name)).run();
}

ParseResult read_qasm_file(const std::filesystem::path& path) {
  return parse_qasm(read_text_file(path), path.stem().string());
}

std::string serialize_qasm(const Circuit& c) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << c.num_qubits() << "];\n";
  for (const auto& g : c.ops()) {
    out << gate_name(g.kind);
    if (!g.params.empty()) {
      out << '(';
      for (std::size_t i = 0; i < g.params.size(); ++i) {
        if (i) out << ',';
        out << format_double(g.params[i]);
      }
      out << ')';
    }
    out << ' ';
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      if (i) out << ',';
      out << "q[" << g.qubits[i] << ']';
    }
    out << ";\n";
  }
  return out.str();
}

void write_qasm_file(const std::filesystem::path& path, const Circuit& c) {
  write_text_file(path, serialize_qasm(c));
}

}  // namespace qtp
