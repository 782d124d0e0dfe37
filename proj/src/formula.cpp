#include "knowctl/formula.hpp"

#include <algorithm>
#include <cctype>

#include "knowctl/error.hpp"

namespace knowctl {

namespace {

FormulaPtr make(FormulaKind kind, std::size_t index = 0) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->index = index;
  return f;
}

FormulaPtr make_binary(FormulaKind kind, FormulaPtr a, FormulaPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

std::optional<std::size_t> find_name(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

class Parser {
 public:
  Parser(std::string_view text, const Symbols& symbols) : text_(text), symbols_(symbols) {}

  FormulaPtr parse() {
    auto f = implication(0);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  // modal_depth counts enclosing knowledge operators; Kp is rejected below one.
  FormulaPtr implication(int modal_depth) {
    auto lhs = disjunction(modal_depth);
    skip_space();
    if (consume("->")) {
      auto rhs = implication(modal_depth);
      return Formula::implication(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  FormulaPtr disjunction(int modal_depth) {
    auto lhs = conjunction(modal_depth);
    for (;;) {
      skip_space();
      if (peek() == '|') {
        ++pos_;
        lhs = Formula::disjunction(std::move(lhs), conjunction(modal_depth));
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr conjunction(int modal_depth) {
    auto lhs = unary(modal_depth);
    for (;;) {
      skip_space();
      if (peek() == '&') {
        ++pos_;
        lhs = Formula::conjunction(std::move(lhs), unary(modal_depth));
      } else {
        return lhs;
      }
    }
  }

  FormulaPtr unary(int modal_depth) {
    skip_space();
    if (peek() == '!') {
      ++pos_;
      return Formula::negation(unary(modal_depth));
    }
    if (peek() == '(') {
      ++pos_;
      auto inner = implication(modal_depth);
      expect(')');
      return inner;
    }
    const std::size_t start = pos_;
    const std::string word = identifier();
    if (word.empty()) fail("expected a formula");
    if (word == "Kw" || word == "Ks" || word == "Kp") {
      skip_space();
      if (peek() != '[') fail("expected '[' after " + word);
      const FormulaKind modality = word == "Kw"   ? FormulaKind::KnowWeak
                                   : word == "Ks" ? FormulaKind::KnowStrong
                                                  : FormulaKind::KnowPast;
      if (modality == FormulaKind::KnowPast && modal_depth > 0)
        throw Error(ErrorKind::InnerKp,
                    "Kp at offset " + std::to_string(start) +
                        " is nested inside another knowledge operator; past knowledge is outermost only");
      const ProcessSet observers = process_list();
      if (modality == FormulaKind::KnowPast && observers.count() != 1)
        fail("Kp takes exactly one process");
      auto body = unary(modal_depth + 1);
      return Formula::knows(modality, observers, std::move(body));
    }
    if (word == "true") return Formula::constant(true);
    if (word == "false") return Formula::constant(false);
    if (word == "df") return Formula::deadfree();
    if (word == "en" || word == "good") {
      expect('(');
      skip_space();
      const std::string name = identifier();
      auto t = symbols_.transition(name);
      if (!t) throw Error(ErrorKind::UnknownTransition, "unknown transition '" + name + "' in formula");
      expect(')');
      return word == "en" ? Formula::enabled(*t) : Formula::good(*t);
    }
    auto p = symbols_.place(word);
    if (!p) throw Error(ErrorKind::UnknownPlace, "unknown place '" + word + "' in formula");
    return Formula::place(*p);
  }

  ProcessSet process_list() {
    expect('[');
    ProcessSet out;
    for (;;) {
      skip_space();
      const std::string name = identifier();
      if (name.empty()) fail("expected a process name");
      auto pi = symbols_.process(name);
      if (!pi) throw Error(ErrorKind::UnknownProcess, "unknown process '" + name + "' in formula");
      out.set(*pi);
      skip_space();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }

  std::string identifier() {
    std::size_t end = pos_;
    if (end < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      ++end;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
    }
    std::string out(text_.substr(pos_, end - pos_));
    pos_ = end;
    return out;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[nodiscard]] char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Syntax, what + " at offset " + std::to_string(pos_) + " in \"" +
                                       std::string(text_) + "\"");
  }

  std::string_view text_;
  const Symbols& symbols_;
  std::size_t pos_ = 0;
};

int precedence(FormulaKind kind) {
  switch (kind) {
    case FormulaKind::Implies: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    default: return 4;
  }
}

void print(const Formula& f, const Symbols& sym, std::string& out);

void print_operand(const Formula& f, int parent, bool allow_equal, const Symbols& sym, std::string& out) {
  const int p = precedence(f.kind);
  const bool parens = p < parent || (p == parent && !allow_equal);
  if (parens) out += '(';
  print(f, sym, out);
  if (parens) out += ')';
}

void print(const Formula& f, const Symbols& sym, std::string& out) {
  switch (f.kind) {
    case FormulaKind::True: out += "true"; return;
    case FormulaKind::False: out += "false"; return;
    case FormulaKind::Place: out += sym.places.at(f.index); return;
    case FormulaKind::Enabled: out += "en(" + sym.transitions.at(f.index) + ")"; return;
    case FormulaKind::Good: out += "good(" + sym.transitions.at(f.index) + ")"; return;
    case FormulaKind::Deadfree: out += "df"; return;
    case FormulaKind::Not:
      out += '!';
      print_operand(*f.lhs, 4, true, sym, out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      const int p = precedence(f.kind);
      print_operand(*f.lhs, p, true, sym, out);
      out += f.kind == FormulaKind::And ? " & " : " | ";
      print_operand(*f.rhs, p, false, sym, out);
      return;
    }
    case FormulaKind::Implies:
      print_operand(*f.lhs, 1, false, sym, out);
      out += " -> ";
      print_operand(*f.rhs, 1, true, sym, out);
      return;
    case FormulaKind::KnowWeak:
    case FormulaKind::KnowStrong:
    case FormulaKind::KnowPast: {
      out += f.kind == FormulaKind::KnowWeak ? "Kw[" : f.kind == FormulaKind::KnowStrong ? "Ks[" : "Kp[";
      bool first = true;
      f.observers.for_each([&](std::size_t pi) {
        if (!first) out += ',';
        first = false;
        out += sym.processes.at(pi);
      });
      out += "] ";
      print_operand(*f.lhs, 4, true, sym, out);
      return;
    }
  }
}

}  // namespace

FormulaPtr Formula::constant(bool value) { return make(value ? FormulaKind::True : FormulaKind::False); }
FormulaPtr Formula::place(std::size_t p) { return make(FormulaKind::Place, p); }
FormulaPtr Formula::enabled(std::size_t t) { return make(FormulaKind::Enabled, t); }
FormulaPtr Formula::good(std::size_t t) { return make(FormulaKind::Good, t); }
FormulaPtr Formula::deadfree() { return make(FormulaKind::Deadfree); }

FormulaPtr Formula::negation(FormulaPtr f) {
  auto out = std::make_shared<Formula>();
  out->kind = FormulaKind::Not;
  out->lhs = std::move(f);
  return out;
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b) {
  return make_binary(FormulaKind::And, std::move(a), std::move(b));
}
FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b) {
  return make_binary(FormulaKind::Or, std::move(a), std::move(b));
}
FormulaPtr Formula::implication(FormulaPtr a, FormulaPtr b) {
  return make_binary(FormulaKind::Implies, std::move(a), std::move(b));
}

FormulaPtr Formula::knows(FormulaKind modality, ProcessSet observers, FormulaPtr f) {
  if (!is_modality(modality)) throw Error(ErrorKind::MalformedFormula, "not a knowledge modality");
  if (observers.empty()) throw Error(ErrorKind::MalformedFormula, "knowledge needs at least one observer");
  if (modality == FormulaKind::KnowPast && observers.count() != 1)
    throw Error(ErrorKind::MalformedFormula, "past knowledge takes exactly one process");
  if (contains_past(*f)) throw Error(ErrorKind::InnerKp, "past knowledge nested inside a knowledge operator");
  auto out = std::make_shared<Formula>();
  out->kind = modality;
  out->observers = observers;
  out->lhs = std::move(f);
  return out;
}

FormulaPtr Formula::any_of(const std::vector<FormulaPtr>& operands) {
  if (operands.empty()) return constant(false);
  FormulaPtr acc = operands.front();
  for (std::size_t i = 1; i < operands.size(); ++i) acc = disjunction(acc, operands[i]);
  return acc;
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a.kind != b.kind || a.index != b.index || !(a.observers == b.observers)) return false;
  if ((a.lhs == nullptr) != (b.lhs == nullptr) || (a.rhs == nullptr) != (b.rhs == nullptr)) return false;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

bool is_modality(FormulaKind kind) {
  return kind == FormulaKind::KnowWeak || kind == FormulaKind::KnowStrong || kind == FormulaKind::KnowPast;
}

bool contains_past(const Formula& f) {
  if (f.kind == FormulaKind::KnowPast) return true;
  return (f.lhs && contains_past(*f.lhs)) || (f.rhs && contains_past(*f.rhs));
}

bool contains_modality(const Formula& f) {
  if (is_modality(f.kind)) return true;
  return (f.lhs && contains_modality(*f.lhs)) || (f.rhs && contains_modality(*f.rhs));
}

bool is_state_predicate(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Place:
      return true;
    case FormulaKind::Not:
      return is_state_predicate(*f.lhs);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return is_state_predicate(*f.lhs) && is_state_predicate(*f.rhs);
    default:
      return false;
  }
}

std::optional<std::size_t> Symbols::place(std::string_view name) const { return find_name(places, name); }
std::optional<std::size_t> Symbols::transition(std::string_view name) const {
  return find_name(transitions, name);
}
std::optional<std::size_t> Symbols::process(std::string_view name) const { return find_name(processes, name); }

FormulaPtr parse_formula(std::string_view text, const Symbols& symbols) {
  return Parser(text, symbols).parse();
}

std::string to_string(const Formula& f, const Symbols& symbols) {
  std::string out;
  print(f, symbols, out);
  return out;
}

}  // namespace knowctl
