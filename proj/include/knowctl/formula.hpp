#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "knowctl/bitset.hpp"

namespace knowctl {

enum class FormulaKind {
  True,
  False,
  Place,      // index = place
  Enabled,    // en(t), index = transition
  Good,       // good(t), index = transition
  Deadfree,   // df: some transition is enabled
  Not,
  And,
  Or,
  Implies,
  KnowWeak,   // Kw[procs] lhs
  KnowStrong, // Ks[procs] lhs
  KnowPast,   // Kp[proc] lhs, single observer, never under another modality
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::True;
  std::size_t index = 0;
  ProcessSet observers;
  FormulaPtr lhs;
  FormulaPtr rhs;

  static FormulaPtr constant(bool value);
  static FormulaPtr place(std::size_t p);
  static FormulaPtr enabled(std::size_t t);
  static FormulaPtr good(std::size_t t);
  static FormulaPtr deadfree();
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implication(FormulaPtr a, FormulaPtr b);
  static FormulaPtr knows(FormulaKind modality, ProcessSet observers, FormulaPtr f);

  /// Disjunction of all operands; the empty disjunction is false.
  static FormulaPtr any_of(const std::vector<FormulaPtr>& operands);
};

bool structurally_equal(const Formula& a, const Formula& b);

[[nodiscard]] bool is_modality(FormulaKind kind);
[[nodiscard]] bool contains_past(const Formula& f);
[[nodiscard]] bool contains_modality(const Formula& f);
/// Only place literals, constants and boolean connectives.
[[nodiscard]] bool is_state_predicate(const Formula& f);

/// Name tables used to resolve identifiers in formula text.
struct Symbols {
  std::vector<std::string> places;
  std::vector<std::string> transitions;
  std::vector<std::string> processes;

  [[nodiscard]] std::optional<std::size_t> place(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> transition(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> process(std::string_view name) const;
};

/// Parses the surface syntax
///   p3 | en(a) | good(a) | df | true | false | !f | f & g | f | g | f -> g
///   | Kw[pi,..] f | Ks[pi,..] f | Kp[pi] f | ( f )
/// with precedence ! (and the prefix modalities) > & > | > ->, and -> right
/// associative. Throws Error (Syntax, InnerKp, UnknownPlace,
/// UnknownTransition, UnknownProcess).
FormulaPtr parse_formula(std::string_view text, const Symbols& symbols);

std::string to_string(const Formula& f, const Symbols& symbols);

}  // namespace knowctl
