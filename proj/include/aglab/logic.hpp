#pragma once

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aglab/errors.hpp"

namespace aglab::logic {

// ---------------------------------------------------------------------------
// Syntax.
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind { variable, apply };  // apply with no args is a constant

  Kind kind = Kind::variable;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string n) { return {Kind::variable, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::apply, std::move(n), {}}; }
  static Term apply(std::string n, std::vector<Term> a) { return {Kind::apply, std::move(n), std::move(a)}; }

  bool operator==(const Term&) const = default;
};

struct Formula {
  enum class Kind { prop, truth, not_, and_, or_, implies, iff, equals, predicate, forall, exists };

  Kind kind = Kind::truth;
  std::string name;  // prop symbol, predicate name, or bound variable
  bool truth_value = false;
  std::vector<Formula> kids;
  std::vector<Term> terms;  // equals: 2 entries; predicate: arguments

  static Formula prop(std::string n) { return make(Kind::prop, std::move(n)); }
  static Formula truth(bool b) {
    Formula f;
    f.kind = Kind::truth;
    f.truth_value = b;
    return f;
  }
  static Formula not_(Formula a) { return unary(Kind::not_, std::move(a)); }
  static Formula and_(Formula a, Formula b) { return binary(Kind::and_, std::move(a), std::move(b)); }
  static Formula or_(Formula a, Formula b) { return binary(Kind::or_, std::move(a), std::move(b)); }
  static Formula implies(Formula a, Formula b) { return binary(Kind::implies, std::move(a), std::move(b)); }
  static Formula iff(Formula a, Formula b) { return binary(Kind::iff, std::move(a), std::move(b)); }
  static Formula equals(Term a, Term b) {
    Formula f;
    f.kind = Kind::equals;
    f.terms = {std::move(a), std::move(b)};
    return f;
  }
  static Formula predicate(std::string n, std::vector<Term> args) {
    Formula f;
    f.kind = Kind::predicate;
    f.name = std::move(n);
    f.terms = std::move(args);
    return f;
  }
  static Formula forall(std::string v, Formula body) { return quant(Kind::forall, std::move(v), std::move(body)); }
  static Formula exists(std::string v, Formula body) { return quant(Kind::exists, std::move(v), std::move(body)); }

  bool operator==(const Formula&) const = default;

 private:
  static Formula make(Kind k, std::string n) {
    Formula f;
    f.kind = k;
    f.name = std::move(n);
    return f;
  }
  static Formula unary(Kind k, Formula a) {
    Formula f;
    f.kind = k;
    f.kids.push_back(std::move(a));
    return f;
  }
  static Formula binary(Kind k, Formula a, Formula b) {
    Formula f;
    f.kind = k;
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
  }
  static Formula quant(Kind k, std::string v, Formula body) {
    Formula f;
    f.kind = k;
    f.name = std::move(v);
    f.kids.push_back(std::move(body));
    return f;
  }
};

inline long long node_count(const Term& t) {
  long long n = 1;
  for (const auto& a : t.args) n += node_count(a);
  return n;
}

inline long long node_count(const Formula& f) {
  long long n = 1;
  for (const auto& k : f.kids) n += node_count(k);
  for (const auto& t : f.terms) n += node_count(t);
  return n;
}

inline void collect_free_variables(const Term& t, std::set<std::string>& bound, std::set<std::string>& out) {
  if (t.kind == Term::Kind::variable) {
    if (!bound.count(t.name)) out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_free_variables(a, bound, out);
}

inline void collect_free_variables(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::forall || f.kind == Formula::Kind::exists) {
    bool was_bound = bound.count(f.name) > 0;
    bound.insert(f.name);
    collect_free_variables(f.kids[0], bound, out);
    if (!was_bound) bound.erase(f.name);
    return;
  }
  for (const auto& t : f.terms) collect_free_variables(t, bound, out);
  for (const auto& k : f.kids) collect_free_variables(k, bound, out);
}

inline bool is_statement(const Formula& f) {
  std::set<std::string> bound, free;
  collect_free_variables(f, bound, free);
  return free.empty();
}

// ---------------------------------------------------------------------------
// Parser. ASCII connectives & | ~ -> <->, mandatory parentheses around
// binary connectives, quantifiers as `forall x.` / `exists x.`, infix + and *
// inside terms, prefix-style application f(t1, t2).
// ---------------------------------------------------------------------------

namespace detail {

struct Lexer {
  std::string text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  [[noreturn]] void error(const std::string& what) const {
    fail(Errc::syntax, what + " at position " + std::to_string(pos));
  }

  std::string peek_token() {
    std::size_t save = pos;
    std::string t = next_token(true);
    pos = save;
    return t;
  }

  std::string next_token(bool allow_eof = false) {
    skip_ws();
    if (pos >= text.size()) {
      if (allow_eof) return "";
      error("unexpected end of input");
    }
    char c = text[pos];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
        ++pos;
      return text.substr(start, pos - start);
    }
    if (c == '-' && pos + 1 < text.size() && text[pos + 1] == '>') {
      pos += 2;
      return "->";
    }
    if (c == '<' && pos + 2 < text.size() && text[pos + 1] == '-' && text[pos + 2] == '>') {
      pos += 3;
      return "<->";
    }
    ++pos;
    return std::string(1, c);
  }

  void expect(const std::string& tok) {
    std::string got = next_token();
    if (got != tok) error("expected '" + tok + "', got '" + got + "'");
  }
};

inline bool is_ident(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct Parser {
  Lexer lex;
  std::set<std::string> scope;  // quantifier-bound variable names

  Term parse_term_factor() {
    std::string t = lex.next_token();
    if (t == "(") {
      Term inner = parse_term();
      lex.expect(")");
      return inner;
    }
    if (!is_ident(t)) lex.error("expected a term, got '" + t + "'");
    if (lex.peek_token() == "(") {
      lex.expect("(");
      std::vector<Term> args;
      if (lex.peek_token() != ")") {
        args.push_back(parse_term());
        while (lex.peek_token() == ",") {
          lex.expect(",");
          args.push_back(parse_term());
        }
      }
      lex.expect(")");
      return Term::apply(t, std::move(args));
    }
    if (scope.count(t)) return Term::var(t);
    return Term::constant(t);
  }

  Term parse_term() {
    Term left = parse_term_factor();
    while (true) {
      std::string op = lex.peek_token();
      if (op != "+" && op != "*") break;
      lex.next_token();
      Term right = parse_term_factor();
      left = Term::apply(op, {std::move(left), std::move(right)});
    }
    return left;
  }

  Formula parse_formula() {
    std::string t = lex.peek_token();
    if (t == "~") {
      lex.next_token();
      return Formula::not_(parse_formula());
    }
    if (t == "forall" || t == "exists") {
      lex.next_token();
      std::string v = lex.next_token();
      if (!is_ident(v)) lex.error("expected a variable after quantifier");
      lex.expect(".");
      bool was = scope.count(v) > 0;
      scope.insert(v);
      Formula body = parse_formula();
      if (!was) scope.erase(v);
      return t == "forall" ? Formula::forall(v, std::move(body)) : Formula::exists(v, std::move(body));
    }
    if (t == "true" || t == "false") {
      lex.next_token();
      return Formula::truth(t == "true");
    }
    if (t == "(") {
      // either (formula BINOP formula) or a term equality / comparison
      std::size_t save = lex.pos;
      auto saved_scope = scope;
      lex.next_token();  // consume '('
      // try the term-equality route first
      try {
        Term left = parse_term();
        std::string op = lex.peek_token();
        if (op == "=") {
          lex.next_token();
          Term right = parse_term();
          lex.expect(")");
          return Formula::equals(std::move(left), std::move(right));
        }
      } catch (const Error&) {
        // fall through to the formula route
      }
      lex.pos = save;
      scope = saved_scope;
      lex.next_token();  // '('
      Formula left = parse_formula();
      std::string op = lex.next_token();
      if (op != "&" && op != "|" && op != "->" && op != "<->")
        lex.error("expected a binary connective, got '" + op + "'");
      Formula right = parse_formula();
      lex.expect(")");
      if (op == "&") return Formula::and_(std::move(left), std::move(right));
      if (op == "|") return Formula::or_(std::move(left), std::move(right));
      if (op == "->") return Formula::implies(std::move(left), std::move(right));
      return Formula::iff(std::move(left), std::move(right));
    }
    // bare identifier: propositional symbol or predicate application
    std::string name = lex.next_token();
    if (!is_ident(name)) lex.error("expected a formula, got '" + name + "'");
    if (lex.peek_token() == "(") {
      lex.expect("(");
      std::vector<Term> args;
      if (lex.peek_token() != ")") {
        args.push_back(parse_term());
        while (lex.peek_token() == ",") {
          lex.expect(",");
          args.push_back(parse_term());
        }
      }
      lex.expect(")");
      return Formula::predicate(name, std::move(args));
    }
    return Formula::prop(name);
  }
};

}  // namespace detail

inline Formula parse_formula(const std::string& text) {
  detail::Parser p{{text, 0}, {}};
  Formula f = p.parse_formula();
  if (!p.lex.eof()) p.lex.error("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Printer; parse(print(f)) == f.
// ---------------------------------------------------------------------------

inline void print_term(const Term& t, std::ostream& os) {
  if (t.kind == Term::Kind::variable) {
    os << t.name;
    return;
  }
  if (t.name == "+" || t.name == "*") {
    os << '(';
    print_term(t.args[0], os);
    os << ' ' << t.name << ' ';
    print_term(t.args[1], os);
    os << ')';
    return;
  }
  os << t.name;
  if (!t.args.empty()) {
    os << '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      print_term(t.args[i], os);
    }
    os << ')';
  }
}

inline void print_formula(const Formula& f, std::ostream& os) {
  switch (f.kind) {
    case Formula::Kind::prop:
      os << f.name;
      return;
    case Formula::Kind::truth:
      os << (f.truth_value ? "true" : "false");
      return;
    case Formula::Kind::not_:
      os << '~';
      print_formula(f.kids[0], os);
      return;
    case Formula::Kind::and_:
    case Formula::Kind::or_:
    case Formula::Kind::implies:
    case Formula::Kind::iff: {
      const char* op = f.kind == Formula::Kind::and_       ? "&"
                       : f.kind == Formula::Kind::or_      ? "|"
                       : f.kind == Formula::Kind::implies ? "->"
                                                           : "<->";
      os << '(';
      print_formula(f.kids[0], os);
      os << ' ' << op << ' ';
      print_formula(f.kids[1], os);
      os << ')';
      return;
    }
    case Formula::Kind::equals:
      os << '(';
      print_term(f.terms[0], os);
      os << " = ";
      print_term(f.terms[1], os);
      os << ')';
      return;
    case Formula::Kind::predicate:
      os << f.name << '(';
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) os << ", ";
        print_term(f.terms[i], os);
      }
      os << ')';
      return;
    case Formula::Kind::forall:
    case Formula::Kind::exists:
      os << (f.kind == Formula::Kind::forall ? "forall " : "exists ") << f.name << ". ";
      print_formula(f.kids[0], os);
      return;
  }
}

inline std::string to_string(const Formula& f) {
  std::ostringstream os;
  print_formula(f, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Truth-table semantic proof for propositional formulas.
// ---------------------------------------------------------------------------

struct TruthTable {
  std::vector<std::string> symbols;
  std::vector<std::pair<std::vector<bool>, bool>> rows;
  bool valid = false;
};

namespace detail {

inline void collect_props(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::prop) out.insert(f.name);
  require(f.kind != Formula::Kind::forall && f.kind != Formula::Kind::exists &&
              f.kind != Formula::Kind::equals && f.kind != Formula::Kind::predicate,
          Errc::kind, "truth tables require a purely propositional formula");
  for (const auto& k : f.kids) collect_props(k, out);
}

inline bool eval_prop(const Formula& f, const std::map<std::string, bool>& env) {
  switch (f.kind) {
    case Formula::Kind::prop:
      return env.at(f.name);
    case Formula::Kind::truth:
      return f.truth_value;
    case Formula::Kind::not_:
      return !eval_prop(f.kids[0], env);
    case Formula::Kind::and_:
      return eval_prop(f.kids[0], env) && eval_prop(f.kids[1], env);
    case Formula::Kind::or_:
      return eval_prop(f.kids[0], env) || eval_prop(f.kids[1], env);
    case Formula::Kind::implies:
      return !eval_prop(f.kids[0], env) || eval_prop(f.kids[1], env);
    case Formula::Kind::iff:
      return eval_prop(f.kids[0], env) == eval_prop(f.kids[1], env);
    default:
      fail(Errc::kind, "non-propositional content in truth-table evaluation");
  }
}

}  // namespace detail

inline TruthTable truth_table_prove(const Formula& f) {
  std::set<std::string> symbols;
  detail::collect_props(f, symbols);
  TruthTable out;
  out.symbols.assign(symbols.begin(), symbols.end());
  int k = static_cast<int>(out.symbols.size());
  require(k <= 24, Errc::resource_cap, "too many propositional symbols");
  out.valid = true;
  for (long long mask = 0; mask < (1LL << k); ++mask) {
    std::map<std::string, bool> env;
    std::vector<bool> assignment(k);
    for (int i = 0; i < k; ++i) {
      assignment[i] = (mask >> i) & 1;
      env[out.symbols[i]] = assignment[i];
    }
    bool value = detail::eval_prop(f, env);
    out.valid = out.valid && value;
    out.rows.push_back({std::move(assignment), value});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite interpretations and the decision procedure.
// ---------------------------------------------------------------------------

class FiniteInterpretation {
 public:
  explicit FiniteInterpretation(std::vector<std::string> domain) : domain_(std::move(domain)) {
    require(!domain_.empty(), Errc::parameter, "domain must be nonempty");
    // every domain element doubles as a constant naming itself
    for (std::size_t i = 0; i < domain_.size(); ++i)
      functions_[{domain_[i], 0}] = {static_cast<int>(i)};
  }

  int domain_size() const { return static_cast<int>(domain_.size()); }
  const std::string& element_name(int i) const { return domain_[i]; }

  int element_index(const std::string& name) const {
    for (std::size_t i = 0; i < domain_.size(); ++i)
      if (domain_[i] == name) return static_cast<int>(i);
    fail(Errc::interpretation, "unknown domain element '" + name + "'");
  }

  /// Table in row-major argument order: index = sum arg_i * |D|^(n-1-i).
  void set_function(const std::string& name, int arity, std::vector<int> table) {
    require(static_cast<long long>(table.size()) == pow_size(arity), Errc::interpretation,
            "function table has wrong size");
    for (int v : table) require(v >= 0 && v < domain_size(), Errc::interpretation, "function value outside domain");
    functions_[{name, arity}] = std::move(table);
  }

  void set_predicate(const std::string& name, int arity, std::vector<bool> table) {
    require(static_cast<long long>(table.size()) == pow_size(arity), Errc::interpretation,
            "predicate table has wrong size");
    predicates_[{name, arity}] = std::move(table);
  }

  int apply_function(const std::string& name, const std::vector<int>& args) const {
    auto it = functions_.find({name, static_cast<int>(args.size())});
    require(it != functions_.end(), Errc::interpretation,
            "uninterpreted function '" + name + "/" + std::to_string(args.size()) + "'");
    return it->second[flat_index(args)];
  }

  bool apply_predicate(const std::string& name, const std::vector<int>& args) const {
    auto it = predicates_.find({name, static_cast<int>(args.size())});
    require(it != predicates_.end(), Errc::interpretation,
            "uninterpreted predicate '" + name + "/" + std::to_string(args.size()) + "'");
    return it->second[flat_index(args)];
  }

 private:
  long long pow_size(int arity) const {
    long long n = 1;
    for (int i = 0; i < arity; ++i) n *= domain_size();
    return n;
  }

  long long flat_index(const std::vector<int>& args) const {
    long long idx = 0;
    for (int a : args) idx = idx * domain_size() + a;
    return idx;
  }

  std::vector<std::string> domain_;
  std::map<std::pair<std::string, int>, std::vector<int>> functions_;
  std::map<std::pair<std::string, int>, std::vector<bool>> predicates_;
};

inline constexpr long long kDefaultExpansionCap = 1000000;

namespace detail {

inline Term substitute(const Term& t, const std::string& var, const Term& value) {
  if (t.kind == Term::Kind::variable) return t.name == var ? value : t;
  Term out = t;
  for (auto& a : out.args) a = substitute(a, var, value);
  return out;
}

inline Formula substitute(const Formula& f, const std::string& var, const Term& value) {
  if (f.kind == Formula::Kind::forall || f.kind == Formula::Kind::exists) {
    if (f.name == var) return f;  // inner binder shadows
    Formula out = f;
    out.kids[0] = substitute(f.kids[0], var, value);
    return out;
  }
  Formula out = f;
  for (auto& t : out.terms) t = substitute(t, var, value);
  for (auto& k : out.kids) k = substitute(k, var, value);
  return out;
}

}  // namespace detail

/// Replace every quantifier by the |D|-fold conjunction or disjunction over
/// the domain elements, innermost-out. The substituted terms are fresh
/// domain constants, so variable capture cannot occur.
inline Formula eliminate_quantifiers(const Formula& f, const FiniteInterpretation& interp,
                                     long long node_cap = kDefaultExpansionCap) {
  Formula out = f;
  for (auto& k : out.kids) k = eliminate_quantifiers(k, interp, node_cap);
  if (out.kind != Formula::Kind::forall && out.kind != Formula::Kind::exists) return out;

  bool conjunction = out.kind == Formula::Kind::forall;
  const Formula& body = out.kids[0];
  Formula acc;
  bool first = true;
  for (int d = 0; d < interp.domain_size(); ++d) {
    Formula inst = detail::substitute(body, out.name, Term::constant(interp.element_name(d)));
    if (first) {
      acc = std::move(inst);
      first = false;
    } else {
      acc = conjunction ? Formula::and_(std::move(acc), std::move(inst))
                        : Formula::or_(std::move(acc), std::move(inst));
    }
    require(node_count(acc) <= node_cap, Errc::resource_cap, "quantifier expansion exceeds node cap");
  }
  return acc;
}

namespace detail {

inline int eval_term_closed(const Term& t, const FiniteInterpretation& interp) {
  require(t.kind == Term::Kind::apply, Errc::interpretation, "free variable in closed evaluation");
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(eval_term_closed(a, interp));
  return interp.apply_function(t.name, args);
}

inline bool eval_closed(const Formula& f, const FiniteInterpretation& interp) {
  switch (f.kind) {
    case Formula::Kind::prop:
      return interp.apply_predicate(f.name, {});
    case Formula::Kind::truth:
      return f.truth_value;
    case Formula::Kind::not_:
      return !eval_closed(f.kids[0], interp);
    case Formula::Kind::and_:
      return eval_closed(f.kids[0], interp) && eval_closed(f.kids[1], interp);
    case Formula::Kind::or_:
      return eval_closed(f.kids[0], interp) || eval_closed(f.kids[1], interp);
    case Formula::Kind::implies:
      return !eval_closed(f.kids[0], interp) || eval_closed(f.kids[1], interp);
    case Formula::Kind::iff:
      return eval_closed(f.kids[0], interp) == eval_closed(f.kids[1], interp);
    case Formula::Kind::equals:
      return eval_term_closed(f.terms[0], interp) == eval_term_closed(f.terms[1], interp);
    case Formula::Kind::predicate: {
      std::vector<int> args;
      for (const auto& t : f.terms) args.push_back(eval_term_closed(t, interp));
      return interp.apply_predicate(f.name, args);
    }
    case Formula::Kind::forall:
    case Formula::Kind::exists:
      fail(Errc::kind, "quantifier survived elimination");
  }
  fail(Errc::kind, "unknown formula kind");
}

}  // namespace detail

/// Decide a statement over a finite interpretation: eliminate quantifiers,
/// fold terms to constants and atoms to truth values, evaluate the residue.
inline bool decide(const Formula& f, const FiniteInterpretation& interp,
                   long long node_cap = kDefaultExpansionCap) {
  require(is_statement(f), Errc::kind, "decide requires a statement (no free variables)");
  Formula nq = eliminate_quantifiers(f, interp, node_cap);
  return detail::eval_closed(nq, interp);
}

inline bool decide(const std::string& text, const FiniteInterpretation& interp,
                   long long node_cap = kDefaultExpansionCap) {
  return decide(parse_formula(text), interp, node_cap);
}

/// The finite field on {0, 1, 2} with + and * as published.
inline FiniteInterpretation gf3() {
  FiniteInterpretation interp({"0", "1", "2"});
  interp.set_function("+", 2, {0, 1, 2, 1, 2, 0, 2, 0, 1});
  interp.set_function("*", 2, {0, 0, 0, 0, 1, 2, 0, 2, 1});
  return interp;
}

}  // namespace aglab::logic
