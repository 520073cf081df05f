#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cdenum/common.hpp"
#include "cdenum/formula.hpp"
#include "cdenum/signature.hpp"

namespace cdenum {

// Recursive-descent parser for the query grammar:
//
//   formula  := and_or chains of '&' / '|' ('&' binds tighter, left-assoc)
//   unary    := '!' unary | primary
//   primary  := '(' formula ')'
//            |  'exists' var '(' formula ')' | 'forall' var '(' formula ')'
//            |  NAME '(' var {',' var} ')'                      -- atom
//            |  var '=' var
//
// Variables match [a-z][a-z0-9_]*. Quantifier bodies must be parenthesized.
// A name is either a free variable or a quantified one, never both, and
// nested quantifiers cannot rebind a name already in scope.
class Parser {
 public:
  Parser(const std::string& text, const Signature& sig)
      : text_(text), sig_(sig) {}

  Formula parse() {
    next_token();
    std::unique_ptr<Node> root = parse_or();
    if (tok_.kind != Tok::End) {
      fail("unexpected trailing input");
    }
    return Formula(sig_, std::move(root), std::move(var_names_),
                   std::move(free_vars_));
  }

 private:
  enum class Tok { End, Name, LParen, RParen, Comma, Equal, And, Or, Not };

  struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t pos = 0;
  };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.pos);
  }

  void next_token() {
    while (at_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[at_]))) {
      ++at_;
    }
    tok_.pos = at_;
    tok_.text.clear();
    if (at_ >= text_.size()) {
      tok_.kind = Tok::End;
      return;
    }
    char c = text_[at_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = at_;
      while (at_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[at_])) || text_[at_] == '_')) {
        ++at_;
      }
      tok_.kind = Tok::Name;
      tok_.text = text_.substr(start, at_ - start);
      return;
    }
    ++at_;
    switch (c) {
      case '(': tok_.kind = Tok::LParen; return;
      case ')': tok_.kind = Tok::RParen; return;
      case ',': tok_.kind = Tok::Comma; return;
      case '=': tok_.kind = Tok::Equal; return;
      case '&': tok_.kind = Tok::And; return;
      case '|': tok_.kind = Tok::Or; return;
      case '!': tok_.kind = Tok::Not; return;
      default:
        tok_.pos = at_ - 1;
        throw ParseError(std::string("unexpected character '") + c + "'", tok_.pos);
    }
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    next_token();
  }

  static bool is_keyword(const std::string& s) {
    return s == "exists" || s == "forall";
  }

  static bool is_variable_name(const std::string& s) {
    if (s.empty() || is_keyword(s)) return false;
    if (!(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s) {
      if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) {
        return false;
      }
    }
    return true;
  }

  int intern(const std::string& name) {
    auto it = var_ids_.find(name);
    if (it != var_ids_.end()) return it->second;
    int id = static_cast<int>(var_names_.size());
    var_names_.push_back(name);
    var_ids_.emplace(name, id);
    return id;
  }

  // A variable occurrence inside a formula body (atom argument or equality
  // side). Resolves against the current scope; free occurrences are
  // registered in first-occurrence order.
  int variable_occurrence() {
    if (tok_.kind != Tok::Name || !is_variable_name(tok_.text)) {
      fail("expected a variable");
    }
    std::string name = tok_.text;
    std::size_t pos = tok_.pos;
    next_token();
    int id = intern(name);
    if (scope_depth_.count(id) != 0) {
      return id;  // bound occurrence
    }
    if (ever_bound_.count(id) != 0) {
      throw ParseError("variable '" + name +
                           "' is quantified elsewhere and cannot also occur free",
                       pos);
    }
    if (ever_free_.insert(id).second) {
      free_vars_.push_back(id);
    }
    return id;
  }

  std::unique_ptr<Node> parse_or() {
    std::unique_ptr<Node> lhs = parse_and();
    while (tok_.kind == Tok::Or) {
      next_token();
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Or;
      n->left = std::move(lhs);
      n->right = parse_and();
      lhs = std::move(n);
    }
    return lhs;
  }

  std::unique_ptr<Node> parse_and() {
    std::unique_ptr<Node> lhs = parse_unary();
    while (tok_.kind == Tok::And) {
      next_token();
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::And;
      n->left = std::move(lhs);
      n->right = parse_unary();
      lhs = std::move(n);
    }
    return lhs;
  }

  std::unique_ptr<Node> parse_unary() {
    if (tok_.kind == Tok::Not) {
      next_token();
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Not;
      n->left = parse_unary();
      return n;
    }
    return parse_primary();
  }

  std::unique_ptr<Node> quantifier(NodeKind kind) {
    next_token();  // past the keyword
    if (tok_.kind != Tok::Name || !is_variable_name(tok_.text)) {
      fail("expected a variable after quantifier");
    }
    std::string name = tok_.text;
    std::size_t name_pos = tok_.pos;
    int id = intern(name);
    if (scope_depth_.count(id) != 0) {
      throw ParseError("variable '" + name + "' shadows an enclosing quantifier",
                       name_pos);
    }
    if (ever_free_.count(id) != 0) {
      throw ParseError("variable '" + name +
                           "' already occurs free and cannot be quantified",
                       name_pos);
    }
    ever_bound_.insert(id);
    next_token();
    expect(Tok::LParen, "'(' around quantifier body");
    scope_depth_.insert(id);
    auto n = std::make_unique<Node>();
    n->kind = kind;
    n->bound = id;
    n->left = parse_or();
    scope_depth_.erase(id);
    expect(Tok::RParen, "')' closing quantifier body");
    return n;
  }

  std::unique_ptr<Node> parse_primary() {
    if (tok_.kind == Tok::LParen) {
      next_token();
      std::unique_ptr<Node> inner = parse_or();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (tok_.kind != Tok::Name) {
      fail("expected a formula");
    }
    if (tok_.text == "exists") return quantifier(NodeKind::Exists);
    if (tok_.text == "forall") return quantifier(NodeKind::Forall);

    // Lookahead decides between an atom R(...) and an equality v = w.
    std::string name = tok_.text;
    std::size_t name_pos = tok_.pos;
    std::size_t save_at = at_;
    next_token();
    if (tok_.kind == Tok::LParen) {
      std::optional<int> rel = sig_.find(name);
      if (!rel.has_value()) {
        throw ParseError("unknown relation '" + name + "'", name_pos);
      }
      next_token();
      auto n = std::make_unique<Node>();
      n->kind = NodeKind::Atom;
      n->relation = *rel;
      n->vars.push_back(variable_occurrence());
      while (tok_.kind == Tok::Comma) {
        next_token();
        n->vars.push_back(variable_occurrence());
      }
      expect(Tok::RParen, "')' closing atom");
      int want = sig_.arity(*rel);
      if (static_cast<int>(n->vars.size()) != want) {
        throw ParseError("relation '" + name + "' expects " +
                             std::to_string(want) + " arguments, got " +
                             std::to_string(n->vars.size()),
                         name_pos);
      }
      return n;
    }

    // Not an atom: rewind to treat the name as an equality's left side.
    at_ = save_at;
    tok_.kind = Tok::Name;
    tok_.text = name;
    tok_.pos = name_pos;
    auto n = std::make_unique<Node>();
    n->kind = NodeKind::Equal;
    n->vars.push_back(variable_occurrence());
    expect(Tok::Equal, "'=' or '(' after name");
    n->vars.push_back(variable_occurrence());
    return n;
  }

  const std::string& text_;
  const Signature& sig_;
  std::size_t at_ = 0;
  Token tok_;

  std::vector<std::string> var_names_;
  std::unordered_map<std::string, int> var_ids_;
  std::vector<int> free_vars_;
  std::unordered_set<int> scope_depth_;  // currently bound
  std::unordered_set<int> ever_bound_;
  std::unordered_set<int> ever_free_;
};

inline Formula parse_formula(const std::string& text, const Signature& sig) {
  return Parser(text, sig).parse();
}

}  // namespace cdenum
