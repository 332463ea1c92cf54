#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jointprof/net_format.hpp"

namespace jointprof {

namespace {

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

enum class TokKind { kIdent, kNumber, kString, kPunct, kEnd };

struct Token {
  TokKind kind = TokKind::kEnd;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) {
      tok.kind = TokKind::kEnd;
      return tok;
    }
    const char c = text_[pos_];
    if (c == '"') {
      tok.kind = TokKind::kString;
      advance();
      while (pos_ < text_.size() && text_[pos_] != '"') {
        tok.text.push_back(text_[pos_]);
        advance();
      }
      if (pos_ >= text_.size()) fail(tok, "unterminated string");
      advance();  // closing quote
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') {
      tok.kind = TokKind::kNumber;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '.' || text_[pos_] == '-' ||
                                     text_[pos_] == '+')) {
        // exponents like 1e-3 stay one token
        if ((text_[pos_] == '-' || text_[pos_] == '+') && !tok.text.empty() &&
            tok.text.back() != 'e' && tok.text.back() != 'E') {
          break;
        }
        tok.text.push_back(text_[pos_]);
        advance();
      }
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      tok.kind = TokKind::kIdent;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_' || text_[pos_] == '-' ||
                                     text_[pos_] == '.')) {
        tok.text.push_back(text_[pos_]);
        advance();
      }
      return tok;
    }
    tok.kind = TokKind::kPunct;
    tok.text.push_back(c);
    advance();
    return tok;
  }

  [[noreturn]] void fail(const Token& at, const std::string& message) const {
    throw ParseError(ParseDiagnostic{Severity::kError, at.line, at.column, message});
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '/')) {
          advance();
        }
        if (pos_ + 1 < text_.size()) {
          advance();
          advance();
        }
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct BifVariable {
  std::string name;
  std::vector<std::string> outcomes;
  std::vector<std::string> properties;
  Token at;
};

struct BifProbability {
  std::string child;
  std::vector<std::string> parents;
  // table values (child outcome fastest, last parent fastest), or rows
  // keyed by parent outcome labels
  std::optional<std::vector<double>> table;
  std::vector<std::pair<std::vector<std::string>, std::vector<double>>> rows;
  Token at;
};

class BifParser {
 public:
  explicit BifParser(const std::string& text) : lex_(text) { shift(); }

  Network parse() {
    while (cur_.kind != TokKind::kEnd) {
      if (cur_.kind != TokKind::kIdent) {
        lex_.fail(cur_, "expected 'network', 'variable' or 'probability'");
      }
      if (cur_.text == "network") {
        parse_network_block();
      } else if (cur_.text == "variable") {
        parse_variable_block();
      } else if (cur_.text == "probability") {
        parse_probability_block();
      } else {
        lex_.fail(cur_, "unsupported construct '" + cur_.text + "'");
      }
    }
    return assemble();
  }

 private:
  void shift() { cur_ = lex_.next(); }

  Token expect(TokKind kind, const std::string& what) {
    if (cur_.kind != kind) lex_.fail(cur_, "expected " + what + ", got '" + cur_.text + "'");
    Token tok = cur_;
    shift();
    return tok;
  }

  Token expect_punct(char c) {
    if (cur_.kind != TokKind::kPunct || cur_.text[0] != c) {
      lex_.fail(cur_, std::string("expected '") + c + "', got '" + cur_.text + "'");
    }
    Token tok = cur_;
    shift();
    return tok;
  }

  bool at_punct(char c) const { return cur_.kind == TokKind::kPunct && cur_.text[0] == c; }

  // `property` lines are free-form; keep the raw words as one annotation.
  std::string parse_property() {
    std::string prop;
    while (!at_punct(';') && cur_.kind != TokKind::kEnd) {
      if (!prop.empty()) prop.push_back(' ');
      prop += cur_.text;
      shift();
    }
    expect_punct(';');
    return prop;
  }

  void parse_network_block() {
    shift();  // 'network'
    while (!at_punct('{') && cur_.kind != TokKind::kEnd) {
      if (!network_name_.empty()) network_name_.push_back(' ');
      network_name_ += cur_.text;
      shift();
    }
    expect_punct('{');
    while (!at_punct('}')) {
      if (cur_.kind == TokKind::kIdent && cur_.text == "property") {
        shift();
        network_properties_.push_back(parse_property());
      } else {
        lex_.fail(cur_, "unsupported construct '" + cur_.text + "' in network block");
      }
    }
    expect_punct('}');
  }

  void parse_variable_block() {
    shift();  // 'variable'
    BifVariable var;
    var.at = cur_;
    var.name = expect(TokKind::kIdent, "variable name").text;
    expect_punct('{');
    while (!at_punct('}')) {
      if (cur_.kind == TokKind::kIdent && cur_.text == "type") {
        shift();
        const Token type = expect(TokKind::kIdent, "variable type");
        if (type.text != "discrete") {
          lex_.fail(type, "unsupported construct: 'type " + type.text +
                              "' (only discrete variables are supported)");
        }
        std::optional<std::uint64_t> declared_count;
        if (at_punct('[')) {
          shift();
          const Token count = expect(TokKind::kNumber, "outcome count");
          declared_count = static_cast<std::uint64_t>(to_number(count));
          expect_punct(']');
        }
        expect_punct('{');
        while (!at_punct('}')) {
          if (cur_.kind != TokKind::kIdent && cur_.kind != TokKind::kNumber) {
            lex_.fail(cur_, "expected an outcome label");
          }
          var.outcomes.push_back(cur_.text);
          shift();
          if (at_punct(',')) shift();
        }
        expect_punct('}');
        expect_punct(';');
        if (declared_count && *declared_count != var.outcomes.size()) {
          lex_.fail(var.at, "variable '" + var.name + "' declares " +
                                std::to_string(*declared_count) + " outcomes but lists " +
                                std::to_string(var.outcomes.size()));
        }
      } else if (cur_.kind == TokKind::kIdent && cur_.text == "property") {
        shift();
        var.properties.push_back(parse_property());
      } else {
        lex_.fail(cur_, "unsupported construct '" + cur_.text + "' in variable block");
      }
    }
    expect_punct('}');
    variables_.push_back(std::move(var));
  }

  double to_number(const Token& tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok.text, &used);
      if (used != tok.text.size()) throw std::invalid_argument(tok.text);
      return v;
    } catch (const std::exception&) {
      lex_.fail(tok, "malformed number '" + tok.text + "'");
    }
  }

  std::vector<double> parse_number_list() {
    std::vector<double> values;
    while (!at_punct(';')) {
      const Token num = expect(TokKind::kNumber, "a probability");
      values.push_back(to_number(num));
      if (at_punct(',')) shift();
    }
    expect_punct(';');
    return values;
  }

  void parse_probability_block() {
    shift();  // 'probability'
    BifProbability prob;
    prob.at = cur_;
    expect_punct('(');
    prob.child = expect(TokKind::kIdent, "variable name").text;
    if (at_punct('|')) {
      shift();
      for (;;) {
        prob.parents.push_back(expect(TokKind::kIdent, "parent name").text);
        if (at_punct(',')) {
          shift();
          continue;
        }
        break;
      }
    }
    expect_punct(')');
    expect_punct('{');
    while (!at_punct('}')) {
      if (cur_.kind == TokKind::kIdent && cur_.text == "table") {
        shift();
        prob.table = parse_number_list();
      } else if (cur_.kind == TokKind::kIdent && cur_.text == "property") {
        shift();
        // dropped: probability-level properties carry no model content
        parse_property();
      } else if (at_punct('(')) {
        shift();
        std::vector<std::string> labels;
        while (!at_punct(')')) {
          if (cur_.kind != TokKind::kIdent && cur_.kind != TokKind::kNumber) {
            lex_.fail(cur_, "expected a parent outcome label");
          }
          labels.push_back(cur_.text);
          shift();
          if (at_punct(',')) shift();
        }
        expect_punct(')');
        prob.rows.emplace_back(std::move(labels), parse_number_list());
      } else {
        lex_.fail(cur_, "unsupported construct '" + cur_.text + "' in probability block");
      }
    }
    expect_punct('}');
    probabilities_.push_back(std::move(prob));
  }

  // ------------------------------------------------------------------
  // Assembly: topological sort, CPT layout, validation
  // ------------------------------------------------------------------

  Network assemble() {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (!index.emplace(variables_[i].name, i).second) {
        lex_.fail(variables_[i].at, "variable '" + variables_[i].name + "' declared twice");
      }
    }

    std::vector<const BifProbability*> prob_of(variables_.size(), nullptr);
    for (const BifProbability& p : probabilities_) {
      const auto it = index.find(p.child);
      if (it == index.end()) {
        lex_.fail(p.at, "probability block for undeclared variable '" + p.child + "'");
      }
      if (prob_of[it->second]) {
        lex_.fail(p.at, "duplicate probability block for '" + p.child + "'");
      }
      for (const std::string& parent : p.parents) {
        if (!index.count(parent)) {
          lex_.fail(p.at, "unknown parent '" + parent + "' of '" + p.child + "'");
        }
      }
      prob_of[it->second] = &p;
    }
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (!prob_of[i]) {
        lex_.fail(variables_[i].at,
                  "variable '" + variables_[i].name + "' has no probability block");
      }
    }

    // Kahn's topological sort, stable in declaration order.
    const std::size_t n = variables_.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const std::string& parent : prob_of[i]->parents) {
        children[index[parent]].push_back(i);
        ++indegree[i];
      }
    }
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<bool> queued(n, false);
    for (;;) {
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!queued[i] && indegree[i] == 0) {
          pick = i;
          break;
        }
      }
      if (pick == n) break;
      queued[pick] = true;
      order.push_back(pick);
      for (const std::size_t c : children[pick]) --indegree[c];
    }
    if (order.size() != n) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!queued[i]) {
          lex_.fail(variables_[i].at,
                    "cycle through variable '" + variables_[i].name + "'");
        }
      }
    }

    std::vector<std::size_t> position(n);
    for (std::size_t r = 0; r < n; ++r) position[order[r]] = r;

    std::vector<Variable> vars(n);
    for (std::size_t r = 0; r < n; ++r) {
      const BifVariable& src = variables_[order[r]];
      const BifProbability& prob = *prob_of[order[r]];
      Variable v;
      v.name = src.name;
      v.outcomes = src.outcomes;
      v.properties = src.properties;
      if (v.outcomes.size() < 2) {
        lex_.fail(src.at, "variable '" + v.name + "' needs at least 2 outcomes");
      }

      std::uint64_t configs = 1;
      std::vector<std::uint64_t> pstrides(prob.parents.size(), 1);
      for (std::size_t j = prob.parents.size(); j-- > 0;) {
        pstrides[j] = configs;
        configs *= variables_[index[prob.parents[j]]].outcomes.size();
      }
      for (const std::string& parent : prob.parents) {
        v.parents.push_back(static_cast<std::uint32_t>(position[index[parent]]));
      }

      const std::size_t k = v.outcomes.size();
      v.cpt.assign(configs * k, -1.0);

      if (prob.table) {
        if (prob.table->size() != configs * k) {
          lex_.fail(prob.at, "table for '" + v.name + "' has " +
                                 std::to_string(prob.table->size()) +
                                 " entries, expected " + std::to_string(configs * k));
        }
        v.cpt = *prob.table;
      }
      for (const auto& [labels, values] : prob.rows) {
        if (labels.size() != prob.parents.size()) {
          lex_.fail(prob.at, "a row of '" + v.name + "' names " +
                                 std::to_string(labels.size()) + " parent outcomes, expected " +
                                 std::to_string(prob.parents.size()));
        }
        if (values.size() != k) {
          lex_.fail(prob.at, "a row of '" + v.name + "' lists " +
                                 std::to_string(values.size()) + " probabilities, expected " +
                                 std::to_string(k));
        }
        std::uint64_t config = 0;
        for (std::size_t j = 0; j < labels.size(); ++j) {
          const BifVariable& pv = variables_[index[prob.parents[j]]];
          const auto it = std::find(pv.outcomes.begin(), pv.outcomes.end(), labels[j]);
          if (it == pv.outcomes.end()) {
            lex_.fail(prob.at, "row of '" + v.name + "': '" + labels[j] +
                                   "' is not an outcome of parent '" + pv.name + "'");
          }
          config += pstrides[j] *
                    static_cast<std::uint64_t>(it - pv.outcomes.begin());
        }
        if (v.cpt[config * k] >= 0.0) {
          lex_.fail(prob.at, "duplicate row for one parent configuration of '" +
                                 v.name + "'");
        }
        for (std::size_t o = 0; o < k; ++o) v.cpt[config * k + o] = values[o];
      }
      for (std::size_t c = 0; c < configs; ++c) {
        if (v.cpt[c * k] < 0.0) {
          lex_.fail(prob.at, "variable '" + v.name + "': parent configuration " +
                                 std::to_string(c) + " has no probabilities");
        }
      }
      vars[r] = std::move(v);
    }

    try {
      return Network::build(network_name_, std::move(vars));
    } catch (const ValidationError& e) {
      throw ParseError(ParseDiagnostic{Severity::kError, 1, 1, e.what()});
    }
  }

  Lexer lex_;
  Token cur_;
  std::string network_name_;
  std::vector<std::string> network_properties_;
  std::vector<BifVariable> variables_;
  std::vector<BifProbability> probabilities_;
};

}  // namespace

Network parse_bif(const std::string& text) { return BifParser(text).parse(); }

}  // namespace jointprof
