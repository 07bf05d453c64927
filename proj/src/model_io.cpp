#include "anomalylab/model.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace anomalylab {

namespace {

const std::set<std::string, std::less<>> kReserved{"dx", "dt", "dp", "dm", "exp", "none", "boson", "fermion"};

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// Symbols visible to an expression.
struct Scope {
  const Model* model = nullptr;
  std::set<std::string, std::less<>> smears;
};

class ExprParser {
 public:
  ExprParser(std::string_view text, int line, int column0, const Scope& scope)
      : text_(text), line_(line), col0_(column0), scope_(scope) {}

  JetExpr parse() {
    JetExpr e = expr();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(line_, col0_ + static_cast<int>(pos_), msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  long integer() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    if (pos_ - start > 6) fail("integer too large");
    return std::stol(std::string(text_.substr(start, pos_ - start)));
  }

  Rational number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string s(text_.substr(start, pos_ - start));
    std::size_t save = pos_;
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      std::size_t d = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (d == pos_) {
        pos_ = save;
        fail("expected a denominator");
      }
      s += "/" + std::string(text_.substr(d, pos_ - d));
    }
    try {
      return parse_rational(s);
    } catch (const std::exception& e) {
      pos_ = start;
      fail(e.what());
    }
  }

  template <class F>
  JetExpr guarded(std::size_t at, F&& f) {
    try {
      return f();
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      pos_ = at;
      fail(e.what());
    }
  }

  JetExpr expr() {
    skip_ws();
    std::size_t at = pos_;
    JetExpr acc;
    bool first = true;
    while (true) {
      bool neg = false;
      if (accept('-'))
        neg = true;
      else if (!accept('+') && !first)
        break;
      JetExpr t = term();
      if (neg) t *= Rational(-1);
      acc = guarded(at, [&] { return acc + t; });
      first = false;
      skip_ws();
      if (!peek('+') && !peek('-')) break;
    }
    return acc;
  }

  JetExpr term() {
    skip_ws();
    std::size_t at = pos_;
    JetExpr acc = factor();
    while (accept('*')) {
      JetExpr f = factor();
      acc = guarded(at, [&] { return acc * f; });
    }
    return acc;
  }

  JetExpr factor() {
    skip_ws();
    std::size_t at = pos_;
    bool symbol = pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]));
    JetExpr base = atom();
    if (!accept('^')) return base;
    bool neg = accept('-');
    long n = integer();
    if (neg) {
      // Negative powers only for a bare parameter.
      bool bare_param = symbol && base.size() == 1 && !base.has_fields() && smear_names(base).empty() &&
                        base.terms().begin()->second == 1 && base.terms().begin()->first.params.size() == 1;
      if (!bare_param) {
        pos_ = at;
        fail("negative powers are allowed for parameters only");
      }
      const auto& [name, e] = base.terms().begin()->first.params.front();
      return JetExpr::parameter(name, -static_cast<int>(n) * e);
    }
    JetExpr p = 1;
    for (long i = 0; i < n; ++i) p = guarded(at, [&] { return p * base; });
    return p;
  }

  JetExpr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '(') {
      ++pos_;
      JetExpr e = expr();
      expect(')');
      return e;
    }
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail(std::string("unexpected '") + c + "'");
    std::size_t at = pos_;
    std::string id = identifier();
    if (id == "dx" || id == "dt" || id == "dp" || id == "dm") {
      long order = 1;
      if (accept('^')) order = integer();
      expect('(');
      JetExpr arg = expr();
      expect(')');
      return guarded(at, [&] {
        JetExpr r = arg;
        for (long i = 0; i < order; ++i) {
          if (id == "dx") r = derive(r, Direction::x);
          else if (id == "dt") r = derive(r, Direction::t);
          else {
            JetExpr sum = derive(r, Direction::x) + (id == "dp" ? derive(r, Direction::t)
                                                                : -derive(r, Direction::t));
            r = sum * Rational(1, 2);
          }
        }
        return r;
      });
    }
    if (id == "exp") {
      expect('(');
      JetExpr arg = expr();
      expect(')');
      return guarded(at, [&] { return exponential_of(arg); });
    }
    const Model& m = *scope_.model;
    if (const FieldSymbol* f = m.find_field(id)) return JetExpr::jet(*f);
    if (m.find_parameter(id)) return JetExpr::parameter(id);
    if (scope_.smears.contains(id)) return JetExpr::smear(id);
    if (const JetExpr* d = m.find_density(id)) return *d;
    pos_ = at;
    fail("unknown symbol '" + id + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col0_;
  const Scope& scope_;
};

struct Line {
  int number = 0;
  std::string text;  // comment stripped
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t start = 0;
  int n = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string s(text.substr(start, end - start));
    ++n;
    if (auto h = s.find('#'); h != std::string::npos) s.resize(h);
    if (!s.empty() && s.back() == '\r') s.pop_back();
    out.push_back({n, s});
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

// Whitespace-separated words with their 1-based columns.
std::vector<std::pair<std::string, int>> words(const std::string& s) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i >= s.size()) break;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    out.emplace_back(s.substr(i, j - i), static_cast<int>(i) + 1);
    i = j;
  }
  return out;
}

int first_non_space(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return static_cast<int>(i);
}

class DocumentParser {
 public:
  explicit DocumentParser(std::string_view text) : lines_(split_lines(text)) {}

  Model parse() {
    for (const auto& ln : lines_) {
      const auto w = words(ln.text);
      if (w.empty()) continue;
      if (w[0].first.front() == '[') {
        open_section(ln);
        continue;
      }
      if (section_.empty()) {
        if (w[0].first != "model" || w.size() != 2) error(ln, w[0].second, "expected 'model <name>' header");
        if (have_name_) error(ln, w[0].second, "duplicate model header");
        if (!is_identifier(w[1].first)) error(ln, w[1].second, "invalid model name '" + w[1].first + "'");
        model_.name = w[1].first;
        have_name_ = true;
        continue;
      }
      line_in_section(ln, w);
    }
    if (!have_name_) throw SyntaxError(1, 1, "missing 'model <name>' header");
    if (model_.fields.empty()) throw SyntaxError(lines_.back().number, 1, "model declares no fields");
    if (!seen_.contains("hamiltonian")) throw SyntaxError(lines_.back().number, 1, "missing [hamiltonian] section");
    finish_family();
    return model_;
  }

 private:
  [[noreturn]] static void error(const Line& ln, int col, const std::string& msg) {
    throw SyntaxError(ln.number, col, msg);
  }

  JetExpr expression(const Line& ln, std::size_t offset, const std::set<std::string, std::less<>>& smears = {}) {
    Scope scope{&model_, smears};
    std::string_view rest = std::string_view(ln.text).substr(offset);
    if (words(std::string(rest)).empty()) error(ln, static_cast<int>(offset) + 1, "expected an expression");
    return ExprParser(rest, ln.number, static_cast<int>(offset) + 1, scope).parse();
  }

  void open_section(const Line& ln) {
    finish_family();
    int c0 = first_non_space(ln.text);
    auto close = ln.text.find(']');
    if (close == std::string::npos) error(ln, c0 + 1, "unterminated section header");
    for (std::size_t i = close + 1; i < ln.text.size(); ++i)
      if (!std::isspace(static_cast<unsigned char>(ln.text[i])))
        error(ln, static_cast<int>(i) + 1, "text after section header");
    auto inner = words(ln.text.substr(c0 + 1, close - c0 - 1));
    if (inner.empty()) error(ln, c0 + 1, "empty section header");
    const std::string& kind = inner[0].first;
    static const std::set<std::string, std::less<>> simple{"fields", "potential", "parameters", "radius",
                                                           "bracket", "hamiltonian", "lagrangian", "eom"};
    if (simple.contains(kind)) {
      if (inner.size() != 1) error(ln, c0 + 1, "section [" + kind + "] takes no name");
      if (seen_.contains(kind)) error(ln, c0 + 1, "duplicate section [" + kind + "]");
      seen_.insert(kind);
      section_ = kind;
      section_filled_ = false;
      if (kind == "bracket")
        for (const auto& f : model_.fields) model_.kernel.add_field(f);
      return;
    }
    if (kind == "density" || kind == "symmetry") {
      if (inner.size() != 2 || !is_identifier(inner[1].first))
        error(ln, c0 + 1, "expected [" + kind + " <name>]");
      const std::string& name = inner[1].first;
      if (kReserved.contains(name) || model_.find_field(name) || model_.find_parameter(name))
        error(ln, c0 + 1, "name '" + name + "' is already in use");
      if (kind == "density") {
        if (model_.find_density(name)) error(ln, c0 + 1, "duplicate density '" + name + "'");
        density_name_ = name;
      } else {
        if (model_.find_family(name)) error(ln, c0 + 1, "duplicate symmetry '" + name + "'");
        family_ = SymmetryFamily{};
        family_->name = name;
        family_line_ = ln;
        have_family_density_ = false;
      }
      section_ = kind;
      section_filled_ = false;
      return;
    }
    error(ln, c0 + 2, "unknown section '" + kind + "'");
  }

  void finish_family() {
    if (!family_) return;
    if (!have_family_density_) error(family_line_, 1, "symmetry '" + family_->name + "' has no density line");
    model_.families.push_back(std::move(*family_));
    family_.reset();
  }

  void declare_name(const Line& ln, int col, const std::string& name) {
    if (!is_identifier(name)) error(ln, col, "invalid name '" + name + "'");
    if (kReserved.contains(name)) error(ln, col, "'" + name + "' is reserved");
    if (model_.find_field(name) || model_.find_parameter(name))
      error(ln, col, "name '" + name + "' is already declared");
  }

  void single_expression_section(const Line& ln) {
    if (section_filled_) error(ln, first_non_space(ln.text) + 1, "section holds a single expression");
    section_filled_ = true;
  }

  void line_in_section(const Line& ln, const std::vector<std::pair<std::string, int>>& w) {
    if (section_ == "fields") {
      if (w.size() != 2) error(ln, w[0].second, "expected '<name> boson|fermion'");
      declare_name(ln, w[0].second, w[0].first);
      Statistics s;
      if (w[1].first == "boson") s = Statistics::boson;
      else if (w[1].first == "fermion") s = Statistics::fermion;
      else error(ln, w[1].second, "expected 'boson' or 'fermion'");
      model_.fields.push_back({w[0].first, s});
    } else if (section_ == "potential") {
      // u = dx(phi) or u = dx^k(phi)
      if (w.size() < 3 || w[1].first != "=") error(ln, w[0].second, "expected '<field> = dx(<name>)'");
      const FieldSymbol* u = model_.find_field(w[0].first);
      if (!u || !model_.is_phase_field(w[0].first)) error(ln, w[0].second, "unknown field '" + w[0].first + "'");
      std::string rhs;
      for (std::size_t i = 2; i < w.size(); ++i) rhs += w[i].first;
      int order = 1;
      std::string inner;
      if (rhs.rfind("dx(", 0) == 0 && rhs.back() == ')') {
        inner = rhs.substr(3, rhs.size() - 4);
      } else if (rhs.rfind("dx^", 0) == 0 && rhs.back() == ')' && rhs.find('(') != std::string::npos) {
        auto open = rhs.find('(');
        try {
          order = std::stoi(rhs.substr(3, open - 3));
        } catch (const std::exception&) {
          error(ln, w[2].second, "invalid derivative order");
        }
        inner = rhs.substr(open + 1, rhs.size() - open - 2);
      } else {
        error(ln, w[2].second, "expected 'dx(<name>)'");
      }
      if (order < 1) error(ln, w[2].second, "derivative order must be positive");
      declare_name(ln, w[2].second, inner);
      model_.lagrangian_fields.push_back({inner, u->statistics});
      model_.potentials.push_back({u->name, inner, order});
    } else if (section_ == "parameters") {
      declare_name(ln, w[0].second, w[0].first);
      Parameter p{w[0].first, 0, std::nullopt};
      std::size_t i = 1;
      if (i < w.size() && w[i].first == "=") {
        if (i + 1 >= w.size()) error(ln, w[i].second, "expected a value after '='");
        try {
          p.value = parse_rational(w[i + 1].first);
        } catch (const std::exception& e) {
          error(ln, w[i + 1].second, e.what());
        }
        i += 2;
      }
      if (i < w.size()) {
        if (w[i].first != "degree" || i + 1 >= w.size()) error(ln, w[i].second, "expected 'degree <int>'");
        try {
          std::size_t used = 0;
          p.degree = std::stoi(w[i + 1].first, &used);
          if (used != w[i + 1].first.size()) throw std::invalid_argument("degree");
        } catch (const std::exception&) {
          error(ln, w[i + 1].second, "invalid degree '" + w[i + 1].first + "'");
        }
        i += 2;
      }
      if (i < w.size()) error(ln, w[i].second, "unexpected '" + w[i].first + "'");
      model_.parameters.push_back(p);
    } else if (section_ == "radius") {
      single_expression_section(ln);
      if (w.size() != 1 || !model_.find_parameter(w[0].first))
        error(ln, w[0].second, "radius must name a declared parameter");
      model_.radius = w[0].first;
    } else if (section_ == "bracket") {
      if (w.size() < 4) error(ln, w[0].second, "expected '<field> <field> <order> <coefficient>'");
      for (int i = 0; i < 2; ++i)
        if (!model_.is_phase_field(w[i].first)) error(ln, w[i].second, "unknown field '" + w[i].first + "'");
      int k = 0;
      try {
        std::size_t used = 0;
        k = std::stoi(w[2].first, &used);
        if (used != w[2].first.size() || k < 0) throw std::invalid_argument("order");
      } catch (const std::exception&) {
        error(ln, w[2].second, "invalid delta-derivative order '" + w[2].first + "'");
      }
      JetExpr c = expression(ln, static_cast<std::size_t>(w[3].second - 1));
      if (c.has_fields() || !smear_names(c).empty())
        error(ln, w[3].second, "bracket coefficients must be constants or parameters");
      if (const auto* o = model_.kernel.find(w[0].first, w[1].first); o && o->contains(k))
        error(ln, w[0].second, "duplicate bracket entry");
      model_.kernel.set(w[0].first, w[1].first, k, c);
    } else if (section_ == "hamiltonian") {
      single_expression_section(ln);
      model_.hamiltonian = expression(ln, 0);
    } else if (section_ == "lagrangian") {
      single_expression_section(ln);
      model_.lagrangian = expression(ln, 0);
    } else if (section_ == "eom") {
      auto eq = ln.text.find('=');
      if (eq == std::string::npos) error(ln, w[0].second, "expected 'dt(<field>) = <expression>'");
      auto lhs = words(ln.text.substr(0, eq));
      std::string l;
      for (const auto& x : lhs) l += x.first;
      if (l.size() < 5 || l.rfind("dt(", 0) != 0 || l.back() != ')')
        error(ln, w[0].second, "expected 'dt(<field>)' on the left");
      std::string field = l.substr(3, l.size() - 4);
      if (!model_.is_phase_field(field)) error(ln, w[0].second, "unknown field '" + field + "'");
      for (const auto& [f, e] : model_.eom)
        if (f == field) error(ln, w[0].second, "duplicate equation for '" + field + "'");
      model_.eom.emplace_back(field, expression(ln, eq + 1));
    } else if (section_ == "density") {
      single_expression_section(ln);
      model_.densities.emplace_back(density_name_, expression(ln, 0));
    } else if (section_ == "symmetry") {
      symmetry_line(ln, w);
    }
  }

  void symmetry_line(const Line& ln, const std::vector<std::pair<std::string, int>>& w) {
    SymmetryFamily& fam = *family_;
    const std::string& key = w[0].first;
    std::set<std::string, std::less<>> smears;
    if (fam.smear) smears.insert(*fam.smear);
    auto after_key = static_cast<std::size_t>(w[0].second - 1) + key.size();
    if (key == "smear") {
      if (w.size() != 2) error(ln, w[0].second, "expected 'smear <name>|none'");
      if (!fam.rules.empty() || have_family_density_) error(ln, w[0].second, "'smear' must come first");
      if (w[1].first != "none") {
        declare_name(ln, w[1].second, w[1].first);
        if (model_.find_density(w[1].first)) error(ln, w[1].second, "name '" + w[1].first + "' is already in use");
        fam.smear = w[1].first;
      }
    } else if (key == "chirality") {
      if (w.size() != 2) error(ln, w[0].second, "expected 'chirality plus|minus|none'");
      if (w[1].first == "plus") fam.chirality = Chirality::plus;
      else if (w[1].first == "minus") fam.chirality = Chirality::minus;
      else if (w[1].first == "none") fam.chirality = Chirality::none;
      else error(ln, w[1].second, "expected 'plus', 'minus' or 'none'");
    } else if (key == "density") {
      if (have_family_density_) error(ln, w[0].second, "duplicate density line");
      fam.density = expression(ln, after_key, smears);
      have_family_density_ = true;
    } else if (key == "rule") {
      auto eq = ln.text.find('=', after_key);
      if (eq == std::string::npos || w.size() < 4) error(ln, w[0].second, "expected 'rule <field> = <expression>'");
      auto lhs = words(ln.text.substr(after_key, eq - after_key));
      if (lhs.size() != 1) error(ln, w[1].second, "expected a single field name before '='");
      const std::string& field = lhs[0].first;
      if (!model_.find_field(field)) error(ln, w[1].second, "unknown field '" + field + "'");
      for (const auto& [f, e] : fam.rules)
        if (f == field) error(ln, w[1].second, "duplicate rule for '" + field + "'");
      fam.rules.emplace_back(field, expression(ln, eq + 1, smears));
    } else {
      error(ln, w[0].second, "unknown symmetry entry '" + key + "'");
    }
  }

  std::vector<Line> lines_;
  Model model_;
  bool have_name_ = false;
  std::string section_;
  std::set<std::string> seen_;
  bool section_filled_ = false;
  std::string density_name_;
  std::optional<SymmetryFamily> family_;
  Line family_line_;
  bool have_family_density_ = false;
};

}  // namespace

Model parse_model_unchecked(std::string_view text) { return DocumentParser(text).parse(); }

Model parse_model(std::string_view text) {
  Model m = parse_model_unchecked(text);
  require_valid(m);
  return m;
}

JetExpr parse_expression(std::string_view text, const Model& model, const std::vector<std::string>& smears) {
  Scope scope{&model, {smears.begin(), smears.end()}};
  return ExprParser(text, 1, 1, scope).parse();
}

std::string render_model(const Model& m) {
  std::ostringstream os;
  os << "model " << m.name << "\n\n[fields]\n";
  for (const auto& f : m.fields)
    os << f.name << (f.statistics == Statistics::fermion ? " fermion\n" : " boson\n");
  if (!m.potentials.empty()) {
    os << "\n[potential]\n";
    for (const auto& p : m.potentials)
      os << p.field << " = dx" << (p.order > 1 ? "^" + std::to_string(p.order) : "") << "(" << p.lagrangian_field
         << ")\n";
  }
  if (!m.parameters.empty()) {
    os << "\n[parameters]\n";
    for (const auto& p : m.parameters) {
      os << p.name;
      if (p.value) os << " = " << to_string(*p.value);
      if (p.degree != 0) os << " degree " << p.degree;
      os << "\n";
    }
  }
  if (m.find_parameter(m.radius)) os << "\n[radius]\n" << m.radius << "\n";
  os << "\n[bracket]\n";
  for (const auto& [key, orders] : m.kernel.entries())
    for (const auto& [k, c] : orders) os << key.first << " " << key.second << " " << k << " " << render(c) << "\n";
  os << "\n[hamiltonian]\n" << render(m.hamiltonian) << "\n";
  if (m.lagrangian) os << "\n[lagrangian]\n" << render(*m.lagrangian) << "\n";
  if (!m.eom.empty()) {
    os << "\n[eom]\n";
    for (const auto& [f, e] : m.eom) os << "dt(" << f << ") = " << render(e) << "\n";
  }
  for (const auto& [n, e] : m.densities) os << "\n[density " << n << "]\n" << render(e) << "\n";
  for (const auto& fam : m.families) {
    os << "\n[symmetry " << fam.name << "]\n";
    os << "smear " << fam.smear.value_or("none") << "\n";
    os << "chirality " << to_string(fam.chirality) << "\n";
    os << "density " << render(fam.density) << "\n";
    for (const auto& [f, e] : fam.rules) os << "rule " << f << " = " << render(e) << "\n";
  }
  return os.str();
}

}  // namespace anomalylab
