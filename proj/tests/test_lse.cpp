#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>

#include "hcp/error.hpp"
#include "hcp/lse/lse.hpp"
#include "hcp/syntax/regen.hpp"
#include "hcp/syntax/token.hpp"

using namespace hcp;
using namespace hcp::lse;
using hcp::syntax::Language;

namespace {

// Rewrite every placeholder suffix to its first-occurrence index, so two
// outputs that differ only in random suffixes canonicalize identically.
std::string canonicalize_placeholders(const std::string& text) {
  static const char* prefixes[] = {"func_", "var_", "arr_", "num_", "str_"};
  std::string out;
  std::map<std::string, int> seen;
  size_t i = 0;
  while (i < text.size()) {
    bool matched = false;
    for (const char* p : prefixes) {
      size_t plen = std::char_traits<char>::length(p);
      if (text.compare(i, plen, p) == 0 &&
          (i == 0 || !(std::isalnum(static_cast<unsigned char>(text[i - 1])) ||
                       text[i - 1] == '_'))) {
        size_t j = i + plen;
        size_t dstart = j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j > dstart) {
          std::string token = text.substr(i, j - i);
          auto [it, inserted] = seen.emplace(token, static_cast<int>(seen.size()));
          out += text.substr(i, plen);
          out += "#" + std::to_string(it->second);
          i = j;
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      out += text[i];
      ++i;
    }
  }
  return out;
}

std::string squash_ws(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

const char* kFigSource = "int main() {\n   int r[2800 + 1];\n}";

}  // namespace

TEST_CASE("anonymization map covers declared names and literals") {
  auto tree = syntax::parse(kFigSource, Language::C);
  LseConfig cfg;
  cfg.seed = 7;
  auto map = build_anonymization_map(tree, cfg);

  REQUIRE(map.entries.size() == 4);
  const auto* main_e = map.find("main");
  const auto* r_e = map.find("r");
  const auto* n1 = map.find("2800");
  const auto* n2 = map.find("1");
  REQUIRE(main_e);
  REQUIRE(r_e);
  REQUIRE(n1);
  REQUIRE(n2);
  CHECK(main_e->role == Role::Function);
  CHECK(r_e->role == Role::Array);
  CHECK(n1->role == Role::Number);
  CHECK(n2->role == Role::Number);
  CHECK(main_e->replacement.rfind("func_", 0) == 0);
  CHECK(r_e->replacement.rfind("arr_", 0) == 0);
  CHECK(n1->replacement.rfind("num_", 0) == 0);

  std::set<uint64_t> suffixes;
  for (const auto& e : map.entries) {
    CHECK(e.suffix >= 1);
    CHECK(e.suffix <= 1000);
    suffixes.insert(e.suffix);
  }
  CHECK(suffixes.size() == map.entries.size());  // injective
}

TEST_CASE("undeclared identifiers stay out of the map") {
  auto tree = syntax::parse("void f(){ printf(\"x\"); }", Language::C);
  auto map = build_anonymization_map(tree, {});
  CHECK(map.find("f") != nullptr);
  CHECK(map.find("f")->role == Role::Function);
  CHECK(map.find("printf") == nullptr);
  const auto* str = map.find("\"x\"");
  REQUIRE(str);
  CHECK(str->role == Role::String);
  CHECK(str->replacement.front() == '"');
  CHECK(str->replacement.back() == '"');
}

TEST_CASE("empty source yields empty map") {
  auto tree = syntax::parse("", Language::C);
  auto map = build_anonymization_map(tree, {});
  CHECK(map.entries.empty());
}

TEST_CASE("apply_lse reproduces the pictured shape") {
  LseConfig cfg;
  cfg.seed = 42;
  std::string out = apply_lse(kFigSource, Language::C, cfg);
  std::string squashed = squash_ws(out);

  // int func_A() { int arr_B[num_C + num_D]; } with distinct suffixes
  size_t pos = 0;
  auto expect = [&](const std::string& lit) {
    REQUIRE(squashed.compare(pos, lit.size(), lit) == 0);
    pos += lit.size();
  };
  auto number = [&]() {
    size_t start = pos;
    while (pos < squashed.size() && std::isdigit(static_cast<unsigned char>(squashed[pos])))
      ++pos;
    REQUIRE(pos > start);
    return std::stoull(squashed.substr(start, pos - start));
  };
  expect("intfunc_");
  uint64_t a = number();
  expect("(){intarr_");
  uint64_t b = number();
  expect("[num_");
  uint64_t c = number();
  expect("+num_");
  uint64_t d = number();
  expect("];}");
  CHECK(pos == squashed.size());
  std::set<uint64_t> ks{a, b, c, d};
  CHECK(ks.size() == 4);
  for (uint64_t k : ks) {
    CHECK(k >= 1);
    CHECK(k <= 1000);
  }
}

TEST_CASE("apply_lse deterministic for fixed seed") {
  LseConfig cfg;
  cfg.seed = 123;
  CHECK(apply_lse(kFigSource, Language::C, cfg) == apply_lse(kFigSource, Language::C, cfg));
}

TEST_CASE("apply_lse alpha equivalent across seeds") {
  LseConfig a, b;
  a.seed = 1;
  b.seed = 99;
  std::string out_a = apply_lse(kFigSource, Language::C, a);
  std::string out_b = apply_lse(kFigSource, Language::C, b);
  CHECK(out_a != out_b);  // suffixes differ with overwhelming likelihood
  CHECK(canonicalize_placeholders(out_a) == canonicalize_placeholders(out_b));
}

TEST_CASE("apply_lse idempotent modulo re-suffixing") {
  LseConfig cfg;
  cfg.seed = 5;
  std::string once = apply_lse(kFigSource, Language::C, cfg);
  LseConfig cfg2;
  cfg2.seed = 6;
  std::string twice = apply_lse(once, Language::C, cfg2);
  CHECK(canonicalize_placeholders(once) == canonicalize_placeholders(twice));
}

TEST_CASE("comment-only source becomes empty output") {
  CHECK(apply_lse("// hi", Language::C, {}).empty());
}

TEST_CASE("apply_lse rejects sources over the parse-error threshold") {
  CHECK_THROWS_AS(apply_lse("int x = ;", Language::C, {}), LseRejected);
  LseConfig lax;
  lax.max_parse_errors = 10;
  CHECK_NOTHROW(apply_lse("int x = ;", Language::C, lax));
}

TEST_CASE("pragmas and directives survive verbatim") {
  const char* src =
      "#define LIMIT 64\n"
      "void scale(double *v, int n, double s) {\n"
      "  #pragma omp parallel for schedule(static)\n"
      "  for (int i = 0; i < n; i++) { v[i] = v[i] * s; }\n"
      "}\n";
  LseConfig cfg;
  cfg.seed = 11;
  std::string out = apply_lse(src, Language::C, cfg);
  CHECK(out.find("#pragma omp parallel for schedule ( static )") != std::string::npos);
  CHECK(out.find("#define LIMIT 64") != std::string::npos);
  CHECK(out.find("scale") == std::string::npos);  // function renamed
  CHECK(out.find("var_") != std::string::npos);
}

TEST_CASE("compilable mode keeps literals verbatim") {
  LseConfig cfg;
  cfg.seed = 3;
  cfg.compilable_mode = true;
  std::string out = apply_lse(kFigSource, Language::C, cfg);
  CHECK(out.find("2800") != std::string::npos);
  CHECK(out.find("num_") == std::string::npos);
  CHECK(out.find("func_") != std::string::npos);
}

TEST_CASE("suffix range exhaustion extends deterministically") {
  const char* src = "void f(int a, int b, int c, int d) { int e; }";
  LseConfig cfg;
  cfg.seed = 9;
  cfg.suffix_lo = 1;
  cfg.suffix_hi = 3;
  cfg.anonymize_numbers = false;
  cfg.anonymize_strings = false;
  auto tree = syntax::parse(src, Language::C);
  auto map = build_anonymization_map(tree, cfg);
  REQUIRE(map.entries.size() == 6);  // f a b c d e
  std::set<uint64_t> suffixes;
  for (const auto& e : map.entries) suffixes.insert(e.suffix);
  CHECK(suffixes.size() == 6);
  CHECK(suffixes.count(1) == 1);
  CHECK(suffixes.count(2) == 1);
  CHECK(suffixes.count(3) == 1);
  CHECK(*suffixes.rbegin() >= 4);  // extended past the range
}

TEST_CASE("existing placeholder suffixes are reserved") {
  const char* src = "int var_2; void f() { int x; var_2 = x; }";
  LseConfig cfg;
  cfg.seed = 4;
  cfg.suffix_lo = 1;
  cfg.suffix_hi = 2;
  auto tree = syntax::parse(src, Language::C);
  auto map = build_anonymization_map(tree, cfg);
  // var_2 itself is declared here and gets renamed; its old suffix 2 is
  // reserved so no fresh placeholder can collide with the original text.
  for (const auto& e : map.entries) CHECK(e.suffix != 2);
}

TEST_CASE("anti-semantics: output identifiers are placeholders or undeclared") {
  const char* sources[] = {
      kFigSource,
      "void f(int n){ int acc = 0; for (int i = 0; i < n; i++) acc += i; printf(\"%d\", acc); }",
      "double dot(const double *a, const double *b, int n) {\n"
      "  double s = 0;\n"
      "  #pragma omp parallel for reduction(+:s)\n"
      "  for (int i = 0; i < n; i++) s += a[i] * b[i];\n"
      "  return s;\n"
      "}\n",
  };
  for (const char* src : sources) {
    auto tree = syntax::parse(src, Language::C);
    LseConfig cfg;
    cfg.seed = 21;
    auto map = build_anonymization_map(tree, cfg);
    std::set<std::string> declared;
    for (const auto& e : map.entries) {
      if (e.role != Role::Number && e.role != Role::String) declared.insert(e.original);
    }
    std::string out = apply_lse(src, Language::C, cfg);
    auto out_tree = syntax::parse(out, Language::C);
    // directive lines are exempt: pragmas keep their tokens verbatim
    struct Walker {
      const std::set<std::string>& declared;
      void walk(const syntax::SyntaxNode& n) {
        if (n.kind == syntax::NodeKind::PragmaDirective ||
            n.kind == syntax::NodeKind::PreprocDirective) {
          return;
        }
        if (n.kind == syntax::NodeKind::Identifier && n.is_leaf()) {
          bool placeholder = n.text.rfind("func_", 0) == 0 || n.text.rfind("var_", 0) == 0 ||
                             n.text.rfind("arr_", 0) == 0 || n.text.rfind("num_", 0) == 0 ||
                             n.text.rfind("str_", 0) == 0;
          bool was_declared = declared.count(n.text) > 0;
          CHECK_MESSAGE((placeholder || !was_declared), "leaked identifier: ", n.text);
        }
        for (const auto& c : n.children) walk(c);
      }
    } walker{declared};
    walker.walk(out_tree.root);
  }
}

TEST_CASE("output reparses at least as cleanly as the input") {
  const char* sources[] = {
      kFigSource,
      "void f(void) { char *s = \"a b c\"; }",
      "int g(int n) { return n ? g(n - 1) : 1; }",
  };
  for (const char* src : sources) {
    auto original = syntax::parse(src, Language::C);
    LseConfig cfg;
    cfg.seed = 2;
    std::string out = apply_lse(src, Language::C, cfg);
    auto reparsed = syntax::parse(out, Language::C);
    CHECK(reparsed.error_count <= original.error_count);
  }
}
