// nilword: word maps on finite groups of nilpotency class 2.
//
// Exit codes: 0 pass, 1 semantic failure, 2 parse error, 3 invalid flags,
// 4 enumeration budget exceeded.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "nilword/nilword.hpp"

using namespace nilword;

namespace {

enum Exit { kPass = 0, kFail = 1, kParse = 2, kFlags = 3, kBudget = 4 };

struct Config {
  std::string word;
  std::string word2;
  std::string group;
  std::string cert_path;
  i64 p = 0;
  int exp = 0;  // 0 = not given
  int k = 0;    // 0 = word rank
  u64 budget = kDefaultBudget;
  u64 samples = 0;
  u64 seed = 1;
  unsigned jobs = 1;
  std::string format = "text";
  std::string out;
};

class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw FlagError("cannot write '" + path + "'");
    }
  }
  std::ostream& operator()() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int ambient_rank(const Config& c, const Word& w) {
  if (c.k == 0) return w.rank();
  if (c.k < w.rank()) throw FlagError("--k " + std::to_string(c.k) + " is below the word rank " + std::to_string(w.rank()));
  return c.k;
}

DistOptions dist_options(const Config& c) { return DistOptions{c.budget, c.jobs, Engine::class2}; }

Group require_group(const Config& c) {
  if (c.group.empty()) throw FlagError("--group is required");
  return catalog_group(c.group);
}

/// p and E from flags, falling back to the group's exponent.
std::pair<i64, int> prime_context(const Config& c) {
  i64 p = c.p;
  int E = c.exp;
  if (!c.group.empty()) {
    Group g = catalog_group(c.group);
    auto s = g.structure_report();
    if (!s.is_p_group) throw FlagError("group " + g.name() + " is not a p-group; give --p");
    if (p == 0) p = static_cast<i64>(s.p);
    if (E == 0) E = exponent_valuation(g.exponent(), s.p);
    if (static_cast<u64>(p) != s.p) throw FlagError("--p does not match the group's prime");
  }
  if (p == 0) throw FlagError("--p is required without --group");
  if (!is_prime(p)) throw FlagError("--p " + std::to_string(p) + " is not prime");
  if (E == 0) E = 4;
  if (E < 1) throw FlagError("--exp must be at least 1");
  return {p, E};
}

void echo_config(std::ostream& out, const Config& c, const std::string& extra) {
  out << "config:";
  if (!c.group.empty()) out << " group=" << c.group;
  out << extra << " budget=" << c.budget << " jobs=" << c.jobs << "\n";
}

int cmd_canonicalize(const Config& c) {
  auto [p, E] = prime_context(c);
  Word w = parse_word(c.word);
  const int k = ambient_rank(c, w);
  w = w.with_rank(k);
  auto result = canonicalize(w, p, E);
  Output o(c.out);
  auto& out = o();
  out << "config: p=" << p << " E=" << E << " k=" << k << "\n";
  out << "word: " << c.word << "\n";
  out << "class2: " << result.form.to_string() << "\n";
  out << "chain: " << result.chain.to_string() << "  " << result.chain.notation() << "\n";
  out << "v-form: " << result.vform.to_string() << "  " << result.vform.notation() << "\n";
  switch (result.vform.variant) {
    case VVariant::primitive: out << "primitive: automorphic to x1\n"; break;
    case VVariant::pure_commutator:
      if (result.vform.word().is_identity())
        out << "constant: trivial on groups of exponent dividing " << PrimeContext{p, E}.modulus() << "\n";
      else
        out << "pure commutator: word map lands in G'\n";
      break;
    case VVariant::power_with_tail:
      if (std::none_of(result.vform.s.begin(), result.vform.s.end(), [](const auto& x) { return x.has_value(); }))
        out << "power word: automorphic to x1^" << result.vform.ppow(*result.vform.r) << "\n";
      break;
  }
  out << "constraints: " << (result.vform.satisfies_constraints() ? "hold" : "VIOLATED") << "\n";
  Certificate cert = result.full_certificate();
  auto verdict = verify_certificate(cert);
  out << "certificate: steps=" << cert.steps.size() << " replay=" << (verdict.passed ? "PASS" : "FAIL") << "\n";
  out << cert.serialize();
  return verdict.passed ? kPass : kFail;
}

int cmd_dist(const Config& c) {
  Group g = require_group(c);
  Word w = parse_word(c.word);
  const int k = ambient_rank(c, w);
  Dist d = c.samples > 0 ? sampled_distribution(g, w, k, c.samples, c.seed) : exact_distribution(g, w, k, dist_options(c));
  Output o(c.out);
  auto& out = o();
  if (c.format == "csv") {
    out << to_csv(g, d);
    return kPass;
  }
  std::string extra = " k=" + std::to_string(k);
  if (d.approximate) extra += " samples=" + std::to_string(c.samples) + " seed=" + std::to_string(c.seed);
  echo_config(out, c, extra);
  out << "word: " << c.word << "\n";
  out << (d.approximate ? "estimate" : "exact") << " distribution over " << d.total << (d.approximate ? " samples" : " tuples") << "\n";
  out << "support: " << d.support_size() << " of " << g.order() << "\n";
  for (u64 i = 0; i < d.counts.size(); ++i)
    if (d.counts[i] != 0) out << g.format(g.element_at(i)) << "\t" << d.counts[i] << "\t" << format_rational(d.probability(i)) << "\n";
  return kPass;
}

int cmd_check(const Config& c) {
  Group g = require_group(c);
  Word w = parse_word(c.word);
  const int k = ambient_rank(c, w);
  BoundReport b = bound_report(g, w, k, dist_options(c));
  Output o(c.out);
  auto& out = o();
  echo_config(out, c, " k=" + std::to_string(k));
  out << "word: " << c.word << "\n";
  out << "|G| = " << b.order << ", |G'| = " << b.derived_order << "\n";
  out << "min on image: " << format_rational(b.min_prob_on_image) << " at " << g.format(g.element_at(b.argmin)) << "\n";
  bool ok = true;
  auto line = [&](const std::string& name, const Rational& bound, bool holds, bool applicable, const std::string& why) {
    out << name << ": " << format_rational(b.min_prob_on_image) << " >= " << format_rational(bound) << " ";
    if (applicable) {
      out << (holds ? "PASS" : "FAIL");
      ok = ok && holds;
    } else {
      out << (holds ? "holds" : "fails") << " (not predicted)";
    }
    if (!why.empty()) out << " [" << why << "]";
    out << "\n";
  };
  line("improved", b.improved_bound, b.improved_holds, true, "class 2");
  std::string reasons;
  auto add = [&](bool on, const char* r) {
    if (on) reasons += (reasons.empty() ? "" : ", ") + std::string(r);
  };
  add(b.odd_p && b.gp_in_derived, "odd p and g^p in G'");
  add(b.extraspecial, "extraspecial");
  add(b.power_word, "power word");
  add(b.surjective_word, "surjective word");
  line("amit", b.amit_bound, b.amit_holds_on_image, b.amit_applicable(), reasons);
  if (b.square_bound) {
    line("square", *b.square_bound, *b.square_holds, true, "odd p and g^p in G'");
    if (!*b.square_holds && b.surjective_word) out << "note: primitive word, uniform at 1/|G|; 1/|G'|^2 needs the abelianization gcd divisible by p\n";
  }
  out << "literal reading (every g in G): " << (b.literal_improved_holds ? "holds" : "fails outside the image") << "\n";
  out << "uniform: " << (b.uniform ? "true" : "false") << ", surjective: " << (b.surjective ? "true" : "false") << "\n";
  return ok ? kPass : kFail;
}

int cmd_same(const Config& c) {
  Group g = require_group(c);
  Word a = parse_word(c.word), b = parse_word(c.word2);
  auto r = same_distribution(g, a, b, dist_options(c));
  Output o(c.out);
  auto& out = o();
  echo_config(out, c, "");
  if (r.equal) {
    out << "equal\n";
    return kPass;
  }
  out << "diverge at " << g.format(g.element_at(*r.first_divergence)) << ": " << format_rational(r.left) << " vs " << format_rational(r.right) << "\n";
  return kFail;
}

int cmd_group(const Config& c) {
  Group g = catalog_group(c.group);
  auto s = g.structure_report();
  Output o(c.out);
  auto& out = o();
  if (c.format == "presentation") {
    out << emit_presentation(g.spec());
    return kPass;
  }
  const u64 quotient = s.order / s.derived_order;
  out << "group: " << g.name() << "\n";
  out << "order: " << s.order << "\n";
  out << "|G'|: " << s.derived_order << "\n";
  out << "|Z(G)|: " << s.center_order << "\n";
  out << "|G/G'|: " << quotient << "\n";
  out << "exponent: " << s.exponent << "\n";
  out << "p-group: " << (s.is_p_group ? "true (p = " + std::to_string(s.p) + ")" : std::string("false")) << "\n";
  out << "g^p in G' for all g: " << (s.gp_in_derived ? "true" : "false") << "\n";
  out << "special: " << (s.is_special ? "true" : "false") << "\n";
  out << "extraspecial: " << (s.is_extraspecial ? "true" : "false") << "\n";
  out << "|G/G'| < |G'|: " << (s.quotient_at_least_derived ? "false" : "true") << "\n";
  return kPass;
}

int cmd_catalog(const Config& c) {
  Output o(c.out);
  for (const auto& [spec, what] : catalog_families()) o() << spec << "\t" << what << "\n";
  return kPass;
}

int cmd_verify(const Config& c) {
  std::string text;
  if (c.cert_path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(c.cert_path);
    if (!in) throw FlagError("cannot read '" + c.cert_path + "'");
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  // accept a whole canonicalize report
  if (const auto at = text.find("\n# rank="); text.rfind("# rank=", 0) != 0 && at != std::string::npos) text.erase(0, at + 1);
  Certificate cert = Certificate::parse(text);
  CertificateVerdict v = c.group.empty() ? verify_certificate(cert) : verify_certificate(cert, catalog_group(c.group), dist_options(c));
  Output o(c.out);
  auto& out = o();
  out << "certificate: rank " << cert.rank << ", p=" << cert.context.p << " E=" << cert.context.precision << ", " << cert.steps.size() << " steps\n";
  for (const auto& f : v.failures) {
    if (f.index < cert.steps.size())
      out << "step " << f.index + 1 << ": " << f.reason << "\n";
    else
      out << "target: " << f.reason << "\n";
  }
  out << "algebraic replay" << (v.empirical_checked ? " + distribution check" : "") << ": " << (v.passed ? "PASS" : "FAIL") << "\n";
  return v.passed ? kPass : kFail;
}

u64 env_budget() {
  const char* env = std::getenv("NILWORD_BUDGET");
  if (!env || !*env) return kDefaultBudget;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(env, &used);
    if (used == std::string(env).size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FlagError(std::string("NILWORD_BUDGET='") + env + "' is not a positive integer");
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Word maps on finite groups of nilpotency class 2"};
  app.require_subcommand(1);
  u64 budget_flag = 0;
  c.jobs = std::max(1u, std::thread::hardware_concurrency());

  auto common = [&](CLI::App* sub) {
    sub->add_option("--budget", budget_flag, "word-evaluation budget (default 5e8, or NILWORD_BUDGET)")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", c.jobs, "worker threads for exact enumeration")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "write the report to this file");
  };

  auto* canon = app.add_subcommand("canonicalize", "chain form, v-form and certificate of a word");
  canon->add_option("word", c.word, "word, e.g. \"x1^3 [x1,x2]\"")->required();
  canon->add_option("--p", c.p, "prime");
  canon->add_option("--exp", c.exp, "precision E (work mod p^E), default 4 or from --group")->check(CLI::PositiveNumber);
  canon->add_option("--k", c.k, "ambient rank")->check(CLI::PositiveNumber);
  canon->add_option("--group", c.group, "take p and E from this group");
  common(canon);

  auto* dist = app.add_subcommand("dist", "distribution of a word map");
  dist->add_option("word", c.word)->required();
  dist->add_option("--group", c.group)->required();
  dist->add_option("--k", c.k)->check(CLI::PositiveNumber);
  dist->add_option("--samples", c.samples, "estimate from this many seeded samples")->check(CLI::PositiveNumber);
  dist->add_option("--seed", c.seed, "sampling seed");
  dist->add_option("--format", c.format)->check(CLI::IsMember({"text", "csv"}));
  common(dist);

  auto* check = app.add_subcommand("check", "probability bounds for a word on a group");
  std::string positional_word;
  auto* word_opt = check->add_option("--word", c.word);
  check->add_option("word_pos", positional_word, "word (alternative to --word)")->excludes(word_opt);
  check->add_option("--group", c.group)->required();
  check->add_option("--k", c.k)->check(CLI::PositiveNumber);
  common(check);

  auto* same = app.add_subcommand("same", "are two words identically distributed");
  same->add_option("word1", c.word)->required();
  same->add_option("word2", c.word2)->required();
  same->add_option("--group", c.group)->required();
  common(same);

  auto* group = app.add_subcommand("group", "structure report of a catalog group");
  group->add_option("spec", c.group)->required();
  group->add_option("--format", c.format)->check(CLI::IsMember({"text", "presentation"}));
  group->add_option("--out", c.out);

  auto* catalog = app.add_subcommand("catalog", "list group families");
  catalog->add_option("--out", c.out);

  auto* verify = app.add_subcommand("verify-cert", "replay a certificate transcript");
  verify->add_option("file", c.cert_path, "certificate file, - for stdin")->required();
  verify->add_option("--group", c.group, "also compare distributions on this group");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlags;
  }

  try {
    c.budget = budget_flag ? budget_flag : env_budget();
    if (check->parsed() && c.word.empty()) c.word = positional_word;
    if (check->parsed() && c.word.empty()) throw FlagError("check needs a word (positional or --word)");
    if (canon->parsed()) return cmd_canonicalize(c);
    if (dist->parsed()) return cmd_dist(c);
    if (check->parsed()) return cmd_check(c);
    if (same->parsed()) return cmd_same(c);
    if (group->parsed()) return cmd_group(c);
    if (catalog->parsed()) return cmd_catalog(c);
    if (verify->parsed()) return cmd_verify(c);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (required " << e.required() << ")\n";
    return kBudget;
  } catch (const FlagError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlags;
  } catch (const GroupError& e) {
    std::cerr << "group error: " << e.what() << "\n";
    return kFlags;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFlags;
  }
  return kFlags;
}
