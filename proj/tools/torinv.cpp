#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "torinv/assembler.hpp"
#include "torinv/corpus.hpp"
#include "torinv/errors.hpp"
#include "torinv/expr.hpp"
#include "torinv/koszul.hpp"

using namespace torinv;
using nlohmann::json;

namespace {

enum Exit { ok = 0, verdict_failed = 1, input_error = 2, cap_exceeded = 3 };

struct Common {
  std::string format = "text";
  std::string output;
  std::size_t group_cap = kDefaultGroupCap;
  std::size_t rank_cap = kDefaultRankCap;
  std::optional<std::size_t> degree_cap;
};

struct LatticeArgs {
  std::string group;
  std::string lattice;
  std::size_t random_rank = 0;
  std::uint64_t seed = 0;
};

void add_lattice_options(CLI::App* app, LatticeArgs& a) {
  app->add_option("--group", a.group, "group of Z, Z^n and group-free explicit files");
  app->add_option("--lattice", a.lattice, "lattice expression");
  app->add_option("--random-rank", a.random_rank, "seeded random lattice of this rank over --group instead");
  app->add_option("--seed", a.seed, "seed for --random-rank");
}

TorusLattice build_lattice(const LatticeArgs& a, const Common& c, GroupRegistry& reg) {
  ExprContext ctx;
  ctx.rank_cap = c.rank_cap;
  ctx.registry = &reg;
  if (!a.group.empty()) ctx.group = reg.get(a.group);
  if (a.random_rank) {
    if (!ctx.group) throw InvalidSpec("--random-rank needs --group");
    if (!a.lattice.empty()) throw InvalidSpec("give either --lattice or --random-rank");
    TorusLattice t;
    t.lattice = random_lattice(ctx.group, a.random_rank, a.seed);
    t.expression = "random " + ctx.group->name() + " " + std::to_string(a.random_rank) + " " + std::to_string(a.seed);
    return t;
  }
  if (a.lattice.empty()) throw InvalidSpec("--lattice is required");
  return parse_lattice_expr(a.lattice, ctx);
}

CohomologyOptions cohom_options(const Common& c) {
  CohomologyOptions o;
  o.degree_cap = c.degree_cap;
  return o;
}

void emit(const Common& c, const std::string& text, const json& structured) {
  std::string out = c.format == "structured" ? structured.dump(2) + "\n" : text;
  if (c.output.empty()) {
    std::cout << out;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw InvalidSpec("cannot write " + c.output);
  f << out;
}

json report_bundle(const std::string& kind, const std::vector<ExactSequenceReport>& reports) {
  json j;
  j["kind"] = kind;
  j["reports"] = json::array();
  for (const auto& r : reports) j["reports"].push_back(r.to_json());
  return j;
}

std::string texts(const std::vector<ExactSequenceReport>& reports) {
  std::string s;
  for (const auto& r : reports) s += r.to_text();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice cohomology and invariant diagrams for algebraic tori"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--format", c.format, "text or structured (JSON)")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--output,-o", c.output, "write to this file instead of stdout");
  app.add_option("--group-cap", c.group_cap, "largest group order accepted")->capture_default_str();
  app.add_option("--rank-cap", c.rank_cap, "largest lattice rank built")->capture_default_str();
  app.add_option("--degree-cap", c.degree_cap, "largest cohomological degree (default 3 for nonabelian |G| >= 8, else 5)");

  LatticeArgs cohom_args;
  std::size_t degree = 0;
  bool qz = false;
  auto* cohom = app.add_subcommand("cohom", "H^i(G, M)");
  add_lattice_options(cohom, cohom_args);
  cohom->add_option("--degree", degree, "i")->required();
  cohom->add_flag("--qz", qz, "coefficients M (x) Q/Z");

  std::string ses_path;
  std::size_t q = 0;
  auto* koszul = app.add_subcommand("koszul-verify", "check K(alpha, q) resolves S^q(T)");
  koszul->add_option("--ses", ses_path, "short exact sequence file")->required();
  koszul->add_option("--q", q, "symmetric degree")->required();

  LatticeArgs resolve_args;
  std::string resolve_kind;
  auto* resolve = app.add_subcommand("resolve", "flasque or coflasque resolution with certificate");
  add_lattice_options(resolve, resolve_args);
  resolve->add_option("--kind", resolve_kind, "flasque or coflasque")
      ->required()
      ->check(CLI::IsMember({"flasque", "coflasque"}));

  LatticeArgs report_args;
  std::string report_kind, profile_path, ch3 = "unknown";
  auto* report = app.add_subcommand("report", "exact-sequence report");
  report->add_option("kind", report_kind, "inv4, inv5, hs-weight3, unramified, special-family or q8")
      ->required()
      ->check(CLI::IsMember({"inv4", "inv5", "hs-weight3", "unramified", "special-family", "q8"}));
  report->add_option("--torus", report_args.lattice, "character lattice expression (S^ for unramified)");
  report->add_option("--group", report_args.group, "group of Z and Z^n in the expression");
  report->add_option("--profile", profile_path, "field profile file");
  report->add_option("--ch3-tors", ch3, "CH^3(BT)_tors for the q8 report: nonzero or unknown")
      ->check(CLI::IsMember({"nonzero", "unknown"}));

  std::vector<std::string> case_names;
  std::string corpus_dir;
  auto* corpus = app.add_subcommand("corpus", "run the worked-example corpus");
  corpus->add_option("cases", case_names, "case names (default: all)");
  corpus->add_option("--dir", corpus_dir, "corpus directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return input_error;
  }

  try {
    GroupRegistry reg(c.group_cap);
    if (*cohom) {
      auto t = build_lattice(cohom_args, c, reg);
      auto r = qz ? cohomology_qz(t.lattice, degree, cohom_options(c)) : cohomology(t.lattice, degree, cohom_options(c));
      json j{{"group", t.lattice.group().name()},
             {"lattice", t.expression},
             {"rank", t.lattice.rank()},
             {"coefficients", qz ? "Q/Z" : "Z"},
             {"degree", degree},
             {"structure", r.value_string()}};
      emit(c, r.value_string() + "\n", j);
      return ok;
    }
    if (*koszul) {
      ExprContext ctx;
      ctx.rank_cap = c.rank_cap;
      ctx.registry = &reg;
      auto ses = read_ses_file(ses_path, ctx);
      auto v = verify_koszul_quasi_iso(ses, q, c.rank_cap);
      json h = json::array();
      std::ostringstream os;
      os << (v.pass ? "pass" : "fail") << "\n";
      for (std::size_t k = 0; k < v.homology.size(); ++k) {
        h.push_back(v.homology[k].to_string());
        os << "  H_" << k << " = " << v.homology[k].to_string() << "\n";
      }
      os << "  rank S^" << q << "(T) = " << v.sym_target_rank << "\n";
      if (!v.detail.empty()) os << "  " << v.detail << "\n";
      emit(c, os.str(),
           {{"q", q},
            {"pass", v.pass},
            {"homology", h},
            {"sym_target_rank", v.sym_target_rank},
            {"higher_homology_vanishes", v.higher_homology_vanishes},
            {"sym_beta_surjective", v.sym_beta_surjective},
            {"kernel_matches", v.kernel_matches},
            {"detail", v.detail}});
      return v.pass ? ok : verdict_failed;
    }
    if (*resolve) {
      auto t = build_lattice(resolve_args, c, reg);
      auto r = resolve_kind == "flasque" ? flasque_resolution(t.lattice, cohom_options(c))
                                         : coflasque_resolution(t.lattice, cohom_options(c));
      const bool perm = is_permutation_in_basis(r.ses.left.target).holds;
      const bool good = r.exactness.exact && perm && r.certificate.holds;
      std::ostringstream os;
      os << "0 -> " << r.ses.left.source.rank() << " -> " << r.ses.left.target.rank() << " -> "
         << r.ses.right.target.rank() << " -> 0\n"
         << "exact: " << (r.exactness.exact ? "yes" : "no " + r.exactness.detail) << "\n"
         << "middle permutation: " << (perm ? "yes" : "no") << "\n"
         << "certificate: " << r.certificate.to_string() << "\n"
         << "left:\n" << format_lattice(r.ses.left.source) << "middle:\n" << format_lattice(r.ses.left.target)
         << "right:\n" << format_lattice(r.ses.right.target);
      emit(c, os.str(),
           {{"kind", resolve_kind},
            {"exact", r.exactness.exact},
            {"middle_permutation", perm},
            {"certificate", r.certificate.to_string()},
            {"certified", good},
            {"ranks", {r.ses.left.source.rank(), r.ses.left.target.rank(), r.ses.right.target.rank()}},
            {"left", format_lattice(r.ses.left.source)},
            {"middle", format_lattice(r.ses.left.target)},
            {"right", format_lattice(r.ses.right.target)}});
      return good ? ok : verdict_failed;
    }
    if (*report) {
      FieldProfile profile;
      if (!profile_path.empty()) profile = read_profile(profile_path, &reg);
      if (report_kind == "q8") {
        auto r = q8_conclusion(profile, ch3 == "nonzero");
        emit(c, r.to_text(), r.to_json());
        return ok;
      }
      auto t = build_lattice(report_args, c, reg);
      if (report_kind == "inv4" || report_kind == "inv5" || report_kind == "hs-weight3") {
        auto r = report_kind == "inv4"   ? assemble_inv4(t, profile)
                 : report_kind == "inv5" ? assemble_inv5(t, profile)
                                         : hs_weight3_sequence(t, profile);
        emit(c, r.to_text(), r.to_json());
        return ok;
      }
      std::vector<ExactSequenceReport> rs;
      if (report_kind == "unramified") {
        auto [r4, r5] = assemble_unramified(t, profile);
        rs = {std::move(r4), std::move(r5)};
      } else {
        rs = special_family_reports(t, profile);
      }
      emit(c, texts(rs), report_bundle(report_kind, rs));
      return ok;
    }
    if (*corpus) {
      auto cases = corpus_list(corpus_dir.empty() ? default_corpus_dir() : std::filesystem::path(corpus_dir));
      if (!case_names.empty()) {
        std::vector<CorpusCase> picked;
        for (const auto& n : case_names) {
          auto it = std::find_if(cases.begin(), cases.end(), [&](const CorpusCase& k) { return k.name == n; });
          if (it == cases.end()) throw InvalidSpec("no corpus case named " + n);
          picked.push_back(*it);
        }
        cases = std::move(picked);
      }
      bool all = true;
      std::ostringstream os;
      json j = json::array();
      for (const auto& k : cases) {
        auto r = run_case(k);
        all = all && r.pass;
        os << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.facts.size() << " facts, " << r.seconds << " s)\n";
        json facts = json::array();
        for (const auto& f : r.facts) {
          if (!f.pass) os << "    " << f.fact << "  observed: " << f.observed << "\n";
          facts.push_back({{"fact", f.fact}, {"pass", f.pass}, {"observed", f.observed}});
        }
        j.push_back({{"name", r.name}, {"pass", r.pass}, {"facts", facts}});
      }
      emit(c, os.str(), {{"cases", j}, {"pass", all}});
      return all ? ok : verdict_failed;
    }
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return cap_exceeded;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return input_error;
  }
  return ok;
}
