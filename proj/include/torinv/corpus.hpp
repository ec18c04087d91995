#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "torinv/tori.hpp"

namespace torinv {

/// 0 -> P^ -> Q^ -> T^ -> 0 for Q8: Q^ = Z[Q8] with basis e,e',x,x',y,y',z,z'
/// for 1,-1,i,-i,j,-j,k,-k; P^ = Z[Q8/{1,-1}] sent to e+e', x+x', y+y', z+z';
/// T^ with basis the classes of e,x,y,z.
ShortExactSequence build_q8_sequence();

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerdictBundle {
  std::vector<Verdict> verdicts;
  bool pass() const;
  const Verdict& get(const std::string& name) const;
};

/// Verdict names:
///   "decomposition basis", "summands stable", "summand ranks",
///   "printed P_z reading", "monomial decomposition",
///   "M permutation", "M = Z[Q8/{1,-1}]",
///   "N_x character", "N_x sequence exact", "N_x quotient character",
///   "H^1(Q8, M) = 0", "koszul q<=3".
VerdictBundle verify_q8_module_structure();

/// Rank-r lattice over g: a direct sum of small blocks (trivial, sign,
/// regular, norm-one) conjugated by a random unimodular matrix.
GLattice random_lattice(const GroupPtr& g, std::size_t rank, std::uint64_t seed);

struct CorpusFact {
  std::string kind;
  std::vector<std::string> args;
  std::string expected;
  /// "stated: ..." for identities printed with the worked examples,
  /// "oracle: ..." for values fixed by an independent computation.
  std::string source;
  std::string to_string() const;
};

struct CorpusCase {
  std::string name;
  std::string description;
  /// Lattice expression, or "random G r seed" for seeded lattices.
  std::string lattice;
  std::optional<std::uint64_t> seed;
  /// Short exact sequence file, relative to the case file.
  std::string ses;
  std::vector<CorpusFact> facts;
  std::filesystem::path file;
};

struct FactResult {
  std::string fact;
  bool pass = false;
  std::string observed;
};

struct CaseResult {
  std::string name;
  bool pass = false;
  std::vector<FactResult> facts;
  double seconds = 0;
};

std::filesystem::path default_corpus_dir();
/// Case file format, one directive per line, '#' comments:
///   name <id>
///   description <text>
///   lattice <expr> | lattice random <G> <rank> <seed>
///   ses <file>
///   expect <kind> <args...> = <value> | <source>
CorpusCase read_case(const std::filesystem::path& path);
/// All *.case files of the directory, sorted by name.
std::vector<CorpusCase> corpus_list(const std::filesystem::path& dir = default_corpus_dir());
TorusLattice case_lattice(const CorpusCase& c);
CaseResult run_case(const CorpusCase& c);

}  // namespace torinv
