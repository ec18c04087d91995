#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "torinv/tori.hpp"

namespace torinv {

/// Resolves group names to shared group objects, so that lattices built from
/// the same name in one session share one FiniteGroup.
class GroupRegistry {
 public:
  explicit GroupRegistry(std::size_t cap = kDefaultGroupCap) : cap_(cap) {}
  GroupPtr get(const std::string& text);
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
  std::map<std::string, GroupPtr> groups_;
};

struct ExprContext {
  /// Group of "Z", "Z^n" and explicit files without a group line. When unset
  /// the group is taken from the expression itself.
  GroupPtr group;
  /// Directory that explicit(...) paths are relative to.
  std::filesystem::path base_dir = ".";
  std::size_t rank_cap = kDefaultRankCap;
  GroupRegistry* registry = nullptr;
};

/// Grammar, with (x) binding tighter than (+):
///   expr := term ("(+)" term)*      term := atom ("(x)" atom)*
///   atom := "Z" | "Z^" n | "Z[" G "]" | "Z[" G "/" H "]" | "dual(" expr ")"
///         | "sym(" expr "," n ")" | "wedge(" expr "," n ")" | "norm_one(" G ")"
///         | "explicit(" path ")" | "(" expr ")"
/// G is anything parse_group accepts, H anything parse_subgroup accepts.
TorusLattice parse_lattice_expr(const std::string& text, const ExprContext& ctx = {});

/// Lines "group G" (optional), "rank r", "labels ..." (optional), then one
/// matrix per group generator in the intlin text format. '#' starts a comment line.
GLattice read_explicit_lattice(const std::filesystem::path& path, const ExprContext& ctx = {});
std::string format_explicit_lattice(const GLattice& l, const std::string& group_text);

/// Short exact sequence file:
///   group G
///   left <expr>
///   middle <expr>
///   right <expr> | right quotient
///   alpha <matrix>
///   beta <matrix>            (omitted with "right quotient")
ShortExactSequence read_ses_file(const std::filesystem::path& path, const ExprContext& ctx = {});

}  // namespace torinv
