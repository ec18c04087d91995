#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "torinv/term.hpp"
#include "torinv/tori.hpp"

namespace torinv {

struct ReportNode {
  std::string id;
  std::string label;
  TermPtr term;
  TermPtr simplified;
  std::string anchor;
  /// Set when the label names a term defined elsewhere (primed kernels, Q8 summands).
  std::string definition;
  /// A second reading of the same definition, when sources disagree.
  std::string alternative_definition;
};

struct ReportArrow {
  std::string from;
  std::string to;
  /// "", "inj", "surj", "iso", or the name of a map ("gamma", "cup").
  std::string label;
  /// Name of the exact sequence the arrow belongs to; empty for arrows that
  /// only commute.
  std::string exact_at;
};

struct ExactSequenceReport {
  std::string kind;
  std::string title;
  std::string anchor;
  std::vector<ReportNode> nodes;
  std::vector<ReportArrow> arrows;
  std::vector<SimplificationEntry> log;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, std::string>> facts;
  std::vector<ExactSequenceReport> subreports;

  const ReportNode& node(const std::string& id) const;
  const ReportNode* find_label(const std::string& label) const;
  std::string fact(const std::string& key) const;
  const ExactSequenceReport* subreport(const std::string& kind) const;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

/// Structure of a term built only from computed pieces: groups, group
/// cohomology, lattices (their rank) and invariants of lattices.
std::optional<AbelianGroupStructure> evaluate_term(const TermPtr& t);

/// Labeled directed graph isomorphism of the "nodes"/"arrows" parts of two
/// report documents. Node labels and arrow labels must correspond.
bool same_shape(const nlohmann::json& a, const nlohmann::json& b, std::string* why = nullptr);
nlohmann::json read_json_file(const std::filesystem::path& path);

/// S^q(T^) named "T^" for q = 1 and "S^q(T^)" otherwise; empty name for q = 0.
std::string sym_name(std::size_t q, const std::string& base = "T^");

struct E2Cell {
  int p = 0;
  int q = 0;
  TermPtr term;
};
/// Cells H^{p-q}(F, S^q(T^) (x) Z(n-q)) of the slice spectral sequence for
/// p in [p_lo, p_hi], q in [q_lo, q_hi]. Cells with p < q are 0.
std::vector<E2Cell> e2_page(const TorusLattice& t, int n, std::pair<int, int> p_range, std::pair<int, int> q_range);

struct MotivicEntry {
  std::size_t degree = 0;
  /// One term, or (sub, quotient) of a two-step extension.
  std::vector<TermPtr> terms;
  bool extension = false;
  std::string to_string() const;
};
/// Reduced motivic cohomology of BT_sep in weight 3 (degrees 0..6) or 4 (0..7).
std::vector<MotivicEntry> motivic_table(const TorusLattice& t, int weight);

ExactSequenceReport hs_weight3_sequence(const TorusLattice& t, const FieldProfile& profile);
ExactSequenceReport assemble_inv4(const TorusLattice& t, const FieldProfile& profile);
ExactSequenceReport assemble_inv5(const TorusLattice& t, const FieldProfile& profile);
/// Flasque resolution 0 -> S^ -> P^ -> T^ -> 0, then the degree 4 and 5
/// diagrams for T^ with invariant nodes read as unramified cohomology of F(S).
std::pair<ExactSequenceReport, ExactSequenceReport> assemble_unramified(const TorusLattice& s,
                                                                        const FieldProfile& profile);
/// Throws FamilyDatumMissing unless t carries a family datum.
std::vector<ExactSequenceReport> special_family_reports(const TorusLattice& t, const FieldProfile& profile);

inline const std::string kQ8Conclusion = "nontrivial Inv^4 element not in the image of gamma";
ExactSequenceReport q8_conclusion(const FieldProfile& profile, bool ch3_tors_nonzero);

}  // namespace torinv
