#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "catdesign/structure.hpp"

namespace catdesign {

struct LineSpan {
  int first = 0;
  int last = 0;
};

struct CifLoop {
  std::vector<std::string> tags;                 // as written
  std::vector<std::vector<std::string>> rows;    // each row has tags.size() values
  std::vector<int> row_lines;                    // line of the first value of each row
  int line = 0;                                  // line of the loop_ keyword

  /// Case-insensitive column lookup.
  std::optional<std::size_t> column(std::string_view tag) const;
};

/// Raw key/value + loop content of the first data block of a CIF file.
/// Values are kept exactly as written, minus quoting delimiters.
struct CifDocument {
  std::string data_block_name;
  int data_block_line = 0;
  std::vector<std::pair<std::string, std::string>> scalars;  // file order
  std::vector<CifLoop> loops;
  std::map<std::string, LineSpan> source_line_spans;        // key: lower-case tag

  /// Case-insensitive lookups.
  const std::string* scalar(std::string_view tag) const;
  const CifLoop* loop_with(std::string_view tag) const;
  bool has_tag(std::string_view tag) const;
};

enum class DefectCode {
  syntax,
  missing_lattice,
  bad_number,
  unknown_element,
  empty_sites,
  missing_space_group,
  duplicate_label,
  inconsistent_loop,
};

/// Upper-case wire name, e.g. "MISSING_LATTICE".
std::string_view to_string(DefectCode code);
bool is_fatal(DefectCode code);

struct Defect {
  DefectCode code;
  std::string message;
  int line = 0;
};

struct ParseOutcome {
  std::optional<Structure> structure;
  std::optional<CifDocument> document;
  std::vector<Defect> defects;
  /// Fractional coordinates as written, before wrapping (one per site).
  std::vector<Eigen::Vector3d> raw_fractional;

  bool ok() const { return structure.has_value(); }
  bool has(DefectCode code) const;
};

struct ParseOptions {
  std::size_t max_bytes = std::size_t{1} << 20;
  std::size_t max_defects = 64;
};

/// Never throws on malformed input; every problem becomes a Defect.
ParseOutcome parse_cif(std::string_view text, const ParseOptions& options = {});

/// Number with an optional standard-uncertainty suffix, e.g. "4.123(5)".
/// Returns nullopt for placeholders ("?", "."), trailing garbage or non-finite values.
std::optional<double> parse_cif_number(std::string_view value);

/// Fixed tag order: data block, cell, symmetry, atom_site loop. Numbers use
/// nine fractional digits. Structures without a space group are written as P 1.
std::string serialize_cif(const Structure& s);

/// One JSON object per line: {"code", "message", "line"}.
std::string defects_to_jsonl(const std::vector<Defect>& defects);

namespace cif_tags {
inline constexpr std::string_view kCellLength[3] = {"_cell_length_a", "_cell_length_b", "_cell_length_c"};
inline constexpr std::string_view kCellAngle[3] = {"_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma"};
inline constexpr std::string_view kSpaceGroupName[2] = {"_symmetry_space_group_name_H-M",
                                                        "_space_group_name_H-M_alt"};
inline constexpr std::string_view kSpaceGroupNumber[2] = {"_symmetry_Int_Tables_number",
                                                          "_space_group_IT_number"};
inline constexpr std::string_view kLabel = "_atom_site_label";
inline constexpr std::string_view kTypeSymbol = "_atom_site_type_symbol";
inline constexpr std::string_view kFract[3] = {"_atom_site_fract_x", "_atom_site_fract_y",
                                               "_atom_site_fract_z"};
}  // namespace cif_tags

}  // namespace catdesign
