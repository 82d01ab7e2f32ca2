#include "catdesign/cif.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <span>
#include <array>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "catdesign/elements.hpp"

namespace catdesign {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

bool is_placeholder(std::string_view v) { return v == "?" || v == "."; }

bool is_illegal_control(char ch) {
  auto c = static_cast<unsigned char>(ch);
  return (c < 0x20 && c != '\t' && c != '\n' && c != '\r') || c == 0x7f;
}

class DefectSink {
public:
  DefectSink(std::vector<Defect>& out, std::size_t cap) : out_(out), cap_(cap) {}

  void add(DefectCode code, std::string message, int line) {
    if (out_.size() < cap_) {
      out_.push_back({code, std::move(message), line});
    } else if (!truncated_) {
      truncated_ = true;
      // Keep the fatal/non-fatal partition intact when the cap is hit.
      out_.push_back({DefectCode::syntax, "too many defects; further reports suppressed", line});
    }
  }

private:
  std::vector<Defect>& out_;
  std::size_t cap_;
  bool truncated_ = false;
};

enum class TokenKind { tag, value, loop, data, reserved };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int end_line;
};

class Tokenizer {
public:
  Tokenizer(std::string_view text, DefectSink& sink) : text_(text), sink_(sink) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (auto tok = next()) tokens.push_back(std::move(*tok));
    return tokens;
  }

private:
  std::optional<Token> next() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (is_blank(c)) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == ';' && (pos_ == 0 || text_[pos_ - 1] == '\n')) {
        return text_field();
      } else if (c == '\'' || c == '"') {
        return quoted(c);
      } else {
        return bare();
      }
    }
    return std::nullopt;
  }

  std::optional<Token> text_field() {
    const int start_line = line_;
    const std::size_t close = text_.find("\n;", pos_);
    if (close == std::string_view::npos) {
      sink_.add(DefectCode::syntax, "unterminated text field", start_line);
      pos_ = text_.size();
      return std::nullopt;
    }
    std::string value(text_.substr(pos_ + 1, close - pos_ - 1));
    line_ += static_cast<int>(std::count(text_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                         text_.begin() + static_cast<std::ptrdiff_t>(close) + 1, '\n'));
    pos_ = close + 2;
    return Token{TokenKind::value, std::move(value), start_line, line_};
  }

  std::optional<Token> quoted(char q) {
    std::size_t j = pos_ + 1;
    while (j < text_.size() && text_[j] != '\n') {
      if (text_[j] == q && (j + 1 == text_.size() || is_blank(text_[j + 1]))) {
        Token tok{TokenKind::value, std::string(text_.substr(pos_ + 1, j - pos_ - 1)), line_, line_};
        pos_ = j + 1;
        return tok;
      }
      ++j;
    }
    sink_.add(DefectCode::syntax, "unterminated quoted string", line_);
    // Resume on the next line so one bad quote does not swallow the file.
    pos_ = j;
    return next();
  }

  std::optional<Token> bare() {
    std::size_t j = pos_;
    while (j < text_.size() && !is_blank(text_[j])) ++j;
    std::string_view word = text_.substr(pos_, j - pos_);
    pos_ = j;
    Token tok{TokenKind::value, std::string(word), line_, line_};
    if (word.front() == '_') {
      tok.kind = TokenKind::tag;
    } else if (word.size() >= 5 && iequals(word.substr(0, 5), "data_")) {
      tok.kind = TokenKind::data;
      tok.text = std::string(word.substr(5));
    } else if (iequals(word, "loop_")) {
      tok.kind = TokenKind::loop;
    } else if (iequals(word, "stop_") || iequals(word, "global_") ||
               (word.size() >= 5 && iequals(word.substr(0, 5), "save_"))) {
      tok.kind = TokenKind::reserved;
    }
    return tok;
  }

  std::string_view text_;
  DefectSink& sink_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class DocumentBuilder {
public:
  explicit DocumentBuilder(DefectSink& sink) : sink_(sink) {}

  std::optional<CifDocument> build(const std::vector<Token>& tokens) {
    bool reported_preamble = false;
    std::size_t i = 0;
    while (i < tokens.size()) {
      const Token& t = tokens[i];
      if (t.kind == TokenKind::data) {
        if (doc_) break;  // only the first data block is read
        doc_.emplace();
        doc_->data_block_name = t.text;
        doc_->data_block_line = t.line;
        if (t.text.empty()) sink_.add(DefectCode::syntax, "data block header without a name", t.line);
        ++i;
        continue;
      }
      if (!doc_) {
        if (!reported_preamble) {
          sink_.add(DefectCode::syntax, "content before the data block header", t.line);
          reported_preamble = true;
        }
        ++i;
        continue;
      }
      switch (t.kind) {
        case TokenKind::reserved:
          sink_.add(DefectCode::syntax, fmt::format("unsupported construct '{}'", t.text), t.line);
          ++i;
          break;
        case TokenKind::value:
          sink_.add(DefectCode::syntax, fmt::format("value '{}' has no data name", clip(t.text)), t.line);
          ++i;
          break;
        case TokenKind::tag:
          if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::value) {
            if (claim(t)) {
              doc_->scalars.emplace_back(t.text, tokens[i + 1].text);
              doc_->source_line_spans[lower(t.text)] = {t.line, tokens[i + 1].end_line};
            }
            i += 2;
          } else {
            sink_.add(DefectCode::syntax, fmt::format("data name {} has no value", t.text), t.line);
            ++i;
          }
          break;
        case TokenKind::loop:
          i = read_loop(tokens, i);
          break;
        case TokenKind::data:
          break;
      }
    }
    if (!doc_ && !reported_preamble) sink_.add(DefectCode::syntax, "no data block header", 1);
    return std::move(doc_);
  }

private:
  static std::string clip(const std::string& s) { return s.size() > 40 ? s.substr(0, 40) + "..." : s; }

  bool claim(const Token& tag) {
    if (!seen_.insert(lower(tag.text)).second) {
      sink_.add(DefectCode::syntax, fmt::format("duplicate data name {}", tag.text), tag.line);
      return false;
    }
    return true;
  }

  std::size_t read_loop(const std::vector<Token>& tokens, std::size_t i) {
    CifLoop loop;
    loop.line = tokens[i].line;
    std::vector<bool> keep;
    ++i;
    while (i < tokens.size() && tokens[i].kind == TokenKind::tag) {
      keep.push_back(claim(tokens[i]));
      loop.tags.push_back(tokens[i].text);
      ++i;
    }
    if (loop.tags.empty()) {
      sink_.add(DefectCode::syntax, "loop_ without data names", loop.line);
      return i;
    }
    std::vector<const Token*> values;
    while (i < tokens.size() && tokens[i].kind == TokenKind::value) values.push_back(&tokens[i++]);

    const std::size_t width = loop.tags.size();
    if (values.size() % width != 0) {
      sink_.add(DefectCode::inconsistent_loop,
                fmt::format("loop has {} values, not a multiple of its {} columns", values.size(), width),
                loop.line);
    }
    for (std::size_t r = 0; r + width <= values.size(); r += width) {
      std::vector<std::string> row;
      row.reserve(width);
      for (std::size_t k = 0; k < width; ++k) row.push_back(values[r + k]->text);
      loop.rows.push_back(std::move(row));
      loop.row_lines.push_back(values[r]->line);
    }
    const int last = values.empty() ? loop.line : values.back()->end_line;

    // Columns whose name was a duplicate are dropped so lookups stay unambiguous.
    CifLoop kept;
    kept.line = loop.line;
    kept.row_lines = loop.row_lines;
    kept.rows.resize(loop.rows.size());
    for (std::size_t k = 0; k < width; ++k) {
      if (!keep[k]) continue;
      kept.tags.push_back(loop.tags[k]);
      doc_->source_line_spans[lower(loop.tags[k])] = {loop.line, last};
      for (std::size_t r = 0; r < loop.rows.size(); ++r) kept.rows[r].push_back(loop.rows[r][k]);
    }
    if (!kept.tags.empty()) doc_->loops.push_back(std::move(kept));
    return i;
  }

  DefectSink& sink_;
  std::optional<CifDocument> doc_;
  std::set<std::string> seen_;
};

int tag_line(const CifDocument& doc, std::string_view tag) {
  auto it = doc.source_line_spans.find(lower(tag));
  return it == doc.source_line_spans.end() ? doc.data_block_line : it->second.first;
}

const std::string* first_present(const CifDocument& doc, std::span<const std::string_view> tags,
                                 std::string_view* which = nullptr) {
  for (auto tag : tags) {
    const std::string* v = doc.scalar(tag);
    if (v && !is_placeholder(*v)) {
      if (which) *which = tag;
      return v;
    }
  }
  return nullptr;
}

struct SiteRows {
  std::vector<std::vector<std::string>> rows;
  std::vector<int> lines;
  std::vector<std::string> tags;
};

// Atom-site data from the loop holding _atom_site_fract_x, or from scalar
// tags when the file lists a single site without a loop.
std::optional<SiteRows> site_rows(const CifDocument& doc) {
  if (const CifLoop* loop = doc.loop_with(cif_tags::kFract[0])) return SiteRows{loop->rows, loop->row_lines, loop->tags};
  if (doc.scalar(cif_tags::kFract[0])) {
    SiteRows out;
    std::vector<std::string> row;
    for (const auto& [tag, value] : doc.scalars) {
      if (lower(tag).starts_with("_atom_site_")) {
        out.tags.push_back(tag);
        row.push_back(value);
      }
    }
    out.rows.push_back(std::move(row));
    out.lines.push_back(tag_line(doc, cif_tags::kFract[0]));
    return out;
  }
  return std::nullopt;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& tags, std::string_view tag) {
  for (std::size_t k = 0; k < tags.size(); ++k)
    if (iequals(tags[k], tag)) return k;
  return std::nullopt;
}

void build_structure(const CifDocument& doc, DefectSink& sink, ParseOutcome& out) {
  const int block_line = doc.data_block_line;

  std::array<double, 6> cell{};
  bool cell_ok = true;
  for (int k = 0; k < 6; ++k) {
    std::string_view tag = k < 3 ? cif_tags::kCellLength[k] : cif_tags::kCellAngle[k - 3];
    const std::string* v = doc.scalar(tag);
    if (!v || is_placeholder(*v)) {
      sink.add(DefectCode::missing_lattice, fmt::format("missing {}", tag), block_line);
      cell_ok = false;
      continue;
    }
    auto num = parse_cif_number(*v);
    if (!num) {
      sink.add(DefectCode::bad_number, fmt::format("{} is not a number: '{}'", tag, *v), tag_line(doc, tag));
      cell_ok = false;
      continue;
    }
    cell[static_cast<std::size_t>(k)] = *num;
  }
  std::optional<Lattice> lattice;
  if (cell_ok) {
    try {
      lattice = Lattice::from_parameters(cell[0], cell[1], cell[2], cell[3], cell[4], cell[5]);
    } catch (const std::invalid_argument& e) {
      sink.add(DefectCode::bad_number, fmt::format("invalid cell: {}", e.what()),
               tag_line(doc, cif_tags::kCellLength[0]));
    }
  }

  std::optional<std::string> sg_name;
  std::optional<int> sg_number;
  if (const std::string* name = first_present(doc, cif_tags::kSpaceGroupName)) sg_name = *name;
  std::string_view number_tag;
  if (const std::string* num = first_present(doc, cif_tags::kSpaceGroupNumber, &number_tag)) {
    int n = 0;
    auto [ptr, ec] = std::from_chars(num->data(), num->data() + num->size(), n);
    if (ec != std::errc() || ptr != num->data() + num->size() || n < 1 || n > 230) {
      sink.add(DefectCode::bad_number, fmt::format("invalid space group number '{}'", *num),
               tag_line(doc, number_tag));
    } else {
      sg_number = n;
    }
  }
  if (!sg_name && number_tag.empty())
    sink.add(DefectCode::missing_space_group, "no space group name or number", block_line);

  std::vector<AtomSite> sites;
  auto rows = site_rows(doc);
  if (!rows) {
    sink.add(DefectCode::empty_sites, "no _atom_site_fract_x data", block_line);
  } else {
    std::array<std::optional<std::size_t>, 3> fract;
    for (int k = 0; k < 3; ++k) fract[static_cast<std::size_t>(k)] = find_column(rows->tags, cif_tags::kFract[k]);
    const auto label_col = find_column(rows->tags, cif_tags::kLabel);
    const auto type_col = find_column(rows->tags, cif_tags::kTypeSymbol);
    const int site_line = tag_line(doc, cif_tags::kFract[0]);
    if (!fract[1] || !fract[2]) {
      sink.add(DefectCode::empty_sites, "atom_site data lacks fract_y/fract_z", site_line);
    } else if (rows->rows.empty()) {
      sink.add(DefectCode::empty_sites, "atom_site loop has no rows", site_line);
    } else if (!label_col && !type_col) {
      sink.add(DefectCode::unknown_element, "atom_site data has neither type_symbol nor label", site_line);
    } else {
      std::map<std::string, int> label_seen;
      for (std::size_t r = 0; r < rows->rows.size(); ++r) {
        const auto& row = rows->rows[r];
        const int line = rows->lines[r];
        AtomSite site;
        std::optional<std::string> element;
        if (type_col && !is_placeholder(row[*type_col])) element = element_from_token(row[*type_col]);
        else if (label_col && !is_placeholder(row[*label_col])) element = element_from_token(row[*label_col]);
        if (!element) {
          std::string shown = type_col ? row[*type_col] : row[*label_col];
          sink.add(DefectCode::unknown_element, fmt::format("unknown element '{}'", shown), line);
          continue;
        }
        site.element = *element;
        if (label_col && !is_placeholder(row[*label_col])) site.label = row[*label_col];
        else site.label = fmt::format("{}{}", site.element, r + 1);

        Eigen::Vector3d raw;
        bool coords_ok = true;
        for (int k = 0; k < 3; ++k) {
          auto num = parse_cif_number(row[*fract[static_cast<std::size_t>(k)]]);
          if (!num) {
            sink.add(DefectCode::bad_number,
                     fmt::format("{} of {} is not a number: '{}'", cif_tags::kFract[k], site.label,
                                 row[*fract[static_cast<std::size_t>(k)]]),
                     line);
            coords_ok = false;
            break;
          }
          raw[k] = *num;
        }
        if (!coords_ok) continue;
        if (++label_seen[site.label] > 1)
          sink.add(DefectCode::duplicate_label, fmt::format("duplicate site label {}", site.label), line);
        site.frac = raw;
        out.raw_fractional.push_back(raw);
        sites.push_back(std::move(site));
      }
    }
  }

  const bool fatal = std::any_of(out.defects.begin(), out.defects.end(),
                                 [](const Defect& d) { return is_fatal(d.code); });
  if (fatal || !lattice || sites.empty()) {
    out.raw_fractional.clear();
    return;
  }
  try {
    out.structure.emplace(*lattice, std::move(sites), sg_name, sg_number);
  } catch (const std::invalid_argument& e) {
    sink.add(DefectCode::bad_number, e.what(), block_line);
    out.raw_fractional.clear();
  }
}

std::string quote_if_needed(const std::string& v) {
  const bool plain = !v.empty() && v.find_first_of(" \t\n\r'\"") == std::string::npos &&
                     v.front() != '_' && v.front() != '#' && v.front() != '$' && v.front() != ';' &&
                     !is_placeholder(v) && !iequals(v, "loop_") &&
                     !(v.size() >= 5 && (iequals(v.substr(0, 5), "data_") || iequals(v.substr(0, 5), "save_")));
  if (plain) return v;
  if (v.find('\'') == std::string::npos) return "'" + v + "'";
  return "\"" + v + "\"";
}

std::string fixed9(double x) {
  std::string s = fmt::format("{:.9f}", x);
  if (s == "-0.000000000") s = "0.000000000";
  return s;
}

}  // namespace

std::optional<std::size_t> CifLoop::column(std::string_view tag) const { return find_column(tags, tag); }

const std::string* CifDocument::scalar(std::string_view tag) const {
  for (const auto& [k, v] : scalars)
    if (iequals(k, tag)) return &v;
  return nullptr;
}

const CifLoop* CifDocument::loop_with(std::string_view tag) const {
  for (const auto& loop : loops)
    if (loop.column(tag)) return &loop;
  return nullptr;
}

bool CifDocument::has_tag(std::string_view tag) const {
  return source_line_spans.contains(lower(tag));
}

std::string_view to_string(DefectCode code) {
  switch (code) {
    case DefectCode::syntax: return "SYNTAX";
    case DefectCode::missing_lattice: return "MISSING_LATTICE";
    case DefectCode::bad_number: return "BAD_NUMBER";
    case DefectCode::unknown_element: return "UNKNOWN_ELEMENT";
    case DefectCode::empty_sites: return "EMPTY_SITES";
    case DefectCode::missing_space_group: return "MISSING_SPACE_GROUP";
    case DefectCode::duplicate_label: return "DUPLICATE_LABEL";
    case DefectCode::inconsistent_loop: return "INCONSISTENT_LOOP";
  }
  return "SYNTAX";
}

bool is_fatal(DefectCode code) {
  return code != DefectCode::missing_space_group && code != DefectCode::duplicate_label;
}

bool ParseOutcome::has(DefectCode code) const {
  return std::any_of(defects.begin(), defects.end(), [code](const Defect& d) { return d.code == code; });
}

std::optional<double> parse_cif_number(std::string_view value) {
  if (value.empty() || is_placeholder(value)) return std::nullopt;
  if (value.back() == ')') {
    auto open = value.rfind('(');
    if (open == std::string_view::npos) return std::nullopt;
    auto digits = value.substr(open + 1, value.size() - open - 2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    value = value.substr(0, open);
  }
  if (!value.empty() && value.front() == '+') value.remove_prefix(1);
  if (value.empty()) return std::nullopt;
  // from_chars would accept these spellings; CIF numbers never use them.
  const char first = value.front() == '-' && value.size() > 1 ? value[1] : value.front();
  if (!((first >= '0' && first <= '9') || first == '.')) return std::nullopt;
  double x = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x, std::chars_format::general);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(x)) return std::nullopt;
  return x;
}

ParseOutcome parse_cif(std::string_view text, const ParseOptions& options) {
  ParseOutcome out;
  DefectSink sink(out.defects, options.max_defects);
  if (text.size() > options.max_bytes) {
    sink.add(DefectCode::syntax, fmt::format("input of {} bytes exceeds limit of {}", text.size(), options.max_bytes), 1);
    return out;
  }

  int line = 1;
  int illegal = 0;
  for (char c : text) {
    if (c == '\n') ++line;
    if (is_illegal_control(c) && ++illegal <= 3)
      sink.add(DefectCode::syntax, fmt::format("illegal control character 0x{:02x}", static_cast<unsigned char>(c)), line);
  }

  Tokenizer tokenizer(text, sink);
  const auto tokens = tokenizer.run();
  DocumentBuilder builder(sink);
  out.document = builder.build(tokens);
  if (out.document) build_structure(*out.document, sink, out);
  if (std::any_of(out.defects.begin(), out.defects.end(), [](const Defect& d) { return is_fatal(d.code); })) {
    out.structure.reset();
    out.raw_fractional.clear();
  }
  return out;
}

std::string serialize_cif(const Structure& s) {
  const Lattice& lat = s.lattice();
  std::string block = format_formula(composition_of(s));
  std::string out = fmt::format("data_{}\n", block);
  out += fmt::format("_cell_length_a    {}\n", fixed9(lat.a()));
  out += fmt::format("_cell_length_b    {}\n", fixed9(lat.b()));
  out += fmt::format("_cell_length_c    {}\n", fixed9(lat.c()));
  out += fmt::format("_cell_angle_alpha {}\n", fixed9(lat.alpha()));
  out += fmt::format("_cell_angle_beta  {}\n", fixed9(lat.beta()));
  out += fmt::format("_cell_angle_gamma {}\n", fixed9(lat.gamma()));

  if (s.space_group_name() || s.space_group_number()) {
    if (s.space_group_name())
      out += fmt::format("_symmetry_space_group_name_H-M {}\n", quote_if_needed(*s.space_group_name()));
    if (s.space_group_number())
      out += fmt::format("_symmetry_Int_Tables_number {}\n", *s.space_group_number());
  } else {
    out += "_symmetry_space_group_name_H-M 'P 1'\n_symmetry_Int_Tables_number 1\n";
  }

  out += "loop_\n";
  out += " _atom_site_label\n _atom_site_type_symbol\n";
  out += " _atom_site_fract_x\n _atom_site_fract_y\n _atom_site_fract_z\n";
  for (const auto& site : s.sites()) {
    std::array<std::string, 3> xyz;
    for (int k = 0; k < 3; ++k) {
      std::string v = fixed9(site.frac[k]);
      if (v == "1.000000000") v = "0.000000000";
      xyz[static_cast<std::size_t>(k)] = std::move(v);
    }
    out += fmt::format("  {} {} {} {} {}\n", quote_if_needed(site.label), site.element, xyz[0], xyz[1], xyz[2]);
  }
  return out;
}

std::string defects_to_jsonl(const std::vector<Defect>& defects) {
  std::string out;
  for (const auto& d : defects) {
    nlohmann::ordered_json j;
    j["code"] = to_string(d.code);
    j["message"] = d.message;
    j["line"] = d.line;
    out += j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

}  // namespace catdesign
