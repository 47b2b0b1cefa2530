#pragma once

// 2x2x2 contingency tables over binary X (cause), Z (mediator), Y (outcome).
//
// Cells are stored in the canonical (x,z,y) lexicographic order with x
// slowest, so cell index = 4x + 2z + y everywhere in the library.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cloglin/errors.hpp"

namespace cloglin {

inline constexpr std::size_t kCells = 8;

enum class Var : std::uint8_t { X = 1, Z = 2, Y = 4 };

inline constexpr std::array<Var, 3> kVariables{Var::X, Var::Z, Var::Y};

inline constexpr const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "X";
    case Var::Z: return "Z";
    case Var::Y: return "Y";
  }
  return "?";
}

// Set of variables. Doubles as a loglinear term: {X,Y} is the XY
// interaction, the empty set is the intercept.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr VarSet(std::initializer_list<Var> vars) {
    for (Var v : vars) bits_ |= static_cast<std::uint8_t>(v);
  }
  static constexpr VarSet from_bits(std::uint8_t bits) {
    VarSet s;
    s.bits_ = bits & 7u;
    return s;
  }

  constexpr bool contains(Var v) const { return (bits_ & static_cast<std::uint8_t>(v)) != 0; }
  constexpr bool contains(VarSet other) const { return (bits_ & other.bits_) == other.bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>((bits_ & 1u) + ((bits_ >> 1) & 1u) + ((bits_ >> 2) & 1u));
  }
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr VarSet with(Var v) const { return from_bits(bits_ | static_cast<std::uint8_t>(v)); }
  constexpr VarSet without(Var v) const { return from_bits(bits_ & ~static_cast<std::uint8_t>(v)); }

  friend constexpr bool operator==(VarSet, VarSet) = default;

  // "X", "XZ", "XZY"; the empty set prints as "eta".
  std::string name() const {
    if (empty()) return "eta";
    std::string out;
    for (Var v : kVariables)
      if (contains(v)) out += var_name(v);
    return out;
  }

 private:
  std::uint8_t bits_ = 0;
};

struct Cell {
  int x = 0;
  int z = 0;
  int y = 0;

  constexpr int level(Var v) const { return v == Var::X ? x : (v == Var::Z ? z : y); }
};

inline constexpr std::size_t cell_index(int x, int z, int y) {
  return static_cast<std::size_t>(4 * x + 2 * z + y);
}

inline constexpr Cell cell_at(std::size_t index) {
  return Cell{static_cast<int>((index >> 2) & 1u), static_cast<int>((index >> 1) & 1u),
              static_cast<int>(index & 1u)};
}

inline std::string describe_cell(const Cell& c) {
  return "(x=" + std::to_string(c.x) + ", z=" + std::to_string(c.z) + ", y=" + std::to_string(c.y) + ")";
}

using Labels = std::array<std::string, 3>;

class ContingencyTable {
 public:
  explicit ContingencyTable(const std::array<double, kCells>& counts,
                            std::optional<Labels> labels = std::nullopt)
      : counts_(counts), labels_(std::move(labels)) {
    double total = 0.0;
    for (std::size_t i = 0; i < kCells; ++i) {
      if (!std::isfinite(counts_[i]) || counts_[i] < 0.0)
        throw InputError("negative or non-finite count in cell " + describe_cell(cell_at(i)));
      total += counts_[i];
    }
    if (!(total > 0.0)) throw InputError("table total must be positive");
  }

  double count(int x, int z, int y) const { return counts_[cell_index(x, z, y)]; }
  double operator[](std::size_t index) const { return counts_[index]; }
  const std::array<double, kCells>& counts() const { return counts_; }
  const std::optional<Labels>& labels() const { return labels_; }

  double total() const {
    double t = 0.0;
    for (double c : counts_) t += c;
    return t;
  }

  ContingencyTable scaled(double factor) const {
    auto c = counts_;
    for (double& v : c) v *= factor;
    return ContingencyTable(c, labels_);
  }

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

 private:
  std::array<double, kCells> counts_;
  std::optional<Labels> labels_;
};

class JointProbabilityTable {
 public:
  explicit JointProbabilityTable(const std::array<double, kCells>& probs) : probs_(probs) {
    double total = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw InputError("joint probability outside [0,1]");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("joint probabilities do not sum to 1");
  }

  double prob(int x, int z, int y) const { return probs_[cell_index(x, z, y)]; }
  double operator[](std::size_t index) const { return probs_[index]; }
  const std::array<double, kCells>& probs() const { return probs_; }

 private:
  std::array<double, kCells> probs_;
};

struct Condition {
  Var var = Var::Z;
  int level = 1;
};

// Probabilities over the kept variables, lexicographic in X, Z, Y order
// (first kept variable slowest). Conditioned margins are renormalized over
// the conditioning slice.
class MarginalTable {
 public:
  MarginalTable(VarSet keep, std::optional<Condition> condition, std::vector<double> probs)
      : keep_(keep), condition_(condition), probs_(std::move(probs)) {}

  VarSet keep() const { return keep_; }
  const std::optional<Condition>& condition() const { return condition_; }
  const std::vector<double>& probs() const { return probs_; }

  // Components of `cell` for variables outside keep() are ignored.
  double at(const Cell& cell) const { return probs_[offset(cell)]; }
  double at(int x, int z, int y) const { return at(Cell{x, z, y}); }

 private:
  std::size_t offset(const Cell& cell) const {
    std::size_t idx = 0;
    for (Var v : kVariables)
      if (keep_.contains(v)) idx = 2 * idx + static_cast<std::size_t>(cell.level(v));
    return idx;
  }

  VarSet keep_;
  std::optional<Condition> condition_;
  std::vector<double> probs_;
};

inline JointProbabilityTable joint_probabilities(const ContingencyTable& table) {
  const double total = table.total();
  if (!(total > 0.0)) throw InputError("table total must be positive");
  std::array<double, kCells> probs{};
  for (std::size_t i = 0; i < kCells; ++i) probs[i] = table[i] / total;
  return JointProbabilityTable(probs);
}

inline MarginalTable margin(const JointProbabilityTable& joint, VarSet keep,
                            std::optional<Condition> condition = std::nullopt) {
  if (keep.empty()) throw InputError("margin: keep set must be nonempty");
  if (condition && keep.contains(condition->var))
    throw InputError("margin: conditioning variable cannot be kept");
  if (condition && condition->level != 0 && condition->level != 1)
    throw InputError("margin: non-binary conditioning level");

  std::vector<double> probs(std::size_t{1} << keep.size(), 0.0);
  double slice = 0.0;
  for (std::size_t i = 0; i < kCells; ++i) {
    const Cell c = cell_at(i);
    if (condition && c.level(condition->var) != condition->level) continue;
    std::size_t idx = 0;
    for (Var v : kVariables)
      if (keep.contains(v)) idx = 2 * idx + static_cast<std::size_t>(c.level(v));
    probs[idx] += joint[i];
    slice += joint[i];
  }
  if (condition) {
    if (!(slice > 0.0))
      throw InputError(std::string("margin: conditioning slice ") + var_name(condition->var) + "=" +
                       std::to_string(condition->level) + " has zero probability");
    for (double& p : probs) p /= slice;
  }
  return MarginalTable(keep, condition, std::move(probs));
}

// ---------------------------------------------------------------------------
// Zero-cell handling

class ZeroCellPolicy {
 public:
  enum class Kind { Error, Correct, Allow };

  static ZeroCellPolicy error() { return ZeroCellPolicy(Kind::Error, 0.0); }
  static ZeroCellPolicy correct(double amount = 0.5) {
    if (!std::isfinite(amount) || amount <= 0.0) throw InputError("continuity correction must be positive");
    return ZeroCellPolicy(Kind::Correct, amount);
  }
  static ZeroCellPolicy allow() { return ZeroCellPolicy(Kind::Allow, 0.0); }

  // "error", "allow", "correct" or "correct:C".
  static ZeroCellPolicy parse(std::string_view text) {
    if (text == "error") return error();
    if (text == "allow") return allow();
    if (text == "correct") return correct();
    if (text.starts_with("correct:")) {
      const auto num = text.substr(8);
      double c = 0.0;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
      if (ec != std::errc() || ptr != num.data() + num.size())
        throw InputError("invalid continuity correction '" + std::string(num) + "'");
      return correct(c);
    }
    throw InputError("unknown zero-cell policy '" + std::string(text) + "'");
  }

  Kind kind() const { return kind_; }
  double amount() const { return amount_; }

 private:
  ZeroCellPolicy(Kind kind, double amount) : kind_(kind), amount_(amount) {}
  Kind kind_;
  double amount_;
};

inline ContingencyTable validate(const ContingencyTable& table,
                                 const ZeroCellPolicy& policy = ZeroCellPolicy::error()) {
  switch (policy.kind()) {
    case ZeroCellPolicy::Kind::Allow:
      return table;
    case ZeroCellPolicy::Kind::Error:
      for (std::size_t i = 0; i < kCells; ++i)
        if (table[i] == 0.0) throw InputError("zero count in cell " + describe_cell(cell_at(i)));
      return table;
    case ZeroCellPolicy::Kind::Correct: {
      auto counts = table.counts();
      for (double& c : counts) c += policy.amount();
      return ContingencyTable(counts, table.labels());
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Text formats

enum class TableFormat { Csv, Json };

inline TableFormat format_from_path(std::string_view path) {
  auto ends_with_ci = [&](std::string_view ext) {
    if (path.size() < ext.size()) return false;
    auto tail = path.substr(path.size() - ext.size());
    return std::equal(tail.begin(), tail.end(), ext.begin(),
                      [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == b; });
  };
  if (ends_with_ci(".json")) return TableFormat::Json;
  if (ends_with_ci(".csv")) return TableFormat::Csv;
  throw InputError("cannot infer table format from '" + std::string(path) + "'; use --format");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline int parse_level(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field == "0") return 0;
  if (field == "1") return 1;
  throw InputError("line " + std::to_string(line) + ": non-binary level '" + std::string(field) + "'");
}

inline double parse_count(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
    throw InputError("line " + std::to_string(line) + ": malformed count '" + std::string(field) + "'");
  if (v < 0.0) throw InputError("line " + std::to_string(line) + ": negative count");
  return v;
}

// Accumulates cells, rejecting duplicates and filling missing cells with 0.
class CellCollector {
 public:
  void add(int x, int z, int y, double count, const std::string& where) {
    const auto idx = cell_index(x, z, y);
    if (seen_[idx]) throw InputError(where + ": duplicate cell " + describe_cell(Cell{x, z, y}));
    seen_[idx] = true;
    counts_[idx] = count;
  }
  ContingencyTable finish(std::optional<Labels> labels) const { return ContingencyTable(counts_, std::move(labels)); }

 private:
  std::array<double, kCells> counts_{};
  std::array<bool, kCells> seen_{};
};

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline ContingencyTable parse_csv(std::string_view source) {
  CellCollector cells;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!source.empty()) {
    const auto nl = source.find('\n');
    std::string_view line = source.substr(0, nl);
    source = nl == std::string_view::npos ? std::string_view{} : source.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!header_seen) {
      if (fields.size() != 4 || trim(fields[0]) != "x" || trim(fields[1]) != "z" || trim(fields[2]) != "y" ||
          trim(fields[3]) != "count")
        throw InputError("line " + std::to_string(line_no) + ": expected header 'x,z,y,count'");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4)
      throw InputError("line " + std::to_string(line_no) + ": malformed record, expected 4 fields");
    cells.add(parse_level(fields[0], line_no), parse_level(fields[1], line_no), parse_level(fields[2], line_no),
              parse_count(fields[3], line_no), "line " + std::to_string(line_no));
  }
  if (!header_seen) throw InputError("empty CSV input");
  return cells.finish(std::nullopt);
}

inline int json_level(const nlohmann::json& v, const char* key, std::size_t i) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw InputError("cells[" + std::to_string(i) + "]: malformed level '" + key + "'");
  const auto level = v.get<long long>();
  if (level != 0 && level != 1)
    throw InputError("cells[" + std::to_string(i) + "]: non-binary level " + key + "=" + std::to_string(level));
  return static_cast<int>(level);
}

inline double json_count(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + ": malformed count");
  const double c = v.get<double>();
  if (!std::isfinite(c)) throw InputError(where + ": malformed count");
  if (c < 0.0) throw InputError(where + ": negative count");
  return c;
}

inline ContingencyTable parse_json(std::string_view source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source.begin(), source.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("JSON table must be an object");

  std::optional<Labels> labels;
  if (auto it = doc.find("labels"); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) throw InputError("'labels' must be an array of 3 strings");
    Labels l;
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(*it)[i].is_string()) throw InputError("'labels' must be an array of 3 strings");
      l[i] = (*it)[i].get<std::string>();
    }
    labels = std::move(l);
  }

  const auto it = doc.find("cells");
  if (it == doc.end() || !it->is_array()) throw InputError("JSON table requires a 'cells' array");
  const auto& arr = *it;

  CellCollector cells;
  const bool flat = !arr.empty() && std::all_of(arr.begin(), arr.end(), [](const auto& v) { return v.is_number(); });
  if (flat) {
    if (arr.size() != kCells) throw InputError("flat 'cells' array must have exactly 8 counts");
    for (std::size_t i = 0; i < kCells; ++i) {
      const Cell c = cell_at(i);
      cells.add(c.x, c.z, c.y, json_count(arr[i], "cells[" + std::to_string(i) + "]"), "cells");
    }
    return cells.finish(std::move(labels));
  }
  if (arr.size() > kCells) throw InputError("'cells' has more than 8 records");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& rec = arr[i];
    const std::string where = "cells[" + std::to_string(i) + "]";
    if (!rec.is_object() || !rec.contains("x") || !rec.contains("z") || !rec.contains("y") || !rec.contains("count"))
      throw InputError(where + ": malformed record, expected {x,z,y,count}");
    cells.add(json_level(rec["x"], "x", i), json_level(rec["z"], "z", i), json_level(rec["y"], "y", i),
              json_count(rec["count"], where), where);
  }
  return cells.finish(std::move(labels));
}

}  // namespace detail

inline ContingencyTable parse_table(std::string_view source, TableFormat format) {
  return format == TableFormat::Csv ? detail::parse_csv(source) : detail::parse_json(source);
}

inline std::string serialize_table(const ContingencyTable& table, TableFormat format) {
  if (format == TableFormat::Csv) {
    std::string out = "x,z,y,count\n";
    for (std::size_t i = 0; i < kCells; ++i) {
      const Cell c = cell_at(i);
      out += std::to_string(c.x) + ',' + std::to_string(c.z) + ',' + std::to_string(c.y) + ',' +
             detail::format_number(table[i]) + '\n';
    }
    return out;
  }
  nlohmann::ordered_json doc;
  if (table.labels()) doc["labels"] = *table.labels();
  doc["cells"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < kCells; ++i) {
    const Cell c = cell_at(i);
    doc["cells"].push_back({{"x", c.x}, {"z", c.z}, {"y", c.y}, {"count", table[i]}});
  }
  return doc.dump(2) + '\n';
}

// ---------------------------------------------------------------------------
// Dichotomization of numeric (x, z, y) records

class Threshold {
 public:
  static Threshold mean() { return Threshold(std::nullopt); }
  static Threshold at(double value) { return Threshold(value); }

  bool is_mean() const { return !value_; }
  double value() const { return *value_; }

 private:
  explicit Threshold(std::optional<double> v) : value_(v) {}
  std::optional<double> value_;
};

using Record = std::array<double, 3>;

// value < threshold -> 0, value >= threshold -> 1.
inline ContingencyTable dichotomize(std::span<const Record> records,
                                    const std::array<Threshold, 3>& thresholds = {Threshold::mean(), Threshold::mean(),
                                                                                  Threshold::mean()}) {
  if (records.size() < 2) throw InputError("dichotomize: at least 2 records required");
  std::array<double, 3> cut{};
  for (std::size_t v = 0; v < 3; ++v) {
    for (const auto& r : records)
      if (!std::isfinite(r[v])) throw InputError("dichotomize: non-finite value");
    if (!thresholds[v].is_mean()) {
      cut[v] = thresholds[v].value();
      continue;
    }
    const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                              [v](const Record& a, const Record& b) { return a[v] < b[v]; });
    if ((*lo)[v] == (*hi)[v])
      throw InputError(std::string("dichotomize: variable ") + var_name(kVariables[v]) +
                       " is constant; mean split undefined");
    double sum = 0.0;
    for (const auto& r : records) sum += r[v];
    cut[v] = sum / static_cast<double>(records.size());
  }
  std::array<double, kCells> counts{};
  for (const auto& r : records) {
    const int x = r[0] >= cut[0] ? 1 : 0;
    const int z = r[1] >= cut[1] ? 1 : 0;
    const int y = r[2] >= cut[2] ? 1 : 0;
    counts[cell_index(x, z, y)] += 1.0;
  }
  return ContingencyTable(counts);
}

}  // namespace cloglin
