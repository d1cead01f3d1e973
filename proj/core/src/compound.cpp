#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "linkforge/error.hpp"
#include "linkforge/normalize.hpp"
#include "linkforge/unicode.hpp"

namespace linkforge::normalize {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::size_t lineno) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || end != field.data() + field.size()) {
    throw ValidationError("compound_scores line " + std::to_string(lineno) + ": bad number '" + std::string(field) +
                          "'");
  }
  return value;
}

}  // namespace

CompoundSplitter CompoundSplitter::parse(std::string_view tsv) {
  CompoundSplitter splitter;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    const std::size_t nl = tsv.find('\n', pos);
    std::string_view line = tsv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? tsv.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw ValidationError("compound_scores line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    const double value = parse_double(fields[2], lineno);
    if (fields[0] == "param") {
      if (fields[1] == "threshold") {
        splitter.threshold_ = value;
      } else if (fields[1] == "missing") {
        splitter.missing_ = value;
      } else if (fields[1] == "min_part") {
        if (value < 2) throw ValidationError("compound_scores: min_part must be at least 2");
        splitter.min_part_ = static_cast<std::size_t>(value);
      } else {
        throw ValidationError("compound_scores line " + std::to_string(lineno) + ": unknown param");
      }
      continue;
    }
    std::u32string key = text::to_lower(text::to_u32(fields[1]));
    if (key.size() != 2) {
      throw ValidationError("compound_scores line " + std::to_string(lineno) + ": key must be a character bigram");
    }
    if (fields[0] == "end") {
      splitter.end_[std::move(key)] = value;
    } else if (fields[0] == "start") {
      splitter.start_[std::move(key)] = value;
    } else {
      throw ValidationError("compound_scores line " + std::to_string(lineno) + ": kind must be param, end or start");
    }
  }
  return splitter;
}

CompoundSplitter CompoundSplitter::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

double CompoundSplitter::boundary_score(std::u32string_view token, std::size_t pos) const {
  if (pos < 2 || pos + 2 > token.size()) return missing_ * 2;
  auto lookup = [this](const auto& table, std::u32string_view key) {
    auto it = table.find(std::u32string(key));
    return it == table.end() ? missing_ : it->second;
  };
  return lookup(end_, token.substr(pos - 2, 2)) + lookup(start_, token.substr(pos, 2));
}

std::vector<std::u32string> CompoundSplitter::split(std::u32string_view token) const {
  const std::size_t n = token.size();
  if (n < 2 * min_part_) return {std::u32string(token)};
  std::size_t best_pos = 0;
  double best = threshold_;
  for (std::size_t pos = min_part_; pos + min_part_ <= n; ++pos) {
    const double score = boundary_score(token, pos);
    if (score > best) {
      best = score;
      best_pos = pos;
    }
  }
  if (best_pos == 0) return {std::u32string(token)};
  return {std::u32string(token.substr(0, best_pos)), std::u32string(token.substr(best_pos))};
}

std::string CompoundSplitter::fingerprint() const {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << threshold_ << '|' << missing_ << '|' << min_part_;
  for (const auto* table : {&end_, &start_}) {
    std::map<std::u32string, double> sorted(table->begin(), table->end());
    out << '#';
    for (const auto& [k, v] : sorted) out << text::to_utf8(k) << '=' << v << ';';
  }
  return out.str();
}

}  // namespace linkforge::normalize
