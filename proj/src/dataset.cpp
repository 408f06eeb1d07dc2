#include "ccprobe/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ccprobe/error.hpp"

namespace ccprobe {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

double parse_number(std::string_view cell, std::size_t line_no, std::string_view column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last)
    throw data_error("line " + std::to_string(line_no) + ": column '" + std::string(column) + "' holds '" +
                     std::string(cell) + "', not a number");
  if (!std::isfinite(v))
    throw data_error("line " + std::to_string(line_no) + ": non-finite value in column '" + std::string(column) + "'");
  return v;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      lines.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return lines;
}

StateTable parse_csv(std::string_view text, const StateSchema& schema, std::string provenance) {
  const auto lines = lines_of(text);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) throw data_error("state file is empty (expected a header row)");
  const auto header = split_csv(lines[li]);
  std::vector<std::size_t> col_to_dim(header.size());
  std::vector<bool> seen(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto dim = schema.find(header[c]);
    if (!dim) throw data_error("unexpected column '" + std::string(header[c]) + "' not in schema");
    if (seen[*dim]) throw data_error("duplicate column '" + std::string(header[c]) + "'");
    seen[*dim] = true;
    col_to_dim[c] = *dim;
  }
  for (std::size_t d = 0; d < schema.size(); ++d)
    if (!seen[d]) throw data_error("missing column '" + schema[d].name + "'");

  std::vector<double> values;
  for (++li; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    const auto cells = split_csv(lines[li]);
    if (cells.size() != header.size())
      throw data_error("line " + std::to_string(li + 1) + ": expected " + std::to_string(header.size()) +
                       " cells, found " + std::to_string(cells.size()));
    const std::size_t base = values.size();
    values.resize(base + schema.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      values[base + col_to_dim[c]] = parse_number(cells[c], li + 1, header[c]);
  }
  if (values.empty()) throw data_error("no states: the file has a header but no rows");
  return StateTable(schema, std::move(values), std::move(provenance));
}

StateTable parse_jsonl(std::string_view text, const StateSchema& schema, std::string provenance) {
  const auto lines = lines_of(text);
  std::vector<double> values;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    if (trim(lines[li]).empty()) continue;
    json obj;
    try {
      obj = json::parse(lines[li]);
    } catch (const json::parse_error& e) {
      throw data_error("line " + std::to_string(li + 1) + ": " + e.what());
    }
    if (!obj.is_object()) throw data_error("line " + std::to_string(li + 1) + ": expected a JSON object");
    if (obj.size() != schema.size()) {
      for (const auto& [key, _] : obj.items())
        if (!schema.find(key)) throw data_error("line " + std::to_string(li + 1) + ": unexpected field '" + key + "'");
    }
    for (std::size_t d = 0; d < schema.size(); ++d) {
      const std::string& name = schema[d].name;
      if (!obj.contains(name)) throw data_error("line " + std::to_string(li + 1) + ": missing field '" + name + "'");
      if (!obj[name].is_number())
        throw data_error("line " + std::to_string(li + 1) + ": field '" + name + "' is not a number");
      values.push_back(obj[name].get<double>());
    }
  }
  if (values.empty()) throw data_error("no states: the file holds no records");
  return StateTable(schema, std::move(values), std::move(provenance));
}

}  // namespace

StateTable parse_states(std::string_view text, const StateSchema& schema, StateFormat format, std::string provenance) {
  return format == StateFormat::csv ? parse_csv(text, schema, std::move(provenance))
                                    : parse_jsonl(text, schema, std::move(provenance));
}

StateTable load_states(const std::string& path, const StateSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open state file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  StateFormat format = StateFormat::csv;
  if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) {
    format = StateFormat::jsonl;
  } else if (!path.ends_with(".csv")) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') format = StateFormat::jsonl;
  }
  return parse_states(text, schema, format, "file:" + path);
}

std::string format_states(const StateTable& states, StateFormat format) {
  const StateSchema& schema = states.schema();
  std::string out;
  if (format == StateFormat::csv) {
    for (std::size_t d = 0; d < schema.size(); ++d) out += (d ? "," : "") + schema[d].name;
    out += '\n';
    for (std::size_t r = 0; r < states.rows(); ++r) {
      for (std::size_t d = 0; d < schema.size(); ++d) out += (d ? "," : "") + format_double(states.at(r, d));
      out += '\n';
    }
  } else {
    for (std::size_t r = 0; r < states.rows(); ++r) {
      out += '{';
      for (std::size_t d = 0; d < schema.size(); ++d)
        out += (d ? "," : "") + json(schema[d].name).dump() + ":" + format_double(states.at(r, d));
      out += "}\n";
    }
  }
  return out;
}

void save_states(const StateTable& states, const std::string& path) {
  const StateFormat format =
      path.ends_with(".jsonl") || path.ends_with(".ndjson") ? StateFormat::jsonl : StateFormat::csv;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write state file '" + path + "'");
  out << format_states(states, format);
}

StateTable sample_states(const StateSchema& schema, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw config_error("sample size must be at least 1");
  for (const auto& d : schema.dims()) {
    if (d.kind != DimensionKind::binary && (!d.lower || !d.upper))
      throw config_error("cannot sample dimension '" + d.name + "': it needs finite lower and upper bounds");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> values(n * schema.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& d = schema[c];
      double v = 0.0;
      switch (d.kind) {
        case DimensionKind::continuous:
          v = std::uniform_real_distribution<double>(*d.lower, *d.upper)(rng);
          break;
        case DimensionKind::discrete: {
          const auto lo = static_cast<long long>(std::ceil(*d.lower));
          const auto hi = static_cast<long long>(std::floor(*d.upper));
          v = static_cast<double>(std::uniform_int_distribution<long long>(lo, hi)(rng));
          break;
        }
        case DimensionKind::binary: v = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0; break;
      }
      values[r * schema.size() + c] = v;
    }
  }
  return StateTable(schema, std::move(values), "synthetic:seed=" + std::to_string(seed));
}

std::vector<NeuronRef> active_neurons(const ActivationTrace& trace, std::size_t layer, double beta, double min_frac) {
  if (!(min_frac >= 0.0 && min_frac <= 1.0)) throw config_error("min_frac must lie in [0, 1]");
  if (layer == 0 || layer > trace.hidden.size())
    throw config_error("hidden layer " + std::to_string(layer) + " does not exist");
  const Matrix& m = trace.layer(layer);
  std::vector<NeuronRef> out;
  if (m.rows == 0) return out;
  for (std::size_t i = 0; i < m.cols; ++i) {
    const NeuronRef ref{layer, i};
    const double frac = static_cast<double>(binarize(trace, ref, beta).popcount()) / static_cast<double>(m.rows);
    if (frac > min_frac) out.push_back(ref);
  }
  return out;
}

}  // namespace ccprobe
