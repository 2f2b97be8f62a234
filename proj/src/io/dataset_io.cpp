#include "mdsampler/io/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdsampler/errors.hpp"

namespace md {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& s, std::int64_t line_no, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" + s + "'");
  }
}

}  // namespace

DiscreteDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  int m = 0;
  while (m < static_cast<int>(header.size()) && header[static_cast<std::size_t>(m)] == "Z" + std::to_string(m + 1)) ++m;
  if (m == 0) throw DataError(path + ": header must start with Z1..Zm");
  bool has_cond = false;
  const std::size_t expected = static_cast<std::size_t>(2 * m);
  if (header.size() == expected + 1 && header.back() == "cond")
    has_cond = true;
  else if (header.size() != expected)
    throw DataError(path + ": header must be Z1..Zm,I1..Im with an optional cond column");
  for (int i = 0; i < m; ++i)
    if (header[static_cast<std::size_t>(m + i)] != "I" + std::to_string(i + 1))
      throw DataError(path + ": header intervention columns must be I1..Im");

  DiscreteDataset data;
  data.nodes = m;

  std::int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != expected + (has_cond ? 1 : 0))
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected + (has_cond ? 1 : 0)) + " fields, got " +
                      std::to_string(fields.size()));
    for (int i = 0; i < m; ++i) {
      const int v = parse_int(fields[static_cast<std::size_t>(i)], line_no, "Z" + std::to_string(i + 1));
      if (v < 1 || v > 255)
        throw DataError("line " + std::to_string(line_no) + ": Z" + std::to_string(i + 1) +
                        " state " + std::to_string(v) + " out of range");
      data.values.push_back(static_cast<std::uint8_t>(v));
    }
    for (int i = 0; i < m; ++i) {
      const int v = parse_int(fields[static_cast<std::size_t>(m + i)], line_no, "I" + std::to_string(i + 1));
      if (v != 0 && v != 1)
        throw DataError("line " + std::to_string(line_no) + ": I" + std::to_string(i + 1) +
                        " must be 0 or 1");
      data.intervened.push_back(static_cast<std::uint8_t>(v));
    }
    if (has_cond) data.conditions.push_back(fields.back());
  }

  // Sidecar arities take precedence over the observed maxima.
  std::ifstream meta(path + ".meta.json");
  if (meta) {
    nlohmann::json j;
    try {
      meta >> j;
    } catch (const std::exception& e) {
      throw DataError(path + ".meta.json: " + e.what());
    }
    if (!j.contains("arities") || !j["arities"].is_array() ||
        static_cast<int>(j["arities"].size()) != m)
      throw DataError(path + ".meta.json: needs an 'arities' array of length " + std::to_string(m));
    for (const auto& a : j["arities"]) data.arities.push_back(a.get<int>());
  } else {
    data.arities.assign(static_cast<std::size_t>(m), 2);
    for (std::int64_t r = 0; r < data.rows(); ++r)
      for (int i = 0; i < m; ++i)
        data.arities[static_cast<std::size_t>(i)] =
            std::max(data.arities[static_cast<std::size_t>(i)], data.value(r, i));
  }

  try {
    data.check();
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
  return data;
}

void save_dataset(const std::string& path, const DiscreteDataset& data) {
  data.check();
  std::ofstream out(path);
  if (!out) throw DataError("cannot open dataset for writing: " + path);
  const bool has_cond = !data.conditions.empty();
  for (int i = 0; i < data.nodes; ++i) out << (i ? "," : "") << "Z" << (i + 1);
  for (int i = 0; i < data.nodes; ++i) out << ",I" << (i + 1);
  if (has_cond) out << ",cond";
  out << "\n";
  for (std::int64_t r = 0; r < data.rows(); ++r) {
    for (int i = 0; i < data.nodes; ++i) out << (i ? "," : "") << data.value(r, i);
    for (int i = 0; i < data.nodes; ++i) out << "," << (data.is_intervened(r, i) ? 1 : 0);
    if (has_cond) out << "," << data.conditions[static_cast<std::size_t>(r)];
    out << "\n";
  }
  nlohmann::json meta;
  meta["arities"] = data.arities;
  std::ofstream ms(path + ".meta.json");
  if (!ms) throw DataError("cannot open sidecar for writing: " + path + ".meta.json");
  ms << meta.dump(2) << "\n";
}

}  // namespace md
