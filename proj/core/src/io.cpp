#include "isinglearn/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "isinglearn/errors.hpp"

namespace isinglearn {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string model_to_json(const IsingModel& m, CouplingEncoding enc) {
  const int n = m.size();
  const Matrix& j = m.coupling.matrix();
  std::ostringstream out;
  out << "{\n  \"n\": " << n << ",\n  \"h\": [";
  for (int i = 0; i < n; ++i) out << (i ? ", " : "") << format_double(m.field(i));
  out << "],\n  \"J\": {";
  if (enc == CouplingEncoding::Dense) {
    out << "\"dense\": [";
    for (int i = 0; i < n; ++i) {
      out << (i ? ",\n    [" : "\n    [");
      for (int k = 0; k < n; ++k) out << (k ? ", " : "") << format_double(j(i, k));
      out << "]";
    }
    out << (n ? "\n  ]" : "]");
  } else {
    out << "\"triplets\": [";
    bool first = true;
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        if (j(i, k) == 0.0) continue;
        out << (first ? "\n    [" : ",\n    [") << i << ", " << k << ", " << format_double(j(i, k)) << "]";
        first = false;
      }
    out << (first ? "]" : "\n  ]");
  }
  out << "}\n}\n";
  return out.str();
}

IsingModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("model file line " + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file: top level must be an object");
  if (!doc.contains("n")) throw ParseError("model file: missing key \"n\"");
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 1)
    throw ParseError("model file field \"n\": expected a positive integer");
  const int n = doc["n"].get<int>();

  Vector h = Vector::Zero(n);
  if (doc.contains("h")) {
    const json& hj = doc["h"];
    if (!hj.is_array()) throw ParseError("model file field \"h\": expected an array");
    h.resize(static_cast<Eigen::Index>(hj.size()));
    for (std::size_t i = 0; i < hj.size(); ++i) h(i) = as_number(hj[i], "model file field \"h\"[" + std::to_string(i) + "]");
  }

  if (!doc.contains("J")) throw ParseError("model file: missing key \"J\"");
  const json& jj = doc["J"];
  if (!jj.is_object()) throw ParseError("model file field \"J\": expected an object");
  Matrix j = Matrix::Zero(n, n);
  if (jj.contains("dense")) {
    const json& rows = jj["dense"];
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n))
      throw ParseError("model file field \"J.dense\": expected " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
      const json& row = rows[i];
      const std::string where = "model file field \"J.dense\"[" + std::to_string(i) + "]";
      if (!row.is_array() || row.size() != static_cast<std::size_t>(n))
        throw ParseError(where + ": expected " + std::to_string(n) + " entries");
      for (int k = 0; k < n; ++k) j(i, k) = as_number(row[k], where + "[" + std::to_string(k) + "]");
    }
  } else if (jj.contains("triplets")) {
    const json& trips = jj["triplets"];
    if (!trips.is_array()) throw ParseError("model file field \"J.triplets\": expected an array");
    for (std::size_t t = 0; t < trips.size(); ++t) {
      const json& e = trips[t];
      const std::string where = "model file field \"J.triplets\"[" + std::to_string(t) + "]";
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ParseError(where + ": expected [i, j, value]");
      const long long a = e[0].get<long long>();
      const long long b = e[1].get<long long>();
      if (a < 0 || b >= n || a >= b) throw ParseError(where + ": indices must satisfy 0 <= i < j < n");
      j(a, b) = j(b, a) = as_number(e[2], where + "[2]");
    }
  } else {
    throw ParseError("model file field \"J\": expected \"dense\" or \"triplets\"");
  }

  try {
    return IsingModel::checked(std::move(j), std::move(h));
  } catch (const ValidationError& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_model(const IsingModel& m, const std::filesystem::path& path, CouplingEncoding enc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << model_to_json(m, enc);
}

IsingModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

void write_samples(const SampleBatch& batch, std::ostream& out) {
  const auto& s = batch.spins();
  std::string line;
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    line.clear();
    for (Eigen::Index i = 0; i < s.cols(); ++i) {
      if (i) line += ',';
      line += s(k, i) > 0 ? "1" : "-1";
    }
    line += '\n';
    out << line;
  }
}

SampleBatch read_samples(std::istream& in) {
  std::vector<std::int8_t> values;
  std::string line;
  int line_no = 0;
  long long width = -1;
  long long rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    long long cols = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (field == "1") {
        values.push_back(1);
      } else if (field == "-1") {
        values.push_back(-1);
      } else {
        throw ParseError("sample file line " + std::to_string(line_no) + ", field " + std::to_string(cols + 1) +
                         ": expected -1 or 1, got \"" + field + "\"");
      }
      ++cols;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (width < 0) width = cols;
    if (cols != width)
      throw ParseError("sample file line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " fields, got " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) throw ParseError("sample file: no samples");
  SampleBatch::Spins spins = Eigen::Map<SampleBatch::Spins>(values.data(), rows, width);
  return SampleBatch(std::move(spins));
}

void save_samples(const SampleBatch& batch, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  write_samples(batch, out);
}

SampleBatch load_samples(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_samples(in);
}

}  // namespace isinglearn
