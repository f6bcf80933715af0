#include "fsg/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsg/common.hpp"

namespace fsg {

Dataset::Dataset(std::vector<double> row_major, uint32_t n, uint32_t d)
    : data_(std::move(row_major)), n_(n), d_(d) {
  if (n_ < 1 || d_ < 1) throw InvalidConfig("dataset needs n >= 1 and d >= 1");
  if (data_.size() != size_t(n_) * d_)
    throw InvalidConfig("dataset buffer size does not match n * d");
  for (double v : data_) {
    if (!std::isfinite(v))
      throw InvalidConfig("dataset coordinates must be finite");
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
  if (b == e) return false;
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

CsvDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  bool has_labels = false;
  bool first = true;
  std::vector<double> values;
  std::vector<uint32_t> labels;
  uint32_t d = 0;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (first) {
      first = false;
      double probe;
      if (!parse_double(fields[0], probe)) {
        // Header row; the trailing "label" column flags ground truth.
        has_labels = !fields.empty() && fields.back() == "label";
        d = static_cast<uint32_t>(fields.size() - (has_labels ? 1 : 0));
        continue;
      }
      d = static_cast<uint32_t>(fields.size());
    }
    uint32_t expect = d + (has_labels ? 1 : 0);
    if (fields.size() != expect)
      throw IoError(path + ": row with " + std::to_string(fields.size()) +
                    " fields, expected " + std::to_string(expect));
    for (uint32_t c = 0; c < d; ++c) {
      double v;
      if (!parse_double(fields[c], v))
        throw IoError(path + ": cannot parse value '" + fields[c] + "'");
      values.push_back(v);
    }
    if (has_labels) {
      double v;
      if (!parse_double(fields[d], v) || v < 0)
        throw IoError(path + ": cannot parse label '" + fields[d] + "'");
      labels.push_back(static_cast<uint32_t>(v));
    }
  }
  if (values.empty()) throw IoError(path + ": no data rows");
  uint32_t n = static_cast<uint32_t>(values.size() / d);

  CsvDataset out{Dataset(std::move(values), n, d), std::nullopt};
  if (has_labels) out.labels = std::move(labels);
  return out;
}

void save_csv(const std::string& path, const Dataset& ds,
              const std::vector<uint32_t>* labels) {
  if (labels && labels->size() != ds.size())
    throw LengthMismatch("label count does not match dataset size");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);

  for (uint32_t c = 0; c < ds.dim(); ++c) {
    if (c) out << ',';
    out << 'x' << c;
  }
  if (labels) out << ",label";
  out << '\n';

  char buf[40];
  for (uint32_t i = 0; i < ds.size(); ++i) {
    const double* p = ds.point(i);
    for (uint32_t c = 0; c < ds.dim(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", p[c]);
      out << buf;
    }
    if (labels) out << ',' << (*labels)[i];
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace fsg
