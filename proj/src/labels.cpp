#include "fsg/labels.hpp"

#include <fstream>
#include <unordered_map>

#include "fsg/common.hpp"

namespace fsg {

ClusterLabels compact_labels(const std::vector<uint32_t>& raw) {
  std::unordered_map<uint32_t, uint32_t> remap;
  ClusterLabels out;
  out.labels.reserve(raw.size());
  for (uint32_t v : raw) {
    auto [it, inserted] = remap.try_emplace(v, static_cast<uint32_t>(remap.size()));
    out.labels.push_back(it->second);
  }
  out.k = static_cast<uint32_t>(remap.size());
  return out;
}

void save_labels_csv(const std::string& path, const ClusterLabels& labels) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "index,label\n";
  for (size_t i = 0; i < labels.labels.size(); ++i)
    out << i << ',' << labels.labels[i] << '\n';
  if (!out) throw IoError("failed writing " + path);
}

ClusterLabels load_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::vector<uint32_t> raw;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("index", 0) == 0) continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path + ": malformed row");
    raw.push_back(static_cast<uint32_t>(std::stoul(line.substr(comma + 1))));
  }
  return compact_labels(raw);
}

}  // namespace fsg
