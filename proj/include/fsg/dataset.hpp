#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fsg {

// An ordered set of n points in R^d. The index order is fixed at
// construction: the sampler's binary splits are defined over it.
class Dataset {
public:
  Dataset(std::vector<double> row_major, uint32_t n, uint32_t d);

  uint32_t size() const { return n_; }
  uint32_t dim() const { return d_; }
  const double* point(uint32_t i) const { return data_.data() + size_t(i) * d_; }
  const std::vector<double>& raw() const { return data_; }

private:
  std::vector<double> data_;
  uint32_t n_;
  uint32_t d_;
};

struct CsvDataset {
  Dataset data;
  std::optional<std::vector<uint32_t>> labels;
};

// CSV layout: optional header "x0,...,x{d-1}[,label]"; one point per row.
// A trailing integer label column is read when the header names it "label".
CsvDataset load_csv(const std::string& path);
void save_csv(const std::string& path, const Dataset& ds,
              const std::vector<uint32_t>* labels = nullptr);

}  // namespace fsg
