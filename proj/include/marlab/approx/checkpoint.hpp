#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace marlab::approx {

// Named, shape-tagged tensor for checkpointing.  Data is stored row-major
// in the file regardless of Eigen's in-memory layout.
struct NamedTensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;  // row-major

  static NamedTensor from(const std::string& name, const Eigen::MatrixXd& m);
  static NamedTensor from(const std::string& name, const Eigen::VectorXd& v);
  static NamedTensor scalar(const std::string& name, double value);

  Eigen::MatrixXd as_matrix() const;
  Eigen::VectorXd as_vector() const;
  double as_scalar() const;
};

// Binary checkpoint format, little endian:
//   magic "MLCK" | u32 version (=1) | u64 tensor count | tensors...
// each tensor:
//   u32 name length | name bytes | u32 rank | u64 dims... | f64 values (row-major)
void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

// Lookup helper; throws std::out_of_range when the name is missing.
const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors,
                               const std::string& name);

}  // namespace marlab::approx
