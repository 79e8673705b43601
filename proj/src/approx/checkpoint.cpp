#include "marlab/approx/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "marlab/approx/serialize.hpp"

namespace marlab::approx {

namespace {

constexpr char kMagic[4] = {'M', 'L', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return value;
}

}  // namespace

NamedTensor NamedTensor::from(const std::string& name,
                              const Eigen::MatrixXd& m) {
  NamedTensor t;
  t.name = name;
  t.dims = {static_cast<std::uint64_t>(m.rows()),
            static_cast<std::uint64_t>(m.cols())};
  t.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      t.values.push_back(m(i, j));
    }
  }
  return t;
}

NamedTensor NamedTensor::from(const std::string& name,
                              const Eigen::VectorXd& v) {
  NamedTensor t;
  t.name = name;
  t.dims = {static_cast<std::uint64_t>(v.size())};
  t.values.assign(v.data(), v.data() + v.size());
  return t;
}

NamedTensor NamedTensor::scalar(const std::string& name, double value) {
  NamedTensor t;
  t.name = name;
  t.dims = {1};
  t.values = {value};
  return t;
}

Eigen::MatrixXd NamedTensor::as_matrix() const {
  if (dims.size() != 2) {
    throw std::runtime_error("checkpoint: tensor '" + name +
                             "' is not a matrix");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dims[0]),
                    static_cast<Eigen::Index>(dims[1]));
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = values[idx++];
    }
  }
  return m;
}

Eigen::VectorXd NamedTensor::as_vector() const {
  if (dims.size() != 1) {
    throw std::runtime_error("checkpoint: tensor '" + name +
                             "' is not a vector");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(
                                               values.size()));
}

double NamedTensor::as_scalar() const {
  if (values.size() != 1) {
    throw std::runtime_error("checkpoint: tensor '" + name +
                             "' is not a scalar");
  }
  return values[0];
}

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<NamedTensor>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(tensors.size()));
  for (const auto& t : tensors) {
    write_pod(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod(out, static_cast<std::uint32_t>(t.dims.size()));
    std::uint64_t total = 1;
    for (std::uint64_t d : t.dims) {
      write_pod(out, d);
      total *= d;
    }
    if (total != t.values.size()) {
      throw std::runtime_error("checkpoint: tensor '" + t.name +
                               "' dims do not match value count");
    }
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("checkpoint: cannot open " + path.string());
  }
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 4) != std::string(kMagic, 4)) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw std::runtime_error("checkpoint: unsupported version");
  }
  const auto count = read_pod<std::uint64_t>(in);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    NamedTensor t;
    const auto name_len = read_pod<std::uint32_t>(in);
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const auto rank = read_pod<std::uint32_t>(in);
    std::uint64_t total = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      t.dims.push_back(read_pod<std::uint64_t>(in));
      total *= t.dims.back();
    }
    t.values.resize(total);
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(total * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
    tensors.push_back(std::move(t));
  }
  return tensors;
}

const NamedTensor& find_tensor(const std::vector<NamedTensor>& tensors,
                               const std::string& name) {
  for (const auto& t : tensors) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("checkpoint: missing tensor '" + name + "'");
}

void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const Mlp& net) {
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    out.push_back(
        NamedTensor::from(prefix + "/W" + std::to_string(l), net.W[l]));
    out.push_back(
        NamedTensor::from(prefix + "/b" + std::to_string(l), net.b[l]));
  }
}

void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const LstmCell& cell) {
  out.push_back(NamedTensor::from(prefix + "/Wx", cell.Wx));
  out.push_back(NamedTensor::from(prefix + "/Wh", cell.Wh));
  out.push_back(NamedTensor::from(prefix + "/bias", cell.bias));
}

void append_tensors(std::vector<NamedTensor>& out, const std::string& prefix,
                    const Optimizer& opt) {
  out.push_back(NamedTensor::scalar(
      prefix + "/step", static_cast<double>(opt.step_count())));
  const auto& m = opt.first_moments();
  const auto& v = opt.second_moments();
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.push_back(NamedTensor::from(prefix + "/m" + std::to_string(i), m[i]));
    out.push_back(NamedTensor::from(prefix + "/v" + std::to_string(i), v[i]));
  }
}

void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, Mlp& net) {
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    net.W[l] = find_tensor(in, prefix + "/W" + std::to_string(l)).as_matrix();
    net.b[l] = find_tensor(in, prefix + "/b" + std::to_string(l)).as_vector();
  }
}

void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, LstmCell& cell) {
  cell.Wx = find_tensor(in, prefix + "/Wx").as_matrix();
  cell.Wh = find_tensor(in, prefix + "/Wh").as_matrix();
  cell.bias = find_tensor(in, prefix + "/bias").as_vector();
}

void read_tensors(const std::vector<NamedTensor>& in,
                  const std::string& prefix, Optimizer& opt) {
  opt.set_step_count(
      static_cast<long>(find_tensor(in, prefix + "/step").as_scalar()));
  auto& m = opt.first_moments();
  auto& v = opt.second_moments();
  m.clear();
  v.clear();
  for (std::size_t i = 0;; ++i) {
    const std::string mname = prefix + "/m" + std::to_string(i);
    bool found = false;
    for (const auto& t : in) {
      if (t.name == mname) {
        found = true;
        break;
      }
    }
    if (!found) break;
    m.push_back(find_tensor(in, mname).as_vector());
    v.push_back(
        find_tensor(in, prefix + "/v" + std::to_string(i)).as_vector());
  }
}

}  // namespace marlab::approx
