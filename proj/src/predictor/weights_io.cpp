// SPDX-License-Identifier: Apache-2.0
#include "arpvc/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace arpvc {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'F', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error("weight file: truncated while reading " + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  put_u32(os, u);
}

float get_f32(std::istream& is, const std::string& what) {
  std::uint32_t u = get_u32(is, what);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void save_tensor_file(const std::string& path,
                      const std::vector<std::pair<std::string, const Tensor<float>*>>& tensors) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("weight file: cannot open for writing: " + path);
  os.write(kMagic, 4);
  put_u32(os, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    put_u32(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(os, static_cast<std::uint32_t>(t->rank()));
    for (int a = 0; a < t->rank(); ++a) put_u32(os, static_cast<std::uint32_t>(t->extent(a)));
    for (std::size_t i = 0; i < t->size(); ++i) put_f32(os, (*t)[i]);
  }
  if (!os) throw std::runtime_error("weight file: write failed: " + path);
}

std::vector<std::pair<std::string, Tensor<float>>> load_tensor_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("weight file: cannot open: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("weight file: bad magic in " + path);
  const std::uint32_t count = get_u32(is, "tensor count");
  std::vector<std::pair<std::string, Tensor<float>>> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = get_u32(is, "name length");
    std::string name(name_len, '\0');
    if (!is.read(name.data(), name_len))
      throw std::runtime_error("weight file: truncated tensor name in " + path);
    const std::uint32_t rank = get_u32(is, "rank of " + name);
    if (rank < 1 || rank > 4)
      throw std::runtime_error("weight file: tensor " + name + " has unsupported rank " +
                               std::to_string(rank));
    std::vector<int> shape(rank);
    for (std::uint32_t a = 0; a < rank; ++a)
      shape[a] = static_cast<int>(get_u32(is, "extent of " + name));
    Tensor<float> t(shape);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = get_f32(is, "data of " + name);
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

void save_model(const std::string& path, const PredictorModel<float>& model) {
  std::vector<std::pair<std::string, const Tensor<float>*>> tensors;
  model.for_each_param([&tensors](const std::string& name, const Tensor<float>& t) {
    tensors.emplace_back(name, &t);
  });
  save_tensor_file(path, tensors);
}

PredictorModel<float> load_model(const std::string& path) {
  auto tensors = load_tensor_file(path);
  std::map<std::string, Tensor<float>*> by_name;
  for (auto& [name, t] : tensors) by_name[name] = &t;

  // The channel plan is recovered from the prediction-conv shapes.
  std::array<int, kPredictorModules> channels{};
  for (int m = 0; m < kPredictorModules; ++m) {
    const std::string key = "mod" + std::to_string(m + 1) + ".pred.w";
    auto it = by_name.find(key);
    if (it == by_name.end())
      throw std::runtime_error("weight file: missing tensor " + key + " in " + path);
    if (it->second->rank() != 4)
      throw std::runtime_error("weight file: tensor " + key + " must have rank 4");
    channels[m] = it->second->extent(0);
  }

  PredictorModel<float> model = PredictorModel<float>::zeros(channels);
  model.for_each_param([&by_name, &path](const std::string& name, Tensor<float>& t) {
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw std::runtime_error("weight file: missing tensor " + name + " in " + path);
    if (it->second->shape() != t.shape())
      throw std::runtime_error("weight file: tensor " + name + " has shape " +
                               it->second->shape_str() + ", expected " + t.shape_str());
    t = std::move(*it->second);
  });
  return model;
}

}  // namespace arpvc
