#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mplx/common.hpp"
#include "mplx/tensor.hpp"

namespace mplx {

struct AdamState {
  Tensor m;
  Tensor v;
  std::uint64_t step = 0;
};

/// Named parameter tensors with per-parameter Adam state and freeze flags.
class ParamStore {
 public:
  Tensor& add(const std::string& name, Tensor t) {
    if (params_.count(name)) throw ConfigError("ParamStore: duplicate name " + name);
    t.requires_grad = true;
    AdamState st;
    st.m = Tensor::zeros(t.shape);
    st.v = Tensor::zeros(t.shape);
    adam_[name] = std::move(st);
    frozen_[name] = false;
    return params_[name] = std::move(t);
  }

  bool has(const std::string& name) const { return params_.count(name) != 0; }

  Tensor& get(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("ParamStore: unknown name " + name);
    return it->second;
  }
  const Tensor& get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("ParamStore: unknown name " + name);
    return it->second;
  }

  bool frozen(const std::string& name) const { return frozen_.at(name); }
  void set_frozen(const std::string& name, bool f) {
    if (!params_.count(name)) throw ConfigError("ParamStore: unknown name " + name);
    frozen_[name] = f;
  }
  /// Freezes every parameter whose name starts with `prefix`.
  void freeze_prefix(const std::string& prefix, bool f = true) {
    for (auto& [name, flag] : frozen_)
      if (name.rfind(prefix, 0) == 0) flag = f;
  }

  const std::map<std::string, Tensor>& params() const { return params_; }
  const AdamState& adam_state(const std::string& name) const { return adam_.at(name); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : params_) out.push_back(n);
    return out;
  }

  /// Bias-corrected Adam update. Frozen parameters are untouched. A missing
  /// gradient for an unfrozen parameter is a warning, not an error.
  void adam_step(const std::map<std::string, Tensor>& grads, double lr,
                 double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    for (auto& [name, w] : params_) {
      if (frozen_.at(name)) continue;
      auto git = grads.find(name);
      if (git == grads.end()) {
        std::cerr << "warning: no gradient for unfrozen parameter " << name
                  << ", skipping\n";
        continue;
      }
      const Tensor& g = git->second;
      if (!g.same_shape(w)) throw ShapeError("adam_step: grad shape mismatch for " + name);
      AdamState& st = adam_.at(name);
      st.step += 1;
      double bc1 = 1.0 - std::pow(beta1, static_cast<double>(st.step));
      double bc2 = 1.0 - std::pow(beta2, static_cast<double>(st.step));
      for (std::size_t i = 0; i < w.numel(); ++i) {
        st.m.data[i] = beta1 * st.m.data[i] + (1.0 - beta1) * g.data[i];
        st.v.data[i] = beta2 * st.v.data[i] + (1.0 - beta2) * g.data[i] * g.data[i];
        double mhat = st.m.data[i] / bc1;
        double vhat = st.v.data[i] / bc2;
        w.data[i] -= lr * mhat / (std::sqrt(vhat) + eps);
      }
      w.check_finite("adam_step: parameter " + name);
    }
  }

  /// Deep copy of parameter values only (for best-checkpoint restore).
  std::map<std::string, Tensor> snapshot_values() const { return params_; }
  void restore_values(const std::map<std::string, Tensor>& snap) {
    for (const auto& [name, t] : snap) get(name).data = t.data;
  }

  // -- checkpoint file ------------------------------------------------------
  // Layout: "MPLX" | version u32 | record count u32 | records. Record:
  // name_len u32 | name bytes | dtype u8 (0 = f64) | rank u32 | extents u64[]
  // | payload f64[] | frozen u8 | adam m f64[] | adam v f64[] | step u64.
  // All integers and floats little-endian.

  static constexpr std::uint32_t kFormatVersion = 1;

  void save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw IoError("cannot open for write: " + tmp);
      f.write("MPLX", 4);
      write_u32(f, kFormatVersion);
      write_u32(f, static_cast<std::uint32_t>(params_.size()));
      for (const auto& [name, t] : params_) {
        write_u32(f, static_cast<std::uint32_t>(name.size()));
        f.write(name.data(), static_cast<std::streamsize>(name.size()));
        f.put(0);  // dtype tag: f64
        write_u32(f, static_cast<std::uint32_t>(t.rank()));
        for (std::size_t e : t.shape) write_u64(f, e);
        write_f64s(f, t.data);
        f.put(frozen_.at(name) ? 1 : 0);
        const AdamState& st = adam_.at(name);
        write_f64s(f, st.m.data);
        write_f64s(f, st.v.data);
        write_u64(f, st.step);
      }
      if (!f) throw IoError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
  }

  static ParamStore load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "MPLX", 4) != 0)
      throw IoError("bad checkpoint magic: " + path);
    std::uint32_t version = read_u32(f);
    if (version != kFormatVersion)
      throw VersionError("unsupported checkpoint version " + std::to_string(version));
    std::uint32_t count = read_u32(f);
    ParamStore out;
    for (std::uint32_t r = 0; r < count; ++r) {
      std::uint32_t len = read_u32(f);
      std::string name(len, '\0');
      f.read(name.data(), len);
      int dtype = f.get();
      if (dtype != 0) throw IoError("unsupported dtype tag in " + path);
      std::uint32_t rank = read_u32(f);
      std::vector<std::size_t> shape(rank);
      for (auto& e : shape) e = static_cast<std::size_t>(read_u64(f));
      std::size_t n = Tensor::numel_of(shape);
      Tensor t = Tensor::zeros(shape);
      read_f64s(f, t.data, n);
      Tensor& stored = out.add(name, std::move(t));
      (void)stored;
      out.frozen_[name] = f.get() != 0;
      AdamState& st = out.adam_[name];
      read_f64s(f, st.m.data, n);
      read_f64s(f, st.v.data, n);
      st.step = read_u64(f);
      if (!f) throw IoError("truncated checkpoint: " + path);
    }
    return out;
  }

 private:
  static void write_u32(std::ofstream& f, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<char*>(b), 4);
  }
  static void write_u64(std::ofstream& f, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    f.write(reinterpret_cast<char*>(b), 8);
  }
  static void write_f64s(std::ofstream& f, const std::vector<double>& v) {
    for (double x : v) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, 8);
      write_u64(f, bits);
    }
  }
  static std::uint32_t read_u32(std::ifstream& f) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  static std::uint64_t read_u64(std::ifstream& f) {
    unsigned char b[8];
    f.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  static void read_f64s(std::ifstream& f, std::vector<double>& v, std::size_t n) {
    v.resize(n);
    for (auto& x : v) {
      std::uint64_t bits = read_u64(f);
      std::memcpy(&x, &bits, 8);
    }
  }

  std::map<std::string, Tensor> params_;
  std::map<std::string, AdamState> adam_;
  std::map<std::string, bool> frozen_;
};

}  // namespace mplx
