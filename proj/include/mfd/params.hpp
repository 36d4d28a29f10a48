#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfd/random.hpp"
#include "mfd/tensor.hpp"

namespace mfd::ad {

// Learnable weights keyed by path, plus AdamW moments under the same paths.
// A parameter is trainable exactly when its tensor requires grad.
class ParamStore {
 public:
  struct Moments {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
  };

  Tensor& add(const std::string& path, Tensor init);
  Tensor& get(const std::string& path);
  const Tensor& get(const std::string& path) const;
  bool contains(const std::string& path) const { return params_.count(path) > 0; }

  // Sets requires_grad on every parameter whose path starts with `prefix`.
  void set_trainable(const std::string& prefix, bool trainable);
  void zero_grad();

  std::vector<std::string> paths() const;
  std::size_t parameter_count() const;
  const std::map<std::string, Tensor>& entries() const { return params_; }

  std::map<std::string, Moments>& moments() { return moments_; }
  const std::map<std::string, Moments>& moments() const { return moments_; }
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }

 private:
  std::map<std::string, Tensor> params_;
  std::map<std::string, Moments> moments_;
  std::uint64_t step_ = 0;
};

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
Tensor uniform_init(Shape shape, std::size_t fan_in, Rng& rng);

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

// Decoupled weight decay with bias-corrected moments. Every trainable
// parameter must carry a grad (MissingGrad otherwise).
void adamw_step(ParamStore& store, const AdamWConfig& config);

// base_lr * gamma^floor(epoch / step_size)
double steplr(std::size_t epoch, double base_lr, std::size_t step_size = 5, double gamma = 0.5);

// ---- checkpoint container ----
//   "MFDCKPT1" | u32 version | u64 header bytes | JSON header | float64 payload
// The header lists {path, shape, offset, trainable}; metadata is free-form JSON
// (layout hash, hyperparameters, template hashes). Little-endian host assumed.
struct Checkpoint {
  ParamStore params;
  nlohmann::json metadata = nlohmann::json::object();
};

std::string serialize_checkpoint(const ParamStore& store, const nlohmann::json& metadata,
                                 bool include_optimizer = true);
Checkpoint deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const ParamStore& store,
                     const nlohmann::json& metadata, bool include_optimizer = true);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mfd::ad
