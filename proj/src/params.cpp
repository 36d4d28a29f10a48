#include "mfd/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mfd/error.hpp"

namespace mfd::ad {

using nlohmann::json;

Tensor& ParamStore::add(const std::string& path, Tensor init) {
  auto [it, inserted] = params_.emplace(path, std::move(init));
  if (!inserted) throw ShapeMismatch("parameter '" + path + "' registered twice");
  return it->second;
}

Tensor& ParamStore::get(const std::string& path) {
  auto it = params_.find(path);
  if (it == params_.end()) throw CheckpointError("unknown parameter '" + path + "'");
  return it->second;
}

const Tensor& ParamStore::get(const std::string& path) const {
  auto it = params_.find(path);
  if (it == params_.end()) throw CheckpointError("unknown parameter '" + path + "'");
  return it->second;
}

void ParamStore::set_trainable(const std::string& prefix, bool trainable) {
  for (auto& [path, t] : params_) {
    if (path.compare(0, prefix.size(), prefix) == 0) t.set_requires_grad(trainable);
  }
}

void ParamStore::zero_grad() {
  for (auto& [path, t] : params_) t.zero_grad();
}

std::vector<std::string> ParamStore::paths() const {
  std::vector<std::string> out;
  for (const auto& [path, t] : params_) out.push_back(path);
  return out;
}

std::size_t ParamStore::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [path, t] : params_) n += t.numel();
  return n;
}

Tensor uniform_init(Shape shape, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> data(shape_numel(shape));
  for (double& d : data) d = rng.uniform(-bound, bound);
  return Tensor(std::move(shape), std::move(data), true);
}

void adamw_step(ParamStore& store, const AdamWConfig& config) {
  for (const auto& [path, t] : store.entries()) {
    if (t.requires_grad() && !t.has_grad()) throw MissingGrad("parameter '" + path + "' has no gradient");
  }
  for (const auto& [path, tc] : store.entries()) {
    if (!tc.requires_grad()) continue;
    Tensor t = tc;
    auto& mom = store.moments()[path];
    if (mom.m.size() != t.numel()) {
      mom.m.assign(t.numel(), 0.0);
      mom.v.assign(t.numel(), 0.0);
      mom.step = 0;
    }
    ++mom.step;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(mom.step));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(mom.step));
    auto w = t.mutable_data();
    const auto g = t.grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= config.lr * config.weight_decay * w[i];
      mom.m[i] = config.beta1 * mom.m[i] + (1.0 - config.beta1) * g[i];
      mom.v[i] = config.beta2 * mom.v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = mom.m[i] / bc1;
      const double v_hat = mom.v[i] / bc2;
      w[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
  store.set_step(store.step() + 1);
}

double steplr(std::size_t epoch, double base_lr, std::size_t step_size, double gamma) {
  if (step_size == 0) return base_lr;
  return base_lr * std::pow(gamma, static_cast<double>(epoch / step_size));
}

namespace {

constexpr char kMagic[8] = {'M', 'F', 'D', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, const T& value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CheckpointError("checkpoint truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

void put_doubles(std::string& payload, const std::vector<double>& values) {
  payload.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double));
}

}  // namespace

std::string serialize_checkpoint(const ParamStore& store, const json& metadata, bool include_optimizer) {
  std::string payload;
  json tensors = json::array();
  for (const auto& [path, t] : store.entries()) {
    const std::vector<double> values(t.data().begin(), t.data().end());
    tensors.push_back({{"path", path},
                       {"shape", t.shape()},
                       {"offset", payload.size() / sizeof(double)},
                       {"trainable", t.requires_grad()}});
    put_doubles(payload, values);
  }
  json optimizer = json::object();
  if (include_optimizer) {
    json moments = json::array();
    for (const auto& [path, mom] : store.moments()) {
      if (mom.m.empty()) continue;
      moments.push_back({{"path", path},
                         {"step", mom.step},
                         {"size", mom.m.size()},
                         {"offset_m", payload.size() / sizeof(double)}});
      put_doubles(payload, mom.m);
      moments.back()["offset_v"] = payload.size() / sizeof(double);
      put_doubles(payload, mom.v);
    }
    optimizer = {{"step", store.step()}, {"moments", moments}};
  }
  const json header = {{"format", "mfd-checkpoint"},
                       {"version", kVersion},
                       {"metadata", metadata},
                       {"tensors", tensors},
                       {"optimizer", optimizer}};
  const std::string header_bytes = header.dump();
  std::string out(kMagic, sizeof(kMagic));
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(header_bytes.size()));
  out += header_bytes;
  out += payload;
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("not an mfd checkpoint");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = take<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw CheckpointError("checkpoint header truncated");
  json header;
  try {
    header = json::parse(bytes.substr(pos, header_len));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what());
  }
  pos += header_len;
  const std::size_t payload_doubles = (bytes.size() - pos) / sizeof(double);
  const char* payload = bytes.data() + pos;
  auto read = [&](std::size_t offset, std::size_t count) {
    if (offset + count > payload_doubles) throw CheckpointError("checkpoint payload truncated");
    std::vector<double> out(count);
    std::memcpy(out.data(), payload + offset * sizeof(double), count * sizeof(double));
    return out;
  };

  Checkpoint ck;
  ck.metadata = header.value("metadata", json::object());
  for (const auto& t : header.at("tensors")) {
    Shape shape = t.at("shape").get<Shape>();
    auto data = read(t.at("offset").get<std::size_t>(), shape_numel(shape));
    ck.params.add(t.at("path").get<std::string>(),
                  Tensor(std::move(shape), std::move(data), t.at("trainable").get<bool>()));
  }
  const auto& opt = header.at("optimizer");
  if (opt.contains("moments")) {
    ck.params.set_step(opt.at("step").get<std::uint64_t>());
    for (const auto& m : opt.at("moments")) {
      const auto size = m.at("size").get<std::size_t>();
      auto& mom = ck.params.moments()[m.at("path").get<std::string>()];
      mom.step = m.at("step").get<std::uint64_t>();
      mom.m = read(m.at("offset_m").get<std::size_t>(), size);
      mom.v = read(m.at("offset_v").get<std::size_t>(), size);
    }
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const ParamStore& store, const json& metadata,
                     bool include_optimizer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out << serialize_checkpoint(store, metadata, include_optimizer);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace mfd::ad
