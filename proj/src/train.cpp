#include "mfd/train.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "mfd/error.hpp"
#include "mfd/random.hpp"

namespace mfd {

using ad::Tensor;
using nlohmann::json;

json TrainResult::to_json() const {
  json h = json::array();
  for (const auto& e : history) {
    json row = {{"epoch", e.epoch}, {"lr", e.lr}, {"loss", e.loss}, {"pred_loss", e.pred_loss},
                {"llm_loss", e.llm_loss}};
    if (e.val) row["val"] = e.val->to_json();
    h.push_back(std::move(row));
  }
  json j = {{"history", std::move(h)}, {"best_epoch", best_epoch}, {"steps", steps}};
  j["best_val_mae"] = best_val_mae ? json(*best_val_mae) : json(nullptr);
  return j;
}

std::string TrainResult::history_csv() const {
  std::ostringstream out;
  out << "epoch,lr,loss,pred_loss,llm_loss,val_mae,val_accuracy\n";
  char buf[256];
  for (const auto& e : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,", e.epoch, e.lr, e.loss, e.pred_loss, e.llm_loss);
    out << buf;
    if (e.val) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", e.val->mean.mae, e.val->mean.accuracy);
      out << buf;
    } else {
      out << ",";
    }
    out << "\n";
  }
  return out.str();
}

std::vector<InvolvementScores> labels_of(const std::vector<PreparedDoc>& docs) {
  std::vector<InvolvementScores> out;
  for (const auto& d : docs) {
    if (d.labels.size() != d.inputs.size()) throw DatasetError("document " + d.id + " is not fully labeled");
    out.insert(out.end(), d.labels.begin(), d.labels.end());
  }
  return out;
}

std::vector<InvolvementScores> predict_all(const FusionModel& model, const std::vector<PreparedDoc>& docs) {
  std::vector<InvolvementScores> out;
  for (const auto& d : docs) {
    const auto p = model.predict(d.inputs);
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

namespace {

struct Sample {
  std::size_t doc, row;
};

std::map<std::string, std::vector<double>> snapshot(const ad::ParamStore& store) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [path, t] : store.entries()) out[path].assign(t.data().begin(), t.data().end());
  return out;
}

void restore(ad::ParamStore& store, const std::map<std::string, std::vector<double>>& snap) {
  for (const auto& [path, values] : snap) {
    auto dst = store.get(path).mutable_data();
    std::copy(values.begin(), values.end(), dst.begin());
  }
}

}  // namespace

TrainResult train_predictor(FusionModel& model, const std::vector<PreparedDoc>& train,
                            const std::vector<PreparedDoc>& val, const TrainConfig& config,
                            const TrainOptions& options) {
  std::vector<Sample> samples;
  for (std::size_t d = 0; d < train.size(); ++d) {
    if (train[d].labels.size() != train[d].inputs.size()) {
      throw DatasetError("training document " + train[d].id + " is not fully labeled");
    }
    for (std::size_t r = 0; r < train[d].inputs.size(); ++r) samples.push_back({d, r});
  }
  if (samples.empty()) throw DatasetError("training set is empty");
  const auto val_labels = val.empty() ? std::vector<InvolvementScores>{} : labels_of(val);

  auto& store = model.params();
  std::map<std::string, bool> saved_flags;
  for (const auto& [path, t] : store.entries()) saved_flags[path] = t.requires_grad();
  if (options.freeze_head && model.dims().use_high) store.set_trainable(model.head().prefix + ".", false);

  Rng rng(config.seed);
  TrainResult result;
  std::map<std::string, std::vector<double>> best;
  bool done = false;
  for (std::size_t epoch = 0; epoch < config.epochs && !done; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = ad::steplr(epoch, config.lr, config.step_size, config.gamma);
    const ad::AdamWConfig opt{rec.lr, 0.9, 0.999, 1e-8, config.weight_decay};
    rng.shuffle(std::span<Sample>(samples));
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < samples.size(); begin += config.batch_train) {
      const std::size_t end = std::min(samples.size(), begin + config.batch_train);
      std::vector<Sample> batch(samples.begin() + begin, samples.begin() + end);
      std::stable_sort(batch.begin(), batch.end(), [](const Sample& a, const Sample& b) { return a.doc < b.doc; });
      std::vector<FusionModel::Item> items;
      std::vector<double> targets;
      for (const auto& s : batch) {
        if (items.empty() || items.back().doc != &train[s.doc].inputs) items.push_back({&train[s.doc].inputs, {}});
        items.back().rows.push_back(s.row);
        const auto a = train[s.doc].labels[s.row].as_array();
        targets.insert(targets.end(), a.begin(), a.end());
      }
      const Tensor y = Tensor::matrix(batch.size(), 3, std::move(targets));
      store.zero_grad();
      const JointLoss loss = joint_loss(model.forward(items), y, config.beta);
      rec.loss += loss.total.item();
      rec.pred_loss += loss.pred.item();
      rec.llm_loss += loss.llm.item();
      ad::backward(loss.total);
      ad::adamw_step(store, opt);
      ++batches;
      ++result.steps;
      if (options.max_steps && result.steps >= options.max_steps) {
        done = true;
        break;
      }
    }
    rec.loss /= static_cast<double>(batches);
    rec.pred_loss /= static_cast<double>(batches);
    rec.llm_loss /= static_cast<double>(batches);
    if (!val.empty()) {
      rec.val = regression_metrics(predict_all(model, val), val_labels);
      if (!result.best_val_mae || rec.val->mean.mae < *result.best_val_mae) {
        result.best_val_mae = rec.val->mean.mae;
        result.best_epoch = epoch;
        best = snapshot(store);
      }
    } else {
      result.best_epoch = epoch;
    }
    result.history.push_back(std::move(rec));
  }
  if (!best.empty()) restore(store, best);
  store.zero_grad();
  for (const auto& [path, flag] : saved_flags) store.get(path).set_requires_grad(flag);
  return result;
}

}  // namespace mfd
